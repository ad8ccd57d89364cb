"""
Where command results go. Every display writes its tables as CSV files
under the output directory; CsvDisplay also prints them.
"""

import os

# 17 significant digits read back to the same double with a round-trip parser
# (pandas: float_precision='round_trip').
FLOAT_FORMAT = '%.17g'

class NullDisplay(object):
  """
  Writes the files and prints nothing.
  """

  def __init__(self, outputDir):
    self.outputDir = outputDir
    self.written = []

  def write(self, name, frame):
    os.makedirs(self.outputDir, exist_ok = True)
    path = os.path.join(self.outputDir, name)
    frame.to_csv(path, index = False, float_format = FLOAT_FORMAT)
    self.written.append(path)
    self.show(name, frame)

    return path

  def show(self, name, frame):
    pass

  def message(self, text):
    pass

  def finish(self):
    pass

class CsvDisplay(NullDisplay):
  """
  Writes the files and prints each table with a short summary.
  """

  def show(self, name, frame):
    print('%s (%d rows)' % (name, len(frame)))
    print(frame.to_string(index = False))

  def message(self, text):
    print(text)

  def finish(self):
    for path in self.written:
      print('Wrote %s' % (path))
