import math

import numpy as np

"""
Helpers shared by the simulation, analytics and pricing modules:
the exception hierarchy, sign conventions and a compensated accumulator.
"""

class ModelException(Exception):
  """
  Base of every error raised by the model code.
  """

  pass

class PreconditionException(ModelException, ValueError):
  """
  An operation was called with inputs outside its domain.
  """

  pass

class ConfigException(ModelException):
  """
  A run configuration failed to parse or validate.
  The offending key is kept so the command line can name it.
  """

  def __init__(self, key, reason):
    super().__init__("Invalid config key '%s': %s" % (key, reason))
    self.key = key
    self.reason = reason

def requirePositive(name, value):
  """
  Raises a PreconditionException unless value is a finite number > 0.

  >>> requirePositive('step', 0.5)
  0.5
  >>> requirePositive('step', 0.0)
  Traceback (most recent call last):
  ...
  util.PreconditionException: step must be positive, got 0.0
  """

  value = float(value)
  if not (math.isfinite(value) and value > 0.0):
    raise PreconditionException("%s must be positive, got %r" % (name, value))

  return value

def sign(x):
  """
  Returns 1 or -1 depending on the sign of x.
  Zero counts as negative: a firm with no cash is on the distress side.

  >>> sign(2.5)
  1
  >>> sign(0.0)
  -1
  >>> sign(-3)
  -1
  """

  if (x > 0):
    return 1
  else:
    return -1

def signArray(values):
  """
  Vectorized sign() over a numpy array, returned as int8.
  """

  return np.where(np.asarray(values) > 0.0, 1, -1).astype(np.int8)

class Accumulator(object):
  """
  A running sum with Neumaier compensation.

  Monte Carlo reductions add hundreds of thousands of terms; plain float
  addition drifts with the order of the terms, this does not (to the
  last bit, for a fixed order of add() calls).

  >>> a = Accumulator()
  >>> for x in [1e16, 1.0, -1e16]:
  ...     a.add(x)
  >>> a.total()
  1.0
  >>> a.count
  3

  Two accumulators can be merged, which is how chunk results are combined:

  >>> b = Accumulator()
  >>> b.addAll([0.25, 0.25])
  >>> a.merge(b)
  >>> a.total()
  1.5
  """

  def __init__(self):
    self.sum = 0.0
    self.compensation = 0.0
    self.count = 0

  def add(self, value):
    self._addTerm(float(value))
    self.count += 1

  def _addTerm(self, value):
    total = self.sum + value
    if abs(self.sum) >= abs(value):
      self.compensation += (self.sum - total) + value
    else:
      self.compensation += (value - total) + self.sum

    self.sum = total

  def addAll(self, values):
    """
    Adds every element of values, in order.
    """

    for value in values:
      self.add(value)

  def merge(self, other):
    """
    Folds another accumulator into this one.
    """

    self._addTerm(other.sum)
    self._addTerm(other.compensation)
    self.count += other.count

  def total(self):
    return self.sum + self.compensation

  def mean(self):
    if self.count == 0:
      return float('nan')

    return self.total() / self.count
