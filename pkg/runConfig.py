import os

import numpy as np

import defaultDetector
import mcOracle
import pathEngine
import pricer
import tauAlphaLaw
import util

"""
Run configurations: plain `key = value` files, one key per line, `#` starts
a comment, lists are comma separated. A bare name is looked up in the
bundled configs directory, anything else is taken as a path.
"""

# By default, the config directory is adjacent to this file.
DEFAULT_CONFIG_DIR = os.path.join(os.path.dirname(os.path.realpath(__file__)), 'configs')
CONFIG_EXTENSION = '.cfg'

SCHEMA_VERSION = 1

# The only setting the environment may override.
OUTPUT_DIR_ENV = 'EXCURSION_CREDIT_OUTPUT_DIR'

def _parseFloat(key, text):
  try:
    return float(text)
  except ValueError:
    raise util.ConfigException(key, "'%s' is not a number" % (text))

def _parseInt(key, text):
  try:
    return int(text)
  except ValueError:
    raise util.ConfigException(key, "'%s' is not an integer" % (text))

def _parseBool(key, text):
  lowered = text.lower()
  if lowered in ('true', 'yes', 'on', '1'):
    return True
  elif lowered in ('false', 'no', 'off', '0'):
    return False

  raise util.ConfigException(key, "'%s' is not a boolean" % (text))

def _parseFloatList(key, text):
  items = [item.strip() for item in text.split(',') if item.strip() != '']
  if len(items) == 0:
    raise util.ConfigException(key, "empty list")

  return [_parseFloat(key, item) for item in items]

def _parseText(key, text):
  if text == '':
    raise util.ConfigException(key, "empty value")

  return text

REQUIRED_KEYS = {
  'schema_version': _parseInt,
  'alpha': _parseFloat,
  'horizon': _parseFloat,
  'step': _parseFloat,
  'n_paths': _parseInt,
  'master_seed': _parseInt,
  'rate_breakpoints': _parseFloatList,
  'rate_values': _parseFloatList,
  'maturities': _parseFloatList,
  'inversion_terms': _parseInt,
  'bridge_correction': _parseBool,
  'output_dir': _parseText,
}

OPTIONAL_KEYS = {
  'law_points': _parseInt,
  'law_max_time': _parseFloat,
  'hazard_bins': _parseFloatList,
  'extended_precision': _parseBool,
  'chunk_size': _parseInt,
  'allowance': _parseFloat,
}

class RunConfig(object):
  """
  A validated run configuration. Every component a command needs is
  built here once, so a bad value fails at load time with its key.
  """

  def __init__(self, values):
    if values['schema_version'] != SCHEMA_VERSION:
      raise util.ConfigException('schema_version', "expected %d, got %d" % (SCHEMA_VERSION, values['schema_version']))

    self.alpha = _build('alpha', defaultDetector.AlphaParam, values['alpha'])
    self.horizon = values['horizon']
    self.step = values['step']
    self.gridValue = _build('step', pathEngine.makeGrid, self.horizon, self.step)
    self.nPaths = values['n_paths']
    self.masterSeed = values['master_seed']
    self.curve = _build('rate_breakpoints', pricer.DiscountCurve, values['rate_breakpoints'], values['rate_values'])
    self.bridgeCorrection = values['bridge_correction']
    self.outputDir = values['output_dir']
    self.chunkSize = values.get('chunk_size', mcOracle.DEFAULT_CHUNK_SIZE)
    self.allowance = values.get('allowance', mcOracle.DEFAULT_ALLOWANCE)
    if not self.allowance >= 0.0:
      raise util.ConfigException('allowance', "must be nonnegative, got %r" % (self.allowance))

    self.maturities = values['maturities']
    if any(T <= 0.0 for T in self.maturities):
      raise util.ConfigException('maturities', "must be positive")

    if any(later <= earlier for earlier, later in zip(self.maturities, self.maturities[1:])):
      raise util.ConfigException('maturities', "must be strictly increasing")

    self.inversionTerms = values['inversion_terms']
    self.extendedPrecision = values.get('extended_precision', False)
    terms = self.inversionTerms
    if terms % 2 != 0 or not tauAlphaLaw.MIN_INVERSION_TERMS <= terms <= tauAlphaLaw.MAX_INVERSION_TERMS:
      raise util.ConfigException('inversion_terms', "must be even and in [%d, %d], got %d" % (
          tauAlphaLaw.MIN_INVERSION_TERMS, tauAlphaLaw.MAX_INVERSION_TERMS, terms))

    if terms > tauAlphaLaw.MAX_DOUBLE_PRECISION_TERMS and not self.extendedPrecision:
      raise util.ConfigException('inversion_terms', "%d terms need extended_precision = true" % (terms))

    self.lawPoints = values.get('law_points', tauAlphaLaw.DEFAULT_LAW_POINTS)
    if self.lawPoints < 2:
      raise util.ConfigException('law_points', "need at least 2, got %d" % (self.lawPoints))

    self.lawMaxTime = values.get('law_max_time', max(self.horizon, self.maturities[-1]))
    if self.lawMaxTime <= self.alpha.trigger() or self.lawMaxTime < self.maturities[-1]:
      raise util.ConfigException('law_max_time', "must pass alpha^2 / 2 and cover the last maturity")

    trigger = self.alpha.trigger()
    if 'hazard_bins' in values:
      self.hazardBins = values['hazard_bins']
      if len(self.hazardBins) < 2 or any(later <= earlier for earlier, later in zip(self.hazardBins, self.hazardBins[1:])):
        raise util.ConfigException('hazard_bins', "need at least 2 strictly increasing edges")

      if self.hazardBins[0] < 0.0:
        raise util.ConfigException('hazard_bins', "edges must be nonnegative, got %r" % (self.hazardBins[0]))
    else:
      self.hazardBins = list(np.geomspace(trigger, max(min(self.horizon, 16.0 * trigger), 2.0 * trigger), 7))

    if self.nPaths < 1:
      raise util.ConfigException('n_paths', "must be positive, got %d" % (self.nPaths))

    if self.chunkSize < 1:
      raise util.ConfigException('chunk_size', "must be positive, got %d" % (self.chunkSize))

  def grid(self):
    return self.gridValue

  def mcSettings(self, workers = 1):
    return mcOracle.McSettings(self.nPaths, self.gridValue, self.masterSeed, self.alpha,
                               bridgeCorrection = self.bridgeCorrection, workers = workers, chunkSize = self.chunkSize)

  def law(self):
    return tauAlphaLaw.buildLaw(self.alpha, self.lawMaxTime, self.lawPoints, self.inversionTerms, self.extendedPrecision)

  def simulatedMaturities(self):
    """
    The maturities a simulation of this horizon can see.
    """

    return [T for T in self.maturities if T <= self.gridValue.horizon]

def _build(key, constructor, *args):
  try:
    return constructor(*args)
  except util.PreconditionException as ex:
    raise util.ConfigException(key, str(ex))

def parseConfigText(lines):
  """
  Reads `key = value` lines into a dict of strings.
  """

  raw = {}
  for number, line in enumerate(lines, start = 1):
    line = line.split('#', 1)[0].strip()
    if line == '':
      continue

    if '=' not in line:
      raise util.ConfigException('line %d' % (number), "expected 'key = value', got '%s'" % (line))

    key, value = [part.strip() for part in line.split('=', 1)]
    if key in raw:
      raise util.ConfigException(key, "given twice")

    raw[key] = value

  return raw

def configFromValues(raw, environ = None):
  """
  Validates a dict of strings against the schema and builds the RunConfig.
  """

  if environ is None:
    environ = os.environ

  raw = dict(raw)
  if environ.get(OUTPUT_DIR_ENV):
    raw['output_dir'] = environ[OUTPUT_DIR_ENV]

  for key in sorted(raw):
    if key not in REQUIRED_KEYS and key not in OPTIONAL_KEYS:
      raise util.ConfigException(key, "unknown key")

  for key in REQUIRED_KEYS:
    if key not in raw:
      raise util.ConfigException(key, "missing")

  values = {}
  for key, text in raw.items():
    parser = REQUIRED_KEYS.get(key, OPTIONAL_KEYS.get(key))
    values[key] = parser(key, text)

  return RunConfig(values)

def getConfig(name, configDir = DEFAULT_CONFIG_DIR, environ = None):
  """
  Loads a config by path, or by bare name from configDir.
  """

  path = name
  if not os.path.isfile(path):
    if not name.endswith(CONFIG_EXTENSION):
      name += CONFIG_EXTENSION

    path = os.path.join(configDir, name)

  if not os.path.isfile(path):
    raise util.ConfigException('config', "could not locate config file: '%s'" % (path))

  with open(path, 'r') as file:
    raw = parseConfigText(file)

  return configFromValues(raw, environ)
