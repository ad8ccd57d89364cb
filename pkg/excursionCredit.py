"""
excursionCredit.py runs the excursion credit model from the command line.

A firm's cash balance is a Brownian motion. The firm falls into distress
once its cash has been negative for alpha^2 / 2 years in a row, and
defaults if, after that, the balance doubles its distress level. The market
only sees the sign of the balance and how long ago it last crossed zero.
From there, default has an intensity and risky bonds have closed-form prices.

Commands:
  simulate        default statistics from simulated paths
  law             the CDF of the distress time, by Laplace inversion
  price           time-0 term structure of zero-recovery bonds
  distress-price  price of a bond issued by a firm in distress
  validate        every closed form against simulation
  hazard          empirical default rate by distress age

Every command reads a run config (see configs/) and writes CSV files to the
config's output directory.
"""

import logging
import sys

import pandas as pd

import csvDisplay
import excursionAnalytics
import marketView
import mcOracle
import pathFunctionals
import pricer
import runConfig
import util
import validationSuite

COMMANDS = ['simulate', 'law', 'price', 'distress-price', 'validate', 'hazard']

EXIT_SUCCESS = 0
EXIT_VALIDATION_FAILED = 1
EXIT_USAGE = 2

def default(str):
  return str + ' [Default: %default]'

def readCommand(argv):
  """
  Processes the command used to run the model from the command line.
  """

  from optparse import OptionParser

  usageStr = """
  USAGE:      python excursionCredit.py <command> <options>
  COMMANDS:   %s
  EXAMPLES:   (1) python excursionCredit.py price
                  - time-0 term structure with the desk config
              (2) python excursionCredit.py validate --config quick --workers 4
              OR  python excursionCredit.py validate -c quick -w 4
                  - a fast validation run on 4 processes
              (3) python excursionCredit.py distress-price --age 1 --fromExcursionStart 4
                  - a firm in distress for an excursion 1 year old, maturity 4 years after it began
  """ % (', '.join(COMMANDS))
  parser = OptionParser(usageStr)

  parser.add_option('-c', '--config', dest='config',
                    help=default('the CONFIG file (or name in configs/) to run with'),
                    metavar='CONFIG', default='desk')
  parser.add_option('-w', '--workers', dest='workers', type='int',
                    help=default('the number of processes simulating paths'), default=1)
  parser.add_option('-q', '--quiet', action='store_true', dest='quiet',
                    help='Write the CSV files without printing them', default=False)
  parser.add_option('-v', '--verbose', action='store_true', dest='verbose',
                    help='Log run milestones', default=False)
  parser.add_option('--debug', action='store_true', dest='debug',
                    help='Log every simulated chunk', default=False)
  parser.add_option('--age', dest='age', type='float',
                    help='distress-price: age of the current excursion, in years', default=None)
  parser.add_option('--fromExcursionStart', dest='fromExcursionStart', type='float',
                    help='distress-price: bond maturity measured from the start of the excursion, in years', default=None)

  options, otherjunk = parser.parse_args(argv)
  if len(otherjunk) != 1:
    parser.error('Expected exactly one command, got: ' + str(otherjunk))

  command = otherjunk[0]
  if command not in COMMANDS:
    parser.error("Unknown command '%s'; choose one of %s" % (command, ', '.join(COMMANDS)))

  if options.workers < 1:
    parser.error('--workers must be at least 1')

  if command == 'distress-price' and (options.age is None or options.fromExcursionStart is None):
    parser.error('distress-price needs --age and --fromExcursionStart')

  args = dict()
  args['command'] = command
  args['configName'] = options.config
  args['workers'] = options.workers
  args['quiet'] = options.quiet
  args['age'] = options.age
  args['fromExcursionStart'] = options.fromExcursionStart

  if options.debug:
    args['logLevel'] = logging.DEBUG
  elif options.verbose:
    args['logLevel'] = logging.INFO
  else:
    args['logLevel'] = logging.WARNING

  return args

def runSimulate(config, display, workers):
  maturities = config.simulatedMaturities()
  if len(maturities) == 0:
    raise util.ConfigException('maturities', "none is within the simulated horizon %g" % (config.grid().horizon))

  functionals = []
  for T in maturities:
    functionals += [pathFunctionals.TauAlphaIndicator(T), pathFunctionals.DefaultIndicator(T), pathFunctionals.AdjustmentFunctional(T)]

  tallies = mcOracle.runFunctionals(config.mcSettings(workers), functionals)

  rows = []
  for i, T in enumerate(maturities):
    stats = mcOracle.defaultStatsFrom(*tallies[3 * i:3 * i + 3])
    rows.append({
      'T': T,
      'tau_alpha_leq': stats.tauAlphaLeq.mean, 'tau_alpha_leq_se': stats.tauAlphaLeq.stdError,
      'default_leq': stats.defaultLeq.mean, 'default_leq_se': stats.defaultLeq.stdError,
      'adjustment': stats.adjustment.mean, 'adjustment_se': stats.adjustment.stdError,
      'survival': stats.survival.mean, 'survival_se': stats.survival.stdError,
    })

  display.write('simulate.csv', pd.DataFrame(rows))
  return EXIT_SUCCESS

def runLaw(config, display, workers):
  law = config.law()
  display.message('Inversion with %d terms, max nonmonotonicity before repair %.3g' % (
      law.inversionTerms, law.diagnostics['maxNonmonotonicity']))
  display.write('law.csv', law.toFrame())
  return EXIT_SUCCESS

def runPrice(config, display, workers):
  quotes = pricer.termStructure(config.alpha, config.maturities, config.curve, config.law())
  display.write('term_structure.csv', pricer.quoteFrame(quotes))
  return EXIT_SUCCESS

def runDistressPrice(config, display, workers, age, fromExcursionStart):
  """
  The excursion is taken to start at time 0, so the pricing time is the
  age and the maturity is fromExcursionStart.
  """

  try:
    state = marketView.MarketState.inDistress(age, 0.0)
    quote = pricer.priceInDistress(state, config.alpha, fromExcursionStart, config.curve)
    onsetAnchored = excursionAnalytics.onsetAnchoredSurvival(
        excursionAnalytics.DistressCoordinates.fromState(state, fromExcursionStart), config.alpha)
  except util.PreconditionException as ex:
    raise util.ConfigException('--age/--fromExcursionStart', str(ex))

  display.message('Onset-anchored survival (diagnostic): %.17g' % (onsetAnchored))
  display.write('distress_price.csv', pricer.quoteFrame([quote]))
  return EXIT_SUCCESS

def runValidate(config, display, workers):
  frame, allPassed = validationSuite.runValidation(config, workers)
  display.write('validation.csv', frame)
  if not allPassed:
    display.message('Validation FAILED: %d of %d checks' % ((frame['verdict'] == 'FAIL').sum(), len(frame)))
    return EXIT_VALIDATION_FAILED

  display.message('Validation passed: %d checks' % (len(frame)))
  return EXIT_SUCCESS

def runHazard(config, display, workers):
  bins = mcOracle.estimateHazardProfile(config.mcSettings(workers), config.hazardBins)
  frame = pd.DataFrame({
    'age_low': [b.low for b in bins],
    'age_high': [b.high for b in bins],
    'rate': [b.rate.mean for b in bins],
    'rate_se': [b.rate.stdError for b in bins],
    'at_risk_steps': [b.rate.nEffective for b in bins],
    'defaults': [b.defaults for b in bins],
    'target_midpoint': [b.midpointTarget() for b in bins],
    'target_compensator': [b.compensatorTarget for b in bins],
  })
  display.write('hazard.csv', frame)
  return EXIT_SUCCESS

def run(command, config, display, workers = 1, age = None, fromExcursionStart = None):
  """
  Runs one command and returns its exit code.
  """

  if command == 'simulate':
    code = runSimulate(config, display, workers)
  elif command == 'law':
    code = runLaw(config, display, workers)
  elif command == 'price':
    code = runPrice(config, display, workers)
  elif command == 'distress-price':
    code = runDistressPrice(config, display, workers, age, fromExcursionStart)
  elif command == 'validate':
    code = runValidate(config, display, workers)
  elif command == 'hazard':
    code = runHazard(config, display, workers)
  else:
    raise util.ConfigException('command', "unknown command '%s'" % (command))

  display.finish()
  return code

def main(argv):
  """
  The main function called when excursionCredit.py is run
  from the command line:

  > python excursionCredit.py price

  See the usage string for more details.

  > python excursionCredit.py --help

  argv already has the executable stripped.
  Returns the exit code.
  """

  try:
    args = readCommand(argv)
  except SystemExit as ex:
    return ex.code if isinstance(ex.code, int) else EXIT_USAGE

  logging.basicConfig(level = args['logLevel'], format = '%(asctime)s %(levelname)s %(name)s: %(message)s')

  try:
    config = runConfig.getConfig(args['configName'])
    if args['quiet']:
      display = csvDisplay.NullDisplay(config.outputDir)
    else:
      display = csvDisplay.CsvDisplay(config.outputDir)

    return run(args['command'], config, display, args['workers'], args['age'], args['fromExcursionStart'])
  except util.ConfigException as ex:
    print('Error: %s' % (ex), file = sys.stderr)
    return EXIT_USAGE
  except util.ModelException as ex:
    print('Error: %s: %s' % (type(ex).__name__, ex), file = sys.stderr)
    return EXIT_USAGE

if __name__ == '__main__':
  sys.exit(main(sys.argv[1:]))
