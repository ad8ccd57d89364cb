"""
Monte Carlo estimates of the quantities the analytics give in closed form.

Every path is a pure function of (masterSeed, pathIndex). Paths are
simulated in fixed chunks of chunkSize consecutive indices, each chunk is
reduced with compensated sums, and the chunk results are merged in chunk
order. The estimates are therefore bit-identical for any number of
workers.
"""

from concurrent.futures import ProcessPoolExecutor
import logging
import math

import numpy as np
import scipy.stats

import defaultDetector
import pathEngine
import pathFunctionals
import util

logger = logging.getLogger(__name__)

DEFAULT_ALLOWANCE = 0.005
SIGMA_BAND = 3.0
DEFAULT_CHUNK_SIZE = 1000

# Largest exp(-theta horizon) accepted by estimateLaplace.
LAPLACE_TRUNCATION_BOUND = 1e-6

class McSettings(object):
    """
    How to simulate: nPaths paths on grid for parameter alpha, keyed by
    masterSeed. workers only changes how fast the answer comes back.
    """

    def __init__(self, nPaths, grid, masterSeed, alpha, bridgeCorrection = True, workers = 1, chunkSize = DEFAULT_CHUNK_SIZE):
        if int(nPaths) != nPaths or nPaths < 1:
            raise util.PreconditionException("nPaths must be a positive integer, got %r" % (nPaths))

        if int(workers) != workers or workers < 1:
            raise util.PreconditionException("workers must be a positive integer, got %r" % (workers))

        if int(chunkSize) != chunkSize or chunkSize < 1:
            raise util.PreconditionException("chunkSize must be a positive integer, got %r" % (chunkSize))

        self.nPaths = int(nPaths)
        self.grid = grid
        self.masterSeed = int(masterSeed)
        self.alpha = alpha
        self.bridgeCorrection = bool(bridgeCorrection)
        self.workers = int(workers)
        self.chunkSize = int(chunkSize)

    def chunks(self):
        return [(start, min(start + self.chunkSize, self.nPaths)) for start in range(0, self.nPaths, self.chunkSize)]

    def __str__(self):
        return "McSettings(%d paths, %s, seed=%d, %s, bridge=%s)" % (
                self.nPaths, self.grid, self.masterSeed, self.alpha, self.bridgeCorrection)

class McEstimate(object):
    """
    A sample mean with its standard error. biasBracket, when present, is
    the (low, high) interval the censored paths could move the mean to.
    """

    def __init__(self, mean, stdError, nEffective, censoredFraction, biasBracket = None):
        self.mean = float(mean)
        self.stdError = float(stdError)
        self.nEffective = int(nEffective)
        self.censoredFraction = float(censoredFraction)
        self.biasBracket = biasBracket

    def __str__(self):
        return "%.6f +/- %.6f (n=%d, censored=%.4f)" % (self.mean, self.stdError, self.nEffective, self.censoredFraction)

class Verdict(object):
    def __init__(self, passed, z, gap, allowance):
        self.passed = passed
        self.z = z
        self.gap = gap
        self.allowance = allowance

    def label(self):
        return 'PASS' if self.passed else 'FAIL'

    def __str__(self):
        return "%s (gap=%.3g, z=%.2f)" % (self.label(), self.gap, self.z)

class DefaultStats(object):
    """
    The four estimates behind a time-0 price.
    """

    def __init__(self, tauAlphaLeq, defaultLeq, adjustment, survival):
        self.tauAlphaLeq = tauAlphaLeq
        self.defaultLeq = defaultLeq
        self.adjustment = adjustment
        self.survival = survival

class HazardBin(object):
    """
    Empirical default rate for distress ages in [low, high), next to the
    two targets: 1 / (2 midpoint) and the compensator per unit of exposure.
    """

    def __init__(self, low, high, rate, exposure, defaults, compensatorTarget):
        self.low = low
        self.high = high
        self.rate = rate
        self.exposure = exposure
        self.defaults = defaults
        self.compensatorTarget = compensatorTarget

    def midpointTarget(self):
        return 1.0 / (self.low + self.high)

    def isEmpty(self):
        return self.exposure <= 0.0

class Tally(object):
    """
    Compensated sums of the values (and their squares) a functional took,
    one pair of accumulators per component.
    """

    def __init__(self):
        self.sums = None
        self.squares = None
        self.selected = 0
        self.censored = 0

    def add(self, value):
        values = np.atleast_1d(np.asarray(value, dtype=np.float64))
        if self.sums is None:
            self.sums = [util.Accumulator() for _ in values]
            self.squares = [util.Accumulator() for _ in values]

        for i, x in enumerate(values):
            self.sums[i].add(x)
            self.squares[i].add(x * x)

        self.selected += 1

    def merge(self, other):
        if other.sums is not None:
            if self.sums is None:
                self.sums = [util.Accumulator() for _ in other.sums]
                self.squares = [util.Accumulator() for _ in other.sums]

            for mine, theirs in zip(self.sums, other.sums):
                mine.merge(theirs)

            for mine, theirs in zip(self.squares, other.squares):
                mine.merge(theirs)

        self.selected += other.selected
        self.censored += other.censored

    def total(self, component = 0):
        if self.sums is None:
            return 0.0

        return self.sums[component].total()

    def estimate(self, component = 0):
        if self.selected == 0:
            raise util.PreconditionException("No simulated path was selected")

        n = self.selected
        mean = self.total(component) / n
        if n > 1:
            variance = max(self.squares[component].total() / n - mean * mean, 0.0) * n / (n - 1)
        else:
            variance = 0.0

        return McEstimate(mean, math.sqrt(variance / n), n, self.censored / n)

class SampleTally(object):
    """
    Every value a functional took, in path order.
    """

    def __init__(self):
        self.values = []
        self.selected = 0
        self.censored = 0

    def add(self, value):
        self.values.append(float(value))
        self.selected += 1

    def merge(self, other):
        self.values.extend(other.values)
        self.selected += other.selected
        self.censored += other.censored

    def samples(self):
        return np.array(self.values, dtype=np.float64)

def newTally(functional):
    return SampleTally() if functional.keepsValues else Tally()

def simulateSample(settings, pathIndex):
    """
    Path number pathIndex of a run, with its zeros and default outcome.
    """

    path = pathEngine.simulatePath(settings.grid, pathEngine.pathSeed(settings.masterSeed, pathIndex))
    uniforms = pathEngine.bridgeUniforms(path) if settings.bridgeCorrection else None
    trace = defaultDetector.trackZeros(path, uniforms)
    outcome = defaultDetector.outcomeFromTrace(trace, path, settings.alpha)

    return pathFunctionals.PathSample(path, trace, outcome, uniforms)

def _simulateChunk(settings, start, stop, functionals):
    tallies = [newTally(functional) for functional in functionals]
    for pathIndex in range(start, stop):
        sample = simulateSample(settings, pathIndex)
        for functional, tally in zip(functionals, tallies):
            value = functional.evaluate(sample)
            if value is None:
                continue

            tally.add(value)
            if functional.isCensored(sample):
                tally.censored += 1

    logger.debug("Simulated paths [%d, %d)", start, stop)
    return tallies

def _mapChunks(settings, worker, *args):
    """
    worker(settings, start, stop, *args) for every chunk, results in chunk order.
    """

    chunks = settings.chunks()
    starts = [start for start, _ in chunks]
    stops = [stop for _, stop in chunks]

    if settings.workers == 1 or len(chunks) == 1:
        return [worker(settings, start, stop, *args) for start, stop in chunks]

    repeated = [[arg] * len(chunks) for arg in args]
    with ProcessPoolExecutor(max_workers = settings.workers) as executor:
        return list(executor.map(worker, [settings] * len(chunks), starts, stops, *repeated))

def runFunctionals(settings, functionals):
    """
    Simulates every path once and tallies each functional on it.
    """

    logger.info("Simulating %s for %d functionals", settings, len(functionals))

    merged = [newTally(functional) for functional in functionals]
    for tallies in _mapChunks(settings, _simulateChunk, list(functionals)):
        for total, tally in zip(merged, tallies):
            total.merge(tally)

    return merged

def _checkMaturity(settings, T):
    if T > settings.grid.horizon * (1.0 + 1e-12):
        raise util.PreconditionException("Maturity %r is beyond the simulated horizon %r" % (T, settings.grid.horizon))

def estimateDefaultStats(settings, T):
    """
    P(tau_alpha <= T), P(tau <= T), the adjustment functional and survival.
    Survival is the complement of the default estimate, from the same indicator.
    """

    _checkMaturity(settings, T)
    tallies = runFunctionals(settings, [
        pathFunctionals.TauAlphaIndicator(T),
        pathFunctionals.DefaultIndicator(T),
        pathFunctionals.AdjustmentFunctional(T),
    ])

    return defaultStatsFrom(tallies[0], tallies[1], tallies[2])

def defaultStatsFrom(tauAlphaTally, defaultTally, adjustmentTally):
    defaults = defaultTally.estimate()
    survival = McEstimate(1.0 - defaults.mean, defaults.stdError, defaults.nEffective, defaults.censoredFraction)
    return DefaultStats(tauAlphaTally.estimate(), defaults, adjustmentTally.estimate(), survival)

def _checkLaplace(settings, theta):
    if not theta >= 0.0:
        raise util.PreconditionException("theta must be nonnegative, got %r" % (theta))

    if theta > 0.0 and math.exp(-theta * settings.grid.horizon) >= LAPLACE_TRUNCATION_BOUND:
        raise util.PreconditionException("Horizon %r is too short for theta=%r: exp(-theta horizon) >= %g" % (
                settings.grid.horizon, theta, LAPLACE_TRUNCATION_BOUND))

def laplaceFrom(settings, theta, tally):
    estimate = tally.estimate()
    bound = math.exp(-theta * settings.grid.horizon)
    estimate.biasBracket = (estimate.mean, estimate.mean + estimate.censoredFraction * bound)
    return estimate

def estimateLaplace(settings, theta):
    """
    Mean of exp(-theta tau_alpha). theta = 0 is exactly 1. Paths not in
    distress by the horizon add at most exp(-theta horizon) each; that
    slack is reported as the bias bracket.
    """

    _checkLaplace(settings, theta)
    if theta == 0.0:
        return McEstimate(1.0, 0.0, settings.nPaths, 0.0, (1.0, 1.0))

    tally = runFunctionals(settings, [pathFunctionals.LaplaceFunctional(theta)])[0]
    return laplaceFrom(settings, theta, tally)

def estimateDoobMeyer(settings, T):
    """
    Mean of N - A stopped at T, which should be 0.
    """

    _checkMaturity(settings, T)
    return runFunctionals(settings, [pathFunctionals.DoobMeyerFunctional(T)])[0].estimate()

def _checkBins(edges):
    edges = np.asarray(edges, dtype=np.float64)
    if len(edges) < 2 or edges[0] < 0.0 or np.any(np.diff(edges) <= 0.0):
        raise util.PreconditionException("Age bins must be at least 2 increasing nonnegative edges")

    return edges

def hazardFrom(settings, edges, tally):
    bins = len(edges) - 1
    result = []
    for i in range(bins):
        defaults = tally.total(i)
        exposure = tally.total(bins + i)
        compensated = tally.total(2 * bins + i)
        if exposure > 0.0:
            rate = McEstimate(defaults / exposure, math.sqrt(defaults) / exposure,
                              int(round(exposure / settings.grid.step)), 0.0)
            target = compensated / exposure
        else:
            logger.info("Hazard bin [%g, %g) has no exposure", edges[i], edges[i + 1])
            rate = McEstimate(0.0, 0.0, 0, 0.0)
            target = math.nan

        result.append(HazardBin(float(edges[i]), float(edges[i + 1]), rate, exposure, defaults, target))

    return result

def estimateHazardProfile(settings, ageBins):
    """
    Per distress-age bin: defaults / time at risk. nEffective of each rate
    is the number of at-risk path steps. Bins nobody reaches come back
    empty (exposure 0), not as errors.
    """

    edges = _checkBins(ageBins)
    tally = runFunctionals(settings, [pathFunctionals.HazardFunctional(edges)])[0]
    return hazardFrom(settings, edges, tally)

def estimateDistressSurvival(settings, t, T, ageLow, ageHigh):
    """
    Among paths in distress at t with age in [ageLow, ageHigh]: the
    survival frequency to T, and the average of sqrt(a / b) over the same
    paths.
    """

    _checkMaturity(settings, T)
    if t > T:
        raise util.PreconditionException("Observation time %r is after the maturity %r" % (t, T))

    tally = runFunctionals(settings, [pathFunctionals.DistressSurvival(t, T, ageLow, ageHigh)])[0]
    return (tally.estimate(0), tally.total(1) / tally.selected)

def estimatePreDistressSurvival(settings, state, T, ageTolerance = None):
    """
    Survival frequency to T among paths that look like state at state.t:
    pre-distress, same sign, age within ageTolerance (by default a tenth
    of the age, and at least ten steps).
    """

    _checkMaturity(settings, T)
    if state.t > T:
        raise util.PreconditionException("Observation time %r is after the maturity %r" % (state.t, T))

    if ageTolerance is None:
        ageTolerance = max(0.1 * state.age, 10.0 * settings.grid.step)

    functional = pathFunctionals.SurvivalIndicator(state.t, T, state.sign, state.age - ageTolerance, state.age + ageTolerance)
    tally = runFunctionals(settings, [functional])[0]
    if tally.selected == 0:
        raise util.PreconditionException("No simulated path matches %s" % (state))

    return tally.estimate()

def compare(analytic, mc, allowance = DEFAULT_ALLOWANCE):
    """
    PASS when |analytic - mean| <= 3 standard errors + allowance.
    """

    gap = mc.mean - analytic
    if mc.stdError > 0.0:
        z = gap / mc.stdError
    else:
        z = 0.0 if gap == 0.0 else math.copysign(math.inf, gap)

    passed = abs(gap) <= SIGMA_BAND * mc.stdError + allowance
    return Verdict(passed, z, gap, allowance)

def sampleTauAlpha(settings):
    """
    tau_alpha of every path, in path order; inf where distress never came.
    """

    return runFunctionals(settings, [pathFunctionals.TauAlphaValue()])[0].samples()

def lawSupDeviation(law, samples):
    """
    Largest distance between the law's CDF and the empirical CDF of samples,
    over the law's time range. Censored samples (inf) count in n.
    """

    n = len(samples)
    if n == 0:
        raise util.PreconditionException("Empirical CDF of no samples")

    start, end = law.times[0], law.times[-1]
    ordered = np.sort(np.asarray(samples, dtype=np.float64))
    ranks = np.arange(1, n + 1)
    inside = (ordered >= start) & (ordered <= end)

    model = np.interp(ordered[inside], law.times, law.cdf)
    above = ranks[inside] / n - model
    below = model - (ranks[inside] - 1) / n

    atEnd = abs(np.count_nonzero(ordered <= end) / n - law.cdf[-1])
    return float(max(np.max(above, initial = 0.0), np.max(below, initial = 0.0), atEnd))

def scalingStatistic(samplesA, alphaA, horizonA, samplesB, alphaB, horizonB):
    """
    Two-sample Kolmogorov-Smirnov test of tau_alpha / alpha^2 between two
    parameters. Both samples are capped at the shorter rescaled horizon so
    they are censored alike.
    """

    cap = min(horizonA / (alphaA.value ** 2), horizonB / (alphaB.value ** 2))
    scaledA = np.minimum(np.asarray(samplesA) / alphaA.value ** 2, cap)
    scaledB = np.minimum(np.asarray(samplesB) / alphaB.value ** 2, cap)

    return scipy.stats.ks_2samp(scaledA, scaledB)
