"""
The manager's view of default.

Distress starts at tau_alpha, the first time the cash balance has been
strictly negative for alpha^2 / 2 years in a row (measured from its last
zero). Default happens at tau, the first time after tau_alpha that the cash
balance reaches twice its level at tau_alpha.

Zeros between grid points are placed by linear interpolation, so the last
zero (and with it tau_alpha = last zero + alpha^2 / 2) is not tied to the
grid. Optionally, same-sign steps are given a chance to hide a zero (the
Brownian bridge correction), drawn from the path's own bridge stream.
"""

import math

import numpy as np

import pathEngine
import util

class AlphaParam(object):
    """
    The default-process parameter alpha > 0. A negative excursion
    triggers distress once it is trigger() = alpha^2 / 2 years old.
    """

    def __init__(self, alpha):
        self.value = util.requirePositive('alpha', alpha)

    def trigger(self):
        return self.value * self.value / 2.0

    def onsetLevel(self):
        """
        alpha / sqrt(2), the square root of the trigger age.
        """

        return self.value / math.sqrt(2.0)

    def __eq__(self, other):
        if other == None:
            return False

        return self.value == other.value

    def __hash__(self):
        return hash(self.value)

    def __str__(self):
        return "alpha=%g" % (self.value)

class ZeroTrace(object):
    """
    Per grid point: the sign of X (zero counts as -1), the last zero at or
    before that point, and the excursion age t - lastZero.

    zeroTimes[i] is the zero found inside step i (in (t_i, t_i+1]) or NaN.
    """

    def __init__(self, grid, sign, lastZero, zeroTimes):
        self.grid = grid
        self.times = grid.times()
        self.sign = sign
        self.lastZero = lastZero
        self.age = np.maximum(self.times - lastZero, 0.0)
        self.zeroTimes = zeroTimes

    def hasZeroInStep(self):
        return ~np.isnan(self.zeroTimes)

    def zeroCount(self):
        """
        Zeros after t = 0.
        """

        return int(np.count_nonzero(self.hasZeroInStep()))

class DefaultOutcome(object):
    """
    What happened on one path. Censored quantities (the event did not
    happen by the horizon) are None.
    """

    def __init__(self, alpha, tauAlpha, levelAtTauAlpha, gBarAtTauAlpha, tau, horizon):
        self.alpha = alpha
        self.tauAlpha = tauAlpha
        self.levelAtTauAlpha = levelAtTauAlpha
        self.gBarAtTauAlpha = gBarAtTauAlpha
        self.tau = tau
        self.horizon = horizon

    def distressCensored(self):
        return self.tauAlpha is None

    def defaultCensored(self):
        return self.tau is None

    def inDistressAt(self, t):
        """
        True on [tau_alpha, tau).
        """

        if self.tauAlpha is None or t < self.tauAlpha:
            return False

        return self.tau is None or t < self.tau

    def defaultedBy(self, t):
        return self.tau is not None and self.tau <= t

    def excursionLength(self):
        """
        Length of the excursion that ends in default, tau - gBar; None if censored.
        """

        if self.tau is None:
            return None

        return self.tau - self.gBarAtTauAlpha

    def barrier(self):
        if self.levelAtTauAlpha is None:
            return None

        return 2.0 * self.levelAtTauAlpha

    def __str__(self):
        return "DefaultOutcome(%s, tauAlpha=%s, level=%s, gBar=%s, tau=%s, horizon=%g)" % (
                self.alpha, self.tauAlpha, self.levelAtTauAlpha, self.gBarAtTauAlpha, self.tau, self.horizon)

def trackZeros(path, uniforms = None):
    """
    Follows the zero set of the path.

    A sign change between two grid points puts a zero at the linearly
    interpolated crossing; a grid value of exactly 0 is a zero at that grid
    time; t = 0 is always a zero. When uniforms (one per step, see
    pathEngine.bridgeUniforms) are given, a same-sign step hides a zero
    with the Brownian bridge probability, placed at the middle of the step,
    and a step leaving an exact zero (the first step always does) gets a
    zero at its middle too.
    """

    x = path.values
    step = path.grid.step
    times = path.grid.times()

    left = x[:-1]
    right = x[1:]
    product = left * right

    zeroTimes = np.full(len(left), np.nan)

    crossing = product < 0.0
    zeroTimes[crossing] = times[:-1][crossing] + step * left[crossing] / (left[crossing] - right[crossing])

    if uniforms is not None:
        probability = pathEngine.bridgeZeroCrossingProbability(left, right, step)
        missed = (product > 0.0) & (np.asarray(uniforms) < probability)
        # A bridge leaving an exact zero returns to zero inside the step.
        missed |= (left == 0.0) & (right != 0.0)
        zeroTimes[missed] = times[:-1][missed] + 0.5 * step

    onGrid = right == 0.0
    zeroTimes[onGrid] = times[1:][onGrid]

    lastZero = np.empty(len(x))
    lastZero[0] = 0.0
    lastZero[1:] = np.maximum.accumulate(np.where(np.isnan(zeroTimes), 0.0, zeroTimes))

    return ZeroTrace(path.grid, util.signArray(x), lastZero, zeroTimes)

def detectTauAlpha(trace, path, alpha):
    """
    Returns (tauAlpha, level, gBar) for the first negative excursion that
    lives to age alpha^2 / 2, or None when that never happens by the horizon.

    tauAlpha is exactly gBar + alpha^2 / 2; level is X interpolated there.
    Two cases are checked: a grid point still inside the excursion with
    enough age, and an excursion that reaches the age and then ends before
    the next grid point.
    """

    trigger = alpha.trigger()
    x = path.values

    # Still negative at a grid point, old enough.
    ongoing = (x < 0.0) & (trace.age >= trigger)
    startsOngoing = np.where(ongoing, trace.lastZero, np.inf)

    # Old enough before a zero inside the next step.
    startsInStep = trace.lastZero[:-1]
    interrupted = trace.hasZeroInStep() & (x[:-1] < 0.0) & (startsInStep + trigger < trace.zeroTimes)
    startsInterrupted = np.where(interrupted, startsInStep, np.inf)

    start = min(startsOngoing.min(), startsInterrupted.min() if len(startsInterrupted) > 0 else np.inf)
    if not math.isfinite(start):
        return None

    tauAlpha = float(start + trigger)
    gBar = tauAlpha - trigger
    level = path.valueAt(tauAlpha)

    return (tauAlpha, level, gBar)

def detectDefault(path, alpha, uniforms = None):
    """
    Runs the full default process on one path and returns its DefaultOutcome.

    After tauAlpha, tau is the first time X reaches 2 X(tauAlpha), placed by
    linear interpolation at the barrier. No bridge correction is applied at
    the barrier.
    """

    trace = trackZeros(path, uniforms)
    return outcomeFromTrace(trace, path, alpha)

def outcomeFromTrace(trace, path, alpha):
    horizon = path.grid.horizon
    hit = detectTauAlpha(trace, path, alpha)
    if hit is None:
        return DefaultOutcome(alpha, None, None, None, None, horizon)

    tauAlpha, level, gBar = hit
    barrier = 2.0 * level

    x = path.values
    times = trace.times
    first = int(np.searchsorted(times, tauAlpha, side='right'))
    reached = np.nonzero(x[first:] <= barrier)[0]
    if len(reached) == 0:
        return DefaultOutcome(alpha, tauAlpha, level, gBar, None, horizon)

    j = first + int(reached[0])
    if x[j] == barrier:
        tau = float(times[j])
    else:
        tau = float(times[j - 1] + path.grid.step * (x[j - 1] - barrier) / (x[j - 1] - x[j]))

    if tau <= tauAlpha:
        tau = float(np.nextafter(tauAlpha, np.inf))

    return DefaultOutcome(alpha, tauAlpha, level, gBar, tau, horizon)

def reflectToY(path, outcome):
    """
    The process the market watches: Y = X before tauAlpha and
    Y = 2 X(tauAlpha) - X from tauAlpha on. Its first zero after tauAlpha is tau.
    """

    if outcome.distressCensored():
        return path.withValues(path.values.copy())

    times = path.times()
    values = np.where(times >= outcome.tauAlpha, outcome.barrier() - path.values, path.values)

    return path.withValues(values)
