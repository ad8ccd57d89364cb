"""
The market's view of default.

The market does not see the cash balance, only the sign of the reflected
process Y and the time since Y last crossed zero. From that information it
sees the Azema martingale M = sign(Y) sqrt(2) sqrt(age), and default arrives
as a surprise with intensity 1 / (2 age) while the firm is in distress.
"""

import math

import numpy as np

import util

class Phase:
    PRE_DISTRESS = 'PreDistress'
    DISTRESS = 'Distress'
    DEFAULTED = 'Defaulted'

    ORDER = {
        PRE_DISTRESS: 0,
        DISTRESS: 1,
        DEFAULTED: 2,
    }

class MarketState(object):
    """
    What the market knows at time t: the phase, the last zero of Y before t,
    the age of the current excursion and its sign.
    """

    def __init__(self, t, phase, gBar, age, sign):
        if phase not in Phase.ORDER:
            raise util.PreconditionException("Unknown phase: '%s'." % (phase))

        if age < 0.0:
            raise util.PreconditionException("Excursion age must be nonnegative, got %r" % (age))

        if phase == Phase.DISTRESS and sign != -1:
            raise util.PreconditionException("A firm in distress has a negative excursion")

        self.t = float(t)
        self.phase = phase
        self.gBar = float(gBar)
        self.age = float(age)
        self.sign = int(sign)

    @classmethod
    def inDistress(cls, t, gBar):
        return cls(t, Phase.DISTRESS, gBar, t - gBar, -1)

    def __str__(self):
        return "MarketState(t=%g, %s, gBar=%g, age=%g, sign=%+d)" % (self.t, self.phase, self.gBar, self.age, self.sign)

class AzemaPath(object):
    """
    M on the grid. jumps[i] marks a zero of Y inside step i - 1; at such
    a step preJump[i] is M just before the zero and zeroTimes[i] the zero.
    """

    def __init__(self, times, values, jumps, preJump, zeroTimes):
        self.times = times
        self.values = values
        self.jumps = jumps
        self.preJump = preJump
        self.zeroTimes = zeroTimes

class IntensityPath(object):
    """
    The default intensity and its compensator A on the grid.
    """

    def __init__(self, times, rates, compensator):
        self.times = times
        self.rates = rates
        self.compensator = compensator

def marketStateAt(outcome, yTrace, t):
    """
    The market state at time t of a path with this outcome, where yTrace
    follows the zeros of the reflected process Y.
    """

    index = yTrace.grid.indexAtOrBefore(t)

    if outcome.inDistressAt(t):
        return MarketState.inDistress(t, outcome.gBarAtTauAlpha)

    gBar = float(yTrace.lastZero[index])
    phase = Phase.DEFAULTED if outcome.defaultedBy(t) else Phase.PRE_DISTRESS
    return MarketState(t, phase, gBar, max(t - gBar, 0.0), yTrace.sign[index])

def azemaPath(yPath, yTrace):
    """
    Evaluates M_t = sign(Y_t) sqrt(2) sqrt(t - gBar_t) on the grid.
    """

    if len(yPath.values) != len(yTrace.times):
        raise util.PreconditionException("Zero trace does not belong to this path")

    age = yTrace.age
    values = np.where(age > 0.0, yTrace.sign * np.sqrt(2.0 * age), 0.0)

    count = len(values)
    jumps = np.zeros(count, dtype=bool)
    jumps[1:] = yTrace.hasZeroInStep()

    zeroTimes = np.full(count, np.nan)
    zeroTimes[1:] = yTrace.zeroTimes

    preJump = np.full(count, np.nan)
    before = np.nonzero(jumps)[0] - 1
    ageAtZero = np.maximum(yTrace.zeroTimes[before] - yTrace.lastZero[before], 0.0)
    preJump[before + 1] = yTrace.sign[before] * np.sqrt(2.0 * ageAtZero)

    return AzemaPath(yTrace.times, values, jumps, preJump, zeroTimes)

def azemaDistressTime(mPath, alpha):
    """
    First time M reaches -alpha (read off the grid, or just before a jump).
    None if it never does.
    """

    level = -alpha.value
    onGrid = mPath.times[mPath.values <= level]
    beforeJump = mPath.zeroTimes[mPath.jumps & (np.nan_to_num(mPath.preJump, nan=0.0) <= level)]

    candidates = np.concatenate([onGrid[:1], np.sort(beforeJump)[:1]])
    if len(candidates) == 0:
        return None

    return float(candidates.min())

def azemaDefaultTime(mPath, alpha, distressTime):
    """
    First jump of M after distressTime whose size is at least alpha: the
    market sees default as a jump of its martingale.
    """

    if distressTime is None:
        return None

    size = np.abs(np.nan_to_num(mPath.preJump, nan=0.0))
    large = mPath.jumps & (size >= alpha.value) & (mPath.zeroTimes > distressTime)
    zeros = mPath.zeroTimes[large]
    if len(zeros) == 0:
        return None

    return float(zeros.min())

def intensity(state):
    """
    The default intensity in this state: 1 / (2 age) in distress, 0 otherwise
    (including after default).
    """

    if state.phase != Phase.DISTRESS:
        return 0.0

    if state.age <= 0.0:
        raise util.PreconditionException("Distress with zero excursion age at t=%g" % (state.t))

    return 1.0 / (2.0 * state.age)

def compensator(outcome, upto):
    """
    A at time upto: the intensity integrated over the distress window
    [tauAlpha, min(upto, tau)], i.e. (1/2) ln(age at the end / alpha^2 / 2).
    """

    if upto > outcome.horizon * (1.0 + 1e-12):
        raise util.PreconditionException("Compensator asked at %g beyond the horizon %g" % (upto, outcome.horizon))

    if outcome.distressCensored() or upto <= outcome.tauAlpha:
        return 0.0

    end = upto
    if outcome.tau is not None:
        end = min(end, outcome.tau)

    ageEnd = end - outcome.gBarAtTauAlpha
    return 0.5 * math.log(ageEnd / outcome.alpha.trigger())

def countingProcess(outcome, t):
    """
    N_t = 1 once default has happened.
    """

    if outcome.defaultedBy(t):
        return 1

    return 0

def intensityPath(outcome, grid):
    """
    The intensity and compensator at every grid time. The intensity uses the
    age carried into the step, so it is still positive at tau itself and 0
    strictly after.
    """

    times = grid.times()
    rates = np.zeros(len(times))
    compensatorValues = np.zeros(len(times))

    if outcome.distressCensored():
        return IntensityPath(times, rates, compensatorValues)

    end = outcome.tau if outcome.tau is not None else np.inf
    window = (times > outcome.tauAlpha) & (times <= end)
    rates[window] = 1.0 / (2.0 * (times[window] - outcome.gBarAtTauAlpha))

    for i in np.nonzero(times > outcome.tauAlpha)[0]:
        compensatorValues[i] = compensator(outcome, min(times[i], outcome.horizon))

    return IntensityPath(times, rates, compensatorValues)

def structureEquationResidual(mPath):
    """
    Largest gap over the grid between the two sides of the structure
    equation integrated from 0: [M, M]_t - t + int M_- dM, with discrete
    increments. Tends to 0 as the step shrinks.
    """

    values = mPath.values
    increments = np.diff(values)
    gap = np.cumsum(increments * increments) - mPath.times[1:] + np.cumsum(values[:-1] * increments)
    if len(gap) == 0:
        return 0.0

    return float(np.max(np.abs(gap)))
