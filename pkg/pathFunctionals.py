# Path functionals for the Monte Carlo oracle.

import abc
import math

import numpy as np

import defaultDetector
import excursionAnalytics
import marketView

class PathSample(object):
    """
    One simulated path with everything derived from it. The zero trace of
    the reflected process Y is only built when asked for.
    """

    def __init__(self, path, trace, outcome, uniforms = None):
        self.path = path
        self.trace = trace
        self.outcome = outcome
        self.uniforms = uniforms
        self._yTrace = None

    def yTrace(self):
        if self._yTrace is None:
            if self.outcome.distressCensored():
                self._yTrace = self.trace
            else:
                yPath = defaultDetector.reflectToY(self.path, self.outcome)
                self._yTrace = defaultDetector.trackZeros(yPath, self.uniforms)

        return self._yTrace

    def marketStateAt(self, t):
        # Before tau_alpha the zeros of Y are those of X.
        if self.outcome.defaultedBy(t):
            return marketView.marketStateAt(self.outcome, self.yTrace(), t)

        return marketView.marketStateAt(self.outcome, self.trace, t)

class PathFunctional(abc.ABC):
    """
    Something measured on every path. evaluate() returns a number (or a
    fixed-length array of numbers) for the path, or None when the path is
    not part of the sample being measured.
    """

    # True when every value is kept, not just the sums.
    keepsValues = False

    @abc.abstractmethod
    def evaluate(self, sample):
        pass

    def isCensored(self, sample):
        """
        True when the horizon cut the path off before the value was known.
        """

        return False

class TauAlphaIndicator(PathFunctional):
    """
    1{tau_alpha <= T}
    """

    def __init__(self, T):
        self.T = T

    def evaluate(self, sample):
        outcome = sample.outcome
        return 1.0 if (not outcome.distressCensored() and outcome.tauAlpha <= self.T) else 0.0

class TauAlphaValue(PathFunctional):
    """
    tau_alpha itself, inf on paths without distress by the horizon.
    """

    keepsValues = True

    def evaluate(self, sample):
        outcome = sample.outcome
        return math.inf if outcome.distressCensored() else outcome.tauAlpha

    def isCensored(self, sample):
        return sample.outcome.distressCensored()

class DefaultIndicator(PathFunctional):
    """
    1{tau <= T}
    """

    def __init__(self, T):
        self.T = T

    def evaluate(self, sample):
        return 1.0 if sample.outcome.defaultedBy(self.T) else 0.0

class AdjustmentFunctional(PathFunctional):
    """
    (alpha / sqrt(2)) / sqrt(T - gBar) on {tau_alpha <= T}, 0 elsewhere.
    """

    def __init__(self, T):
        self.T = T

    def evaluate(self, sample):
        outcome = sample.outcome
        if outcome.distressCensored() or outcome.tauAlpha > self.T:
            return 0.0

        return outcome.alpha.onsetLevel() / math.sqrt(self.T - outcome.gBarAtTauAlpha)

class LaplaceFunctional(PathFunctional):
    """
    exp(-theta tau_alpha). A path without distress by the horizon counts 0
    and is censored: its true contribution is at most exp(-theta horizon).
    """

    def __init__(self, theta):
        self.theta = theta

    def evaluate(self, sample):
        if sample.outcome.distressCensored():
            return 0.0

        return math.exp(-self.theta * sample.outcome.tauAlpha)

    def isCensored(self, sample):
        return sample.outcome.distressCensored()

class DoobMeyerFunctional(PathFunctional):
    """
    N - A stopped at T: the default indicator minus the compensator.
    """

    def __init__(self, T):
        self.T = T

    def evaluate(self, sample):
        outcome = sample.outcome
        return marketView.countingProcess(outcome, self.T) - marketView.compensator(outcome, self.T)

class SurvivalIndicator(PathFunctional):
    """
    1{tau > T} over the paths whose market state at t matches: the same
    sign and an age within [ageLow, ageHigh], not yet in distress.
    At t = 0 every path matches.
    """

    def __init__(self, t, T, sign, ageLow, ageHigh):
        self.t = t
        self.T = T
        self.sign = sign
        self.ageLow = ageLow
        self.ageHigh = ageHigh

    def evaluate(self, sample):
        if self.t > 0.0:
            state = sample.marketStateAt(self.t)
            if state.phase != marketView.Phase.PRE_DISTRESS or state.sign != self.sign:
                return None

            if not self.ageLow <= state.age <= self.ageHigh:
                return None

        return 0.0 if sample.outcome.defaultedBy(self.T) else 1.0

class DistressSurvival(PathFunctional):
    """
    Over paths in distress at t with an excursion age in [ageLow, ageHigh]:
    the pair (1{tau > T}, sqrt(a / b)), so the simulated frequency and the
    analytic survival are averaged over the same paths.
    """

    def __init__(self, t, T, ageLow, ageHigh):
        self.t = t
        self.T = T
        self.ageLow = ageLow
        self.ageHigh = ageHigh

    def evaluate(self, sample):
        outcome = sample.outcome
        if not outcome.inDistressAt(self.t):
            return None

        age = self.t - outcome.gBarAtTauAlpha
        if not self.ageLow <= age <= self.ageHigh:
            return None

        coordinates = excursionAnalytics.DistressCoordinates(age, self.T - outcome.gBarAtTauAlpha)
        survived = 0.0 if outcome.defaultedBy(self.T) else 1.0
        return np.array([survived, excursionAnalytics.survivalInDistress(coordinates)])

class HazardFunctional(PathFunctional):
    """
    Per age bin [edges[i], edges[i + 1]): the number of defaults at that
    distress age, the time spent at risk there, and the compensator
    accumulated there. Returned as one array of 3 * bins values.
    """

    def __init__(self, edges):
        self.edges = np.asarray(edges, dtype=np.float64)

    def evaluate(self, sample):
        bins = len(self.edges) - 1
        values = np.zeros(3 * bins)

        outcome = sample.outcome
        if outcome.distressCensored():
            return values

        end = outcome.tau if outcome.tau is not None else outcome.horizon
        startAge = outcome.alpha.trigger()
        endAge = end - outcome.gBarAtTauAlpha

        low = np.maximum(self.edges[:-1], startAge)
        high = np.minimum(self.edges[1:], endAge)
        covered = high > low

        values[bins:2 * bins][covered] = (high - low)[covered]
        values[2 * bins:][covered] = 0.5 * np.log(high[covered] / low[covered])

        if outcome.tau is not None:
            hit = (self.edges[:-1] <= endAge) & (endAge < self.edges[1:])
            values[:bins][hit] = 1.0

        return values
