"""
The law of the distress time tau_alpha.

Its Laplace transform is E[exp(-theta tau_alpha)] = 1 / Psi(alpha sqrt(theta))
with Psi(z) = int_0^inf x exp(z x - x^2 / 2) dx. The CDF is recovered on a
time grid by Gaver-Stehfest inversion along the real axis.

tau_alpha is never earlier than alpha^2 / 2, and the CDF has a hard edge
there. The inversion works on the excess tau_alpha - alpha^2 / 2 instead,
whose transform is exp(theta alpha^2 / 2) / Psi(alpha sqrt(theta)); this is
the same law, shifted, without the edge. Written with the scaled function
psiScaled(z) = exp(-z^2 / 2) Psi(z) the excess transform is 1 / psiScaled and
never overflows.
"""

import logging
import math

import mpmath
import numpy as np
import pandas as pd
import scipy.integrate
import scipy.special

import util

logger = logging.getLogger(__name__)

# Psi(z) ~ z sqrt(2 pi) exp(z^2 / 2) leaves double range just below z = 37.68.
PSI_MAX_ARGUMENT = 37.5

# Below this Psi(z) is 1 / z^2 - 3 / z^4 + 15 / z^6 to double precision; the
# closed form loses every digit to cancellation there.
PSI_ASYMPTOTIC_BELOW = -1e4

DEFAULT_INVERSION_TERMS = 12
MIN_INVERSION_TERMS = 4
MAX_INVERSION_TERMS = 20
# Above this many terms the weights cancel catastrophically in double precision.
MAX_DOUBLE_PRECISION_TERMS = 12

DEFAULT_LAW_POINTS = 2001

# Largest violation of monotonicity (or of [0, 1]) tolerated before repair.
MAX_NONMONOTONICITY = 0.02

# Sub-intervals of [alpha^2 / 2, T] in the Stieltjes sum of the adjustment.
ADJUSTMENT_INTERVALS = 2000

# Relative slack on grid and maturity checks.
GRID_TOLERANCE = 1e-12

class PsiRangeException(util.ModelException, OverflowError):
    """
    psi(z) is not representable as a double.
    """

    pass

class InversionException(util.ModelException):
    """
    The inverted CDF was too far from monotone to be trusted. The
    diagnostics of the failed inversion travel with the exception.
    """

    def __init__(self, message, diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics

class TauAlphaLaw(object):
    """
    The CDF of tau_alpha on an increasing time grid starting at alpha^2 / 2.

    diagnostics holds 'maxNonmonotonicity' (before repair), 'rawNearOnset'
    (the first unrepaired value after the onset) and 'supDeviationMc'
    (None unless a Monte Carlo comparison was attached).
    """

    def __init__(self, alpha, times, cdf, inversionTerms, diagnostics):
        self.alpha = alpha
        self.times = np.array(times, dtype=np.float64)
        self.cdf = np.array(cdf, dtype=np.float64)
        self.times.flags.writeable = False
        self.cdf.flags.writeable = False
        self.inversionTerms = inversionTerms
        self.diagnostics = dict(diagnostics)

    def maxTime(self):
        return float(self.times[-1])

    def withMcDeviation(self, deviation):
        """
        A copy of this law that records its sup distance to an empirical CDF.
        """

        diagnostics = dict(self.diagnostics)
        diagnostics['supDeviationMc'] = float(deviation)
        return TauAlphaLaw(self.alpha, self.times, self.cdf, self.inversionTerms, diagnostics)

    def toFrame(self):
        return pd.DataFrame({'t': self.times, 'cdf': self.cdf})

    def __str__(self):
        return "TauAlphaLaw(%s, %d points on [%g, %g], %d terms)" % (
                self.alpha, len(self.times), self.times[0], self.times[-1], self.inversionTerms)

def psi(z):
    """
    Psi(z) = 1 + z sqrt(2 pi) exp(z^2 / 2) Phi(z), the closed form of the
    defining integral after one integration by parts. Very negative
    arguments use the asymptotic series instead; Psi stays positive.
    """

    z = float(z)
    if not math.isfinite(z):
        raise util.PreconditionException("psi needs a finite argument, got %r" % (z))

    if z > PSI_MAX_ARGUMENT:
        raise PsiRangeException("psi(%r) overflows; arguments above %g are out of range" % (z, PSI_MAX_ARGUMENT))

    if z < PSI_ASYMPTOTIC_BELOW:
        inverseSquare = 1.0 / (z * z)
        return inverseSquare * (1.0 - inverseSquare * (3.0 - 15.0 * inverseSquare))

    # exp(z^2 / 2) Phi(z) = erfcx(-z / sqrt(2)) / 2
    return 1.0 + z * math.sqrt(math.pi / 2.0) * float(scipy.special.erfcx(-z / math.sqrt(2.0)))

def psiScaled(z):
    """
    exp(-z^2 / 2) Psi(z) = exp(-z^2 / 2) + z sqrt(2 pi) Phi(z). Works on arrays.
    """

    z = np.asarray(z, dtype=np.float64)
    return np.exp(-0.5 * z * z) + z * math.sqrt(2.0 * math.pi) * scipy.special.ndtr(z)

def psiByQuadrature(z):
    """
    The defining integral evaluated by adaptive quadrature.
    """

    value, _ = scipy.integrate.quad(lambda x: x * math.exp(z * x - 0.5 * x * x), 0.0, np.inf,
                                    epsabs=0.0, epsrel=1e-12, limit=200)
    return value

def laplaceTauAlpha(theta, alpha):
    """
    E[exp(-theta tau_alpha)] = 1 / Psi(alpha sqrt(theta)), for theta >= 0.
    Large arguments give an underflow to 0 rather than an error.
    """

    if not theta >= 0.0:
        raise util.PreconditionException("theta must be nonnegative, got %r" % (theta))

    z = alpha.value * math.sqrt(theta)
    return float(np.exp(-0.5 * z * z) / psiScaled(z))

def stehfestWeights(terms, extendedPrecision = False):
    """
    The Gaver-Stehfest weights V_1, ..., V_terms (terms even), computed in
    mpmath and returned as mpf values or floats.
    """

    half = terms // 2
    weights = []
    with mpmath.workdps(60):
        for k in range(1, terms + 1):
            parts = []
            for j in range((k + 1) // 2, min(k, half) + 1):
                parts.append(mpmath.power(j, half) * mpmath.fac(2 * j) /
                             (mpmath.fac(half - j) * mpmath.fac(j) * mpmath.fac(j - 1) *
                              mpmath.fac(k - j) * mpmath.fac(2 * j - k)))
            weight = mpmath.power(-1, k + half) * mpmath.fsum(parts)
            weights.append(+weight if extendedPrecision else float(weight))

    return weights

def lawGrid(alpha, maxTime, points = DEFAULT_LAW_POINTS):
    """
    Evenly spaced times from alpha^2 / 2 to maxTime.
    """

    if points < 2:
        raise util.PreconditionException("A law grid needs at least 2 points, got %d" % (points))

    if maxTime <= alpha.trigger():
        raise util.PreconditionException("Law grid end %r is not past the onset %r" % (maxTime, alpha.trigger()))

    times = np.linspace(alpha.trigger(), maxTime, int(points))
    times[0] = alpha.trigger()
    return times

def _excessCdfDouble(alpha, excess, terms):
    weights = np.array(stehfestWeights(terms)) / np.arange(1, terms + 1)
    rates = np.arange(1, terms + 1)[None, :] * math.log(2.0) / excess[:, None]
    return (1.0 / psiScaled(alpha.value * np.sqrt(rates))) @ weights

def _excessCdfExtended(alpha, excess, terms):
    values = np.empty(len(excess))
    with mpmath.workdps(max(30, 2 * terms + 10)):
        weights = stehfestWeights(terms, extendedPrecision = True)
        a = mpmath.mpf(alpha.value)
        root2pi = mpmath.sqrt(2 * mpmath.pi)
        for i, s in enumerate(excess):
            parts = []
            for k in range(1, terms + 1):
                z = a * mpmath.sqrt(k * mpmath.log(2) / mpmath.mpf(s))
                scaled = mpmath.exp(-z * z / 2) + z * root2pi * mpmath.ncdf(z)
                parts.append(weights[k - 1] / k / scaled)
            values[i] = float(mpmath.fsum(parts))

    return values

def invertCdf(alpha, times, terms = DEFAULT_INVERSION_TERMS, extendedPrecision = False, maxNonmonotonicity = MAX_NONMONOTONICITY):
    """
    Inverts the transform of the CDF, L(theta) / theta, on the given times.

    The raw values are repaired into a distribution function (clamped to
    [0, 1], running maximum, exactly 0 at the onset). How far the raw values
    were from one is kept as diagnostics['maxNonmonotonicity']; past
    maxNonmonotonicity an InversionException is raised instead.
    """

    times = np.asarray(times, dtype=np.float64)
    trigger = alpha.trigger()

    if terms % 2 != 0 or not MIN_INVERSION_TERMS <= terms <= MAX_INVERSION_TERMS:
        raise util.PreconditionException("Inversion terms must be even and in [%d, %d], got %r" % (MIN_INVERSION_TERMS, MAX_INVERSION_TERMS, terms))

    if terms > MAX_DOUBLE_PRECISION_TERMS and not extendedPrecision:
        raise util.PreconditionException("%d inversion terms need extended precision" % (terms))

    if len(times) < 2 or abs(times[0] - trigger) > GRID_TOLERANCE * max(1.0, trigger):
        raise util.PreconditionException("The law grid must start at alpha^2 / 2 = %r" % (trigger))

    if np.any(np.diff(times) <= 0.0):
        raise util.PreconditionException("The law grid must be strictly increasing")

    excess = times[1:] - trigger
    raw = np.empty(len(times))
    # The excess is 0 at the onset with probability 0.
    raw[0] = 0.0
    if extendedPrecision:
        raw[1:] = _excessCdfExtended(alpha, excess, terms)
    else:
        raw[1:] = _excessCdfDouble(alpha, excess, terms)

    runningMax = np.maximum.accumulate(raw)
    nonmonotonicity = max(float(np.max(runningMax - raw)), float(np.max(raw)) - 1.0, -float(np.min(raw)), 0.0)
    diagnostics = {
        'maxNonmonotonicity': nonmonotonicity,
        'rawNearOnset': float(raw[1]),
        'supDeviationMc': None,
    }

    logger.info("Inverted tau_alpha law for %s on %d points with %d terms, max nonmonotonicity %.3g",
                alpha, len(times), terms, nonmonotonicity)

    if nonmonotonicity > maxNonmonotonicity:
        raise InversionException("Inversion with %d terms is unstable: nonmonotonicity %.3g above %.3g" % (terms, nonmonotonicity, maxNonmonotonicity), diagnostics)

    cdf = np.maximum.accumulate(np.clip(raw, 0.0, 1.0))
    cdf[0] = 0.0

    return TauAlphaLaw(alpha, times, cdf, terms, diagnostics)

def _checkCovered(law, T):
    if T > law.maxTime() * (1.0 + GRID_TOLERANCE):
        raise util.PreconditionException("Maturity %r is beyond the law grid, which ends at %r" % (T, law.maxTime()))

def probTauAlphaLeq(law, T):
    """
    P(tau_alpha <= T), interpolated linearly in the stored CDF.
    """

    _checkCovered(law, T)
    if T <= law.times[0]:
        return 0.0

    return float(np.interp(T, law.times, law.cdf))

def adjustmentExpectation(law, alpha, T):
    """
    E[(alpha / sqrt(2)) / sqrt(T - gBar) 1{tau_alpha <= T}] with
    gBar = tau_alpha - alpha^2 / 2, i.e.

      int_{alpha^2/2}^T (alpha / sqrt(2)) / sqrt(T - s + alpha^2 / 2) dF(s)

    as a midpoint Stieltjes sum over CDF increments. The integrand lies in
    (0, 1], so the result never exceeds P(tau_alpha <= T).
    """

    if law.alpha != alpha:
        raise util.PreconditionException("Law built for %s used with %s" % (law.alpha, alpha))

    _checkCovered(law, T)
    trigger = alpha.trigger()
    if T <= trigger:
        return 0.0

    inside = int(np.count_nonzero(law.times <= T))
    edges = np.linspace(trigger, T, max(ADJUSTMENT_INTERVALS, inside) + 1)
    increments = np.diff(np.interp(edges, law.times, law.cdf))
    middles = 0.5 * (edges[:-1] + edges[1:])
    weights = alpha.onsetLevel() / np.sqrt(T - middles + trigger)

    return float(np.dot(weights, increments))

def buildLaw(alpha, maxTime, points = DEFAULT_LAW_POINTS, terms = DEFAULT_INVERSION_TERMS, extendedPrecision = False):
    """
    lawGrid followed by invertCdf.
    """

    return invertCdf(alpha, lawGrid(alpha, maxTime, points), terms, extendedPrecision)
