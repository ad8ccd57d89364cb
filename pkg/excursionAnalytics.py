"""
Closed forms for a firm in distress.

Everything here follows from one fact about Brownian excursions: given that
the current excursion is already a years old, its total length L satisfies
P(L > l) = sqrt(a / l) for l >= a. Coordinates are measured from the start
of the excursion: a = t - gBar (the age now) and b = T - gBar (the age the
excursion would have at maturity).
"""

import math

import util

# Relative slack when checking a >= alpha^2 / 2 for ages computed in floating point.
ONSET_TOLERANCE = 1e-12

class DistressCoordinates(object):
    """
    The pair (a, b) with 0 < a <= b.
    """

    def __init__(self, a, b):
        self.a = util.requirePositive('a', a)
        self.b = util.requirePositive('b', b)
        if self.a > self.b:
            raise util.PreconditionException("Excursion age a=%r is past the maturity age b=%r" % (self.a, self.b))

    @classmethod
    def fromState(cls, state, T):
        return cls(state.age, T - state.gBar)

    def __str__(self):
        return "(a=%g, b=%g)" % (self.a, self.b)

def chungSurvival(a, l):
    """
    P(L > l | age a) = sqrt(a / l).
    """

    a = util.requirePositive('a', a)
    l = util.requirePositive('l', l)
    if l < a:
        raise util.PreconditionException("Excursion of age %r is already longer than %r" % (a, l))

    return math.sqrt(a / l)

def chungDensity(a, l):
    """
    Density of L given age a: (1/2) sqrt(a / l^3) on l >= a, 0 below.
    """

    a = util.requirePositive('a', a)
    if l < a:
        return 0.0

    return 0.5 * math.sqrt(a / (l * l * l))

def condExpInvSqrtLength(coordinates):
    """
    E[L^(-1/2) 1{L <= b} | age a] = (sqrt(a) / 2)(1/a - 1/b).
    """

    a, b = coordinates.a, coordinates.b
    return 0.5 * math.sqrt(a) * (1.0 / a - 1.0 / b)

def condExpLengthRatio(coordinates):
    """
    E[(L / b) 1{L <= b} | age a] = sqrt(a)(sqrt(b) - sqrt(a)) / b.
    """

    a, b = coordinates.a, coordinates.b
    return math.sqrt(a) * (math.sqrt(b) - math.sqrt(a)) / b

def survivalInDistress(coordinates):
    """
    Probability that the excursion outlives maturity, P(L > b | age a) = sqrt(a / b).
    This is the survival probability the market quotes in distress.
    """

    return math.sqrt(coordinates.a / coordinates.b)

def vInDistress(coordinates):
    """
    E[exp(-int_t^T lambda) | age a] with lambda = 1 / (2 age): the intensity
    discount before the jump correction. Equals 1/2 + a / (2b).
    """

    a, b = coordinates.a, coordinates.b
    return math.sqrt(a) * condExpInvSqrtLength(coordinates) + a / b

def vMinusAtDefault(L, b):
    """
    V just before a default that ends an excursion of length L <= b.
    """

    L = util.requirePositive('L', L)
    b = util.requirePositive('b', b)
    if L > b:
        raise util.PreconditionException("Default at excursion length %r after the maturity age %r" % (L, b))

    return 0.5 * (1.0 + L / b)

def dssSurvival(coordinates):
    """
    Survival rebuilt as V - E[jump of V at default]. The jump at tau is
    1 - V(tau-), so its expectation is (1/2)(P(L <= b) - E[(L/b) 1{L <= b}]).
    Agrees with survivalInDistress for every (a, b).
    """

    expectedJump = 0.5 * ((1.0 - survivalInDistress(coordinates)) - condExpLengthRatio(coordinates))
    return vInDistress(coordinates) - expectedJump

def onsetAnchoredSurvival(coordinates, alpha):
    """
    The same decomposition with the length-ratio term frozen at the
    onset age alpha^2 / 2:

      -1 + (1 + a/b) + (alpha / sqrt(2))(sqrt(b) - alpha / sqrt(2)) / b

    At a = alpha^2 / 2 it equals sqrt(a / b). Past the onset it no longer
    depends on a the way the age-conditioned survival does and can exceed 1,
    so it is reported as a diagnostic and never used for pricing.
    """

    a, b = coordinates.a, coordinates.b
    if a < alpha.trigger() * (1.0 - ONSET_TOLERANCE):
        raise util.PreconditionException("Age %r is below the distress trigger %r" % (a, alpha.trigger()))

    onset = alpha.onsetLevel()
    return -1.0 + (1.0 + a / b) + onset * (math.sqrt(b) - onset) / b
