"""
Risky zero-coupon bonds with zero recovery: pay 1 at T if default has not
happened by then, 0 otherwise. Rates are deterministic, so a price is always
a riskless discount factor times a survival probability.

Two regimes have closed forms: time 0, from the law of tau_alpha, and any
time in distress, from the excursion-length law. Pre-distress prices at
t > 0 are estimated by simulation.
"""

import math

import numpy as np
import pandas as pd

import excursionAnalytics
import marketView
import mcOracle
import tauAlphaLaw
import util

class Method:
    ANALYTIC_TIME_ZERO = 'AnalyticTimeZero'
    ANALYTIC_DISTRESS = 'AnalyticDistress'
    MONTE_CARLO = 'MonteCarlo'

class DiscountCurve(object):
    """
    A piecewise-constant short rate: rates[i] applies on
    [breakpoints[i], breakpoints[i + 1]), the last rate forever after.
    """

    def __init__(self, breakpoints, rates):
        breakpoints = np.asarray(breakpoints, dtype=np.float64)
        rates = np.asarray(rates, dtype=np.float64)

        if len(breakpoints) == 0 or len(breakpoints) != len(rates):
            raise util.PreconditionException("A curve needs one rate per breakpoint, got %d and %d" % (len(breakpoints), len(rates)))

        if breakpoints[0] != 0.0:
            raise util.PreconditionException("Curve breakpoints start at 0, got %r" % (breakpoints[0]))

        if np.any(np.diff(breakpoints) <= 0.0):
            raise util.PreconditionException("Curve breakpoints must be strictly increasing")

        if not np.all(np.isfinite(rates)):
            raise util.PreconditionException("Curve rates must be finite")

        self.breakpoints = breakpoints
        self.rates = rates

    def integral(self, t, T):
        """
        int_t^T r(u) du, exactly.
        """

        ends = np.append(self.breakpoints[1:], np.inf)
        overlap = np.clip(np.minimum(ends, T) - np.maximum(self.breakpoints, t), 0.0, None)
        return float(np.dot(self.rates, overlap))

    def __str__(self):
        return "DiscountCurve(%s)" % (", ".join("%g@%g" % (r, b) for b, r in zip(self.breakpoints, self.rates)))

def flatCurve(rate):
    return DiscountCurve([0.0], [rate])

class PriceQuote(object):
    """
    One bond price. decomposition holds (probTauAlphaLeq, adjustment) for
    time-0 quotes and is None otherwise; stdError is set for simulated quotes.
    """

    def __init__(self, t, T, price, survival, discount, method, decomposition = None, stdError = None):
        self.t = t
        self.T = T
        self.price = price
        self.survival = survival
        self.discount = discount
        self.method = method
        self.decomposition = decomposition
        self.stdError = stdError

    def spread(self):
        """
        Continuously compounded credit spread -ln(price / discount) / (T - t).
        """

        if self.T <= self.t or self.survival >= 1.0:
            return 0.0

        if self.survival <= 0.0:
            return math.inf

        return -math.log(self.survival) / (self.T - self.t)

    def __str__(self):
        return "PriceQuote(t=%g, T=%g, price=%.6f, survival=%.6f, discount=%.6f, %s)" % (
                self.t, self.T, self.price, self.survival, self.discount, self.method)

def discount(curve, t, T):
    """
    exp(-int_t^T r(u) du).
    """

    if t > T:
        raise util.PreconditionException("Discounting from t=%r back to an earlier T=%r" % (t, T))

    return math.exp(-curve.integral(t, T))

def priceT0(alpha, T, curve, law):
    """
    The time-0 price D(0, T) (1 - (P(tau_alpha <= T) - adjustment)).
    """

    T = util.requirePositive('T', T)
    if law.alpha != alpha:
        raise util.PreconditionException("Law built for %s used with %s" % (law.alpha, alpha))

    probability = tauAlphaLaw.probTauAlphaLeq(law, T)
    adjustment = tauAlphaLaw.adjustmentExpectation(law, alpha, T)
    survival = 1.0 - (probability - adjustment)
    factor = discount(curve, 0.0, T)

    return PriceQuote(0.0, T, factor * survival, survival, factor, Method.ANALYTIC_TIME_ZERO,
                      decomposition = (probability, adjustment))

def priceInDistress(state, alpha, T, curve):
    """
    The price at time state.t of a firm in distress: survival is the
    probability sqrt(a / b) that the current excursion outlives maturity.
    """

    if state.phase != marketView.Phase.DISTRESS:
        raise util.PreconditionException("Distress pricing needs a firm in distress, got %s" % (state.phase))

    if state.age < alpha.trigger() * (1.0 - excursionAnalytics.ONSET_TOLERANCE):
        raise util.PreconditionException("Age %r in distress is below the trigger %r" % (state.age, alpha.trigger()))

    if T < state.t:
        raise util.PreconditionException("Maturity %r is before the pricing time %r" % (T, state.t))

    coordinates = excursionAnalytics.DistressCoordinates.fromState(state, T)
    survival = excursionAnalytics.survivalInDistress(coordinates)
    factor = discount(curve, state.t, T)

    return PriceQuote(state.t, T, factor * survival, survival, factor, Method.ANALYTIC_DISTRESS)

def pricePreDistressMc(state, alpha, T, curve, settings, ageTolerance = None):
    """
    Simulated price for a firm not yet in distress: the survival frequency
    among simulated paths in the same market state at state.t (same sign,
    age within ageTolerance). At t = 0 every path qualifies.
    """

    if state.phase != marketView.Phase.PRE_DISTRESS:
        raise util.PreconditionException("Pre-distress pricing needs a pre-distress state, got %s" % (state.phase))

    if settings.alpha != alpha:
        raise util.PreconditionException("Simulation settings use %s, quote asks for %s" % (settings.alpha, alpha))

    estimate = mcOracle.estimatePreDistressSurvival(settings, state, T, ageTolerance)
    factor = discount(curve, state.t, T)

    return PriceQuote(state.t, T, factor * estimate.mean, estimate.mean, factor, Method.MONTE_CARLO,
                      stdError = factor * estimate.stdError)

def termStructure(alpha, maturities, curve, law):
    """
    Time-0 quotes for each maturity, in order.
    """

    maturities = [float(T) for T in maturities]
    if any(later <= earlier for earlier, later in zip(maturities, maturities[1:])):
        raise util.PreconditionException("Maturities must be strictly increasing")

    return [priceT0(alpha, T, curve, law) for T in maturities]

def quoteFrame(quotes):
    """
    Quotes as a table with columns T, discount, survival, price, spread, method.
    """

    return pd.DataFrame({
        'T': [quote.T for quote in quotes],
        'discount': [quote.discount for quote in quotes],
        'survival': [quote.survival for quote in quotes],
        'price': [quote.price for quote in quotes],
        'spread': [quote.spread() for quote in quotes],
        'method': [quote.method for quote in quotes],
    }, columns = ['T', 'discount', 'survival', 'price', 'spread', 'method'])
