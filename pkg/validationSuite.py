"""
The analytic-against-simulation report behind the `validate` command.

All path functionals, tau_alpha itself included, are tallied in one
simulation pass; the law of tau_alpha is compared with the empirical CDF of
the same paths.
"""

import logging
import math

import pandas as pd

import mcOracle
import pathFunctionals
import pricer
import tauAlphaLaw

logger = logging.getLogger(__name__)

REPORT_COLUMNS = ['quantity', 'analytic', 'mc_mean', 'mc_se', 'allowance', 'z', 'verdict']

LAPLACE_THETAS = (0.5, 1.0, 2.0)

# A hazard bin is only judged with at least this many at-risk path steps.
MIN_HAZARD_STEPS = 1000
HAZARD_RELATIVE_ALLOWANCE = 0.10

LAW_ALLOWANCE = 0.01
# 1% critical value of the one-sample Kolmogorov-Smirnov distance, times sqrt(n).
KS_CRITICAL_1PCT = 1.63

def lawAllowance(n):
    """
    Allowed sup distance between the law and the empirical CDF of n paths.
    """

    return max(LAW_ALLOWANCE, KS_CRITICAL_1PCT / math.sqrt(n))

def _row(quantity, analytic, estimate, allowance):
    verdict = mcOracle.compare(analytic, estimate, allowance)
    return {
        'quantity': quantity,
        'analytic': analytic,
        'mc_mean': estimate.mean,
        'mc_se': estimate.stdError,
        'allowance': allowance,
        'z': verdict.z,
        'verdict': verdict.label(),
    }

def runValidation(config, workers = 1):
    """
    Builds the report table. Returns (frame, allPassed).
    """

    settings = config.mcSettings(workers)
    law = config.law()
    maturities = config.simulatedMaturities()
    horizon = settings.grid.horizon
    thetas = [theta for theta in LAPLACE_THETAS if math.exp(-theta * horizon) < mcOracle.LAPLACE_TRUNCATION_BOUND]
    for theta in LAPLACE_THETAS:
        if theta not in thetas:
            logger.info("Skipping the Laplace check at theta=%g: horizon %g is too short", theta, horizon)

    functionals = []
    for T in maturities:
        functionals += [pathFunctionals.TauAlphaIndicator(T), pathFunctionals.DefaultIndicator(T), pathFunctionals.AdjustmentFunctional(T)]

    functionals += [pathFunctionals.LaplaceFunctional(theta) for theta in thetas]

    doobMeyerTime = maturities[-1] if len(maturities) > 0 else horizon
    functionals.append(pathFunctionals.DoobMeyerFunctional(doobMeyerTime))
    functionals.append(pathFunctionals.HazardFunctional(config.hazardBins))
    functionals.append(pathFunctionals.TauAlphaValue())

    tallies = mcOracle.runFunctionals(settings, functionals)

    rows = []
    for i, T in enumerate(maturities):
        stats = mcOracle.defaultStatsFrom(*tallies[3 * i:3 * i + 3])
        quote = pricer.priceT0(config.alpha, T, config.curve, law)
        probability, adjustment = quote.decomposition
        rows.append(_row('tau_alpha_leq(T=%g)' % (T), probability, stats.tauAlphaLeq, config.allowance))
        rows.append(_row('adjustment(T=%g)' % (T), adjustment, stats.adjustment, config.allowance))
        rows.append(_row('survival(T=%g)' % (T), quote.survival, stats.survival, config.allowance))

    offset = 3 * len(maturities)
    for j, theta in enumerate(thetas):
        estimate = mcOracle.laplaceFrom(settings, theta, tallies[offset + j])
        rows.append(_row('laplace(theta=%g)' % (theta), tauAlphaLaw.laplaceTauAlpha(theta, config.alpha), estimate, config.allowance))

    offset += len(thetas)
    rows.append(_row('doob_meyer(T=%g)' % (doobMeyerTime), 0.0, tallies[offset].estimate(), config.allowance))

    for hazard in mcOracle.hazardFrom(settings, config.hazardBins, tallies[offset + 1]):
        if hazard.rate.nEffective < MIN_HAZARD_STEPS:
            logger.info("Hazard bin [%g, %g) has %d at-risk steps; not judged", hazard.low, hazard.high, hazard.rate.nEffective)
            continue

        allowance = HAZARD_RELATIVE_ALLOWANCE * hazard.compensatorTarget
        rows.append(_row('hazard(age=[%g,%g))' % (hazard.low, hazard.high), hazard.compensatorTarget, hazard.rate, allowance))

    samples = tallies[offset + 2].samples()
    law = law.withMcDeviation(mcOracle.lawSupDeviation(law, samples))
    logger.info("Law diagnostics: %s", law.diagnostics)
    deviation = mcOracle.McEstimate(law.diagnostics['supDeviationMc'], 0.0, len(samples), 0.0)
    rows.append(_row('law_sup_deviation', 0.0, deviation, lawAllowance(len(samples))))

    frame = pd.DataFrame(rows, columns = REPORT_COLUMNS)
    allPassed = bool((frame['verdict'] == 'PASS').all())
    logger.info("Validation finished: %d checks, %s", len(frame), 'all passed' if allPassed else 'some failed')

    return frame, allPassed
