import math

import numpy as np
import pytest

import defaultDetector
import marketView
import mcOracle
import pathEngine
import pathFunctionals
import tauAlphaLaw
import util

ALPHA = defaultDetector.AlphaParam(0.5)

def _settings(nPaths, horizon = 3.0, step = 0.001, seed = 140188, **kwargs):
    return mcOracle.McSettings(nPaths, pathEngine.makeGrid(horizon, step), seed, ALPHA, **kwargs)

def test_settingsValidate():
    grid = pathEngine.makeGrid(1.0, 0.01)
    for bad in [{'nPaths': 0}, {'nPaths': 1.5}, {'workers': 0}, {'chunkSize': 0}]:
        arguments = {'nPaths': 10, 'grid': grid, 'masterSeed': 1, 'alpha': ALPHA}
        arguments.update(bad)
        with pytest.raises(util.PreconditionException):
            mcOracle.McSettings(**arguments)

def test_chunks():
    settings = _settings(2500, chunkSize = 1000)
    assert settings.chunks() == [(0, 1000), (1000, 2000), (2000, 2500)]

def test_tallyMatchesNumpy():
    values = np.random.default_rng(8).uniform(size = 500)
    tally = mcOracle.Tally()
    for value in values:
        tally.add(value)

    estimate = tally.estimate()
    assert estimate.mean == pytest.approx(np.mean(values), abs = 1e-12)
    assert estimate.stdError == pytest.approx(np.std(values, ddof = 1) / math.sqrt(500), rel = 1e-9)
    assert estimate.nEffective == 500

def test_emptyTallyCannotEstimate():
    with pytest.raises(util.PreconditionException):
        mcOracle.Tally().estimate()

def test_estimatesDoNotDependOnWorkers():
    sequential = mcOracle.estimateDefaultStats(_settings(600, horizon = 2.0, chunkSize = 100), 2.0)
    parallel = mcOracle.estimateDefaultStats(_settings(600, horizon = 2.0, chunkSize = 100, workers = 2), 2.0)

    for name in ['tauAlphaLeq', 'defaultLeq', 'adjustment', 'survival']:
        assert getattr(sequential, name).mean == getattr(parallel, name).mean
        assert getattr(sequential, name).stdError == getattr(parallel, name).stdError

def test_sampleTauAlphaDoesNotDependOnChunking():
    first = mcOracle.sampleTauAlpha(_settings(300, horizon = 2.0, chunkSize = 300))
    second = mcOracle.sampleTauAlpha(_settings(300, horizon = 2.0, chunkSize = 70, workers = 2))
    assert np.array_equal(first, second)

def test_defaultStatsAreConsistent():
    stats = mcOracle.estimateDefaultStats(_settings(2000), 3.0)
    assert stats.survival.mean == pytest.approx(1.0 - stats.defaultLeq.mean)
    assert stats.defaultLeq.mean <= stats.tauAlphaLeq.mean
    assert stats.adjustment.mean <= stats.tauAlphaLeq.mean

    with pytest.raises(util.PreconditionException):
        mcOracle.estimateDefaultStats(_settings(10), 4.0)

@pytest.mark.parametrize('theta', [4.0, 8.0])
def test_laplaceMatchesClosedForm(theta):
    settings = _settings(5000, horizon = 3.5)
    estimate = mcOracle.estimateLaplace(settings, theta)
    analytic = tauAlphaLaw.laplaceTauAlpha(theta, ALPHA)

    low, high = estimate.biasBracket
    assert low == estimate.mean
    assert high - low <= math.exp(-theta * 3.5)
    assert mcOracle.compare(analytic, estimate, 0.01).passed

def test_laplaceEdgeCases():
    assert mcOracle.estimateLaplace(_settings(10), 0.0).mean == 1.0

    with pytest.raises(util.PreconditionException):
        mcOracle.estimateLaplace(_settings(10, horizon = 1.0), 1.0)

    with pytest.raises(util.PreconditionException):
        mcOracle.estimateLaplace(_settings(10), -1.0)

def test_doobMeyerIsCentred():
    estimate = mcOracle.estimateDoobMeyer(_settings(4000), 3.0)
    assert abs(estimate.mean) <= 3.0 * estimate.stdError + 0.03

def test_hazardMatchesCompensator():
    bins = mcOracle.estimateHazardProfile(_settings(4000), [0.15, 0.2, 0.3, 50.0, 60.0])

    for hazard in bins[:2]:
        assert not hazard.isEmpty()
        assert abs(hazard.rate.mean - hazard.compensatorTarget) <= 4.0 * hazard.rate.stdError + 0.08 * hazard.compensatorTarget
        assert hazard.compensatorTarget == pytest.approx(hazard.midpointTarget(), rel = 0.1)

    empty = bins[3]
    assert empty.isEmpty()
    assert empty.rate.mean == 0.0
    assert math.isnan(empty.compensatorTarget)

def test_hazardRejectsBadBins():
    with pytest.raises(util.PreconditionException):
        mcOracle.estimateHazardProfile(_settings(10), [0.3, 0.2])

    with pytest.raises(util.PreconditionException):
        mcOracle.estimateHazardProfile(_settings(10), [0.3])

def test_distressSurvivalMatchesExcursionLaw():
    settings = _settings(4000, horizon = 3.0)
    estimate, analytic = mcOracle.estimateDistressSurvival(settings, 1.0, 3.0, 0.2, 0.8)

    assert estimate.nEffective > 100
    assert mcOracle.compare(analytic, estimate, 0.03).passed

def test_preDistressSurvivalNeedsMatchingPaths():
    state = marketView.MarketState(0.5, marketView.Phase.PRE_DISTRESS, 0.2655, 0.2345, 1)
    with pytest.raises(util.PreconditionException):
        mcOracle.estimatePreDistressSurvival(_settings(5, horizon = 1.0), state, 1.0, ageTolerance = 1e-9)

def test_compare():
    mc = mcOracle.McEstimate(0.51, 0.01, 1000, 0.0)
    assert mcOracle.compare(0.5, mc, 0.0).passed
    assert mcOracle.compare(0.5, mc, 0.0).z == pytest.approx(1.0)
    assert not mcOracle.compare(0.45, mc, 0.0).passed
    assert mcOracle.compare(0.45, mc, 0.04).passed
    assert mcOracle.compare(0.45, mc, 0.0).label() == 'FAIL'

    exact = mcOracle.McEstimate(1.0, 0.0, 10, 0.0)
    assert mcOracle.compare(1.0, exact).z == 0.0
    assert mcOracle.compare(0.9, exact).z == math.inf

def test_lawSupDeviation():
    law = tauAlphaLaw.TauAlphaLaw(ALPHA, [0.125, 1.125], [0.0, 1.0], 12, {})
    samples = np.array([0.375, 0.625, 0.875, np.inf])

    # Uniform law on [0.125, 1.125]; the empirical CDF tops out at 3/4.
    assert mcOracle.lawSupDeviation(law, samples) == pytest.approx(0.25)

    with pytest.raises(util.PreconditionException):
        mcOracle.lawSupDeviation(law, np.array([]))

def test_scalingAcrossAlpha():
    settingsA = mcOracle.McSettings(2000, pathEngine.makeGrid(2.0, 0.001), 11, defaultDetector.AlphaParam(0.5))
    settingsB = mcOracle.McSettings(2000, pathEngine.makeGrid(8.0, 0.004), 12, defaultDetector.AlphaParam(1.0))

    result = mcOracle.scalingStatistic(mcOracle.sampleTauAlpha(settingsA), settingsA.alpha, 2.0,
                                       mcOracle.sampleTauAlpha(settingsB), settingsB.alpha, 8.0)
    assert result.pvalue > 0.01

def _sample(values, step = 0.1, alpha = 1.0):
    path = pathEngine.BrownianPath(pathEngine.TimeGrid(step, len(values)), values)
    trace = defaultDetector.trackZeros(path)
    outcome = defaultDetector.outcomeFromTrace(trace, path, defaultDetector.AlphaParam(alpha))
    return pathFunctionals.PathSample(path, trace, outcome)

LINE = [0.0, -0.1, -0.2, -0.3, -0.4, -0.5, -0.6, -0.7, -0.8, -0.9, -1.0, -1.1]

def test_functionalsOnAHandcraftedPath():
    sample = _sample(LINE)

    assert pathFunctionals.TauAlphaIndicator(0.6).evaluate(sample) == 1.0
    assert pathFunctionals.TauAlphaIndicator(0.4).evaluate(sample) == 0.0
    assert pathFunctionals.DefaultIndicator(1.05).evaluate(sample) == 1.0
    assert pathFunctionals.DefaultIndicator(0.95).evaluate(sample) == 0.0
    assert pathFunctionals.AdjustmentFunctional(0.8).evaluate(sample) == pytest.approx(math.sqrt(0.5) / math.sqrt(0.8))
    assert pathFunctionals.LaplaceFunctional(2.0).evaluate(sample) == pytest.approx(math.exp(-1.0))
    assert pathFunctionals.DoobMeyerFunctional(1.1).evaluate(sample) == pytest.approx(1.0 - 0.5 * math.log(2.0))

def test_hazardFunctionalOnAHandcraftedPath():
    sample = _sample(LINE)
    values = pathFunctionals.HazardFunctional(np.array([0.25, 0.75, 1.5, 3.0])).evaluate(sample)

    # Distress ages run from 0.5 to the default at age 1.0.
    assert list(values[:3]) == [0.0, 1.0, 0.0]
    assert values[3:6] == pytest.approx([0.25, 0.25, 0.0])
    assert values[6:] == pytest.approx([0.5 * math.log(1.5), 0.5 * math.log(1.0 / 0.75), 0.0])

def test_distressSurvivalFunctional():
    sample = _sample(LINE)
    assert pathFunctionals.DistressSurvival(0.3, 1.1, 0.0, 10.0).evaluate(sample) is None

    survived, analytic = pathFunctionals.DistressSurvival(0.8, 1.1, 0.5, 1.0).evaluate(sample)
    assert survived == 0.0
    assert analytic == pytest.approx(math.sqrt(0.8 / 1.1))

    assert pathFunctionals.DistressSurvival(0.8, 1.1, 0.9, 1.0).evaluate(sample) is None

def test_survivalIndicatorSelectsByState():
    positive = _sample([0.0, 0.1, 0.2, 0.3, 0.2, 0.1])
    assert pathFunctionals.SurvivalIndicator(0.0, 0.5, -1, 0.0, 0.0).evaluate(positive) == 1.0
    assert pathFunctionals.SurvivalIndicator(0.3, 0.5, 1, 0.25, 0.35).evaluate(positive) == 1.0
    assert pathFunctionals.SurvivalIndicator(0.3, 0.5, -1, 0.25, 0.35).evaluate(positive) is None
    assert pathFunctionals.SurvivalIndicator(0.3, 0.5, 1, 0.0, 0.1).evaluate(positive) is None

    assert pathFunctionals.SurvivalIndicator(0.7, 1.1, -1, 0.0, 1.0).evaluate(_sample(LINE)) is None

def test_censoredPathFunctionals():
    sample = _sample([0.0, 0.1, 0.2, 0.3])
    laplace = pathFunctionals.LaplaceFunctional(1.0)

    assert laplace.evaluate(sample) == 0.0
    assert laplace.isCensored(sample)
    assert not pathFunctionals.TauAlphaIndicator(0.3).isCensored(sample)
    assert np.all(pathFunctionals.HazardFunctional([0.5, 1.0]).evaluate(sample) == 0.0)

def test_noDistressBeforeTheTrigger():
    settings = mcOracle.McSettings(200, pathEngine.makeGrid(1.0, 0.01), 3, defaultDetector.AlphaParam(2.0))
    stats = mcOracle.estimateDefaultStats(settings, 1.0)

    assert stats.tauAlphaLeq.mean == 0.0
    assert stats.defaultLeq.mean == 0.0
    assert stats.survival.mean == 1.0

def test_sampleTallyKeepsPathOrder():
    first = mcOracle.SampleTally()
    second = mcOracle.SampleTally()
    for value in [3.0, 1.0]:
        first.add(value)

    second.add(math.inf)
    second.censored += 1
    first.merge(second)

    assert first.samples().tolist() == [3.0, 1.0, math.inf]
    assert first.selected == 3
    assert first.censored == 1

def test_tauAlphaSamplesRideAlongOtherFunctionals():
    settings = _settings(200, horizon = 2.0, chunkSize = 64)
    tallies = mcOracle.runFunctionals(settings, [pathFunctionals.TauAlphaIndicator(2.0), pathFunctionals.TauAlphaValue()])
    samples = tallies[1].samples()

    assert np.array_equal(samples, mcOracle.sampleTauAlpha(settings))
    assert tallies[0].total() == np.count_nonzero(samples <= 2.0)
    assert tallies[1].censored == np.count_nonzero(np.isinf(samples))

def test_noProbabilityMassAtTheTrigger():
    samples = mcOracle.sampleTauAlpha(_settings(2000, horizon = 1.0))
    assert np.mean(samples == ALPHA.trigger()) == 0.0
    assert np.min(samples) > ALPHA.trigger()
