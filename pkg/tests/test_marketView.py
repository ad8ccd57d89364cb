import math

import numpy as np
import pytest

import defaultDetector
import marketView
import pathEngine
import util

Phase = marketView.Phase

def _path(step, values):
    return pathEngine.BrownianPath(pathEngine.TimeGrid(step, len(values)), values)

def _azema(path):
    return marketView.azemaPath(path, defaultDetector.trackZeros(path))

def test_azemaPathValues():
    m = _azema(_path(0.5, [0.0, 0.3, 0.4]))
    assert m.values[0] == 0.0
    assert m.values[1] == pytest.approx(1.0)

    m = _azema(_path(1.0, [0.0, -1.0, -2.0, -1.0]))
    assert m.values[2] == pytest.approx(-2.0)

def test_azemaPathIsZeroAtZeros():
    m = _azema(_path(0.1, [0.0, 0.1, 0.0, 0.1]))
    assert m.values[2] == 0.0
    assert m.jumps[2]

def test_azemaPathJump():
    m = _azema(_path(1.0, [0.0, 0.5, -0.5]))
    assert list(m.jumps) == [False, False, True]
    assert m.zeroTimes[2] == pytest.approx(1.5)
    assert m.preJump[2] == pytest.approx(math.sqrt(3.0))
    assert m.values[2] == pytest.approx(-1.0)

def test_azemaPathRejectsForeignTrace():
    trace = defaultDetector.trackZeros(_path(1.0, [0.0, 0.5, -0.5]))
    with pytest.raises(util.PreconditionException):
        marketView.azemaPath(_path(1.0, [0.0, 0.5]), trace)

def test_intensity():
    assert marketView.intensity(marketView.MarketState(1.0, Phase.DISTRESS, 0.75, 0.25, -1)) == pytest.approx(2.0)
    assert marketView.intensity(marketView.MarketState(1.0, Phase.PRE_DISTRESS, 0.0, 1.0, -1)) == 0.0
    assert marketView.intensity(marketView.MarketState(3.0, Phase.DEFAULTED, 2.5, 0.5, 1)) == 0.0
    assert marketView.intensity(marketView.MarketState.inDistress(0.5, 0.0)) == pytest.approx(1.0)

def test_intensityDecreasesWithAge():
    rates = [marketView.intensity(marketView.MarketState.inDistress(t, 0.0)) for t in [0.5, 1.0, 2.0, 4.0]]
    assert rates == sorted(rates, reverse = True)

def test_intensityRejectsZeroAge():
    with pytest.raises(util.PreconditionException):
        marketView.intensity(marketView.MarketState(1.0, Phase.DISTRESS, 1.0, 0.0, -1))

def test_marketStateValidates():
    with pytest.raises(util.PreconditionException):
        marketView.MarketState(1.0, Phase.DISTRESS, 0.0, 1.0, 1)

    with pytest.raises(util.PreconditionException):
        marketView.MarketState(1.0, Phase.PRE_DISTRESS, 0.0, -0.1, 1)

    with pytest.raises(util.PreconditionException):
        marketView.MarketState(1.0, 'Bankrupt', 0.0, 1.0, 1)

def _outcome(tau):
    return defaultDetector.DefaultOutcome(defaultDetector.AlphaParam(1.0), 0.5, -0.5, 0.0, tau, 2.0)

def test_compensator():
    outcome = _outcome(None)
    assert marketView.compensator(outcome, 0.4) == 0.0
    assert marketView.compensator(outcome, 0.5) == 0.0
    assert marketView.compensator(outcome, 1.0) == pytest.approx(0.5 * math.log(2.0))

    stopped = _outcome(0.8)
    assert marketView.compensator(stopped, 1.0) == pytest.approx(0.5 * math.log(1.6))
    assert marketView.compensator(stopped, 2.0) == marketView.compensator(stopped, 0.8)

    with pytest.raises(util.PreconditionException):
        marketView.compensator(outcome, 2.5)

def test_countingProcess():
    outcome = _outcome(0.8)
    assert marketView.countingProcess(outcome, 0.79) == 0
    assert marketView.countingProcess(outcome, 0.8) == 1
    assert marketView.countingProcess(_outcome(None), 2.0) == 0

def test_intensityPath():
    outcome = _outcome(0.8)
    intensity = marketView.intensityPath(outcome, pathEngine.makeGrid(2.0, 0.1))
    times = intensity.times

    assert np.all(intensity.rates[times <= 0.5] == 0.0)
    assert np.all(intensity.rates[times > 0.85] == 0.0)
    assert intensity.rates[7] == pytest.approx(1.0 / 1.4)
    assert intensity.rates[6] == pytest.approx(1.0 / 1.2)

    assert intensity.compensator[0] == 0.0
    assert np.all(np.diff(intensity.compensator) >= 0.0)
    assert intensity.compensator[-1] == pytest.approx(0.5 * math.log(1.6))

def test_marketStateAt():
    path = _path(0.1, [0.0, -0.1, -0.2, -0.3, -0.4, -0.5, -0.6, -0.7, -0.8, -0.9, -1.0, -1.1])
    alpha = defaultDetector.AlphaParam(1.0)
    outcome = defaultDetector.detectDefault(path, alpha)
    trace = defaultDetector.trackZeros(path)

    before = marketView.marketStateAt(outcome, trace, 0.3)
    assert before.phase == Phase.PRE_DISTRESS
    assert before.sign == -1
    assert before.age == pytest.approx(0.3)

    during = marketView.marketStateAt(outcome, trace, 0.7)
    assert during.phase == Phase.DISTRESS
    assert during.gBar == pytest.approx(0.0)
    assert during.age == pytest.approx(0.7)

    y = defaultDetector.reflectToY(path, outcome)
    after = marketView.marketStateAt(outcome, defaultDetector.trackZeros(y), 1.1)
    assert after.phase == Phase.DEFAULTED
    assert after.gBar == pytest.approx(1.0)

def test_structureEquationWithoutZeros():
    residuals = []
    for step in [1e-2, 1e-3, 1e-4]:
        times = pathEngine.makeGrid(1.0, step).times()
        m = marketView.AzemaPath(times, np.sqrt(2.0 * times), np.zeros(len(times), dtype = bool),
                                 np.full(len(times), np.nan), np.full(len(times), np.nan))
        residuals.append(marketView.structureEquationResidual(m))

    assert residuals[0] > residuals[1] > residuals[2]
    assert residuals[2] < 1e-2

def test_structureEquationJumpCancels():
    # One step up to M = sqrt(2 s), one step back to 0 at a zero: the jump adds
    # (dM)^2 + M- dM = 0, so only the first step's gap remains.
    step = 0.5
    m = marketView.AzemaPath(np.array([0.0, step, 2.0 * step]), np.array([0.0, math.sqrt(2.0 * step), 0.0]),
                             np.array([False, False, True]), np.full(3, np.nan), np.full(3, np.nan))
    assert marketView.structureEquationResidual(m) == pytest.approx(step)

def _meanResidual(step, count):
    grid = pathEngine.makeGrid(1.0, step)
    total = 0.0
    for i in range(count):
        path = pathEngine.simulatePath(grid, pathEngine.pathSeed(77, i))
        total += marketView.structureEquationResidual(_azema(path))

    return total / count

def test_structureEquationResidualShrinks():
    assert _meanResidual(1e-4, 20) < 0.5 * _meanResidual(1e-2, 20)

def test_azemaTimesMatchDetector():
    alpha = defaultDetector.AlphaParam(0.5)
    grid = pathEngine.makeGrid(3.0, 0.001)
    compared = 0
    for i in range(100):
        path = pathEngine.simulatePath(grid, pathEngine.pathSeed(31, i))
        outcome = defaultDetector.detectDefault(path, alpha)
        y = defaultDetector.reflectToY(path, outcome)
        m = marketView.azemaPath(y, defaultDetector.trackZeros(y))

        distress = marketView.azemaDistressTime(m, alpha)
        if outcome.distressCensored():
            assert distress is None
            continue

        # Y may cross zero inside the step where distress starts.
        if outcome.tau is not None and outcome.tau - outcome.tauAlpha < grid.step:
            continue

        compared += 1
        assert abs(distress - outcome.tauAlpha) <= grid.step + 1e-12

        default = marketView.azemaDefaultTime(m, alpha, distress)
        if outcome.tau is None:
            assert default is None
        else:
            assert abs(default - outcome.tau) <= grid.step + 1e-12

    assert compared > 50

def test_marketStateReadsTheTraceGrid():
    path = _path(0.1, [0.0, 0.1, 0.2, -0.1, -0.2])
    trace = defaultDetector.trackZeros(path)
    outcome = defaultDetector.detectDefault(path, defaultDetector.AlphaParam(2.0))
    assert trace.grid == path.grid

    onGridPoint = marketView.marketStateAt(outcome, trace, 0.3)
    assert onGridPoint.sign == -1
    assert onGridPoint.gBar == pytest.approx(0.2 + 0.1 * 2.0 / 3.0)

    justBefore = marketView.marketStateAt(outcome, trace, 0.3 - 1e-6)
    assert justBefore.sign == 1
    assert justBefore.gBar == 0.0

    assert marketView.marketStateAt(outcome, trace, 10.0).sign == -1

def test_structureEquationResidualIsTheLastZeroGap():
    # sum (dM)^2 - t + sum M- dM = (1/2) sum (dM)^2 - (t - age) on any grid.
    path = pathEngine.simulatePath(pathEngine.makeGrid(1.0, 1e-3), pathEngine.pathSeed(5, 0))
    trace = defaultDetector.trackZeros(path)
    m = marketView.azemaPath(path, trace)

    half = 0.5 * np.cumsum(np.diff(m.values) ** 2)
    gBar = trace.times[1:] - trace.age[1:]
    assert marketView.structureEquationResidual(m) == pytest.approx(np.max(np.abs(half - gBar)), abs = 1e-9)

def test_structureEquationResidualAgainstAFinerGrid():
    # Refining one path tenfold shrinks the residual like sqrt(step) log(1 / step).
    coarse = []
    fine = []
    for i in range(10):
        path = pathEngine.simulatePath(pathEngine.TimeGrid(1e-5, 100001), pathEngine.pathSeed(91, i))
        fine.append(marketView.structureEquationResidual(_azema(path)))

        thinned = pathEngine.BrownianPath(pathEngine.TimeGrid(1e-4, 10001), path.values[::10])
        coarse.append(marketView.structureEquationResidual(_azema(thinned)))

    assert np.mean(fine) < np.mean(coarse) <= 2.0 * math.sqrt(10.0) * np.mean(fine)
