"""
Discretized cash-balance paths.

The firm's cash balance X is a standard Brownian motion started at zero
(no drift, unit volatility). Paths live on a uniform TimeGrid and are a pure
function of (grid, seed): each path owns a Philox stream keyed by its seed,
so paths can be generated in any order, or in parallel, and still come out
bit-identical.

Example:
  grid = makeGrid(1.0, 0.001)
  path = simulatePath(grid, pathSeed(140188, 7))
"""

import math

import numpy as np

import util

# Largest grid accepted (points per path); about 400MB of float64.
MAX_GRID_POINTS = 50000000

# Relative slack when snapping the horizon onto the step, so that 1.0 / 0.001
# is read as 1000 steps and not 1001.
SNAP_TOLERANCE = 1e-9

# Spawn keys of the two per-path streams.
INCREMENT_STREAM = 0
BRIDGE_STREAM = 1

class GridTooLargeException(util.PreconditionException):
    """
    The requested grid does not fit the memory budget.
    """

    pass

class TimeGrid(object):
    """
    A uniform grid 0, step, 2 step, ..., horizon with count points.
    """

    def __init__(self, step, count):
        if count < 2:
            raise util.PreconditionException("A grid needs at least 2 points, got %d" % (count))

        self.step = util.requirePositive('step', step)
        self.count = int(count)
        self.horizon = self.step * (self.count - 1)

    def times(self):
        return np.arange(self.count, dtype=np.float64) * self.step

    def indexAtOrBefore(self, t):
        """
        The last grid index whose time is <= t (clipped to the grid).
        """

        index = int(math.floor(t / self.step + SNAP_TOLERANCE))
        return min(max(index, 0), self.count - 1)

    def __eq__(self, other):
        if other == None:
            return False

        return self.step == other.step and self.count == other.count

    def __hash__(self):
        return hash((self.step, self.count))

    def __str__(self):
        return "TimeGrid(horizon=%g, step=%g, count=%d)" % (self.horizon, self.step, self.count)

class BrownianPath(object):
    """
    Cash-balance levels, one per grid point, together with the seed
    they were drawn from.
    """

    def __init__(self, grid, values, seed = 0):
        values = np.asarray(values, dtype=np.float64)
        if len(values) != grid.count:
            raise util.PreconditionException("Path has %d values for a grid of %d points" % (len(values), grid.count))

        if values[0] != 0.0:
            raise util.PreconditionException("Cash balances start at 0, got %r" % (values[0]))

        self.grid = grid
        self.values = values
        self.seed = int(seed)

    def times(self):
        return self.grid.times()

    def valueAt(self, t):
        """
        The path interpolated linearly at time t.
        """

        return float(np.interp(t, self.grid.times(), self.values))

    def increments(self):
        return np.diff(self.values)

    def withValues(self, values):
        """
        A path on the same grid and seed carrying other values.
        """

        return BrownianPath(self.grid, values, self.seed)

def makeGrid(horizon, step):
    """
    Builds the uniform grid covering [0, horizon].

    A horizon that is not a whole number of steps is rounded UP to the next
    step, so the final date is never cut off; the stored horizon is then
    exactly step * (count - 1).
    """

    horizon = util.requirePositive('horizon', horizon)
    step = util.requirePositive('step', step)

    steps = horizon / step
    if steps > MAX_GRID_POINTS:
        raise GridTooLargeException("Grid of %.3g points exceeds the limit of %d" % (steps, MAX_GRID_POINTS))

    steps = max(1, int(math.ceil(steps - SNAP_TOLERANCE * max(1.0, steps))))
    return TimeGrid(step, steps + 1)

def pathSeed(masterSeed, pathIndex):
    """
    The 64-bit seed of path number pathIndex in a run keyed by masterSeed.
    Independent of how many other paths exist or who generates them.
    """

    sequence = np.random.SeedSequence([int(masterSeed), int(pathIndex)])
    return int(sequence.generate_state(1, dtype=np.uint64)[0])

def pathStreams(seed):
    """
    The (increment, bridge) generators owned by the path with this seed.
    """

    children = np.random.SeedSequence(int(seed)).spawn(2)
    return (np.random.Generator(np.random.Philox(children[INCREMENT_STREAM])),
            np.random.Generator(np.random.Philox(children[BRIDGE_STREAM])))

def simulatePath(grid, seed):
    """
    Draws a cash-balance path: X_0 = 0 and independent N(0, step) increments.

    Normals come from numpy's Generator.standard_normal (ziggurat) on a
    Philox bit generator; nothing else is ever used, so a seed means the
    same path on every platform.
    """

    incrementStream, _ = pathStreams(seed)

    values = np.empty(grid.count, dtype=np.float64)
    values[0] = 0.0
    increments = incrementStream.standard_normal(grid.count - 1) * math.sqrt(grid.step)
    np.cumsum(increments, out=values[1:])

    return BrownianPath(grid, values, seed)

def bridgeUniforms(path):
    """
    One uniform per step from the path's own bridge stream, used to decide
    whether an excursion was missed between two grid points.
    """

    _, bridgeStream = pathStreams(path.seed)
    return bridgeStream.random(path.grid.count - 1)

def bridgeZeroCrossingProbability(xLeft, xRight, step):
    """
    Probability that a Brownian bridge from xLeft to xRight over one step
    touches zero. Works elementwise on arrays.

    Endpoints of opposite sign (or a zero endpoint) force a zero: 1.
    Same-sign endpoints give exp(-2 xLeft xRight / step).
    """

    step = util.requirePositive('step', step)
    product = np.asarray(xLeft, dtype=np.float64) * np.asarray(xRight, dtype=np.float64)
    probability = np.where(product > 0.0, np.exp(-2.0 * np.maximum(product, 0.0) / step), 1.0)

    if np.ndim(probability) == 0:
        return float(probability)

    return probability
