"""Shared fixtures and independent test oracles."""

from __future__ import annotations

import numpy as np
import pytest

from stablepaths import maps
from stablepaths.cadlag import StepPath

MASTER_SEED = 20250808


@pytest.fixture(scope="session")
def spec06() -> maps.MapSpec:
    return maps.MapSpec(0.6)


@pytest.fixture(scope="session")
def obs_default(spec06) -> maps.ObservableSpec:
    """Holder observable with phi(0) > 0 after empirical centering."""
    raw = maps.ObservableSpec("power", (1.0, -0.9, 0.8))
    return maps.calibrate_centering(spec06, raw, orbit_length=2_000_000, burn_in=10_000)


@pytest.fixture(scope="session")
def dens_hq_pair(spec06):
    """Two independent high-quality invariant-density estimates."""
    from stablepaths.rng import derive

    a = maps.estimate_invariant_density(spec06, 10_000_000, 256, 20_000, derive(MASTER_SEED, 900))
    b = maps.estimate_invariant_density(spec06, 10_000_000, 256, 20_000, derive(MASTER_SEED, 901))
    return a, b


@pytest.fixture(scope="session")
def h_half_hq(dens_hq_pair) -> float:
    return dens_hq_pair[0].h_half


# ---------------------------------------------------------------------------
# Oracles
# ---------------------------------------------------------------------------

def random_step_path(rng: np.random.Generator, T: float = 1.0, max_jumps: int = 6,
                     amp: float = 1.0) -> StepPath:
    m = int(rng.integers(0, max_jumps + 1))
    times = np.sort(rng.uniform(0.01 * T, T, size=m))
    times = np.unique(times)
    values = np.cumsum(rng.uniform(-amp, amp, size=times.size))
    initial = float(rng.uniform(-amp, amp))
    return StepPath.from_steps(T, times, initial + values, initial)


def exhaustive_phi_star(sums) -> tuple[float, float]:
    """O(r^2) enumeration of both maxima over ordered index pairs."""
    sums = np.asarray(sums, dtype=float)
    fall = 0.0
    rise = 0.0
    for lp in range(sums.size):
        for l in range(lp, sums.size):
            fall = max(fall, sums[lp] - sums[l])
            rise = max(rise, sums[l] - sums[lp])
    return fall, rise


def brute_force_j1(g1: StepPath, g2: StepPath, grid_n: int = 200) -> float:
    """Grid search over piecewise-linear time changes moving g1's jumps.

    Only practical for paths with at most two jumps in g1; the time change
    is pinned at the endpoints and linear between moved jump positions.
    """
    from itertools import combinations

    from stablepaths.cadlag import uniform_distance

    T = g1.domain_end
    s = g1.breakpoints
    v = g1.values
    if s.size == 0:
        return uniform_distance(g1, g2)
    # exact jump times of both paths are the interesting alignment targets
    grid = np.unique(np.concatenate([
        np.linspace(T * 1e-6, T, grid_n), g2.breakpoints, s,
    ]))
    best = np.inf
    if s.size == 1:
        placements = ((u,) for u in grid)
    elif s.size == 2:
        placements = combinations(grid, 2)
    else:
        raise NotImplementedError("oracle supports at most 2 jumps")
    for u in placements:
        moved = StepPath(T, np.asarray(u, dtype=float), v, g1.initial_value)
        cost = max(
            float(np.max(np.abs(np.asarray(u) - s))),
            uniform_distance(moved, g2),
        )
        best = min(best, cost)
    return best
