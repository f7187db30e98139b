"""First-return machinery on Y = [1/2, 1].

Return times, single excursions with their monotonicity functional, lap
numbers, the Birkhoff decomposition into complete excursions plus an
incomplete tail, the rescaled partial-sum paths, the return-time partition
of Y, and the split of an observable into a piecewise-constant part (which
carries the anomalous behaviour) and a part vanishing at the neutral point.

The module also houses the vectorised ensemble engines used by the
statistical suites: all of them advance a whole array of orbits one map
application per pass with masked updates, which keeps million-excursion
runs in numpy time rather than Python time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .cadlag import StepPath
from .errors import DomainError, PartitionConsistencyError, ReturnTimeTruncated, ValidationError
from .maps import MapSpec, ObservableSpec, lsv_map, preimage_sequence, step_array

Y_LEFT = 0.5
DEFAULT_CAP = 100_000_000


def _in_y(x) -> bool:
    return x >= Y_LEFT


# ---------------------------------------------------------------------------
# Scalar operations
# ---------------------------------------------------------------------------

def return_time(spec: MapSpec, y: float, cap: int = DEFAULT_CAP) -> int:
    """Least k >= 1 with f^k(y) in Y = [1/2, 1]."""
    if not Y_LEFT <= y <= 1.0:
        raise DomainError(f"y must lie in [1/2, 1], got {y}")
    x = y
    for k in range(1, cap + 1):
        x = lsv_map(spec, x)
        if x >= Y_LEFT:
            return k
    raise ReturnTimeTruncated(y, cap)


@dataclass(frozen=True)
class Excursion:
    """One return-time block of an orbit started in Y.

    partial_sums holds phi_0 = 0 through phi_r; phi_star is the smaller of
    the maximal fall-from-peak and rise-from-trough of the partial sums,
    which vanishes exactly when they are monotone.
    """

    start: float
    return_time: int
    partial_sums: np.ndarray
    induced_value: float
    phi_star: float
    env_up: float
    env_down: float
    direction: str

    def csv_row(self) -> str:
        return (
            f"{self.start:.17g},{self.return_time},{self.induced_value:.17g},"
            f"{self.phi_star:.17g},{self.direction}"
        )


EXCURSION_CSV_HEADER = "y,r,Phi,PhiStar,direction"


def excursions_to_csv(excursions) -> str:
    return "\n".join([EXCURSION_CSV_HEADER] + [e.csv_row() for e in excursions]) + "\n"


def phistar_from_partial_sums(sums) -> tuple[float, float]:
    """(fall, rise) of a partial-sum sequence phi_0..phi_r.

    fall is the maximum of phi_{l'} - phi_l over ordered pairs l' <= l, which
    equals the maximum of (running max - current); rise is the mirror image.
    The excursion functional is min(fall, rise).
    """
    sums = np.asarray(sums, dtype=float)
    run_max = np.maximum.accumulate(sums)
    run_min = np.minimum.accumulate(sums)
    return float(np.max(run_max - sums)), float(np.max(sums - run_min))


def excursion(spec: MapSpec, obs: ObservableSpec, y: float, cap: int = DEFAULT_CAP) -> Excursion:
    """Full excursion record from y, with the envelope-form functional."""
    r = return_time(spec, y, cap)
    sums = np.empty(r + 1)
    sums[0] = 0.0
    x = y
    acc = 0.0
    for ell in range(r):
        acc += obs.evaluate(x)
        sums[ell + 1] = acc
        x = lsv_map(spec, x)
    fall, rise = phistar_from_partial_sums(sums)
    phi_star = min(fall, rise)
    if fall < rise:
        direction = "increasing"
    elif rise < fall:
        direction = "decreasing"
    else:
        direction = "tie"
    run_max = np.maximum.accumulate(sums)
    run_min = np.minimum.accumulate(sums)
    return Excursion(
        start=y,
        return_time=r,
        partial_sums=sums,
        induced_value=float(sums[-1]),
        phi_star=phi_star,
        env_up=float(run_max[-1]),
        env_down=float(run_min[-1]),
        direction=direction,
    )


@dataclass(frozen=True)
class LapTrace:
    """Occupation counts N_k and return-time partial sums along one orbit."""

    horizon: int
    lap_numbers: np.ndarray   # N_0 .. N_{horizon}
    return_sums: np.ndarray   # r_0 = 0, r_1, ... (times of visits to Y)

    def u_n(self, s, n: int):
        """Normalised occupation time n^{-1} N_{floor(s n)}."""
        idx = np.asarray(np.floor(np.asarray(s, dtype=float) * n), dtype=int)
        idx = np.clip(idx, 0, self.horizon)
        out = self.lap_numbers[idx] / n
        return float(out) if np.ndim(s) == 0 else out


def lap_numbers(spec: MapSpec, x0: float, k_max: int) -> LapTrace:
    """Both representations of N_k, cross-checked.

    The indicator sum over f^1..f^k and the max-formula inverse of the
    return-time partial sums must agree at every k; a disagreement would be
    a bookkeeping bug, so it is asserted here rather than reported.
    """
    if k_max < 1:
        raise DomainError("k_max must be at least 1")
    if not 0.0 <= x0 <= 1.0:
        raise DomainError(f"x0 must lie in [0,1], got {x0}")
    laps = np.empty(k_max + 1, dtype=np.int64)
    laps[0] = 0
    visits = [0]
    x = x0
    count = 0
    for k in range(1, k_max + 1):
        x = lsv_map(spec, x)
        if x >= Y_LEFT:
            count += 1
            visits.append(k)
        laps[k] = count
    sums = np.asarray(visits, dtype=np.int64)
    # max-formula: N_k = max{n >= 0 : r_n <= k}
    alt = np.searchsorted(sums, np.arange(k_max + 1), side="right") - 1
    if not np.array_equal(alt, laps):
        raise AssertionError("lap-number representations disagree")
    return LapTrace(k_max, laps, sums)


def decompose_birkhoff(
    spec: MapSpec, obs: ObservableSpec, y: float, k: int
) -> tuple[float, float]:
    """Split phi_k(y) into complete excursions plus the incomplete tail.

    Returns (head, remainder) with head the induced sum over the N_k complete
    excursions and remainder the contribution after the last return.
    """
    if not Y_LEFT <= y <= 1.0:
        raise DomainError(f"y must lie in Y, got {y}")
    if k < 0:
        raise DomainError("k must be nonnegative")
    head = 0.0
    remainder = 0.0
    acc = 0.0
    x = y
    last_return_sum = 0.0
    for ell in range(k):
        acc += obs.evaluate(x)
        x = lsv_map(spec, x)
        if x >= Y_LEFT:
            last_return_sum = acc
    head = last_return_sum
    remainder = acc - last_return_sum
    return head, remainder


@dataclass(frozen=True)
class ScaledPathBundle:
    """The three rescaled processes of one induced orbit on [0, T]."""

    n: int
    T: float
    B_n: float
    W: StepPath
    U: StepPath
    P: StepPath


def scaled_paths(
    spec: MapSpec,
    obs: ObservableSpec,
    y: float,
    n: int,
    T: float,
    cap: int = DEFAULT_CAP,
) -> ScaledPathBundle:
    """Build W_n, P_n and the time-changed U_n on the 1/n grid.

    W_n(s) = B(n)^{-1} phi_{floor(sn)}(y), P_n(t) = B(n)^{-1} Phi_{floor(tn)}(y)
    and U_n(s) = P_n(n^{-1} N_{floor(sn)}), with B(n) = n^{1/alpha} = n^gamma.
    """
    if n < 1 or T <= 0:
        raise DomainError("need n >= 1 and T > 0")
    if not Y_LEFT <= y <= 1.0:
        raise DomainError(f"y must lie in Y, got {y}")
    m_full = int(math.floor(T * n))
    while m_full / n > T:
        m_full -= 1
    B_n = float(n) ** spec.gamma

    # phi partial sums and lap numbers over the first m_full map steps.
    phi_sums = np.empty(m_full + 1)
    phi_sums[0] = 0.0
    laps = np.empty(m_full + 1, dtype=np.int64)
    laps[0] = 0
    x = y
    acc = 0.0
    count = 0
    for k in range(1, m_full + 1):
        acc += obs.evaluate(x)
        phi_sums[k] = acc
        x = lsv_map(spec, x)
        if x >= Y_LEFT:
            count += 1
        laps[k] = count

    # induced partial sums Phi_0 .. Phi_{m_full}: continue the same orbit
    # until m_full complete excursions have been observed.
    induced = np.empty(m_full + 1)
    induced[0] = 0.0
    done = count
    # complete excursions observed so far lie inside the phi_sums prefix:
    ret_idx = np.nonzero(np.diff(laps) > 0)[0] + 1
    for j, kk in enumerate(ret_idx, start=1):
        induced[j] = phi_sums[kk]
    steps = m_full
    while done < m_full:
        acc += obs.evaluate(x)
        x = lsv_map(spec, x)
        steps += 1
        if steps - m_full > cap:
            raise ReturnTimeTruncated(y, cap)
        if x >= Y_LEFT:
            done += 1
            induced[done] = acc

    grid = np.arange(1, m_full + 1) / n
    W = StepPath.from_steps(T, grid, phi_sums[1:] / B_n, 0.0)
    P = StepPath.from_steps(T, grid, induced[1:] / B_n, 0.0)
    U = StepPath.from_steps(T, grid, induced[laps[1:]] / B_n, 0.0)
    return ScaledPathBundle(n=n, T=T, B_n=B_n, W=W, U=U, P=P)


@dataclass(frozen=True)
class ReturnPartition:
    """Cells of Y on which the return time is constant."""

    cells: tuple  # of (n, left, right, measure_estimate)

    def to_csv(self) -> str:
        lines = ["n,left,right,measure_estimate"]
        for n, left, right, mass in self.cells:
            lines.append(f"{n},{left:.17g},{right:.17g},{mass:.17g}")
        return "\n".join(lines) + "\n"


def return_partition(spec: MapSpec, n_max: int, spot_checks: int = 3) -> ReturnPartition:
    """Cells {r = n} for n <= n_max, built from the neutral-branch preimages.

    The r = 1 cell is [3/4, 1]; for n >= 2 the cell is the dyadic lift of
    [x_n, x_{n-1}).  Each cell is verified by evaluating the return time at
    interior points; measure_estimate is Lebesgue length.
    """
    if n_max < 1:
        raise DomainError("n_max must be at least 1")
    cells = [(1, 0.75, 1.0, 0.25)]
    if n_max > 1:
        xs = preimage_sequence(spec, n_max)
        for n in range(2, n_max + 1):
            left = (1.0 + xs[n - 1]) / 2.0
            right = (1.0 + xs[n - 2]) / 2.0
            cells.append((n, left, right, right - left))
    for n, left, right, _ in cells:
        for q in np.linspace(0.25, 0.75, spot_checks):
            probe = left + q * (right - left)
            got = return_time(spec, probe)
            if got != n:
                raise PartitionConsistencyError(
                    f"cell r={n}: return_time({probe}) = {got}"
                )
    return ReturnPartition(tuple(cells))


def split_observable(
    obs: ObservableSpec, mu_y_estimate: float
) -> tuple[ObservableSpec, ObservableSpec]:
    """Split phi into a piecewise-constant part and a part vanishing at 0.

    phi0 = phi(0) - mu(Y)^{-1} phi(0) 1_Y has mean zero under any measure
    assigning mu_y_estimate to Y; phi_tilde = phi - phi0 then vanishes at the
    neutral fixed point exactly.
    """
    if not 0.0 < mu_y_estimate < 1.0:
        raise ValidationError(f"mu(Y) estimate must lie in (0,1), got {mu_y_estimate}")
    p0 = obs.phi_at_zero
    if p0 == 0.0:
        phi0 = ObservableSpec("const", (0.0,))
        return phi0, obs
    phi0 = ObservableSpec(
        "const",
        (0.0,),
        indicators=((p0, 0.0, 1.0), (-p0 / mu_y_estimate, Y_LEFT, 1.0)),
    )
    phi_tilde = replace(
        obs,
        indicators=obs.indicators
        + ((-p0, 0.0, 1.0), (p0 / mu_y_estimate, Y_LEFT, 1.0)),
    )
    return phi0, phi_tilde


# ---------------------------------------------------------------------------
# Vectorised ensemble engines
# ---------------------------------------------------------------------------

def sample_y_mu_like(
    spec: MapSpec,
    density,
    rng: np.random.Generator,
    size: int,
    burn_in: int = 64,
    max_extra: int = 1_000_000,
) -> np.ndarray:
    """Starting points in Y: density samples iterated past a burn-in, then
    run to their next entry into Y.

    Any absolutely continuous initial law works for the weak-limit suites;
    statistics that genuinely need the conditioned measure should average
    over consecutive excursions instead (see collect_excursions).
    """
    x = np.asarray(density.sample(rng, size=size), dtype=float)
    for _ in range(burn_in):
        x = step_array(spec, x)
    outside = x < Y_LEFT
    tries = 0
    while np.any(outside):
        x[outside] = step_array(spec, x[outside])
        outside = x < Y_LEFT
        tries += 1
        if tries > max_extra:
            raise ReturnTimeTruncated(float(x[outside][0]), max_extra)
    return x


def collect_excursions(
    spec: MapSpec,
    obs: ObservableSpec,
    ys: np.ndarray,
    per_member: int,
    discard_first: int = 0,
    cap: int = DEFAULT_CAP,
):
    """Consecutive excursions along each member orbit, flattened.

    Returns (r, Phi, PhiStar, member, truncated): flat arrays over all
    recorded excursions (pass-major, hence deterministic) plus the member
    index of each record; truncated counts members abandoned at the
    per-excursion cap, whose remaining excursions are excluded rather than
    clamped.
    """
    M = ys.size
    x = np.array(ys, dtype=float)
    target = per_member + discard_first
    count = np.zeros(M, dtype=np.int64)
    steps = np.zeros(M, dtype=np.int64)
    cum = np.zeros(M)
    run_max = np.zeros(M)
    run_min = np.zeros(M)
    fall = np.zeros(M)
    rise = np.zeros(M)
    alive = np.ones(M, dtype=bool)
    out_r, out_phi, out_star, out_idx = [], [], [], []
    truncated = 0

    while True:
        active = alive & (count < target)
        if not np.any(active):
            break
        phi_x = obs.evaluate(x)
        cum = np.where(active, cum + phi_x, cum)
        steps = np.where(active, steps + 1, steps)
        x = np.where(active, step_array(spec, x), x)
        run_max = np.where(active, np.maximum(run_max, cum), run_max)
        fall = np.where(active, np.maximum(fall, run_max - cum), fall)
        run_min = np.where(active, np.minimum(run_min, cum), run_min)
        rise = np.where(active, np.maximum(rise, cum - run_min), rise)

        over = active & (steps > cap)
        if np.any(over):
            truncated += int(np.count_nonzero(over))
            alive &= ~over
            active &= ~over

        done = active & (x >= Y_LEFT)
        if np.any(done):
            record = done & (count >= discard_first)
            if np.any(record):
                out_r.append(steps[record].copy())
                out_phi.append(cum[record].copy())
                out_star.append(np.minimum(fall, rise)[record].copy())
                out_idx.append(np.nonzero(record)[0])
            count[done] += 1
            steps[done] = 0
            cum[done] = 0.0
            run_max[done] = 0.0
            run_min[done] = 0.0
            fall[done] = 0.0
            rise[done] = 0.0

    r = np.concatenate(out_r) if out_r else np.empty(0, dtype=np.int64)
    phi = np.concatenate(out_phi) if out_phi else np.empty(0)
    star = np.concatenate(out_star) if out_star else np.empty(0)
    idx = np.concatenate(out_idx) if out_idx else np.empty(0, dtype=np.int64)
    return r, phi, star, idx, truncated


def phistar_running_max(
    spec: MapSpec,
    obs: ObservableSpec,
    ys: np.ndarray,
    checkpoints,
    cap: int = DEFAULT_CAP,
):
    """max_{0<=j<=n} PhiStar(F^j y) per member at each checkpoint n.

    Returns (result, truncated) with result of shape (len(checkpoints), M);
    truncated members carry NaN columns from their failure point on.
    """
    checks = np.asarray(sorted(checkpoints), dtype=np.int64)
    M = ys.size
    x = np.array(ys, dtype=float)
    count = np.zeros(M, dtype=np.int64)
    ptr = np.zeros(M, dtype=np.int64)
    steps = np.zeros(M, dtype=np.int64)
    cum = np.zeros(M)
    run_max = np.zeros(M)
    run_min = np.zeros(M)
    fall = np.zeros(M)
    rise = np.zeros(M)
    best = np.zeros(M)
    alive = np.ones(M, dtype=bool)
    result = np.full((checks.size, M), np.nan)
    truncated = 0

    while True:
        active = alive & (ptr < checks.size)
        if not np.any(active):
            break
        phi_x = obs.evaluate(x)
        cum = np.where(active, cum + phi_x, cum)
        steps = np.where(active, steps + 1, steps)
        x = np.where(active, step_array(spec, x), x)
        run_max = np.where(active, np.maximum(run_max, cum), run_max)
        fall = np.where(active, np.maximum(fall, run_max - cum), fall)
        run_min = np.where(active, np.minimum(run_min, cum), run_min)
        rise = np.where(active, np.maximum(rise, cum - run_min), rise)

        over = active & (steps > cap)
        if np.any(over):
            truncated += int(np.count_nonzero(over))
            alive &= ~over
            active &= ~over

        done = active & (x >= Y_LEFT)
        if np.any(done):
            best[done] = np.maximum(best[done], np.minimum(fall, rise)[done])
            hit = done & (count == checks[np.minimum(ptr, checks.size - 1)])
            while np.any(hit):
                result[ptr[hit], np.nonzero(hit)[0]] = best[hit]
                ptr[hit] += 1
                hit = hit & (ptr < checks.size) & (
                    count == checks[np.minimum(ptr, checks.size - 1)]
                )
            count[done] += 1
            steps[done] = 0
            cum[done] = 0.0
            run_max[done] = 0.0
            run_min[done] = 0.0
            fall[done] = 0.0
            rise[done] = 0.0

    return result, truncated


def induced_sums(
    spec: MapSpec,
    obs: ObservableSpec,
    ys: np.ndarray,
    n: int,
    track_absmax: bool = False,
    drift: float = 0.0,
    cap: int = DEFAULT_CAP,
):
    """Phi_n per member, optionally with max_{1<=j<=n} |Phi_j - j*drift|.

    The drift argument supports empirically centered statistics: with a
    nonzero estimated per-excursion mean the running maximum is taken of the
    drift-corrected partial sums (phi_n itself is returned uncorrected).
    Returns (phi_n, absmax, ok) where ok flags members that finished their
    n excursions under the cap; absmax is None unless requested.
    """
    M = ys.size
    x = np.array(ys, dtype=float)
    count = np.zeros(M, dtype=np.int64)
    steps = np.zeros(M, dtype=np.int64)
    total = np.zeros(M)
    cum = np.zeros(M)
    absmax = np.zeros(M) if track_absmax else None
    alive = np.ones(M, dtype=bool)

    while True:
        active = alive & (count < n)
        if not np.any(active):
            break
        phi_x = obs.evaluate(x)
        cum = np.where(active, cum + phi_x, cum)
        steps = np.where(active, steps + 1, steps)
        x = np.where(active, step_array(spec, x), x)

        over = active & (steps > cap)
        if np.any(over):
            alive &= ~over
            active &= ~over

        done = active & (x >= Y_LEFT)
        if np.any(done):
            total[done] += cum[done]
            count[done] += 1
            if track_absmax:
                centered = total[done] - count[done] * drift
                absmax[done] = np.maximum(absmax[done], np.abs(centered))
            steps[done] = 0
            cum[done] = 0.0

    ok = count >= n
    return total, absmax, ok


def birkhoff_ensemble(spec: MapSpec, obs: ObservableSpec, x0s: np.ndarray, n: int) -> np.ndarray:
    """phi_n for a whole array of starting points."""
    x = np.array(x0s, dtype=float)
    total = np.zeros_like(x)
    for _ in range(n):
        total += obs.evaluate(x)
        x = step_array(spec, x)
    return total


def birkhoff_running_stats(spec: MapSpec, obs: ObservableSpec, x0s: np.ndarray, n: int):
    """(phi_n, max_{0<=j<=n} phi_j, max_{j<n} |phi(f^j x)|) per member."""
    x = np.array(x0s, dtype=float)
    total = np.zeros_like(x)
    sup = np.zeros_like(x)
    max_abs = np.zeros_like(x)
    for _ in range(n):
        phi_x = obs.evaluate(x)
        max_abs = np.maximum(max_abs, np.abs(phi_x))
        total += phi_x
        sup = np.maximum(sup, total)
        x = step_array(spec, x)
    return total, sup, max_abs


def occupation_frequency(spec: MapSpec, x0s: np.ndarray, k: int) -> np.ndarray:
    """N_k / k per member: the occupation frequency of Y over k steps."""
    x = np.array(x0s, dtype=float)
    hits = np.zeros(x.size, dtype=np.int64)
    for _ in range(k):
        x = step_array(spec, x)
        hits += x >= Y_LEFT
    return hits / float(k)


def occupation_sup_error(spec: MapSpec, x0s: np.ndarray, k: int, T: float, mu_y: float) -> np.ndarray:
    """sup_{t<=T} |k^{-1} N_{floor(tk)} - t mu_y| per member, computed piecewise.

    The normalised lap process is constant between grid points, so the sup
    is attained at piece endpoints and can be folded without storing paths.
    """
    x = np.array(x0s, dtype=float)
    hits = np.zeros(x.size, dtype=np.int64)
    kT = int(math.floor(T * k))
    sup = np.abs(np.zeros(x.size) - 0.0)  # piece [0, 1/k): N_0 = 0
    sup = np.maximum(sup, mu_y / k)
    for ell in range(1, kT + 1):
        x = step_array(spec, x)
        hits += x >= Y_LEFT
        level = hits / float(k)
        t_lo = ell / k
        t_hi = min((ell + 1) / k, T)
        sup = np.maximum(sup, np.abs(level - t_lo * mu_y))
        sup = np.maximum(sup, np.abs(level - t_hi * mu_y))
    return sup
