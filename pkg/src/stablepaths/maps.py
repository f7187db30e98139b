"""Interval dynamics: the intermittent map family, observables, densities.

The map on [0,1] has a neutral fixed point at 0 (left branch tangent to the
identity) and a uniformly expanding right branch:

    f(x) = x * (1 + (2x)^gamma)   for x in [0, 1/2]
    f(x) = 2x - 1                 for x in (1/2, 1]

The left branch is written with ``(2x)^gamma`` rather than ``2^gamma * x^gamma``
so that f(1/2) = 1 holds exactly in floating point.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterator

import numpy as np

from .errors import DomainError, ValidationError

_HALF = 0.5


# ---------------------------------------------------------------------------
# Map specification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MapSpec:
    """Parameters of the interval map. Only the "LSV" family is shipped."""

    gamma: float
    kind: str = "LSV"

    def __post_init__(self):
        if self.kind != "LSV":
            raise ValidationError(f"unknown map kind {self.kind!r}")
        if not 0.0 < self.gamma < 1.0:
            raise ValidationError(f"gamma must lie in (0,1), got {self.gamma}")

    @property
    def alpha(self) -> float:
        """Tail exponent 1/gamma of the associated stable regime."""
        return 1.0 / self.gamma


def step_array(spec: MapSpec, x: np.ndarray) -> np.ndarray:
    """Vectorised map application for ensembles (no domain check).

    This is the canonical orbit arithmetic: numpy's array power kernel can
    differ from the scalar libm power in the last ulp, which chaos amplifies
    into diverging orbits, so every operation that follows a specific orbit
    goes through this function (scalars ride along as 1-element arrays).
    """
    left = x * (1.0 + (2.0 * x) ** spec.gamma)
    return np.where(x <= _HALF, left, 2.0 * x - 1.0)


def lsv_map(spec: MapSpec, x: float) -> float:
    """One application of the map. Raises DomainError outside [0,1]."""
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"x must lie in [0,1], got {x}")
    return float(step_array(spec, np.array([x]))[0])


def iterate_orbit(spec: MapSpec, x0: float, n: int) -> Iterator[float]:
    """Yield x0, f(x0), ..., f^{n-1}(x0) lazily.

    Consumers may fold over the stream without materialising the orbit.
    """
    if not 0.0 <= x0 <= 1.0:
        raise DomainError(f"x0 must lie in [0,1], got {x0}")
    buf = np.array([x0])
    for _ in range(max(0, int(n))):
        yield float(buf[0])
        buf = step_array(spec, buf)


def orbit_array(spec: MapSpec, x0: float, n: int) -> np.ndarray:
    """Materialised orbit [x0, ..., f^{n-1}(x0)] as a float array."""
    out = np.empty(int(n))
    for i, x in enumerate(iterate_orbit(spec, x0, n)):
        out[i] = x
    return out


# ---------------------------------------------------------------------------
# Observables
# ---------------------------------------------------------------------------

_FAMILIES = ("const", "affine", "power")


@dataclass(frozen=True)
class ObservableSpec:
    """An observable phi built from one smooth family plus indicator terms.

    family/params:
        "const":  (a,)            phi(x) = a
        "affine": (a, b)          phi(x) = a + b*x
        "power":  (a, b, eta)     phi(x) = a + b*x^eta, eta in (0, 1]
    indicators:
        tuple of (coef, lo, hi); each adds coef * 1_{[lo,hi]}(x).
    centering_offset:
        subtracted from the raw expression so the effective observable has
        (empirical) mean zero under the invariant measure.
    calibration:
        metadata describing how centering_offset was estimated.
    """

    family: str
    params: tuple
    indicators: tuple = ()
    centering_offset: float = 0.0
    calibration: dict | None = None

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise ValidationError(f"unknown observable family {self.family!r}")
        want = {"const": 1, "affine": 2, "power": 3}[self.family]
        if len(self.params) != want:
            raise ValidationError(
                f"family {self.family!r} takes {want} parameters, got {len(self.params)}"
            )
        if self.family == "power":
            eta = self.params[2]
            if not 0.0 < eta <= 1.0:
                raise ValidationError(f"power exponent must lie in (0,1], got {eta}")
        for ind in self.indicators:
            if len(ind) != 3 or not (0.0 <= ind[1] <= ind[2] <= 1.0):
                raise ValidationError(f"bad indicator term {ind!r}")

    # -- evaluation -------------------------------------------------------

    def _smooth(self, x):
        if self.family == "const":
            return np.full_like(np.asarray(x, dtype=float), self.params[0])
        if self.family == "affine":
            a, b = self.params
            return a + b * np.asarray(x, dtype=float)
        a, b, eta = self.params
        return a + b * np.asarray(x, dtype=float) ** eta

    def evaluate_raw(self, x):
        """Uncentered expression, vectorised over x."""
        xs = np.asarray(x, dtype=float)
        out = self._smooth(xs)
        for coef, lo, hi in self.indicators:
            out = out + coef * ((xs >= lo) & (xs <= hi))
        if np.ndim(x) == 0:
            return float(out)
        return out

    def evaluate(self, x):
        """Centered observable.

        The offset is subtracted from the smooth part before indicator terms
        are added, so observables built to vanish at a point do so exactly in
        floating point.
        """
        xs = np.asarray(x, dtype=float)
        out = self._smooth(xs) - self.centering_offset
        for coef, lo, hi in self.indicators:
            out = out + coef * ((xs >= lo) & (xs <= hi))
        if np.ndim(x) == 0:
            return float(out)
        return out

    @property
    def value_at_zero(self) -> float:
        """Raw expression at 0, before centering."""
        return float(self.evaluate_raw(0.0))

    @property
    def phi_at_zero(self) -> float:
        """Centered value at the neutral fixed point."""
        return self.value_at_zero - self.centering_offset

    @property
    def holder_eta(self) -> float:
        """Holder exponent of the smooth part (indicators are piecewise constant)."""
        return float(self.params[2]) if self.family == "power" else 1.0

    def sup_abs(self) -> float:
        """Exact sup over [0,1] of |centered phi|.

        The smooth part is monotone and indicators are constant between
        breakpoints, so the sup is attained on the finite candidate set of
        piece endpoints and exact breakpoints.
        """
        bps = sorted({0.0, 1.0} | {b for _, lo, hi in self.indicators for b in (lo, hi)})
        best = 0.0
        for i in range(len(bps) - 1):
            a, b = bps[i], bps[i + 1]
            const = sum(
                coef for coef, lo, hi in self.indicators if lo <= a and b <= hi
            )
            for endpoint in (a, b):
                v = float(self._smooth(endpoint)) - self.centering_offset + const
                best = max(best, abs(v))
        for bp in bps:
            best = max(best, abs(self.evaluate(bp)))
        return best

    def first_positive_interval(self) -> float:
        """Largest eps such that the centered phi stays > 0 on [0, eps).

        Requires phi_at_zero > 0.  Located by scan plus bisection on the
        piecewise-monotone structure; returns 1.0 if phi > 0 on all of [0,1].
        """
        if self.phi_at_zero <= 0.0:
            raise DomainError("first_positive_interval needs phi(0) > 0")
        grid = np.linspace(0.0, 1.0, 8193)
        vals = self.evaluate(grid)
        bad = np.nonzero(vals <= 0.0)[0]
        if bad.size == 0:
            return 1.0
        j = int(bad[0])
        lo, hi = grid[j - 1], grid[j]
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            if self.evaluate(mid) > 0.0:
                lo = mid
            else:
                hi = mid
        return lo

    def with_offset(self, offset: float, calibration: dict | None = None) -> "ObservableSpec":
        return replace(self, centering_offset=float(offset), calibration=calibration)


def calibrate_centering(
    spec: MapSpec,
    obs: ObservableSpec,
    orbit_length: int = 2_000_000,
    burn_in: int = 10_000,
    x0: float = 0.37,
) -> ObservableSpec:
    """Estimate the mean of the raw observable along one long orbit.

    The invariant measure has no closed form, so mean-zero centering is done
    empirically; the calibration parameters are recorded on the returned spec
    for reproducibility.

    The calibration orbit is self-contained (only its average leaves this
    function), so it uses fast scalar arithmetic rather than the canonical
    array stepping.
    """
    gamma = spec.gamma
    x = x0
    for _ in range(burn_in):
        x = x * (1.0 + (2.0 * x) ** gamma) if x <= _HALF else 2.0 * x - 1.0
    total = 0.0
    chunk = np.empty(65536)
    done = 0
    while done < orbit_length:
        m = min(65536, orbit_length - done)
        for i in range(m):
            chunk[i] = x
            x = x * (1.0 + (2.0 * x) ** gamma) if x <= _HALF else 2.0 * x - 1.0
        total += float(np.sum(obs.evaluate_raw(chunk[:m])))
        done += m
    offset = total / orbit_length
    meta = {"orbit_length": orbit_length, "burn_in": burn_in, "x0": x0}
    return obs.with_offset(offset, calibration=meta)


def birkhoff_sum(spec: MapSpec, obs: ObservableSpec, x0: float, n: int) -> float:
    """phi_n(x0) = sum_{j<n} phi(f^j x0) with the centered observable."""
    total = 0.0
    for x in iterate_orbit(spec, x0, n):
        total += obs.evaluate(x)
    return total


# ---------------------------------------------------------------------------
# Initial densities
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DensitySpec:
    """An initial law on [0,1], absolutely continuous families only.

    "uniform":    params ()
    "polynomial": params (c0, c1, ..., cd), density sum c_i x^i
    "histogram":  params (e0, ..., ek, m1, ..., mk), k+1 edges then k masses
    """

    family: str
    params: tuple = ()

    def __post_init__(self):
        if self.family == "uniform":
            if self.params:
                raise ValidationError("uniform density takes no parameters")
        elif self.family == "polynomial":
            coeffs = np.asarray(self.params, dtype=float)
            if coeffs.size == 0:
                raise ValidationError("polynomial density needs coefficients")
            total = sum(c / (i + 1) for i, c in enumerate(coeffs))
            if abs(total - 1.0) > 1e-9:
                raise ValidationError(f"polynomial density integrates to {total}, not 1")
            grid = np.linspace(0.0, 1.0, 2049)
            if np.min(np.polyval(coeffs[::-1], grid)) < -1e-12:
                raise ValidationError("polynomial density is negative on [0,1]")
        elif self.family == "histogram":
            k2 = len(self.params)
            if k2 < 3 or k2 % 2 == 0:
                raise ValidationError("histogram params must be k+1 edges then k masses")
            k = (k2 - 1) // 2
            edges = np.asarray(self.params[: k + 1], dtype=float)
            masses = np.asarray(self.params[k + 1 :], dtype=float)
            if edges[0] != 0.0 or edges[-1] != 1.0 or np.any(np.diff(edges) <= 0):
                raise ValidationError("histogram edges must increase from 0 to 1")
            if np.any(masses < 0) or abs(masses.sum() - 1.0) > 1e-9:
                raise ValidationError("histogram masses must be nonnegative and sum to 1")
        else:
            raise ValidationError(f"unknown density family {self.family!r}")

    def cdf(self, x):
        xs = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
        if self.family == "uniform":
            out = xs
        elif self.family == "polynomial":
            coeffs = np.asarray(self.params, dtype=float)
            integ = np.concatenate(([0.0], coeffs / (np.arange(coeffs.size) + 1)))
            out = np.polyval(integ[::-1], xs)
        else:
            k = (len(self.params) - 1) // 2
            edges = np.asarray(self.params[: k + 1], dtype=float)
            masses = np.asarray(self.params[k + 1 :], dtype=float)
            cum = np.concatenate(([0.0], np.cumsum(masses)))
            idx = np.clip(np.searchsorted(edges, xs, side="right") - 1, 0, k - 1)
            width = edges[idx + 1] - edges[idx]
            out = cum[idx] + masses[idx] * (xs - edges[idx]) / width
        return out if np.ndim(x) else float(out)

    def sample(self, rng: np.random.Generator, size=None):
        """Inverse-CDF sampling; deterministic under the generator state."""
        u = rng.random(size if size is not None else ())
        if self.family == "uniform":
            out = u
        elif self.family == "polynomial":
            out = _invert_monotone(self.cdf, np.atleast_1d(u))
            if size is None:
                out = float(out[0])
        else:
            k = (len(self.params) - 1) // 2
            edges = np.asarray(self.params[: k + 1], dtype=float)
            masses = np.asarray(self.params[k + 1 :], dtype=float)
            cum = np.concatenate(([0.0], np.cumsum(masses)))
            cum[-1] = 1.0
            uu = np.atleast_1d(u)
            idx = np.clip(np.searchsorted(cum, uu, side="right") - 1, 0, k - 1)
            frac = (uu - cum[idx]) / np.where(masses[idx] > 0, masses[idx], 1.0)
            out = edges[idx] + frac * (edges[idx + 1] - edges[idx])
            if size is None:
                out = float(out[0])
        if size is None and not np.isscalar(out):
            out = float(out)
        return out


def _invert_monotone(cdf, u: np.ndarray, iters: int = 60) -> np.ndarray:
    lo = np.zeros_like(u)
    hi = np.ones_like(u)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        below = cdf(mid) < u
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return 0.5 * (lo + hi)


def sample_initial(density: DensitySpec, rng: np.random.Generator, size=None):
    """Draw from the initial density (thin wrapper kept for discoverability)."""
    return density.sample(rng, size=size)


# ---------------------------------------------------------------------------
# Invariant density estimation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DensityEstimate:
    """Histogram estimate of the invariant density from one long orbit."""

    bin_edges: np.ndarray
    masses: np.ndarray
    sample_count: int
    quality_warning: bool = False
    metadata: dict = field(default_factory=dict)

    def h_at(self, x: float) -> float:
        """Point density query: mass / width of the containing bin."""
        if not 0.0 <= x <= 1.0:
            raise DomainError(f"x must lie in [0,1], got {x}")
        i = int(np.clip(np.searchsorted(self.bin_edges, x, side="right") - 1,
                        0, self.masses.size - 1))
        return float(self.masses[i] / (self.bin_edges[i + 1] - self.bin_edges[i]))

    @property
    def h_half(self) -> float:
        return self.h_at(0.5)

    def to_csv(self) -> str:
        lines = ["bin_left,bin_right,mass"]
        for i in range(self.masses.size):
            lines.append(
                f"{self.bin_edges[i]:.17g},{self.bin_edges[i+1]:.17g},{self.masses[i]:.17g}"
            )
        return "\n".join(lines) + "\n"


def estimate_invariant_density(
    spec: MapSpec,
    n: int,
    bins: int,
    burn_in: int,
    rng: np.random.Generator,
    x0: float | None = None,
) -> DensityEstimate:
    """Occupation histogram of one long orbit after burn-in.

    The orbit start is drawn uniformly unless x0 is given.  A quality flag is
    raised when the orbit is too short relative to the bin count for the
    histogram to be statistically meaningful.  As in calibrate_centering the
    orbit is self-contained, so the loop uses fast scalar arithmetic.
    """
    if x0 is None:
        x0 = float(rng.random())
    gamma = spec.gamma
    x = x0
    for _ in range(burn_in):
        x = x * (1.0 + (2.0 * x) ** gamma) if x <= _HALF else 2.0 * x - 1.0

    edges = np.linspace(0.0, 1.0, bins + 1)
    counts = np.zeros(bins, dtype=np.int64)
    chunk = np.empty(65536)
    done = 0
    while done < n:
        m = min(65536, n - done)
        for i in range(m):
            chunk[i] = x
            x = x * (1.0 + (2.0 * x) ** gamma) if x <= _HALF else 2.0 * x - 1.0
        counts += np.histogram(chunk[:m], bins=edges)[0]
        done += m

    masses = counts / float(n)
    warn = n < 100 * bins
    meta = {"burn_in": burn_in, "x0": x0, "bins": bins, "orbit_length": n}
    return DensityEstimate(edges, masses, n, quality_warning=warn, metadata=meta)


# ---------------------------------------------------------------------------
# Neutral-branch preimages
# ---------------------------------------------------------------------------

def preimage_sequence(spec: MapSpec, k: int) -> np.ndarray:
    """The chain x_1 = 1/2, f(x_n) = x_{n-1} on the left branch.

    Each x_n is found by bisection on [0, x_{n-1}] followed by Newton polish;
    the left branch is strictly increasing so the bracket is guaranteed.
    """
    if k < 1:
        raise DomainError("k must be at least 1")
    gamma = spec.gamma

    def f_left(x):
        return x * (1.0 + (2.0 * x) ** gamma)

    def df_left(x):
        return 1.0 + (1.0 + gamma) * (2.0 * x) ** gamma

    out = np.empty(k)
    out[0] = _HALF
    target = _HALF
    for n in range(1, k):
        lo, hi = 0.0, target
        for _ in range(90):
            mid = 0.5 * (lo + hi)
            if f_left(mid) < target:
                lo = mid
            else:
                hi = mid
        x = 0.5 * (lo + hi)
        for _ in range(4):
            x = x - (f_left(x) - target) / df_left(x)
            x = min(max(x, lo), hi)
        if abs(f_left(x) - target) > 1e-13:
            from .errors import NumericError

            raise NumericError(f"preimage root-finding stalled at n={n + 1}")
        out[n] = x
        target = x
    return out
