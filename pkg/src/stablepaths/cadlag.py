"""Step paths on [0,T], completed graphs, and certified path metrics.

Both metrics are computed as certified brackets: a monotone decision
procedure "is the distance <= eps?" is wrapped in bisection until the
bracket width reaches the requested tolerance.

* The time-distortion metric (jumps must match individually) reduces, for
  step functions, to a feasibility search over order-preserving placements
  of one path's jump times inside eps-windows, compared pointwise against
  the other path's fixed jumps.  Coincident jump times of the two paths are
  allowed (the intermediate value is skipped at that instant); coincident
  jump times within one path are not, which is exactly why a single large
  jump stays far from two stacked half-jumps in this metric.

* The graph-matching metric is the monotone Frechet distance between the
  two completed graphs under max(|dt|, |dx|), computed by a free-space
  decision procedure over segment pairs.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ._freespace import frechet_decision
from .errors import ValidationError

__all__ = [
    "StepPath",
    "CompletedGraph",
    "MetricResult",
    "InfiniteMetricResult",
    "QuadConfig",
    "completed_graph",
    "uniform_distance",
    "j1_distance",
    "m1_distance",
    "dist_infinite",
    "restrict",
    "sup_functional",
    "max_jump",
]


# ---------------------------------------------------------------------------
# Step paths
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StepPath:
    """Right-continuous piecewise-constant path on [0, domain_end].

    ``values[i]`` is the value on [breakpoints[i], breakpoints[i+1]) and the
    path equals ``initial_value`` on [0, breakpoints[0]).
    """

    domain_end: float
    breakpoints: np.ndarray
    values: np.ndarray
    initial_value: float

    def __post_init__(self):
        bp = np.asarray(self.breakpoints, dtype=float)
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", vals)
        if not self.domain_end > 0.0:
            raise ValidationError(f"domain_end must be positive, got {self.domain_end}")
        if bp.size != vals.size:
            raise ValidationError("breakpoints and values must have equal length")
        if bp.size:
            if bp[0] <= 0.0 or bp[-1] > self.domain_end:
                raise ValidationError("breakpoints must lie in (0, domain_end]")
            if np.any(np.diff(bp) <= 0.0):
                raise ValidationError("breakpoints must be strictly increasing")
        if not (np.all(np.isfinite(vals)) and math.isfinite(self.initial_value)):
            raise ValidationError("path values must be finite")

    @classmethod
    def from_steps(cls, domain_end, times, values, initial_value, compress=True):
        """Build a path, optionally dropping zero-size jumps."""
        times = np.asarray(times, dtype=float)
        values = np.asarray(values, dtype=float)
        if compress and times.size:
            prev = np.concatenate(([initial_value], values[:-1]))
            keep = values != prev
            times, values = times[keep], values[keep]
        return cls(float(domain_end), times, values, float(initial_value))

    def _check_domain(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < 0.0) or np.any(t > self.domain_end):
            raise ValidationError("evaluation point outside [0, domain_end]")
        return t

    def evaluate(self, t):
        """g(t) with the right-continuous convention."""
        ts = self._check_domain(t)
        idx = np.searchsorted(self.breakpoints, ts, side="right") - 1
        full = np.concatenate(([self.initial_value], self.values))
        out = full[idx + 1]
        return float(out) if np.ndim(t) == 0 else out

    def left_limit(self, t):
        """g(t-); equals g(0) at t=0."""
        ts = self._check_domain(t)
        idx = np.searchsorted(self.breakpoints, ts, side="left") - 1
        full = np.concatenate(([self.initial_value], self.values))
        out = full[idx + 1]
        return float(out) if np.ndim(t) == 0 else out

    @property
    def jump_count(self) -> int:
        return int(self.breakpoints.size)

    def piece_values(self) -> np.ndarray:
        """All piece values including the initial one."""
        return np.concatenate(([self.initial_value], self.values))

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"{self.domain_end:.17g},{self.initial_value:.17g}\n")
        for t, v in zip(self.breakpoints, self.values):
            buf.write(f"{t:.17g},{v:.17g}\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "StepPath":
        lines = [ln for ln in text.strip().splitlines() if ln.strip()]
        if not lines:
            raise ValidationError("empty step-path CSV")
        try:
            head = lines[0].split(",")
            domain_end, initial = float(head[0]), float(head[1])
            rows = [ln.split(",") for ln in lines[1:]]
            times = np.array([float(r[0]) for r in rows])
            vals = np.array([float(r[1]) for r in rows])
        except (IndexError, ValueError) as exc:
            raise ValidationError(f"malformed step-path CSV: {exc}") from exc
        return cls(domain_end, times, vals, initial)


def sup_functional(g: StepPath) -> float:
    """sup over [0,T] of g (signed; every piece value is attained)."""
    return float(np.max(g.piece_values()))


def max_jump(g: StepPath) -> float:
    """Largest |g(t) - g(t-)| over the breakpoints."""
    if g.jump_count == 0:
        return 0.0
    return float(np.max(np.abs(np.diff(g.piece_values()))))


def restrict(g: StepPath, t1: float, t2: float) -> StepPath:
    """Restriction to [t1,t2], shifted to start at 0.

    The value at t1 is taken right-continuously, so a jump exactly at t1 is
    absorbed into the initial value.
    """
    if not (0.0 <= t1 < t2 <= g.domain_end):
        raise ValidationError(f"bad restriction interval [{t1}, {t2}]")
    keep = (g.breakpoints > t1) & (g.breakpoints <= t2)
    return StepPath(
        t2 - t1,
        g.breakpoints[keep] - t1,
        g.values[keep],
        g.evaluate(t1),
    )


# ---------------------------------------------------------------------------
# Completed graphs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CompletedGraph:
    """Axis-aligned polyline filling each jump with a vertical segment.

    ``vertices`` has shape (2m+2, 2) for a path with m jumps, traversed in
    graph order: alternating horizontal runs and vertical jump segments.
    """

    vertices: np.ndarray

    def contains(self, t: float, x: float, atol: float = 1e-12) -> bool:
        """Membership test against the defining interval [g(t-), g(t)]."""
        vt = self.vertices[:, 0]
        vx = self.vertices[:, 1]
        for i in range(len(vt) - 1):
            lo_t, hi_t = sorted((vt[i], vt[i + 1]))
            lo_x, hi_x = sorted((vx[i], vx[i + 1]))
            if lo_t - atol <= t <= hi_t + atol and lo_x - atol <= x <= hi_x + atol:
                return True
        return False


def completed_graph(g: StepPath) -> CompletedGraph:
    m = g.jump_count
    verts = np.empty((2 * m + 2, 2))
    verts[0] = (0.0, g.initial_value)
    prev = g.initial_value
    k = 1
    for t, v in zip(g.breakpoints, g.values):
        verts[k] = (t, prev)
        verts[k + 1] = (t, v)
        prev = v
        k += 2
    verts[k] = (g.domain_end, prev)
    return CompletedGraph(verts)


# ---------------------------------------------------------------------------
# Metric results and the uniform distance
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MetricResult:
    """Certified bracket: lower <= d <= upper with upper-lower <= tolerance."""

    lower: float
    upper: float
    tolerance: float

    def __post_init__(self):
        if not (0.0 <= self.lower <= self.upper):
            raise ValidationError("need 0 <= lower <= upper")
        if self.upper - self.lower > self.tolerance * (1 + 1e-9) + 1e-15:
            raise ValidationError("bracket wider than its tolerance")

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lower + self.upper)

    def to_json_dict(self) -> dict:
        return {"lower": self.lower, "upper": self.upper, "tolerance": self.tolerance}


def _merged_events(g1: StepPath, g2: StepPath) -> np.ndarray:
    return np.unique(np.concatenate(([0.0], g1.breakpoints, g2.breakpoints)))

def uniform_distance(g1: StepPath, g2: StepPath) -> float:
    """Exact sup-norm distance between two step paths on a common domain."""
    _require_same_domain(g1, g2)
    events = _merged_events(g1, g2)
    return float(np.max(np.abs(g1.evaluate(events) - g2.evaluate(events))))


def _require_same_domain(g1: StepPath, g2: StepPath):
    if g1.domain_end != g2.domain_end:
        raise ValidationError(
            f"paths live on different domains: {g1.domain_end} vs {g2.domain_end}"
        )


# ---------------------------------------------------------------------------
# Time-distortion metric (jump-alignment decision + bisection)
# ---------------------------------------------------------------------------

def _j1_feasible(s, v, t, w, T, eps) -> bool:
    """Decide whether some placement of g1's jumps within +-eps windows,
    order-preserving and compared pointwise against g2's fixed jumps, stays
    within eps.

    State (a, b, fl): a jumps of g1 and b of g2 have fired; fl records
    whether the cluster of events at the entry instant contains a g1 jump
    (two g1 jumps may never share an instant).  The set of feasible entry
    times of a state is maintained as a union of closed intervals; this
    computes feasibility in the closure, which is exactly "distance <= eps"
    for an infimum metric.
    """
    m, k = len(s), len(t)
    if abs(v[0] - w[0]) > eps or abs(v[m] - w[k]) > eps:
        return False

    def merged(intervals):
        intervals = sorted(intervals)
        out = []
        for lo, hi in intervals:
            if lo > hi:
                continue
            if out and lo <= out[-1][1]:
                out[-1] = (out[-1][0], max(out[-1][1], hi))
            else:
                out.append((lo, hi))
        return out

    # states[(a, b, fl)] -> list of disjoint closed intervals of entry times
    states = {(0, 0, 0): [(0.0, 0.0)]}
    for level in range(m + k):
        for a in range(max(0, level - k), min(level, m) + 1):
            b = level - a
            for fl in (0, 1):
                cur = states.get((a, b, fl))
                if not cur:
                    continue
                min_entry = cur[0][0]
                compat = abs(v[a] - w[b]) <= eps
                cap = t[b] if b < k else T
                if a < m:
                    wlo = max(s[a] - eps, 0.0)
                    whi = min(s[a] + eps, cap)
                    add = []
                    if compat:
                        lo = max(min_entry, wlo)
                        if lo <= whi:
                            add.append((lo, whi))
                    if fl == 0:
                        for lo, hi in cur:
                            lo2, hi2 = max(lo, wlo), min(hi, whi)
                            if lo2 <= hi2:
                                add.append((lo2, hi2))
                    if add:
                        key = (a + 1, b, 1)
                        states[key] = merged(states.get(key, []) + add)
                if b < k:
                    sigma = t[b]
                    if compat and min_entry < sigma:
                        key = (a, b + 1, 0)
                        states[key] = merged(states.get(key, []) + [(sigma, sigma)])
                    if any(lo <= sigma <= hi for lo, hi in cur):
                        key = (a, b + 1, fl)
                        states[key] = merged(states.get(key, []) + [(sigma, sigma)])
    return bool(states.get((m, k, 0)) or states.get((m, k, 1)))


def _bisect_metric(decision: Callable[[float], bool], hi0: float, tol: float) -> MetricResult:
    if tol <= 0:
        raise ValidationError("tol must be positive")
    hi = hi0 * (1.0 + 1e-12) + 1e-15
    if not decision(hi):
        raise AssertionError("decision procedure rejected its own upper bound")
    if decision(0.0):
        return MetricResult(0.0, 0.0, tol)
    lo = 0.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if decision(mid):
            # Monotonicity: feasibility at mid implies feasibility above it,
            # so the bracket invariant (lo infeasible, hi feasible) persists.
            hi = mid
        else:
            lo = mid
    return MetricResult(lo, hi, tol)


def j1_distance(g1: StepPath, g2: StepPath, tol: float = 1e-6) -> MetricResult:
    """Certified bracket around the time-distortion (jump-matching) metric."""
    _require_same_domain(g1, g2)
    if g1.jump_count == 0 and g2.jump_count == 0:
        d = abs(g1.initial_value - g2.initial_value)
        return MetricResult(d, d, tol)
    u = uniform_distance(g1, g2)
    if u == 0.0:
        return MetricResult(0.0, 0.0, tol)
    s = g1.breakpoints.tolist()
    v = g1.piece_values().tolist()
    t = g2.breakpoints.tolist()
    w = g2.piece_values().tolist()
    T = g1.domain_end

    return _bisect_metric(lambda eps: _j1_feasible(s, v, t, w, T, eps), u, tol)


# ---------------------------------------------------------------------------
# Graph-matching metric (free-space decision + bisection)
# ---------------------------------------------------------------------------

def m1_distance(g1: StepPath, g2: StepPath, tol: float = 1e-6) -> MetricResult:
    """Certified bracket around the graph-matching metric.

    Computed as the monotone Frechet distance between the completed graphs
    under max(|dt|, |dx|); stacked small jumps can merge into one large jump
    at no cost, which is the defining difference from the time-distortion
    metric.
    """
    _require_same_domain(g1, g2)
    if g1.jump_count == 0 and g2.jump_count == 0:
        d = abs(g1.initial_value - g2.initial_value)
        return MetricResult(d, d, tol)
    u = uniform_distance(g1, g2)
    if u == 0.0:
        return MetricResult(0.0, 0.0, tol)
    p = completed_graph(g1).vertices
    q = completed_graph(g2).vertices
    px, pv = np.ascontiguousarray(p[:, 0]), np.ascontiguousarray(p[:, 1])
    qx, qv = np.ascontiguousarray(q[:, 0]), np.ascontiguousarray(q[:, 1])

    return _bisect_metric(
        lambda eps: bool(frechet_decision(px, pv, qx, qv, eps)), u, tol
    )


# ---------------------------------------------------------------------------
# Infinite-horizon metric
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadConfig:
    """Quadrature parameters for the infinite-horizon metric."""

    t_max: float = 8.0
    panels: int = 16
    inner_tol: float = 1e-4

    def __post_init__(self):
        if self.t_max <= 0 or self.panels < 1 or self.inner_tol <= 0:
            raise ValidationError("invalid quadrature configuration")


@dataclass(frozen=True)
class InfiniteMetricResult:
    value: float
    uncertainty: float


def dist_infinite(
    g1: StepPath,
    g2: StepPath,
    metric_tag: str,
    quad: QuadConfig = QuadConfig(),
) -> InfiniteMetricResult:
    """Exponentially discounted integral of the truncated finite-T metric.

    Composite Simpson on [0, t_max]; the discarded tail contributes at most
    exp(-t_max) which is added to the reported uncertainty, together with the
    inner metric brackets and a trapezoid-vs-Simpson discrepancy estimate.
    """
    if metric_tag not in ("J1", "M1"):
        raise ValidationError(f"metric_tag must be 'J1' or 'M1', got {metric_tag!r}")
    if g1.domain_end < quad.t_max or g2.domain_end < quad.t_max:
        raise ValidationError("paths must be defined at least on [0, t_max]")
    metric = j1_distance if metric_tag == "J1" else m1_distance

    n_nodes = 2 * quad.panels + 1
    ts = np.linspace(0.0, quad.t_max, n_nodes)
    vals = np.empty(n_nodes)
    half_widths = np.empty(n_nodes)
    for i, tt in enumerate(ts):
        if tt == 0.0:
            d = abs(g1.evaluate(0.0) - g2.evaluate(0.0))
            vals[i] = min(1.0, d)
            half_widths[i] = 0.0
        else:
            res = metric(restrict(g1, 0.0, tt), restrict(g2, 0.0, tt), quad.inner_tol)
            vals[i] = min(1.0, res.midpoint)
            half_widths[i] = 0.5 * (res.upper - res.lower)
    weights = np.exp(-ts)
    f = weights * vals
    h = ts[1] - ts[0]
    simpson = h / 3.0 * (f[0] + f[-1] + 4.0 * f[1::2].sum() + 2.0 * f[2:-1:2].sum())
    trapezoid = h * (0.5 * f[0] + f[1:-1].sum() + 0.5 * f[-1])
    tail = math.exp(-quad.t_max)
    uncertainty = tail + abs(simpson - trapezoid) + float(
        np.sum(weights * half_widths) * h
    )
    return InfiniteMetricResult(float(simpson), float(uncertainty))
