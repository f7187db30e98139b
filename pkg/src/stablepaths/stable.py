"""Totally skewed alpha-stable laws with exponent in (1,2).

The characteristic function is

    E exp(itG) = exp{ -c |t|^alpha (1 - i * skew_sign * sgn(t) * tan(alpha pi/2)) }

which matches the conventional S(alpha, beta, sigma, delta) parametrization
(the one continuous in t at delta = 0, often called S1) with

    beta = skew_sign,  sigma = c^(1/alpha),  delta = 0.

That identification is what lets the standard trigonometric sampler be used:
a unit-scale variate is generated by the Chambers-Mallows-Stuck transform and
multiplied by c^(1/alpha).  For alpha > 1 the law has mean delta = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gamma as _gamma_func

from .cadlag import StepPath
from .errors import DomainError, ValidationError

__all__ = [
    "StableLaw",
    "LevyPathConfig",
    "from_lsv_params",
    "cf",
    "sample",
    "cdf",
    "sample_levy_path",
    "rescale_full_system",
]


@dataclass(frozen=True)
class StableLaw:
    alpha: float
    c: float
    skew_sign: int

    def __post_init__(self):
        if not 1.0 < self.alpha < 2.0:
            raise DomainError(f"alpha must lie in (1,2), got {self.alpha}")
        if not self.c > 0.0:
            raise DomainError(f"scale constant must be positive, got {self.c}")
        if self.skew_sign not in (-1, 1):
            raise DomainError(f"skew_sign must be -1 or +1, got {self.skew_sign}")

    @property
    def sigma(self) -> float:
        """Scale in the conventional parametrization: c^(1/alpha)."""
        return self.c ** (1.0 / self.alpha)

    def to_json_dict(self) -> dict:
        return {"alpha": self.alpha, "c": self.c, "skew_sign": self.skew_sign}


def from_lsv_params(gamma: float, phi_at_zero: float, h_half: float) -> StableLaw:
    """Stable law of the normalised Birkhoff sums for the map family.

    c = (1/4) h(1/2) (alpha |phi(0)|)^alpha Gamma(1-alpha) cos(alpha pi/2),
    alpha = 1/gamma.  On (1,2) both Gamma(1-alpha) and cos(alpha pi/2) are
    negative, so c is positive.
    """
    if not 0.5 < gamma < 1.0:
        raise DomainError(f"gamma must lie in (1/2, 1), got {gamma}")
    if phi_at_zero == 0.0:
        raise DomainError("phi(0) must be nonzero for the stable regime")
    if not h_half > 0.0:
        raise DomainError(f"h(1/2) must be positive, got {h_half}")
    alpha = 1.0 / gamma
    c = (
        0.25
        * h_half
        * (alpha * abs(phi_at_zero)) ** alpha
        * _gamma_func(1.0 - alpha)
        * math.cos(alpha * math.pi / 2.0)
    )
    if not c > 0.0:
        raise AssertionError(f"scale constant came out nonpositive: {c}")
    return StableLaw(alpha=alpha, c=float(c), skew_sign=1 if phi_at_zero > 0 else -1)


def cf(law: StableLaw, t):
    """Characteristic function, vectorised over t."""
    ts = np.asarray(t, dtype=float)
    mag = law.c * np.abs(ts) ** law.alpha
    skew = law.skew_sign * np.sign(ts) * math.tan(law.alpha * math.pi / 2.0)
    out = np.exp(-mag * (1.0 - 1j * skew))
    return complex(out) if np.ndim(t) == 0 else out


def sample(law: StableLaw, rng: np.random.Generator, size=None):
    """Chambers-Mallows-Stuck variates of the law (see module docstring)."""
    shape = () if size is None else size
    u = rng.uniform(-math.pi / 2.0, math.pi / 2.0, shape)
    e = rng.exponential(1.0, shape)
    a = law.alpha
    beta = float(law.skew_sign)
    tan_half = math.tan(a * math.pi / 2.0)
    b0 = math.atan(beta * tan_half) / a
    s0 = (1.0 + beta * beta * tan_half * tan_half) ** (1.0 / (2.0 * a))
    x = (
        s0
        * np.sin(a * (u + b0))
        / np.cos(u) ** (1.0 / a)
        * (np.cos(u - a * (u + b0)) / e) ** ((1.0 - a) / a)
    )
    out = law.sigma * x
    return float(out) if size is None else out


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)


def cdf(law: StableLaw, x, tol: float = 1e-6):
    """Distribution function by oscillatory inversion of the CF.

    Gil-Pelaez form: F(x) = 1/2 - (1/pi) Int_0^inf Im(e^{-itx} cf(t)) / t dt.
    The integrand decays like exp(-c t^alpha); truncation where that factor
    falls below tol/10 keeps the tail under tol, and panel counts scale with
    the oscillation frequency |x| * t_max so fixed-order Gauss panels resolve
    every period.
    """
    if tol <= 0:
        raise ValidationError("tol must be positive")
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    u0 = math.log(10.0 / tol)
    t_max = (u0 / law.c) ** (1.0 / law.alpha)

    order = np.argsort(np.abs(xs))
    out = np.empty_like(xs)
    pos = 0
    while pos < xs.size:
        hi = min(pos + 512, xs.size)
        idx = order[pos:hi]
        chunk = xs[idx]
        max_abs = float(np.max(np.abs(chunk)))
        panels = max(48, int(math.ceil(max_abs * t_max / math.pi)) + 16)
        nodes_per = panels * _GL_NODES.size
        # cap the work matrix at ~2M entries
        max_chunk = max(1, (1 << 21) // nodes_per)
        for lo2 in range(0, chunk.size, max_chunk):
            sub = chunk[lo2 : lo2 + max_chunk]
            edges = np.linspace(0.0, t_max, panels + 1)
            half = 0.5 * (edges[1:] - edges[:-1])
            mid = 0.5 * (edges[1:] + edges[:-1])
            t_nodes = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
            w_nodes = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
            phi_t = cf(law, t_nodes)
            osc = np.exp(-1j * np.outer(sub, t_nodes)) * phi_t[None, :]
            integrand = osc.imag / t_nodes[None, :]
            integral = integrand @ w_nodes
            vals = 0.5 - integral / math.pi
            out[idx[lo2 : lo2 + max_chunk]] = vals
        pos = hi
    out = np.clip(out, 0.0, 1.0)
    return float(out[0]) if np.ndim(x) == 0 else out


@dataclass(frozen=True)
class LevyPathConfig:
    """Grid synthesis parameters for stable Levy paths."""

    T: float
    grid_step: float
    seed: int | None = None

    def __post_init__(self):
        if self.grid_step <= 0 or self.T <= 0:
            raise ValidationError("T and grid_step must be positive")
        n = round(self.T / self.grid_step)
        if n < 1 or abs(n * self.grid_step - self.T) > 1e-9 * self.T:
            raise ValidationError("grid_step must divide T up to rounding")

    @property
    def n_steps(self) -> int:
        return int(round(self.T / self.grid_step))


def sample_levy_path(law: StableLaw, config: LevyPathConfig, rng: np.random.Generator) -> StepPath:
    """Path with i.i.d. increments distributed as grid_step^(1/alpha) * G.

    Stationary independent increments on the grid; the marginal at time t on
    the grid is distributed as t^(1/alpha) * G by stability.
    """
    n = config.n_steps
    incs = config.grid_step ** (1.0 / law.alpha) * sample(law, rng, size=n)
    values = np.cumsum(incs)
    grid = np.arange(1, n + 1) * config.grid_step
    grid[-1] = config.T
    return StepPath(config.T, grid, values, 0.0)


def rescale_full_system(law: StableLaw, mean_return: float) -> StableLaw:
    """Law of (mean_return)^(-1/alpha) * G, i.e. c -> c / mean_return."""
    if not mean_return > 0.0:
        raise DomainError(f"mean_return must be positive, got {mean_return}")
    return StableLaw(law.alpha, law.c / mean_return, law.skew_sign)
