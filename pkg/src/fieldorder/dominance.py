"""Pairwise dominance relations between points of a field.

Two points x, y are compared along the straight segment y_eps =
eps*x + (1-eps)*y (eps=0 is y, eps=1 is x).

Vector fields: x weakly dominates y when the projection of c never points
toward x along the segment, i.e. delta(eps) = (x - y) . c(y_eps) <= 0 for
all eps.  Strict dominance additionally needs a point with delta < 0.
Scalar fields: x weakly dominates y when g(eps) = f(y_eps) is nonincreasing
in eps; strict dominance additionally needs a net drop f(y) - f(x) > 0.

The "for all eps" quantifier is undecidable for black-box evaluators, so a
verdict is a certificate relative to a tolerance configuration: a uniform
eps grid, bisection refinement around sign changes, and a slack band tau
inside which values count as ties.  Both directions of a comparison are
decided from one sweep of the shared segment (the reverse relation sees
-delta, resp. the reversed profile), which makes antisymmetry structural.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionMismatchError
from .fields import ScalarField, VectorField, require_in_domain, segment_points

STRICTLY_DOMINATES = "StrictlyDominates"
WEAKLY_DOMINATES_NOT_STRICT = "WeaklyDominatesNotStrict"
INCOMPARABLE = "Incomparable"
REVERSE_STRICT = "ReverseStrict"
REVERSE_WEAK = "ReverseWeak"
EQUIVALENT = "Equivalent"

RELATIONS = frozenset({STRICTLY_DOMINATES, WEAKLY_DOMINATES_NOT_STRICT, INCOMPARABLE,
                       REVERSE_STRICT, REVERSE_WEAK, EQUIVALENT})

_FORWARD_WEAK = frozenset({STRICTLY_DOMINATES, WEAKLY_DOMINATES_NOT_STRICT, EQUIVALENT})
_REVERSE_WEAK = frozenset({REVERSE_STRICT, REVERSE_WEAK, EQUIVALENT})


@dataclass(frozen=True)
class ToleranceConfig:
    """Grid resolution and slack band for quantifier sweeps."""

    tau: float = 1e-9
    n_eps: int = 1025
    max_refine_depth: int = 20

    def __post_init__(self):
        if self.tau <= 0:
            raise ValueError("tau must be positive")
        if self.n_eps < 3:
            raise ValueError("n_eps must be at least 3")
        if self.max_refine_depth < 0:
            raise ValueError("max_refine_depth must be nonnegative")

    def to_dict(self) -> dict:
        return {"tau": self.tau, "n_eps": self.n_eps,
                "max_refine_depth": self.max_refine_depth}


@dataclass(frozen=True)
class DominanceVerdict:
    """Outcome of one pairwise comparison, with witnesses and the config used.

    max_delta/min_delta are the extreme decision statistics over the refined
    grid (vector: extremes of delta; scalar: largest consecutive rise and the
    more negative of largest consecutive drop and total change).
    """

    relation: str
    witness_eps_strict: float | None
    witness_eps_violation: tuple[float, ...] | None
    max_delta: float
    min_delta: float
    config: ToleranceConfig

    @property
    def forward_weak(self) -> bool:
        """True when the first point weakly dominates the second."""
        return self.relation in _FORWARD_WEAK

    @property
    def reverse_weak(self) -> bool:
        return self.relation in _REVERSE_WEAK

    def to_dict(self) -> dict:
        return {
            "relation": self.relation,
            "witness_eps_strict": self.witness_eps_strict,
            "witness_eps_violation": (list(self.witness_eps_violation)
                                      if self.witness_eps_violation is not None else None),
            "max_delta": self.max_delta,
            "min_delta": self.min_delta,
            "config": self.config.to_dict(),
        }


def _band_sign(v: np.ndarray, tau: float) -> np.ndarray:
    return (v > tau).astype(np.int8) - (v < -tau).astype(np.int8)


def _base_eps(cfg: ToleranceConfig, extra_eps: Iterable[float]) -> np.ndarray:
    eps = np.linspace(0.0, 1.0, cfg.n_eps)
    extra = np.asarray(list(extra_eps), float)
    if extra.size:
        if np.any((extra < 0) | (extra > 1)):
            raise ValueError("extra eps values must lie in [0, 1]")
        eps = np.unique(np.concatenate([eps, extra]))
    return eps


def _endpoints(field, x, y):
    x = require_in_domain(field.domain, x)
    y = require_in_domain(field.domain, y)
    if x.shape != y.shape:
        raise DimensionMismatchError("compared points differ in dimension")
    return x, y


def _insert(eps, vals, new_eps, new_vals):
    idx = np.searchsorted(eps, new_eps)
    return np.insert(eps, idx, new_eps), np.insert(vals, idx, new_vals)


def segment_profile(c: VectorField, x, y, cfg: ToleranceConfig | None = None,
                    extra_eps: Sequence[float] = ()) -> tuple[np.ndarray, np.ndarray]:
    """delta(eps) = (x - y) . c(eps*x + (1-eps)*y), refined near sign changes.

    Returns (eps, delta) sorted by eps; the grid is the uniform n_eps grid
    plus extra_eps plus bisection points wherever adjacent samples change
    sign outside the tau band.
    """
    cfg = cfg or ToleranceConfig()
    x, y = _endpoints(c, x, y)
    direction = x - y

    def delta_at(e: np.ndarray) -> np.ndarray:
        return c.values(segment_points(x, y, e)) @ direction

    eps = _base_eps(cfg, extra_eps)
    delta = delta_at(eps)
    for _ in range(cfg.max_refine_depth):
        s = _band_sign(delta, cfg.tau)
        flip = s[:-1] * s[1:] == -1
        if not flip.any():
            break
        mids = 0.5 * (eps[:-1][flip] + eps[1:][flip])
        eps, delta = _insert(eps, delta, mids, delta_at(mids))
    return eps, delta


def scalar_profile(f: ScalarField, x, y, cfg: ToleranceConfig | None = None,
                   extra_eps: Sequence[float] = ()) -> tuple[np.ndarray, np.ndarray]:
    """g(eps) = f(eps*x + (1-eps)*y), refined where monotonicity flips."""
    cfg = cfg or ToleranceConfig()
    x, y = _endpoints(f, x, y)

    def g_at(e: np.ndarray) -> np.ndarray:
        return f.values(segment_points(x, y, e))

    eps = _base_eps(cfg, extra_eps)
    g = g_at(eps)
    for _ in range(cfg.max_refine_depth):
        s = _band_sign(np.diff(g), cfg.tau)
        flip = s[:-1] * s[1:] == -1
        if not flip.any():
            break
        # an extremum hides near every flip: split both adjacent steps
        steps = np.unique(np.concatenate([np.flatnonzero(flip), np.flatnonzero(flip) + 1]))
        mids = 0.5 * (eps[steps] + eps[steps + 1])
        eps, g = _insert(eps, g, mids, g_at(mids))
    return eps, g


def _vector_verdict(eps: np.ndarray, delta: np.ndarray, cfg: ToleranceConfig) -> DominanceVerdict:
    imax, imin = int(np.argmax(delta)), int(np.argmin(delta))
    mx, mn = float(delta[imax]), float(delta[imin])
    fw = mx <= cfg.tau
    rw = mn >= -cfg.tau
    if fw and rw:
        return DominanceVerdict(EQUIVALENT, None, None, mx, mn, cfg)
    if fw:
        return DominanceVerdict(STRICTLY_DOMINATES, float(eps[imin]), None, mx, mn, cfg)
    if rw:
        return DominanceVerdict(REVERSE_STRICT, float(eps[imax]), None, mx, mn, cfg)
    return DominanceVerdict(INCOMPARABLE, None, (float(eps[imax]), float(eps[imin])),
                            mx, mn, cfg)


def compare_vector(c: VectorField, x, y, cfg: ToleranceConfig | None = None,
                   extra_eps: Sequence[float] = ()) -> DominanceVerdict:
    """Decide the dominance relation between x and y under the vector field c.

    StrictlyDominates means x strictly dominates y (delta <= tau everywhere
    with some delta < -tau); ReverseStrict is the mirror statement.  For
    vector fields the weak-not-strict labels cannot occur: weakness in both
    directions collapses the whole profile into the tau band, i.e.
    Equivalent.
    """
    cfg = cfg or ToleranceConfig()
    eps, delta = segment_profile(c, x, y, cfg, extra_eps)
    return _vector_verdict(eps, delta, cfg)


def _scalar_verdict(eps: np.ndarray, g: np.ndarray, cfg: ToleranceConfig) -> DominanceVerdict:
    d = np.diff(g)
    imax, imin = int(np.argmax(d)), int(np.argmin(d))
    step_max, step_min = float(d[imax]), float(d[imin])
    total = float(g[-1] - g[0])  # f(x) - f(y)
    fw = step_max <= cfg.tau
    rw = step_min >= -cfg.tau
    strict_f = fw and (-total > cfg.tau)
    strict_r = rw and (total > cfg.tau)
    mid = lambda i: float(0.5 * (eps[i] + eps[i + 1]))
    mx, mn = step_max, min(step_min, total)
    if strict_f:
        return DominanceVerdict(STRICTLY_DOMINATES, mid(imin), None, mx, mn, cfg)
    if strict_r:
        return DominanceVerdict(REVERSE_STRICT, mid(imax), None, mx, mn, cfg)
    if fw and rw:
        return DominanceVerdict(EQUIVALENT, None, None, mx, mn, cfg)
    if fw:
        return DominanceVerdict(WEAKLY_DOMINATES_NOT_STRICT, None, (mid(imin),), mx, mn, cfg)
    if rw:
        return DominanceVerdict(REVERSE_WEAK, None, (mid(imax),), mx, mn, cfg)
    return DominanceVerdict(INCOMPARABLE, None, (mid(imax), mid(imin)), mx, mn, cfg)


def compare_scalar(f: ScalarField, x, y, cfg: ToleranceConfig | None = None,
                   extra_eps: Sequence[float] = ()) -> DominanceVerdict:
    """Decide the dominance relation between x and y under the scalar field f.

    x weakly dominates y when every consecutive grid difference of g is at
    most tau (nonincreasing within slack); strictness additionally requires
    f(y) - f(x) > tau.  A nonincreasing profile fails to be nondecreasing
    exactly when it loses height overall, which is why the net drop decides
    strictness.
    """
    cfg = cfg or ToleranceConfig()
    eps, g = scalar_profile(f, x, y, cfg, extra_eps)
    return _scalar_verdict(eps, g, cfg)


# ---------------------------------------------------------------------------
# Vectorized screens over many pairs (uniform grid, no refinement)
# ---------------------------------------------------------------------------

def _broadcast_rows(xs, ys):
    xs = np.atleast_2d(np.asarray(xs, float))
    ys = np.atleast_2d(np.asarray(ys, float))
    k = max(xs.shape[0], ys.shape[0])
    if xs.shape[0] == 1:
        xs = np.broadcast_to(xs, (k, xs.shape[1]))
    if ys.shape[0] == 1:
        ys = np.broadcast_to(ys, (k, ys.shape[1]))
    if xs.shape != ys.shape:
        raise DimensionMismatchError("xs and ys rows do not broadcast")
    return xs, ys


def batch_vector_extremes(c: VectorField, xs, ys, cfg: ToleranceConfig,
                          chunk: int = 1 << 21) -> tuple[np.ndarray, np.ndarray]:
    """Rowwise (max, min) of delta(eps) = (x_k - y_k) . c(eps x_k + (1-eps) y_k).

    Uniform-grid screen without refinement.  Adding grid points can only
    grow the max and shrink the min, so any row with max > tau is already
    certified as not weakly dominating.
    """
    xs, ys = _broadcast_rows(xs, ys)
    k, dim = xs.shape
    eps = np.linspace(0.0, 1.0, cfg.n_eps)
    e = eps.size
    rows_per_block = max(1, chunk // e)
    out_max, out_min = np.empty(k), np.empty(k)
    for s in range(0, k, rows_per_block):
        xb, yb = xs[s:s + rows_per_block], ys[s:s + rows_per_block]
        pts = eps[None, :, None] * xb[:, None, :] + (1.0 - eps)[None, :, None] * yb[:, None, :]
        vals = c.values(pts.reshape(-1, dim)).reshape(xb.shape[0], e, dim)
        delta = np.einsum("kd,ked->ke", xb - yb, vals)
        out_max[s:s + rows_per_block] = delta.max(axis=1)
        out_min[s:s + rows_per_block] = delta.min(axis=1)
    return out_max, out_min


def batch_scalar_steps(f: ScalarField, xs, ys, cfg: ToleranceConfig,
                       chunk: int = 1 << 21) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Rowwise (max step, min step, total change) of g(eps) = f(eps x + (1-eps) y)."""
    xs, ys = _broadcast_rows(xs, ys)
    k, dim = xs.shape
    eps = np.linspace(0.0, 1.0, cfg.n_eps)
    e = eps.size
    rows_per_block = max(1, chunk // e)
    smax, smin, total = np.empty(k), np.empty(k), np.empty(k)
    for s in range(0, k, rows_per_block):
        xb, yb = xs[s:s + rows_per_block], ys[s:s + rows_per_block]
        pts = eps[None, :, None] * xb[:, None, :] + (1.0 - eps)[None, :, None] * yb[:, None, :]
        g = f.values(pts.reshape(-1, dim)).reshape(xb.shape[0], e)
        d = np.diff(g, axis=1)
        smax[s:s + rows_per_block] = d.max(axis=1)
        smin[s:s + rows_per_block] = d.min(axis=1)
        total[s:s + rows_per_block] = g[:, -1] - g[:, 0]
    return smax, smin, total
