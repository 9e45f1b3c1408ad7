"""Domains, points, and evaluatable fields.

Points are plain 1-D float64 numpy arrays (``as_point`` validates and
freezes them).  Domains are closed convex sets of three kinds: axis-aligned
boxes, mass simplexes ``{x >= 0, sum(x) = mass}``, and products of
simplexes.  Scalar and vector fields wrap deterministic evaluators over a
domain; every built-in field also carries a batch evaluator so that sweep
code can evaluate thousands of segment points in one numpy call.

All objects are immutable after construction and all operations are pure,
so everything here is safe to call concurrently.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

from .errors import DimensionMismatchError, DomainViolationError

CONTAINMENT_TOL = 1e-12


def as_point(coords) -> np.ndarray:
    """Validate coords as a finite 1-D point and return a frozen copy."""
    p = np.atleast_1d(np.asarray(coords, dtype=np.float64)).copy()
    if p.ndim != 1 or p.size == 0:
        raise DimensionMismatchError(f"point must be a nonempty 1-D vector, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise ValueError(f"point has non-finite coordinates: {p}")
    p.setflags(write=False)
    return p


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.float64)
    a.setflags(write=False)
    return a


# ---------------------------------------------------------------------------
# Domains
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Box:
    """Axis-aligned box [lower, upper], closed and convex."""

    lower: tuple[float, ...]
    upper: tuple[float, ...]

    def __post_init__(self):
        lo, up = np.asarray(self.lower, float), np.asarray(self.upper, float)
        if lo.shape != up.shape or lo.ndim != 1:
            raise DimensionMismatchError("box bounds must be 1-D and of equal length")
        if not np.all(lo <= up):
            raise ValueError("box requires lower <= upper componentwise")

    @property
    def dim(self) -> int:
        return len(self.lower)

    def contains(self, p, tol: float = CONTAINMENT_TOL) -> bool:
        p = np.asarray(p, float)
        lo, up = np.asarray(self.lower), np.asarray(self.upper)
        return p.shape == lo.shape and bool(np.all(p >= lo - tol) and np.all(p <= up + tol))

    def clip(self, p: np.ndarray) -> np.ndarray:
        return np.clip(p, np.asarray(self.lower), np.asarray(self.upper))

    def diameter(self) -> float:
        return float(np.linalg.norm(np.asarray(self.upper) - np.asarray(self.lower)))


@dataclass(frozen=True)
class Simplex:
    """The set {x in R^dim : x >= 0, sum(x) = mass}."""

    mass: float
    dim: int

    def __post_init__(self):
        if self.mass <= 0:
            raise ValueError("simplex mass must be positive")
        if self.dim < 1:
            raise ValueError("simplex dim must be >= 1")

    def contains(self, p, tol: float = CONTAINMENT_TOL) -> bool:
        p = np.asarray(p, float)
        if p.shape != (self.dim,):
            return False
        return bool(np.all(p >= -tol) and abs(float(p.sum()) - self.mass) <= tol)

    def diameter(self) -> float:
        # distance between two vertices
        return self.mass * math.sqrt(2.0) if self.dim > 1 else 0.0

    def vertices(self) -> np.ndarray:
        return self.mass * np.eye(self.dim)

    def barycenter(self) -> np.ndarray:
        return np.full(self.dim, self.mass / self.dim)


@dataclass(frozen=True)
class Product:
    """Cartesian product of simplexes (strategy-profile spaces)."""

    parts: tuple[Simplex, ...]

    def __post_init__(self):
        if not self.parts:
            raise ValueError("product domain needs at least one part")

    @property
    def dim(self) -> int:
        return sum(s.dim for s in self.parts)

    def split(self, p: np.ndarray) -> list[np.ndarray]:
        out, k = [], 0
        for s in self.parts:
            out.append(np.asarray(p)[k:k + s.dim])
            k += s.dim
        return out

    def contains(self, p, tol: float = CONTAINMENT_TOL) -> bool:
        p = np.asarray(p, float)
        if p.shape != (self.dim,):
            return False
        return all(s.contains(block, tol) for s, block in zip(self.parts, self.split(p)))

    def diameter(self) -> float:
        return math.sqrt(sum(s.diameter() ** 2 for s in self.parts))


Domain = Union[Box, Simplex, Product]


def require_in_domain(domain: Domain, p, tol: float = CONTAINMENT_TOL) -> np.ndarray:
    p = as_point(p)
    if not domain.contains(p, tol):
        raise DomainViolationError(f"point {p.tolist()} outside domain {domain}")
    return p


# ---------------------------------------------------------------------------
# Sampling strategies
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Grid:
    n_per_axis: int


@dataclass(frozen=True)
class SeededRandom:
    count: int


@dataclass(frozen=True)
class Explicit:
    points: tuple[tuple[float, ...], ...]


Strategy = Union[Grid, SeededRandom, Explicit]


@dataclass(frozen=True)
class SampleSet:
    """A deterministic finite stand-in for 'for all x in X' quantifiers."""

    points: np.ndarray = field(repr=False)  # (n, dim), read-only
    strategy: str = "explicit"
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "points", _frozen(np.atleast_2d(self.points)))

    def __len__(self) -> int:
        return self.points.shape[0]

    def __iter__(self):
        return iter(self.points)

    def union(self, extra: np.ndarray, note: str = "extra") -> "SampleSet":
        extra = np.atleast_2d(np.asarray(extra, float))
        pts = np.vstack([self.points, extra])
        return SampleSet(pts, strategy=f"{self.strategy}+{note}({extra.shape[0]})", seed=self.seed)


def _simplex_grid(s: Simplex, n: int) -> np.ndarray:
    # all compositions of (n - 1) levels into s.dim coordinates
    if n < 2:
        return s.barycenter()[None, :]
    rows = []

    def rec(prefix, remaining, slots):
        if slots == 1:
            rows.append(prefix + [remaining])
            return
        for k in range(remaining + 1):
            rec(prefix + [k], remaining - k, slots - 1)

    rec([], n - 1, s.dim)
    return np.asarray(rows, float) * (s.mass / (n - 1))


def _simplex_random(s: Simplex, count: int, rng: np.random.Generator) -> np.ndarray:
    fixed = np.vstack([s.vertices(), s.barycenter()[None, :]])
    if count <= fixed.shape[0]:
        return fixed[:count]
    interior = rng.dirichlet(np.ones(s.dim), size=count - fixed.shape[0]) * s.mass
    return np.vstack([fixed, interior])


def _cartesian(blocks: Sequence[np.ndarray]) -> np.ndarray:
    out = blocks[0]
    for b in blocks[1:]:
        out = np.hstack([
            np.repeat(out, b.shape[0], axis=0),
            np.tile(b, (out.shape[0], 1)),
        ])
    return out


def sample_domain(domain: Domain, strategy: Strategy, seed: int = 0) -> SampleSet:
    """Deterministic sample of a domain; equal arguments give bit-identical output."""
    rng = np.random.default_rng(seed)
    if isinstance(strategy, Explicit):
        pts = np.atleast_2d(np.asarray(strategy.points, float))
        for row in pts:
            require_in_domain(domain, row)
        return SampleSet(pts, strategy="explicit", seed=seed)

    if isinstance(strategy, Grid):
        n = strategy.n_per_axis
        if n < 1:
            raise ValueError("grid size must be positive")
        if isinstance(domain, Box):
            axes = [np.linspace(lo, up, n) for lo, up in zip(domain.lower, domain.upper)]
            if n ** domain.dim > 2_000_000:
                raise ValueError("grid too large for this dimension")
            mesh = np.meshgrid(*axes, indexing="ij")
            pts = np.stack([m.ravel() for m in mesh], axis=-1)
        elif isinstance(domain, Simplex):
            pts = _simplex_grid(domain, n)
        else:
            blocks = [_simplex_grid(s, n) for s in domain.parts]
            pts = _cartesian(blocks)
        return SampleSet(pts, strategy=f"grid(n_per_axis={n})", seed=seed)

    if isinstance(strategy, SeededRandom):
        count = strategy.count
        if count < 1:
            raise ValueError("sample count must be positive")
        if isinstance(domain, Box):
            lo, up = np.asarray(domain.lower), np.asarray(domain.upper)
            pts = lo + rng.random((count, domain.dim)) * (up - lo)
        elif isinstance(domain, Simplex):
            pts = _simplex_random(domain, count, rng)
        else:
            vertices = _cartesian([s.vertices() for s in domain.parts])
            bary = np.hstack([s.barycenter() for s in domain.parts])[None, :]
            fixed = np.vstack([vertices, bary])
            if count <= fixed.shape[0]:
                pts = fixed[:count]
            else:
                blocks = [rng.dirichlet(np.ones(s.dim), size=count - fixed.shape[0]) * s.mass
                          for s in domain.parts]
                pts = np.vstack([fixed, np.hstack(blocks)])
        return SampleSet(pts, strategy=f"seeded(count={count})", seed=seed)

    raise TypeError(f"unknown sampling strategy: {strategy!r}")


# ---------------------------------------------------------------------------
# Segment parametrization
# ---------------------------------------------------------------------------

def segment_point(x, y, eps: float) -> np.ndarray:
    """Point eps*x + (1-eps)*y on the segment from y (eps=0) to x (eps=1)."""
    x, y = as_point(x), as_point(y)
    if x.shape != y.shape:
        raise DimensionMismatchError(f"segment endpoints differ in dim: {x.shape} vs {y.shape}")
    if not (0.0 <= eps <= 1.0):
        raise ValueError(f"eps must lie in [0, 1], got {eps}")
    return _frozen(eps * x + (1.0 - eps) * y)


def segment_points(x: np.ndarray, y: np.ndarray, eps: np.ndarray) -> np.ndarray:
    """Vectorized segment_point: rows eps[i]*x + (1-eps[i])*y."""
    eps = np.asarray(eps, float)[:, None]
    return eps * x[None, :] + (1.0 - eps) * y[None, :]


# ---------------------------------------------------------------------------
# Fields
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ScalarField:
    """Deterministic f: X -> R with optional batch evaluator."""

    fn: Callable[[np.ndarray], float]
    domain: Domain
    label: str
    batch: Callable[[np.ndarray], np.ndarray] | None = None

    def value(self, p) -> float:
        v = float(self.fn(np.asarray(p, float)))
        if not math.isfinite(v):
            raise ValueError(f"field {self.label!r} returned non-finite value at {p}")
        return v

    def values(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, float))
        if self.batch is not None:
            return np.asarray(self.batch(pts), float)
        return np.array([self.fn(row) for row in pts], float)


@dataclass(frozen=True)
class VectorField:
    """Deterministic c: X -> R^dim with optional batch evaluator."""

    fn: Callable[[np.ndarray], np.ndarray]
    domain: Domain
    label: str
    batch: Callable[[np.ndarray], np.ndarray] | None = None

    def value(self, p) -> np.ndarray:
        p = np.asarray(p, float)
        v = np.asarray(self.fn(p), float)
        if v.shape != p.shape:
            raise DimensionMismatchError(
                f"field {self.label!r} returned dim {v.shape} for input dim {p.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError(f"field {self.label!r} returned non-finite value at {p}")
        return v

    def values(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, float))
        if self.batch is not None:
            return np.asarray(self.batch(pts), float)
        return np.vstack([np.asarray(self.fn(row), float) for row in pts])


AnyField = Union[ScalarField, VectorField]


def negate(f: AnyField) -> AnyField:
    """Field with all values negated; negate(negate(f)) evaluates bit-identically to f."""
    fn = f.fn
    batch = f.batch
    neg_batch = (lambda pts: -batch(pts)) if batch is not None else None
    label = f.label[4:] if f.label.startswith("neg:") else f"neg:{f.label}"
    cls = type(f)
    return cls(fn=lambda p: -np.asarray(fn(p)) if isinstance(f, VectorField) else -fn(p),
               domain=f.domain, label=label, batch=neg_batch)


# ---------------------------------------------------------------------------
# Finite-difference gradients
# ---------------------------------------------------------------------------

def gradient_fd(f: ScalarField, p, h: float = 1e-5, return_flags: bool = False):
    """Central finite-difference gradient, one-sided at box boundaries.

    When return_flags is true, also returns a bool array marking the
    components where a one-sided difference was used.
    """
    if h <= 0:
        raise ValueError("step h must be positive")
    p = as_point(p)
    dim = p.size
    grad = np.empty(dim)
    flags = np.zeros(dim, bool)
    box = f.domain if isinstance(f.domain, Box) else None
    for j in range(dim):
        hi, lo = p.copy(), p.copy()
        hi.setflags(write=True), lo.setflags(write=True)
        hi[j] += h
        lo[j] -= h
        up_ok = box is None or hi[j] <= box.upper[j] + CONTAINMENT_TOL
        lo_ok = box is None or lo[j] >= box.lower[j] - CONTAINMENT_TOL
        if up_ok and lo_ok:
            grad[j] = (f.value(hi) - f.value(lo)) / (2 * h)
        elif up_ok:
            grad[j] = (f.value(hi) - f.value(p)) / h
            flags[j] = True
        elif lo_ok:
            grad[j] = (f.value(p) - f.value(lo)) / h
            flags[j] = True
        else:
            raise DomainViolationError(f"box thinner than h along axis {j}")
    return (grad, flags) if return_flags else grad


def gradient_field(f: ScalarField, h: float = 1e-5) -> VectorField:
    """Vector field backed by finite differences of f."""

    def batch(pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(pts)
        n, dim = pts.shape
        out = np.empty_like(pts)
        for j in range(dim):
            hi, lo = pts.copy(), pts.copy()
            hi[:, j] += h
            lo[:, j] -= h
            if isinstance(f.domain, Box):
                over = hi[:, j] > f.domain.upper[j] + CONTAINMENT_TOL
                under = lo[:, j] < f.domain.lower[j] - CONTAINMENT_TOL
            else:
                over = under = np.zeros(n, bool)
            fhi, flo = f.values(hi), f.values(lo)
            col = (fhi - flo) / (2 * h)
            if over.any():
                col[over] = (f.values(pts[over]) - flo[over]) / h
            if under.any():
                col[under] = (fhi[under] - f.values(pts[under])) / h
            out[:, j] = col
        return out

    return VectorField(fn=lambda p: batch(p[None, :])[0], domain=f.domain,
                       label=f"grad:{f.label}", batch=batch)


# ---------------------------------------------------------------------------
# Built-in field registry
# ---------------------------------------------------------------------------

def _xsininv_1d(t: np.ndarray) -> np.ndarray:
    out = np.zeros_like(t)
    nz = t != 0.0
    out[nz] = t[nz] * np.sin(1.0 / t[nz])
    return out


def _box1(lo: float, hi: float) -> Box:
    return Box((lo,), (hi,))


DEFAULT_CASESTUDY_BOX = _box1(-1.0, 2.0)
MEXICAN_HAT_BOX = Box((-2.0, -2.0), (2.0, 2.0))

# name -> (default domain builder, scalar batch over (n, dim) -> (n,))
_SCALAR_REGISTRY: dict[str, tuple[Callable[[], Domain], Callable[[np.ndarray], np.ndarray]]] = {
    "quadratic": (lambda: _box1(-1.0, 1.0), lambda P: P[:, 0] ** 2),
    "cubic": (lambda: _box1(-1.0, 1.0), lambda P: P[:, 0] ** 3),
    # continuous extension at the origin: value 0 (the derivative is undefined there)
    "xsininv": (lambda: DEFAULT_CASESTUDY_BOX, lambda P: _xsininv_1d(P[:, 0])),
    "mexican_hat": (lambda: MEXICAN_HAT_BOX,
                    lambda P: (np.linalg.norm(P, axis=1) - 1.0) ** 2),
    "linear": (lambda: _box1(-1.0, 1.0), lambda P: P.sum(axis=1)),
}


def _mexican_hat_grad(P: np.ndarray) -> np.ndarray:
    r = np.linalg.norm(P, axis=1)
    scale = np.zeros_like(r)
    nz = r > 0
    scale[nz] = 2.0 * (r[nz] - 1.0) / r[nz]
    return P * scale[:, None]


def registry_names() -> tuple[str, ...]:
    return tuple(sorted(_SCALAR_REGISTRY))


def scalar_field(name: str, domain: Domain | None = None) -> ScalarField:
    """Named built-in scalar field; optional domain override."""
    if name not in _SCALAR_REGISTRY:
        raise ValueError(f"unknown field {name!r}; known: {registry_names()}")
    default_domain, batch = _SCALAR_REGISTRY[name]
    dom = domain or default_domain()
    return ScalarField(fn=lambda p: float(batch(np.atleast_2d(p))[0]), domain=dom,
                       label=name, batch=batch)


def vector_field(name: str, domain: Domain | None = None) -> VectorField:
    """Named built-in vector field.

    One-dimensional scalar names double as 1-D vector fields (the same map
    read as c: R -> R).  "linear" is c(x) = x in any dimension and
    "mexican_hat" is the closed-form radial gradient of its scalar form.
    """
    if name == "linear":
        dom = domain or _box1(-1.0, 1.0)
        return VectorField(fn=lambda p: np.asarray(p, float).copy(), domain=dom,
                           label="linear", batch=lambda P: P.copy())
    if name == "mexican_hat":
        dom = domain or MEXICAN_HAT_BOX
        return VectorField(fn=lambda p: _mexican_hat_grad(np.atleast_2d(p))[0], domain=dom,
                           label="mexican_hat", batch=_mexican_hat_grad)
    if name in ("quadratic", "cubic", "xsininv"):
        sf = scalar_field(name, domain)
        sbatch = sf.batch
        return VectorField(fn=lambda p: np.asarray([sf.value(p)]), domain=sf.domain,
                           label=name, batch=lambda P: sbatch(P)[:, None])
    raise ValueError(f"unknown field {name!r}; known: {registry_names()}")


def quadratic_form(Q, b, domain: Domain | None = None,
                   label: str = "quadratic_form") -> tuple[ScalarField, VectorField]:
    """f(x) = x'Qx/2 + b'x and its exact gradient field (Q+Q')x/2 + b."""
    Q = np.asarray(Q, float)
    b = np.asarray(b, float)
    if Q.ndim != 2 or Q.shape[0] != Q.shape[1]:
        raise DimensionMismatchError("Q must be square")
    if b.shape != (Q.shape[0],):
        raise DimensionMismatchError("b must match Q's dimension")
    dom = domain or Box(tuple([-1.0] * len(b)), tuple([1.0] * len(b)))
    S = 0.5 * (Q + Q.T)

    def fbatch(P: np.ndarray) -> np.ndarray:
        return 0.5 * np.einsum("ni,ij,nj->n", P, Q, P) + P @ b

    def gbatch(P: np.ndarray) -> np.ndarray:
        return P @ S.T + b

    sf = ScalarField(fn=lambda p: float(fbatch(np.atleast_2d(p))[0]), domain=dom,
                     label=label, batch=fbatch)
    vf = VectorField(fn=lambda p: gbatch(np.atleast_2d(p))[0], domain=dom,
                     label=f"grad:{label}", batch=gbatch)
    return sf, vf


def field_from_json(source) -> tuple[ScalarField, VectorField]:
    """Load a custom quadratic from {"Q": [[...]], "b": [...]} (dict or file path)."""
    if isinstance(source, (str, bytes)):
        with open(source) as fh:
            source = json.load(fh)
    if not isinstance(source, dict) or "Q" not in source or "b" not in source:
        raise ValueError('custom field descriptor must be {"Q": [[...]], "b": [...]}')
    return quadratic_form(source["Q"], source["b"], label="custom_quadratic")
