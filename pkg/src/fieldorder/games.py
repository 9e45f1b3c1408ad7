"""Population games as cost vector fields over products of simplexes.

A game state assigns a mass distribution over pure strategies per
population; the cost function maps a state to one cost per pure strategy.
Nash equilibria of the game are exactly the critical elements of the cost
field, so every classifier in this package applies unchanged.

Costs, not utilities, throughout: lower is better, and matrix rows index
the owner's pure strategies.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .classify import CheckOutcome, is_critical_element
from .dominance import ToleranceConfig
from .errors import DimensionMismatchError
from .fields import Product, SampleSet, Simplex, VectorField


@dataclass(frozen=True)
class PopulationGame:
    populations: tuple[tuple[float, int], ...]  # (mass, n_strategies) per population
    cost: VectorField
    label: str

    @property
    def domain(self) -> Product:
        return self.cost.domain


@dataclass(frozen=True)
class MatrixGame:
    """Matrix description of a game, loadable from JSON."""

    mode: str  # "symmetric" | "bimatrix"
    C: tuple | None = None
    A: tuple | None = None
    B: tuple | None = None
    mass: float = 1.0

    def to_dict(self) -> dict:
        if self.mode == "symmetric":
            return {"mode": "symmetric", "C": [list(r) for r in self.C], "mass": self.mass}
        return {"mode": "bimatrix", "A": [list(r) for r in self.A],
                "B": [list(r) for r in self.B]}


def from_symmetric_matrix(C, mass: float = 1.0, label: str = "symmetric") -> PopulationGame:
    """Single-population game with linear costs c(x) = C x."""
    C = np.asarray(C, float)
    if C.ndim != 2 or C.shape[0] != C.shape[1]:
        raise DimensionMismatchError("cost matrix must be square")
    if not np.all(np.isfinite(C)):
        raise ValueError("cost matrix must be finite")
    m = C.shape[0]
    domain = Product((Simplex(mass, m),))
    field = VectorField(fn=lambda x: C @ np.asarray(x, float), domain=domain,
                        label=f"game:{label}", batch=lambda X: X @ C.T)
    return PopulationGame(populations=((mass, m),), cost=field, label=label)


def from_bimatrix(A, B, label: str = "bimatrix") -> PopulationGame:
    """Two-population game: player-1 costs A y, player-2 costs B' x, concatenated."""
    A = np.asarray(A, float)
    B = np.asarray(B, float)
    if A.shape != B.shape or A.ndim != 2:
        raise DimensionMismatchError("A and B must be matrices of equal shape")
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(B))):
        raise ValueError("cost matrices must be finite")
    m1, m2 = A.shape
    domain = Product((Simplex(1.0, m1), Simplex(1.0, m2)))

    def batch(P: np.ndarray) -> np.ndarray:
        x, y = P[:, :m1], P[:, m1:]
        return np.hstack([y @ A.T, x @ B])

    field = VectorField(fn=lambda p: batch(np.atleast_2d(p))[0], domain=domain,
                        label=f"game:{label}", batch=batch)
    return PopulationGame(populations=((1.0, m1), (1.0, m2)), cost=field, label=label)


def is_nash(game: PopulationGame, p, challengers: SampleSet,
            cfg: ToleranceConfig | None = None) -> CheckOutcome:
    """Nash check: no challenger state has lower cost against p's costs."""
    return is_critical_element(game.cost, p, challengers, cfg)


# ---------------------------------------------------------------------------
# JSON game files and stock examples
# ---------------------------------------------------------------------------

def load_game(source) -> PopulationGame:
    """Load {"mode":"symmetric","C":...,"mass":...} or {"mode":"bimatrix","A":...,"B":...}."""
    if isinstance(source, (str, bytes)):
        with open(source) as fh:
            source = json.load(fh)
    mode = source.get("mode")
    if mode == "symmetric":
        return from_symmetric_matrix(source["C"], float(source.get("mass", 1.0)))
    if mode == "bimatrix":
        return from_bimatrix(source["A"], source["B"])
    raise ValueError(f"unknown game mode {mode!r}")


def hawk_dove() -> PopulationGame:
    """Hawk-Dove costs for V=2, fight cost 4; interior equilibrium (1/2, 1/2)."""
    return from_symmetric_matrix([[1.0, -2.0], [0.0, -1.0]], mass=1.0, label="hawk_dove")


def matching_pennies() -> PopulationGame:
    """Zero-sum costs; unique equilibrium at both players mixing half-half."""
    A = [[-1.0, 1.0], [1.0, -1.0]]
    B = [[1.0, -1.0], [-1.0, 1.0]]
    return from_bimatrix(A, B, label="matching_pennies")


def prisoners_dilemma() -> PopulationGame:
    """Costs from the standard payoffs (T=5, R=3, P=1, S=0); defect dominates."""
    A = [[-3.0, 0.0], [-5.0, -1.0]]
    B = [[-3.0, -5.0], [0.0, -1.0]]
    return from_bimatrix(A, B, label="prisoners_dilemma")
