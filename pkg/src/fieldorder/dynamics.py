"""Flows x' = F(x), Lyapunov integrals, and setwise stability certificates.

Integration is classical fixed-step RK4: the fields are cheap and exact
reproducibility matters more than adaptivity here.  A trajectory stops when
the field norm drops below the convergence threshold, when time runs out,
when the next state would leave the domain, or when the state norm falls
under the floor (the non-Lipschitz pocket around an oscillatory origin,
surfaced rather than hidden).

For one-dimensional fields the potential L(x) = integral of f from a
reference point is evaluated by adaptive Simpson quadrature; along
trajectories of x' = -f(x) its increments are checked to be nonincreasing
up to a small slack, since dL/dt = -f(x)^2 <= 0 on true solutions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .fields import SampleSet, ScalarField, VectorField, as_point, require_in_domain

MAX_TIME = "MaxTime"
CONVERGED = "Converged"
LEFT_DOMAIN = "LeftDomain"
STEP_UNDERFLOW = "StepUnderflow"


@dataclass(frozen=True)
class IntegratorConfig:
    dt: float = 1e-3
    t_max: float = 200.0
    convergence_eps: float = 1e-6
    floor_eps: float = 1e-12
    method: str = "rk4"

    def __post_init__(self):
        if min(self.dt, self.t_max, self.convergence_eps, self.floor_eps) <= 0:
            raise ValueError("all integrator parameters must be positive")
        if self.dt >= self.t_max:
            raise ValueError("dt must be smaller than t_max")
        if self.method != "rk4":
            raise ValueError("only fixed-step rk4 is supported")

    def to_dict(self) -> dict:
        return {"method": self.method, "dt": self.dt, "t_max": self.t_max,
                "convergence_eps": self.convergence_eps, "floor_eps": self.floor_eps}


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray = field(repr=False)
    states: np.ndarray = field(repr=False)
    terminated_reason: str
    config: IntegratorConfig

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]

    @property
    def final_time(self) -> float:
        return float(self.times[-1])

    def write_csv(self, fh) -> None:
        dim = self.states.shape[1]
        fh.write("t," + ",".join(f"x{j + 1}" for j in range(dim)) + "\n")
        for t, row in zip(self.times, self.states):
            fh.write("%.17g," % t + ",".join("%.17g" % v for v in row) + "\n")


def integrate(F: VectorField, x0, cfg: IntegratorConfig | None = None) -> Trajectory:
    """Fixed-step RK4 flow of x' = F(x) starting at x0, fully deterministic."""
    cfg = cfg or IntegratorConfig()
    x = np.array(require_in_domain(F.domain, x0), float)
    dt = cfg.dt
    n_steps = int(math.floor(cfg.t_max / dt + 1e-9))
    times = [0.0]
    states = [x.copy()]
    reason = MAX_TIME
    value = F.value
    for k in range(n_steps):
        v = value(x)
        if float(np.linalg.norm(v)) < cfg.convergence_eps:
            reason = CONVERGED
            break
        if float(np.linalg.norm(x)) < cfg.floor_eps:
            reason = STEP_UNDERFLOW
            break
        k1 = v
        k2 = value(x + 0.5 * dt * k1)
        k3 = value(x + 0.5 * dt * k2)
        k4 = value(x + dt * k3)
        nxt = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not F.domain.contains(nxt):
            reason = LEFT_DOMAIN
            break
        x = nxt
        times.append((k + 1) * dt)
        states.append(x.copy())
    return Trajectory(np.asarray(times), np.vstack(states), reason, cfg)


# ---------------------------------------------------------------------------
# Quadrature
# ---------------------------------------------------------------------------

def _adaptive_simpson(fv, a: float, fa: float, b: float, fb: float,
                      whole: float, fm: float, tol: float, depth: int) -> float:
    m = 0.5 * (a + b)
    lm, rm = 0.5 * (a + m), 0.5 * (m + b)
    flm, frm = fv(lm), fv(rm)
    left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
    right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
    if depth <= 0 or abs(left + right - whole) <= 15.0 * tol:
        return left + right + (left + right - whole) / 15.0
    return (_adaptive_simpson(fv, a, fa, m, fm, left, flm, tol / 2.0, depth - 1)
            + _adaptive_simpson(fv, m, fm, b, fb, right, frm, tol / 2.0, depth - 1))


def lyapunov_integral(f: ScalarField, x_ref: float, x: float,
                      abs_tol: float = 1e-10) -> float:
    """Oriented integral of a 1-D scalar field from x_ref to x (adaptive Simpson)."""
    if f.domain.dim != 1:
        raise ValueError("lyapunov_integral needs a one-dimensional field")
    lo, hi = (x_ref, x) if x_ref <= x else (x, x_ref)
    require_in_domain(f.domain, [lo])
    require_in_domain(f.domain, [hi])
    if lo == hi:
        return 0.0

    def fv(t: float) -> float:
        return f.value(np.array([t]))

    fa, fb = fv(lo), fv(hi)
    m = 0.5 * (lo + hi)
    fm = fv(m)
    whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb)
    val = _adaptive_simpson(fv, lo, fa, hi, fb, whole, fm, abs_tol, depth=48)
    return val if x_ref <= x else -val


def _segment_increments(f: ScalarField, states: np.ndarray) -> np.ndarray:
    """L increments between consecutive 1-D samples via two-panel Simpson.

    Steps are tiny (|dx| <= dt * max|f|), where the rule is far more accurate
    than the 1e-8 monotonicity slack it feeds.
    """
    x = states[:, 0]
    a, b = x[:-1], x[1:]
    offsets = np.array([0.0, 0.25, 0.5, 0.75, 1.0])
    nodes = a[:, None] + (b - a)[:, None] * offsets[None, :]
    vals = f.values(nodes.reshape(-1, 1)).reshape(nodes.shape)
    weights = np.array([1.0, 4.0, 2.0, 4.0, 1.0]) / 12.0
    return (b - a) * (vals @ weights)


# ---------------------------------------------------------------------------
# Setwise stability
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TrialRecord:
    x0: tuple[float, ...]
    final_distance: float
    limit_point: tuple[float, ...] | None
    converged: bool
    terminated_reason: str
    final_time: float

    def to_dict(self) -> dict:
        return {"x0": list(self.x0), "final_distance": self.final_distance,
                "limit_point": list(self.limit_point) if self.limit_point else None,
                "converged": self.converged, "terminated_reason": self.terminated_reason,
                "final_time": self.final_time}


@dataclass(frozen=True)
class SetStabilityReport:
    candidate_set: tuple[tuple[float, ...], ...]
    trials: tuple[TrialRecord, ...]
    lyapunov_monotone: bool | None
    max_lyapunov_increase: float

    @property
    def all_converged(self) -> bool:
        return all(t.converged for t in self.trials)

    def to_dict(self) -> dict:
        return {"candidate_set": [list(p) for p in self.candidate_set],
                "trials": [t.to_dict() for t in self.trials],
                "lyapunov_monotone": self.lyapunov_monotone,
                "max_lyapunov_increase": self.max_lyapunov_increase}


def check_setwise_stability(F: VectorField, candidate, initial_conditions: SampleSet,
                            cfg: IntegratorConfig | None = None,
                            potential: ScalarField | None = None,
                            lyap_slack: float = 1e-8) -> SetStabilityReport:
    """Integrate from each start and certify convergence into the candidate set.

    When a 1-D potential is supplied, the report also states whether its
    value never increased by more than lyap_slack between consecutive
    trajectory samples.
    """
    cfg = cfg or IntegratorConfig()
    C = np.atleast_2d(np.asarray(candidate, float))
    if C.size == 0:
        raise ValueError("candidate set is empty")
    if len(initial_conditions) == 0:
        raise ValueError("no initial conditions given")
    trials = []
    monotone: bool | None = None
    max_increase = 0.0
    if potential is not None and potential.domain.dim == 1:
        monotone = True
    for x0 in initial_conditions:
        traj = integrate(F, x0, cfg)
        dists = np.linalg.norm(traj.final_state[None, :] - C, axis=1)
        j = int(np.argmin(dists))
        final_distance = float(dists[j])
        converged = traj.terminated_reason == CONVERGED and final_distance <= cfg.convergence_eps
        if monotone is not None and traj.states.shape[0] > 1:
            inc = float(_segment_increments(potential, traj.states).max())
            max_increase = max(max_increase, inc)
            monotone = monotone and inc <= lyap_slack
        trials.append(TrialRecord(
            x0=tuple(as_point(x0)), final_distance=final_distance,
            limit_point=tuple(C[j]) if converged else None, converged=converged,
            terminated_reason=traj.terminated_reason, final_time=traj.final_time))
    return SetStabilityReport(tuple(tuple(r) for r in C), tuple(trials),
                              monotone, max_increase)
