"""Numerical flow machinery: fixed-step RK4 trajectories, flow-level
commutation tests, and a Monte-Carlo volume-growth check.

Fixed steps, not adaptive ones, are deliberate: the commutation test
compares two trajectories integrated on identical step grids, which cancels
the integrator bias and leaves only the structural mismatch.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .fields import SmoothMap, VectorField, jacobian
from .geometry import DomainBox, Point, as_point
from .numeric import compile_components, compile_matrix, rk4_step, rk4_variational
from .verdict import Certainty, CheckKind, Status, Verdict

TOL_FLOW = 1e-5
DEFAULT_STEP = 1e-3
ESCAPE_INFLATION = 2.0
LIOUVILLE_TOL = 5e-2
LIOUVILLE_POINTS = 100_000
_SLOPE_DT = 0.05  # half-width for the central difference of the volume curve


@dataclass(frozen=True)
class IntegratorConfig:
    step: float = DEFAULT_STEP
    horizon: float = 1.0
    escape_inflation: float = ESCAPE_INFLATION
    seed: int = 0

    def __post_init__(self):
        if self.step <= 0:
            raise ValueError("step must be positive")
        if self.horizon <= 0:
            raise ValueError("horizon must be positive")


@dataclass(frozen=True)
class Trajectory:
    """Sampled solution curve; times strictly increasing, z(0) included."""

    times: np.ndarray
    states: np.ndarray
    field: VectorField
    escaped: bool = False
    escape_cause: Optional[str] = None

    def state_at_time_zero(self) -> Point:
        k = int(np.argmin(np.abs(self.times)))
        return as_point(self.states[k])

    def final_state(self) -> Point:
        return as_point(self.states[-1])

    def initial_state(self) -> Point:
        return as_point(self.states[0])


def _march(f, z0: np.ndarray, h: float, steps: int, guard: DomainBox):
    """One-directional march; stops at escape and reports the cause."""
    states = [z0]
    z = z0
    for k in range(steps):
        z = rk4_step(f, z, h)
        if not np.all(np.isfinite(z)):
            return states, f"non-finite state at step {k + 1}"
        if not guard.contains(z):
            return states, f"left the inflated domain at step {k + 1}"
        states.append(z)
    return states, None


def integrate(F: VectorField, z0: Sequence[float], cfg: IntegratorConfig) -> Trajectory:
    """Classic RK4 trajectory over [-T, T], integrated in both directions.

    Escaping the inflated domain truncates that direction and flags the
    trajectory instead of raising.
    """
    z0 = np.asarray(z0, dtype=float)
    if not F.domain.contains(z0):
        raise ValueError("initial state outside the domain box")
    f = compile_components(F.components)
    guard = F.domain.inflate(cfg.escape_inflation)
    steps = max(1, round(cfg.horizon / cfg.step))
    h = cfg.horizon / steps

    fwd, cause_f = _march(f, z0, h, steps, guard)
    bwd, cause_b = _march(f, z0, -h, steps, guard)

    times = np.concatenate(
        [-h * np.arange(len(bwd) - 1, 0, -1), h * np.arange(0, len(fwd))]
    )
    states = np.vstack([list(reversed(bwd[1:])), fwd])
    cause = cause_f or cause_b
    return Trajectory(times, states, F, escaped=cause is not None, escape_cause=cause)


def trajectory_to_csv(traj: Trajectory, path: str) -> None:
    n = traj.states.shape[1]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t"] + [f"z{i}" for i in range(1, n + 1)])
        for t, row in zip(traj.times, traj.states):
            writer.writerow([repr(float(t))] + [repr(float(c)) for c in row])


def check_flow_relation(
    F: VectorField,
    sigma: SmoothMap,
    kind: CheckKind,
    samples: int = 50,
    cfg: IntegratorConfig = IntegratorConfig(),
    sample_box: Optional[DomainBox] = None,
    tol: float = TOL_FLOW,
    rng=None,
) -> Verdict:
    """Flow-level commutation test: compare sigma applied after the flow
    against the flow (time-reversed for a reversibility) started from
    sigma(z), at sampled (t, z) pairs.

    Both trajectories use identical step counts.  Samples whose trajectories
    escape are skipped and counted; more than half skipped is inconclusive.
    """
    rng = rng if rng is not None else np.random.default_rng(cfg.seed)
    box = sample_box or F.domain
    f = compile_components(F.components)
    sig = compile_components(sigma.components)
    guard = F.domain.inflate(cfg.escape_inflation)

    steps_total = max(1, round(cfg.horizon / cfg.step))
    h = cfg.horizon / steps_total
    Z = box.sample(rng, samples)
    ks = rng.integers(1, steps_total + 1, size=samples)

    def march_batch(z_batch: np.ndarray, step: float):
        """March everything steps_total steps; record each sample at its k."""
        picked = np.full_like(z_batch, np.nan)
        alive = np.ones(len(z_batch), dtype=bool)
        z = z_batch.copy()
        with np.errstate(all="ignore"):
            for k in range(1, steps_total + 1):
                z = rk4_step(f, z, step)
                ok = np.all(np.isfinite(z), axis=-1) & guard.contains_rows(z)
                alive &= ok
                due = alive & (ks == k)
                picked[due] = z[due]
                if not alive.any():
                    break
        return picked

    lhs_states = march_batch(Z, h)
    lhs = sig(lhs_states)
    rhs = march_batch(sig(Z), kind.flow_time_sign * h)

    good = np.all(np.isfinite(lhs), axis=-1) & np.all(np.isfinite(rhs), axis=-1)
    skipped = int(samples - good.sum())
    if skipped > samples / 2:
        return Verdict.inconclusive(
            f"{skipped}/{samples} samples escaped before their comparison time"
        )
    diffs = np.linalg.norm(lhs[good] - rhs[good], axis=-1)
    pts = Z[good]
    worst = int(np.argmax(diffs))
    residual = float(diffs[worst])
    notes = f"{int(good.sum())} samples, horizon {cfg.horizon}, step {h:.3g}"
    if skipped:
        notes += f", {skipped} escaped samples skipped"
    if residual < tol:
        return Verdict(Status.HOLDS, Certainty.PROBABILISTIC, residual, (), notes)
    order = np.argsort(-diffs)[:3]
    witnesses = tuple((as_point(pts[i]), float(diffs[i])) for i in order)
    return Verdict(Status.FAILS, Certainty.PROBABILISTIC, residual, witnesses, notes)


def check_liouville(
    F: VectorField,
    region: DomainBox,
    t_max: float = _SLOPE_DT,
    mc_points: int = LIOUVILLE_POINTS,
    tol: float = LIOUVILLE_TOL,
    seed: int = 0,
) -> Verdict:
    """Desk-scale volume balance: the growth rate of the evolved region's
    volume at t=0 must equal the integral of div F over the region.

    The left side integrates the variational equation dJ/dt = J_F J along
    the flow to +-t and central-differences the Monte-Carlo volume
    sum(det J)/N * vol; the right side averages div F over the same sample.
    Escape shrinks the region about its center once, then gives up.
    """
    if t_max <= 0:
        raise ValueError("t_max must be positive")
    rng = np.random.default_rng(seed)
    f = compile_components(F.components)
    jac_fn = compile_matrix(jacobian(F).entries)
    div_fn = compile_components([_divergence_expr(F)])
    guard = F.domain.inflate(ESCAPE_INFLATION)
    dt = min(_SLOPE_DT, t_max)
    steps = max(1, round(dt / DEFAULT_STEP))

    def attempt(reg: DomainBox):
        pts = reg.sample(rng, mc_points)
        vol = reg.volume()
        sides = {}
        with np.errstate(all="ignore"):
            for s in (+1, -1):
                zT, JT = rk4_variational(f, jac_fn, pts, s * dt, steps)
                ok = np.all(np.isfinite(zT), axis=-1) & guard.contains_rows(zT)
                if not ok.all():
                    return None
                sides[s] = vol * float(np.mean(np.linalg.det(JT)))
            slope = (sides[+1] - sides[-1]) / (2.0 * dt)
            div_integral = vol * float(np.mean(div_fn(pts)[..., 0]))
        return slope, div_integral

    result = attempt(region)
    shrunk = False
    if result is None:
        result = attempt(region.shrink(0.5))
        shrunk = True
        if result is None:
            return Verdict.inconclusive("flow escaped the domain even after shrinking the region")
    slope, div_integral = result
    denom = max(abs(slope), abs(div_integral), 1e-8)
    rel = abs(slope - div_integral) / denom
    notes = (
        f"volume slope {slope:.6g} vs divergence integral {div_integral:.6g}, "
        f"relative error {rel:.3g} at {mc_points} points"
    )
    if shrunk:
        notes += " (region shrunk once after escape)"
    if rel < tol:
        return Verdict(Status.HOLDS, Certainty.PROBABILISTIC, rel, (), notes)
    witness = (region.center(), rel)
    return Verdict(Status.FAILS, Certainty.PROBABILISTIC, rel, (witness,), notes)


def _divergence_expr(F: VectorField):
    from .fields import divergence

    return divergence(F)
