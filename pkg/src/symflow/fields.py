"""Vector fields, smooth maps, Jacobians, and the two structural predicates
on maps (involution, volume preservation)."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from . import expr as ex
from .expr import Expression, identically_zero, to_string
from .geometry import DomainBox, Point, as_point
from .numeric import compile_components, compile_matrix, damped_newton
from .verdict import Certainty, Status, Verdict, combine

logger = logging.getLogger(__name__)

CRITICAL_RESIDUAL_TOL = 1e-10
DEDUP_TOL = 1e-6
NEWTON_MAX_ITER = 50
DEFAULT_SEED_GRID = 8


def _validated_components(components, dimension) -> tuple:
    comps = tuple(components)
    if dimension is not None and len(comps) != dimension:
        raise ValueError(f"expected {dimension} components, got {len(comps)}")
    for c in comps:
        k = ex.max_var_index(c)
        if k > len(comps):
            raise ValueError(
                f"component {to_string(c)} uses variable {k} beyond dimension {len(comps)}"
            )
    return comps


@dataclass(frozen=True)
class VectorField:
    """A smooth vector field: n component expressions over a box domain."""

    components: Tuple[Expression, ...]
    domain: DomainBox

    def __init__(self, components: Sequence[Expression], domain: DomainBox):
        comps = _validated_components(components, None)
        if domain.dimension != len(comps):
            raise ValueError("domain dimension does not match component count")
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "domain", domain)

    @property
    def dimension(self) -> int:
        return len(self.components)

    def is_polynomial(self) -> bool:
        return all(ex.is_polynomial(c) for c in self.components)

    def __str__(self) -> str:
        return "(" + ", ".join(to_string(c) for c in self.components) + ")"


@dataclass(frozen=True)
class SmoothMap:
    """A smooth transformation of the domain; same shape as a field."""

    components: Tuple[Expression, ...]
    domain: DomainBox

    def __init__(self, components: Sequence[Expression], domain: DomainBox):
        comps = _validated_components(components, None)
        if domain.dimension != len(comps):
            raise ValueError("domain dimension does not match component count")
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "domain", domain)

    @property
    def dimension(self) -> int:
        return len(self.components)

    def is_polynomial(self) -> bool:
        return all(ex.is_polynomial(c) for c in self.components)

    def apply(self, p: Sequence[float]) -> Point:
        return tuple(ex.evaluate(c, p) for c in self.components)

    def __str__(self) -> str:
        return "(" + ", ".join(to_string(c) for c in self.components) + ")"


def identity_map(dimension: int, domain: DomainBox) -> SmoothMap:
    return SmoothMap([ex.Var(i) for i in range(1, dimension + 1)], domain)


@dataclass(frozen=True)
class JacobianMatrix:
    entries: Tuple[Tuple[Expression, ...], ...]

    @property
    def dimension(self) -> int:
        return len(self.entries)

    def det(self) -> Expression:
        """Symbolic determinant by cofactor expansion; meant for n <= 4."""
        n = self.dimension
        if n > 4:
            raise ValueError("symbolic determinants are limited to n <= 4")
        rows = [list(r) for r in self.entries]
        return ex.simplify(_cofactor_det(rows))

    def times_vector(self, vector: Sequence[Expression]) -> Tuple[Expression, ...]:
        n = self.dimension
        out = []
        for i in range(n):
            acc: Expression = ex.ZERO
            for j in range(n):
                acc = ex.add(acc, ex.mul(self.entries[i][j], vector[j]))
            out.append(ex.simplify(acc))
        return tuple(out)


def _cofactor_det(rows) -> Expression:
    n = len(rows)
    if n == 1:
        return rows[0][0]
    acc: Expression = ex.ZERO
    for j in range(n):
        minor = [r[:j] + r[j + 1 :] for r in rows[1:]]
        term = ex.mul(rows[0][j], _cofactor_det(minor))
        acc = ex.add(acc, term) if j % 2 == 0 else ex.sub(acc, term)
    return acc


def jacobian(m) -> JacobianMatrix:
    """Matrix of simplified partials d(component i)/d(z_j)."""
    comps = m.components
    n = len(comps)
    return JacobianMatrix(
        tuple(
            tuple(ex.differentiate(comps[i], j + 1) for j in range(n))
            for i in range(n)
        )
    )


def divergence(F: VectorField) -> Expression:
    """Sum of d(F_i)/d(z_i), simplified."""
    acc: Expression = ex.ZERO
    for i, c in enumerate(F.components, start=1):
        acc = ex.add(acc, ex.differentiate(c, i))
    return ex.simplify(acc)


def lie_derivative(e: Expression, F: VectorField) -> Expression:
    """Derivative of e along the flow of F: sum_i (de/dz_i) F_i."""
    if ex.max_var_index(e) > F.dimension:
        raise ValueError("expression dimension exceeds field dimension")
    acc: Expression = ex.ZERO
    for i, c in enumerate(F.components, start=1):
        acc = ex.add(acc, ex.mul(ex.differentiate(e, i), c))
    return ex.simplify(acc)


def is_involution(m: SmoothMap, box: Optional[DomainBox] = None, trials: int = 200, rng=None) -> Verdict:
    """Does applying the map twice return every point?  Componentwise zero
    test of m(m(z)) - z; certain for polynomial maps."""
    box = box or m.domain
    parts = []
    for i, c in enumerate(m.components, start=1):
        twice = ex.compose(c, m.components)
        residual = ex.sub(twice, ex.Var(i))
        parts.append(identically_zero(residual, box, trials, rng=rng))
    return combine(parts, notes="involution residual m(m(z)) - z")


def is_measure_preserving(
    m: SmoothMap, box: Optional[DomainBox] = None, trials: int = 200, rng=None
) -> Verdict:
    """Volume preservation via |det J| = 1, tested as (det J)^2 - 1 = 0."""
    box = box or m.domain
    n = m.dimension
    if n <= 4:
        d = jacobian(m).det()
        residual = ex.sub(ex.mul(d, d), ex.ONE)
        v = identically_zero(residual, box, trials, rng=rng)
        return v.with_notes(f"det J = {to_string(d)}; {v.notes}")
    # high dimension: sample |det|^2 - 1 numerically via LU
    rng = rng if rng is not None else np.random.default_rng(0)
    jac_fn = compile_matrix(jacobian(m).entries)
    pts = box.sample(rng, trials)
    dets = np.linalg.det(jac_fn(pts))
    residuals = np.abs(dets * dets - 1.0)
    worst = int(np.argmax(residuals))
    if residuals[worst] < 1e-9:
        return Verdict(Status.HOLDS, Certainty.PROBABILISTIC, float(residuals[worst]), (), "sampled determinant")
    witness = (as_point(pts[worst]), float(residuals[worst]))
    return Verdict(Status.FAILS, Certainty.PROBABILISTIC, float(residuals[worst]), (witness,), "sampled determinant")


def find_critical_points(
    F: VectorField,
    seeds_per_axis: int = DEFAULT_SEED_GRID,
    residual_tol: float = CRITICAL_RESIDUAL_TOL,
    dedup_tol: float = DEDUP_TOL,
) -> list:
    """Newton root inventory of F(z) = 0 inside the domain box.

    Seeds on a uniform grid (endpoints included), damped Newton with step
    halving, duplicates merged, roots outside the box discarded.  The
    non-convergence count is logged; an empty list is a valid result.
    """
    f = compile_components(F.components)
    jac_fn = compile_matrix(jacobian(F).entries)
    seeds = F.domain.grid(seeds_per_axis)
    blob_radius = 1e-2 * float(np.linalg.norm(F.domain.highs - F.domain.lows))
    roots: list = []
    failures = 0
    for seed in seeds:
        x, ok, r = damped_newton(f, jac_fn, seed, tol=residual_tol, max_iter=NEWTON_MAX_ITER)
        if not ok or r >= residual_tol:
            failures += 1
            continue
        x = _polish_root(f, jac_fn, x)
        if not F.domain.contains(x, slack=1e-9):
            continue
        if _is_duplicate(f, x, roots, dedup_tol, blob_radius, residual_tol):
            continue
        roots.append(as_point(x))
    if failures:
        logger.debug("find_critical_points: %d/%d seeds did not converge", failures, len(seeds))
    roots.sort()
    return roots


def _polish_root(f, jac_fn, x, max_iter=80, step_tol=1e-13):
    """Full Newton steps past the residual tolerance; degenerate roots
    converge only linearly, so the first residual-based stop leaves a blob."""
    for _ in range(max_iter):
        fx = f(x)
        J = jac_fn(x)
        if not (np.all(np.isfinite(fx)) and np.all(np.isfinite(J))):
            return x
        try:
            step = np.linalg.solve(J, -fx)
        except np.linalg.LinAlgError:
            return x
        if not np.all(np.isfinite(step)):
            return x
        x = x + step
        if np.linalg.norm(step) < step_tol:
            break
    return x


def _is_duplicate(f, x, roots, dedup_tol, blob_radius, residual_tol):
    for known in roots:
        gap = np.linalg.norm(x - np.asarray(known))
        if gap < dedup_tol:
            return True
        # nearby quasi-roots whose midpoint still solves the system belong to
        # one degenerate root, not two isolated ones
        if gap < blob_radius:
            mid = (x + np.asarray(known)) / 2.0
            if np.linalg.norm(f(mid)) < 10 * residual_tol:
                return True
    return False
