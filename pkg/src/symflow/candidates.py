"""Candidate involution synthesis and closed-form family classifications.

Candidates come from inverting the packed derivative map pointwise: if a
measure-preserving symmetry or reversibility exists, its image at z solves
Delta(w) = S Delta(z) with S the identity (symmetry) or the selection's sign
matrix (reversibility).  The planar predator-prey and damped-oscillator
families additionally admit exact classifications with explicit maps.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import expr as ex
from .checks import check_structural
from .expr import Expression, identically_zero, to_string
from .fields import SmoothMap, VectorField, is_involution, is_measure_preserving
from .geometry import DomainBox, Point, as_point
from .numeric import compile_components, compile_matrix, damped_newton
from .parser import parse
from .tower import Selection, build_tower, delta_map, sign_matrix
from .verdict import Certainty, CheckKind, Witness

NEWTON_TOL = 1e-10
NEWTON_MAX_ITER = 100
MULTISTART = 5
TRIVIAL_TOL = 1e-6
CONSISTENCY_TOL = 1e-6
SINGULAR_TOL = 1e-8
FIT_TOL = 1e-6

EXISTS = "exists"
NOT_EXISTS = "not_exists"
HYPOTHESES_VIOLATED = "hypotheses_violated"


class SingularDeltaError(Exception):
    """The packed derivative map is singular at the requested point."""


@dataclass(frozen=True)
class DeltaRoot:
    point: Point
    residual: float
    trivial: bool  # w == z, always present for the symmetry equation


class _DeltaSolver:
    """Compiled machinery for solving Delta(w) = S Delta(z)."""

    def __init__(self, F: VectorField, selection: Selection, kind: CheckKind):
        tower = build_tower(F, selection.max_order)
        delta = delta_map(tower, selection)
        n = delta.dimension
        self.field = F
        self.kind = kind
        self.delta = delta
        self.fn = compile_components(delta.components)
        self.jac = compile_matrix(
            [
                [ex.differentiate(delta.components[i], j + 1) for j in range(n)]
                for i in range(n)
            ]
        )
        self.signs = (
            sign_matrix(selection).as_array()
            if kind is CheckKind.REVERSIBILITY
            else np.ones(n)
        )

    def singular_at(self, z: np.ndarray, tol: float = SINGULAR_TOL) -> bool:
        J = self.jac(z)
        scale = 1.0 + float(np.max(np.abs(J)))
        return abs(float(np.linalg.det(J))) < tol * scale

    def roots(self, z: np.ndarray, seeds: np.ndarray, newton_tol: float = NEWTON_TOL) -> List[DeltaRoot]:
        target = self.signs * self.fn(z)

        def residual(w):
            return self.fn(w) - target

        found: List[DeltaRoot] = []
        for seed in seeds:
            w, ok, r = damped_newton(residual, self.jac, seed, tol=newton_tol, max_iter=NEWTON_MAX_ITER)
            if not ok or r >= newton_tol:
                continue
            if any(np.linalg.norm(w - np.asarray(root.point)) < TRIVIAL_TOL for root in found):
                continue
            trivial = bool(np.linalg.norm(w - z) < TRIVIAL_TOL)
            found.append(DeltaRoot(as_point(w), float(r), trivial))
        found.sort(key=lambda root: root.point)
        return found


def candidate_from_delta(
    F: VectorField,
    selection: Selection,
    kind: CheckKind,
    z: Sequence[float],
    multistart: int = MULTISTART,
    newton_tol: float = NEWTON_TOL,
    box: Optional[DomainBox] = None,
) -> List[DeltaRoot]:
    """All Newton roots of Delta(w) = S Delta(z) from a multistart seed grid.

    Requires Delta to be non-singular at z.  For the symmetry equation the
    trivial root w = z is always present and comes back flagged.
    """
    box = box or F.domain
    solver = _DeltaSolver(F, selection, kind)
    z = np.asarray(z, dtype=float)
    if solver.singular_at(z):
        raise SingularDeltaError(f"Delta is singular at {as_point(z)}")
    seeds = np.vstack([box.grid(multistart), z[None, :]])
    roots = solver.roots(z, seeds, newton_tol)
    if not roots:
        raise SingularDeltaError(f"no roots converged at {as_point(z)}")
    return roots


@dataclass
class TableEntry:
    point: Point
    image: Point
    branch: int
    residual: float


@dataclass
class CandidatePointMap:
    """Pointwise candidate map recovered from the packed derivative identity."""

    selection: Selection
    kind: CheckKind
    entries: List[TableEntry]
    stats: dict
    status: str  # "ok" | "inconclusive" | "trivial_only"

    def images(self) -> np.ndarray:
        return np.asarray([e.image for e in self.entries])

    def points(self) -> np.ndarray:
        return np.asarray([e.point for e in self.entries])


def candidate_map_table(
    F: VectorField,
    selection: Selection,
    kind: CheckKind,
    grid: Sequence[int] = (20, 20),
    box: Optional[DomainBox] = None,
    anchor: Optional[Sequence[float]] = None,
    multistart: int = MULTISTART,
    newton_tol: float = NEWTON_TOL,
) -> CandidatePointMap:
    """Recover the candidate map on a grid.

    Per grid point the root branch is selected by (1) dropping the trivial
    identity branch for symmetries, (2) requiring involution consistency
    (applying the recovered map twice returns to the start within 1e-6), and
    (3) nearest-branch continuation outward from the anchor point.  Branch
    switches are counted; too many inconsistent points yield an inconclusive
    table.
    """
    box = box or F.domain
    solver = _DeltaSolver(F, selection, kind)
    pts = box.grid(list(grid))
    anchor_pt = np.asarray(anchor if anchor is not None else box.center(), dtype=float)
    order = np.argsort(np.linalg.norm(pts - anchor_pt, axis=1))
    seeds = box.grid(multistart)

    spacing = max(
        (hi - lo) / max(k - 1, 1) for (lo, hi), k in zip(box.intervals, grid)
    )
    switch_threshold = 5.0 * spacing

    stats = {
        "grid_points": len(pts),
        "singular_filtered": 0,
        "unconverged": 0,
        "inconsistent": 0,
        "trivial_only": 0,
        "branch_switches": 0,
    }
    assigned: dict = {}
    branches: dict = {}
    next_branch = 0

    for idx in order:
        z = pts[idx]
        if solver.singular_at(z):
            stats["singular_filtered"] += 1
            continue
        roots = solver.roots(z, np.vstack([seeds, z[None, :]]), newton_tol)
        if kind is CheckKind.SYMMETRY:
            nontrivial = [r for r in roots if not r.trivial]
            if roots and not nontrivial:
                stats["trivial_only"] += 1
                continue
            roots = nontrivial
        if not roots:
            stats["unconverged"] += 1
            continue

        ref_idx = None
        if assigned:
            keys = list(assigned.keys())
            dists = np.linalg.norm(pts[keys] - z, axis=1)
            ref_idx = keys[int(np.argmin(dists))]
        ref_value = (
            np.asarray(assigned[ref_idx].image) if ref_idx is not None else z
        )
        roots = sorted(roots, key=lambda r: float(np.linalg.norm(np.asarray(r.point) - ref_value)))

        chosen = None
        for root in roots:
            if _involution_consistent(solver, z, np.asarray(root.point)):
                chosen = root
                break
        if chosen is None:
            stats["inconsistent"] += 1
            continue

        if ref_idx is None:
            branch = next_branch
            next_branch += 1
        else:
            jump = float(np.linalg.norm(np.asarray(chosen.point) - ref_value))
            if jump > switch_threshold:
                stats["branch_switches"] += 1
                branch = next_branch
                next_branch += 1
            else:
                branch = branches[ref_idx]
        branches[idx] = branch
        assigned[idx] = TableEntry(as_point(z), chosen.point, branch, chosen.residual)

    entries = [assigned[i] for i in sorted(assigned.keys())]
    usable = stats["grid_points"] - stats["singular_filtered"]
    bad = stats["unconverged"] + stats["inconsistent"]
    if usable == 0:
        status = "inconclusive"
    elif not entries and stats["trivial_only"] > 0.8 * usable:
        status = "trivial_only"
    elif bad > 0.2 * usable:
        status = "inconclusive"
    else:
        status = "ok"
    return CandidatePointMap(selection, kind, entries, stats, status)


def _involution_consistent(solver: _DeltaSolver, z: np.ndarray, w: np.ndarray) -> bool:
    target = solver.signs * solver.fn(w)

    def residual(u):
        return solver.fn(u) - target

    u, ok, r = damped_newton(residual, solver.jac, z, tol=NEWTON_TOL, max_iter=NEWTON_MAX_ITER)
    return ok and float(np.linalg.norm(u - z)) < CONSISTENCY_TOL


def fit_affine_candidate(cmap: CandidatePointMap, domain: DomainBox):
    """Least-squares affine fit of the table, with coefficients snapped to
    small rationals; returns (map, max residual) or None if no affine map
    reproduces the table to within the fit tolerance."""
    if len(cmap.entries) < 3:
        return None
    Z = cmap.points()
    W = cmap.images()
    n = Z.shape[1]
    design = np.hstack([Z, np.ones((len(Z), 1))])
    coeffs, *_ = np.linalg.lstsq(design, W, rcond=None)
    residual = float(np.max(np.abs(design @ coeffs - W)))
    if residual > FIT_TOL:
        return None
    snapped = np.empty_like(coeffs)
    comps = []
    for i in range(n):
        acc: Expression = ex.ZERO
        for j in range(n + 1):
            q = Fraction(float(coeffs[j, i])).limit_denominator(100_000)
            snapped[j, i] = float(q)
            if j < n:
                acc = ex.add(acc, ex.mul(ex.Const(q), ex.Var(j + 1)))
            else:
                acc = ex.add(acc, ex.Const(q))
        comps.append(ex.simplify(acc))
    snapped_residual = float(np.max(np.abs(design @ snapped - W)))
    if snapped_residual > 10 * FIT_TOL:
        return None
    return SmoothMap(comps, domain), max(residual, snapped_residual)


def candidate_table_to_csv(cmap: CandidatePointMap, path: str) -> None:
    n = cmap.selection.dimension
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        header = [f"z{i}" for i in range(1, n + 1)]
        header += [f"sigma{i}" for i in range(1, n + 1)]
        header += ["branch", "residual"]
        writer.writerow(header)
        for e in cmap.entries:
            row = [repr(float(c)) for c in e.point]
            row += [repr(float(c)) for c in e.image]
            row += [str(e.branch), repr(float(e.residual))]
            writer.writerow(row)


# ---------------------------------------------------------------------------
# closed-form classifications
# ---------------------------------------------------------------------------


@dataclass
class ConditionReport:
    name: str
    passed: bool
    certainty: Certainty
    detail: str = ""
    witness: Optional[Witness] = None


@dataclass
class ClassificationBranch:
    kind: CheckKind
    verdict: str
    sigma: Optional[SmoothMap]
    conditions: List[ConditionReport]
    verification: dict

    @property
    def exists(self) -> bool:
        return self.verdict == EXISTS


@dataclass
class Classification:
    family: str
    reversibility: ClassificationBranch
    symmetry: ClassificationBranch

    @property
    def overall(self) -> str:
        branches = (self.reversibility, self.symmetry)
        if any(b.verdict == EXISTS for b in branches):
            return EXISTS
        if all(b.verdict == HYPOTHESES_VIOLATED for b in branches):
            return HYPOTHESES_VIOLATED
        return NOT_EXISTS

    def branch(self, kind: CheckKind) -> ClassificationBranch:
        return self.reversibility if kind is CheckKind.REVERSIBILITY else self.symmetry


def _as_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        return Fraction(v)
    if isinstance(v, float):
        return Fraction(v)  # exact binary value; pass strings for decimals
    raise TypeError(f"cannot interpret {v!r} as a rational")


def lotka_volterra_field(a, b, c, d, box: Optional[DomainBox] = None) -> VectorField:
    """Planar predator-prey field (x(a - b y), y(c x - d))."""
    a, b, c, d = map(_as_fraction, (a, b, c, d))
    box = box or DomainBox.cube(-2.0, 2.0, 2)
    F1 = ex.mul(ex.Var(1), ex.sub(ex.Const(a), ex.mul(ex.Const(b), ex.Var(2))))
    F2 = ex.mul(ex.Var(2), ex.sub(ex.mul(ex.Const(c), ex.Var(1)), ex.Const(d)))
    return VectorField([F1, F2], box)


def lienard_field(f: Expression, g: Expression, box: Optional[DomainBox] = None) -> VectorField:
    """Damped-oscillator field (y, -g(x) - y f(x))."""
    box = box or DomainBox([(-1.0, 1.0), (-2.0, 2.0)])
    F2 = ex.neg(ex.add(g, ex.mul(ex.Var(2), f)))
    return VectorField([ex.Var(2), F2], box)


def _verify_emitted(F: VectorField, sigma: SmoothMap, kind: CheckKind, rng=None) -> dict:
    checks = {
        "structural": check_structural(F, sigma, kind, rng=rng),
        "involution": is_involution(sigma, rng=rng),
        "measure_preserving": is_measure_preserving(sigma, rng=rng),
    }
    if not all(v.holds for v in checks.values()):
        bad = ", ".join(k for k, v in checks.items() if not v.holds)
        raise RuntimeError(f"internal error: emitted map failed verification ({bad})")
    return checks


def classify_lotka_volterra(a, b, c, d, box: Optional[DomainBox] = None) -> Classification:
    """Exact classification of the planar predator-prey family.

    With b c != 0 the family has an area-preserving reversibility exactly
    when a = d, namely (b y / c, c x / b), and an area-preserving symmetry
    exactly when a + d = 0, namely (-b y / c, -c x / b).  All conditions are
    exact rational tests; emitted maps are re-verified before return.
    """
    a, b, c, d = map(_as_fraction, (a, b, c, d))
    F = lotka_volterra_field(a, b, c, d, box)
    dom = F.domain

    if b * c == 0:
        cond = ConditionReport(
            "bc_nonzero",
            False,
            Certainty.CERTAIN,
            "b = 0 or c = 0 degenerates the system into a triangular one",
        )
        branch_r = ClassificationBranch(CheckKind.REVERSIBILITY, HYPOTHESES_VIOLATED, None, [cond], {})
        branch_s = ClassificationBranch(CheckKind.SYMMETRY, HYPOTHESES_VIOLATED, None, [cond], {})
        return Classification("lotka_volterra", branch_r, branch_s)

    bc_ok = ConditionReport("bc_nonzero", True, Certainty.CERTAIN, f"b*c = {b * c}")

    cond_r = ConditionReport(
        "a_equals_d", a == d, Certainty.CERTAIN, f"a - d = {a - d}"
    )
    if cond_r.passed:
        sigma = SmoothMap(
            [
                ex.simplify(ex.mul(ex.Const(b / c), ex.Var(2))),
                ex.simplify(ex.mul(ex.Const(c / b), ex.Var(1))),
            ],
            dom,
        )
        verification = _verify_emitted(F, sigma, CheckKind.REVERSIBILITY)
        branch_r = ClassificationBranch(
            CheckKind.REVERSIBILITY, EXISTS, sigma, [bc_ok, cond_r], verification
        )
    else:
        branch_r = ClassificationBranch(
            CheckKind.REVERSIBILITY, NOT_EXISTS, None, [bc_ok, cond_r], {}
        )

    cond_s = ConditionReport(
        "a_plus_d_zero", a + d == 0, Certainty.CERTAIN, f"a + d = {a + d}"
    )
    if cond_s.passed:
        sigma = SmoothMap(
            [
                ex.simplify(ex.mul(ex.Const(-b / c), ex.Var(2))),
                ex.simplify(ex.mul(ex.Const(-c / b), ex.Var(1))),
            ],
            dom,
        )
        verification = _verify_emitted(F, sigma, CheckKind.SYMMETRY)
        branch_s = ClassificationBranch(
            CheckKind.SYMMETRY, EXISTS, sigma, [bc_ok, cond_s], verification
        )
    else:
        branch_s = ClassificationBranch(
            CheckKind.SYMMETRY, NOT_EXISTS, None, [bc_ok, cond_s], {}
        )

    return Classification("lotka_volterra", branch_r, branch_s)


def _sign_profile(e: Expression) -> Optional[str]:
    """Certain sign information from the canonical form of a one-variable
    polynomial: "positive" (positive away from 0), "odd_positive"
    (sign matches x), "odd_negative" (sign opposes x), or None."""
    if not ex.is_polynomial(e):
        return None
    s = ex.simplify(e)
    nf = ex._to_nf(s)
    if not nf:
        return None
    degrees = []
    coeffs = []
    for mono, c in nf.items():
        deg = 0
        for bk, p in mono:
            if bk[0] != "v" or p.denominator != 1 or p < 0:
                return None
            deg += int(p)
        degrees.append(deg)
        coeffs.append(c)
    if all(d % 2 == 0 and d > 0 for d in degrees) and all(c > 0 for c in coeffs):
        return "positive"
    if all(d % 2 == 1 for d in degrees) and all(c > 0 for c in coeffs):
        return "odd_positive"
    if all(d % 2 == 1 for d in degrees) and all(c < 0 for c in coeffs):
        return "odd_negative"
    return None


def _sampled_extrema(e: Expression, lo: float, hi: float, count: int = 100):
    fn = compile_components([e])
    xs = np.linspace(lo, hi, count).reshape(-1, 1)
    vals = fn(xs)[..., 0]
    finite = np.isfinite(vals)
    if not finite.any():
        return None
    vals = vals[finite]
    xs = xs[finite]
    return float(vals.min()), float(vals.max()), xs, vals


def _positive_away_from_zero(e: Expression, interval: Tuple[float, float], name: str) -> ConditionReport:
    profile = _sign_profile(e)
    if profile == "positive":
        return ConditionReport(name, True, Certainty.CERTAIN, f"{to_string(ex.simplify(e))} is a positive even-power form")
    lo, hi = interval
    margin = 1e-6 * (hi - lo)
    results = []
    for a, b in ((lo + margin, -margin), (margin, hi - margin)):
        if a >= b:
            continue
        results.append(_sampled_extrema(e, a, b))
    if not results or any(r is None for r in results):
        return ConditionReport(name, False, Certainty.PROBABILISTIC, "could not sample the expression")
    min_val = min(r[0] for r in results)
    if min_val > 0:
        return ConditionReport(name, True, Certainty.PROBABILISTIC, f"sampled min {min_val:.3g} > 0")
    for r in results:
        idx = int(np.argmin(r[3]))
        if r[3][idx] <= 0:
            witness = ((float(r[2][idx][0]),), float(r[3][idx]))
            return ConditionReport(name, False, Certainty.PROBABILISTIC, f"sampled value {r[3][idx]:.3g} <= 0", witness)
    return ConditionReport(name, False, Certainty.PROBABILISTIC, "non-positive sample found")


def _v_shape(fprime: Expression, interval: Tuple[float, float]) -> ConditionReport:
    """Decreasing-then-increasing (or the mirrored pattern, accepted via time
    reversal) for the damping derivative."""
    profile = _sign_profile(fprime)
    if profile == "odd_positive":
        return ConditionReport("fprime_v_shape", True, Certainty.CERTAIN, "derivative sign matches x (standard pattern)")
    if profile == "odd_negative":
        return ConditionReport("fprime_v_shape", True, Certainty.CERTAIN, "mirrored sign pattern accepted (time reversal)")
    lo, hi = interval
    margin = 1e-6 * (hi - lo)
    left = _sampled_extrema(fprime, lo + margin, -margin)
    right = _sampled_extrema(fprime, margin, hi - margin)
    if left is None or right is None:
        return ConditionReport("fprime_v_shape", False, Certainty.PROBABILISTIC, "could not sample the derivative")
    standard = left[1] < 0 and right[0] > 0
    mirrored = left[0] > 0 and right[1] < 0
    if standard:
        return ConditionReport("fprime_v_shape", True, Certainty.PROBABILISTIC, "sampled: negative left of 0, positive right")
    if mirrored:
        return ConditionReport("fprime_v_shape", True, Certainty.PROBABILISTIC, "sampled mirrored pattern accepted (time reversal)")
    return ConditionReport(
        "fprime_v_shape", False, Certainty.PROBABILISTIC,
        f"sampled ranges left [{left[0]:.3g}, {left[1]:.3g}], right [{right[0]:.3g}, {right[1]:.3g}]",
    )


def _monotone_increasing(fprime: Expression, interval: Tuple[float, float]) -> ConditionReport:
    profile = _sign_profile(fprime)
    if profile == "positive":
        return ConditionReport("fprime_positive", True, Certainty.CERTAIN, f"{to_string(ex.simplify(fprime))} is a positive even-power form")
    lo, hi = interval
    margin = 1e-6 * (hi - lo)
    left = _sampled_extrema(fprime, lo + margin, -margin)
    right = _sampled_extrema(fprime, margin, hi - margin)
    if left is None or right is None:
        return ConditionReport("fprime_positive", False, Certainty.PROBABILISTIC, "could not sample the derivative")
    min_val = min(left[0], right[0])
    if min_val > 0:
        return ConditionReport("fprime_positive", True, Certainty.PROBABILISTIC, f"sampled min {min_val:.3g} > 0")
    side = left if left[0] <= right[0] else right
    idx = int(np.argmin(side[3]))
    witness = ((float(side[2][idx][0]),), float(side[3][idx]))
    return ConditionReport("fprime_positive", False, Certainty.PROBABILISTIC, f"sampled value {side[3][idx]:.3g} <= 0", witness)


def _parity_condition(e: Expression, name: str, even: bool, box: DomainBox, rng=None) -> ConditionReport:
    mirrored = ex.compose(e, [ex.neg(ex.Var(1))])
    residual = ex.sub(e, mirrored) if even else ex.add(e, mirrored)
    v = identically_zero(residual, box, rng=rng)
    witness = v.witnesses[0] if v.witnesses else None
    return ConditionReport(name, v.holds, v.certainty, v.notes, witness)


def _f_at_zero(f: Expression) -> ConditionReport:
    try:
        value = ex.evaluate_exact(f, (Fraction(0),))
        return ConditionReport("f_zero_at_origin", value == 0, Certainty.CERTAIN, f"f(0) = {value}")
    except ex.ExprError:
        pass
    try:
        value = ex.evaluate(f, (0.0,))
    except ex.EvaluationError:
        return ConditionReport("f_zero_at_origin", False, Certainty.PROBABILISTIC, "f(0) undefined")
    return ConditionReport(
        "f_zero_at_origin", abs(value) < 1e-12, Certainty.PROBABILISTIC, f"f(0) = {value:.3g}"
    )


def classify_lienard(
    f,
    g,
    interval: Tuple[float, float] = (-1.0, 1.0),
    y_range: Tuple[float, float] = (-2.0, 2.0),
    rng=None,
) -> Classification:
    """Classification of the damped-oscillator family x'' + f(x) x' + g(x) = 0.

    Reversibility route (monotone damping, restoring force of the sign of x):
    an area-preserving reversibility exists iff f and g are both odd, and it
    is the mirror map (-x, y).  Symmetry route (V-shaped damping): a
    non-trivial area-preserving symmetry exists iff f is even and g is odd,
    and it is the point reflection (-x, -y).  Sign hypotheses on an interval
    are certified symbolically when the canonical form allows it and sampled
    otherwise; sampled outcomes are reported as probabilistic.
    """
    if isinstance(f, str):
        f = parse(f, 1)
    if isinstance(g, str):
        g = parse(g, 1)
    lo, hi = float(interval[0]), float(interval[1])
    if not lo < 0 < hi:
        raise ValueError(f"interval must contain 0 in its interior, got ({lo}, {hi})")
    box = DomainBox([(lo, hi), y_range])
    box1 = DomainBox([(lo, hi)])
    F = lienard_field(f, g, box)
    fprime = ex.differentiate(f, 1)
    xg = ex.mul(ex.Var(1), g)

    f_zero = _f_at_zero(f)
    xg_pos = _positive_away_from_zero(xg, (lo, hi), "xg_positive")

    # reversibility: f(0)=0, f' > 0 away from 0, x g(x) > 0 away from 0
    hyp_r = [f_zero, _monotone_increasing(fprime, (lo, hi)), xg_pos]
    if all(c.passed for c in hyp_r):
        f_odd = _parity_condition(f, "f_odd", even=False, box=box1, rng=rng)
        g_odd = _parity_condition(g, "g_odd", even=False, box=box1, rng=rng)
        conditions = hyp_r + [f_odd, g_odd]
        if f_odd.passed and g_odd.passed:
            sigma = SmoothMap([ex.neg(ex.Var(1)), ex.Var(2)], box)
            verification = _verify_emitted(F, sigma, CheckKind.REVERSIBILITY, rng=rng)
            branch_r = ClassificationBranch(CheckKind.REVERSIBILITY, EXISTS, sigma, conditions, verification)
        else:
            branch_r = ClassificationBranch(CheckKind.REVERSIBILITY, NOT_EXISTS, None, conditions, {})
    else:
        branch_r = ClassificationBranch(CheckKind.REVERSIBILITY, HYPOTHESES_VIOLATED, None, hyp_r, {})

    # symmetry: V-shaped (or mirrored) damping derivative, x g(x) > 0 away from 0
    hyp_s = [_v_shape(fprime, (lo, hi)), xg_pos]
    if all(c.passed for c in hyp_s):
        f_even = _parity_condition(f, "f_even", even=True, box=box1, rng=rng)
        g_odd = _parity_condition(g, "g_odd", even=False, box=box1, rng=rng)
        conditions = hyp_s + [f_even, g_odd]
        if f_even.passed and g_odd.passed:
            sigma = SmoothMap([ex.neg(ex.Var(1)), ex.neg(ex.Var(2))], box)
            verification = _verify_emitted(F, sigma, CheckKind.SYMMETRY, rng=rng)
            branch_s = ClassificationBranch(CheckKind.SYMMETRY, EXISTS, sigma, conditions, verification)
        else:
            branch_s = ClassificationBranch(CheckKind.SYMMETRY, NOT_EXISTS, None, conditions, {})
    else:
        branch_s = ClassificationBranch(CheckKind.SYMMETRY, HYPOTHESES_VIOLATED, None, hyp_s, {})

    return Classification("lienard", branch_r, branch_s)
