"""Structure checks for candidate (field, map) pairs.

Verifies the field-level commutation identities, the transformation law of
the divergence-derivative tower, the vanishing of even tower orders on the
fixed set of a reversibility, level-set invariance, and local
non-invertibility of the packed derivative map at fixed points.

Certainty policy: a verdict is certain only when both the field and the map
are polynomial, in which case identities are decided through canonical
forms.  Any transcendental ingredient downgrades the whole check to
sampling, even when local rewrites happen to cancel everything.
"""

from __future__ import annotations

from fractions import Fraction
from typing import List, Optional, Sequence

import numpy as np

from . import expr as ex
from .expr import (
    Expression,
    identically_zero,
    sampled_zero_verdict,
)
from .fields import JacobianMatrix, SmoothMap, VectorField, jacobian
from .geometry import DomainBox, Point, as_point
from .numeric import compile_components, compile_matrix, compile_scalar, damped_newton
from .tower import DivergenceTower, Selection, build_tower, delta_map
from .verdict import Certainty, CheckKind, Status, Verdict, combine

FIXED_POINT_TOL = 1e-8
FIXED_VALUE_TOL = 1e-10
LEVEL_EPS_ON = 1e-8
LEVEL_TOL = 1e-6
SINGULAR_TOL = 1e-8


def _zero_check(residual, certain_capable, box, trials, rng, tol=None) -> Verdict:
    if certain_capable:
        return identically_zero(residual, box, trials, tol=tol, rng=rng)
    return sampled_zero_verdict(residual, box, trials, tol, rng)


def _require_same_dimension(F: VectorField, sigma: SmoothMap):
    if F.dimension != sigma.dimension:
        raise ValueError(
            f"field dimension {F.dimension} != map dimension {sigma.dimension}"
        )


def check_structural(
    F: VectorField,
    sigma: SmoothMap,
    kind: CheckKind,
    box: Optional[DomainBox] = None,
    trials: int = 200,
    rng=None,
) -> Verdict:
    """Field-level identity: F(sigma(z)) equals J_sigma(z) F(z) for a
    symmetry and its negative for a reversibility, componentwise."""
    _require_same_dimension(F, sigma)
    box = box or F.domain
    rng = rng if rng is not None else np.random.default_rng(0)
    J = jacobian(sigma)
    Jv = J.times_vector(F.components)
    certain_capable = F.is_polynomial() and sigma.is_polynomial()
    parts = []
    for i, comp in enumerate(F.components):
        lhs = ex.compose(comp, sigma.components)
        rhs = Jv[i] if kind is CheckKind.SYMMETRY else ex.neg(Jv[i])
        residual = ex.sub(lhs, rhs)
        parts.append(_zero_check(residual, certain_capable, box, trials, rng))
    return combine(parts, notes=f"structural {kind.value} residual F(sigma) -/+ J_sigma F")


def tower_order_verdicts(
    F: VectorField,
    sigma: SmoothMap,
    kind: CheckKind,
    max_order: int,
    box: Optional[DomainBox] = None,
    trials: int = 200,
    rng=None,
    tower: Optional[DivergenceTower] = None,
) -> List[Verdict]:
    """Per-order tests of the tower transformation law.

    Order j must satisfy D_j(sigma(z)) = s_j D_j(z) with s_j = +1 for a
    symmetry and s_j = (-1)^(j+1) for a reversibility.
    """
    _require_same_dimension(F, sigma)
    box = box or F.domain
    rng = rng if rng is not None else np.random.default_rng(0)
    tower = tower or build_tower(F, max_order)
    certain_capable = F.is_polynomial() and sigma.is_polynomial()
    out = []
    for j in range(max_order + 1):
        dj = tower.orders[j]
        lhs = ex.compose(dj, sigma.components)
        s = kind.tower_sign(j)
        residual = ex.sub(lhs, dj) if s == 1 else ex.add(lhs, dj)
        v = _zero_check(residual, certain_capable, box, trials, rng)
        out.append(v.with_notes(f"order {j} (sign {s:+d}): {v.notes}"))
    return out


def check_tower_transform(
    F: VectorField,
    sigma: SmoothMap,
    kind: CheckKind,
    max_order: int,
    box: Optional[DomainBox] = None,
    trials: int = 200,
    rng=None,
) -> Verdict:
    parts = tower_order_verdicts(F, sigma, kind, max_order, box, trials, rng)
    summary = "; ".join(
        p.notes.split(":")[0] + "=" + p.status.value for p in parts
    )
    return combine(parts, notes=f"tower transform up to order {max_order}: {summary}")


# ---------------------------------------------------------------------------
# fixed sets of a candidate map
# ---------------------------------------------------------------------------


def _exact_affine_parts(sigma: SmoothMap):
    """(A, b) with sigma(z) = A z + b over exact rationals, or None."""
    n = sigma.dimension
    J = jacobian(sigma)
    A = []
    for i in range(n):
        row = []
        for j in range(n):
            entry = J.entries[i][j]
            if not isinstance(entry, ex.Const):
                return None
            row.append(entry.value)
        A.append(row)
    origin = tuple(Fraction(0) for _ in range(n))
    try:
        b = [ex.evaluate_exact(c, origin) for c in sigma.components]
    except ex.ExprError:
        return None
    return A, b


def _solve_affine_exact(M, rhs):
    """Full rational solution set of M x = rhs: (particular, kernel basis),
    or None when inconsistent."""
    n = len(rhs)
    rows = [[M[i][j] for j in range(n)] + [rhs[i]] for i in range(n)]
    pivots = []
    r = 0
    for c in range(n):
        pr = next((i for i in range(r, n) if rows[i][c] != 0), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        pv = rows[r][c]
        rows[r] = [v / pv for v in rows[r]]
        for i in range(n):
            if i != r and rows[i][c] != 0:
                factor = rows[i][c]
                rows[i] = [a - factor * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == n:
            break
    for i in range(r, n):
        if all(v == 0 for v in rows[i][:n]) and rows[i][n] != 0:
            return None
    particular = [Fraction(0)] * n
    for i, c in enumerate(pivots):
        particular[c] = rows[i][n]
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * n
        v[fc] = Fraction(1)
        for i, c in enumerate(pivots):
            v[c] = -rows[i][fc]
        basis.append(v)
    return particular, basis


def _line_box_interval(particular, direction, box: DomainBox):
    """Parameter range of {p + t v} inside the box, or None when empty."""
    lo, hi = -float("inf"), float("inf")
    for (blo, bhi), p, v in zip(box.intervals, particular, direction):
        p, v = float(p), float(v)
        if v == 0.0:
            if not blo - 1e-12 <= p <= bhi + 1e-12:
                return None
            continue
        t1, t2 = (blo - p) / v, (bhi - p) / v
        lo = max(lo, min(t1, t2))
        hi = min(hi, max(t1, t2))
    if not lo < hi:
        return None
    return lo, hi


class FixedSet:
    """Fixed points of a map inside a box, with an exact affine
    parametrization when the map is affine with rational coefficients."""

    def __init__(self, points, particular=None, basis=None, t_box=None):
        self.points: List[Point] = points
        self.particular = particular
        self.basis = basis
        self.t_box = t_box  # DomainBox over the kernel parameters

    @property
    def exact(self) -> bool:
        return self.particular is not None


def fixed_points(
    sigma: SmoothMap,
    box: Optional[DomainBox] = None,
    seeds_per_axis: int = 8,
    samples_per_free_axis: int = 7,
) -> FixedSet:
    """Solve sigma(z) = z: exactly for affine rational maps (including fixed
    lines), by damped Newton from a seed grid otherwise."""
    box = box or sigma.domain
    n = sigma.dimension
    affine = _exact_affine_parts(sigma)
    if affine is not None:
        A, b = affine
        M = [[A[i][j] - (1 if i == j else 0) for j in range(n)] for i in range(n)]
        rhs = [-bi for bi in b]
        sol = _solve_affine_exact(M, rhs)
        if sol is None:
            return FixedSet([])
        particular, basis = sol
        if not basis:
            p = as_point(particular)
            pts = [p] if box.contains(p, slack=1e-9) else []
            return FixedSet(pts, particular, basis, None)
        if len(basis) == 1:
            rng_t = _line_box_interval(particular, basis[0], box)
            if rng_t is None:
                return FixedSet([], particular, basis, None)
            lo, hi = rng_t
            pad = 0.05 * (hi - lo)
            ts = np.linspace(lo + pad, hi - pad, samples_per_free_axis)
            pts = [
                as_point([float(p) + t * float(v) for p, v in zip(particular, basis[0])])
                for t in ts
            ]
            return FixedSet(pts, particular, basis, DomainBox([(lo, hi)]))
        # higher-dimensional kernels: sample a bounding cube and filter
        span = float(np.max(box.highs - box.lows))
        cube = DomainBox.cube(-span, span, len(basis))
        grid = cube.grid(samples_per_free_axis)
        pts = []
        for t in grid:
            p = [float(pi) + float(np.dot(t, [float(v[i]) for v in basis])) for i, pi in enumerate(particular)]
            if box.contains(p, slack=1e-9):
                pts.append(as_point(p))
        return FixedSet(pts, particular, basis, cube)

    fn = compile_components(
        [ex.sub(c, ex.Var(i + 1)) for i, c in enumerate(sigma.components)]
    )
    entries = jacobian(sigma).entries
    jac_minus_id = [
        [
            ex.sub(entries[i][j], ex.ONE) if i == j else entries[i][j]
            for j in range(n)
        ]
        for i in range(n)
    ]
    jac_fn = compile_matrix(jac_minus_id)
    pts: List[Point] = []
    for seed in box.grid(seeds_per_axis):
        x, ok, r = damped_newton(fn, jac_fn, seed, tol=FIXED_POINT_TOL, max_iter=60)
        if not ok or r >= FIXED_POINT_TOL:
            continue
        if not box.contains(x, slack=1e-9):
            continue
        if any(np.linalg.norm(x - np.asarray(q)) < 1e-6 for q in pts):
            continue
        pts.append(as_point(x))
    pts.sort()
    return FixedSet(pts)


def check_fixed_points_even_orders(
    F: VectorField,
    sigma: SmoothMap,
    box: Optional[DomainBox] = None,
    max_j: int = 1,
    value_tol: float = FIXED_VALUE_TOL,
    trials: int = 200,
    rng=None,
) -> Verdict:
    """Even tower orders must vanish on the fixed set of a reversibility.

    Exact affine fixed sets are handled symbolically (restrict each even
    order to the parametrized fixed set and test for the zero polynomial);
    otherwise the located fixed points are evaluated numerically.
    """
    _require_same_dimension(F, sigma)
    box = box or F.domain
    rng = rng if rng is not None else np.random.default_rng(0)
    fs = fixed_points(sigma, box)
    if not fs.points:
        return Verdict.inconclusive("no fixed points of sigma found in the box")
    tower = build_tower(F, 2 * max_j)
    orders = [2 * j for j in range(max_j + 1)]

    if fs.exact and F.is_polynomial():
        parts = []
        for k in orders:
            dk = tower.orders[k]
            if not fs.basis:
                value = ex.evaluate_exact(dk, fs.particular)
                p = as_point(fs.particular)
                if value == 0:
                    parts.append(
                        Verdict(Status.HOLDS, Certainty.CERTAIN, 0.0, (), f"order {k}: exact zero at fixed point")
                    )
                elif abs(float(value)) < value_tol:
                    parts.append(
                        Verdict(
                            Status.HOLDS,
                            Certainty.PROBABILISTIC,
                            abs(float(value)),
                            (),
                            f"order {k}: |value| below tolerance at fixed point",
                        )
                    )
                else:
                    parts.append(
                        Verdict(
                            Status.FAILS,
                            Certainty.CERTAIN,
                            abs(float(value)),
                            ((p, abs(float(value))),),
                            f"order {k}: value {float(value):.6g} at fixed point {p}",
                        )
                    )
                continue
            # restrict D^(k) to the affine fixed set and test identically
            maps = []
            for i in range(F.dimension):
                acc: Expression = ex.Const(fs.particular[i])
                for t_idx, v in enumerate(fs.basis, start=1):
                    acc = ex.add(acc, ex.mul(ex.Const(v[i]), ex.Var(t_idx)))
                maps.append(acc)
            restricted = ex.compose(dk, maps)
            t_box = fs.t_box or DomainBox.cube(-1.0, 1.0, len(fs.basis))
            v = identically_zero(restricted, t_box, trials, rng=rng)
            parts.append(v.with_notes(f"order {k} on the fixed set: {v.notes}"))
        return combine(parts, notes=f"even orders {orders} on the sigma-fixed set")

    parts = []
    for k in orders:
        fn = compile_scalar(tower.orders[k])
        vals = [abs(float(fn(np.asarray(p)))) for p in fs.points]
        worst = int(np.argmax(vals))
        if vals[worst] < value_tol:
            parts.append(
                Verdict(
                    Status.HOLDS,
                    Certainty.PROBABILISTIC,
                    vals[worst],
                    (),
                    f"order {k}: max |value| {vals[worst]:.3g} over {len(fs.points)} fixed points",
                )
            )
        else:
            witnesses = tuple(
                (fs.points[i], vals[i])
                for i in np.argsort(vals)[::-1][:3]
                if vals[i] >= value_tol
            )
            parts.append(
                Verdict(Status.FAILS, Certainty.PROBABILISTIC, vals[worst], witnesses, f"order {k}")
            )
    return combine(parts, notes=f"even orders {orders} at located fixed points")


def check_level_set_invariance(
    F: VectorField,
    sigma: SmoothMap,
    kind: CheckKind,
    order: int,
    levels: Sequence[float],
    box: Optional[DomainBox] = None,
    samples: int = 40,
    eps_on: float = LEVEL_EPS_ON,
    tol: float = LEVEL_TOL,
    rng=None,
) -> Verdict:
    """Level sets of tower entries map into themselves under sigma.

    Points are projected onto the level set with a one-dimensional Newton
    step along the gradient, pushed through sigma, and the defining value is
    re-checked: equal for a symmetry or an odd order under a reversibility,
    equal up to sign (squared comparison) for even orders.
    """
    _require_same_dimension(F, sigma)
    box = box or F.domain
    rng = rng if rng is not None else np.random.default_rng(0)
    tower = build_tower(F, order)
    dj = tower.orders[order]
    fn = compile_scalar(dj)
    grad = compile_components([ex.differentiate(dj, i + 1) for i in range(F.dimension)])
    sig = compile_components(sigma.components)

    signed = kind is CheckKind.REVERSIBILITY and order % 2 == 0
    parts = []
    for L in levels:
        pts = _project_to_level(fn, grad, box, float(L), samples, eps_on, rng)
        if not pts:
            parts.append(Verdict.inconclusive(f"level {L}: no points found in the box"))
            continue
        images = sig(np.asarray(pts))
        vals = fn(images)
        if signed:
            residuals = np.abs(vals * vals - float(L) ** 2)
            label = f"level {L} (sign-free, even order)"
        else:
            residuals = np.abs(vals - float(L))
            label = f"level {L}"
        worst = int(np.argmax(residuals))
        if residuals[worst] < tol:
            parts.append(
                Verdict(
                    Status.HOLDS,
                    Certainty.PROBABILISTIC,
                    float(residuals[worst]),
                    (),
                    f"{label}: {len(pts)} points",
                )
            )
        else:
            order_idx = np.argsort(-residuals)[:3]
            witnesses = tuple((as_point(pts[i]), float(residuals[i])) for i in order_idx)
            parts.append(
                Verdict(Status.FAILS, Certainty.PROBABILISTIC, float(residuals[worst]), witnesses, label)
            )
    return combine(parts, notes=f"level-set invariance of order {order}")


def _project_to_level(fn, grad, box, L, samples, eps_on, rng, max_attempts_factor=50):
    pts = []
    attempts = 0
    limit = max_attempts_factor * samples
    while len(pts) < samples and attempts < limit:
        attempts += 1
        p = box.sample(rng, 1)[0]
        for _ in range(40):
            v = float(fn(p)) - L
            if abs(v) < eps_on:
                break
            g = grad(p)
            gg = float(np.dot(g, g))
            if not np.isfinite(gg) or gg < 1e-14:
                break
            p = p - (v / gg) * g
        if abs(float(fn(p)) - L) < eps_on and box.contains(p):
            pts.append(as_point(p))
    return pts


def check_delta_noninvertibility(
    F: VectorField,
    z0: Sequence,
    selection: Selection,
    sigma: Optional[SmoothMap] = None,
    tol_rel: float = SINGULAR_TOL,
) -> Verdict:
    """At a fixed point of a symmetry (or of any map whose selected sign
    matrix is the identity), the packed derivative map cannot be locally
    invertible: its Jacobian determinant must vanish.

    The verdict records, as an assumption, that the map is non-trivial in
    every neighbourhood of the fixed point; that is not decidable from a
    finite description.
    """
    if sigma is not None:
        image = sigma.apply([float(c) for c in z0])
        drift = float(np.linalg.norm(np.asarray(image) - np.asarray([float(c) for c in z0])))
        if drift >= FIXED_POINT_TOL:
            raise ValueError(f"z0 is not a fixed point of sigma (|sigma(z0)-z0| = {drift:.3g})")
    tower = build_tower(F, selection.max_order)
    delta = delta_map(tower, selection)
    n = delta.dimension
    entries = tuple(
        tuple(ex.differentiate(delta.components[i], j + 1) for j in range(n))
        for i in range(n)
    )
    J = JacobianMatrix(entries)
    assumption = "assumes sigma is non-trivial in every neighbourhood of z0"

    exact_possible = F.is_polynomial() and all(
        isinstance(c, (int, Fraction)) for c in z0
    )
    det_expr = J.det() if n <= 4 else None

    jac_fn = compile_matrix(entries)
    Jnum = jac_fn(np.asarray([float(c) for c in z0], dtype=float))
    minors = _minor_magnitudes(Jnum)
    scale = 1.0 + max(minors)
    threshold = tol_rel * scale

    if det_expr is not None and exact_possible:
        value = ex.evaluate_exact(det_expr, [Fraction(c) for c in z0])
        mag = abs(float(value))
        p = as_point([float(c) for c in z0])
        if value == 0:
            return Verdict(
                Status.HOLDS,
                Certainty.CERTAIN,
                0.0,
                (),
                f"det J_Delta(z0) = 0 exactly; {assumption}",
            )
        if mag < threshold:
            return Verdict(
                Status.HOLDS,
                Certainty.PROBABILISTIC,
                mag,
                (),
                f"|det J_Delta(z0)| = {mag:.3g} below threshold {threshold:.3g}; {assumption}",
            )
        return Verdict(
            Status.FAILS,
            Certainty.CERTAIN,
            mag,
            ((p, mag),),
            f"det J_Delta(z0) = {float(value):.6g} (threshold {threshold:.3g}); {assumption}",
        )

    det_val = abs(float(np.linalg.det(Jnum)))
    p = as_point([float(c) for c in z0])
    if det_val < threshold:
        return Verdict(
            Status.HOLDS,
            Certainty.PROBABILISTIC,
            det_val,
            (),
            f"|det J_Delta(z0)| = {det_val:.3g} below threshold {threshold:.3g}; {assumption}",
        )
    return Verdict(
        Status.FAILS,
        Certainty.PROBABILISTIC,
        det_val,
        ((p, det_val),),
        f"|det J_Delta(z0)| = {det_val:.3g} (threshold {threshold:.3g}); {assumption}",
    )


def _minor_magnitudes(J: np.ndarray) -> list:
    n = J.shape[0]
    if n == 1:
        return [1.0]
    out = []
    for i in range(n):
        for j in range(n):
            minor = np.delete(np.delete(J, i, axis=0), j, axis=1)
            out.append(abs(float(np.linalg.det(minor))) if minor.size else 1.0)
    return out
