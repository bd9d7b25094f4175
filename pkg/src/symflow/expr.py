"""Symbolic expression trees with exact rational arithmetic.

An expression is an immutable tree of Const / Var / Unary / Binary nodes.
``simplify`` rewrites a tree into a canonical form: a sum of monomials over
"atoms" (variables and irreducible function applications), expanded,
collected, and ordered graded-lexicographically.  For polynomial expressions
the canonical form is a normal form, so two polynomials are identical iff
their simplified trees are equal.  Transcendental identities beyond local
rewrites (constant folding, sign orientation of sin/cos arguments) are out of
scope and are only ever decided probabilistically, by sampling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key
from typing import Sequence, Union

import numpy as np

from .geometry import DomainBox
from .verdict import Certainty, Status, Verdict

UNARY_OPS = ("neg", "sin", "cos", "exp", "log", "sqrt")
BINARY_OPS = ("add", "sub", "mul", "div", "pow")

DEFAULT_TRIALS = 200
ZERO_TOL_REL = 1e-9  # identically_zero: tol = ZERO_TOL_REL * (1 + subterm scale)
WITNESS_CAP = 3


class ExprError(Exception):
    """Malformed expression or unsupported symbolic operation."""


class EvaluationError(ExprError):
    """Numeric evaluation hit a domain violation (division by zero, log <= 0, ...)."""

    def __init__(self, message: str, subtree: "Expression"):
        super().__init__(f"{message}: {to_string(subtree)}")
        self.subtree = subtree


@dataclass(frozen=True)
class Const:
    value: Fraction

    def __post_init__(self):
        if not isinstance(self.value, Fraction):
            object.__setattr__(self, "value", Fraction(self.value))


@dataclass(frozen=True)
class Var:
    index: int  # 1-based

    def __post_init__(self):
        if self.index < 1:
            raise ExprError(f"variable index must be >= 1, got {self.index}")


@dataclass(frozen=True)
class Unary:
    op: str
    arg: "Expression"

    def __post_init__(self):
        if self.op not in UNARY_OPS:
            raise ExprError(f"unknown unary operator {self.op!r}")


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Expression"
    right: "Expression"

    def __post_init__(self):
        if self.op not in BINARY_OPS:
            raise ExprError(f"unknown binary operator {self.op!r}")
        if self.op == "pow" and not isinstance(self.right, Const):
            raise ExprError("pow exponent must be a rational constant")


Expression = Union[Const, Var, Unary, Binary]

ZERO = Const(Fraction(0))
ONE = Const(Fraction(1))


def const(value) -> Const:
    return Const(Fraction(value))


def add(a: Expression, b: Expression) -> Binary:
    return Binary("add", a, b)


def sub(a: Expression, b: Expression) -> Binary:
    return Binary("sub", a, b)


def mul(a: Expression, b: Expression) -> Binary:
    return Binary("mul", a, b)


def div(a: Expression, b: Expression) -> Binary:
    return Binary("div", a, b)


def pow_(a: Expression, exponent) -> Binary:
    return Binary("pow", a, Const(Fraction(exponent)))


def neg(a: Expression) -> Unary:
    return Unary("neg", a)


# ---------------------------------------------------------------------------
# tree utilities
# ---------------------------------------------------------------------------


def node_count(e: Expression) -> int:
    if isinstance(e, (Const, Var)):
        return 1
    if isinstance(e, Unary):
        return 1 + node_count(e.arg)
    return 1 + node_count(e.left) + node_count(e.right)


def max_var_index(e: Expression) -> int:
    if isinstance(e, Const):
        return 0
    if isinstance(e, Var):
        return e.index
    if isinstance(e, Unary):
        return max_var_index(e.arg)
    return max(max_var_index(e.left), max_var_index(e.right))


def is_polynomial(e: Expression) -> bool:
    """True iff e is syntactically a polynomial with rational coefficients.

    Division is allowed only by nonzero constants, pow only with nonnegative
    integer exponents.  This is the fragment where canonical forms decide
    identities with certainty.
    """
    if isinstance(e, (Const, Var)):
        return True
    if isinstance(e, Unary):
        return e.op == "neg" and is_polynomial(e.arg)
    if e.op in ("add", "sub", "mul"):
        return is_polynomial(e.left) and is_polynomial(e.right)
    if e.op == "div":
        return (
            is_polynomial(e.left)
            and isinstance(e.right, Const)
            and e.right.value != 0
        )
    if e.op == "pow":
        q = e.right.value
        return q.denominator == 1 and q >= 0 and is_polynomial(e.left)
    return False


# ---------------------------------------------------------------------------
# printing
# ---------------------------------------------------------------------------

_PREC_ADD = 10
_PREC_MUL = 20
_PREC_NEG = 25
_PREC_POW = 40
_PREC_ATOM = 100


def _precedence(e: Expression) -> int:
    if isinstance(e, Const):
        return _PREC_NEG if e.value < 0 else (_PREC_MUL if e.value.denominator != 1 else _PREC_ATOM)
    if isinstance(e, Var):
        return _PREC_ATOM
    if isinstance(e, Unary):
        return _PREC_NEG if e.op == "neg" else _PREC_ATOM
    return {"add": _PREC_ADD, "sub": _PREC_ADD, "mul": _PREC_MUL, "div": _PREC_MUL, "pow": _PREC_POW}[e.op]


def _wrap(e: Expression, context_prec: int) -> str:
    s = to_string(e)
    if _precedence(e) < context_prec:
        return f"({s})"
    return s


def to_string(e: Expression) -> str:
    """Deterministic infix rendering; parses back to the same tree."""
    if isinstance(e, Const):
        v = e.value
        if v.denominator == 1:
            return str(v.numerator)
        return f"{v.numerator}/{v.denominator}"
    if isinstance(e, Var):
        return f"z{e.index}" if e.index > 3 else "xyz"[e.index - 1]
    if isinstance(e, Unary):
        if e.op == "neg":
            return "-" + _wrap(e.arg, _PREC_NEG + 1)
        return f"{e.op}({to_string(e.arg)})"
    if e.op == "add":
        return f"{_wrap(e.left, _PREC_ADD)} + {_wrap(e.right, _PREC_ADD + 1)}"
    if e.op == "sub":
        return f"{_wrap(e.left, _PREC_ADD)} - {_wrap(e.right, _PREC_ADD + 1)}"
    if e.op == "mul":
        return f"{_wrap(e.left, _PREC_MUL)}*{_wrap(e.right, _PREC_MUL + 1)}"
    if e.op == "div":
        return f"{_wrap(e.left, _PREC_MUL)}/{_wrap(e.right, _PREC_MUL + 1)}"
    # pow: base needs parens unless it is a plain positive-integer Const, Var
    # or function call; exponent gets parens unless a nonnegative integer
    base = _wrap(e.left, _PREC_ATOM)
    q = e.right.value
    if q.denominator == 1 and q >= 0:
        return f"{base}^{q.numerator}"
    return f"{base}^({to_string(e.right)})"


for _cls in (Const, Var, Unary, Binary):
    _cls.__str__ = to_string


# ---------------------------------------------------------------------------
# canonical form
#
# A normal form (NF) maps monomials to rational coefficients.  A monomial is
# a sorted tuple of (base key, exponent) factors with nonzero rational
# exponents.  Base keys:
#   ("v", i)            variable i
#   ("f", name, expr)   sin/cos/exp/log applied to a canonical argument
#   ("e", expr)         composite base kept opaque under a non-integer or
#                       negative power (no sound expansion exists)
# ---------------------------------------------------------------------------

_FUNC_RANK = {"sin": 0, "cos": 1, "exp": 2, "log": 3}


def _base_sort_key(bk) -> tuple:
    if bk[0] == "v":
        return (0, bk[1], "")
    if bk[0] == "f":
        return (1, _FUNC_RANK[bk[1]], to_string(bk[2]))
    return (2, 0, to_string(bk[1]))


def _term_cmp(m1, m2) -> int:
    # graded lexicographic, "larger" monomial first
    g1 = sum(e for _, e in m1)
    g2 = sum(e for _, e in m2)
    if g1 != g2:
        return -1 if g1 > g2 else 1
    i = j = 0
    while i < len(m1) or j < len(m2):
        k1 = _base_sort_key(m1[i][0]) if i < len(m1) else None
        k2 = _base_sort_key(m2[j][0]) if j < len(m2) else None
        if k1 is not None and (k2 is None or k1 < k2):
            e1, e2 = m1[i][1], Fraction(0)
            i += 1
        elif k2 is not None and (k1 is None or k2 < k1):
            e1, e2 = Fraction(0), m2[j][1]
            j += 1
        else:
            e1, e2 = m1[i][1], m2[j][1]
            i += 1
            j += 1
        if e1 != e2:
            return -1 if e1 > e2 else 1
    return 0


_MONO_ONE = ()


def _nf_const(c: Fraction) -> dict:
    return {_MONO_ONE: c} if c != 0 else {}


def _nf_add(a: dict, b: dict) -> dict:
    out = dict(a)
    for m, c in b.items():
        s = out.get(m, Fraction(0)) + c
        if s == 0:
            out.pop(m, None)
        else:
            out[m] = s
    return out


def _nf_scale(a: dict, c: Fraction) -> dict:
    if c == 0:
        return {}
    return {m: k * c for m, k in a.items()}


def _mono_mul(m1, m2):
    factors = dict(m1)
    for bk, e in m2:
        s = factors.get(bk, Fraction(0)) + e
        if s == 0:
            factors.pop(bk, None)
        else:
            factors[bk] = s
    return tuple(sorted(factors.items(), key=lambda f: _base_sort_key(f[0])))


def _nf_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for m1, c1 in a.items():
        for m2, c2 in b.items():
            m = _mono_mul(m1, m2)
            s = out.get(m, Fraction(0)) + c1 * c2
            if s == 0:
                out.pop(m, None)
            else:
                out[m] = s
    return out


def _nf_is_constant(a: dict) -> bool:
    return len(a) == 0 or (len(a) == 1 and _MONO_ONE in a)


def _nf_leading_negative(a: dict) -> bool:
    if not a:
        return False
    lead = min(a.keys(), key=cmp_to_key(_term_cmp))
    return a[lead] < 0


def _int_nth_root(n: int, r: int):
    if n < 0:
        return None
    if n in (0, 1):
        return n
    x = round(n ** (1.0 / r))
    for cand in (x - 1, x, x + 1):
        if cand >= 0 and cand**r == n:
            return cand
    return None


def _rational_root(c: Fraction, q: Fraction):
    """c**q as an exact Fraction, or None when no exact value exists."""
    p, r = q.numerator, q.denominator
    if c == 0:
        return Fraction(0) if p > 0 else None
    sign = 1
    if c < 0:
        if r % 2 == 0:
            return None
        sign = -1
        c = -c
    rn = _int_nth_root(c.numerator, r)
    rd = _int_nth_root(c.denominator, r)
    if rn is None or rd is None:
        return None
    root = Fraction(sign * rn, rd)
    return root**p


def _nf_invert(a: dict) -> dict:
    if not a:
        raise ExprError("division by an expression that simplifies to zero")
    if _nf_is_constant(a):
        return _nf_const(1 / a[_MONO_ONE])
    if len(a) == 1:
        ((m, c),) = a.items()
        inv = tuple(
            sorted(((bk, -e) for bk, e in m), key=lambda f: _base_sort_key(f[0]))
        )
        return {inv: 1 / c}
    return {((("e", _nf_to_expr(a)), Fraction(-1)),): Fraction(1)}


def _nf_pow(a: dict, q: Fraction) -> dict:
    if q == 0:
        return _nf_const(Fraction(1))  # u^0 -> 1 (a.e. convention)
    if _nf_is_constant(a):
        c = a.get(_MONO_ONE, Fraction(0))
        if q.denominator == 1:
            k = int(q)
            if c == 0 and k < 0:
                raise ExprError("zero raised to a negative power")
            return _nf_const(c**k)
        root = _rational_root(c, q)
        if root is not None:
            return _nf_const(root)
        return {((("e", _nf_to_expr(a)), q),): Fraction(1)}
    if q.denominator == 1:
        k = int(q)
        if k < 0:
            return _nf_pow(_nf_invert(a), Fraction(-k))
        out = _nf_const(Fraction(1))
        base = a
        while k:
            if k & 1:
                out = _nf_mul(out, base)
            k >>= 1
            if k:
                base = _nf_mul(base, base)
        return out
    # fractional exponent: only u^q with a bare base is kept open; exponents
    # merge only under integer outer powers (sound a.e.), so (x^2)^(1/2)
    # stays opaque rather than collapsing to x
    if len(a) == 1:
        ((m, c),) = a.items()
        if c == 1 and len(m) == 1 and m[0][1] == 1:
            return {((m[0][0], q),): Fraction(1)}
    return {((("e", _nf_to_expr(a)), q),): Fraction(1)}


def _nf_func(name: str, arg: dict) -> dict:
    if name == "sin" and not arg:
        return {}
    if name in ("cos", "exp") and not arg:
        return _nf_const(Fraction(1))
    if name == "log" and arg == _nf_const(Fraction(1)):
        return {}
    if name in ("sin", "cos") and _nf_leading_negative(arg):
        inner = _nf_func(name, _nf_scale(arg, Fraction(-1)))
        return _nf_scale(inner, Fraction(-1)) if name == "sin" else inner
    atom = ("f", name, _nf_to_expr(arg))
    return {((atom, Fraction(1)),): Fraction(1)}


def _to_nf(e: Expression) -> dict:
    if isinstance(e, Const):
        return _nf_const(e.value)
    if isinstance(e, Var):
        return {((("v", e.index), Fraction(1)),): Fraction(1)}
    if isinstance(e, Unary):
        if e.op == "neg":
            return _nf_scale(_to_nf(e.arg), Fraction(-1))
        if e.op == "sqrt":
            return _nf_pow(_to_nf(e.arg), Fraction(1, 2))
        return _nf_func(e.op, _to_nf(e.arg))
    if e.op == "add":
        return _nf_add(_to_nf(e.left), _to_nf(e.right))
    if e.op == "sub":
        return _nf_add(_to_nf(e.left), _nf_scale(_to_nf(e.right), Fraction(-1)))
    if e.op == "mul":
        return _nf_mul(_to_nf(e.left), _to_nf(e.right))
    if e.op == "div":
        return _nf_mul(_to_nf(e.left), _nf_invert(_to_nf(e.right)))
    return _nf_pow(_to_nf(e.left), e.right.value)


def _base_to_expr(bk) -> Expression:
    if bk[0] == "v":
        return Var(bk[1])
    if bk[0] == "f":
        return Unary(bk[1], bk[2])
    return bk[1]


def _factor_to_expr(bk, e: Fraction) -> Expression:
    base = _base_to_expr(bk)
    if e == 1:
        return base
    return Binary("pow", base, Const(e))


def _term_to_expr(coeff: Fraction, mono) -> Expression:
    factors = [_factor_to_expr(bk, e) for bk, e in mono]
    if not factors:
        return Const(coeff)
    if coeff == 1:
        tree = factors[0]
        rest = factors[1:]
    elif coeff == -1:
        inner = factors[0]
        for f in factors[1:]:
            inner = mul(inner, f)
        return neg(inner)
    else:
        tree = Const(coeff)
        rest = factors
    for f in rest:
        tree = mul(tree, f)
    return tree


def _nf_to_expr(nf: dict) -> Expression:
    if not nf:
        return ZERO
    terms = sorted(nf.keys(), key=cmp_to_key(_term_cmp))
    first = terms[0]
    tree = _term_to_expr(nf[first], first)
    for m in terms[1:]:
        c = nf[m]
        if c < 0:
            tree = sub(tree, _term_to_expr(-c, m))
        else:
            tree = add(tree, _term_to_expr(c, m))
    return tree


def simplify(e: Expression) -> Expression:
    """Canonical form: expanded, collected, graded-lex ordered.  Idempotent."""
    return _nf_to_expr(_to_nf(e))


def is_zero(e: Expression) -> bool:
    return isinstance(e, Const) and e.value == 0


# ---------------------------------------------------------------------------
# calculus
# ---------------------------------------------------------------------------


def _d(e: Expression, var: int) -> Expression:
    if isinstance(e, Const):
        return ZERO
    if isinstance(e, Var):
        return ONE if e.index == var else ZERO
    if isinstance(e, Unary):
        u, du = e.arg, _d(e.arg, var)
        if e.op == "neg":
            return neg(du)
        if e.op == "sin":
            return mul(Unary("cos", u), du)
        if e.op == "cos":
            return neg(mul(Unary("sin", u), du))
        if e.op == "exp":
            return mul(Unary("exp", u), du)
        if e.op == "log":
            return div(du, u)
        return div(du, mul(const(2), Unary("sqrt", u)))
    if e.op == "add":
        return add(_d(e.left, var), _d(e.right, var))
    if e.op == "sub":
        return sub(_d(e.left, var), _d(e.right, var))
    if e.op == "mul":
        return add(mul(_d(e.left, var), e.right), mul(e.left, _d(e.right, var)))
    if e.op == "div":
        num = sub(mul(_d(e.left, var), e.right), mul(e.left, _d(e.right, var)))
        return div(num, pow_(e.right, 2))
    q = e.right.value
    if q == 0:
        return ZERO
    return mul(mul(Const(q), Binary("pow", e.left, Const(q - 1))), _d(e.left, var))


def differentiate(e: Expression, var: int) -> Expression:
    """Exact partial derivative with respect to variable `var` (1-based)."""
    if var < 1:
        raise ExprError(f"variable index must be >= 1, got {var}")
    return simplify(_d(e, var))


def _subst(e: Expression, maps: Sequence[Expression]) -> Expression:
    if isinstance(e, Const):
        return e
    if isinstance(e, Var):
        return maps[e.index - 1]
    if isinstance(e, Unary):
        return Unary(e.op, _subst(e.arg, maps))
    return Binary(e.op, _subst(e.left, maps), _subst(e.right, maps))


def compose(e: Expression, maps: Sequence[Expression]) -> Expression:
    """Substitute maps[i-1] for variable i throughout, then simplify."""
    k = max_var_index(e)
    if k > len(maps):
        raise ExprError(f"expression uses variable {k} but only {len(maps)} components given")
    return simplify(_subst(e, maps))


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------


def _eval(e: Expression, coords: Sequence[float], scale: list) -> float:
    if isinstance(e, Const):
        v = float(e.value)
    elif isinstance(e, Var):
        if e.index > len(coords):
            raise EvaluationError(f"point has {len(coords)} coordinates", e)
        v = float(coords[e.index - 1])
    elif isinstance(e, Unary):
        u = _eval(e.arg, coords, scale)
        if e.op == "neg":
            v = -u
        elif e.op == "sin":
            v = math.sin(u)
        elif e.op == "cos":
            v = math.cos(u)
        elif e.op == "exp":
            try:
                v = math.exp(u)
            except OverflowError:
                raise EvaluationError("exp overflow", e) from None
        elif e.op == "log":
            if u <= 0.0:
                raise EvaluationError("log of a non-positive value", e)
            v = math.log(u)
        else:
            if u < 0.0:
                raise EvaluationError("sqrt of a negative value", e)
            v = math.sqrt(u)
    else:
        a = _eval(e.left, coords, scale)
        if e.op == "pow":
            q = e.right.value
            try:
                if q.denominator == 1:
                    if a == 0.0 and q < 0:
                        raise EvaluationError("zero base with negative exponent", e)
                    v = a ** int(q)
                else:
                    if a < 0.0:
                        raise EvaluationError("negative base with fractional exponent", e)
                    if a == 0.0 and q < 0:
                        raise EvaluationError("zero base with negative exponent", e)
                    v = a ** float(q)
            except OverflowError:
                raise EvaluationError("pow overflow", e) from None
        else:
            b = _eval(e.right, coords, scale)
            if e.op == "add":
                v = a + b
            elif e.op == "sub":
                v = a - b
            elif e.op == "mul":
                v = a * b
            else:
                if b == 0.0:
                    raise EvaluationError("division by zero", e)
                v = a / b
    if not math.isfinite(v):
        raise EvaluationError("non-finite intermediate value", e)
    av = abs(v)
    if av > scale[0]:
        scale[0] = av
    return v


def evaluate(e: Expression, point: Sequence[float]) -> float:
    """IEEE double evaluation at a point; raises EvaluationError on domain faults."""
    return _eval(e, tuple(point), [0.0])


def evaluate_scaled(e: Expression, point: Sequence[float]) -> tuple:
    """(value, max absolute subterm magnitude) - the scale feeds relative tolerances."""
    scale = [0.0]
    v = _eval(e, tuple(point), scale)
    return v, scale[0]


def evaluate_exact(e: Expression, point: Sequence) -> Fraction:
    """Exact rational evaluation; requires a rational-only tree and rational coordinates."""
    coords = tuple(Fraction(c) for c in point)

    def run(node: Expression) -> Fraction:
        if isinstance(node, Const):
            return node.value
        if isinstance(node, Var):
            if node.index > len(coords):
                raise EvaluationError(f"point has {len(coords)} coordinates", node)
            return coords[node.index - 1]
        if isinstance(node, Unary):
            if node.op != "neg":
                raise ExprError(f"{node.op} has no exact rational value")
            return -run(node.arg)
        a = run(node.left)
        if node.op == "pow":
            q = node.right.value
            if q.denominator != 1:
                root = _rational_root(a, q)
                if root is None:
                    raise ExprError("fractional power has no exact rational value")
                return root
            if a == 0 and q < 0:
                raise EvaluationError("zero base with negative exponent", node)
            return a ** int(q)
        b = run(node.right)
        if node.op == "add":
            return a + b
        if node.op == "sub":
            return a - b
        if node.op == "mul":
            return a * b
        if b == 0:
            raise EvaluationError("division by zero", node)
        return a / b

    return run(e)


# ---------------------------------------------------------------------------
# identity testing
# ---------------------------------------------------------------------------


def _top_witnesses(records: list) -> tuple:
    records.sort(key=lambda w: -w[1])
    return tuple(records[:WITNESS_CAP])


def sampled_zero_verdict(
    e: Expression,
    box: DomainBox,
    trials: int = DEFAULT_TRIALS,
    tol: float | None = None,
    rng=None,
) -> Verdict:
    """Probabilistic zero test: sample `trials` uniform points in `box`.

    The default tolerance is relative to the largest sampled subterm
    magnitude, so the test is scale-free across coefficient sizes; pass `tol`
    for an absolute threshold.  Evaluation errors are skipped and counted; if
    every sample errors the verdict is inconclusive.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = rng if rng is not None else np.random.default_rng(0)
    pts = box.sample(rng, trials)
    records = []
    worst = 0.0
    scale = 0.0
    errors = 0
    for row in pts:
        p = tuple(float(c) for c in row)
        try:
            v, s = evaluate_scaled(e, p)
        except EvaluationError:
            errors += 1
            continue
        records.append((p, abs(v)))
        worst = max(worst, abs(v))
        scale = max(scale, s)
    if not records:
        return Verdict.inconclusive(f"all {trials} sample evaluations failed")
    tol_eff = tol if tol is not None else ZERO_TOL_REL * (1.0 + scale)
    notes = f"sampled {len(records)}/{trials} points, tol {tol_eff:.3g}"
    if errors:
        notes += f", {errors} evaluation errors skipped"
    if worst < tol_eff:
        return Verdict(Status.HOLDS, Certainty.PROBABILISTIC, worst, (), notes)
    bad = [w for w in records if w[1] >= tol_eff]
    return Verdict(Status.FAILS, Certainty.PROBABILISTIC, worst, _top_witnesses(bad), notes)


def _certain_nonzero_witnesses(canonical: Expression, box: DomainBox, trials: int, rng) -> tuple:
    pts = box.sample(rng, trials)
    records = []
    for row in pts:
        p = tuple(float(c) for c in row)
        try:
            v = evaluate(canonical, p)
        except EvaluationError:
            continue
        records.append((p, abs(v)))
    nonzero = [w for w in records if w[1] > 0.0]
    if nonzero:
        return _top_witnesses(nonzero)
    # a nonzero polynomial vanishes only on a null set; fall back to a
    # deterministic rational probe so the fails verdict always carries a witness
    n = max(max_var_index(canonical), 1)
    for k in range(1, 50):
        p = tuple(Fraction(2 * k + i, 2 * k + i + 1) for i in range(n))
        v = evaluate_exact(canonical, p)
        if v != 0:
            return ((tuple(float(c) for c in p), abs(float(v))),)
    return _top_witnesses(records) if records else ((tuple(0.0 for _ in range(n)), 0.0),)


def identically_zero(
    e: Expression,
    box: DomainBox,
    trials: int = DEFAULT_TRIALS,
    tol: float | None = None,
    rng=None,
) -> Verdict:
    """Decide whether e vanishes identically on the box.

    Polynomial expressions are decided with certainty through the canonical
    form; anything containing transcendental functions, quotients by
    non-constants, or fractional powers is sampled and the verdict is only
    ever probabilistic.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = rng if rng is not None else np.random.default_rng(0)
    if is_polynomial(e):
        s = simplify(e)
        if is_zero(s):
            return Verdict(Status.HOLDS, Certainty.CERTAIN, 0.0, (), "zero polynomial")
        witnesses = _certain_nonzero_witnesses(s, box, trials, rng)
        worst = max((w[1] for w in witnesses), default=0.0)
        return Verdict(
            Status.FAILS,
            Certainty.CERTAIN,
            worst,
            witnesses,
            f"nonzero canonical form {to_string(s)}",
        )
    return sampled_zero_verdict(e, box, trials, tol, rng)
