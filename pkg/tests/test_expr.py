"""Expression core: simplification, calculus, evaluation."""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings

from symflow.expr import (
    Binary,
    Const,
    EvaluationError,
    ExprError,
    Var,
    compose,
    differentiate,
    evaluate,
    evaluate_exact,
    is_polynomial,
    simplify,
    to_string,
)
from symflow.parser import parse

from conftest import p1, p2, poly_exprs, smooth_exprs


class TestSimplify:
    def test_collects_like_terms(self):
        assert simplify(p2("x + x")) == p2("2*x")

    def test_polynomial_cancellation(self):
        assert simplify(p2("(x+y)^2 - x^2 - 2*x*y - y^2")) == Const(0)

    def test_commutativity_cancels(self):
        e = p2("3*x*2*y - 2*y*3*x")
        assert simplify(e) == Const(0)

    def test_graded_lex_order(self):
        # degree-2 terms precede degree-1, ties broken by the first variable
        assert to_string(simplify(p2("y + x^2 + x*y + x"))) == "x^2 + x*y + x + y"

    def test_idempotent(self):
        e = simplify(p2("(1 - 2*y)*x + sin(-x)"))
        assert simplify(e) == e

    def test_sin_sign_orientation(self):
        assert simplify(p2("sin(-x) + sin(x)")) == Const(0)
        assert simplify(p2("cos(-x) - cos(x)")) == Const(0)

    def test_constant_folding_inside_functions(self):
        assert simplify(p1("sin(0)")) == Const(0)
        assert simplify(p1("cos(0)")) == Const(1)
        assert simplify(p1("exp(0)")) == Const(1)
        assert simplify(p1("log(1)")) == Const(0)

    def test_sqrt_normalizes_to_half_power(self):
        assert simplify(p1("sqrt(x)")) == Binary("pow", Var(1), Const(Fraction(1, 2)))
        assert simplify(p1("sqrt(4)")) == Const(2)
        assert simplify(p1("sqrt(x)*sqrt(x)")) == Var(1)

    def test_squared_base_does_not_collapse_under_sqrt(self):
        # (x^2)^(1/2) is |x|, not x; the form must stay opaque
        e = simplify(p1("(x^2)^(1/2)"))
        assert e != Var(1)
        assert evaluate(e, (-2.0,)) == pytest.approx(2.0)

    def test_division_by_constant_folds(self):
        assert simplify(p2("2*y/3")) == simplify(p2("(2/3)*y"))

    def test_variable_cancellation_in_quotients(self):
        assert simplify(p1("x/x")) == Const(1)

    def test_division_by_symbolic_zero_raises(self):
        with pytest.raises(ExprError):
            simplify(p1("1/(x - x)"))

    @given(poly_exprs())
    @settings(max_examples=60, deadline=None)
    def test_idempotence_property(self, e):
        s = simplify(e)
        assert simplify(s) == s

    @given(smooth_exprs())
    @settings(max_examples=60, deadline=None)
    def test_value_preserved(self, e):
        rng = np.random.default_rng(7)
        s = simplify(e)
        for _ in range(3):
            p = tuple(rng.uniform(-1.5, 1.5, 2))
            try:
                a = evaluate(e, p)
            except EvaluationError:
                continue
            b = evaluate(s, p)
            assert abs(a - b) <= 1e-12 * (1 + abs(a))


class TestPolynomialDetection:
    @pytest.mark.parametrize(
        "text,expected",
        [
            ("x^2 + 2*y", True),
            ("x/2", True),
            ("x/y", False),
            ("x^(-1)", False),
            ("x^(1/2)", False),
            ("sin(x)", False),
            ("-(x*y)", True),
        ],
    )
    def test_fragment(self, text, expected):
        assert is_polynomial(p2(text)) is expected


class TestDifferentiate:
    def test_power_rule(self):
        assert differentiate(p2("y + x^2"), 1) == p2("2*x")

    def test_worked_partial(self):
        assert differentiate(p2("2*y + 2*x^2"), 2) == Const(2)

    def test_product_chain(self):
        assert differentiate(p2("sin(x)*y"), 1) == simplify(p2("cos(x)*y"))

    def test_quotient_rule(self):
        d = differentiate(p2("x/y"), 2)
        for pt in [(1.0, 2.0), (0.5, -1.5)]:
            assert evaluate(d, pt) == pytest.approx(-pt[0] / pt[1] ** 2)

    def test_log_sqrt(self):
        assert evaluate(differentiate(p1("log(x)"), 1), (2.0,)) == pytest.approx(0.5)
        assert evaluate(differentiate(p1("sqrt(x)"), 1), (4.0,)) == pytest.approx(0.25)

    @given(poly_exprs(max_leaves=8))
    @settings(max_examples=40, deadline=None)
    def test_against_central_differences(self, e):
        rng = np.random.default_rng(3)
        d = differentiate(e, 1)
        h = 1e-6
        for _ in range(2):
            x, y = rng.uniform(-1.0, 1.0, 2)
            fd = (evaluate(e, (x + h, y)) - evaluate(e, (x - h, y))) / (2 * h)
            sym = evaluate(d, (x, y))
            assert abs(fd - sym) <= 1e-5 * (1 + abs(sym)) + 1e-7


class TestEvaluate:
    def test_basic(self):
        assert evaluate(p2("2*x"), (3, 5)) == 6
        assert evaluate(p2("2*y + 2*x^2"), (1, 1)) == 4

    def test_division_by_zero(self):
        with pytest.raises(EvaluationError):
            evaluate(p2("1/x"), (0, 1))

    def test_log_domain(self):
        with pytest.raises(EvaluationError):
            evaluate(p1("log(x)"), (-1.0,))

    def test_negative_base_fractional_power(self):
        with pytest.raises(EvaluationError):
            evaluate(p1("x^(1/2)"), (-1.0,))

    def test_exact_rational(self):
        v = evaluate_exact(p2("x^2/3 + y"), (Fraction(1, 2), Fraction(1, 3)))
        assert v == Fraction(1, 12) + Fraction(1, 3)

    def test_exact_rejects_transcendentals(self):
        with pytest.raises(ExprError):
            evaluate_exact(p1("sin(x)"), (Fraction(0),))


class TestCompose:
    def test_sign_flip(self):
        assert compose(p2("2*x"), [p2("-x"), p2("y")]) == p2("-2*x")

    def test_product_preserved(self):
        # the swap-and-scale map leaves x*y unchanged
        m = [p2("2*y/3"), p2("3*x/2")]
        assert compose(p2("x*y"), m) == simplify(p2("x*y"))

    def test_identity(self):
        assert compose(p2("x"), [p2("x"), p2("y")]) == Var(1)

    def test_dimension_mismatch(self):
        with pytest.raises(ExprError):
            compose(p2("x + y"), [p2("x")])

    @given(poly_exprs(max_leaves=8))
    @settings(max_examples=40, deadline=None)
    def test_identity_map_fixes_everything(self, e):
        assert compose(e, [Var(1), Var(2)]) == simplify(e)


class TestPrinting:
    @pytest.mark.parametrize(
        "text",
        [
            "x^2 + y",
            "2/3*x*y",
            "-(y*sin(x))",
            "x^(-1)",
            "x^(1/2)",
            "3*x^2 - 2*y + 1/2",
            "-2*x",
            "-x",
            "x^2*y^3 - 12*x*y + 1",
        ],
    )
    def test_round_trip_on_canonical_forms(self, text):
        e = simplify(parse(text, 2))
        assert parse(to_string(e), 2) == e

    @given(poly_exprs())
    @settings(max_examples=60, deadline=None)
    def test_round_trip_property(self, e):
        s = simplify(e)
        assert parse(to_string(s), 2) == s
