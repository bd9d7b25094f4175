"""Probabilistic and certain zero-identity testing."""

import numpy as np
import pytest
from hypothesis import given, settings

from symflow.expr import (
    Const,
    identically_zero,
    sampled_zero_verdict,
    simplify,
    sub,
)
from symflow.geometry import DomainBox
from symflow.parser import parse
from symflow.verdict import Certainty, Status

from conftest import poly_exprs


def test_odd_cube_certain():
    # f(x) = x^3: f(x) + f(-x) vanishes as a polynomial
    e = parse("x^3 + (-x)^3", 1)
    v = identically_zero(e, DomainBox.cube(-1, 1, 1))
    assert v.status is Status.HOLDS
    assert v.certainty is Certainty.CERTAIN
    assert v.residual_max == 0.0


def test_shifted_cube_fails_with_residual_two():
    # f(x) = x^3 + 1: f(x) + f(-x) = 2 everywhere
    e = parse("(x^3 + 1) + ((-x)^3 + 1)", 1)
    v = identically_zero(e, DomainBox.cube(-1, 1, 1))
    assert v.status is Status.FAILS
    assert v.certainty is Certainty.CERTAIN
    assert v.witnesses
    assert v.witnesses[0][1] == pytest.approx(2.0)


def test_taylor_remainder_probabilistic():
    # |sin x - x + x^3/6| = |x|^5/120 + O(|x|^7) < 1e-7 on [-0.1, 0.1],
    # so the identity "holds" at tolerance 1e-6 but only probabilistically
    assert 0.1**5 / 120 < 1e-7
    e = parse("sin(x) - x + x^3/6", 1)
    box = DomainBox.cube(-0.1, 0.1, 1)
    v = identically_zero(e, box, trials=200, tol=1e-6, rng=np.random.default_rng(0))
    assert v.status is Status.HOLDS
    assert v.certainty is Certainty.PROBABILISTIC
    assert v.residual_max < 1e-7


def test_taylor_remainder_fails_on_wider_box():
    # at x = 1 the remainder is sin(1) - 1 + 1/6 = 0.008 > 1e-6
    e = parse("sin(x) - x + x^3/6", 1)
    v = identically_zero(e, DomainBox.cube(-1.5, 1.5, 1), trials=400, tol=1e-6,
                         rng=np.random.default_rng(0))
    assert v.status is Status.FAILS
    assert v.witnesses


def test_transcendental_zero_is_only_probabilistic():
    # sin(x) - sin(x) cancels in canonical form, but the claim involves a
    # transcendental, so certainty stays probabilistic by policy
    e = parse("sin(x) - sin(x)", 1)
    v = identically_zero(e, DomainBox.cube(-1, 1, 1))
    assert v.status is Status.HOLDS
    assert v.certainty is Certainty.PROBABILISTIC
    assert v.residual_max == 0.0


def test_all_samples_error_is_inconclusive():
    e = parse("log(-1 - x^2)", 1)
    v = identically_zero(e, DomainBox.cube(-1, 1, 1), trials=50)
    assert v.status is Status.INCONCLUSIVE


def test_errors_are_skipped_and_counted():
    # log(x) errors on half the box; the rest decides the verdict
    e = parse("log(x) - log(x)", 1)
    v = identically_zero(e, DomainBox.cube(-1, 1, 1), trials=100,
                         rng=np.random.default_rng(1))
    assert v.status is Status.HOLDS
    assert "skipped" in v.notes


def test_residual_max_monotone_in_trials():
    e = parse("sin(x)*0.001", 1)
    box = DomainBox.cube(-1, 1, 1)
    previous = -1.0
    for trials in (10, 50, 200):
        v = sampled_zero_verdict(e, box, trials=trials, rng=np.random.default_rng(42))
        assert v.residual_max >= previous
        previous = v.residual_max


def test_requires_at_least_one_trial():
    with pytest.raises(ValueError):
        identically_zero(Const(0), DomainBox.cube(-1, 1, 1), trials=0)


@given(poly_exprs())
@settings(max_examples=50, deadline=None)
def test_expand_difference_is_certainly_zero(q):
    e = sub(q, simplify(q))
    v = identically_zero(e, DomainBox.cube(-2, 2, 2))
    assert v.status is Status.HOLDS
    assert v.certainty is Certainty.CERTAIN
