import numpy as np
import pytest
from hypothesis import strategies as st

from symflow.expr import Binary, Const, Unary, Var
from symflow.geometry import DomainBox
from symflow.parser import parse


@pytest.fixture
def box2():
    return DomainBox.cube(-2.0, 2.0, 2)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def p2(text):
    return parse(text, 2)


def p1(text):
    return parse(text, 1)


# --- hypothesis strategies -------------------------------------------------

_consts = st.fractions(min_value=-4, max_value=4, max_denominator=4).map(Const)
_vars2 = st.integers(min_value=1, max_value=2).map(Var)


def _binop(children):
    return st.builds(
        Binary,
        st.sampled_from(["add", "sub", "mul"]),
        children,
        children,
    )


def _powop(children):
    return st.builds(
        lambda b, k: Binary("pow", b, Const(k)),
        children,
        st.integers(min_value=0, max_value=3),
    )


def poly_exprs(max_leaves=12):
    """Random polynomial expression trees in two variables."""
    return st.recursive(
        st.one_of(_consts, _vars2),
        lambda children: st.one_of(
            _binop(children),
            _powop(children),
            st.builds(Unary, st.just("neg"), children),
        ),
        max_leaves=max_leaves,
    )


def smooth_exprs(max_leaves=10):
    """Random smooth trees: polynomials with occasional sin/cos/exp wrapping."""
    return st.recursive(
        st.one_of(_consts, _vars2),
        lambda children: st.one_of(
            _binop(children),
            _powop(children),
            st.builds(Unary, st.sampled_from(["neg", "sin", "cos"]), children),
        ),
        max_leaves=max_leaves,
    )
