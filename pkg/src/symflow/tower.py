"""Divergence-derivative towers along the flow, selections, sign matrices,
and the packed derivative maps they induce.

The tower lists the divergence and its successive derivatives along
solutions: order 0 is div F, order j+1 is the derivative of order j along
the flow (a Lie derivative).  A selection picks n tower orders; packing the
selected entries gives a map R^n -> R^n whose transformation law under
symmetries and reversibilities drives the structure checks.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from . import expr as ex
from .expr import Expression
from .fields import VectorField, divergence, lie_derivative
from .numeric import compile_components, rk4_final

NODE_BUDGET = 100_000
ORACLE_STEP = 1e-3
ESCAPE_INFLATION = 2.0


class TowerBudgetError(Exception):
    """A simplified tower entry exceeded the node budget."""


class TrajectoryEscape(Exception):
    """The flow left the (inflated) domain box during oracle integration."""


@dataclass(frozen=True)
class DivergenceTower:
    field: VectorField
    orders: Tuple[Expression, ...]

    @property
    def max_order(self) -> int:
        return len(self.orders) - 1

    def order(self, j: int) -> Expression:
        if not 0 <= j <= self.max_order:
            raise IndexError(f"tower holds orders 0..{self.max_order}, asked for {j}")
        return self.orders[j]


def build_tower(F: VectorField, max_order: int, node_budget: int = NODE_BUDGET) -> DivergenceTower:
    """Tower [D^(0), ..., D^(max_order)] with D^(j+1) = lie_derivative(D^(j), F)."""
    if max_order < 0:
        raise ValueError("max_order must be >= 0")
    orders = [divergence(F)]
    for _ in range(max_order):
        nxt = lie_derivative(orders[-1], F)
        if ex.node_count(nxt) > node_budget:
            raise TowerBudgetError(
                f"tower entry at order {len(orders)} has {ex.node_count(nxt)} nodes "
                f"(budget {node_budget})"
            )
        orders.append(nxt)
    if ex.node_count(orders[0]) > node_budget:
        raise TowerBudgetError("divergence alone exceeds the node budget")
    return DivergenceTower(F, tuple(orders))


@dataclass(frozen=True)
class Selection:
    """Strictly increasing choice of n tower orders."""

    entries: Tuple[int, ...]

    def __init__(self, entries: Sequence[int]):
        ent = tuple(int(k) for k in entries)
        if not ent:
            raise ValueError("a selection needs at least one entry")
        if any(k < 0 for k in ent):
            raise ValueError("selection entries must be nonnegative")
        if any(a >= b for a, b in zip(ent, ent[1:])):
            raise ValueError(f"selection must be strictly increasing, got {ent}")
        object.__setattr__(self, "entries", ent)

    @property
    def dimension(self) -> int:
        return len(self.entries)

    @property
    def max_order(self) -> int:
        return self.entries[-1]


def default_selection(dimension: int) -> Selection:
    """Orders (0, 1, ..., n-1): the divergence and its first n-1 derivatives."""
    return Selection(range(dimension))


@dataclass(frozen=True)
class SignMatrix:
    """Diagonal of (-1)^(order+1) over the selected orders: the sign law a
    reversibility imposes on each packed component."""

    diagonal: Tuple[int, ...]

    def __post_init__(self):
        if any(d not in (-1, 1) for d in self.diagonal):
            raise ValueError("sign matrix entries must be +-1")

    @property
    def is_identity(self) -> bool:
        return all(d == 1 for d in self.diagonal)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.diagonal, dtype=float)


def sign_matrix(selection: Selection) -> SignMatrix:
    return SignMatrix(tuple((-1) ** (k + 1) for k in selection.entries))


@dataclass(frozen=True)
class DeltaMap:
    """Selected tower entries packed into a map R^n -> R^n."""

    components: Tuple[Expression, ...]
    selection: Selection
    field: VectorField

    @property
    def dimension(self) -> int:
        return len(self.components)


def delta_map(tower: DivergenceTower, selection: Selection) -> DeltaMap:
    if selection.dimension != tower.field.dimension:
        raise ValueError(
            f"selection length {selection.dimension} != field dimension {tower.field.dimension}"
        )
    if selection.max_order > tower.max_order:
        raise IndexError(
            f"selection asks for order {selection.max_order}, tower stops at {tower.max_order}"
        )
    comps = tuple(tower.orders[k] for k in selection.entries)
    return DeltaMap(comps, selection, tower.field)


# second-order central stencils on 2j+1 points
_STENCILS = {
    0: {0: 1.0},
    1: {-1: -0.5, 1: 0.5},
    2: {-1: 1.0, 0: -2.0, 1: 1.0},
    3: {-2: -0.5, -1: 1.0, 1: -1.0, 2: 0.5},
    4: {-2: 1.0, -1: -4.0, 0: 6.0, 1: -4.0, 2: 1.0},
}


def tower_fd_oracle(F: VectorField, z: Sequence[float], order: int, h: float = ORACLE_STEP) -> float:
    """Finite-difference estimate of the order-j tower value at z.

    Independent cross-check: integrates the flow with RK4 and differences
    the divergence along it; never touches the symbolic tower.
    """
    if not 0 <= order <= 4:
        raise ValueError("oracle supports orders 0..4")
    if h <= 0:
        raise ValueError("step must be positive")
    if h**max(order, 1) == 0.0:
        raise ValueError("stencil underflow: step too small")
    div_fn = compile_components([divergence(F)])
    f = compile_components(F.components)
    guard = F.domain.inflate(ESCAPE_INFLATION)
    reach = max(abs(k) for k in _STENCILS[order])

    samples = {0: np.asarray(z, dtype=float)}
    for direction in (+1, -1):
        state = np.asarray(z, dtype=float)
        for k in range(1, reach + 1):
            state = rk4_final(f, state, direction * h, 1)
            if not np.all(np.isfinite(state)) or not guard.contains(state):
                raise TrajectoryEscape(
                    f"flow left the domain after {k} steps of {direction * h}"
                )
            samples[direction * k] = state

    acc = 0.0
    for offset, coeff in _STENCILS[order].items():
        value = float(div_fn(samples[offset])[0])
        if not np.isfinite(value):
            raise TrajectoryEscape("divergence not finite along the stencil")
        acc += coeff * value
    return acc / h**order if order > 0 else acc
