"""Compiled numeric evaluation and shared numerical kernels.

Expressions compile to numpy callables operating on points of shape
(..., n), so the same compiled function serves single points and large
Monte-Carlo batches.  Domain faults (division by zero, log of a negative)
surface as non-finite entries rather than exceptions; callers mask them.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .expr import Const, Expression, Unary, Var


def _emit(e: Expression) -> str:
    if isinstance(e, Const):
        return repr(float(e.value))
    if isinstance(e, Var):
        return f"Z[..., {e.index - 1}]"
    if isinstance(e, Unary):
        u = _emit(e.arg)
        if e.op == "neg":
            return f"(-{u})"
        return f"_np.{e.op}({u})"
    a = _emit(e.left)
    if e.op == "pow":
        q = e.right.value
        if q.denominator == 1:
            return f"({a})**({int(q)})"
        return f"_np.float_power({a}, {float(q)!r})"
    b = _emit(e.right)
    sym = {"add": "+", "sub": "-", "mul": "*", "div": "/"}[e.op]
    return f"(({a}){sym}({b}))"


def compile_components(exprs: Sequence[Expression]) -> Callable[[np.ndarray], np.ndarray]:
    """Compile expressions into f(Z) -> values, Z shape (..., n) -> (..., k)."""
    parts = ", ".join(f"_b + ({_emit(e)})" for e in exprs)
    src = (
        "def _f(Z):\n"
        "    Z = _np.asarray(Z, dtype=float)\n"
        "    _b = Z[..., 0] * 0.0\n"
        "    with _np.errstate(all='ignore'):\n"
        f"        return _np.stack([{parts}], axis=-1)\n"
    )
    ns: dict = {"_np": np}
    exec(src, ns)
    fn = ns["_f"]
    fn.source = src
    return fn


def compile_matrix(entries: Sequence[Sequence[Expression]]) -> Callable[[np.ndarray], np.ndarray]:
    """Compile a grid of expressions into f(Z) -> (..., rows, cols)."""
    rows = len(entries)
    cols = len(entries[0])
    flat = [e for row in entries for e in row]
    fn = compile_components(flat)

    def run(Z: np.ndarray) -> np.ndarray:
        vals = fn(Z)
        return vals.reshape(vals.shape[:-1] + (rows, cols))

    return run


def compile_scalar(e: Expression) -> Callable[[np.ndarray], np.ndarray]:
    fn = compile_components([e])

    def run(Z: np.ndarray) -> np.ndarray:
        return fn(Z)[..., 0]

    return run


# ---------------------------------------------------------------------------
# Runge-Kutta kernels (classic fixed-step RK4); batched over leading axes
# ---------------------------------------------------------------------------


def rk4_step(f: Callable, z: np.ndarray, h: float) -> np.ndarray:
    k1 = f(z)
    k2 = f(z + 0.5 * h * k1)
    k3 = f(z + 0.5 * h * k2)
    k4 = f(z + h * k3)
    return z + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def rk4_final(f: Callable, z0: np.ndarray, t_total: float, steps: int) -> np.ndarray:
    z = np.asarray(z0, dtype=float)
    h = t_total / steps
    for _ in range(steps):
        z = rk4_step(f, z, h)
    return z


def rk4_states(f: Callable, z0: np.ndarray, h: float, steps: int) -> np.ndarray:
    """All intermediate states, shape (steps+1, ...) with z0 first."""
    z = np.asarray(z0, dtype=float)
    out = np.empty((steps + 1,) + z.shape)
    out[0] = z
    for k in range(steps):
        z = rk4_step(f, z, h)
        out[k + 1] = z
    return out


def rk4_variational(
    f: Callable,
    jac: Callable,
    z0: np.ndarray,
    t_total: float,
    steps: int,
) -> tuple:
    """Integrate dz/dt = F(z) together with dJ/dt = J_F(z) J, J(0) = I.

    Returns (z(T), J(T)) where J is the Jacobian of the time-T flow map with
    respect to the initial state.  Batched: z0 of shape (N, n) gives J of
    shape (N, n, n).
    """
    z = np.asarray(z0, dtype=float)
    n = z.shape[-1]
    J = np.broadcast_to(np.eye(n), z.shape[:-1] + (n, n)).copy()
    h = t_total / steps
    for _ in range(steps):
        k1z = f(z)
        k1J = jac(z) @ J
        z2 = z + 0.5 * h * k1z
        k2z = f(z2)
        k2J = jac(z2) @ (J + 0.5 * h * k1J)
        z3 = z + 0.5 * h * k2z
        k3z = f(z3)
        k3J = jac(z3) @ (J + 0.5 * h * k2J)
        z4 = z + h * k3z
        k4z = f(z4)
        k4J = jac(z4) @ (J + h * k3J)
        z = z + (h / 6.0) * (k1z + 2.0 * k2z + 2.0 * k3z + k4z)
        J = J + (h / 6.0) * (k1J + 2.0 * k2J + 2.0 * k3J + k4J)
    return z, J


# ---------------------------------------------------------------------------
# damped Newton iteration
# ---------------------------------------------------------------------------


def damped_newton(
    f: Callable,
    jac: Callable,
    x0: Sequence[float],
    tol: float = 1e-10,
    max_iter: int = 100,
) -> tuple:
    """Newton with step halving on the residual norm.

    Returns (x, converged, residual_norm).  Singular Jacobians or stalled
    line searches end the iteration with converged=False.
    """
    x = np.asarray(x0, dtype=float).copy()
    fx = f(x)
    if not np.all(np.isfinite(fx)):
        return x, False, float("inf")
    for _ in range(max_iter):
        r = float(np.linalg.norm(fx))
        if r < tol:
            return x, True, r
        J = jac(x)
        if not np.all(np.isfinite(J)):
            return x, False, r
        try:
            step = np.linalg.solve(J, -fx)
        except np.linalg.LinAlgError:
            return x, False, r
        lam = 1.0
        improved = False
        while lam >= 2.0**-12:
            xn = x + lam * step
            fn = f(xn)
            if np.all(np.isfinite(fn)) and np.linalg.norm(fn) < r:
                x, fx = xn, fn
                improved = True
                break
            lam *= 0.5
        if not improved:
            return x, r < tol, r
    r = float(np.linalg.norm(fx))
    return x, r < tol, r
