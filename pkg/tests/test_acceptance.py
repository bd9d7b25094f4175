"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s` to see the lines as the
criteria execute.
"""

import time
from contextlib import contextmanager

import numpy as np
import pytest

from symflow.candidates import (
    EXISTS,
    NOT_EXISTS,
    candidate_map_table,
    classify_lienard,
    classify_lotka_volterra,
    fit_affine_candidate,
    lienard_field,
    lotka_volterra_field,
)
from symflow.checks import (
    check_fixed_points_even_orders,
    check_structural,
    tower_order_verdicts,
)
from symflow.expr import differentiate, evaluate, to_string
from symflow.fields import SmoothMap, VectorField
from symflow.flow import IntegratorConfig, check_flow_relation, check_liouville, integrate
from symflow.geometry import DomainBox
from symflow.parser import parse
from symflow.tower import build_tower, default_selection, tower_fd_oracle
from symflow.verdict import Certainty, CheckKind, Status


@contextmanager
def criterion(num, desc, limit=None):
    t0 = time.perf_counter()
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE {num}: FAIL - {desc}")
        raise
    elapsed = time.perf_counter() - t0
    assert limit is None or elapsed < limit, f"runtime {elapsed:.2f}s exceeds {limit}s"
    print(f"ACCEPTANCE {num}: PASS - {desc} [{elapsed:.2f}s]")


def field2(*texts, box=None):
    box = box or DomainBox.cube(-2, 2, 2)
    return VectorField([parse(t, 2) for t in texts], box)


def map2(*texts, box=None):
    box = box or DomainBox.cube(-2, 2, 2)
    return SmoothMap([parse(t, 2) for t in texts], box)


def test_criterion_1_worked_example_tower():
    with criterion(1, "quadratic-center tower is (2x, 2y + 2x^2) independent of g", limit=1.0):
        expected = (parse("2*x", 2), parse("2*x^2 + 2*y", 2))
        for g in ("x", "x + x^2", "x^3 - 5*x", "sin(x)", "exp(x)"):
            F = field2("y + x^2", f"-({g})")
            t = build_tower(F, 1)
            assert t.orders == expected, f"tower mismatch for g = {g}"


def test_criterion_2_predator_prey_reversibility():
    with criterion(2, "predator-prey reversibility classification and flow agreement", limit=10.0):
        cl = classify_lotka_volterra(1, 2, 3, 1, DomainBox.cube(-1, 8, 2))
        branch = cl.reversibility
        assert branch.verdict == EXISTS
        assert [to_string(c) for c in branch.sigma.components] == ["2/3*y", "3/2*x"]
        for name in ("structural", "involution", "measure_preserving"):
            v = branch.verification[name]
            assert v.status is Status.HOLDS and v.certainty is Certainty.CERTAIN, name

        F = lotka_volterra_field(1, 2, 3, 1, DomainBox.cube(-1, 8, 2))
        flow = check_flow_relation(
            F,
            branch.sigma,
            CheckKind.REVERSIBILITY,
            samples=50,
            cfg=IntegratorConfig(step=1e-3, horizon=0.5),
            sample_box=DomainBox.cube(0.2, 2.0, 2),
            rng=np.random.default_rng(0),
        )
        assert flow.status is Status.HOLDS
        assert flow.residual_max < 1e-5

        assert classify_lotka_volterra(1, 2, 3, 2).reversibility.verdict == NOT_EXISTS


def test_criterion_3_predator_prey_symmetry():
    with criterion(3, "predator-prey symmetry classification", limit=5.0):
        cl = classify_lotka_volterra(1, 1, 1, -1)
        assert cl.symmetry.verdict == EXISTS
        assert [to_string(c) for c in cl.symmetry.sigma.components] == ["-y", "-x"]
        for v in cl.symmetry.verification.values():
            assert v.status is Status.HOLDS and v.certainty is Certainty.CERTAIN

        assert classify_lotka_volterra(1, 1, 1, 1).symmetry.verdict == NOT_EXISTS


def test_criterion_4_damped_oscillator_classification():
    with criterion(4, "damped-oscillator classifications with re-verified maps", limit=5.0):
        apr = classify_lienard("x^3", "x")
        assert apr.reversibility.verdict == EXISTS
        assert [to_string(c) for c in apr.reversibility.sigma.components] == ["-x", "y"]
        for v in apr.reversibility.verification.values():
            assert v.status is Status.HOLDS and v.certainty is Certainty.CERTAIN

        aps = classify_lienard("x^2", "x")
        assert aps.symmetry.verdict == EXISTS
        assert [to_string(c) for c in aps.symmetry.sigma.components] == ["-x", "-y"]
        for v in aps.symmetry.verification.values():
            assert v.status is Status.HOLDS and v.certainty is Certainty.CERTAIN

        mixed = classify_lienard("x^3 + x^2", "x", interval=(-0.5, 0.5))
        assert mixed.overall == NOT_EXISTS
        parity = [c for c in mixed.symmetry.conditions if c.name == "f_even"]
        assert parity and not parity[0].passed and parity[0].witness is not None


def test_criterion_5_tower_sign_law():
    with criterion(5, "tower transformation signs: alternating for reversibility, plus for symmetry"):
        F = field2("x^2", "y^2")
        sigma = map2("-x", "-y")
        parts = tower_order_verdicts(F, sigma, CheckKind.REVERSIBILITY, 3)
        assert all(p.status is Status.HOLDS for p in parts)
        assert all(p.certainty is Certainty.CERTAIN for p in parts)
        # the alternation is real: the all-plus law fails at even orders
        wrong = tower_order_verdicts(F, sigma, CheckKind.SYMMETRY, 3)
        assert wrong[0].status is Status.FAILS
        assert wrong[2].status is Status.FAILS

        Fs = field2("y", "-sin(x)", box=DomainBox.cube(-3, 3, 2))
        sig = map2("-x", "-y", box=Fs.domain)
        parts = tower_order_verdicts(Fs, sig, CheckKind.SYMMETRY, 3, trials=200)
        assert all(p.status is Status.HOLDS for p in parts)
        assert all(p.certainty is Certainty.PROBABILISTIC for p in parts)
        assert max(p.residual_max for p in parts) < 1e-9


def test_criterion_6_fixed_set_even_orders():
    with criterion(6, "even tower orders vanish on reversibility fixed sets; symmetry counterexample fails"):
        corpus = [
            (lotka_volterra_field(1, 2, 3, 1), map2("2*y/3", "3*x/2")),
            (lienard_field(parse("x^3", 1), parse("x", 1)), map2("-x", "y")),
            (field2("x^2", "y^2"), map2("-x", "-y")),
            (field2("y + x^2", "-(x + x^3)"), map2("-x", "y")),
        ]
        for F, sigma in corpus:
            v = check_fixed_points_even_orders(F, sigma, max_j=1, value_tol=1e-10)
            assert v.status is Status.HOLDS, (str(F), v.notes)

        F1 = VectorField([parse("x", 1)], DomainBox.cube(-1, 1, 1))
        s1 = SmoothMap([parse("-x", 1)], F1.domain)
        v = check_fixed_points_even_orders(F1, s1, max_j=0)
        assert v.status is Status.FAILS
        assert v.witnesses[0][1] == pytest.approx(1.0)


def test_criterion_7_candidate_recovery():
    with criterion(7, "pointwise candidate recovery: swap map reproduced, non-odd candidate rejected"):
        F = lotka_volterra_field(1, 2, 3, 1, DomainBox.cube(-1, 8, 2))
        cmap = candidate_map_table(
            F,
            default_selection(2),
            CheckKind.REVERSIBILITY,
            grid=(20, 20),
            box=DomainBox.cube(0.2, 2.0, 2),
        )
        assert cmap.status == "ok"
        nonsingular = cmap.stats["grid_points"] - cmap.stats["singular_filtered"]
        assert len(cmap.entries) >= 0.95 * nonsingular
        Z, W = cmap.points(), cmap.images()
        expected = np.stack([2 * Z[:, 1] / 3, 3 * Z[:, 0] / 2], axis=-1)
        errors = np.linalg.norm(W - expected, axis=1)
        assert (errors < 1e-8).sum() >= 0.95 * nonsingular

        Fq = field2("y + x^2", "-x - x^2")
        cmap2 = candidate_map_table(Fq, default_selection(2), CheckKind.REVERSIBILITY, grid=(10, 10))
        sigma, _ = fit_affine_candidate(cmap2, Fq.domain)
        assert [to_string(c) for c in sigma.components] == ["-x", "y"]
        assert check_structural(Fq, sigma, CheckKind.REVERSIBILITY).failed


def test_criterion_8_oracle_suites():
    with criterion(8, "finite-difference, flow, and volume oracles agree with symbolic results", limit=60.0):
        rng = np.random.default_rng(2024)
        systems = [
            (field2("y + x^2", "-x"), DomainBox.cube(-0.8, 0.8, 2)),
            (lotka_volterra_field(1, 2, 3, 1, DomainBox.cube(-1, 4, 2)), DomainBox.cube(0.2, 1.2, 2)),
            (lienard_field(parse("x^3", 1), parse("x", 1), DomainBox.cube(-2, 2, 2)), DomainBox.cube(-0.8, 0.8, 2)),
            (field2("x^2", "y^2"), DomainBox.cube(-0.5, 0.5, 2)),
            (field2("y", "-sin(x)", box=DomainBox.cube(-3, 3, 2)), DomainBox.cube(-1, 1, 2)),
        ]
        for F, sample_box in systems:
            tower = build_tower(F, 3)
            pts = sample_box.sample(rng, 50)
            for z in pts:
                z = tuple(z)
                for j in range(4):
                    sym = evaluate(tower.orders[j], z)
                    fd = tower_fd_oracle(F, z, j)
                    assert abs(fd - sym) < 1e-4 * (1 + abs(sym)), (str(F), j, z)

        # symbolic first derivatives against central differences
        exprs = [
            "x^2*y - 3*x + y^3",
            "sin(x)*y + cos(y)",
            "exp(x/2)*y^2",
            "x^4 - 2*x^2*y^2 + y^4",
            "sin(x*y)",
            "1/2*x^3 + 5*y",
        ]
        h = 1e-6
        for text in exprs:
            e = parse(text, 2)
            for var in (1, 2):
                d = differentiate(e, var)
                for _ in range(10):
                    p = tuple(rng.uniform(-1, 1, 2))
                    shift = np.zeros(2)
                    shift[var - 1] = h
                    fd = (evaluate(e, tuple(p + shift)) - evaluate(e, tuple(p - shift))) / (2 * h)
                    sym = evaluate(d, p)
                    assert abs(fd - sym) < 1e-5 * (1 + abs(sym))

        # volume growth balance at 1e5 Monte-Carlo points
        liouville_cases = [
            (field2("y", "-x", box=DomainBox.cube(-5, 5, 2)), DomainBox([(0.2, 0.8), (0.2, 0.8)])),
            (field2("x", "y", box=DomainBox.cube(-5, 5, 2)), DomainBox([(0.5, 1.5), (0.5, 1.5)])),
            (field2("x^2", "y^2", box=DomainBox.cube(-1, 1, 2)), DomainBox([(0.1, 0.2), (0.1, 0.2)])),
        ]
        for k, (F, region) in enumerate(liouville_cases):
            v = check_liouville(F, region, t_max=0.5, mc_points=100_000, tol=5e-2, seed=k)
            assert v.status is Status.HOLDS, v.notes


def test_criterion_9_integrator_convergence():
    with criterion(9, "integrator error drops at least 12x per step halving"):
        F = field2("y", "-x", box=DomainBox.cube(-3, 3, 2))
        errors = []
        for h in (4e-3, 2e-3, 1e-3):
            traj = integrate(F, (1.0, 0.0), IntegratorConfig(step=h, horizon=2 * np.pi))
            errors.append(np.linalg.norm(np.asarray(traj.final_state()) - (1.0, 0.0)))
        assert errors[0] / errors[1] >= 12, errors
        assert errors[1] / errors[2] >= 12, errors
