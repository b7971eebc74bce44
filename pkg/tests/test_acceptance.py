"""Acceptance suite: one test per release criterion, each printing a verdict.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
pass lines. The battery fixture (see conftest) sweeps fifteen instances over
the default 25-point mu grid and is shared by most criteria.
"""

import numpy as np
import pytest
import scipy.linalg

from spreadcert import (
    CovarianceSpec,
    DiffusionConfig,
    ExperimentConfig,
    GraphSpec,
    InfeasibleTargetError,
    bend_point,
    bound,
    build_instance,
    certify,
    design_mu,
    fit_loglog_slope,
    prefactor,
    run_mu_sweep,
    solve_design,
    steady_state_direct,
    steady_state_iterative,
)
from spreadcert.cli import demo_config


def _report(name: str, detail: str = ""):
    suffix = f" ({detail})" if detail else ""
    print(f"\n[PASS] {name}{suffix}")


def micro_config():
    return ExperimentConfig(
        graph=GraphSpec(kind="explicit_edges", n=2, edges=((0, 1, 0.9),)),
        covariance=CovarianceSpec(kind="identity"),
        rho=0.5,
    )


def test_certification_soundness(battery):
    instances = battery["instances"]
    assert len(instances) >= 12

    # pinned coverage of the sweep axes
    assert {i.family for i in instances} == {
        "line", "cycle", "grid2d", "random_geometric", "scale_free"}
    assert {i.n for i in instances} == {8, 32, 128}
    assert {i.target for i in instances} == {0.5, 0.9, 0.95}
    assert {i.rho for i in instances} == {0.1, 0.5, 0.9}

    violations = 0
    total = 0
    for inst in instances:
        assert len(inst.records) == 25
        assert all(r.stability_margin >= 0.05 for r in inst.records)
        for r in inst.records:
            total += 1
            if r.xi_measured > r.bound:
                violations += 1
    assert violations == 0
    assert battery["elapsed_seconds"] <= 120.0
    _report("certification soundness",
            f"{total} records across {len(instances)} instances, 0 violations, "
            f"{battery['elapsed_seconds']:.1f}s")


def test_scaling_law(battery):
    # certified bound: (bound - floor) follows mu^(-1/2) exactly
    for inst in battery["instances"]:
        pts = [(r.mu, r.bound - r.floor) for r in inst.records]
        slope = fit_loglog_slope(pts, mid_fraction=1.0)
        assert slope == pytest.approx(-0.5, abs=1e-12), inst.name

    # measured spreading: mid-range slope close to -1/2 on the demo instance
    demo = run_mu_sweep(demo_config())
    assert -0.65 <= demo.slope <= -0.35

    # the fitter itself is exact on a synthetic power law
    xs = np.logspace(-2, 4, 25)
    assert fit_loglog_slope(list(zip(xs, 2.0 * xs ** -0.5))) == pytest.approx(-0.5, abs=1e-12)
    _report("scaling law", f"bound slope -0.5 exact; demo measured slope {demo.slope:+.3f}")


def test_design_rule_round_trip(battery):
    checked = 0
    for inst in battery["instances"]:
        floor = prefactor(inst.graph, inst.rho) * inst.graph.d_max
        for mult in (1.5, 2.0, 5.0):
            target = mult * floor
            mu = design_mu(inst.graph, inst.model, inst.rho, target)
            cert = bound(inst.graph, inst.model, inst.rho, mu)
            assert cert.bound == pytest.approx(target, rel=1e-12), inst.name
            sol = solve_design(inst.model, inst.graph, mu)
            xi = steady_state_direct(inst.graph, inst.rho, sol.p0).xi
            assert xi <= target, (inst.name, mult, xi, target)
            checked += 1
        for bad in (floor, 0.9 * floor):
            with pytest.raises(InfeasibleTargetError):
                design_mu(inst.graph, inst.model, inst.rho, bad)
    _report("design-rule round trip", f"{checked} feasible targets exact and met")


def test_exact_micro_instance():
    config = micro_config()
    graph, model = build_instance(config)
    floor = prefactor(graph, 0.5) * graph.d_max
    assert floor == pytest.approx(9.0 / 22.0, rel=1e-12)
    mu = design_mu(graph, model, 0.5, 0.5)
    assert mu == pytest.approx(360.0, rel=1e-12)
    assert bound(graph, model, 0.5, 360.0).bound == pytest.approx(0.5, rel=1e-12)
    sol = solve_design(model, graph, mu)
    xi = steady_state_direct(graph, 0.5, sol.p0).xi
    assert xi == pytest.approx(1.0 / 11.0, rel=1e-12)
    verdict = certify(config, 0.5)
    assert verdict.passed
    _report("exact micro-instance", "floor 9/22, mu 360, bound 0.5, xi 1/11")


def test_supporting_inequalities(battery):
    rng = np.random.default_rng(2718)
    for inst in battery["instances"]:
        g, m = inst.graph, inst.model

        # adjacency action split against degree and Laplacian energy
        v = rng.standard_normal((1000, g.n))
        lhs = np.linalg.norm(v @ g.adjacency, axis=1)
        energy = np.maximum(np.einsum("ij,jk,ik->i", v, g.laplacian, v), 0.0)
        rhs = g.d_max * np.linalg.norm(v, axis=1) + np.sqrt(g.lambda_max_laplacian * energy)
        assert np.all(lhs <= rhs + 1e-9), inst.name

        for r in inst.records:
            sol = solve_design(m, g, r.mu)
            w, p0 = sol.w_star, sol.p0
            # squared-profile energy against the design energy
            assert float(p0 @ g.laplacian @ p0) <= (
                4.0 * float(np.linalg.norm(w)) ** 2 * sol.laplacian_energy + 1e-9)
            # weighted energy against the ones-reference constant
            assert r.mu * sol.laplacian_energy <= m.lambda_ref + 1e-9
            # profile norm against the design norm
            assert float(np.linalg.norm(p0)) >= (
                float(np.linalg.norm(w)) ** 2 / np.sqrt(g.n) - 1e-9)
    _report("supporting inequality suite",
            "action split (1000 vectors/instance), profile energy, "
            "weighted energy, norm relation")


def test_oracle_equivalences(battery):
    tol = 1e-12
    small_checked = 0
    for inst in battery["instances"]:
        g, m = inst.graph, inst.model
        probe_mus = (inst.records[0].mu, inst.records[12].mu, inst.records[-1].mu)
        for mu in probe_mus:
            sol = solve_design(m, g, mu)
            direct = steady_state_direct(g, inst.rho, sol.p0)
            iterative = steady_state_iterative(g, DiffusionConfig(rho=inst.rho, tol=tol), sol.p0)
            gap = float(np.linalg.norm(direct.p_inf - iterative.p_inf))
            assert gap <= 10.0 * tol * float(np.linalg.norm(sol.p0)), inst.name

            if g.n <= 8:
                pencil = m.r_in + mu * g.laplacian
                vals = scipy.linalg.eig(pencil, np.asarray(m.r_s), right=False)
                oracle = float(np.min(vals[np.isfinite(vals)].real))
                assert sol.lambda_star == pytest.approx(oracle, rel=1e-9), inst.name
                small_checked += 1
    assert small_checked > 0
    _report("oracle equivalences",
            f"iterative vs direct on all instances; {small_checked} brute-force eigen checks")


def test_bend_point_identity(battery):
    for inst in battery["instances"]:
        assert inst.graph.d_max > 0.0
        for mode in ("rs_norm", "euclidean"):
            mu_star = bend_point(inst.graph, inst.model, mode)
            cert = bound(inst.graph, inst.model, inst.rho, mu_star, mode)
            assert cert.bound == pytest.approx(2.0 * cert.floor, rel=1e-12), inst.name
    _report("bend point identity", "bound(mu*) = 2x floor in both modes")


def test_trivial_limits():
    # rho = 0 leaves the profile untouched
    config = ExperimentConfig(
        graph=GraphSpec(kind="cycle", n=16, target_spectral_norm=0.9),
        covariance=CovarianceSpec(kind="identity"),
        rho=0.5,
    )
    graph, model = build_instance(config)
    sol = solve_design(model, graph, mu=1.0)
    assert steady_state_direct(graph, 0.0, sol.p0).xi == 0.0

    # identity covariances keep the kernel minimiser at every mu
    result = run_mu_sweep(config)
    assert all(abs(r.laplacian_energy) <= 1e-12 for r in result.records)
    xis = [r.xi_measured for r in result.records]
    assert max(xis) - min(xis) <= 1e-12 * max(xis)
    _report("trivial limits", "rho=0 gives xi=0; identity covariances give "
            "zero energy and mu-independent xi")
