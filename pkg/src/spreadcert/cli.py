"""Command-line interface: mu/rho sweeps, certification, and the demo run.

Exit codes: 0 success, 1 usage or configuration problem, 2 infeasible
spreading target, 3 stability violation, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from . import certificate as cert
from .design import EUCLIDEAN, RS_NORM
from .errors import (
    ConfigError,
    EdgelessGraphError,
    GraphValidationError,
    InfeasibleTargetError,
    SpreadcertError,
    StabilityError,
)
from .harness import (
    DEFAULT_RHO_SWEEP_MU,
    ExperimentConfig,
    MuGrid,
    RhoGrid,
    build_instance,
    certify,
    load_config,
    run_mu_sweep,
    run_rho_sweep,
    write_summary_json,
    write_sweep_csv,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INFEASIBLE = 2
EXIT_STABILITY = 3
EXIT_NUMERICAL = 4

MODE_FLAGS = {"rs": RS_NORM, "l2": EUCLIDEAN}


def demo_config(out_dir: str | None = None) -> ExperimentConfig:
    """Reference instance for the demo subcommand.

    A 7x7 torus (regular, so the uniform profile is almost a diffusion fixed
    point) rescaled close to the stability edge, with a quadratic
    interference well plus two steering interferers. Small mu concentrates
    the design at the bottom of the well; increasing mu spreads it out, and
    the measured spreading follows the inverse square-root law across the
    middle of the grid.
    """
    import numpy as np

    from .covariance import CovarianceSpec, steering_vector
    from .graph import GraphSpec

    rows = cols = 7
    n = rows * cols
    edges = []
    for r in range(rows):
        for c in range(cols):
            i = r * cols + c
            edges.append((i, r * cols + (c + 1) % cols, 1.0))
            edges.append((i, ((r + 1) % rows) * cols + c, 1.0))

    rr, cc = np.meshgrid(np.arange(rows), np.arange(cols), indexing="ij")
    well = 100.0 * (((rr - rows // 2) ** 2 + (cc - cols // 2) ** 2) / float(n)).ravel()
    r_i = np.diag(well).astype(complex)
    for angle, power in ((-0.6, 8.0), (1.05, 5.0)):
        a = steering_vector(angle, n)
        r_i += power * np.outer(a, a.conj())
    r_s = np.eye(n, dtype=complex)

    return ExperimentConfig(
        graph=GraphSpec(kind="explicit_edges", n=n, edges=tuple(edges),
                        target_spectral_norm=0.99),
        covariance=CovarianceSpec(
            kind="explicit",
            sigma2=1.0,
            alpha=0.0,
            r_s=np.stack([r_s.real, r_s.imag], axis=-1).tolist(),
            r_i=np.stack([r_i.real, r_i.imag], axis=-1).tolist(),
        ),
        rho=0.5,
        mu_grid=MuGrid(min_exp=-1.0, max_exp=5.0, points=25),
        mode=RS_NORM,
        seed=7,
        out_dir=out_dir,
    )


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 1 on usage errors, 2 is reserved
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _build_parser() -> _Parser:
    parser = _Parser(prog="spreadcert",
                     description="Certify steady-state spreading of Laplacian-regularised designs.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, require_config=True):
        p.add_argument("--config", type=Path, required=require_config,
                       help="JSON experiment config")
        p.add_argument("--out", type=Path, default=None, help="output directory")
        p.add_argument("--rho", type=float, default=None, help="override propagation factor")
        p.add_argument("--mode", choices=sorted(MODE_FLAGS), default=None,
                       help="normalisation (rs: signal quadratic form, l2: Euclidean)")
        p.add_argument("--seed", type=int, default=None, help="override experiment seed")
        p.add_argument("--margin", type=float, default=None,
                       help="override minimum stability margin")

    p_mu = sub.add_parser("sweep-mu", help="sweep regularisation strength at fixed rho")
    add_common(p_mu)

    p_rho = sub.add_parser("sweep-rho", help="sweep rho at fixed regularisation strength")
    add_common(p_rho)
    p_rho.add_argument("--mu", type=float, default=DEFAULT_RHO_SWEEP_MU,
                       help="fixed regularisation strength (default %(default)s)")

    p_cert = sub.add_parser("certify", help="design mu for a spreading target and verify it")
    add_common(p_cert)
    p_cert.add_argument("--xi-target", type=float, required=True, help="spreading budget")

    p_demo = sub.add_parser("demo", help="run both sweeps on the built-in reference instance")
    p_demo.add_argument("--out", type=Path, default=Path("results"), help="output directory")

    return parser


def _apply_overrides(config: ExperimentConfig, args) -> ExperimentConfig:
    """CLI flags take precedence over config-file fields."""
    updates = {}
    if getattr(args, "rho", None) is not None:
        updates["rho"] = args.rho
    if getattr(args, "mode", None) is not None:
        updates["mode"] = MODE_FLAGS[args.mode]
    if getattr(args, "seed", None) is not None:
        updates["seed"] = args.seed
    if getattr(args, "margin", None) is not None:
        updates["min_stability_margin"] = args.margin
    if getattr(args, "out", None) is not None:
        updates["out_dir"] = str(args.out)
    return dataclasses.replace(config, **updates) if updates else config


def _out_dir(config: ExperimentConfig) -> Path:
    out = Path(config.out_dir) if config.out_dir else Path("results")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _config_payload(config: ExperimentConfig) -> dict:
    payload = dataclasses.asdict(config)
    payload["rho"] = dataclasses.asdict(config.rho) if isinstance(config.rho, RhoGrid) else config.rho
    return payload


def _constants_payload(config: ExperimentConfig, mu: float, rho: float) -> dict:
    graph, model = build_instance(config)
    return cert.bound(graph, model, rho, mu, config.mode).to_json_dict()


def _cmd_sweep_mu(config: ExperimentConfig) -> int:
    result = run_mu_sweep(config)
    out = _out_dir(config)
    write_sweep_csv(result.records, out / "sweep_mu.csv")
    write_summary_json({
        "schema": "spreadcert-summary-v1",
        "command": "sweep-mu",
        "config": _config_payload(config),
        "constants": _constants_payload(config, result.records[0].mu, result.records[0].rho),
        "fitted_slope": result.slope,
        "records": len(result.records),
        "failures": [dataclasses.asdict(f) for f in result.failures],
        "audit": "pass",
    }, out / "summary.json")
    print(f"sweep-mu: {len(result.records)} records, fitted slope {result.slope:+.4f}, "
          f"audit pass -> {out / 'sweep_mu.csv'}")
    return EXIT_OK


def _cmd_sweep_rho(config: ExperimentConfig, fixed_mu: float) -> int:
    result = run_rho_sweep(config, fixed_mu=fixed_mu)
    out = _out_dir(config)
    write_sweep_csv(result.records, out / "sweep_rho.csv")
    write_summary_json({
        "schema": "spreadcert-summary-v1",
        "command": "sweep-rho",
        "config": _config_payload(config),
        "constants": _constants_payload(config, fixed_mu, result.records[0].rho),
        "fixed_mu": fixed_mu,
        "records": len(result.records),
        "failures": [dataclasses.asdict(f) for f in result.failures],
        "audit": "pass",
    }, out / "summary.json")
    print(f"sweep-rho: {len(result.records)} admissible points at mu={fixed_mu}, "
          f"audit pass -> {out / 'sweep_rho.csv'}")
    return EXIT_OK


def _cmd_certify(config: ExperimentConfig, xi_target: float) -> int:
    verdict = certify(config, xi_target)
    out = _out_dir(config)
    write_summary_json({
        "schema": "spreadcert-summary-v1",
        "command": "certify",
        "config": _config_payload(config),
        **verdict.to_json_dict(),
    }, out / "summary.json")
    if not verdict.feasible:
        print(f"INFEASIBLE: target {xi_target} is not above the floor {verdict.floor!r}")
        print(verdict.message)
        return EXIT_INFEASIBLE
    status = "PASS" if verdict.passed else "FAIL"
    print(f"{status}: mu={verdict.mu!r} bound={verdict.bound!r} "
          f"xi_measured={verdict.xi_measured!r} slack={verdict.slack_ratio:.3f}")
    return EXIT_OK if verdict.passed else EXIT_NUMERICAL


def _cmd_demo(out: Path) -> int:
    config = demo_config(str(out))
    mu_result = run_mu_sweep(config)
    rho_config = dataclasses.replace(config, rho=RhoGrid(0.05, 0.95, 0.05))
    rho_result = run_rho_sweep(rho_config, fixed_mu=DEFAULT_RHO_SWEEP_MU)
    out.mkdir(parents=True, exist_ok=True)
    write_sweep_csv(mu_result.records, out / "sweep_mu.csv")
    write_sweep_csv(rho_result.records, out / "sweep_rho.csv")
    write_summary_json({
        "schema": "spreadcert-summary-v1",
        "command": "demo",
        "config": _config_payload(config),
        "constants": _constants_payload(config, mu_result.records[0].mu, mu_result.records[0].rho),
        "fitted_slope": mu_result.slope,
        "mu_records": len(mu_result.records),
        "rho_records": len(rho_result.records),
        "audit": "pass",
    }, out / "summary.json")
    print(f"demo: mu sweep slope {mu_result.slope:+.4f} over {len(mu_result.records)} points; "
          f"rho sweep {len(rho_result.records)} points; outputs in {out}/")
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "demo":
            return _cmd_demo(args.out)
        config = _apply_overrides(load_config(args.config), args)
        if args.command == "sweep-mu":
            return _cmd_sweep_mu(config)
        if args.command == "sweep-rho":
            return _cmd_sweep_rho(config, args.mu)
        if args.command == "certify":
            return _cmd_certify(config, args.xi_target)
        raise ConfigError(f"unknown command {args.command!r}")
    except InfeasibleTargetError as exc:
        print(f"INFEASIBLE: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except StabilityError as exc:
        print(f"stability violation: {exc}", file=sys.stderr)
        return EXIT_STABILITY
    except (ConfigError, GraphValidationError, EdgelessGraphError, FileNotFoundError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SpreadcertError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
