"""Command line interface.

Subcommands: ``models list``, ``certify``, ``spectrum``, ``verify``,
``geometry``, ``run``.  The ``run`` subcommand executes a declarative JSON
config (flags override fields, seeds are mandatory) and writes a JSON
report, a CSV summary with one row per inequality, and figures next to
the CSV.  Exit codes: 0 all checks pass, 1 a check failed (reports are
still written), 2 unknown model or malformed config, 3 lattice size cap
exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import geometry, inequalities as ineq, lattice, models, report as rep
from .certify import CDParams, default_nu_grid, maximize_rho1, verify_cd

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_BAD_CONFIG = 2
EXIT_SIZE_CAP = 3

VERIFY_CHOICES = [
    "li-yau",
    "reverse-poincare",
    "pseudo-poincare",
    "poincare",
    "besov-sobolev",
    "lichnerowicz",
    "cheeger",
    "ultracontractive",
    "equivalence",
]


class ConfigError(Exception):
    pass


class SizeCapError(Exception):
    pass


def _get_entry(name):
    try:
        return models.get_model(name)
    except KeyError as exc:
        raise ConfigError(str(exc)) from exc


def build_lattice(entry, grid, box=None, cap=None):
    """Discretize a catalog model on a periodic grid of `grid` per axis."""
    if entry.label == "su2":
        return lattice.build_su2_generator(grid, grid)
    dim = entry.model.chart_dim
    if box is None:
        box = (2.0 * np.pi,) * dim
    kwargs = {} if cap is None else {"cap": cap}
    try:
        spec = models.PeriodicLatticeSpec(
            box=tuple(box), points=(grid,) * dim, model=entry.model, **kwargs
        )
    except ValueError as exc:
        if "cap" in str(exc):
            raise SizeCapError(str(exc)) from exc
        raise ConfigError(str(exc)) from exc
    return lattice.build_generator(spec)


def _params_from_args(entry, args):
    ref = entry.reference_cd
    rho1 = args.rho1 if args.rho1 is not None else (ref.rho1 if ref else 0.0)
    rho2 = args.rho2 if args.rho2 is not None else (ref.rho2 if ref else 1.0)
    kappa = args.kappa if args.kappa is not None else (ref.kappa if ref else 1.0)
    d = args.dim if args.dim is not None else (ref.d if ref else 2)
    return CDParams(rho1, rho2, kappa, d)


# ---------------------------------------------------------------------------
# subcommands


def cmd_models(args):
    if args.action != "list":
        raise ConfigError(f"unknown models action {args.action!r}")
    payload = {name: e.to_json() for name, e in models.catalog().items()}
    print(json.dumps(payload, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_certify(args):
    entry = _get_entry(args.model)
    points = entry.grid_points(per_axis=args.grid_per_axis)
    nus = default_nu_grid()
    if args.maximize_rho1:
        rho1 = maximize_rho1(
            entry.model, args.rho2, args.kappa, args.dim, points, nus
        )
    else:
        rho1 = args.rho1
    params = CDParams(rho1, args.rho2, args.kappa, args.dim)
    report = verify_cd(entry.model, params, points, nus)
    payload = report.to_json()
    payload["grid"] = {
        "points": [[float(x) for x in p] for p in points],
        "nu": [float(nu) for nu in nus],
    }
    if args.maximize_rho1:
        payload["maximized_rho1"] = rho1
    if args.out:
        rep.write_json(args.out, payload)
    else:
        print(json.dumps(payload, indent=2, sort_keys=True))
    return EXIT_OK if report.certified else EXIT_CHECK_FAILED


def cmd_spectrum(args):
    entry = _get_entry(args.model)
    G = build_lattice(entry, args.grid)
    n_modes = None if G.n <= lattice.DENSE_EIG_CUTOFF else max(args.count, 16)
    op = lattice.HeatOperator(G, n_modes=n_modes)
    evs = -op.eigenvalues[: args.count]
    rep.write_spectrum_csv(args.out, evs)
    if args.figure:
        rep.render_spectrum_figure(args.figure, evs)
    return EXIT_OK


def _dispatch_verify(name, entry, G, op, params, args):
    regime = "positive" if params.rho1 > 0 else "zero"
    seed = args.seed
    tol = args.tolerance
    if name == "li-yau":
        fn = (
            ineq.check_li_yau_positive
            if regime == "positive"
            else ineq.check_li_yau_zero
        )
        return fn(G, params, operator=op, seed=seed, tol=tol or ineq.DEFAULT_TOL)
    if name == "reverse-poincare":
        return ineq.check_reverse_poincare(
            G, params, operator=op, seed=seed, tol=tol or ineq.DEFAULT_TOL
        )
    if name == "pseudo-poincare":
        return ineq.check_pseudo_poincare(
            G,
            params,
            p_norm=args.p,
            regime=regime,
            operator=op,
            seed=seed,
            tol=tol or ineq.DEFAULT_TOL,
            dual_exponent=args.dual_exponent,
        )
    if name == "poincare":
        return ineq.check_poincare(
            G, params, p_norm=args.p, operator=op, seed=seed,
            tol=tol or ineq.DEFAULT_TOL,
        )
    if name == "besov-sobolev":
        return ineq.check_besov_sobolev(tol=tol or 0.05)
    if name == "lichnerowicz":
        return ineq.check_lichnerowicz(G, params, operator=op, tol=tol or 0.0)
    if name == "cheeger":
        return ineq.check_cheeger(G, params, tol=tol or ineq.DEFAULT_TOL)
    if name == "ultracontractive":
        return ineq.check_ultracontractivity(
            G, params, operator=op, tol=tol or 0.05
        )
    if name == "equivalence":
        return ineq.check_equivalence_chain(seed=seed, tol=tol or 0.10)
    raise ConfigError(f"unknown inequality {name!r}")


def cmd_verify(args):
    entry = _get_entry(args.model)
    params = _params_from_args(entry, args)
    if args.inequality in ("besov-sobolev", "equivalence"):
        if not entry.label.startswith("heisenberg"):
            raise ConfigError(
                f"{args.inequality} runs on the Heisenberg model only"
            )
        G = op = None
    else:
        G = build_lattice(entry, args.grid)
        op = lattice.HeatOperator(G)
    try:
        result = _dispatch_verify(args.inequality, entry, G, op, params, args)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    payload = result.to_json()
    payload["model"] = entry.label
    if args.out:
        rep.write_json(args.out, payload)
    else:
        print(json.dumps(payload, indent=2, sort_keys=True))
    return EXIT_OK if result.passed else EXIT_CHECK_FAILED


def cmd_geometry(args):
    if args.geom_action == "ball-volume":
        vol, err = geometry.ball_volume(
            (0.0, 0.0, 0.0), args.r, samples=args.samples, seed=args.seed
        )
        payload = {
            "quantity": "ball-volume",
            "r": args.r,
            "samples": args.samples,
            "seed": args.seed,
            "value": vol,
            "stderr": err,
        }
    elif args.geom_action == "perimeter":
        cand = geometry.CandidateSet(args.set, {"R": args.param})
        per = geometry.horizontal_perimeter(cand, resolution=args.resolution)
        coarse = geometry.horizontal_perimeter(
            cand, resolution=args.resolution // 2
        )
        payload = {
            "quantity": "perimeter",
            "set": args.set,
            "param": args.param,
            "value": per,
            "richardson_delta": abs(per - coarse),
            "volume": cand.volume(),
        }
    else:
        raise ConfigError(f"unknown geometry action {args.geom_action!r}")
    if args.out:
        rep.write_json(args.out, payload)
    else:
        print(json.dumps(payload, indent=2, sort_keys=True))
    return EXIT_OK


# ---------------------------------------------------------------------------
# run: declarative config


DEFAULT_CHECKS_ZERO = [
    "certify",
    "li-yau",
    "gradient-bounds",
    "pseudo-poincare",
    "pseudo-poincare-spectral",
]
DEFAULT_CHECKS_POSITIVE = DEFAULT_CHECKS_ZERO + [
    "reverse-poincare",
    "poincare",
    "lichnerowicz",
    "cheeger",
    "ultracontractive",
]


def load_config(path, overrides):
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    for key, val in overrides.items():
        if val is not None:
            cfg[key] = val
    if "model" not in cfg:
        raise ConfigError("config must name a model")
    if "seed" not in cfg:
        raise ConfigError("config must carry an explicit seed")
    return cfg


def run_config(cfg):
    """Execute a run config; returns (exit_code, reports, extras)."""
    entry = _get_entry(cfg["model"])
    seed = int(cfg["seed"])
    grid = int(cfg.get("grid", 12))
    cap = cfg.get("cap")
    tols = cfg.get("tolerances", {})
    if not isinstance(tols, dict):
        raise ConfigError("tolerances must be an object")

    source = cfg.get("cd", {}).get("source", "reference")
    cd_cfg = cfg.get("cd", {})
    points = entry.grid_points(per_axis=int(cfg.get("certify_grid", 3)))
    if source == "reference":
        if entry.reference_cd is None:
            raise ConfigError(f"model {entry.label} has no reference CD parameters")
        params = entry.reference_cd
    elif source == "explicit":
        try:
            params = CDParams(
                float(cd_cfg["rho1"]),
                float(cd_cfg["rho2"]),
                float(cd_cfg["kappa"]),
                float(cd_cfg["d"]),
            )
        except KeyError as exc:
            raise ConfigError(f"explicit cd config missing {exc}") from exc
    elif source == "maximize":
        ref = entry.reference_cd
        rho2 = float(cd_cfg.get("rho2", ref.rho2 if ref else 1.0))
        kappa = float(cd_cfg.get("kappa", ref.kappa if ref else 1.0))
        d = float(cd_cfg.get("d", ref.d if ref else 2))
        rho1 = maximize_rho1(entry.model, rho2, kappa, d, points)
        params = CDParams(rho1, rho2, kappa, d)
    else:
        raise ConfigError(f"unknown cd source {cd_cfg.get('source')!r}")

    checks = cfg.get("checks", "default")
    if checks == "default":
        checks = (
            DEFAULT_CHECKS_POSITIVE if params.rho1 > 0 else DEFAULT_CHECKS_ZERO
        )
    if not isinstance(checks, list):
        raise ConfigError("checks must be a list or 'default'")

    G = build_lattice(entry, grid, box=cfg.get("box"), cap=cap)
    op = lattice.HeatOperator(G)
    regime = "positive" if params.rho1 > 0 else "zero"
    dual = bool(cfg.get("dual_exponent", False))

    reports = []
    extras = {}
    for check in checks:
        tol = tols.get(check)
        if check == "certify":
            cert = verify_cd(entry.model, params, points)
            reports.append(
                rep.InequalityReport(
                    name="certify",
                    params=params.to_json(),
                    witnesses=len(cert.cells),
                    max_violation=float(-cert.worst.min_eig),
                    worst_case=cert.worst.to_json(),
                    tolerance=float(tol if tol is not None else 1e-9),
                    details={"verdict": cert.to_json()["verdict"]},
                )
            )
            extras["certificate"] = cert
        elif check == "li-yau":
            fn = (
                ineq.check_li_yau_positive
                if regime == "positive"
                else ineq.check_li_yau_zero
            )
            reports.append(
                fn(G, params, operator=op, seed=seed,
                   tol=tol if tol is not None else ineq.DEFAULT_TOL)
            )
        elif check == "gradient-bounds":
            reports.append(
                ineq.check_gradient_bounds(
                    G, params, p_norm=2, regime=regime, operator=op,
                    seed=seed, tol=tol if tol is not None else ineq.DEFAULT_TOL,
                    dual_exponent=dual,
                )
            )
        elif check == "pseudo-poincare":
            reports.append(
                ineq.check_pseudo_poincare(
                    G, params, p_norm=2, regime=regime, operator=op,
                    seed=seed, tol=tol if tol is not None else ineq.DEFAULT_TOL,
                    dual_exponent=dual,
                )
            )
        elif check == "pseudo-poincare-spectral":
            reports.append(
                ineq.check_pseudo_poincare_spectral(
                    G, params, operator=op,
                    tol=tol if tol is not None else 0.0,
                )
            )
        elif check == "reverse-poincare":
            reports.append(
                ineq.check_reverse_poincare(
                    G, params, operator=op, seed=seed,
                    tol=tol if tol is not None else ineq.DEFAULT_TOL,
                )
            )
        elif check == "poincare":
            reports.append(
                ineq.check_poincare(
                    G, params, operator=op, seed=seed,
                    tol=tol if tol is not None else ineq.DEFAULT_TOL,
                )
            )
        elif check == "lichnerowicz":
            reports.append(
                ineq.check_lichnerowicz(
                    G, params, operator=op, tol=tol if tol is not None else 0.0
                )
            )
        elif check == "cheeger":
            reports.append(
                ineq.check_cheeger(
                    G, params, tol=tol if tol is not None else ineq.DEFAULT_TOL
                )
            )
        elif check == "ultracontractive":
            reports.append(
                ineq.check_ultracontractivity(
                    G, params, operator=op,
                    tol=tol if tol is not None else 0.05,
                )
            )
        elif check == "besov-sobolev":
            reports.append(
                ineq.check_besov_sobolev(tol=tol if tol is not None else 0.05)
            )
        elif check == "equivalence":
            reports.append(
                ineq.check_equivalence_chain(
                    seed=seed, tol=tol if tol is not None else 0.10
                )
            )
        else:
            raise ConfigError(f"unknown check {check!r}")

    extras["operator"] = op
    code = EXIT_OK if all(r.passed for r in reports) else EXIT_CHECK_FAILED
    return code, reports, extras, params, cfg


def write_run_artifacts(out_dir, cfg, params, reports, extras):
    rep.ensure_dir(out_dir)
    import os

    payload = {
        "config": cfg,
        "params": params.to_json(),
        "reports": [r.to_json() for r in reports],
        "passed": all(r.passed for r in reports),
    }
    rep.write_json(os.path.join(out_dir, "report.json"), payload)
    rep.write_csv(os.path.join(out_dir, "summary.csv"), reports)
    rep.render_violation_figure(
        os.path.join(out_dir, "violations.png"), reports
    )
    op = extras.get("operator")
    if op is not None:
        evs = -op.eigenvalues[: min(64, len(op.eigenvalues))]
        rep.write_spectrum_csv(os.path.join(out_dir, "spectrum.csv"), evs)
        rep.render_spectrum_figure(os.path.join(out_dir, "spectrum.png"), evs)
    for r in reports:
        if r.name == "ultracontractivity" and r.details.get("curve"):
            curve = r.details["curve"]
            rep.render_diag_figure(
                os.path.join(out_dir, "kernel_diag.png"),
                [c["t"] for c in curve],
                [c["max_diag"] for c in curve],
                [c["bound"] for c in curve],
            )


def cmd_run(args):
    overrides = {
        "model": args.model,
        "seed": args.seed,
        "grid": args.grid,
        "out": args.out,
    }
    cfg = load_config(args.config, overrides)
    out_dir = cfg.get("out", "reports")
    code, reports, extras, params, cfg = run_config(cfg)
    write_run_artifacts(out_dir, cfg, params, reports, extras)
    for r in reports:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status} {r.name}: max_violation={r.max_violation:.6g} "
              f"tol={r.tolerance:g}")
    return code


# ---------------------------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(
        prog="cdcalc",
        description="certification and verification for generalized "
        "curvature-dimension inequalities on sub-Riemannian model spaces",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("models", help="model catalog operations")
    p.add_argument("action", choices=["list"])
    p.set_defaults(func=cmd_models)

    p = sub.add_parser("certify", help="certify CD parameters on a model")
    p.add_argument("--model", required=True)
    p.add_argument("--rho1", type=float, default=0.0)
    p.add_argument("--rho2", type=float, required=True)
    p.add_argument("--kappa", type=float, required=True)
    p.add_argument("--dim", type=float, required=True)
    p.add_argument("--maximize-rho1", action="store_true")
    p.add_argument("--grid-per-axis", type=int, default=3)
    p.add_argument("--out")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("spectrum", help="lattice spectrum to CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--grid", type=int, default=16)
    p.add_argument("--count", type=int, default=64)
    p.add_argument("--out", required=True)
    p.add_argument("--figure")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("verify", help="verify one functional inequality")
    p.add_argument("--model", required=True)
    p.add_argument("--inequality", required=True, choices=VERIFY_CHOICES)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--grid", type=int, default=12)
    p.add_argument("--p", type=float, default=2)
    p.add_argument("--rho1", type=float)
    p.add_argument("--rho2", type=float)
    p.add_argument("--kappa", type=float)
    p.add_argument("--dim", type=float)
    p.add_argument("--tolerance", type=float)
    p.add_argument("--dual-exponent", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("geometry", help="metric-measure quantities on H^3")
    p.add_argument("geom_action", choices=["ball-volume", "perimeter"])
    p.add_argument("--r", type=float, default=1.0)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--set", default="gauge-ball")
    p.add_argument("--param", type=float, default=1.0)
    p.add_argument("--resolution", type=int, default=64)
    p.add_argument("--out")
    p.set_defaults(func=cmd_geometry)

    p = sub.add_parser("run", help="execute a declarative run config")
    p.add_argument("--config", required=True)
    p.add_argument("--model")
    p.add_argument("--seed", type=int)
    p.add_argument("--grid", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_run)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SizeCapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SIZE_CAP
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG


if __name__ == "__main__":
    sys.exit(main())
