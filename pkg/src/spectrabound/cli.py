"""Command-line front end.

Usage::

    spectrabound {bounds,verify,neumann,similar2x2,report} CONFIG.json [options]

The config is one JSON document, for example::

    {"domain": {"kind": "ellipse", "a": 2, "b": 1},
     "seed": 0, "trials": 30, "dims": [2, 4, 8], "degrees": [1, 2, 3]}

Exit codes: 0 success, 1 certificate violation, 2 config error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from .bounds import all_bounds, certificate
from .geometry import ConvexDomain, Disk, DomainError, domain_from_spec, metrics
from .harness import TrialConfig, disk_attainment, random_rational, run_trials
from .neumann import assemble_p, estimate_cn, mobius, solve_neumann
from .operators import NumericalError, RationalFunction, boundary_sup, matrix_from_json
from .similarity import build_similarity, canonicalize, disk_similarity_jordan

SCHEMA = "spectrabound-report-v1"
EXIT_OK, EXIT_VIOLATION, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2, 3
COMMANDS = ("bounds", "verify", "neumann", "similar2x2", "report")

log = logging.getLogger("spectrabound")


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# config


def load_config(path, overrides: dict) -> dict:
    try:
        cfg = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file {path} not found") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    for key, value in overrides.items():
        if value is None:
            continue
        if isinstance(value, (int, float)) and key != "seed" and not value > 0:
            raise ConfigError(f"--{key} must be positive")
        cfg[key] = value
    for key in ("trials", "resolution"):
        if key in cfg and not (isinstance(cfg[key], int) and cfg[key] > 0):
            raise ConfigError(f"{key} must be a positive integer")
    return cfg


def _domain(cfg) -> ConvexDomain:
    if "domain" not in cfg:
        raise ConfigError("config needs a 'domain' object")
    return domain_from_spec(cfg["domain"])


def _jsonify(obj):
    if isinstance(obj, dict):
        return {k: _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, np.ndarray):
        return _jsonify(obj.tolist())
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return _jsonify(obj.item())
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


# ---------------------------------------------------------------------------
# commands


def cmd_bounds(cfg) -> tuple[dict, int]:
    domain = _domain(cfg)
    out = {"domain": domain.to_spec()}
    if domain.bounded:
        m = metrics(domain)
        out["metrics"] = m.as_dict()
    out["certificates"] = [c.as_dict() for c in all_bounds(domain)]
    out["combined"] = {kind: certificate(domain, kind).as_dict() for kind in ("C_cb", "C_N")}
    return out, EXIT_OK


def _trial_config(cfg, domain) -> TrialConfig:
    keys = ("dims", "trials", "degrees", "seed", "margin", "inject_attainment")
    kw = {k: cfg[k] for k in keys if k in cfg}
    if "resolution" in cfg:
        kw["density"] = cfg["resolution"]
    return TrialConfig(domain, **kw)


def cmd_verify(cfg):
    domain = _domain(cfg)
    report = run_trials(_trial_config(cfg, domain), workers=int(cfg.get("workers", 1)))
    out = report.as_dict(include_records=bool(cfg.get("records", False)))
    out["evidence_note"] = "max_ratio is an empirical lower estimate, not a certificate"
    return out, (EXIT_OK if report.ok else EXIT_VIOLATION), report


def _neumann_family(cfg, domain):
    spec = cfg.get("family", {"type": "default"})
    kind = spec.get("type", "default")
    if kind == "constant":
        return [RationalFunction.constant(1.0)]
    if kind == "mobius" and not isinstance(domain, Disk):
        raise ConfigError("the Moebius family is defined for disks only")
    if kind == "mobius" or (kind == "default" and isinstance(domain, Disk)):
        moduli = spec.get("moduli", [0.99])
        count = int(spec.get("angles", 8))
        fam = []
        for m in moduli:
            for k in range(count):
                c = m * np.exp(2j * math.pi * k / count)
                fam.append(mobius(c).compose_affine(1 / domain.radius, -domain.center / domain.radius))
        return fam
    if kind in ("default", "random"):
        seed = int(cfg.get("seed", 0))
        size = int(spec.get("size", 12))
        return [random_rational(domain, 1 + k % 3, (seed, 71, k)) for k in range(size)]
    raise ConfigError(f"unknown family type {kind!r}")


def cmd_neumann(cfg):
    domain = _domain(cfg)
    if not domain.bounded:
        raise ConfigError(
            "Neumann assembly needs a bounded domain; sector Neumann constants are closed forms "
            "(use the 'bounds' command)"
        )
    n = int(cfg.get("resolution", 1024))
    family = _neumann_family(cfg, domain)
    system = assemble_p(domain, n)
    c_n, d_n = estimate_cn(domain, family, n=n)
    out = {
        "domain": domain.to_spec(),
        "nodes": system.n,
        "family_size": len(family),
        "c_n_est": c_n,
        "d_n_est": d_n,
        "row_sum_error": system.row_sum_error(),
        "condition_number": system.condition_number,
        "certificate_C_N": certificate(domain, "C_N").value,
        "evidence_note": "c_n_est and d_n_est are lower estimates",
    }
    if isinstance(domain, Disk):
        worst = 0.0
        for r in family:
            r = r.scaled(1.0 / boundary_sup(r, domain))
            g = solve_neumann(system, r(system.nodes.sigma)).g
            exact = 2 * r(system.nodes.sigma) - r(np.array([domain.center]))[0]
            worst = max(worst, float(np.max(np.abs(g - exact))))
        out["disk_closed_form_residual"] = worst
    return out, EXIT_OK


def cmd_similar2x2(cfg):
    out = {}
    gammas = cfg.get("gamma", cfg.get("gammas", [0.1, 0.5, 1.5, 3.0, 10.0]))
    if not isinstance(gammas, list):
        gammas = [gammas]
    sims = [build_similarity(float(g)) for g in gammas]
    out["similarities"] = [s.as_dict() for s in sims]
    ok = all(s.b_norm_error < 1e-10 and 1 < s.X < 2 and s.quadratic_residual < 1e-9 for s in sims)
    if "matrix" in cfg:
        A = matrix_from_json(cfg["matrix"])
        form = canonicalize(A)
        entry = {
            "case": form.case,
            "param": form.param,
            "lam": form.lam,
            "beta": form.beta,
            "reconstruction_error": float(np.max(np.abs(form.reconstruct() - A))),
        }
        if form.case == "distinct_eigenvalues" and form.param > 0:
            entry["similarity"] = build_similarity(form.param).as_dict()
        elif form.case == "equal_eigenvalues" and form.param > 0:
            # W(A) is a disk of radius param/2; rescale to the unit disk Jordan block c = 2
            S, kappa = disk_similarity_jordan(2.0)
            entry["jordan_similarity"] = {"S": S, "kappa": kappa}
        out["matrix"] = entry
    return out, (EXIT_OK if ok else EXIT_VIOLATION)


def cmd_report(cfg):
    domain = _domain(cfg)
    out = {"bounds": cmd_bounds(cfg)[0]}
    verify, code, _ = cmd_verify(cfg)
    out["verify"] = verify
    if domain.bounded:
        out["neumann"] = cmd_neumann(cfg)[0]
    if isinstance(domain, Disk):
        out["disk_attainment"] = disk_attainment()
    return out, code


def _dispatch(command, cfg):
    if command == "verify":
        out, code, report = cmd_verify(cfg)
        return out, code, report
    fn = {"bounds": cmd_bounds, "neumann": cmd_neumann, "similar2x2": cmd_similar2x2, "report": cmd_report}[command]
    out, code = fn(cfg)
    return out, code, None


# ---------------------------------------------------------------------------
# output


def _csv_rows(command, out, report):
    if report is not None:
        return report.to_csv()
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if command == "bounds":
        w.writerow(["source", "constant_kind", "value", "applicable"])
        for c in out["certificates"]:
            w.writerow([c["source"], c["constant_kind"], c["value"], c["applicable"]])
        return buf.getvalue()
    w.writerow(["key", "value"])
    for k, v in out.items():
        if isinstance(v, (int, float, str)) or v is None:
            w.writerow([k, v])
    return buf.getvalue()


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="spectrabound", description="K-spectral constant bounds and checks")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("config", help="path to the JSON config")
        s.add_argument("--seed", type=int)
        s.add_argument("--trials", type=int)
        s.add_argument("--resolution", type=int)
        s.add_argument("--output", "-o", help="write here instead of stdout")
        s.add_argument("--format", choices=("json", "csv"), default=None)
        s.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr,
                        format="%(levelname)s %(message)s")
    try:
        cfg = load_config(args.config, {"seed": args.seed, "trials": args.trials, "resolution": args.resolution})
        fmt = args.format or cfg.get("format", "json")
        if fmt not in ("json", "csv"):
            raise ConfigError("format must be json or csv")
        out, code, report = _dispatch(args.command, cfg)
    except (ConfigError, DomainError, KeyError, TypeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    doc = {"schema": SCHEMA, "command": args.command, "config": _jsonify(cfg), "result": _jsonify(out)}
    if fmt == "csv":
        text = _csv_rows(args.command, out, report) + f"# schema: {SCHEMA}\n"
    else:
        text = json.dumps(doc, indent=2)
    if args.output:
        Path(args.output).write_text(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    if code == EXIT_VIOLATION:
        print("certificate violation detected", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
