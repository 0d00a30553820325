"""Command line front end: certificates, sweeps and comparisons as JSON reports.

Exit codes: 0 pass, 1 a check failed, 2 numerical non-convergence, 3 bad configuration.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .conventions import CATALOG_VERSION, REPORT_SCHEMA_VERSION, describe
from .symbolic import GaussRat, Poly
from .testform import named_form

log = logging.getLogger("pvext")

EXIT_OK, EXIT_FAIL, EXIT_NONCONVERGENT, EXIT_CONFIG = 0, 1, 2, 3

COMPARE_TOL = 1e-4
PRODUCT_COMPARE_TOL = 1e-3
FORMAL_ACTION_TOL = 1e-3


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    f: str | None = None
    alpha: str | None = None
    N: int = 0
    q: int = 0
    M: int | None = None
    eps0: float = 0.5
    eps_ratio: float = 0.75
    eps_count: int = 24
    tol: float = 1e-10
    form: str = "nonradial"
    out: str | None = None
    csv: str | None = None
    seed: int = 0
    deterministic: bool = False
    all: bool = False
    k: int = 2
    check: str = "all"
    catalog: str | None = None
    order: int = 2
    normalization: str = "theta"
    V: str = "1"

    def alpha_exact(self) -> GaussRat:
        if self.alpha is None:
            raise ConfigError("--alpha is required")
        try:
            return GaussRat.parse(self.alpha)
        except Exception as exc:  # noqa: BLE001 - any parse failure is a config error
            raise ConfigError(f"cannot parse alpha {self.alpha!r}: {exc}") from exc

    def eps_grid(self) -> list[float]:
        from .quad import geometric_grid

        try:
            return geometric_grid(self.eps0, self.eps_ratio, self.eps_count)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc


def _datum(cfg: RunConfig):
    from .weyl import load_catalog, lookup

    if cfg.f is None:
        raise ConfigError("--f is required")
    if cfg.catalog:
        cat = load_catalog(Path(cfg.catalog).read_text())
        if cfg.f in cat:
            return cat[cfg.f]
    try:
        return lookup(cfg.f)
    except KeyError as exc:
        raise ConfigError(str(exc)) from exc


def _form(cfg: RunConfig, holo):
    try:
        return named_form(cfg.form, holo)
    except (ValueError, KeyError, FileNotFoundError) as exc:
        raise ConfigError(str(exc)) from exc


def _cx(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def _status_code(passed: bool, statuses=()) -> int:
    if any(s not in ("ok", "identically-zero") for s in statuses if s):
        return EXIT_NONCONVERGENT
    return EXIT_OK if passed else EXIT_FAIL


# --------------------------------------------------------------------------------------
# commands; each returns (result dict, passed, exit code)


def cmd_verify_bernstein(cfg: RunConfig):
    from .weyl import catalog, certify_conjugate, certify_iterate, load_catalog, verify_bernstein

    if cfg.catalog:
        data = load_catalog(Path(cfg.catalog).read_text())
    else:
        data = catalog()
    if not cfg.all:
        if cfg.f is None:
            raise ConfigError("give --f or --all")
        if cfg.catalog and cfg.f not in data:
            raise ConfigError(f"{cfg.f!r} not in the supplied catalog")
        d = data[cfg.f] if cfg.catalog else _datum(cfg)
        data = {d.name: d}
    M = cfg.M if cfg.M is not None else 5
    entries = []
    for d in data.values():
        certs = [verify_bernstein(d)] + [certify_iterate(d, m) for m in range(1, M + 1)]
        certs.append(certify_conjugate(d, 1))
        entries.append({"name": d.name, "certificates": [c.to_json() for c in certs],
                        "passed": all(c.passed for c in certs)})
    passed = all(e["passed"] for e in entries)
    return {"entries": entries, "M": M}, passed, _status_code(passed)


def cmd_pv(cfg: RunConfig):
    from .regularize import pv_limit

    d = _datum(cfg)
    res = pv_limit(d, complex(cfg.alpha_exact()), cfg.N, cfg.q, _form(cfg, d.holo), cfg.eps_grid(), cfg.tol)
    if cfg.csv:
        Path(cfg.csv).write_text(res.sweep.to_csv())
    ok = res.status == "ok"
    code = EXIT_OK if ok else (EXIT_FAIL if res.status == "divergent" else EXIT_NONCONVERGENT)
    return res.to_json(), ok, code


def cmd_merext(cfg: RunConfig):
    from .regularize import PoleError, merext_eval

    d = _datum(cfg)
    try:
        res = merext_eval(d, complex(cfg.alpha_exact()), cfg.N, cfg.q, _form(cfg, d.holo), cfg.tol, cfg.M)
    except PoleError as exc:
        return {"error": str(exc)}, False, EXIT_FAIL
    return res.to_json(), True, EXIT_OK


def cmd_laurent(cfg: RunConfig):
    from .regularize import laurent_coeffs

    d = _datum(cfg)
    res = laurent_coeffs(d, complex(cfg.alpha_exact()), cfg.N, _form(cfg, d.holo), M=cfg.M, tol=cfg.tol)
    return res.to_json(), True, EXIT_OK


def cmd_compare(cfg: RunConfig):
    from .regularize import Geometry, compare_T_S

    d = _datum(cfg)
    rep = compare_T_S(d, complex(cfg.alpha_exact()), cfg.N, cfg.q, _form(cfg, d.holo), cfg.eps_grid(), cfg.tol)
    tol = PRODUCT_COMPARE_TOL if Geometry.of(d).kind == "product" else COMPARE_TOL
    passed = rep.rel_discrepancy <= tol
    out = rep.to_json()
    out["threshold"] = tol
    return out, passed, _status_code(passed, [rep.diagnostics.get("pv_status")])


def cmd_finite_part(cfg: RunConfig):
    from .regularize import finite_part

    d = _datum(cfg)
    res = finite_part(d, complex(cfg.alpha_exact()), cfg.N, _form(cfg, d.holo), cfg.eps_grid(), cfg.q, cfg.tol)
    return res.to_json(), res.status == "ok", _status_code(True, [res.status])


def cmd_fiber_fit(cfg: RunConfig):
    from .expansion import fiber_expansion

    try:
        model = fiber_expansion(cfg.k, _form(cfg, ("z",)), cfg.order, cfg.normalization)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    passed = model.diagnostics["max_oracle_discrepancy"] <= 1e-6
    return model.to_json(), passed, _status_code(passed)


def cmd_boundary_decay(cfg: RunConfig):
    from .regularize import boundary_decay_check

    alpha = complex(cfg.alpha_exact()) if cfg.alpha is not None else 0.0
    res = boundary_decay_check(cfg.N, _form(cfg, ("z",)), cfg.eps_grid(), alpha)
    return res, res["passed"], EXIT_OK if res["passed"] else EXIT_FAIL


def cmd_formal_action(cfg: RunConfig):
    from .regularize import formal_action_check, vector_field

    d = _datum(cfg)
    if d.d != 1:
        raise ConfigError("formal-action takes a one-variable f; V is given by its coefficient")
    try:
        V = vector_field(d.vars, {d.holo[0]: Poly.parse(cfg.V, d.vars)})
    except (SyntaxError, ValueError) as exc:
        raise ConfigError(f"bad vector field coefficient {cfg.V!r}") from exc
    res = formal_action_check(d, complex(cfg.alpha_exact()), cfg.N, V, _form(cfg, d.holo), cfg.eps_grid(), cfg.tol)
    passed = res["rel_discrepancy"] <= FORMAL_ACTION_TOL
    return res, passed, _status_code(passed, [res["lhs_status"], res["rhs_status"]])


def cmd_symfun(cfg: RunConfig):
    from . import symfun as S

    if cfg.k not in (2, 3):
        raise ConfigError("--k must be 2 or 3")
    ctx = S.SymContext(cfg.k)
    check = cfg.check
    if check == "all":
        res = S.run_all(cfg.k)
        return res, res["passed"], _status_code(res["passed"])
    if check == "pushforward":
        certs = [S.pushforward_field_check(ctx, w) for w in (-1, 0, 1)]
    elif check == "trace-annihilation":
        certs = [S.trace_annihilation_check(ctx, 8)]
    elif check == "footnote-identity":
        certs = [S.footnote_identity(ctx, 8)]
    elif check == "shifted-coordinates":
        certs = [S.shifted_coordinates_check(cfg.k)]
    elif check == "xdist":
        if cfg.k != 2:
            raise ConfigError("xdist checks are symbolic for k = 2 only")
        certs = [S.xdist_annihilation_check(c) for c in ("G", 1, 0, -1)]
    elif check == "commutator":
        return S.commutator_report(ctx), True, EXIT_OK
    elif check == "newton":
        res = S.newton_roundtrip(ctx, 8, np.random.default_rng(cfg.seed))
        return res, res["passed"], _status_code(res["passed"])
    elif check == "conjugate-generators":
        if cfg.k != 2:
            raise ConfigError("conjugate generator identities are computed for k = 2 only")
        return S.conjugate_generator_check(), True, EXIT_OK
    elif check == "pairing":
        if cfg.k != 2:
            raise ConfigError("the numeric pairing check is for k = 2")
        lam = complex(cfg.alpha_exact()) if cfg.alpha is not None else 0.5
        if lam.imag:
            raise ConfigError("the pairing check takes a real lam")
        from .symbolic import Poly as P

        Q = ctx.U[0] - ctx.mul(P.var(ctx.svars, "lam"))
        out = {}
        ok = True
        for name, op in (("U0 - lam", Q), ("T^2", ctx.T(2))):
            r = S.numeric_pairing_check(op, lam.real, seed=cfg.seed)
            out[name] = r.to_json()
            ok = ok and r.passed
        return out, ok, _status_code(ok)
    elif check == "k3-numeric":
        res = S.k3_numeric_checks(seed=cfg.seed)
        return res, res["passed"], _status_code(res["passed"])
    else:
        raise ConfigError(f"unknown check {check!r}; choose from all, {', '.join(S.CHECKS)}")
    passed = all(c.passed for c in certs)
    return {"certificates": [c.to_json() for c in certs]}, passed, _status_code(passed)


COMMANDS = {
    "verify-bernstein": cmd_verify_bernstein,
    "pv": cmd_pv,
    "merext": cmd_merext,
    "laurent": cmd_laurent,
    "compare": cmd_compare,
    "finite-part": cmd_finite_part,
    "fiber-fit": cmd_fiber_fit,
    "boundary-decay": cmd_boundary_decay,
    "formal-action": cmd_formal_action,
    "symfun": cmd_symfun,
}


class _Parser(argparse.ArgumentParser):
    """Usage errors are configuration errors (exit 3), not argparse's default 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pvext", description=__doc__.splitlines()[0],
                     epilog="Negative values need the '=' form: --alpha=-13/10")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--f", help="catalog entry or polynomial, e.g. z, 'z^2', 'z1*z2'")
        p.add_argument("--alpha", help="exact value: '3/10', '0.3', '1/2+1/4*i'")
        p.add_argument("--N", type=int, default=0)
        p.add_argument("--q", type=int, default=0)
        p.add_argument("--M", type=int, default=None)
        p.add_argument("--eps0", type=float, default=0.5)
        p.add_argument("--eps-ratio", type=float, default=0.75)
        p.add_argument("--eps-count", type=int, default=24)
        p.add_argument("--tol", type=float, default=1e-10)
        p.add_argument("--form", default="nonradial", help="radial, nonradial, offset, wide or a JSON file")
        p.add_argument("--out", help="write the JSON report here instead of stdout")
        p.add_argument("--csv", help="write the cutoff sweep as CSV (pv only)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--deterministic", action="store_true", help="omit timestamps and timings")
        p.add_argument("--all", action="store_true")
        p.add_argument("--k", type=int, default=2)
        p.add_argument("--check", default="all")
        p.add_argument("--catalog", help="JSON catalog file replacing the built-in one")
        p.add_argument("--order", type=int, default=2)
        p.add_argument("--normalization", default="theta", choices=["theta", "zeta", "eta"])
        p.add_argument("--V", default="1", help="coefficient a(z) of the vector field a(z) d/dz")
    return parser


def _config_from_args(args) -> RunConfig:
    return RunConfig(
        command=args.command, f=args.f, alpha=args.alpha, N=args.N, q=args.q, M=args.M,
        eps0=args.eps0, eps_ratio=args.eps_ratio, eps_count=args.eps_count, tol=args.tol,
        form=args.form, out=args.out, csv=args.csv, seed=args.seed, deterministic=args.deterministic,
        all=args.all, k=args.k, check=args.check, catalog=args.catalog, order=args.order,
        normalization=args.normalization, V=args.V,
    )


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, complex):
        return _cx(obj)
    if isinstance(obj, np.complexfloating):
        return _cx(obj)
    if isinstance(obj, float) and not np.isfinite(obj):
        return str(obj)
    return obj


def run(cfg: RunConfig) -> tuple[dict, int]:
    start = time.time()
    report = {
        "schema_version": REPORT_SCHEMA_VERSION,
        "catalog_version": CATALOG_VERSION,
        "pvext_version": __version__,
        "config": asdict(cfg),
        "conventions": describe(),
    }
    if cfg.alpha is not None:
        try:
            report["alpha_exact"] = str(cfg.alpha_exact())
        except ConfigError:
            pass
    try:
        result, passed, code = COMMANDS[cfg.command](cfg)
    except ConfigError as exc:
        report.update({"passed": False, "error": str(exc)})
        return report, EXIT_CONFIG
    report["result"] = result
    report["passed"] = bool(passed)
    report["exit_code"] = code
    if not cfg.deterministic:
        report["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%S%z")
        report["elapsed_seconds"] = round(time.time() - start, 3)
    return report, code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    cfg = _config_from_args(args)
    report, code = run(cfg)
    text = json.dumps(_jsonable(report), indent=2, sort_keys=True) + "\n"
    if cfg.out:
        Path(cfg.out).write_text(text)
        log.info("report written to %s", cfg.out)
    else:
        sys.stdout.write(text)
    if code == EXIT_CONFIG:
        print(f"pvext: configuration error: {report.get('error')}", file=sys.stderr)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
