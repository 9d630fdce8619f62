"""Command-line front end: ``ffzeta compute | verify | scan | suite``.

Every command prints one JSON document (sorted keys, so output is
byte-stable for a fixed configuration and seed).  Exit codes: 0 success,
1 a verification reported FAIL, 2 configuration error, 3 precision too low
for the request.  ``scan`` exits 0 whatever its verdict.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, replace
from pathlib import Path

from . import acceptance
from .fq import FqContext, field
from .jets import JetMatrix, TateJet, prolong
from .motive import (
    aggregate_size,
    build_phi_im,
    build_phi_twisted,
    build_psi,
    build_psi_im,
    carlitz_phi_twisted,
    count_free_coordinates,
    default_us,
    dim_G,
    twist_working_order,
    verify_rigid,
)
from .poly import Index, TThetaPoly
from .relations import RelationQuery, monomial_scan
from .series import PiSeries, PrecisionError
from .special import (
    PrecisionPlan,
    at_polynomial,
    at_series_jet,
    carlitz_gamma,
    cmpl_jet,
    mzv_oracle,
    omega_jet,
    pi_tilde,
)

COMPUTE_KINDS = ("omega-taylor", "mzv", "at-taylor", "cmpl", "pi-tilde", "at-poly", "carlitz-gamma")
VERIFY_KINDS = ("rigid", "prolong", "atpoly-identity", "psi-inverse", "group-closure")
SCAN_VALUES = ("pth-power-control", "euler-control", "mainb", "omega-family")

MIN_PI_PREC = 40
MAX_JET_ORDER = 8


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    q: int = 3
    modulus: tuple[int, ...] | None = None
    pi_prec: int = 240
    jet_order: int = 4
    index: Index | None = None
    s: int | None = None
    u_file: str | None = None
    dmax: int = 3
    i: int | None = None
    m: int | None = None
    trials: int = 20
    taylor_n: int | None = None
    dm: int | None = None
    dtheta: int | None = None
    values: str | None = None
    seed: int = 0
    theta_form: bool = False
    output: str | None = None
    jobs: int = 1

    @property
    def ctx(self) -> FqContext:
        return field(self.q, self.modulus)

    @property
    def plan(self) -> PrecisionPlan:
        return PrecisionPlan(pi_prec=self.pi_prec, jet_order=self.jet_order)

    def validate(self) -> None:
        if self.pi_prec < MIN_PI_PREC:
            raise ConfigError(f"pi_prec must be at least {MIN_PI_PREC}")
        if not 0 <= self.jet_order <= MAX_JET_ORDER:
            raise ConfigError(f"jet_order must lie in [0, {MAX_JET_ORDER}]")
        if self.taylor_n is not None and not 0 <= self.taylor_n <= MAX_JET_ORDER:
            raise ConfigError(f"taylor-n must lie in [0, {MAX_JET_ORDER}]")
        self.ctx  # raises on a bad q or modulus


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------

# flag name -> (RunConfig attribute, parser)
_FIELDS = {
    "q": ("q", int),
    "modulus": ("modulus", lambda v: tuple(int(x) for x in str(v).split(","))),
    "prec": ("pi_prec", int),
    "pi_prec": ("pi_prec", int),
    "n": ("jet_order", int),
    "jet_order": ("jet_order", int),
    "index": ("index", Index.parse),
    "s": ("s", int),
    "u_file": ("u_file", str),
    "dmax": ("dmax", int),
    "i": ("i", int),
    "m": ("m", int),
    "trials": ("trials", int),
    "taylor_n": ("taylor_n", int),
    "dm": ("dm", int),
    "dtheta": ("dtheta", int),
    "values": ("values", str),
    "seed": ("seed", int),
    "output": ("output", str),
    "jobs": ("jobs", int),
}


def read_config_file(path: str) -> dict:
    """Parse ``key = value`` lines; '#' starts a comment, keys mirror the long flags."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, value = (x.strip() for x in line.split("=", 1))
        key = key.lstrip("-").replace("-", "_")
        if key == "theta_form":
            out[key] = value.lower() in ("1", "true", "yes", "on")
            continue
        if key not in _FIELDS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = value
    return out


def build_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    settings = read_config_file(args.config) if args.config else {}
    for key in _FIELDS:
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    try:
        for key, value in settings.items():
            if key == "theta_form":
                cfg.theta_form = bool(value)
                continue
            attr, parse = _FIELDS[key]
            setattr(cfg, attr, parse(value))
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    if getattr(args, "theta_form", False):
        cfg.theta_form = True
    cfg.validate()
    return cfg


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------


def _need_index(cfg: RunConfig) -> Index:
    if cfg.index is not None:
        return cfg.index
    if cfg.s is not None:
        return Index((cfg.s,))
    raise ConfigError("this command needs --index")


def _read_us(cfg: RunConfig, s: Index) -> tuple[list[TThetaPoly], bool]:
    """u-polynomials from --u-file (a JSON list of A[t] elements) or the built-in H's."""
    if cfg.u_file is None:
        return default_us(cfg.ctx, s), True
    try:
        data = json.loads(Path(cfg.u_file).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read u-file: {exc}") from exc
    try:
        us = [TThetaPoly.from_json(cfg.ctx, u) for u in data]
    except (TypeError, ValueError, KeyError) as exc:
        raise ConfigError(f"u-file entries must be A[t] polynomials in the documented JSON form: {exc}") from exc
    if len(us) != s.depth:
        raise ConfigError("u-file must list one polynomial per part of the index")
    return us, False


def _num(x):
    if x is None or x in (float("inf"), float("-inf")):
        return None
    return int(x)


def _series(cfg: RunConfig, x: PiSeries) -> dict:
    out = x.to_json()
    out["text"] = x.render(theta_form=cfg.theta_form)
    return out


def _jet(cfg: RunConfig, jet: TateJet) -> dict:
    out = jet.to_json()
    for entry, c in zip(out["coeffs"], jet.coeffs):
        entry["text"] = c.render(theta_form=cfg.theta_form)
    return out


def _header(cfg: RunConfig, kind: str) -> dict:
    return {"kind": kind, "q": cfg.q, "modulus": list(cfg.ctx.modulus), "plan": cfg.plan.to_json()}


# ---------------------------------------------------------------------------
# compute
# ---------------------------------------------------------------------------


def cmd_compute(kind: str, cfg: RunConfig) -> tuple[dict, int]:
    ctx, plan = cfg.ctx, cfg.plan
    out = _header(cfg, kind)
    if kind == "omega-taylor":
        jet = omega_jet(ctx, plan)
        out.update(value=_jet(cfg, jet), certified_prec=_num(jet.certified_precision()))
    elif kind == "pi-tilde":
        x = pi_tilde(ctx, plan)
        out.update(value=_series(cfg, x), certified_prec=_num(x.prec))
    elif kind == "mzv":
        s = _need_index(cfg)
        x, cert = mzv_oracle(ctx, s, cfg.dmax)
        out.update(index=list(s.parts), dmax=cfg.dmax, value=_series(cfg, x), certified_prec=cert)
    elif kind == "at-taylor":
        s = _need_index(cfg)
        jet = at_series_jet(ctx, s, plan)
        out.update(index=list(s.parts), value=_jet(cfg, jet), certified_prec=_num(jet.certified_precision()))
    elif kind == "cmpl":
        s = _need_index(cfg)
        us, builtin = _read_us(cfg, s)
        jet = cmpl_jet(us, s, plan, builtin=builtin)
        out.update(
            index=list(s.parts),
            u=[u.to_json() for u in us],
            value=_jet(cfg, jet),
            certified_prec=_num(jet.certified_precision()),
        )
    elif kind == "at-poly":
        if cfg.s is None or cfg.s < 1:
            raise ConfigError("at-poly needs --s >= 1 (returns the polynomial attached to s, H_{s-1})")
        out.update(s=cfg.s, degree=cfg.s - 1, value=at_polynomial(ctx, cfg.s - 1).to_json(), certified_prec=None)
    elif kind == "carlitz-gamma":
        if cfg.s is None or cfg.s < 1:
            raise ConfigError("carlitz-gamma needs --s >= 1")
        out.update(s=cfg.s, value=carlitz_gamma(ctx, cfg.s).to_json(), certified_prec=None)
    else:
        raise ConfigError(f"unknown compute kind {kind!r}")
    return out, 0


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def _builtin_field_only(cfg: RunConfig, what: str) -> None:
    if cfg.modulus is not None and tuple(cfg.modulus) != field(cfg.q).modulus:
        raise ConfigError(f"{what} runs over the built-in field for q = {cfg.q}; drop --modulus")


def _verify_rigid(cfg: RunConfig) -> dict:
    ctx, plan = cfg.ctx, cfg.plan
    n, target = plan.jet_order, plan.tail_bound_log
    if cfg.index is None:
        # the Carlitz block against Omega, prolonged to level m
        m = cfg.m or 0
        order = twist_working_order(cfg.q, n + m, target)
        omega = JetMatrix([[omega_jet(ctx, plan, order=order)]])
        return verify_rigid(carlitz_phi_twisted(ctx).prolong(m), prolong(omega, m), report_order=n)
    s = cfg.index
    us, _ = _read_us(cfg, s)
    if cfg.i is None and cfg.m is None:
        order = twist_working_order(cfg.q, n, target)
        return verify_rigid(build_phi_twisted(us, s), build_psi(us, s, plan, order=order), report_order=n)
    # the aggregate block matrix for (i, m, n), with n the jet order
    i = 2**s.depth - 1 if cfg.i is None else cfg.i
    m = cfg.m or 0
    order = twist_working_order(cfg.q, n + n, target)
    rep = verify_rigid(build_phi_im(i, m, n, s, us), build_psi_im(i, m, n, s, us, plan, order=order), report_order=n)
    rep["expected_size"] = aggregate_size(i, m, n, s)
    rep["pass"] = rep["pass"] and rep["matrix_shape"][0] == rep["expected_size"]
    return rep


def _verify_prolong(cfg: RunConfig) -> dict:
    """rho_m of the Carlitz block against rho_m(Omega), plus multiplicativity of rho_m on random jets."""
    m = 2 if cfg.m is None else cfg.m
    rep = _verify_rigid(replace(cfg, index=None, m=m))
    law = acceptance.prolong_law(cfg.trials, seed=cfg.seed, m=m)
    rep["multiplicativity"] = law
    rep["pass"] = rep["pass"] and law["passed"] == law["trials"]
    return rep


def _verify_group_closure(cfg: RunConfig) -> dict:
    _builtin_field_only(cfg, "group-closure")
    s = _need_index(cfg)
    n = cfg.jet_order
    m = n if cfg.m is None else cfg.m
    i = 2**s.depth - 1 if cfg.i is None else cfg.i
    rep = acceptance.closure_report(cfg.q, s, i, m, n, trials=cfg.trials, seed=cfg.seed)
    closed, counted = dim_G(i, m, n, s), count_free_coordinates(i, m, n, s)
    rep.update(index=list(s.parts), i=i, m=m, n=n, dim_closed_form=closed, dim_counted=counted)
    rep["pass"] = rep["passed"] == rep["trials"] and closed == counted
    return rep


def cmd_verify(kind: str, cfg: RunConfig) -> tuple[dict, int]:
    out = _header(cfg, kind)
    if kind == "rigid":
        rep = _verify_rigid(cfg)
    elif kind == "prolong":
        rep = _verify_prolong(cfg)
    elif kind == "atpoly-identity":
        _builtin_field_only(cfg, kind)
        rep = acceptance.atpoly_identity(cfg.q, _need_index(cfg), cfg.dmax, cfg.plan)
    elif kind == "psi-inverse":
        _builtin_field_only(cfg, kind)
        rep = acceptance.psi_inverse_report(cfg.q, _need_index(cfg), cfg.plan)
    elif kind == "group-closure":
        rep = _verify_group_closure(cfg)
    else:
        raise ConfigError(f"unknown verify kind {kind!r}")
    out["report"] = rep
    out["verdict"] = "PASS" if rep["pass"] else "FAIL"
    return out, 0 if rep["pass"] else 1


# ---------------------------------------------------------------------------
# scan
# ---------------------------------------------------------------------------


def cmd_scan(cfg: RunConfig) -> tuple[dict, int]:
    values = cfg.values or "pth-power-control"
    _builtin_field_only(cfg, "scan")
    plan = cfg.plan
    out = _header(cfg, "scan")
    out["values"] = values
    if values == "pth-power-control":
        base = cfg.s or 1
        scan = acceptance.pth_power_scan(cfg.q, base, cfg.dtheta or 0, plan)
        out["gamma"] = acceptance.pth_power_gamma(cfg.q, base, 4, plan).to_json(cfg.ctx)
    elif values == "euler-control":
        # the minimal relation (theta^q - theta) zeta(q-1) + pi^(q-1) = 0 has theta-degree q
        scan = acceptance.euler_scan(cfg.q, cfg.q if cfg.dtheta is None else cfg.dtheta, plan)
    elif values == "mainb":
        s = cfg.index or Index((1, 5))
        n = 1 if cfg.taylor_n is None else cfg.taylor_n
        vals = acceptance.mainb_values(cfg.q, s, n, plan)
        out.update(index=list(s.parts), taylor_n=n)
        scan = monomial_scan(RelationQuery(vals, 2 if cfg.dtheta is None else cfg.dtheta, 2 if cfg.dm is None else cfg.dm))
    elif values == "omega-family":
        n = 1 if cfg.taylor_n is None else cfg.taylor_n
        vals = acceptance.omega_values(cfg.q, n, plan)
        out["taylor_n"] = n
        scan = monomial_scan(RelationQuery(vals, 3 if cfg.dtheta is None else cfg.dtheta, 2 if cfg.dm is None else cfg.dm))
    else:
        raise ConfigError(f"unknown value set {values!r}; choose from {', '.join(SCAN_VALUES)}")
    out.update(scan.to_json())
    return out, 0


def cmd_suite(cfg: RunConfig, numbers) -> tuple[dict, int]:
    results = acceptance.run_suite(numbers, jobs=cfg.jobs)
    for r in results:
        print(r.line(), file=sys.stderr)
    ok = all(r.ok for r in results)
    return {"kind": "suite", "results": [r.to_json() for r in results], "pass": ok}, 0 if ok else 1


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--q", type=int, help="field size (prime power)")
    p.add_argument("--modulus", help="comma-separated F_p coefficients of the field modulus, low degree first")
    p.add_argument("--prec", type=int, help="varpi-adic precision (default 240)")
    p.add_argument("--n", type=int, help="jet order / Taylor order (default 4)")
    p.add_argument("--index", help="comma-separated index, e.g. 5,1")
    p.add_argument("--s", type=int, help="single weight (at-poly, carlitz-gamma)")
    p.add_argument("--u-file", dest="u_file", help="JSON list of u polynomials in A[t]")
    p.add_argument("--dmax", type=int, help="degree cutoff of the monic-sum oracle (default 3)")
    p.add_argument("--i", type=int, help="aggregate block count i")
    p.add_argument("--m", type=int, help="prolongation level m")
    p.add_argument("--trials", type=int, help="random trials (default 20)")
    p.add_argument("--taylor-n", dest="taylor_n", type=int, help="Taylor order of scanned values")
    p.add_argument("--dm", type=int, help="monomial degree bound")
    p.add_argument("--dtheta", type=int, help="theta-degree bound")
    p.add_argument("--seed", type=int, help="random seed (default 0)")
    p.add_argument("--config", help="key = value file mirroring the long flags")
    p.add_argument("--output", help="write JSON here instead of stdout")
    p.add_argument("--theta-form", dest="theta_form", action="store_true", help="render series in powers of 1/theta")
    p.add_argument("--jobs", type=int, help="worker processes for the suite")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ffzeta", description="Function-field special values with certified precision.")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("compute", help="compute a special value")
    p.add_argument("kind", choices=COMPUTE_KINDS)
    _add_common(p)
    p = sub.add_parser("verify", help="run a verification, exit 1 on FAIL")
    p.add_argument("kind", choices=VERIFY_KINDS)
    _add_common(p)
    p = sub.add_parser("scan", help="bounded-height relation scan")
    p.add_argument("--values", choices=SCAN_VALUES)
    _add_common(p)
    p = sub.add_parser("suite", help="run the acceptance checks")
    p.add_argument("criteria", nargs="*", type=int, help="criterion numbers (default all)")
    _add_common(p)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        cfg = build_config(args)
        if args.command == "compute":
            out, code = cmd_compute(args.kind, cfg)
        elif args.command == "verify":
            out, code = cmd_verify(args.kind, cfg)
        elif args.command == "scan":
            out, code = cmd_scan(cfg)
        else:
            out, code = cmd_suite(cfg, args.criteria or None)
    except PrecisionError as exc:
        print(f"ffzeta: precision error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError) as exc:
        print(f"ffzeta: configuration error: {exc}", file=sys.stderr)
        return 2
    text = json.dumps(out, sort_keys=True, indent=2) + "\n"
    if cfg.output:
        Path(cfg.output).write_text(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
