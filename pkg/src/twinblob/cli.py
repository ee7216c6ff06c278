"""Command-line front end.

    twinblob check --config run.json [--suite NAME ...] [--format json-lines|summary-text] [--out PATH]
    twinblob spectrum --config run.json --out spectrum.csv
    twinblob list-checks

Configs are flat JSON objects.  Complex values are written as ``"re,im"``
strings (plain numbers are accepted too).  ``BLOB_SEED`` overrides the seed.
Exit status: 0 when every report passed, 1 on a failed check, 2 on a bad config.
"""
import argparse
import json
import os
import sys
import time
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from . import algebra, baxter, transfer
from .algebra import (AlgebraParams, LocalRep, make_params, perturbed_rep, qgroup_rep, tower,
                      twin_rep, xxz_rep)
from .baxter import LaxFactory, sample_lambdas, sample_pairs
from .report import CheckReport, all_ok, emit_report, make_report, with_timing
from .tensor import eq_residual
from .transfer import DoubleRow

__all__ = ["RunConfig", "ConfigError", "parse_config", "run_suite", "spectrum_rows", "main",
           "SUITES", "DEFAULT_SUITES"]

SUITES = ("algebra", "ybe", "re", "conditions", "transfer", "symmetry", "exchange", "duality",
          "spectrum")
DEFAULT_SUITES = SUITES[:-1]

XXZ_BOUNDARIES = ("trivial", "xxz-m")
TWIN_BOUNDARIES = ("trivial", "i", "ii", "plus", "iii")


class ConfigError(ValueError):
    """Invalid run configuration; the message names the offending key."""


@dataclass(frozen=True)
class RunConfig:
    model: str
    boundary: str
    N: int
    mu: float
    Q: complex
    zeta: complex = 0.3 + 0j
    seed: int = 42
    tolerance: float = 1e-9
    lambda_samples: int = 10
    suites: tuple = DEFAULT_SUITES
    timings: bool = field(default=False, compare=False)


def parse_complex(value, key: str = "value") -> complex:
    if isinstance(value, bool):
        raise ConfigError(f"{key}: expected a number or 're,im' string")
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, str):
        parts = value.split(",")
        try:
            if len(parts) == 1:
                return complex(float(parts[0]))
            if len(parts) == 2:
                return complex(float(parts[0]), float(parts[1]))
        except ValueError:
            pass
    raise ConfigError(f"{key}: expected a number or 're,im' string, got {value!r}")


def parse_config(text, seed_override: Optional[str] = None) -> RunConfig:
    """Validate a flat JSON document (string or dict) and fill defaults."""
    if isinstance(text, (str, bytes)):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from None
    else:
        doc = dict(text)
    if not isinstance(doc, dict):
        raise ConfigError("config must be a key-value object")
    known = {"model", "boundary", "N", "mu", "Q", "zeta", "seed", "tolerance", "lambda_samples",
             "suites"}
    for key in doc:
        if key not in known:
            raise ConfigError(f"{key}: unknown key")
    for key in ("model", "boundary", "N", "mu", "Q"):
        if key not in doc:
            raise ConfigError(f"{key}: missing required key")

    model = doc["model"]
    if model not in ("xxz", "twin"):
        raise ConfigError(f"model: must be 'xxz' or 'twin', got {model!r}")
    boundary = doc["boundary"]
    allowed = XXZ_BOUNDARIES if model == "xxz" else TWIN_BOUNDARIES
    if boundary not in allowed:
        raise ConfigError(f"boundary: {boundary!r} incompatible with model {model!r}")

    def integer(key, lo):
        v = doc[key]
        if isinstance(v, bool) or not isinstance(v, int):
            raise ConfigError(f"{key}: expected an integer, got {v!r}")
        if v < lo:
            raise ConfigError(f"{key}: must be >= {lo}, got {v}")
        return v

    def real(key):
        v = doc[key]
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigError(f"{key}: expected a real number, got {v!r}")
        return float(v)

    N = integer("N", 2)
    mu = real("mu")
    if abs(np.sin(mu)) < 1e-12:
        raise ConfigError(f"mu: degenerate value {mu} (multiple of pi)")
    Q = parse_complex(doc["Q"], "Q")
    if Q == 0 or abs(Q + 1 / Q) < 1e-10:
        raise ConfigError(f"Q: degenerate value {Q} (Q + 1/Q vanishes)")
    cfg = {"model": model, "boundary": boundary, "N": N, "mu": mu, "Q": Q}
    if "zeta" in doc:
        cfg["zeta"] = parse_complex(doc["zeta"], "zeta")
    if "seed" in doc:
        cfg["seed"] = integer("seed", 0)
    if "tolerance" in doc:
        tol = real("tolerance")
        if not 0 < tol < 1:
            raise ConfigError(f"tolerance: must lie in (0, 1), got {tol}")
        cfg["tolerance"] = tol
    if "lambda_samples" in doc:
        cfg["lambda_samples"] = integer("lambda_samples", 1)
    if "suites" in doc:
        suites = doc["suites"]
        if not isinstance(suites, list):
            raise ConfigError("suites: expected a list")
        for s in suites:
            if s not in SUITES:
                raise ConfigError(f"suites: unknown suite {s!r}")
        cfg["suites"] = tuple(suites)
    if seed_override is not None:
        try:
            seed = int(seed_override)
        except ValueError:
            raise ConfigError(f"BLOB_SEED: expected an integer, got {seed_override!r}") from None
        if seed < 0:
            raise ConfigError("BLOB_SEED: must be non-negative")
        cfg["seed"] = seed
    return RunConfig(**cfg)


# ---------------------------------------------------------------------------
# suite runners; each returns a list of reports and may raise


@dataclass
class _Context:
    cfg: RunConfig
    params: AlgebraParams
    rep: LocalRep
    lax: LaxFactory
    pairs: list
    lams: list
    _dr: Optional[DoubleRow] = None

    @property
    def dr(self) -> DoubleRow:
        if self._dr is None:
            self._dr = DoubleRow(self.lax)
        return self._dr


def _build_context(cfg: RunConfig) -> _Context:
    params = make_params(cfg.mu, cfg.Q, cfg.zeta, model=cfg.model, boundary=cfg.boundary)
    build = xxz_rep if cfg.model == "xxz" else twin_rep
    rep = build(params, cfg.N, cfg.boundary)
    pairs = sample_pairs(cfg.seed, cfg.lambda_samples, cfg.mu)
    lams = sample_lambdas(cfg.seed + 1, min(cfg.lambda_samples, 5), cfg.mu)
    return _Context(cfg, params, rep, LaxFactory(rep), pairs, lams)


def _single(cfg: RunConfig) -> float:
    """Tolerance for single-equation checks, one digit tighter than chained products."""
    return cfg.tolerance / 10


def _qgroup_names(model):
    return ("rho",) if model == "xxz" else ("sigma1", "sigma2", "rho1", "rho2")


def _suite_algebra(ctx: _Context) -> List[CheckReport]:
    tol = _single(ctx.cfg)
    p, rep = ctx.params, ctx.rep
    out = algebra.check_blob(rep, tol)
    u1 = rep.U_gens[0]
    out.append(make_report("algebra.wrong_delta.U_squared",
                           eq_residual(u1 @ u1, (p.delta + 0.1) * u1), tol, params=p, negative=True))
    if rep.e_gen is not None:
        bad = algebra.check_blob(rep, tol, kappa=p.kappa + 0.1, prefix="algebra.wrong_kappa")
        r = next(r for r in bad if r.check_id.endswith("U1_e_U1"))
        out.append(make_report(r.check_id, r.residual, tol, params=p, negative=True))
    towers = [tower(qgroup_rep(n, p), ctx.cfg.N) for n in _qgroup_names(ctx.cfg.model)]
    for n in _qgroup_names(ctx.cfg.model):
        out += algebra.check_qgroup_relations(qgroup_rep(n, p), tol, prefix="algebra.local")
    for tw in towers:
        out += algebra.check_qgroup_relations(tw, tol, prefix="algebra.tower")
    out += algebra.check_centralizer_local(rep, towers, tol, prefix="algebra.centralizer")
    if ctx.cfg.model == "twin":
        reps, _, _ = algebra.check_factorization(p, tol)
        out += [replace(r, check_id="algebra." + r.check_id) for r in reps]
    return out


def _suite_ybe(ctx: _Context) -> List[CheckReport]:
    tol = _single(ctx.cfg)
    out = baxter.check_ybe(ctx.lax, ctx.pairs, tol)
    bad = LaxFactory(perturbed_rep(ctx.rep, 1e-2))
    neg = baxter.check_ybe(bad, ctx.pairs[:1], tol, prefix="ybe.perturbed", negative=True)
    return out + neg


def _suite_re(ctx: _Context) -> List[CheckReport]:
    tol = _single(ctx.cfg)
    cfg, lax = ctx.cfg, ctx.lax
    out = baxter.check_re(lax, ctx.pairs, tol)
    # the constant zeta only shifts x(l); a second value must work equally well
    p2 = make_params(cfg.mu, cfg.Q, cfg.zeta + 0.45 - 0.2j, model=cfg.model, boundary=cfg.boundary)
    lax2 = LaxFactory(replace(ctx.rep, params=p2))
    out += baxter.check_re(lax2, ctx.pairs, tol, prefix="re.second_zeta")
    if not lax.trivial:
        bad = LaxFactory(replace(ctx.rep, params=ctx.params.with_kappa(ctx.params.kappa + 0.2)))
        r = baxter.check_re(bad, ctx.pairs[:1], tol, prefix="re.wrong_kappa")[0]
        out.append(make_report(r.check_id, r.residual, tol, params=ctx.params, negative=True))
    out += transfer.check_reflection_intertwiner(lax, ctx.pairs[:5], tol, prefix="re.intertwiner")
    return out


def _suite_conditions(ctx: _Context) -> List[CheckReport]:
    tol = _single(ctx.cfg)
    lax = ctx.lax
    out = baxter.check_unitarity_crossing(lax, ctx.lams, tol)
    out += baxter.check_braid(lax, tol)
    out += baxter.check_rr2(lax, tol)
    out += baxter.check_asymptotics(lax)
    res = max(eq_residual(lax.Rhat(l), lax.Rhat_by_inverse(l)) for l in ctx.lams)
    out.append(make_report("conditions.rhat_closed_form", res, tol, params=ctx.params))
    # unitarity-scalar mismatch: R(l) R21(-l) against the wrong multiple of 1
    l0 = ctx.lams[0]
    wrong = eq_residual(lax.R(l0) @ lax.R21(-l0),
                        1.5 * lax.unitarity_scalar(l0) * np.eye(lax.d ** 2))
    out.append(make_report("conditions.wrong_unitarity_scalar", wrong, tol, params=ctx.params,
                           negative=True))
    return out


def _suite_transfer(ctx: _Context) -> List[CheckReport]:
    tol = ctx.cfg.tolerance
    dr = ctx.dr
    out = transfer.check_transfer_commute(dr, ctx.pairs, tol)
    out.append(transfer.check_script_T_re(dr, *ctx.pairs[0], tol=tol))
    out += transfer.check_hamiltonian(dr, ctx.lams, tol)
    bad = DoubleRow.from_rep(perturbed_rep(ctx.rep, 5e-2))
    l1, l2 = ctx.pairs[0]
    res = transfer.comm_residual(bad.transfer_t(l1), bad.transfer_t(l2))
    out.append(make_report("transfer.perturbed_chain", res, tol, params=ctx.params, negative=True))
    return out


def _suite_symmetry(ctx: _Context) -> List[CheckReport]:
    tol = ctx.cfg.tolerance
    out = transfer.check_symmetry_suite(ctx.dr, ctx.lams, tol)
    out += transfer.check_K_intertwining(ctx.lax, ctx.lams, tol / 10)
    return out


def _suite_exchange(ctx: _Context) -> List[CheckReport]:
    return transfer.check_exchange_relations(ctx.dr, ctx.lams[0], ctx.cfg.tolerance)


def _suite_duality(ctx: _Context) -> List[CheckReport]:
    dr = ctx.dr
    out = transfer.check_duality(dr, ctx.lams, ctx.cfg.tolerance)
    out.append(transfer.gram_rank_diagnostic(dr))
    out += transfer.asymptotic_trace_diagnostic(dr)
    return out


def _suite_spectrum(ctx: _Context) -> List[CheckReport]:
    ev = transfer.spectrum(ctx.dr.hamiltonian())
    groups = transfer.multiplicities(ev)
    pattern = sorted((m for _, m in groups), reverse=True)
    return [make_report("spectrum.hamiltonian", 0.0, ctx.cfg.tolerance, params=ctx.params,
                        diagnostic=True,
                        notes=f"{len(ev)} eigenvalues, {len(groups)} distinct, "
                              f"multiplicities {pattern}")]


RUNNERS: Dict[str, Callable[[_Context], List[CheckReport]]] = {
    "algebra": _suite_algebra,
    "ybe": _suite_ybe,
    "re": _suite_re,
    "conditions": _suite_conditions,
    "transfer": _suite_transfer,
    "symmetry": _suite_symmetry,
    "exchange": _suite_exchange,
    "duality": _suite_duality,
    "spectrum": _suite_spectrum,
}

SUITE_NOTES = {
    "algebra": "TL / B-type Hecke / blob relations, quantum-group towers, centralizer",
    "ybe": "Yang-Baxter equation at seeded spectral pairs, perturbed-generator control",
    "re": "reflection equation (two zeta values), reflection-algebra intertwiner",
    "conditions": "unitarity, crossing, twist, braid limits, constant reflection relation",
    "transfer": "[t(l1), t(l2)], reflection equation of T, Hamiltonian locality",
    "symmetry": "preserved charges, broken generators, K intertwining",
    "exchange": "exchange relations between T blocks and tower generators",
    "duality": "asymptotic charges against U_l, e and t(l); rank and trace diagnostics",
    "spectrum": "Hamiltonian eigenvalues and multiplicities (diagnostic)",
}


def _dedupe(reports: List[CheckReport]) -> List[CheckReport]:
    seen: Dict[str, int] = {}
    out = []
    for r in reports:
        n = seen.get(r.check_id, 0)
        seen[r.check_id] = n + 1
        out.append(r if n == 0 else replace(r, check_id=f"{r.check_id}#{n}"))
    return out


def run_suite(cfg: RunConfig, suites: Optional[Sequence[str]] = None) -> List[CheckReport]:
    """Run the requested suites; failures become reports, ordering is by check id."""
    names = cfg.suites if suites is None else tuple(suites)
    if not names:
        return []
    reports: List[CheckReport] = []
    try:
        ctx = _build_context(cfg)
    except Exception as exc:  # construction failure still yields a report per suite
        return sorted((make_report(f"{s}.construction", float("nan"), cfg.tolerance,
                                   notes=f"error: {exc}") for s in names),
                      key=lambda r: r.check_id)
    for s in names:
        t0 = time.perf_counter()
        try:
            got = RUNNERS[s](ctx)
        except Exception as exc:
            got = [make_report(f"{s}.error", float("nan"), cfg.tolerance, params=ctx.params,
                               notes=f"error: {type(exc).__name__}: {exc}")]
        if cfg.timings:
            per = 1000 * (time.perf_counter() - t0) / max(1, len(got))
            got = [with_timing(r, per) for r in got]
        reports += got
    return sorted(_dedupe(reports), key=lambda r: r.check_id)


def spectrum_rows(cfg: RunConfig) -> List[tuple]:
    """Rows ``(label, index, re, im, multiplicity)`` for the Hamiltonian spectrum."""
    ctx = _build_context(cfg)
    ev = transfer.spectrum(ctx.dr.hamiltonian())
    groups = transfer.multiplicities(ev)
    label = f"{cfg.model}-{cfg.boundary}-N{cfg.N}"
    return [(label, k, z.real, z.imag, m) for k, (z, m) in enumerate(groups)]


def _load_config(path: str) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc.strerror}") from None
    return parse_config(text, seed_override=os.environ.get("BLOB_SEED"))


def _write(data: bytes, out: Optional[str]):
    if out:
        with open(out, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="twinblob",
                                 description="Numerical checks for blob-algebra spin chains.")
    sub = ap.add_subparsers(dest="command", required=True)
    c = sub.add_parser("check", help="run check suites and emit a report")
    c.add_argument("--config", required=True)
    c.add_argument("--suite", action="append", choices=SUITES,
                   help="restrict to this suite (repeatable)")
    c.add_argument("--format", default="json-lines", choices=("json-lines", "summary-text"))
    c.add_argument("--out")
    c.add_argument("--timings", action="store_true",
                   help="record wall-clock time per report (breaks byte-identical output)")
    s = sub.add_parser("spectrum", help="write the Hamiltonian spectrum as CSV")
    s.add_argument("--config", required=True)
    s.add_argument("--out", required=True)
    sub.add_parser("list-checks", help="list suites and what they cover")
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = _parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    if args.command == "list-checks":
        for s in SUITES:
            tag = "" if s in DEFAULT_SUITES else "  (not run by default)"
            print(f"{s:<11} {SUITE_NOTES[s]}{tag}")
        return 0
    try:
        cfg = _load_config(args.config)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    if args.command == "spectrum":
        rows = spectrum_rows(cfg)
        _write(emit_report([], "csv", spectrum_rows=rows), args.out)
        return 0
    cfg = replace(cfg, timings=args.timings)
    reports = run_suite(cfg, args.suite)
    _write(emit_report(reports, args.format), args.out)
    return 0 if all_ok(reports) else 1


if __name__ == "__main__":
    sys.exit(main())
