"""Acceptance suite: one check per criterion, each printing a PASS/FAIL line.

Run under pytest, or directly with ``python tests/test_acceptance.py``.
Tolerances and runtime bounds are fixed per criterion below.
"""
import json
import os
import subprocess
import sys
import tempfile
import time

import numpy as np
import pytest

from twinblob.algebra import (check_blob, make_params, perturbed_rep, qgroup_rep, tower,
                              twin_rep, xxz_rep)
from twinblob.baxter import (LaxFactory, check_braid, check_re, check_rr2,
                             check_unitarity_crossing, check_ybe, sample_lambdas, sample_pairs)
from twinblob.tensor import comm_residual
from twinblob.transfer import (DoubleRow, check_duality, check_exchange_relations,
                               check_reflection_intertwiner, check_symmetry_suite)

MUS = (0.7, 1.1, np.pi / 3)
QS = (2.0, 1.3 * np.exp(0.4j))
TWIN_B = ("i", "ii", "plus", "iii")
ALL_PAIRS = [("xxz", "trivial"), ("xxz", "xxz-m")] + [("twin", b) for b in ("trivial",) + TWIN_B]


def _lax(model, boundary, N=2, mu=0.7, Q=2.0, zeta=0.3):
    p = make_params(mu, Q, zeta, model=model, boundary=boundary)
    rep = (xxz_rep if model == "xxz" else twin_rep)(p, N, boundary)
    return LaxFactory(rep)


def _worst(reports):
    gated = [r for r in reports if not r.is_negative and not r.notes]
    return max((r.residual for r in gated), default=0.0)


def criterion_1():
    """Blob relations: XXZ N=4 and twin i/ii/+/iii N=3 over the (mu, Q) grid."""
    reports = []
    for mu in MUS:
        for Q in QS:
            reports += check_blob(xxz_rep(make_params(mu, Q), 4), tol=1e-10)
            for b in TWIN_B:
                p = make_params(mu, Q, model="twin", boundary=b)
                reports += check_blob(twin_rep(p, 3, b), tol=1e-10)
    w = _worst(reports)
    return w < 1e-10, f"{len(reports)} relations, worst residual {w:.2e}", 5.0


def criterion_2():
    """Yang-Baxter for both R matrices, plus the perturbed-entry control."""
    reports = []
    for model in ("xxz", "twin"):
        lax = _lax(model, "trivial")
        reports += check_ybe(lax, sample_pairs(42, 10, lax.mu), tol=1e-10)
    rep = _lax("twin", "i").rep
    neg = check_ybe(LaxFactory(perturbed_rep(rep, 1e-2)), sample_pairs(42, 10, 0.7), negative=True)
    w, n = _worst(reports), min(r.residual for r in neg)
    ok = w < 1e-10 and n > 1e-4
    return ok, f"worst residual {w:.2e}, perturbed control min {n:.2e}", 2.0


def criterion_3():
    """Reflection equation for all five K matrices, two zeta values."""
    reports = []
    for model, b in [("xxz", "xxz-m")] + [("twin", b) for b in TWIN_B]:
        for zeta in (0.3, -0.45 + 0.2j):
            lax = _lax(model, b, zeta=zeta)
            reports += check_re(lax, sample_pairs(42, 10, lax.mu), tol=1e-10)
    w = _worst(reports)
    return w < 1e-10, f"{len(reports)} evaluations, worst residual {w:.2e}", 3.0


def criterion_4():
    """Unitarity, crossing, twist, constant reflection relation and braid limits."""
    reports = []
    for model, b in ALL_PAIRS:
        lax = _lax(model, b)
        reports += check_unitarity_crossing(lax, sample_lambdas(43, 5, lax.mu), tol=1e-10)
        reports += check_rr2(lax, tol=1e-10) + check_braid(lax, tol=1e-10)
    w = _worst(reports)
    return w < 1e-10, f"{len(reports)} checks, worst residual {w:.2e}", 2.0


def criterion_5():
    """[t(l1), t(l2)] = 0 for every (model, boundary); twin N=2,3, XXZ N=2,3,4."""
    worst, count = 0.0, 0
    for model, b in ALL_PAIRS:
        for N in ((2, 3, 4) if model == "xxz" else (2, 3)):
            dr = DoubleRow(_lax(model, b, N))
            for l1, l2 in sample_pairs(42, 10, 0.7):
                worst = max(worst, comm_residual(dr.transfer_t(l1), dr.transfer_t(l2)))
                count += 1
    return worst < 1e-9, f"{count} pairs, worst residual {worst:.2e}", 15.0


def criterion_6():
    """Trivial boundary: all twin tower generators and the XXZ rho tower commute with t."""
    worst, count = 0.0, 0
    lams = sample_lambdas(44, 3, 0.7)
    for model, names, Ns in (("twin", ("sigma1", "sigma2", "rho1", "rho2"), (2, 3)),
                             ("xxz", ("rho",), (2, 3, 4))):
        for N in Ns:
            dr = DoubleRow(_lax(model, "trivial", N))
            ts = [dr.transfer_t(l) for l in lams]
            for name in names:
                for X in tower(qgroup_rep(name, dr.rep.params), N).generators().values():
                    worst = max(worst, max(comm_residual(X, t) for t in ts))
                    count += 1
    return worst < 1e-9, f"{count} generators, worst residual {worst:.2e}", 10.0


def criterion_7():
    """Boundary symmetry table: preserved set passes, a broken generator fails."""
    lines, ok = [], True
    lams = sample_lambdas(45, 3, 0.7)
    for model, b in [("xxz", "xxz-m")] + [("twin", b) for b in TWIN_B]:
        for N in (2, 3):
            reps = check_symmetry_suite(DoubleRow(_lax(model, b, N)), lams)
            kept = [r for r in reps if not r.is_negative]
            broken = [r for r in reps if r.check_id.startswith("symmetry.broken.")]
            w = max(r.residual for r in kept)
            lo = max(r.residual for r in broken)
            ok &= w < 1e-9 and lo > 1e-3
            if N == 3:
                lines.append(f"{b}: kept {w:.1e} broken max {lo:.1e}")
    return ok, "; ".join(lines), 10.0


def criterion_8():
    """Asymptotic charges commute with U_l, e and t(l)."""
    reports = []
    lams = sample_lambdas(46, 3, 0.7)
    for model, b, N in (("twin", "trivial", 2), ("twin", "i", 2),
                        ("xxz", "trivial", 3), ("xxz", "xxz-m", 3)):
        reports += check_duality(DoubleRow(_lax(model, b, N)), lams)
    w = _worst(reports)
    negs_ok = all(r.passed for r in reports if r.is_negative)
    return w < 1e-9 and negs_ok, f"{len(reports)} checks, worst residual {w:.2e}", 10.0


def criterion_9():
    """Exchange relations between transfer blocks and tower generators, N=2."""
    reports = []
    for model, b in (("xxz", "trivial"), ("twin", "trivial"), ("twin", "i"), ("twin", "ii"),
                     ("twin", "iii")):
        reports += check_exchange_relations(DoubleRow(_lax(model, b, 2)), 0.4,
                                            include_printed=False)
    w = _worst(reports)
    n = len([r for r in reports if not r.is_negative])
    return w < 1e-9, f"{n} relations, worst residual {w:.2e}", 10.0


def criterion_10():
    """Reflection-algebra intertwiner for XXZ with L = R."""
    lax = _lax("xxz", "xxz-m")
    reps = check_reflection_intertwiner(lax, sample_pairs(47, 5, lax.mu), tol=1e-10)
    w = _worst(reps)
    return w < 1e-10, f"5 pairs, worst residual {w:.2e}", 2.0


def _cli(*args, env=None):
    return subprocess.run([sys.executable, "-m", "twinblob", *args], capture_output=True,
                          env=env)


def criterion_11():
    """Two identical CLI runs are byte-identical; one default pass over all chains < 60 s."""
    env = {k: v for k, v in os.environ.items() if k != "BLOB_SEED"}
    with tempfile.TemporaryDirectory() as tmp:
        paths = []
        for model, b in ALL_PAIRS:
            N = 4 if model == "xxz" else 3
            path = os.path.join(tmp, f"{model}-{b}.json")
            with open(path, "w") as fh:
                json.dump({"model": model, "boundary": b, "N": N, "mu": 0.7, "Q": "2,0"}, fh)
            paths.append(path)
        t0 = time.perf_counter()
        first = [_cli("check", "--config", p, env=env) for p in paths]
        elapsed = time.perf_counter() - t0
        second = [_cli("check", "--config", p, env=env) for p in paths]
    same = all(a.stdout == b.stdout and a.stdout for a, b in zip(first, second))
    codes = [a.returncode for a in first]
    n = sum(a.stdout.count(b"\n") for a in first)
    ok = same and elapsed < 60 and codes == [0] * len(codes)
    return ok, f"{n} reports, identical={same}, exit codes {set(codes)}, pass {elapsed:.1f} s", None


def criterion_12():
    """Spectrum CSV for the twin Hamiltonian, N=2,3 (diagnostic, recorded only)."""
    notes, ok = [], True
    with tempfile.TemporaryDirectory() as tmp:
        for b in ("trivial", "i"):
            for N in (2, 3):
                cfg = os.path.join(tmp, "c.json")
                out = os.path.join(tmp, "s.csv")
                with open(cfg, "w") as fh:
                    json.dump({"model": "twin", "boundary": b, "N": N, "mu": 0.7, "Q": "2,0"}, fh)
                proc = _cli("spectrum", "--config", cfg, "--out", out)
                if proc.returncode != 0:
                    ok = False
                    continue
                with open(out) as fh:
                    rows = fh.read().splitlines()[1:]
                mult = sorted((int(r.split(",")[-1]) for r in rows), reverse=True)
                notes.append(f"{b} N={N}: {len(rows)} levels, top multiplicities {mult[:4]}")
    return ok, "; ".join(notes), None


CRITERIA = {k: globals()[f"criterion_{k}"] for k in range(1, 13)}
TITLES = {
    1: "algebra relations", 2: "Yang-Baxter", 3: "reflection equation", 4: "conditions",
    5: "transfer commutativity", 6: "trivial-boundary symmetry", 7: "boundary symmetry table",
    8: "duality / centralizer", 9: "exchange relations", 10: "reflection intertwiner",
    11: "pipeline determinism", 12: "spectrum (diagnostic)",
}


def evaluate(k):
    t0 = time.perf_counter()
    ok, detail, limit = CRITERIA[k]()
    elapsed = time.perf_counter() - t0
    if limit is not None and elapsed > limit:
        ok = False
        detail += f"; runtime {elapsed:.2f} s exceeds {limit:.0f} s"
    line = f"criterion {k:>2} {'PASS' if ok else 'FAIL'}  {TITLES[k]}: {detail} ({elapsed:.2f} s)"
    return ok, line


@pytest.mark.parametrize("k", sorted(CRITERIA))
def test_criterion(k, capsys):
    ok, line = evaluate(k)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    results = [evaluate(k) for k in sorted(CRITERIA)]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
