"""Compare the compiled kernels against the numpy fallback on real workloads.

Run: python benchmarks/bench_kernels.py
"""

from __future__ import annotations

import time

import numpy as np

from picardmod.covering import ExactHull, read_certificate, verify_certificate
from picardmod.engine import build_witness_set, enumerate_relations, exponent_bounds
from picardmod.hermitian import read_matrix_file
from picardmod.kernels import _core_available, set_backend  # type: ignore[attr-defined]
from picardmod.points import enumerate_points


def timed(fn, *args, repeat=3, **kw):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args, **kw)
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_sweep(backend):
    set_backend(backend)
    from picardmod import kernels

    rng = np.random.default_rng(0)
    ga = rng.integers(-40, 40, (4914, 3))
    gb = rng.integers(-40, 40, (4914, 3))
    pa = rng.integers(-9, 9, (3, 46))
    pb = rng.integers(-9, 9, (3, 46))
    t, _ = timed(lambda: kernels.sweep_norms(ga, gb, pa, pb, 2, -1), repeat=5)
    return t


def bench_audit(backend):
    set_backend(backend)
    from importlib import resources

    cert = read_certificate(
        str(resources.files("picardmod") / "fixtures" / "certificate_d2.txt")
    )
    t, rep = timed(verify_certificate, cert, 64, repeat=3)
    assert rep.passed
    return t


def bench_relations(backend):
    set_backend(backend)
    from importlib import resources

    table = enumerate_points(2, 16)
    mats = read_matrix_file(
        str(resources.files("picardmod") / "fixtures" / "witnesses_d2.txt")
    )
    ws = build_witness_set(table, mats)
    bounds = exponent_bounds(2, 16, table=table, witnesses=ws)
    t, run = timed(enumerate_relations, 2, table, ws, bounds, repeat=1)
    return t, run.raw_count


def main():
    if not _core_available():
        print("compiled kernels not built; run pip install -e . first")
        return
    rows = []
    for name, fn in (("sweep_norms (4914x3 . 3x46)", bench_sweep),
                     ("covering audit N=64", bench_audit)):
        tf = fn("fallback")
        tc = fn("compiled")
        rows.append((name, tf, tc))
    tfr, nrel = bench_relations("fallback")
    tcr, nrel2 = bench_relations("compiled")
    assert nrel == nrel2
    rows.append((f"full d=2 relation run ({nrel} relations)", tfr, tcr))
    set_backend(None)
    print(f"{'workload':44s} {'fallback':>10s} {'compiled':>10s} {'speedup':>8s}")
    for name, tf, tc in rows:
        print(f"{name:44s} {tf:9.3f}s {tc:9.3f}s {tf / tc:7.1f}x")


if __name__ == "__main__":
    main()
