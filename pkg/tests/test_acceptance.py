"""Acceptance suite: one test per criterion, each printing a single PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` or directly with
``python3 tests/test_acceptance.py``.
"""

import os
import sys
import time

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

import corpus  # noqa: E402
from bcltriples.bclbuild import BCLTriple, construct  # noqa: E402
from bcltriples.bclinf import enumerate_basis, make_diff1, make_inf, orbit_reach, windowed_defect_check  # noqa: E402
from bcltriples.hardy import defect_block, isometry_check, product_check, realize  # noqa: E402
from bcltriples.matcore import max_norm, random_unitary, validate_structure  # noqa: E402
from bcltriples.search import default_spectrum, run_search  # noqa: E402
from bcltriples.spectrum import DefectSpectrum, SpectrumRule, Verdict, canonical_matrix, classify, feasibility  # noqa: E402
from bcltriples.twoproj import CanonicalContraction, build_pq, halmos_blocks  # noqa: E402
from bcltriples.verify import commutant_dim, commutant_dim_oracle, shift_cyclicity  # noqa: E402


def _line(n, ok, detail):
    return f"criterion {n} [{'PASS' if ok else 'FAIL'}] {detail}"


def criterion_1():
    t0 = time.perf_counter()
    items = corpus.random_finite_spectra()
    worst, kinds = 0.0, set()
    rng = np.random.default_rng(1)
    from bcltriples.bclbuild import random_block_unitaries

    for j, (s, mode, alpha) in enumerate(items):
        blocks = random_block_unitaries(s, rng) if j % 2 else None
        t = construct(s, mode=mode, alpha=alpha, block_unitaries=blocks)
        assert s.l1 == s.l1p and s.dim <= 24
        worst = max(worst, max_norm(t.P_perp - t.U @ t.P_perp @ t.U.conj().T - canonical_matrix(s)))
        kinds.add((mode, complex(alpha)) if mode == "part-ii" else (mode, s.l1))
    elapsed = time.perf_counter() - t0
    covered = {("part-ii", -1 + 0j), ("part-ii", 1j), ("part-iii", 1)} <= kinds and any(
        k[0] == "part-i" for k in kinds)
    ok = worst <= 1e-10 and covered and len(items) == 50 and elapsed < 5.0
    return ok, f"50 spectra, max defect residual {worst:.2e} (<= 1e-10), {elapsed:.2f}s (< 5s)"


def criterion_2():
    dims = []
    for s, mode, alpha, t in corpus.constructed_triples():
        dims.append(commutant_dim(t.U, t.P).dim)
    irreducible = all(d == 1 for d in dims)
    witness_ok, wdims = True, []
    for w in corpus.reducible_witnesses():
        rep = commutant_dim(w.triple.U, w.triple.P)
        wdims.append(rep.dim)
        for Q in (w.projector(), rep.witness.projector()):
            rank = np.linalg.matrix_rank(Q, tol=1e-8)
            witness_ok &= 0 < rank < w.triple.dim
            witness_ok &= max_norm(Q @ w.triple.U - w.triple.U @ Q) <= 1e-12
            witness_ok &= max_norm(Q @ w.triple.P - w.triple.P @ Q) <= 1e-12
        witness_ok &= rep.dim >= 2
    ok = irreducible and witness_ok
    return ok, f"{len(dims)} triples with commutant dim 1: {irreducible}; l1=2,3 commutant dims {wdims}, witnesses commute: {witness_ok}"


def criterion_3():
    t0 = time.perf_counter()
    infeasible_ok = True
    for l1 in range(5):
        for l1p in range(5):
            if l1 == l1p:
                continue
            for interior in ((), ((0.5, 1),), ((0.7, 2), (0.2, 1))):
                s = DefectSpectrum(l1, l1p, interior)
                infeasible_ok &= feasibility(s).kind is Verdict.INFEASIBLE
                infeasible_ok &= feasibility(classify(canonical_matrix(s))).kind is Verdict.INFEASIBLE
    configs = [(d, a, b) for d in range(1, 7) for a in range(d + 1) for b in range(d + 1 - a)
               if a != b and (d - a - b) % 2 == 0]
    best = np.inf
    for d, a, b in configs:
        rep = run_search(default_spectrum(d, a, b), 10_000, seed=2024, refine_top=1)
        best = min(best, rep.best_residual)
    elapsed = time.perf_counter() - t0
    ok = infeasible_ok and best > 1e-6 and elapsed < 30.0
    return ok, (f"Infeasible verdicts: {infeasible_ok}; {len(configs)} configs x 10^4 trials, "
                f"min residual {best:.3f} (> 1e-6), {elapsed:.1f}s (< 30s)")


def criterion_4():
    rng = np.random.default_rng(4)
    ok = True
    worst = 0.0
    for _ in range(100):
        k = int(rng.integers(1, 17))
        kern, plus, minus = (int(x) for x in rng.integers(0, 4, size=3))
        W = random_unitary(k, rng)
        mu = rng.choice(rng.uniform(0.02, 0.98, 4), size=k)  # repeated eigenvalues on purpose
        D = W @ np.diag(mu) @ W.conj().T
        D = 0.5 * (D + D.conj().T)
        # unitaries commuting with D: arbitrary unitaries on each eigenspace
        Uc = np.zeros((k, k), dtype=complex)
        for m in np.unique(mu):
            cols = W[:, mu == m]
            V = random_unitary(cols.shape[1], rng)
            Uc += cols @ V @ cols.conj().T
        if kern:
            Vk = random_unitary(kern, rng)
            E = Vk @ np.diag((rng.uniform(size=kern) > 0.5).astype(float)) @ Vk.conj().T
        else:
            E = np.zeros((0, 0))
        a = CanonicalContraction(kern, plus, minus, D)
        pq = build_pq(a, E, Uc)
        ok &= bool(validate_structure(pq.P, "Projection")) and bool(validate_structure(pq.Q, "Projection"))
        err = max_norm(pq.P - pq.Q - a.matrix())
        worst = max(worst, err)
        ok &= err <= 1e-12
        ok &= np.linalg.matrix_rank(pq.P_U, tol=1e-8) == k and np.linalg.matrix_rank(pq.Q_U, tol=1e-8) == k
    P_U, _ = halmos_blocks(np.array([[0.6]]), np.array([[1.0]]))
    scalar = max_norm(P_U - np.array([[0.8, 0.4], [0.4, 0.2]]))
    ok &= scalar <= 1e-15
    return ok, f"100 instances, max |P - Q - A| {worst:.2e} (<= 1e-12), scalar case error {scalar:.1e} (<= 1e-15)"


def criterion_5():
    triples = [t for _, _, _, t in corpus.constructed_triples()]
    triples += [w.triple for w in corpus.reducible_witnesses()]
    comm = iso = off = blk = 0.0
    for t in triples:
        h = realize(t, 8)
        c, _, _ = product_check(h)
        r = isometry_check(h)
        d = defect_block(h)
        comm = max(comm, c)
        iso = max(iso, r.v1_defect, r.v2_defect)
        off = max(off, d.offblock_max)
        blk = max(blk, max_norm(d.degree0_block - t.defect()))
    ok = comm <= 1e-14 and iso <= 1e-13 and off <= 1e-12 and blk <= 1e-12
    return ok, (f"{len(triples)} triples, N=8: |V1V2-V2V1| {comm:.1e} (<= 1e-14), isometry {iso:.1e} (<= 1e-13), "
                f"C off degree 0 {off:.1e} (<= 1e-12), degree-0 block {blk:.1e} (<= 1e-12)")


def criterion_6():
    t0 = time.perf_counter()
    h = SpectrumRule("harmonic", {"k": 1})
    worst, coverage = 0.0, True
    for U, P in (make_inf(h), make_diff1(h, 1)):
        worst = max(worst, windowed_defect_check(U, P, window=100))
        basis = enumerate_basis(U, 20)
        for start in basis[:10]:
            coverage &= set(basis) <= orbit_reach(U, P, start, 200)
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-12 and coverage and elapsed < 2.0
    return ok, f"windowed residual {worst:.1e} (<= 1e-12), orbit coverage {coverage}, {elapsed:.2f}s (< 2s)"


def criterion_7():
    rng = np.random.default_rng(7)
    worst, cyclic = 0.0, True
    for _ in range(60):
        n = int(rng.integers(1, 13))
        w = rng.uniform(0.05, 1.0, n) * np.exp(1j * rng.uniform(0, 2 * np.pi, n))
        S = np.zeros((n, n), dtype=complex)
        S[(np.arange(n) + 1) % n, np.arange(n)] = w
        rep = shift_cyclicity(S)
        worst = max(worst, rep.product_check)
        cyclic &= rep.cyclic
    return worst <= 1e-12 and cyclic, f"60 shifts, |S^n - prod(w) I| {worst:.1e} (<= 1e-12), all basis vectors cyclic: {cyclic}"


def criterion_8():
    pairs = corpus.small_pairs()
    mismatches = [(commutant_dim(U, P).dim, commutant_dim_oracle(U, P)) for U, P in pairs]
    bad = [m for m in mismatches if m[0] != m[1]]
    return not bad, f"{len(pairs)} instances of dim <= 4, mismatches {len(bad)}"


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7, criterion_8]


@pytest.mark.parametrize("n", range(1, 9))
def test_criterion(n, capsys):
    ok, detail = CRITERIA[n - 1]()
    with capsys.disabled():
        print("\n" + _line(n, ok, detail))
    assert ok, detail


if __name__ == "__main__":
    results = [fn() for fn in CRITERIA]
    for n, (ok, detail) in enumerate(results, 1):
        print(_line(n, ok, detail))
    sys.exit(0 if all(ok for ok, _ in results) else 1)
