"""Seeded instance generators shared by the unit and acceptance tests."""

import functools

import numpy as np

from bcltriples.bclbuild import BCLTriple, ImpossibilityWitness, construct, random_block_unitaries
from bcltriples.spectrum import DefectSpectrum


def random_lambdas(rng, count):
    while True:
        lams = np.sort(rng.uniform(0.02, 0.98, size=count))[::-1]
        if count < 2 or np.min(-np.diff(lams)) > 1e-3:
            return [float(x) for x in lams]


def random_finite_spectra(seed=20240611, count=50, max_dim=24):
    """``(spectrum, mode, alpha)`` cycling through part (i), part (ii) with alpha -1 and i, part (iii)."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        kind = i % 4
        if kind == 0:
            while True:
                l1 = int(rng.integers(0, 4))
                groups = int(rng.integers(1 if l1 else 2, 5))
                ks = [int(k) for k in rng.integers(1, 4, size=groups)]
                s = DefectSpectrum(l1, l1, tuple(zip(random_lambdas(rng, groups), ks)))
                if s.dim <= max_dim:
                    break
            out.append((s, "part-i", -1.0))
        elif kind in (1, 2):
            k = int(rng.integers(1, max_dim // 2 + 1))
            s = DefectSpectrum(0, 0, ((random_lambdas(rng, 1)[0], k),))
            out.append((s, "part-ii", -1.0 if kind == 1 else 1j))
        else:
            out.append((DefectSpectrum(1, 1), "part-iii", -1.0))
    return out


@functools.lru_cache(maxsize=None)
def constructed_triples(seed=20240611, count=50):
    """Triples for :func:`random_finite_spectra`, half of them with random block unitaries."""
    rng = np.random.default_rng(seed + 1)
    out = []
    for j, (s, mode, alpha) in enumerate(random_finite_spectra(seed, count)):
        blocks = random_block_unitaries(s, rng) if j % 2 else None
        t = construct(s, mode=mode, alpha=alpha, block_unitaries=blocks)
        out.append((s, mode, alpha, t))
    return out


def reducible_witnesses():
    return [construct(DefectSpectrum(l, l)) for l in (2, 3)]


@functools.lru_cache(maxsize=None)
def small_pairs(seed=7):
    """``(U, P)`` pairs of dimension at most 4: constructed, random and deliberately reducible."""
    from bcltriples.matcore import random_unitary

    rng = np.random.default_rng(seed)
    pairs = []
    for s, _, _, t in constructed_triples():
        if isinstance(t, BCLTriple) and t.dim <= 4:
            pairs.append((t.U, t.P))
    for s in (DefectSpectrum(1, 1, ((0.5, 1),)), DefectSpectrum(0, 0, ((0.7, 1), (0.2, 1))),
              DefectSpectrum(0, 0, ((0.4, 2),)), DefectSpectrum(1, 1)):
        t = construct(s)
        pairs.append((t.U, t.P))
    w = construct(DefectSpectrum(2, 2))
    assert isinstance(w, ImpossibilityWitness)
    pairs.append((w.triple.U, w.triple.P))
    for n in (1, 2, 3, 4):
        for r in range(n + 1):
            P = np.diag([1.0] * r + [0.0] * (n - r)).astype(complex)
            pairs.append((random_unitary(n, rng), P))
            pairs.append((np.eye(n, dtype=complex), P))
            W = random_unitary(n, rng)
            D = np.diag(np.exp(1j * rng.uniform(0, 2 * np.pi, n)))
            pairs.append((W @ D @ W.conj().T, P))
    # block-diagonal direct sums of two irreducible 2x2 pairs
    a, b = construct(DefectSpectrum(1, 1)), construct(DefectSpectrum(0, 0, ((0.3, 1),)))
    from bcltriples.matcore import direct_sum

    pairs.append((direct_sum(a.U, b.U), direct_sum(a.P, b.P)))
    pairs.append((direct_sum(a.U, a.U), direct_sum(a.P, a.P)))
    return pairs
