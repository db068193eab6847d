"""Randomized exploration of ``P-perp - U P-perp U* = T`` over random unitaries.

``P-perp`` is fixed to the coordinate projection onto the first ``r``
coordinates, where ``r = l1 + sum(k)`` is the rank forced by the positive
part of ``T``; ``U`` is drawn from the Haar measure. The best sampled
candidates are then polished by a local least-squares solve over
``U = U0 expm(iH)``, since pure sampling almost never lands within ``1e-8``
of a solution. Because ``P-perp`` is a coordinate projection and ``T`` is
diagonal, exact solutions exist only when ``P-perp - T`` is itself a
projection, i.e. for spectra without interior eigenvalues. When
``l1 != l1p`` no solution exists at all: the trace of the left side is 0
while ``tr T = l1 - l1p``, so the max-norm residual of any candidate
is at least ``|l1 - l1p| / dim``.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import numpy as np
import scipy.linalg
import scipy.optimize

from .matcore import adjoint
from .spectrum import DefectSpectrum, canonical_matrix
from .verify import commutant_dim


def default_spectrum(dim: int, l1: int, l1p: int) -> DefectSpectrum:
    """Spectrum with the given ``+-1`` multiplicities filled up with simple interior eigenvalues.

    The ``m = (dim - l1 - l1p) / 2`` interior eigenvalues are ``1 - j / (m + 1)``.
    """
    rest = dim - l1 - l1p
    if rest < 0 or rest % 2:
        raise ValueError(f"dim - l1 - l1p must be even and non-negative, got {rest}")
    m = rest // 2
    return DefectSpectrum(l1, l1p, tuple((1.0 - j / (m + 1), 1) for j in range(1, m + 1)))


def trial_rng(seed: int, i: int) -> np.random.Generator:
    """Independent stream for trial ``i``, identical however trials are batched."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(i,)))


def sample_unitaries(n: int, seed: int, start: int, stop: int) -> np.ndarray:
    """Haar unitaries for trials ``start..stop-1`` as a stacked array."""
    Z = np.empty((stop - start, n, n), dtype=np.complex128)
    for j, i in enumerate(range(start, stop)):
        g = trial_rng(seed, i).standard_normal((2, n, n))
        Z[j] = (g[0] + 1j * g[1]) / np.sqrt(2.0)
    Q, R = np.linalg.qr(Z)
    d = np.diagonal(R, axis1=1, axis2=2)
    return Q * (d / np.abs(d))[:, None, :]


def batch_residuals(Us: np.ndarray, Pp: np.ndarray, T: np.ndarray) -> np.ndarray:
    """Max-norm residual of ``Pp - U Pp U* - T`` for each stacked ``U``."""
    D = Pp - Us @ Pp @ np.conj(np.swapaxes(Us, 1, 2)) - T
    return np.abs(D).reshape(len(Us), -1).max(axis=1)


def _hermitian(x: np.ndarray, n: int) -> np.ndarray:
    """Hermitian matrix from ``n^2`` real parameters."""
    H = np.zeros((n, n), dtype=np.complex128)
    iu = np.triu_indices(n, 1)
    m = len(iu[0])
    H[np.diag_indices(n)] = x[:n]
    H[iu] = x[n:n + m] + 1j * x[n + m:]
    return H + np.triu(H, 1).conj().T


def refine(U0: np.ndarray, Pp: np.ndarray, T: np.ndarray, max_nfev: int = 400) -> np.ndarray:
    """Locally minimise ``||Pp - U Pp U* - T||_F`` over ``U = U0 expm(iH)``."""
    n = U0.shape[0]

    def unitary(x):
        return U0 @ scipy.linalg.expm(1j * _hermitian(x, n))

    def resid(x):
        U = unitary(x)
        D = Pp - U @ Pp @ adjoint(U) - T
        return np.concatenate([D.real.ravel(), D.imag.ravel()])

    sol = scipy.optimize.least_squares(resid, np.zeros(n * n), method="lm", max_nfev=max_nfev * n * n,
                                       xtol=1e-15, ftol=1e-15, gtol=1e-15)
    return unitary(sol.x)


@dataclass
class SearchReport:
    dim: int
    l1: int
    l1p: int
    interior: list
    trials: int
    seed: int
    best_trial: int
    best_sampled_residual: float
    refined_residual: float
    best_residual: float
    commutant_dim: int
    trace_bound: float
    counterexample: bool
    refined_from: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "l1": self.l1,
            "l1p": self.l1p,
            "interior": [{"lambda": lam, "k": k} for lam, k in self.interior],
            "trials": self.trials,
            "seed": self.seed,
            "best_trial": self.best_trial,
            "best_sampled_residual": self.best_sampled_residual,
            "refined_from": self.refined_from,
            "refined_residual": self.refined_residual,
            "best_residual": self.best_residual,
            "commutant_dim": self.commutant_dim,
            "trace_bound": self.trace_bound,
            "counterexample": self.counterexample,
        }


def run_search(
    s: DefectSpectrum,
    trials: int,
    seed: int = 0,
    refine_top: int = 3,
    batch: int = 2048,
    workers: int = 1,
    threshold: float = 1e-6,
) -> SearchReport:
    """Sample ``trials`` Haar unitaries, refine the best few, and report.

    ``counterexample`` is set when a finite spectrum with ``l1 != l1p`` gets a
    (refined) residual at most ``threshold``; it should never happen.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    n = s.dim
    T = canonical_matrix(s)
    r = s.l1 + sum(k for _, k in s.interior)
    Pp = np.diag(np.r_[np.ones(r), np.zeros(n - r)]).astype(np.complex128)

    chunks = [(a, min(a + batch, trials)) for a in range(0, trials, batch)]

    def run_chunk(bounds):
        a, b = bounds
        return batch_residuals(sample_unitaries(n, seed, a, b), Pp, T)

    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            parts = list(ex.map(run_chunk, chunks))
    else:
        parts = [run_chunk(c) for c in chunks]
    res = np.concatenate(parts)

    order = np.argsort(res, kind="stable")
    best = int(order[0])
    picks = [int(i) for i in order[:max(1, refine_top)]]
    refined_best, refined_U = np.inf, None
    for i in picks:
        U0 = sample_unitaries(n, seed, i, i + 1)[0]
        U = refine(U0, Pp, T)
        val = float(batch_residuals(U[None], Pp, T)[0])
        if val < refined_best:
            refined_best, refined_U = val, U
    rep = commutant_dim(refined_U, np.eye(n) - Pp)
    bound = abs(s.l1 - s.l1p) / n
    return SearchReport(
        dim=n, l1=s.l1, l1p=s.l1p, interior=list(s.interior), trials=trials, seed=seed,
        best_trial=best, best_sampled_residual=float(res[best]), refined_residual=refined_best,
        best_residual=min(refined_best, float(res[best])), commutant_dim=rep.dim, trace_bound=bound,
        counterexample=bool(s.l1 != s.l1p and min(refined_best, res[best]) <= threshold),
        refined_from=picks,
    )
