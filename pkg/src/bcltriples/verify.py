"""Verification of triples: defect residuals, irreducibility, reducing subspaces, shift cyclicity.

Irreducibility is decided through the commutant: a subspace reduces both
``U`` and ``P`` exactly when its orthogonal projection commutes with them,
so the pair is irreducible iff ``{X : XU = UX, XP = PX}`` is one-dimensional.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch, IterationLimit, NotProjection, NotShiftType, NotUnitary
from .jsonio import matrix_to_json
from .matcore import (
    DEFAULT_TOL,
    Tolerances,
    adjoint,
    max_norm,
    null_space,
    nullspace_dim,
    validate_structure,
)


def defect_residual(t, T) -> float:
    """``||(P-perp - U P-perp U*) - T||_max``."""
    T = np.asarray(T)
    if T.shape != (t.dim, t.dim):
        raise DimensionMismatch(f"triple has dim {t.dim}, target is {T.shape}")
    return max_norm(t.defect() - T)


@dataclass(frozen=True)
class ReducingSubspace:
    basis: np.ndarray

    @property
    def dim(self) -> int:
        return int(self.basis.shape[1])

    def projector(self) -> np.ndarray:
        return self.basis @ adjoint(self.basis)


@dataclass(frozen=True)
class CommutantReport:
    dim: int
    basis: list
    singular_gap: float
    witness: Optional[ReducingSubspace] = None

    @property
    def irreducible(self) -> bool:
        return self.dim == 1


def _check_pair(U, P, tol):
    U = np.asarray(U, dtype=np.complex128)
    P = np.asarray(P, dtype=np.complex128)
    if U.shape != P.shape:
        raise DimensionMismatch(f"U is {U.shape} but P is {P.shape}")
    chk = validate_structure(U, "Unitary", tol)
    if not chk:
        raise NotUnitary(f"U violates unitarity by {chk.violation:.3e}")
    chk = validate_structure(P, "Projection", tol)
    if not chk:
        raise NotProjection(f"P violates projection identities by {chk.violation:.3e}")
    return U, P


def commutator_system(U, P) -> np.ndarray:
    """Matrix of ``X -> (XU - UX, XP - PX)`` acting on row-major ``vec(X)``."""
    n = U.shape[0]
    I = np.eye(n)
    return np.vstack([np.kron(I, U.T) - np.kron(U, I), np.kron(I, P.T) - np.kron(P, I)])


def _split_hermitian(H: np.ndarray, tol: Tolerances) -> Optional[np.ndarray]:
    """Eigenvectors of ``H`` above its widest spectral gap (None if ``H`` is scalar)."""
    w, V = np.linalg.eigh(H)
    if w[-1] - w[0] <= tol.rank_gap * max(1.0, abs(w).max()):
        return None
    cut = int(np.argmax(np.diff(w))) + 1
    return V[:, cut:]


def reducing_from_commutant(basis: list, tol: Tolerances = DEFAULT_TOL) -> Optional[ReducingSubspace]:
    """A proper reducing subspace from a non-scalar commutant element.

    The element is symmetrised to ``X + X*`` or ``i(X - X*)``, whichever is
    non-scalar, and the spectral subspace above its largest eigenvalue gap
    is returned.
    """
    if not basis:
        return None
    n = basis[0].shape[0]
    best, best_norm = None, 0.0
    for X in basis:
        X0 = X - np.trace(X) / n * np.eye(n)
        nrm = np.linalg.norm(X0)
        if nrm > best_norm:
            best, best_norm = X0, nrm
    if best is None or best_norm <= tol.rank_gap:
        return None
    for H in (best + adjoint(best), 1j * (best - adjoint(best))):
        cols = _split_hermitian(H, tol)
        if cols is not None:
            return ReducingSubspace(cols)
    return None


def commutant_dim(U, P, tol: Tolerances = DEFAULT_TOL) -> CommutantReport:
    """Dimension (and a basis) of the commutant of ``{U, P}``.

    Solves the ``2n^2 x n^2`` commutator system by SVD. When the dimension
    exceeds 1 a proper joint reducing subspace is attached as ``witness``.
    """
    U, P = _check_pair(U, P, tol)
    n = U.shape[0]
    L = commutator_system(U, P)
    vecs, s, rank = null_space(L, tol)
    basis = [vecs[:, j].reshape(n, n) * np.sqrt(n) for j in range(vecs.shape[1])]
    smin_kept = s[rank - 1] if rank > 0 else 0.0
    smax_null = s[rank] if rank < s.size else 0.0
    gap = float(smin_kept / smax_null) if smax_null > 0 else float("inf")
    witness = reducing_from_commutant(basis, tol) if len(basis) > 1 else None
    return CommutantReport(len(basis), basis, gap, witness)


def commutant_dim_oracle(U, P, cluster: float = 1e-8) -> int:
    """Commutant dimension by intersecting the commutants of ``U`` and of ``P`` separately.

    The commutant of a normal operator is ``span{E_a X E_b : same eigenvalue}``
    for its spectral projections; an orthonormal basis of each is built from
    eigenvectors (complex Schur form for ``U``) and the dimension of the
    intersection is counted from principal angles. No commutator equations
    are formed.
    """
    U = np.asarray(U, dtype=np.complex128)
    P = np.asarray(P, dtype=np.complex128)
    n = U.shape[0]

    def spectral_blocks(eigvals, Z):
        blocks, used = [], np.zeros(len(eigvals), bool)
        for i in range(len(eigvals)):
            if used[i]:
                continue
            members = np.abs(eigvals - eigvals[i]) <= cluster
            members &= ~used
            used |= members
            blocks.append(Z[:, members])
        return blocks

    def commutant_basis(blocks):
        mats = []
        for Zb in blocks:
            for a in range(Zb.shape[1]):
                for b in range(Zb.shape[1]):
                    mats.append(np.outer(Zb[:, a], np.conj(Zb[:, b])).ravel())
        return np.array(mats).T  # n^2 x d, orthonormal columns

    T, Z = scipy.linalg.schur(U, output="complex")
    BU = commutant_basis(spectral_blocks(np.diag(T), Z))
    wp, Zp = np.linalg.eigh(0.5 * (P + adjoint(P)))
    BP = commutant_basis(spectral_blocks(np.round(wp), Zp))
    cosines = np.linalg.svd(adjoint(BU) @ BP, compute_uv=False)
    return int(np.sum(cosines >= 1.0 - 1e-8))


def _orthonormal_extend(Q: np.ndarray, cands: np.ndarray, drop: float) -> np.ndarray:
    """Modified Gram-Schmidt of ``cands`` against ``Q``; columns with small residual are dropped."""
    cols = [Q[:, j] for j in range(Q.shape[1])]
    for v in cands.T:
        w = v.copy()
        for _ in range(2):
            for q in cols:
                w = w - np.vdot(q, w) * q
        nrm = np.linalg.norm(w)
        if nrm > drop * max(1.0, np.linalg.norm(v)):
            cols.append(w / nrm)
    return np.column_stack(cols) if cols else Q


def minimal_reducing(U, P, v, tol: Tolerances = DEFAULT_TOL, max_iter: int = 1000) -> ReducingSubspace:
    """Smallest subspace containing ``v`` that reduces both ``U`` and ``P``.

    ``span{v}`` is repeatedly closed under ``U``, ``U*``, ``P`` and ``P-perp``
    with re-orthonormalisation until no new direction appears.
    """
    U = np.asarray(U, dtype=np.complex128)
    P = np.asarray(P, dtype=np.complex128)
    v = np.asarray(v, dtype=np.complex128).reshape(-1)
    nv = np.linalg.norm(v)
    if nv == 0:
        raise ValueError("starting vector must be non-zero")
    n = U.shape[0]
    Pp = np.eye(n) - P
    Q = (v / nv).reshape(-1, 1)
    frontier = Q
    for _ in range(max_iter):
        cands = np.hstack([U @ frontier, adjoint(U) @ frontier, P @ frontier, Pp @ frontier])
        grown = _orthonormal_extend(Q, cands, tol.rank_gap)
        if grown.shape[1] == Q.shape[1]:
            return ReducingSubspace(Q)
        frontier = grown[:, Q.shape[1]:]
        Q = grown
        if Q.shape[1] == n:
            return ReducingSubspace(Q)
    raise IterationLimit(f"orbit closure did not stabilise in {max_iter} steps", ReducingSubspace(Q))


@dataclass(frozen=True)
class CyclicityReport:
    cyclic: bool
    product_check: float
    weights: np.ndarray


def shift_weights(S, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Weights ``w_i`` of ``S e_i = w_i e_{i+1}`` (``S e_n = w_n e_1``), checking the sparsity pattern."""
    S = np.asarray(S, dtype=np.complex128)
    n = S.shape[0]
    if S.shape != (n, n):
        raise NotShiftType(f"expected a square matrix, got {S.shape}")
    rows = (np.arange(n) + 1) % n
    cols = np.arange(n)
    w = S[rows, cols]
    rest = S.copy()
    rest[rows, cols] = 0.0
    if max_norm(rest) > tol.structural or np.any(np.abs(w) <= tol.structural):
        raise NotShiftType("matrix is not of weighted shift type (subdiagonal plus corner)")
    return w


def shift_cyclicity(S, tol: Tolerances = DEFAULT_TOL) -> CyclicityReport:
    """Check ``S^n = (prod w) I`` and that every basis vector is cyclic for ``S``.

    Krylov columns ``S^k e_i`` are normalised before the rank test, so tiny
    weight products do not masquerade as rank loss.
    """
    w = shift_weights(S, tol)
    S = np.asarray(S, dtype=np.complex128)
    n = S.shape[0]
    Sn = np.linalg.matrix_power(S, n)
    product_check = max_norm(Sn - np.prod(w) * np.eye(n))
    cyclic = True
    for i in range(n):
        cols = []
        x = np.zeros(n, dtype=np.complex128)
        x[i] = 1.0
        for _ in range(n):
            cols.append(x / np.linalg.norm(x))
            x = S @ x
        if nullspace_dim(np.column_stack(cols), tol) != 0:
            cyclic = False
            break
    return CyclicityReport(cyclic, float(product_check), w)


def verification_report(t, T, tol: Tolerances = DEFAULT_TOL) -> dict:
    """The JSON verification report of a triple against a target defect ``T``."""
    report = commutant_dim(t.U, t.P, tol)
    return {
        "defect_residual": defect_residual(t, T),
        "commutant_dim": report.dim,
        "irreducible": report.irreducible,
        "witness": None if report.witness is None else matrix_to_json(report.witness.basis),
    }
