"""Pairs of orthogonal projections with a prescribed difference.

For a self-adjoint contraction written in block form::

    A = 0 (+) I (+) -I (+) D (+) -D     on  ker A (+) ker(A-I) (+) ker(A+I) (+) K (+) K

every pair of projections with ``P - Q = A`` is

    P = E (+) I (+) 0 (+) P_U,      Q = E (+) 0 (+) I (+) Q_U

with ``E`` a projection on ``ker A`` and ``U`` a unitary on ``K`` commuting
with ``D``; ``P_U`` and ``Q_U`` are the 2x2 block matrices built in
:func:`halmos_blocks`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (
    CommutationFailure,
    DimensionMismatch,
    LambdaOutOfRange,
    NotProjection,
    NotUnitary,
)
from .jsonio import matrix_from_json, matrix_to_json
from .matcore import (
    DEFAULT_TOL,
    Tolerances,
    adjoint,
    direct_sum,
    hermitian_eigen,
    max_norm,
    validate_structure,
)


@dataclass(frozen=True)
class CanonicalContraction:
    kernel_dim: int
    plus_dim: int
    minus_dim: int
    D: np.ndarray

    @property
    def k_dim(self) -> int:
        return 0 if self.D is None else int(np.shape(self.D)[0])

    @property
    def dim(self) -> int:
        return self.kernel_dim + self.plus_dim + self.minus_dim + 2 * self.k_dim

    def matrix(self) -> np.ndarray:
        """The block-diagonal operator ``A`` itself."""
        D = self._D()
        return direct_sum(
            np.zeros((self.kernel_dim, self.kernel_dim)),
            np.eye(self.plus_dim),
            -np.eye(self.minus_dim),
            D,
            -D,
        )

    def _D(self) -> np.ndarray:
        if self.k_dim == 0:
            return np.zeros((0, 0), dtype=np.complex128)
        return np.asarray(self.D, dtype=np.complex128)

    def validate(self, tol: Tolerances = DEFAULT_TOL) -> None:
        if min(self.kernel_dim, self.plus_dim, self.minus_dim) < 0:
            raise ValueError("block dimensions must be non-negative")
        if self.k_dim == 0:
            return
        D = self._D()
        if D.shape[0] != D.shape[1]:
            raise DimensionMismatch(f"D must be square, got {D.shape}")
        for g in hermitian_eigen(D, tol):
            if not (tol.structural < g.value < 1.0 - tol.structural):
                raise ValueError(f"D has eigenvalue {g.value!r} outside (0, 1)")

    def to_json(self) -> dict:
        return {
            "kernel": self.kernel_dim,
            "plus": self.plus_dim,
            "minus": self.minus_dim,
            "D": None if self.k_dim == 0 else matrix_to_json(self.D),
        }

    @classmethod
    def from_json(cls, obj) -> "CanonicalContraction":
        D = obj.get("D")
        D = None if D is None else matrix_from_json(D)
        return cls(int(obj["kernel"]), int(obj["plus"]), int(obj["minus"]), D)


@dataclass(frozen=True)
class ProjectionPair:
    P: np.ndarray
    Q: np.ndarray
    E_kernel: np.ndarray
    U_comm: np.ndarray
    P_U: np.ndarray
    Q_U: np.ndarray


def defect_root(D: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """``(I - D^2)^{1/2}`` computed in the eigenbasis of ``D``."""
    n = D.shape[0]
    out = np.zeros((n, n), dtype=np.complex128)
    for g in hermitian_eigen(D, tol):
        w = np.sqrt(max(0.0, 1.0 - g.value * g.value))
        out += w * (g.vectors @ adjoint(g.vectors))
    return out


def halmos_blocks(D, U, tol: Tolerances = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """The projections ``P_U`` and ``Q_U`` on ``K (+) K`` with ``P_U - Q_U = D (+) -D``."""
    D = np.asarray(D, dtype=np.complex128)
    U = np.asarray(U, dtype=np.complex128)
    n = D.shape[0]
    eye = np.eye(n)
    S = defect_root(D, tol)
    off = U @ S
    off_adj = adjoint(U) @ S
    P_U = 0.5 * np.block([[eye + D, off], [off_adj, eye - D]])
    Q_U = 0.5 * np.block([[eye - D, off], [off_adj, eye + D]])
    return P_U, Q_U


def build_pq(
    a: CanonicalContraction,
    E_kernel: Optional[np.ndarray] = None,
    U_comm: Optional[np.ndarray] = None,
    tol: Tolerances = DEFAULT_TOL,
) -> ProjectionPair:
    """Assemble ``P = E (+) I (+) 0 (+) P_U`` and ``Q = E (+) 0 (+) I (+) Q_U``.

    ``E_kernel`` defaults to the zero projection and ``U_comm`` to the identity.

    Raises
    ------
    NotProjection
        ``E_kernel`` is not an orthogonal projection.
    NotUnitary
        ``U_comm`` is not unitary.
    CommutationFailure
        ``U_comm`` does not commute with ``D``.
    """
    a.validate(tol)
    kd, k = a.kernel_dim, a.k_dim
    E = np.zeros((kd, kd), dtype=np.complex128) if E_kernel is None else np.asarray(E_kernel, dtype=np.complex128)
    U = np.eye(k, dtype=np.complex128) if U_comm is None else np.asarray(U_comm, dtype=np.complex128)
    if E.shape != (kd, kd):
        raise DimensionMismatch(f"E_kernel must be {kd}x{kd}, got {E.shape}")
    if U.shape != (k, k):
        raise DimensionMismatch(f"U_comm must be {k}x{k}, got {U.shape}")
    if kd:
        chk = validate_structure(E, "Projection", tol)
        if not chk:
            raise NotProjection(f"E_kernel violates projection identities by {chk.violation:.3e}")
    D = a._D()
    if k:
        chk = validate_structure(U, "Unitary", tol)
        if not chk:
            raise NotUnitary(f"U_comm violates unitarity by {chk.violation:.3e}")
        comm = max_norm(U @ D - D @ U)
        if comm > tol.structural:
            raise CommutationFailure(f"||U D - D U||_max = {comm:.3e}")
    P_U, Q_U = halmos_blocks(D, U, tol) if k else (np.zeros((0, 0)), np.zeros((0, 0)))
    P = direct_sum(E, np.eye(a.plus_dim), np.zeros((a.minus_dim, a.minus_dim)), P_U)
    Q = direct_sum(E, np.zeros((a.plus_dim, a.plus_dim)), np.eye(a.minus_dim), Q_U)
    return ProjectionPair(P, Q, E, U, P_U, Q_U)


def range_projection(lam: float, U) -> np.ndarray:
    """Projection on ``H (+) K`` with diagonal blocks ``(1 +- lam)/2`` and off-diagonal ``sqrt(1-lam^2)/2 U^{(*)}``.

    ``U`` maps ``H`` to ``K``; the upper-right block carries ``U*`` and the
    lower-left block ``U``.
    """
    if not 0.0 < lam < 1.0:
        raise LambdaOutOfRange(f"lambda must lie in (0, 1), got {lam!r}")
    U = np.asarray(U, dtype=np.complex128)
    c = np.sqrt(1.0 - lam * lam) / 2.0
    return np.block(
        [
            [(1.0 + lam) / 2.0 * np.eye(U.shape[1]), c * adjoint(U)],
            [c * U, (1.0 - lam) / 2.0 * np.eye(U.shape[0])],
        ]
    )


def projection_range_basis(lam: float, U_block, basis_H=None, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal columns ``sqrt((1+lam)/2) e_i (+) sqrt((1-lam)/2) U e_i`` spanning ``ran range_projection``."""
    if not 0.0 < lam < 1.0:
        raise LambdaOutOfRange(f"lambda must lie in (0, 1), got {lam!r}")
    U = np.asarray(U_block, dtype=np.complex128)
    chk = validate_structure(U, "Unitary", tol)
    if not chk:
        raise NotUnitary(f"U_block violates unitarity by {chk.violation:.3e}")
    B = np.eye(U.shape[1], dtype=np.complex128) if basis_H is None else np.asarray(basis_H, dtype=np.complex128)
    return np.vstack([np.sqrt((1.0 + lam) / 2.0) * B, np.sqrt((1.0 - lam) / 2.0) * (U @ B)])


def complement_range_basis(lam: float, U_block, basis_H=None, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal columns ``sqrt((1-lam)/2) e_i (+) -sqrt((1+lam)/2) U e_i`` spanning the complementary range."""
    if not 0.0 < lam < 1.0:
        raise LambdaOutOfRange(f"lambda must lie in (0, 1), got {lam!r}")
    U = np.asarray(U_block, dtype=np.complex128)
    B = np.eye(U.shape[1], dtype=np.complex128) if basis_H is None else np.asarray(basis_H, dtype=np.complex128)
    return np.vstack([np.sqrt((1.0 - lam) / 2.0) * B, -np.sqrt((1.0 + lam) / 2.0) * (U @ B)])
