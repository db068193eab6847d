"""Finite-dimensional BCL triples ``(E, U, P)`` with a prescribed defect.

Everything is expressed in the coordinates of :func:`canonical_matrix`:
``E = E_1 (+) E_lambda_1 (+) ... (+) E_-1 (+) E_-lambda_1 (+) ...``. For each
positive eigenvalue ``lambda`` (1 included) with eigenbasis ``e_t`` and a
unitary ``U_i : E_lambda -> E_-lambda`` the frame vectors are::

    f_t  = sqrt((1+lambda)/2) e_t (+)  sqrt((1-lambda)/2) U_i e_t      (basis of ran P-perp)
    ft_t = sqrt((1-lambda)/2) e_t (+) -sqrt((1+lambda)/2) U_i e_t      (basis of ran P)

The unitaries below are written as matrices in the ordered basis
``[f_1, ..., f_m, ft_1, ..., ft_m]`` and conjugated back to canonical
coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import DimensionMismatch, InfiniteSpectrum, InvalidTwist, NotUnitary, PreconditionViolation
from .jsonio import matrix_from_json, matrix_to_json
from .matcore import (
    DEFAULT_TOL,
    Tolerances,
    adjoint,
    hermitian_eigen,
    max_norm,
    random_unitary,
    validate_structure,
)
from .spectrum import Construction, DefectSpectrum, Verdict, canonical_matrix, feasibility


@dataclass(frozen=True)
class Frame:
    spectrum: DefectSpectrum
    groups: tuple  # ((lambda, k), ...) in decreasing lambda
    F: np.ndarray
    FT: np.ndarray
    block_unitaries: tuple
    lambdas: np.ndarray  # lambda attached to each column of F (and FT)

    @property
    def m(self) -> int:
        return self.F.shape[1]

    @property
    def basis(self) -> np.ndarray:
        return np.hstack([self.F, self.FT])

    @property
    def P(self) -> np.ndarray:
        return self.FT @ adjoint(self.FT)

    @property
    def P_perp(self) -> np.ndarray:
        return self.F @ adjoint(self.F)

    def to_frame(self, M) -> np.ndarray:
        """Matrix of the operator ``M`` in the ordered frame basis."""
        B = self.basis
        return adjoint(B) @ np.asarray(M) @ B

    def from_frame(self, M) -> np.ndarray:
        B = self.basis
        return B @ np.asarray(M) @ adjoint(B)


@dataclass(frozen=True)
class BCLTriple:
    dim: int
    U: np.ndarray
    P: np.ndarray
    provenance: str = "External"

    @property
    def P_perp(self) -> np.ndarray:
        return np.eye(self.dim) - self.P

    def defect(self) -> np.ndarray:
        """``P-perp - U P-perp U*`` (equivalently ``U P U* - P``)."""
        Pp = self.P_perp
        return Pp - self.U @ Pp @ adjoint(self.U)

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "U": matrix_to_json(self.U),
            "P": matrix_to_json(self.P),
            "provenance": self.provenance,
        }

    @classmethod
    def from_json(cls, obj) -> "BCLTriple":
        U = matrix_from_json(obj["U"])
        P = matrix_from_json(obj["P"])
        dim = int(obj["dim"])
        if U.shape != (dim, dim) or P.shape != (dim, dim):
            raise DimensionMismatch(f"triple of dim {dim} has U {U.shape} and P {P.shape}")
        return cls(dim, U, P, str(obj.get("provenance", "External")))


@dataclass(frozen=True)
class ImpossibilityWitness:
    """A reducible triple together with a proper joint reducing subspace."""

    triple: BCLTriple
    subspace: np.ndarray  # orthonormal columns
    eigenvalue: complex
    reason: str = field(default="1 is the only positive eigenvalue and dim E_1 >= 2")

    def projector(self) -> np.ndarray:
        return self.subspace @ adjoint(self.subspace)


def _require_finite(s: DefectSpectrum) -> None:
    if s.is_infinite:
        raise InfiniteSpectrum("finite constructions need a finite spectrum")


def random_block_unitaries(s: DefectSpectrum, rng: np.random.Generator) -> list[np.ndarray]:
    return [random_unitary(k, rng) for _, k in s.positive_groups()]


def build_frame(s: DefectSpectrum, block_unitaries: Optional[Sequence] = None, tol: Tolerances = DEFAULT_TOL) -> Frame:
    """Orthonormal frames of ``ran P-perp`` (``F``) and ``ran P`` (``FT``) in canonical coordinates."""
    _require_finite(s)
    if s.l1 != s.l1p:
        raise PreconditionViolation(f"frames need dim E_1 = dim E_-1, got {s.l1} and {s.l1p}")
    groups = s.positive_groups()
    if block_unitaries is None:
        block_unitaries = [np.eye(k, dtype=np.complex128) for _, k in groups]
    if len(block_unitaries) != len(groups):
        raise DimensionMismatch(f"need {len(groups)} block unitaries, got {len(block_unitaries)}")
    block_unitaries = [np.asarray(u, dtype=np.complex128) for u in block_unitaries]
    for (lam, k), u in zip(groups, block_unitaries):
        if u.shape != (k, k):
            raise DimensionMismatch(f"block unitary for lambda={lam} must be {k}x{k}")
        if not validate_structure(u, "Unitary", tol):
            raise NotUnitary(f"block unitary for lambda={lam} is not unitary")

    n = s.dim
    half = n // 2
    m = sum(k for _, k in groups)
    F = np.zeros((n, m), dtype=np.complex128)
    FT = np.zeros((n, m), dtype=np.complex128)
    lambdas = np.empty(m)
    col = 0
    for (lam, k), u in zip(groups, block_unitaries):
        a = np.sqrt((1.0 + lam) / 2.0)
        b = np.sqrt((1.0 - lam) / 2.0)
        plus = slice(col, col + k)
        minus = slice(half + col, half + col + k)
        F[plus, plus] = a * np.eye(k)
        F[minus, plus] = b * u
        FT[plus, plus] = b * np.eye(k)
        FT[minus, plus] = -a * u
        lambdas[plus] = lam
        col += k
    return Frame(s, tuple(groups), F, FT, tuple(block_unitaries), lambdas)


def _cosines(lambdas: np.ndarray) -> np.ndarray:
    # sqrt(1 - lambda^2), exact 0 at lambda = 1
    return np.sqrt((1.0 - lambdas) * (1.0 + lambdas))


def _cyclic_unitary(frame: Frame) -> np.ndarray:
    """Frame-basis matrix of ``U``: ``f_j -> c_j f_j - l_j ft_j`` and ``ft_j -> l_{j+1} f_{j+1} + c_{j+1} ft_{j+1}``."""
    m = frame.m
    lam = frame.lambdas
    c = _cosines(lam)
    M = np.zeros((2 * m, 2 * m), dtype=np.complex128)
    j = np.arange(m)
    nxt = (j + 1) % m
    M[j, j] = c
    M[m + j, j] = -lam
    M[nxt, m + j] = lam[nxt]
    M[m + nxt, m + j] = c[nxt]
    return M


def construct_part_i(s: DefectSpectrum, frame: Optional[Frame] = None) -> BCLTriple:
    """Irreducible triple when ``T`` has at least two distinct positive eigenvalues."""
    _require_finite(s)
    if s.l1 != s.l1p:
        raise PreconditionViolation(f"need dim E_1 = dim E_-1, got {s.l1} and {s.l1p}")
    if len(s.positive_groups()) < 2:
        raise PreconditionViolation("need at least two distinct positive eigenvalues")
    frame = build_frame(s) if frame is None else frame
    U = frame.from_frame(_cyclic_unitary(frame))
    return BCLTriple(s.dim, U, frame.P, "PartI")


def construct_part_ii(s: DefectSpectrum, frame: Optional[Frame] = None, alpha: complex = -1.0) -> BCLTriple:
    """Irreducible triple when ``T`` has a single positive eigenvalue ``lambda`` in (0, 1).

    The cyclic unitary is twisted by the unimodular ``alpha != 1`` on ``f_1``.
    A multiplicity of 1 (the 2x2 block) is accepted as well.
    """
    _require_finite(s)
    alpha = complex(alpha)
    if abs(abs(alpha) - 1.0) > 1e-12 or abs(alpha - 1.0) <= 1e-12:
        raise InvalidTwist(f"alpha must satisfy |alpha| = 1 and alpha != 1, got {alpha}")
    if s.l1 != 0 or s.l1p != 0 or len(s.interior) != 1:
        raise PreconditionViolation("need exactly one positive eigenvalue, lying in (0, 1)")
    frame = build_frame(s) if frame is None else frame
    M = _cyclic_unitary(frame)
    M[:, 0] *= alpha
    U = frame.from_frame(M)
    return BCLTriple(s.dim, U, frame.P, f"PartII(alpha={alpha.real:.17g}{alpha.imag:+.17g}j)")


def construct_part_iii(s: DefectSpectrum, A=None, B=None, tol: Tolerances = DEFAULT_TOL):
    """Triple for a spectrum ``{+1, -1}`` only.

    Returns a :class:`BCLTriple` (irreducible, 2x2) when ``dim E_1 = 1``;
    otherwise the forced off-diagonal unitary ``[[0, A], [B, 0]]`` together with
    a two-dimensional joint reducing subspace as an :class:`ImpossibilityWitness`.
    """
    _require_finite(s)
    if s.interior or s.l1 != s.l1p or s.l1 < 1:
        raise PreconditionViolation("need interior empty and dim E_1 = dim E_-1 >= 1")
    l = s.l1
    A = np.eye(l, dtype=np.complex128) if A is None else np.asarray(A, dtype=np.complex128)
    B = np.eye(l, dtype=np.complex128) if B is None else np.asarray(B, dtype=np.complex128)
    Z = np.zeros((l, l))
    U = np.block([[Z, A], [B, Z]])
    P = np.diag(np.r_[np.zeros(l), np.ones(l)]).astype(np.complex128)
    if not validate_structure(U, "Unitary", tol):
        raise NotUnitary("A and B must be unitary")
    triple = BCLTriple(2 * l, U, P, "PartIII")
    if l == 1:
        return triple

    w, vecs = np.linalg.eig(U)
    v = vecs[:, 0]
    v1 = np.r_[v[:l], np.zeros(l)]
    v2 = np.r_[np.zeros(l), v[l:]]
    W = np.column_stack([v1 / np.linalg.norm(v1), v2 / np.linalg.norm(v2)])
    return ImpossibilityWitness(triple, W, complex(w[0]))


_FINITE_MODES = {
    Construction.PART_I: "part-i",
    Construction.PART_II: "part-ii",
    Construction.PART_III: "part-iii",
}


def construct(s: DefectSpectrum, mode: str = "auto", alpha: complex = -1.0, block_unitaries=None):
    """Dispatch to a finite constructor, chosen by :func:`feasibility` when ``mode == "auto"``.

    A reducible-only spectrum (``+-1`` only, ``dim E_1 >= 2``) is routed to
    :func:`construct_part_iii`, which returns its witness.
    """
    if mode == "auto":
        verdict = feasibility(s)
        if verdict.kind is Verdict.INFEASIBLE:
            raise PreconditionViolation(f"{verdict.kind.value}: {verdict.reason}")
        if verdict.kind is Verdict.REDUCIBLE_ONLY and not s.is_infinite:
            mode = "part-iii"
        elif verdict.construction_hint in _FINITE_MODES:
            mode = _FINITE_MODES[verdict.construction_hint]
        else:
            raise PreconditionViolation(f"{verdict.reason}: not a finite construction")
    if mode == "part-i":
        return construct_part_i(s, build_frame(s, block_unitaries))
    if mode == "part-ii":
        return construct_part_ii(s, build_frame(s, block_unitaries), alpha)
    if mode == "part-iii":
        return construct_part_iii(s)
    raise PreconditionViolation(f"mode {mode!r} is not a finite construction")


@dataclass(frozen=True)
class BlockResiduals:
    r11: float
    r12: float
    r21: float
    r22: float
    T_blocks: tuple
    U_blocks: tuple

    @property
    def max(self) -> float:
        return max(self.r11, self.r12, self.r21, self.r22)

    def to_json(self) -> dict:
        return {"T11": self.r11, "T12": self.r12, "T21": self.r21, "T22": self.r22}


def _range_bases(P: np.ndarray, tol: Tolerances):
    cols_perp, cols = [], []
    for g in hermitian_eigen(P, tol):
        (cols if g.value > 0.5 else cols_perp).append(g.vectors)
    n = P.shape[0]
    stack = lambda c: np.hstack(c) if c else np.zeros((n, 0), dtype=np.complex128)
    return stack(cols_perp), stack(cols)


def verify_block_system(t: BCLTriple, s: DefectSpectrum, frame: Optional[Frame] = None,
                        tol: Tolerances = DEFAULT_TOL) -> BlockResiduals:
    """Residuals of the four block equations equivalent to ``P-perp - U P-perp U* = T``.

    With respect to ``E = ran P-perp (+) ran P``::

        T11 = I - U11 U11*,  T12 = -U11 U21*,  T21 = -U21 U11*,  T22 = -U21 U21*

    The splitting is taken from ``frame`` when given, otherwise from an
    eigenbasis of the triple's own ``P``.
    """
    if t.dim != s.dim:
        raise DimensionMismatch(f"triple has dim {t.dim}, spectrum has dim {s.dim}")
    if frame is not None:
        Bp, Bq = frame.F, frame.FT
    else:
        Bp, Bq = _range_bases(t.P, tol)
    T = canonical_matrix(s)
    blk = lambda M, L, R: adjoint(L) @ M @ R
    U11, U21 = blk(t.U, Bp, Bp), blk(t.U, Bq, Bp)
    U12, U22 = blk(t.U, Bp, Bq), blk(t.U, Bq, Bq)
    T11, T12 = blk(T, Bp, Bp), blk(T, Bp, Bq)
    T21, T22 = blk(T, Bq, Bp), blk(T, Bq, Bq)
    I = np.eye(Bp.shape[1])
    return BlockResiduals(
        max_norm(T11 - (I - U11 @ adjoint(U11))),
        max_norm(T12 + U11 @ adjoint(U21)),
        max_norm(T21 + U21 @ adjoint(U11)),
        max_norm(T22 + U21 @ adjoint(U21)),
        (T11, T12, T21, T22),
        (U11, U12, U21, U22),
    )
