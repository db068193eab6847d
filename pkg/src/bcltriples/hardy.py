"""Commuting isometries on a degree-truncated vector-valued Hardy space.

The space ``H^2_E`` is cut to polynomials of degree ``<= N`` and stored
degree-major: coordinate ``d * n + j`` is ``z^d e_j``. The shift ``Mz`` sends
degree ``d`` to ``d + 1`` and kills degree ``N``. From a triple ``(U, P)``::

    V1 = (I (x) P + Mz (x) P-perp)(I (x) U*)
    V2 = (I (x) U)(Mz (x) P + I (x) P-perp)

so ``V1 V2 = V2 V1 = Mz (x) I`` and the defect
``I - V1 V1* - V2 V2* + V1 V2 V1* V2*`` lives on the constants.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bclbuild import BCLTriple
from .jsonio import matrix_to_json
from .matcore import adjoint, max_norm


def truncated_shift(N: int) -> np.ndarray:
    """``(N+1) x (N+1)`` shift with ``e_d -> e_{d+1}`` and ``e_N -> 0``."""
    return np.eye(N + 1, k=-1, dtype=np.complex128)


@dataclass(frozen=True)
class HardyRealization:
    N: int
    n: int
    V1: np.ndarray
    V2: np.ndarray
    Mz: np.ndarray
    source: BCLTriple

    def block(self, M: np.ndarray, d: int, e: int) -> np.ndarray:
        """Degree block ``(d, e)`` of an operator on the truncation."""
        n = self.n
        return M[d * n:(d + 1) * n, e * n:(e + 1) * n]

    def degrees(self, lo: int, hi: int) -> slice:
        """Coordinates of degrees ``lo..hi`` inclusive."""
        return slice(lo * self.n, (hi + 1) * self.n)

    def to_json(self) -> dict:
        return {"N": self.N, "n": self.n, "V1": matrix_to_json(self.V1), "V2": matrix_to_json(self.V2)}


def realize(t: BCLTriple, N: int = 8) -> HardyRealization:
    """Assemble ``V1``, ``V2`` and ``Mz (x) I`` on degrees ``0..N``."""
    if N < 2:
        raise ValueError(f"truncation degree must be at least 2, got {N}")
    n = t.dim
    S = truncated_shift(N)
    I_deg = np.eye(N + 1)
    U = np.asarray(t.U, dtype=np.complex128)
    P = np.asarray(t.P, dtype=np.complex128)
    Pp = np.eye(n) - P
    V1 = (np.kron(I_deg, P) + np.kron(S, Pp)) @ np.kron(I_deg, adjoint(U))
    V2 = np.kron(I_deg, U) @ (np.kron(S, P) + np.kron(I_deg, Pp))
    return HardyRealization(N, n, V1, V2, np.kron(S, np.eye(n)), t)


def product_check(h: HardyRealization) -> tuple[float, float, float]:
    """``(|V1V2 - V2V1|, |V1V2 - Mz|, |V2V1 - Mz|)`` in max norm over the whole truncation."""
    A = h.V1 @ h.V2
    B = h.V2 @ h.V1
    return max_norm(A - B), max_norm(A - h.Mz), max_norm(B - h.Mz)


def defect_operator(h: HardyRealization) -> np.ndarray:
    """``C(V1, V2) = I - V1 V1* - V2 V2* + V1 V2 V1* V2*`` on the truncation."""
    V1, V2 = h.V1, h.V2
    I = np.eye(V1.shape[0])
    return I - V1 @ adjoint(V1) - V2 @ adjoint(V2) + V1 @ V2 @ adjoint(V1) @ adjoint(V2)


@dataclass(frozen=True)
class DefectBlockReport:
    degree0_block: np.ndarray
    offblock_max: float  # over degrees 0..N-2, degree-0 diagonal block excluded
    edge_max: float  # entries touching degrees N-1 or N

    def to_json(self) -> dict:
        return {
            "degree0_block": matrix_to_json(self.degree0_block),
            "offblock_max": self.offblock_max,
            "edge_max": self.edge_max,
        }


def defect_block(h: HardyRealization) -> DefectBlockReport:
    """Split ``C(V1, V2)`` into its degree-0 block and the remainder.

    Rows and columns of degree ``N - 1`` and ``N`` see the truncation and are
    reported separately as ``edge_max``.
    """
    C = defect_operator(h)
    n, N = h.n, h.N
    inner = C[h.degrees(0, N - 2), h.degrees(0, N - 2)].copy()
    block0 = inner[:n, :n].copy()
    inner[:n, :n] = 0.0
    edge = C.copy()
    edge[h.degrees(0, N - 2), h.degrees(0, N - 2)] = 0.0
    return DefectBlockReport(block0, max_norm(inner), max_norm(edge))


@dataclass(frozen=True)
class IsometryReport:
    v1_defect: float
    v2_defect: float
    v1_edge: float
    v2_edge: float


def isometry_check(h: HardyRealization) -> IsometryReport:
    """Max entry of ``Vi* Vi - I`` on columns of degree ``< N``; the degree-``N`` columns are the edge."""
    I = np.eye(h.V1.shape[0])
    below = h.degrees(0, h.N - 1)
    top = h.degrees(h.N, h.N)
    out = []
    for V in (h.V1, h.V2):
        G = adjoint(V) @ V - I
        out.append((max_norm(G[:, below]), max_norm(G[:, top])))
    return IsometryReport(out[0][0], out[1][0], out[0][1], out[1][1])
