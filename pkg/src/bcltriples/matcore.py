"""Dense complex linear-algebra kernel.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. The Hermitian
eigensolver is a cyclic two-sided Jacobi method written here; singular value
decompositions (used for numerical rank) come from LAPACK via numpy.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import MalformedMatrix, NonSquare, NotHermitian

__all__ = [
    "Tolerances",
    "EigenGroup",
    "StructureCheck",
    "Structure",
    "as_matrix",
    "adjoint",
    "max_norm",
    "jacobi_eigh",
    "hermitian_eigen",
    "null_space",
    "nullspace_dim",
    "validate_structure",
    "random_unitary",
    "direct_sum",
]


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds used throughout the package.

    ``structural`` bounds violations of algebraic identities (unitarity,
    idempotence, commutation), ``residual`` bounds assembled identities such
    as the defect equation, and ``rank_gap`` is the relative singular-value
    cutoff (also the eigenvalue merge distance).
    """

    structural: float = 1e-12
    residual: float = 1e-10
    rank_gap: float = 1e-8

    def __post_init__(self):
        if not (0 < self.structural <= self.residual < 1):
            raise ValueError(
                f"need 0 < structural <= residual < 1, got {self.structural}, {self.residual}"
            )
        if not (0 < self.rank_gap < 1):
            raise ValueError(f"rank_gap must lie in (0, 1), got {self.rank_gap}")


DEFAULT_TOL = Tolerances()


def as_matrix(M) -> np.ndarray:
    """Coerce ``M`` to a finite 2-D complex array."""
    A = np.array(M, dtype=np.complex128)
    if A.ndim != 2 or A.shape[0] == 0 or A.shape[1] == 0:
        raise MalformedMatrix(f"expected a non-empty 2-D matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise MalformedMatrix("matrix has NaN or infinite entries")
    return A


def _square(M) -> np.ndarray:
    A = as_matrix(M)
    if A.shape[0] != A.shape[1]:
        raise NonSquare(f"expected a square matrix, got {A.shape}")
    return A


def adjoint(M: np.ndarray) -> np.ndarray:
    return np.conj(M).T


def max_norm(M) -> float:
    """Largest absolute entry (0 for an empty array)."""
    A = np.asarray(M)
    if A.size == 0:
        return 0.0
    return float(np.max(np.abs(A)))


def direct_sum(*blocks) -> np.ndarray:
    """Block-diagonal matrix from square or rectangular blocks (empty blocks allowed)."""
    shapes = [np.shape(b) if np.ndim(b) == 2 else (0, 0) for b in blocks]
    rows = sum(s[0] for s in shapes)
    cols = sum(s[1] for s in shapes)
    out = np.zeros((rows, cols), dtype=np.complex128)
    r = c = 0
    for b, (m, n) in zip(blocks, shapes):
        if m and n:
            out[r:r + m, c:c + n] = b
        r += m
        c += n
    return out


# ---------------------------------------------------------------------------
# Jacobi eigensolver


def _round_robin(n: int):
    """Yield ``n - 1`` (or ``n``) rounds of disjoint index pairs covering all pairs."""
    m = n + (n % 2)
    players = list(range(m))
    for _ in range(m - 1):
        pairs = [(players[i], players[m - 1 - i]) for i in range(m // 2)]
        pairs = [(min(a, b), max(a, b)) for a, b in pairs if a < n and b < n]
        if pairs:
            p, q = np.array(pairs).T
            yield p, q
        players = [players[0], players[-1]] + players[1:-1]


def jacobi_eigh(M, max_sweeps: int = 60) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Each sweep visits every off-diagonal pair once, in round-robin order so
    that the ``n // 2`` rotations of a round act on disjoint index pairs and
    can be applied together.

    Returns
    -------
    values : (n,) float array, unsorted
    vectors : (n, n) complex array with ``M @ vectors ~= vectors * values``
    """
    A = np.array(M, dtype=np.complex128)
    n = A.shape[0]
    A = 0.5 * (A + adjoint(A))
    V = np.eye(n, dtype=np.complex128)
    if n == 1:
        return A.real.diagonal().copy(), V
    scale = np.linalg.norm(A)
    if scale == 0.0:
        return np.zeros(n), V
    rounds = list(_round_robin(n))
    eps = np.finfo(float).eps
    # entries this small cannot move any eigenvalue; rotating on them overflows tau
    negligible = eps * eps * scale
    for _ in range(max_sweeps):
        off = np.linalg.norm(A - np.diag(A.diagonal()))
        if off <= eps * scale:
            break
        for p, q in rounds:
            app = A[p, p].real
            aqq = A[q, q].real
            apq = A[p, q]
            r = np.abs(apq)
            live = r > negligible
            safe_r = np.where(live, r, 1.0)
            phase = np.where(live, apq / safe_r, 1.0)
            tau = (aqq - app) / (2.0 * safe_r)
            sgn = np.where(tau >= 0.0, 1.0, -1.0)
            t = np.where(live, sgn / (np.abs(tau) + np.sqrt(1.0 + tau * tau)), 0.0)
            cs = 1.0 / np.sqrt(1.0 + t * t)
            sn = t * cs
            ph = np.conj(phase)
            g00, g01, g10, g11 = cs, sn, -ph * sn, ph * cs

            Ap, Aq = A[:, p].copy(), A[:, q].copy()
            A[:, p] = Ap * g00 + Aq * g10
            A[:, q] = Ap * g01 + Aq * g11
            Ap, Aq = A[p, :].copy(), A[q, :].copy()
            A[p, :] = np.conj(g00)[:, None] * Ap + np.conj(g10)[:, None] * Aq
            A[q, :] = np.conj(g01)[:, None] * Ap + np.conj(g11)[:, None] * Aq
            A[p, q] = 0.0
            A[q, p] = 0.0
            Vp, Vq = V[:, p].copy(), V[:, q].copy()
            V[:, p] = Vp * g00 + Vq * g10
            V[:, q] = Vp * g01 + Vq * g11
    return A.diagonal().real.copy(), V


@dataclass(frozen=True)
class EigenGroup:
    """One eigenvalue cluster: representative value, multiplicity, orthonormal basis columns."""

    value: float
    multiplicity: int
    vectors: np.ndarray


def hermitian_eigen(M, tol: Tolerances = DEFAULT_TOL) -> list[EigenGroup]:
    """Grouped spectral decomposition of a Hermitian matrix.

    Eigenvalues are sorted in descending order (stable in the pivot index)
    and consecutive eigenvalues closer than ``tol.rank_gap`` are merged into
    one group whose value is their median.

    Raises
    ------
    NonSquare, NotHermitian
    """
    A = _square(M)
    asym = max_norm(A - adjoint(A))
    if asym > tol.structural:
        raise NotHermitian(f"||M - M*||_max = {asym:.3e} exceeds {tol.structural:.1e}")
    values, vectors = jacobi_eigh(A)
    order = np.argsort(-values, kind="stable")
    values = values[order]
    vectors = vectors[:, order]

    groups: list[EigenGroup] = []
    start = 0
    for i in range(1, len(values) + 1):
        if i == len(values) or values[i - 1] - values[i] > tol.rank_gap:
            block = values[start:i]
            groups.append(EigenGroup(float(np.median(block)), i - start, vectors[:, start:i]))
            start = i
    return groups


# ---------------------------------------------------------------------------
# rank and structure


def null_space(M, tol: Tolerances = DEFAULT_TOL):
    """Orthonormal null-space basis by SVD.

    Returns ``(basis, singular_values, rank)`` where ``basis`` has one
    column per null direction. A singular value counts as zero when it is at
    most ``tol.rank_gap`` times the largest one (or 1 when ``M == 0``).
    """
    A = as_matrix(M)
    _, s, vh = np.linalg.svd(A, full_matrices=True)
    top = s[0] if s.size and s[0] > 0 else 1.0
    rank = int(np.sum(s > tol.rank_gap * top))
    basis = adjoint(vh[rank:, :])
    return basis, s, rank


def nullspace_dim(M, tol: Tolerances = DEFAULT_TOL) -> int:
    A = as_matrix(M)
    s = np.linalg.svd(A, compute_uv=False)
    top = s[0] if s[0] > 0 else 1.0
    return A.shape[1] - int(np.sum(s > tol.rank_gap * top))


class Structure(str, enum.Enum):
    UNITARY = "Unitary"
    PROJECTION = "Projection"
    SELF_ADJOINT_CONTRACTION = "SelfAdjointContraction"


@dataclass(frozen=True)
class StructureCheck:
    passed: bool
    violation: float

    def __bool__(self):
        return self.passed


def validate_structure(M, kind, tol: Tolerances = DEFAULT_TOL) -> StructureCheck:
    """Check that ``M`` is unitary, an orthogonal projection, or a self-adjoint contraction.

    The reported violation is the largest of the relevant max-entry defects;
    for contractions it also includes how far the spectral radius exceeds 1.
    """
    A = _square(M)
    kind = Structure(kind)
    n = A.shape[0]
    eye = np.eye(n)
    if kind is Structure.UNITARY:
        v = max(max_norm(adjoint(A) @ A - eye), max_norm(A @ adjoint(A) - eye))
    elif kind is Structure.PROJECTION:
        v = max(max_norm(A @ A - A), max_norm(A - adjoint(A)))
    else:
        asym = max_norm(A - adjoint(A))
        values, _ = jacobi_eigh(0.5 * (A + adjoint(A)))
        radius = float(np.max(np.abs(values)))
        v = max(asym, radius - 1.0, 0.0)
    return StructureCheck(bool(v <= tol.structural), float(v))


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary from the QR factorisation of a complex Ginibre matrix.

    The phases of ``R``'s diagonal are moved into ``Q`` so the result does
    not depend on the LAPACK sign convention.
    """
    Z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    Q, R = np.linalg.qr(Z)
    d = R.diagonal()
    return Q * (d / np.abs(d))
