"""Defect spectra: the data ``(l1, l1', {(lambda_i, k_i)})`` of a compact difference of projections.

A compact self-adjoint contraction ``T`` that is a difference of two
projections has its non-zero part unitarily equivalent to::

    diag(I_{l1}, D, -I_{l1'}, -D),   D = (+) lambda_i I_{k_i},  0 < lambda_i < 1

:class:`DefectSpectrum` stores that data, :func:`classify` reads it off a
matrix, :func:`canonical_matrix` writes it back, and :func:`feasibility`
decides which construction (if any) produces an irreducible realisation.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import (
    InfiniteSpectrum,
    KernelNotEmpty,
    MalformedSpectrum,
    NotContraction,
    PairingViolation,
)
from .matcore import DEFAULT_TOL, Tolerances, hermitian_eigen

RULES = ("harmonic", "geometric", "custom-list")


@dataclass(frozen=True)
class SpectrumRule:
    """Closed-form generator ``n -> (lambda_n, k_n)`` for ``n >= 1``.

    ``harmonic``     lambda_n = 1 / (n + 1), params ``{"k": int}``
    ``geometric``    lambda_n = ratio ** n, params ``{"ratio": float, "k": int}``
    ``custom-list``  params ``{"head": [{"lambda", "k"}, ...], "tail": {"rule", "params"}}``;
                     the head is used first, then the tail rule re-indexed from 1.
    """

    rule: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.rule not in RULES:
            raise MalformedSpectrum(f"unknown spectrum rule {self.rule!r}")
        if self.rule == "geometric":
            r = float(self.params.get("ratio", 0.5))
            if not 0.0 < r < 1.0:
                raise MalformedSpectrum(f"geometric ratio must lie in (0, 1), got {r}")
        if self.rule == "custom-list":
            if "tail" not in self.params:
                raise MalformedSpectrum("custom-list rule needs a 'tail' rule")
            t = self.params["tail"]
            object.__setattr__(self, "_tail", SpectrumRule(t["rule"], dict(t.get("params", {}))))
        if int(self.params.get("k", 1)) < 1:
            raise MalformedSpectrum("k must be positive")
        # distinct and in (0, 1) over a probe window
        seen = [self(n)[0] for n in range(1, 200)]
        if any(not 0.0 < lam < 1.0 for lam in seen):
            raise MalformedSpectrum("rule produced an eigenvalue outside (0, 1)")
        if len(set(seen)) != len(seen):
            raise MalformedSpectrum("rule produced a repeated eigenvalue")

    def __call__(self, n: int) -> tuple[float, int]:
        if n < 1:
            raise ValueError(f"spectrum rules are indexed from 1, got {n}")
        k = int(self.params.get("k", 1))
        if self.rule == "harmonic":
            return 1.0 / (n + 1), k
        if self.rule == "geometric":
            return float(self.params.get("ratio", 0.5)) ** n, k
        head = self.params.get("head", [])
        if n <= len(head):
            return float(head[n - 1]["lambda"]), int(head[n - 1]["k"])
        return self._tail(n - len(head))

    def to_json(self) -> dict:
        return {"rule": self.rule, "params": dict(self.params)}


@dataclass(frozen=True)
class DefectSpectrum:
    l1: int
    l1p: int
    interior: tuple = ()
    infinite: Optional[SpectrumRule] = None

    def __post_init__(self):
        object.__setattr__(
            self, "interior", tuple((float(lam), int(k)) for lam, k in self.interior)
        )
        if self.l1 < 0 or self.l1p < 0:
            raise MalformedSpectrum("l1 and l1p must be non-negative")
        lams = [lam for lam, _ in self.interior]
        if any(not 0.0 < lam < 1.0 for lam in lams):
            raise MalformedSpectrum(f"interior eigenvalues must lie in (0, 1): {lams}")
        if any(k < 1 for _, k in self.interior):
            raise MalformedSpectrum("multiplicities must be positive")
        if any(a <= b for a, b in zip(lams, lams[1:])):
            raise MalformedSpectrum("interior eigenvalues must be strictly decreasing")
        if self.infinite is not None and self.interior:
            raise MalformedSpectrum("an infinite spectrum is given by its rule alone")

    @property
    def is_infinite(self) -> bool:
        return self.infinite is not None

    @property
    def dim(self) -> int:
        if self.is_infinite:
            raise InfiniteSpectrum("infinite spectrum has no finite dimension")
        return self.l1 + self.l1p + 2 * sum(k for _, k in self.interior)

    def positive_groups(self) -> list[tuple[float, int]]:
        """Distinct positive eigenvalues in decreasing order, 1 first when present."""
        head = [(1.0, self.l1)] if self.l1 > 0 else []
        return head + list(self.interior)

    def to_json(self) -> dict:
        return {
            "l1": self.l1,
            "l1p": self.l1p,
            "interior": [{"lambda": lam, "k": k} for lam, k in self.interior],
            "infinite": None if self.infinite is None else self.infinite.to_json(),
        }

    @classmethod
    def from_json(cls, obj) -> "DefectSpectrum":
        try:
            inf = obj.get("infinite")
            rule = None if inf is None else SpectrumRule(inf["rule"], dict(inf.get("params", {})))
            interior = sorted(
                ((float(e["lambda"]), int(e["k"])) for e in obj.get("interior", [])),
                key=lambda e: -e[0],
            )
            return cls(int(obj["l1"]), int(obj["l1p"]), tuple(interior), rule)
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedSpectrum(f"bad spectrum object: {exc}") from exc


def classify(T, tol: Tolerances = DEFAULT_TOL) -> DefectSpectrum:
    """Read the defect spectrum off a self-adjoint contraction with trivial kernel.

    Eigenvalues within ``tol.rank_gap`` of +-1 are snapped to +-1. An
    eigenvalue within ``tol.rank_gap`` of 0 raises :class:`KernelNotEmpty`.

    Raises
    ------
    NotHermitian, NotContraction, KernelNotEmpty, PairingViolation
    """
    groups = hermitian_eigen(T, tol)
    merged: dict[float, int] = {}
    for g in groups:
        v = g.value
        if abs(v) > 1.0 + tol.structural and abs(abs(v) - 1.0) > tol.rank_gap:
            raise NotContraction(f"eigenvalue {v!r} lies outside [-1, 1]")
        if abs(v) <= tol.rank_gap:
            raise KernelNotEmpty(f"0 is an eigenvalue (multiplicity {g.multiplicity})")
        if abs(v - 1.0) <= tol.rank_gap:
            v = 1.0
        elif abs(v + 1.0) <= tol.rank_gap:
            v = -1.0
        merged[v] = merged.get(v, 0) + g.multiplicity

    l1 = merged.pop(1.0, 0)
    l1p = merged.pop(-1.0, 0)
    positives = sorted((v for v in merged if v > 0), reverse=True)
    negatives = [v for v in merged if v < 0]
    interior = []
    for lam in positives:
        match = [v for v in negatives if abs(v + lam) <= tol.rank_gap]
        if not match:
            raise PairingViolation(f"eigenvalue {lam:.12g} has no partner {-lam:.12g}")
        neg = match[0]
        negatives.remove(neg)
        if merged[neg] != merged[lam]:
            raise PairingViolation(
                f"dim E_{lam:.12g} = {merged[lam]} but dim E_{-lam:.12g} = {merged[neg]}"
            )
        interior.append((lam, merged[lam]))
    if negatives:
        raise PairingViolation(f"eigenvalues {sorted(negatives)} have no positive partner")
    return DefectSpectrum(l1, l1p, tuple(interior))


def canonical_matrix(s: DefectSpectrum) -> np.ndarray:
    """``diag(I_{l1}, D, -I_{l1p}, -D)`` as a dense complex matrix."""
    if s.is_infinite:
        raise InfiniteSpectrum("cannot build a matrix for an infinite spectrum")
    plus = [lam for lam, k in s.interior for _ in range(k)]
    diag = [1.0] * s.l1 + plus + [-1.0] * s.l1p + [-lam for lam in plus]
    return np.diag(np.array(diag, dtype=np.complex128))


class Verdict(str, enum.Enum):
    INFEASIBLE = "Infeasible"
    REDUCIBLE_ONLY = "ReducibleOnly"
    IRREDUCIBLE_FEASIBLE = "IrreducibleFeasible"


class Construction(str, enum.Enum):
    PART_I = "PartI"
    PART_II = "PartII"
    PART_III = "PartIII"
    INF = "Inf"
    DIFF1 = "Diff1"


@dataclass(frozen=True)
class FeasibilityVerdict:
    kind: Verdict
    reason: str
    construction_hint: Optional[Construction] = None

    def __post_init__(self):
        if self.kind is Verdict.INFEASIBLE and self.construction_hint is not None:
            raise ValueError("an infeasible verdict carries no construction")

    def to_json(self) -> dict:
        hint = None if self.construction_hint is None else self.construction_hint.value
        return {"kind": self.kind.value, "reason": self.reason, "construction_hint": hint}


def feasibility(s: DefectSpectrum) -> FeasibilityVerdict:
    """Decide whether an irreducible (U, P) with the given defect spectrum exists."""
    if s.is_infinite:
        gap = abs(s.l1 - s.l1p)
        if gap == 0:
            return FeasibilityVerdict(
                Verdict.IRREDUCIBLE_FEASIBLE, "dim E_1 = dim E_-1 (infinite)", Construction.INF
            )
        if gap == 1:
            return FeasibilityVerdict(
                Verdict.IRREDUCIBLE_FEASIBLE, "|dim E_1 - dim E_-1| = 1 (infinite)", Construction.DIFF1
            )
        return FeasibilityVerdict(
            Verdict.REDUCIBLE_ONLY, "open-question: |dim E_1 - dim E_-1| >= 2 (infinite)"
        )

    if s.l1 != s.l1p:
        return FeasibilityVerdict(Verdict.INFEASIBLE, "dim E_1 != dim E_-1")
    if s.dim == 0:
        return FeasibilityVerdict(Verdict.INFEASIBLE, "empty spectrum: no non-zero defect")
    groups = s.positive_groups()
    if len(groups) >= 2:
        return FeasibilityVerdict(
            Verdict.IRREDUCIBLE_FEASIBLE, "at least two distinct positive eigenvalues", Construction.PART_I
        )
    if s.l1 == 0:
        lam, k = s.interior[0]
        reason = (
            "one positive eigenvalue in (0, 1) with multiplicity >= 2"
            if k >= 2
            else "single 2x2 block with eigenvalues +-lambda"
        )
        return FeasibilityVerdict(Verdict.IRREDUCIBLE_FEASIBLE, reason, Construction.PART_II)
    if s.l1 == 1:
        return FeasibilityVerdict(
            Verdict.IRREDUCIBLE_FEASIBLE, "1 is the only positive eigenvalue, dim E_1 = 1", Construction.PART_III
        )
    return FeasibilityVerdict(
        Verdict.REDUCIBLE_ONLY, f"1 is the only positive eigenvalue and dim E_1 = {s.l1} >= 2"
    )
