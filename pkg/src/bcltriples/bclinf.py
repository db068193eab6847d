"""Infinite-dimensional triples as exact lazy operators on finitely supported sequences.

The Hilbert space has an orthonormal basis split into pairs of families
``f^m_t`` (spanning ran P-perp) and ``ft^m_t`` (spanning ran P), one pair per
eigenvalue group ``m`` with ``1 <= t <= k_m``. Operators are given by their
action on basis vectors, so every identity is checked without truncation.

Two constructions are provided.

``Inf``   groups are labelled by ``m = g(n)`` for a bijection ``g: Z -> N``;
          the ``ft`` families of all groups are chained along ``n``.
``Diff1`` groups ``m >= 1`` are chained along ``m`` and a group ``0`` holds
          ``k0`` vectors ``f^0_t`` and ``k0 + 1`` vectors ``ft^0_t`` that
          carry the eigenvalues ``+1`` and ``-1`` of the defect.

With ``c = sqrt(1 - lambda^2)`` the rotated pair at ``(m, s)`` is::

    r1(m, s) = c f^m_s - lambda ft^m_s,     r2(m, s) = lambda f^m_s + c ft^m_s

and ``U`` maps every basis vector onto one rotated vector (or a group-0
vector), which makes ``U`` unitary and ``P-perp - U P-perp U*`` act on each
pair ``(f^m_t, ft^m_t)`` with eigenvalues ``+-lambda_m``.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Callable, Iterator, Optional

from .errors import IndexOutOfRule, MalformedSpectrum, NotBijection

F, FT = "F", "FT"


@dataclass(frozen=True, order=True)
class BasisIndex:
    group: int
    slot: str
    t: int

    def to_json(self) -> dict:
        return {"group": self.group, "slot": self.slot, "t": self.t}

    @classmethod
    def from_json(cls, obj) -> "BasisIndex":
        return cls(int(obj["group"]), str(obj["slot"]), int(obj["t"]))


class FiniteVector:
    """Finitely supported vector ``{BasisIndex: complex}``; exact zeros are never stored."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms: dict = {}
        if terms:
            for idx, c in dict(terms).items():
                self.add(idx, c)

    @classmethod
    def basis(cls, idx: BasisIndex) -> "FiniteVector":
        return cls({idx: 1.0})

    def add(self, idx: BasisIndex, c) -> None:
        v = self.terms.get(idx, 0.0) + c
        if v == 0:
            self.terms.pop(idx, None)
        else:
            self.terms[idx] = v

    def __add__(self, other: "FiniteVector") -> "FiniteVector":
        out = FiniteVector(self.terms)
        for idx, c in other.terms.items():
            out.add(idx, c)
        return out

    def __sub__(self, other: "FiniteVector") -> "FiniteVector":
        return self + other.scale(-1.0)

    def scale(self, a) -> "FiniteVector":
        return FiniteVector({idx: a * c for idx, c in self.terms.items()})

    def norm(self) -> float:
        return math.sqrt(sum(abs(c) ** 2 for c in self.terms.values()))

    def max_abs(self) -> float:
        return max((abs(c) for c in self.terms.values()), default=0.0)

    def support(self) -> set:
        return set(self.terms)

    def __len__(self):
        return len(self.terms)

    def __repr__(self):
        inner = ", ".join(f"{i.slot}^{i.group}_{i.t}: {c:.6g}" for i, c in sorted(self.terms.items()))
        return f"FiniteVector({{{inner}}})"


# ---------------------------------------------------------------------------
# bijections Z -> N


def interleave(n: int) -> int:
    """Default bijection ``g``: 0 -> 1, 1 -> 2, -1 -> 3, 2 -> 4, -2 -> 5, ..."""
    if n == 0:
        return 1
    return 2 * n if n > 0 else -2 * n + 1


def interleave_inverse(m: int) -> int:
    if m < 1:
        raise IndexOutOfRule(f"group label {m} is not in N")
    if m == 1:
        return 0
    return m // 2 if m % 2 == 0 else -(m - 1) // 2


def check_bijection(g: Callable[[int], int], window: int = 64) -> None:
    """Sampled check that ``g`` is injective on ``[-window, window]`` and hits ``1..window``."""
    seen: dict[int, int] = {}
    for n in range(-4 * window, 4 * window + 1):
        m = int(g(n))
        if m < 1:
            raise NotBijection(f"g({n}) = {m} is not a positive integer")
        if m in seen:
            raise NotBijection(f"g({seen[m]}) = g({n}) = {m}")
        seen[m] = n
    missing = [m for m in range(1, window + 1) if m not in seen]
    if missing:
        raise NotBijection(f"values {missing[:5]} not attained on [-{4 * window}, {4 * window}]")


class _Inverse:
    """Lazily tabulated inverse of a bijection ``Z -> N``."""

    def __init__(self, g, limit: int = 1 << 16):
        self.g = g
        self.limit = limit
        self.table: dict[int, int] = {}
        self.radius = -1

    def __call__(self, m: int) -> int:
        while m not in self.table:
            r = self.radius + 1
            if r > self.limit:
                raise IndexOutOfRule(f"group label {m} not reached by g within |n| <= {self.limit}")
            for n in {r, -r}:
                self.table[int(self.g(n))] = n
            self.radius = r
        return self.table[m]


# ---------------------------------------------------------------------------
# the lazy model


def with_unit_head(rule, multiplicity: int):
    """Prepend a group ``(1.0, multiplicity)`` to ``rule`` (used when ``+-1`` are eigenvalues in Inf mode)."""
    if multiplicity <= 0:
        return rule

    def shifted(n: int):
        return (1.0, multiplicity) if n == 1 else rule(n - 1)

    return shifted


class _Model:
    """Shared index arithmetic for the operators of one construction."""

    def __init__(self, mode: str, rule, g=None, g_inv=None, k0: int = 0, flip: bool = False):
        self.mode = mode
        self.rule = rule
        self.g = g
        self.g_inv = g_inv
        self.k0 = k0
        self.flip = flip
        self._cache: dict[int, tuple[float, int, float]] = {}

    def group(self, m: int) -> tuple[float, int, float]:
        """``(lambda_m, k_m, sqrt(1 - lambda_m^2))`` for an interior group."""
        if m not in self._cache:
            lam, k = self.rule(m)
            lam, k = float(lam), int(k)
            if not 0.0 < lam <= 1.0 or k < 1:
                raise MalformedSpectrum(f"rule gave (lambda, k) = ({lam}, {k}) for group {m}")
            self._cache[m] = (lam, k, math.sqrt((1.0 - lam) * (1.0 + lam)))
        return self._cache[m]

    def size(self, m: int, slot: str) -> int:
        if self.mode == "Diff1" and m == 0:
            return self.k0 + (1 if slot == FT else 0)
        return self.group(m)[1]

    def check(self, idx: BasisIndex) -> None:
        if idx.slot not in (F, FT):
            raise IndexOutOfRule(f"unknown slot {idx.slot!r}")
        if self.mode == "Inf" and idx.group < 1:
            raise IndexOutOfRule(f"Inf groups are labelled by N, got {idx.group}")
        if self.mode == "Diff1" and idx.group < 0:
            raise IndexOutOfRule(f"Diff1 groups are non-negative, got {idx.group}")
        if not 1 <= idx.t <= self.size(idx.group, idx.slot):
            raise IndexOutOfRule(f"t = {idx.t} outside 1..{self.size(idx.group, idx.slot)} for {idx}")

    # neighbouring groups along the chain
    def next_group(self, m: int) -> int:
        return self.g(self.g_inv(m) + 1) if self.mode == "Inf" else m + 1

    def prev_group(self, m: int) -> int:
        return self.g(self.g_inv(m) - 1) if self.mode == "Inf" else m - 1

    def r1(self, m: int, s: int) -> list:
        if self.mode == "Diff1" and m == 0:
            return [(BasisIndex(0, FT, 1), -1.0)]
        lam, _, c = self.group(m)
        return [(BasisIndex(m, F, s), c), (BasisIndex(m, FT, s), -lam)]

    def r2(self, m: int, s: int) -> list:
        lam, _, c = self.group(m)
        return [(BasisIndex(m, F, s), lam), (BasisIndex(m, FT, s), c)]

    def pre_r1(self, m: int, s: int) -> BasisIndex:
        """The basis vector ``U`` maps to ``r1(m, s)``."""
        if self.mode == "Inf":
            return BasisIndex(m, F, s)
        if s >= 2:
            return BasisIndex(m, F, s - 1)
        return BasisIndex(m + 1, F, self.group(m + 1)[1])

    def pre_r2(self, m: int, s: int) -> BasisIndex:
        if s >= 2:
            return BasisIndex(m, FT, s - 1)
        if self.mode == "Diff1" and m == 1:
            return BasisIndex(0, FT, self.k0 + 1)
        p = self.prev_group(m)
        return BasisIndex(p, FT, self.group(p)[1])

    # operator actions
    def U(self, idx: BasisIndex) -> list:
        m, t = idx.group, idx.t
        if self.mode == "Diff1" and m == 0:
            if idx.slot == F:
                return [(BasisIndex(0, FT, t + 1), 1.0)]
            if t <= self.k0:
                return [(BasisIndex(0, F, t), 1.0)]
            return self.r2(1, 1)
        k = self.group(m)[1]
        if idx.slot == F:
            if self.mode == "Inf":
                return self.r1(m, t)
            return self.r1(m, t + 1) if t < k else self.r1(m - 1, 1)
        return self.r2(m, t + 1) if t < k else self.r2(self.next_group(m), 1)

    def U_adj(self, idx: BasisIndex) -> list:
        m, t = idx.group, idx.t
        if self.mode == "Diff1" and m == 0:
            if idx.slot == F:
                return [(BasisIndex(0, FT, t), 1.0)]
            if t >= 2:
                return [(BasisIndex(0, F, t - 1), 1.0)]
            return [(BasisIndex(1, F, self.group(1)[1]), -1.0)]
        lam, _, c = self.group(m)
        a, b = self.pre_r1(m, t), self.pre_r2(m, t)
        if idx.slot == F:
            return [(a, c), (b, lam)]
        return [(a, -lam), (b, c)]

    def range_slot(self) -> str:
        """Slot spanning ran P (swapped in the flipped orientation)."""
        return F if self.flip else FT

    def P(self, idx: BasisIndex) -> list:
        return [(idx, 1.0)] if idx.slot == self.range_slot() else []

    def P_perp(self, idx: BasisIndex) -> list:
        return [] if idx.slot == self.range_slot() else [(idx, 1.0)]

    def T(self, idx: BasisIndex) -> list:
        sign = -1.0 if self.flip else 1.0
        if self.mode == "Diff1" and idx.group == 0:
            return [(idx, sign if idx.slot == F else -sign)]
        lam, _, c = self.group(idx.group)
        other = BasisIndex(idx.group, FT if idx.slot == F else F, idx.t)
        diag = lam * lam if idx.slot == F else -lam * lam
        return [(idx, sign * diag), (other, sign * lam * c)]

    # enumeration
    def groups(self) -> Iterator[int]:
        if self.mode == "Diff1":
            m = 0
            while True:
                yield m
                m += 1
        r = 0
        while True:
            yield self.g(r)
            if r:
                yield self.g(-r)
            r += 1

    def enumerate(self) -> Iterator[BasisIndex]:
        for m in self.groups():
            for slot in (F, FT):
                for t in range(1, self.size(m, slot) + 1):
                    yield BasisIndex(m, slot, t)


@dataclass(frozen=True)
class LazyOperator:
    """An operator given by its exact action on basis vectors."""

    name: str
    mode: str
    model: _Model

    def action(self, idx: BasisIndex) -> list:
        self.model.check(idx)
        fn = {"U": self.model.U, "U*": self.model.U_adj, "P": self.model.P,
              "Pperp": self.model.P_perp, "T": self.model.T}[self.name]
        return [(j, c) for j, c in fn(idx) if c != 0]

    @property
    def spectrum_rule(self):
        return self.model.rule


def _operators(model: _Model) -> tuple[LazyOperator, LazyOperator]:
    return LazyOperator("U", model.mode, model), LazyOperator("P", model.mode, model)


def companion(op: LazyOperator, name: str) -> LazyOperator:
    """Another operator (``U``, ``U*``, ``P``, ``Pperp`` or ``T``) of the same construction."""
    if name not in ("U", "U*", "P", "Pperp", "T"):
        raise ValueError(f"unknown operator {name!r}")
    return LazyOperator(name, op.mode, op.model)


def _check_rule(rule, window: int, allow_one: bool) -> None:
    lams = []
    for n in range(1, window + 1):
        lam, k = rule(n)
        hi_ok = lam <= 1.0 if allow_one else lam < 1.0
        if not (0.0 < lam and hi_ok) or int(k) < 1:
            raise MalformedSpectrum(f"rule gave (lambda, k) = ({lam}, {k}) at n = {n}")
        lams.append(lam)
    if len(set(lams)) != len(lams):
        raise MalformedSpectrum("rule repeats an eigenvalue")


def make_inf(spectrum_rule, g_rule: Optional[Callable[[int], int]] = None, window: int = 64):
    """Lazy ``(U, P)`` for the construction over a bijection ``g: Z -> N``.

    ``spectrum_rule(m)`` gives ``(lambda_m, k_m)`` for ``m >= 1``; ``lambda_m = 1``
    is allowed and carries the eigenvalues ``+-1``.

    Raises
    ------
    NotBijection
        ``g_rule`` fails the sampled bijectivity check.
    """
    _check_rule(spectrum_rule, window, allow_one=True)
    if g_rule is None:
        g, g_inv = interleave, interleave_inverse
    else:
        check_bijection(g_rule, window)
        g, g_inv = g_rule, _Inverse(g_rule)
    return _operators(_Model("Inf", spectrum_rule, g=g, g_inv=g_inv))


def make_diff1(spectrum_rule, k0: int, flip: bool = False, window: int = 64):
    """Lazy ``(U, P)`` whose defect has ``dim E_-1 = k0 + 1`` and ``dim E_1 = k0``.

    With ``flip=True`` the roles of ``P`` and ``P-perp`` are exchanged, which
    negates the defect (``dim E_1 = k0 + 1``).
    """
    if k0 < 0:
        raise ValueError(f"k0 must be non-negative, got {k0}")
    _check_rule(spectrum_rule, window, allow_one=False)
    return _operators(_Model("Diff1", spectrum_rule, k0=k0, flip=flip))


def apply(op: LazyOperator, v: FiniteVector) -> FiniteVector:
    """Exact action of ``op`` on a finitely supported vector."""
    out = FiniteVector()
    for idx, c in v.terms.items():
        for j, a in op.action(idx):
            out.add(j, a * c)
    return out


def defect_apply(U: LazyOperator, P: LazyOperator, v: FiniteVector) -> FiniteVector:
    """``(P-perp - U P-perp U*) v``."""
    Pp = companion(P, "Pperp")
    return apply(Pp, v) - apply(U, apply(Pp, apply(companion(U, "U*"), v)))


def enumerate_basis(op: LazyOperator, window: int) -> list[BasisIndex]:
    """The first ``window`` basis vectors: groups by ``|n|`` (non-negative first), F before FT, ``t`` ascending."""
    out = []
    for idx in op.model.enumerate():
        if len(out) >= window:
            break
        out.append(idx)
    return out


def windowed_defect_check(U: LazyOperator, P: LazyOperator, spectrum_rule=None, window: int = 100) -> float:
    """Max coefficient of ``(P-perp - U P-perp U*) x - T x`` over the first ``window`` basis vectors.

    ``T`` is the defect prescribed by ``spectrum_rule`` (defaults to the rule
    the operators were built from).
    """
    if window < 1:
        raise ValueError("window must be positive")
    model = U.model
    if spectrum_rule is not None and spectrum_rule is not model.rule:
        model = _Model(model.mode, spectrum_rule, model.g, model.g_inv, model.k0, model.flip)
    T = LazyOperator("T", model.mode, model)
    worst = 0.0
    for idx in enumerate_basis(U, window):
        x = FiniteVector.basis(idx)
        worst = max(worst, (defect_apply(U, P, x) - apply(T, x)).max_abs())
    return worst


def orbit_reach(U: LazyOperator, P: LazyOperator, start: BasisIndex, depth: int) -> set:
    """Indices reached from ``start`` by at most ``depth`` applications of ``U``, ``U*``, ``P``, ``P-perp``."""
    ops = [U, companion(U, "U*"), P, companion(P, "Pperp")]
    U.model.check(start)
    seen = {start}
    frontier = deque([start])
    for _ in range(max(depth, 0)):
        nxt = deque()
        for idx in frontier:
            for op in ops:
                for j, _c in op.action(idx):
                    if j not in seen:
                        seen.add(j)
                        nxt.append(j)
        if not nxt:
            break
        frontier = nxt
    return seen


def orbit_report(reached) -> list[dict]:
    """JSON list of index triples, sorted by group, slot and position."""
    return [idx.to_json() for idx in sorted(reached, key=lambda i: (i.group, i.slot != F, i.t))]
