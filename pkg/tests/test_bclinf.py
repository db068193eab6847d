import random

import pytest
from hypothesis import given, settings, strategies as st

from bcltriples.bclinf import (
    BasisIndex,
    FiniteVector,
    LazyOperator,
    apply,
    check_bijection,
    companion,
    enumerate_basis,
    interleave,
    interleave_inverse,
    make_diff1,
    make_inf,
    orbit_reach,
    orbit_report,
    windowed_defect_check,
    with_unit_head,
)
from bcltriples.errors import IndexOutOfRule, NotBijection
from bcltriples.spectrum import SpectrumRule

HARMONIC = SpectrumRule("harmonic", {"k": 1})


def constructions():
    return {
        "inf": make_inf(HARMONIC),
        "inf-k2-unit": make_inf(with_unit_head(SpectrumRule("geometric", {"ratio": 0.5, "k": 2}), 2)),
        "diff1": make_diff1(HARMONIC, 1),
        "diff1-k0": make_diff1(HARMONIC, 0),
        "diff1-flip": make_diff1(SpectrumRule("harmonic", {"k": 3}), 2, flip=True),
    }


def test_inf_examples():
    rule = SpectrumRule("custom-list", {"head": [{"lambda": 0.6, "k": 2}],
                                        "tail": {"rule": "harmonic", "params": {"k": 1}}})
    U, P = make_inf(rule)
    g0 = interleave(0)
    out = dict(U.action(BasisIndex(g0, "F", 1)))
    assert out == {BasisIndex(g0, "F", 1): pytest.approx(0.8), BasisIndex(g0, "FT", 1): pytest.approx(-0.6)}
    crossing = {j.group for j, _ in U.action(BasisIndex(g0, "FT", 2))}
    assert crossing == {interleave(1)}
    assert P.action(BasisIndex(g0, "F", 1)) == []
    assert P.action(BasisIndex(g0, "FT", 1)) == [(BasisIndex(g0, "FT", 1), 1.0)]
    assert interleave(interleave_inverse(7)) == 7


def test_diff1_examples():
    U, P = make_diff1(HARMONIC, 1)
    lam1 = HARMONIC(1)[0]
    assert U.action(BasisIndex(0, "F", 1)) == [(BasisIndex(0, "FT", 2), 1.0)]
    assert U.action(BasisIndex(0, "FT", 1)) == [(BasisIndex(0, "F", 1), 1.0)]
    got = dict(U.action(BasisIndex(0, "FT", 2)))
    assert got[BasisIndex(1, "F", 1)] == pytest.approx(lam1)
    assert got[BasisIndex(1, "FT", 1)] == pytest.approx((1 - lam1**2) ** 0.5)
    x = FiniteVector.basis(BasisIndex(0, "FT", 2))
    back = apply(companion(U, "U*"), apply(U, x))
    assert back.support() == {BasisIndex(0, "FT", 2)}
    assert back.terms[BasisIndex(0, "FT", 2)] == pytest.approx(1.0, abs=1e-15)


def test_diff1_k0_zero_feeds_group_one():
    U, _ = make_diff1(HARMONIC, 0)
    assert enumerate_basis(U, 1) == [BasisIndex(0, "FT", 1)]
    assert {j.group for j, _ in U.action(BasisIndex(0, "FT", 1))} == {1}


@pytest.mark.parametrize("name", list(constructions()))
def test_windowed_defect(name):
    U, P = constructions()[name]
    assert windowed_defect_check(U, P, window=1000) <= 1e-12


@pytest.mark.parametrize("name", list(constructions()))
def test_action_sparsity_and_orbits(name):
    U, P = constructions()[name]
    window = enumerate_basis(U, 20)
    for idx in enumerate_basis(U, 300):
        assert len(U.action(idx)) in (1, 2)
        assert len(companion(U, "U*").action(idx)) in (1, 2)
    for start in window[:10]:
        assert set(window) <= orbit_reach(U, P, start, 200)


@pytest.mark.parametrize("name", list(constructions()))
def test_basis_images_are_orthonormal(name):
    U, _ = constructions()[name]
    images = [apply(U, FiniteVector.basis(i)) for i in enumerate_basis(U, 60)]
    for a, x in enumerate(images):
        assert x.norm() == pytest.approx(1.0, abs=1e-15)
        for y in images[a + 1:]:
            ip = sum(c * y.terms.get(i, 0.0) for i, c in x.terms.items())
            assert abs(ip) <= 1e-15


@given(st.sampled_from(sorted(constructions())), st.integers(0, 2**32 - 1))
@settings(max_examples=40, deadline=None)
def test_unitarity_on_random_vectors(name, seed):
    U, _ = constructions()[name]
    rng = random.Random(seed)
    pool = enumerate_basis(U, 60)
    v = FiniteVector({rng.choice(pool): complex(rng.gauss(0, 1), rng.gauss(0, 1)) for _ in range(5)})
    Us = companion(U, "U*")
    assert apply(U, v).norm() == pytest.approx(v.norm(), rel=1e-12)
    assert (apply(U, apply(Us, v)) - v).max_abs() <= 1e-14
    assert (apply(Us, apply(U, v)) - v).max_abs() <= 1e-14


class _Identity(LazyOperator):
    def action(self, idx):
        self.model.check(idx)
        return [(idx, 1.0)]


def test_identity_conjugation_gives_zero_defect():
    U, P = make_inf(HARMONIC)
    ident = _Identity("U", U.mode, U.model)
    T = companion(U, "T")
    expected = max(abs(c) for i in enumerate_basis(U, 10) for _, c in T.action(i))
    assert windowed_defect_check(ident, P, window=10) == pytest.approx(expected)


def test_custom_bijection():
    g = lambda n: 2 * n + 1 if n >= 0 else -2 * n
    U, P = make_inf(HARMONIC, g_rule=g)
    assert windowed_defect_check(U, P, window=200) <= 1e-12
    with pytest.raises(NotBijection):
        make_inf(HARMONIC, g_rule=lambda n: abs(n) + 1)
    with pytest.raises(NotBijection):
        check_bijection(lambda n: 2 * abs(n) + 2 + (n < 0))


def test_index_errors():
    U, P = make_diff1(HARMONIC, 1)
    with pytest.raises(IndexOutOfRule):
        apply(U, FiniteVector.basis(BasisIndex(1, "F", 2)))
    with pytest.raises(IndexOutOfRule):
        U.action(BasisIndex(0, "F", 2))
    with pytest.raises(IndexOutOfRule):
        U.action(BasisIndex(-1, "F", 1))
    Ui, _ = make_inf(HARMONIC)
    with pytest.raises(IndexOutOfRule):
        Ui.action(BasisIndex(0, "F", 1))


def test_orbit_examples_and_report():
    U, P = make_diff1(HARMONIC, 1)
    reach = orbit_reach(U, P, BasisIndex(0, "F", 1), 20)
    assert {BasisIndex(0, "FT", 2), BasisIndex(1, "F", 1), BasisIndex(1, "FT", 1)} <= reach
    assert orbit_reach(U, P, BasisIndex(0, "F", 1), 0) == {BasisIndex(0, "F", 1)}
    Ui, Pi = make_inf(SpectrumRule("harmonic", {"k": 2}))
    reach = orbit_reach(Ui, Pi, BasisIndex(interleave(0), "FT", 2), 2)
    assert any(i.group == interleave(1) for i in reach)
    rep = orbit_report(reach)
    assert rep[0] == {"group": 1, "slot": "F", "t": 1}
    assert BasisIndex.from_json(rep[-1]) in reach


def test_enumeration_order():
    U, _ = make_inf(HARMONIC)
    groups = [i.group for i in enumerate_basis(U, 10)]
    assert groups == [1, 1, 2, 2, 3, 3, 4, 4, 5, 5]
    U, _ = make_diff1(HARMONIC, 2)
    assert [(i.group, i.slot) for i in enumerate_basis(U, 6)] == [
        (0, "F"), (0, "F"), (0, "FT"), (0, "FT"), (0, "FT"), (1, "F")]
