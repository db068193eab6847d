import pytest

from bcltriples.jsonio import dumps
from bcltriples.search import default_spectrum, run_search, sample_unitaries


def test_default_spectrum():
    s = default_spectrum(6, 1, 1)
    assert [k for _, k in s.interior] == [1, 1]
    assert [lam for lam, _ in s.interior] == pytest.approx([2 / 3, 1 / 3], abs=1e-15)
    with pytest.raises(ValueError):
        default_spectrum(4, 1, 2)


def test_sampling_independent_of_batching():
    a = sample_unitaries(3, 11, 0, 10)
    b = sample_unitaries(3, 11, 4, 7)
    assert (a[4:7] == b).all()


def test_finds_part_iii_solution():
    rep = run_search(default_spectrum(2, 1, 1), 1000, seed=1)
    assert rep.best_residual <= 1e-8
    assert rep.commutant_dim == 1


def test_infeasible_stays_above_trace_bound():
    rep = run_search(default_spectrum(3, 1, 2), 2000, seed=4)
    assert rep.best_residual >= rep.trace_bound - 1e-12 > 0
    assert rep.best_residual > 1e-6 and not rep.counterexample


def test_deterministic_and_parallel_agree():
    s = default_spectrum(3, 1, 2)
    one = dumps(run_search(s, 1, seed=99).to_json())
    assert one == dumps(run_search(s, 1, seed=99).to_json())
    serial = dumps(run_search(s, 3000, seed=5).to_json())
    parallel = dumps(run_search(s, 3000, seed=5, workers=3, batch=500).to_json())
    assert serial == parallel
