import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from caplab.channels import validate_cptp
from caplab.entropy import entropy_exchange
from caplab.verify import (
    SUITES,
    random_channel,
    random_decomposition,
    random_density,
    replay,
    run_suite,
)
from conftest import seeds


def test_random_density_dim_one():
    np.testing.assert_allclose(random_density(1, 3).matrix, [[1.0]])


def test_random_density_deterministic():
    np.testing.assert_array_equal(random_density(3, 9).matrix, random_density(3, 9).matrix)
    assert not np.allclose(random_density(3, 9).matrix, random_density(3, 10).matrix)


@given(seeds)
def test_random_density_valid(seed):
    rho = random_density(2, seed)
    assert abs(np.trace(rho.matrix) - 1) <= 1e-10
    assert rho.eigenvalues().min() >= 0


@given(st.integers(1, 4), st.integers(1, 4), st.integers(1, 4), seeds)
def test_random_channel_cptp(d_in, d_out, rank, seed):
    if d_out * rank < d_in:
        with pytest.raises(ValueError):
            random_channel(d_in, d_out, rank, seed)
        return
    ch = random_channel(d_in, d_out, rank, seed)
    assert validate_cptp(ch).deviation <= 1e-8
    assert ch.rank == rank


def test_random_unitary_channel_has_no_exchange_entropy():
    u = random_channel(3, 3, 1, 4)
    for seed in range(5):
        assert entropy_exchange(u, random_density(3, seed)) == pytest.approx(0.0, abs=1e-9)


def test_random_channel_deterministic():
    a, b = random_channel(2, 3, 2, 17), random_channel(2, 3, 2, 17)
    np.testing.assert_array_equal(a.kraus, b.kraus)


@given(st.integers(2, 4), st.integers(0, 3), seeds)
def test_random_decomposition_reproduces_state(d, extra, seed):
    rho = random_density(d, seed)
    ens = random_decomposition(rho, d + extra, seed + 1)
    assert all(s.is_pure() for s in ens.states)
    assert np.max(np.abs(ens.average().matrix - rho.matrix)) <= 1e-9


@pytest.mark.parametrize("suite", ["ssa", "jsa", "monotonicity", "exchange-bound", "concavity",
                                   "eq3", "decomp", "exchange-equiv"])
def test_entropy_suites_pass(suite):
    r = run_suite(suite, 30, 3)
    assert r.failures == 0
    assert r.trials == 30


@pytest.mark.parametrize("suite", ["dp", "convexity", "bound"])
def test_capacity_suites_pass(suite):
    r = run_suite(suite, 4, 11)
    assert r.failures == 0
    assert r.worst_slack_bits >= -1e-3


def test_ssa_example():
    assert run_suite("ssa", 1000, 42).failures == 0


def test_eq3_example():
    r = run_suite("eq3", 200, 1)
    assert r.failures == 0
    assert r.worst_slack_bits >= -1e-8


def test_unknown_suite():
    with pytest.raises(KeyError):
        run_suite("nonesuch", 1, 0)


def test_reports_reproducible_and_witness_replays():
    a = run_suite("concavity", 25, 5)
    b = run_suite("concavity", 25, 5)
    assert json.dumps(a.to_dict(timing=False)) == json.dumps(b.to_dict(timing=False))
    trial = replay("concavity", a.worst_witness["seed"])
    assert trial.margin == a.worst_slack_bits
    assert trial.params == a.worst_witness["params"]
    json.dumps(a.to_dict())


def test_failure_count_uses_tolerance(monkeypatch):
    from caplab import verify
    from caplab.verify import Trial

    margins = iter([0.1, -5e-10, -2e-9, 0.0])
    monkeypatch.setitem(verify.SUITES, "fake", (lambda seed: Trial(next(margins), {}), 1e-9))
    r = run_suite("fake", 4, 0)
    assert r.failures == 1
    assert r.worst_slack_bits == -2e-9
    assert r.worst_witness["seed"] == 2


def test_suite_ids():
    expected = {"dp", "convexity", "additivity", "ssa", "jsa", "monotonicity", "exchange-bound",
                "concavity", "decomp", "bound", "eq3"}
    assert expected <= set(SUITES)
