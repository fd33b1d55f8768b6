import numpy as np
import pandas as pd
import pytest
from scipy.special import expit

from evonash.errors import ContractError
from evonash.game import (build_payoff, ensemble_signal, mw_step, nash_gap, psro_solve,
                          regret_bound, solve_zero_sum, theoretical_eta)
from evonash.models.game import MetaStrategy, PayoffMatrix


def random_antisymmetric(K, seed):
    M = np.random.default_rng(seed).uniform(-1, 1, (K, K))
    return PayoffMatrix((M - M.T) / 2)


def test_build_payoff_is_antisymmetric():
    A = build_payoff([0.01, -0.02, 0.005])
    np.testing.assert_allclose(A.A, -A.A.T)
    assert A.A[0, 1] == pytest.approx(0.03)


def test_build_payoff_needs_two_agents():
    with pytest.raises(ContractError):
        build_payoff([0.1])


def test_mw_step_single_update():
    A = build_payoff([0.01, 0.0])
    m = mw_step(A, MetaStrategy.uniform(2, eta=1.0))
    assert m.m[0] == pytest.approx(expit(0.01), rel=1e-12)
    assert m.iterations == 1


def test_meta_strategy_must_be_on_simplex():
    with pytest.raises(ContractError):
        MetaStrategy(np.array([0.7, 0.7]))


@pytest.mark.parametrize('K', [4, 8, 16])
def test_average_gap_respects_regret_bound(K):
    A = random_antisymmetric(K, seed=K)
    T = 400
    result = psro_solve(A, theoretical_eta(A.G, K, T), T)
    assert result.average_gap <= regret_bound(A.G, K, T) + 1e-12
    assert result.bound == pytest.approx(regret_bound(A.G, K, T))
    assert len(result.gap_trace) == T
    assert result.average.sum() == pytest.approx(1.0)


def test_dominant_agent_takes_the_weight():
    result = psro_solve(build_payoff([0.02, 0.0, -0.01]), eta=50.0, iterations=200)
    assert result.final[0] > 0.99
    assert result.final_gap < 1e-3


def test_single_agent_is_trivial():
    result = psro_solve(PayoffMatrix(np.zeros((1, 1))), 0.5, 10)
    assert result.average.tolist() == [1.0]


def test_nash_gap_of_uniform_on_symmetric_game_is_zero():
    assert nash_gap(build_payoff([0.0, 0.0, 0.0]), np.full(3, 1 / 3)) == 0.0


def test_matching_pennies_from_uniform_stays_put():
    x, y, value = solve_zero_sum([[1, -1], [-1, 1]], eta=0.05, iterations=500)
    np.testing.assert_allclose(x, [0.5, 0.5], atol=1e-12)
    np.testing.assert_allclose(y, [0.5, 0.5], atol=1e-12)
    assert value == pytest.approx(0.0, abs=1e-12)


def test_matching_pennies_averages_to_equilibrium():
    x, y, value = solve_zero_sum([[1, -1], [-1, 1]], eta=0.05, iterations=500,
                                 row_init=[0.55, 0.45], col_init=[0.55, 0.45])
    np.testing.assert_allclose(x, [0.5, 0.5], atol=0.05)
    np.testing.assert_allclose(y, [0.5, 0.5], atol=0.05)
    assert abs(value) < 0.05


def test_ensemble_signal_mixes_weights():
    index = pd.bdate_range('2022-01-03', periods=3)
    signals = [pd.Series([1.0, 0.0, 0.5], index=index), pd.Series([0.0, 1.0, 0.5], index=index)]
    mixed = ensemble_signal(np.array([0.25, 0.75]), signals)
    assert mixed.tolist() == pytest.approx([0.25, 0.75, 0.5])


def test_ensemble_signal_rejects_misaligned():
    a = pd.Series([1.0], index=pd.bdate_range('2022-01-03', periods=1))
    b = pd.Series([1.0], index=pd.bdate_range('2022-01-04', periods=1))
    with pytest.raises(ContractError):
        ensemble_signal([0.5, 0.5], [a, b])
