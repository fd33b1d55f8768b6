import numpy as np
import pandas as pd
import pytest

from evonash.agents.policy import (apply_risk_head, base_score, base_signal, emit_signal,
                                   init_population, raw_signal, zero_policy)
from evonash.errors import ContractError
from evonash.models.policy import AgentPolicy, RiskHead
from evonash.models.settings import PolicyInit, SignalBounds


def frame(rows):
    index = pd.bdate_range('2021-01-01', periods=len(rows), name='date')
    return pd.DataFrame(rows, index=index, columns=['f1', 'f2'])


def test_base_score_linear():
    agent = AgentPolicy(id='a', w=[1.0, -2.0], b=0.5, c={'BULL': 0.25})
    assert base_score(agent, [2.0, 1.0], 'BULL') == pytest.approx(0.75)
    assert base_score(agent, [2.0, 1.0], 'BEAR') == pytest.approx(0.5)


def test_base_score_dimension_mismatch():
    agent = AgentPolicy(id='a', w=[1.0, 2.0])
    with pytest.raises(ContractError):
        base_score(agent, [1.0, 2.0, 3.0], 'BULL')


def test_base_signal_tau_floor():
    assert base_signal(0.15, 0.01) == pytest.approx(np.tanh(1.0))
    assert base_signal(0.0, 0.5) == 0.0


def test_risk_head_midpoint_with_zero_weights():
    head = RiskHead(w_r=np.zeros(2), ell_min=0.5, ell_max=1.5)
    agent = AgentPolicy(id='a', w=np.zeros(2), risk_head=head)
    assert apply_risk_head(agent, 0.4, [3.0, -1.0], 'SHOCK') == pytest.approx(0.4)


def test_risk_head_missing_is_contract_error():
    with pytest.raises(ContractError):
        apply_risk_head(zero_policy('z', 2), 0.4, [0.0, 0.0], 'BULL')


def test_emit_signal_clips_long_only():
    agent = AgentPolicy(id='a', w=[5.0, 0.0], tau=0.5)
    features = frame([[1.0, 0.0], [-1.0, 0.0]])
    regimes = pd.Series(['BULL', 'BEAR'], index=features.index)
    signal = emit_signal(agent, features, regimes, SignalBounds())
    assert signal.iloc[0] == pytest.approx(np.tanh(10.0))
    assert signal.iloc[1] == 0.0


def test_emit_signal_symmetric_bounds():
    agent = AgentPolicy(id='a', w=[5.0, 0.0], tau=0.5)
    features = frame([[-1.0, 0.0]])
    regimes = pd.Series(['BEAR'], index=features.index)
    signal = emit_signal(agent, features, regimes, SignalBounds(long_only=False, s_min=-1.0))
    assert signal.iloc[0] == pytest.approx(-np.tanh(10.0))


def test_raw_signal_matches_scalar_path():
    head = RiskHead(w_r=[0.3, -0.2], b_r=0.1, c_r={'BULL': 0.2})
    agent = AgentPolicy(id='a', w=[0.7, 0.1], b=-0.05, c={'BULL': 0.1}, tau=0.4, risk_head=head)
    features = frame([[0.5, -1.0], [1.5, 2.0]])
    regimes = pd.Series(['BULL', 'SIDEWAYS'], index=features.index)
    vector = raw_signal(agent, features, regimes)
    for i in range(2):
        x, z = features.iloc[i].to_numpy(), regimes.iloc[i]
        expected = apply_risk_head(agent, float(base_signal(base_score(agent, x, z), agent.tau)), x, z)
        assert vector.iloc[i] == pytest.approx(expected, rel=1e-12)


def test_raw_signal_requires_aligned_regimes():
    agent = AgentPolicy(id='a', w=[1.0, 1.0])
    features = frame([[0.0, 0.0], [1.0, 1.0]])
    with pytest.raises(ContractError):
        raw_signal(agent, features, pd.Series(['BULL'], index=features.index[:1]))


def test_policy_rejects_non_finite_parameters():
    with pytest.raises(ContractError):
        AgentPolicy(id='a', w=[np.nan, 0.0])
    with pytest.raises(ContractError):
        AgentPolicy(id='a', w=[0.0], tau=0.0)


def test_init_population_ids_and_ranges(rng):
    population = init_population(6, 3, rng, PolicyInit(weight_range=0.2))
    assert [a.id for a in population] == [f"init-{k}" for k in range(6)]
    assert all(np.abs(a.w).max() <= 0.2 for a in population)
    assert all(a.risk_head is not None for a in population)


def test_with_params_keeps_original():
    agent = AgentPolicy(id='a', w=[1.0, 2.0])
    other = agent.with_params(id='b', b=1.0)
    assert agent.b == 0.0 and other.b == 1.0
    assert other.same_params(agent.with_params(b=1.0))
