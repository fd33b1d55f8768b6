"""Agent scoring (utility, violation, diversity, fitness) and evolution."""
import logging
import math

import numpy as np

from evonash.models.policy import RiskHead
from evonash.stats import beta, cvar, downside_deviation, max_drawdown, sharpe

# Set up logging
logger = logging.getLogger(__name__)


def _pnl_array(pnl):
    return np.asarray(getattr(pnl, 'pnl', pnl), dtype=float)


def constraint_violation(pnl, bench, w):
    """Shortfall of excess CVaR and worst excess day below their floors"""
    excess = _pnl_array(pnl) - np.asarray(bench, dtype=float)
    return (max(0.0, w.cvar_floor - cvar(excess, w.alpha_cvar))
            + max(0.0, w.worst_floor - float(excess.min())))


def strategy_utility(pnl, bench, w):
    """
    Risk-constrained excess utility U_k.

    Args:
        pnl (PnLSeries or array-like): Daily strategy returns
        bench (array-like): Daily benchmark returns
        w (UtilityWeights): Term weights and floors

    Returns:
        float
    """
    p = _pnl_array(pnl)
    b = np.asarray(bench, dtype=float)
    excess = p - b
    return (sharpe(p)
            + w.lambda_ex * sharpe(excess)
            - w.lambda_down * downside_deviation(p)
            - w.lambda_dd * abs(max_drawdown(p))
            - w.lambda_cvar * abs(min(0.0, cvar(excess, w.alpha_cvar)))
            - w.lambda_worst * abs(min(0.0, float(excess.min())))
            - w.lambda_con * constraint_violation(p, b, w))


def signal_correlations(signals):
    """|corr| matrix; flat signals correlate 0 with everything"""
    S = np.column_stack([np.asarray(s, dtype=float) for s in signals])
    centered = S - S.mean(axis=0)
    norms = np.sqrt((centered ** 2).sum(axis=0))
    live = norms > 1e-12
    corr = np.zeros((S.shape[1], S.shape[1]))
    if live.any():
        unit = centered[:, live] / norms[live]
        corr[np.ix_(live, live)] = np.clip(np.abs(unit.T @ unit), 0.0, 1.0)
    return corr


def diversity_score(signals, k, corr=None):
    """D_k = 1 - mean_{j != k} |corr(s_k, s_j)|; ``corr`` reuses a precomputed |corr| matrix"""
    K = len(signals)
    if K < 2:
        return 1.0
    if corr is None:
        corr = signal_correlations(signals)
    off = corr[k].sum() - corr[k, k]
    return float(np.clip(1.0 - off / (K - 1), 0.0, 1.0))


def diversity_scores(signals):
    corr = signal_correlations(signals) if len(signals) >= 2 else None
    return np.array([diversity_score(signals, k, corr) for k in range(len(signals))])


def agent_betas(pnls, bench):
    return np.array([beta(_pnl_array(p), bench) for p in pnls])


def league_advantage(pnls, ensemble_pnl):
    """L_k: mean daily PnL of agent k minus that of the ensemble signal"""
    base = float(np.mean(_pnl_array(ensemble_pnl)))
    return np.array([float(np.mean(_pnl_array(p))) - base for p in pnls])


def fitness(A, m, U, D, L, betas, w):
    """F_k = (A m)_k + U_k + l_div D_k + l_league L_k - l_beta |beta_k - beta*|"""
    A = np.asarray(getattr(A, 'A', A), dtype=float)
    m = np.asarray(getattr(m, 'm', m), dtype=float)
    return (A @ m + np.asarray(U, dtype=float)
            + w.lambda_div * np.asarray(D, dtype=float)
            + w.lambda_league * np.asarray(L, dtype=float)
            - w.lambda_beta * np.abs(np.asarray(betas, dtype=float) - w.beta_target))


def elite_count(K, elite_fraction):
    return min(K, max(1, math.ceil(elite_fraction * K - 1e-9)))


def rank_by_fitness(F):
    """Indices from best to worst; ties keep the lower index first"""
    return np.argsort(-np.asarray(F, dtype=float), kind='stable')


def mutate_policy(agent, new_id, scale, rng, tau_floor=1e-3):
    """Gaussian perturbation of every trainable parameter"""
    dim = agent.dim
    w = agent.w + rng.normal(0.0, scale, dim)
    b = agent.b + rng.normal(0.0, scale)
    c = {k: v + rng.normal(0.0, scale) for k, v in agent.c.items()}
    tau = max(tau_floor, agent.tau + rng.normal(0.0, scale))
    head = agent.risk_head
    if head is not None:
        head = RiskHead(w_r=head.w_r + rng.normal(0.0, scale, dim),
                        b_r=head.b_r + rng.normal(0.0, scale),
                        c_r={k: v + rng.normal(0.0, scale) for k, v in head.c_r.items()},
                        ell_min=head.ell_min, ell_max=head.ell_max)
    return agent.with_params(id=new_id, w=w, b=b, c=c, tau=tau, risk_head=head)


def evolve_step(population, F, cfg, rng, tag='g'):
    """
    Elite retention with mutated offspring.

    The top ceil(elite_fraction * K) agents keep their slots unchanged; every
    other slot receives a mutated copy of an elite, assigned round-robin in
    rank order.

    Args:
        population (list): AgentPolicy objects
        F (array-like): Fitness per agent
        cfg (EvolutionConfig): Elite fraction and mutation scale
        rng (np.random.Generator): Source of mutation noise
        tag (str): Prefix for offspring identifiers

    Returns:
        list: New population of the same size
    """
    K = len(population)
    order = rank_by_fitness(F)
    n_elite = elite_count(K, cfg.elite_fraction)
    elites = [int(i) for i in order[:n_elite]]
    elite_set = set(elites)

    new_population = list(population)
    child = 0
    for slot in range(K):
        if slot in elite_set:
            continue
        parent = population[elites[child % n_elite]]
        new_population[slot] = mutate_policy(parent, f"{tag}-{slot}", cfg.mutation_scale, rng,
                                             tau_floor=cfg.tau_floor)
        child += 1
    logger.debug(f"Evolved population: kept {n_elite} elites, {child} offspring")
    return new_population


def inject_br(population, br_agent, F, elite_fraction=0.25):
    """Replace the lowest-fitness non-elite agent (ties: higher index) with ``br_agent``"""
    K = len(population)
    F = np.asarray(F, dtype=float)
    n_elite = elite_count(K, elite_fraction)
    elites = set(int(i) for i in rank_by_fitness(F)[:n_elite])
    candidates = [k for k in range(K) if k not in elites] or list(range(K))
    worst = min(candidates, key=lambda k: (F[k], -k))
    new_population = list(population)
    new_population[worst] = br_agent
    logger.debug(f"Injected best response {br_agent.id} into slot {worst}")
    return new_population
