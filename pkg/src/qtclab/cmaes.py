"""Covariance Matrix Adaptation Evolution Strategy (minimization).

Self-contained rank-mu CMA-ES with cumulative step-size adaptation and the
standard positive recombination weights and learning rates (population
4 + floor(3 ln N), log-linear weights, CSA damping). The ask/tell pair is a
strictly sequential state machine; `optimize` wraps it in a generation loop
for black-box losses. Everything is deterministic given the seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence

import numpy as np

_COND_FLOOR = 1e-14  # minimum allowed min/max covariance eigenvalue ratio


@dataclass(frozen=True)
class CmaState:
    """Full optimizer state between generations."""

    dimension: int
    mean: np.ndarray
    sigma: float
    covariance: np.ndarray
    p_sigma: np.ndarray
    p_c: np.ndarray
    generation: int
    lam: int
    mu: int
    weights: np.ndarray
    mu_eff: float
    c_sigma: float
    d_sigma: float
    c_c: float
    c_1: float
    c_mu: float
    chi_n: float
    best_params: Optional[np.ndarray] = None
    best_fitness: float = math.inf
    nonfinite_evals: int = 0
    rejected_generations: int = 0
    seed: Optional[int] = None


def _conditioned(cov: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Symmetrize and floor the eigenvalues; returns (cov, eigvals, eigvecs)."""
    cov = 0.5 * (cov + cov.T)
    eigvals, eigvecs = np.linalg.eigh(cov)
    floor = max(eigvals.max(), 0.0) * _COND_FLOOR
    if floor <= 0 or eigvals.min() < floor:
        eigvals = np.clip(eigvals, max(floor, np.finfo(float).tiny), None)
        cov = (eigvecs * eigvals) @ eigvecs.T
        cov = 0.5 * (cov + cov.T)
    return cov, eigvals, eigvecs


def cma_init(x0: Sequence[float], sigma0: float, seed: Optional[int] = None) -> CmaState:
    """Fresh state: mean x0, identity covariance, standard strategy constants."""
    if sigma0 <= 0:
        raise ValueError("sigma0 must be > 0")
    mean = np.asarray(x0, dtype=float).copy()
    n = mean.shape[0]
    if n < 1:
        raise ValueError("x0 must be nonempty")
    lam = 4 + int(3 * math.log(n))
    mu = lam // 2
    raw = np.array([math.log((lam + 1) / 2) - math.log(i + 1) for i in range(mu)])
    weights = raw / raw.sum()
    mu_eff = float(weights.sum() ** 2 / np.sum(weights**2))
    c_sigma = (mu_eff + 2) / (n + mu_eff + 5)
    d_sigma = 1 + 2 * max(0.0, math.sqrt((mu_eff - 1) / (n + 1)) - 1) + c_sigma
    c_c = (4 + mu_eff / n) / (n + 4 + 2 * mu_eff / n)
    c_1 = 2 / ((n + 1.3) ** 2 + mu_eff)
    c_mu = min(1 - c_1, 2 * (mu_eff - 2 + 1 / mu_eff) / ((n + 2) ** 2 + mu_eff))
    chi_n = math.sqrt(n) * (1 - 1 / (4 * n) + 1 / (21 * n**2))
    return CmaState(
        dimension=n, mean=mean, sigma=float(sigma0), covariance=np.eye(n),
        p_sigma=np.zeros(n), p_c=np.zeros(n), generation=0, lam=lam, mu=mu,
        weights=weights, mu_eff=mu_eff, c_sigma=c_sigma, d_sigma=d_sigma,
        c_c=c_c, c_1=c_1, c_mu=c_mu, chi_n=chi_n, seed=seed)


def ask(state: CmaState, rng: np.random.Generator) -> np.ndarray:
    """Sample lambda candidates mean + sigma * C^(1/2) z; shape (lam, dim)."""
    _, eigvals, eigvecs = _conditioned(state.covariance)
    z = rng.standard_normal((state.lam, state.dimension))
    spread = z @ (eigvecs * np.sqrt(eigvals)).T
    return state.mean[None, :] + state.sigma * spread


def tell(state: CmaState, candidates: np.ndarray, fitnesses) -> CmaState:
    """Standard recombination + path/covariance/step-size update.

    Candidates with non-finite fitness are dropped (counted); a generation
    with no finite fitness is rejected outright, leaving the search
    distribution unchanged.
    """
    candidates = np.asarray(candidates, dtype=float)
    fitnesses = np.asarray(fitnesses, dtype=float)
    if candidates.shape != (state.lam, state.dimension):
        raise ValueError(f"expected {(state.lam, state.dimension)} candidates")
    if fitnesses.shape != (state.lam,):
        raise ValueError(f"expected {state.lam} fitness values")

    finite = np.isfinite(fitnesses)
    n_dropped = int(np.sum(~finite))
    if not finite.any():
        return replace(state, generation=state.generation + 1,
                       nonfinite_evals=state.nonfinite_evals + n_dropped,
                       rejected_generations=state.rejected_generations + 1)
    candidates, fitnesses = candidates[finite], fitnesses[finite]

    order = np.argsort(fitnesses, kind="stable")
    candidates, fitnesses = candidates[order], fitnesses[order]
    best_params, best_fitness = state.best_params, state.best_fitness
    if fitnesses[0] < best_fitness:
        best_params, best_fitness = candidates[0].copy(), float(fitnesses[0])

    mu = min(state.mu, candidates.shape[0])
    weights = state.weights[:mu] / state.weights[:mu].sum()
    n, old_mean, sigma = state.dimension, state.mean, state.sigma

    selected = candidates[:mu]
    mean = weights @ selected
    y_mean = (mean - old_mean) / sigma

    cov, eigvals, eigvecs = _conditioned(state.covariance)
    inv_sqrt = (eigvecs / np.sqrt(eigvals)) @ eigvecs.T
    p_sigma = ((1 - state.c_sigma) * state.p_sigma
               + math.sqrt(state.c_sigma * (2 - state.c_sigma) * state.mu_eff)
               * (inv_sqrt @ y_mean))
    norm_ps = float(np.linalg.norm(p_sigma))
    expected = math.sqrt(1 - (1 - state.c_sigma) ** (2 * (state.generation + 1)))
    h_sigma = norm_ps / expected / state.chi_n < 1.4 + 2 / (n + 1)

    p_c = ((1 - state.c_c) * state.p_c
           + h_sigma * math.sqrt(state.c_c * (2 - state.c_c) * state.mu_eff) * y_mean)

    y_sel = (selected - old_mean[None, :]) / sigma
    rank_mu = (y_sel.T * weights) @ y_sel
    deflate = (1 - h_sigma) * state.c_c * (2 - state.c_c)
    cov = ((1 - state.c_1 - state.c_mu) * cov
           + state.c_1 * (np.outer(p_c, p_c) + deflate * cov)
           + state.c_mu * rank_mu)
    cov, _, _ = _conditioned(cov)

    sigma_new = sigma * math.exp(min(
        1.0, (state.c_sigma / state.d_sigma) * (norm_ps / state.chi_n - 1)))

    return replace(
        state, mean=mean, sigma=float(sigma_new), covariance=cov,
        p_sigma=p_sigma, p_c=p_c, generation=state.generation + 1,
        best_params=best_params, best_fitness=best_fitness,
        nonfinite_evals=state.nonfinite_evals + n_dropped)


@dataclass
class OptimizeResult:
    """Best point found plus per-generation fitness traces."""

    best_params: np.ndarray
    best_fitness: float
    best_trace: np.ndarray  # best fitness within each generation
    mean_trace: np.ndarray  # mean finite fitness within each generation
    evaluations: int
    state: CmaState


def optimize(loss: Callable[[np.ndarray], float], x0: Sequence[float],
             sigma0: float, max_generations: int,
             seed: Optional[int] = None) -> OptimizeResult:
    """Run the ask/tell loop for a fixed number of generations."""
    if max_generations < 1:
        raise ValueError("max_generations must be >= 1")
    state = cma_init(x0, sigma0, seed)
    rng = np.random.default_rng(seed)
    best_trace = np.empty(max_generations)
    mean_trace = np.empty(max_generations)
    evaluations = 0
    for gen in range(max_generations):
        candidates = ask(state, rng)
        fits = np.array([float(loss(c)) for c in candidates])
        evaluations += state.lam
        finite = fits[np.isfinite(fits)]
        best_trace[gen] = float(finite.min()) if finite.size else math.nan
        mean_trace[gen] = float(finite.mean()) if finite.size else math.nan
        state = tell(state, candidates, fits)
    return OptimizeResult(
        best_params=state.best_params, best_fitness=state.best_fitness,
        best_trace=best_trace, mean_trace=mean_trace,
        evaluations=evaluations, state=state)
