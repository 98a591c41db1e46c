"""Slice-sampling marginalization of GP hyperparameters.

The chain runs on u = [log lengthscales..., log amplitude, log noise_var] and
targets the log marginal likelihood plus a normal log prior on u. Coordinates
are updated one at a time in random order with stepping out and shrinkage.
"""
from __future__ import annotations

import logging
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import GPFitError, McmcError
from .gp import GPEnsemble, gp_fit, gp_fit_arrays, log_marginal_likelihood, targets_for
from .kernels import KernelKind, KernelSpec
from .models.config_model import HyperPriors, McmcConfig, PriorSpec
from .models.observation import Observation

logger = logging.getLogger(__name__)

Draw = Tuple[KernelSpec, float]


def _check_prior(name: str, prior: PriorSpec) -> Tuple[float, float]:
    lo, hi = prior.bounds
    if not (np.isfinite(prior.mean) and np.isfinite(prior.std) and prior.std > 0):
        raise McmcError(f"사전분포 '{name}'가 유효하지 않습니다: {prior}", prior=name)
    if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
        raise McmcError(f"사전분포 '{name}'의 지지 구간이 비어 있습니다: [{lo}, {hi}]", prior=name)
    return lo, hi


def _prior_arrays(priors: HyperPriors, dim: int):
    specs = [priors.lengthscale] * dim + [priors.amplitude, priors.noise]
    names = ['lengthscale'] * dim + ['amplitude', 'noise']
    bounds = np.array([_check_prior(n, p) for n, p in zip(names, specs)])
    means = np.array([p.mean for p in specs])
    stds = np.array([p.std for p in specs])
    return means, stds, bounds[:, 0], bounds[:, 1]


def slice_sample(x: np.ndarray, log_density: Callable[[np.ndarray], float],
                 rng: np.random.Generator, widths: np.ndarray, lower: np.ndarray,
                 upper: np.ndarray, last_logp: Optional[float] = None,
                 max_steps_out: int = 20, max_shrink: int = 200) -> Tuple[np.ndarray, float]:
    """One sweep of univariate slice sampling over all coordinates."""
    x = np.array(x, dtype=float, copy=True)
    logp = log_density(x) if last_logp is None else last_logp
    if not np.isfinite(logp):
        raise McmcError("슬라이스 샘플러 시작점의 밀도가 유한하지 않습니다")

    for d in rng.permutation(x.shape[0]):
        log_y = logp + np.log(rng.uniform())
        r = rng.uniform()
        left, right = x.copy(), x.copy()
        left[d] = max(x[d] - r * widths[d], lower[d])
        right[d] = min(x[d] + (1.0 - r) * widths[d], upper[d])

        steps = 0
        while left[d] > lower[d] and steps < max_steps_out and log_density(left) > log_y:
            left[d] = max(left[d] - widths[d], lower[d])
            steps += 1
        steps = 0
        while right[d] < upper[d] and steps < max_steps_out and log_density(right) > log_y:
            right[d] = min(right[d] + widths[d], upper[d])
            steps += 1

        for _ in range(max_shrink):
            proposal = x.copy()
            proposal[d] = rng.uniform(left[d], right[d])
            lp = log_density(proposal)
            if lp > log_y:
                x, logp = proposal, lp
                break
            if proposal[d] > x[d]:
                right[d] = proposal[d]
            else:
                left[d] = proposal[d]
        else:
            raise McmcError("슬라이스 샘플러 축소 단계가 수렴하지 않았습니다", dim=int(d))

    return x, logp


def _unpack(u: np.ndarray, kind: KernelKind, template: KernelSpec) -> Draw:
    dim = template.dim
    spec = KernelSpec(tuple(np.exp(u[:dim])), float(np.exp(u[dim])), template.task_exponent, kind)
    return spec, float(np.exp(u[dim + 1]))


def sample_hyperparams_mcmc(data: Sequence[Observation], kind: KernelKind,
                            priors: HyperPriors, n_samples: int,
                            rng: np.random.Generator, burn_in: int = 50, thin: int = 3,
                            initial: Optional[np.ndarray] = None, standardize: bool = True,
                            return_state: bool = False):
    """Draw ``n_samples`` (KernelSpec, noise_var) pairs from the hyperparameter posterior."""
    if not data:
        raise McmcError("관측 데이터가 비어 있습니다")
    if n_samples < 1:
        raise McmcError(f"n_samples는 1 이상이어야 합니다: {n_samples}")
    if burn_in < 0 or thin < 1:
        raise McmcError(f"burn_in >= 0, thin >= 1 이어야 합니다: {burn_in}, {thin}")

    X = np.vstack([o.x.array for o in data])
    T = np.array([o.t for o in data], dtype=float)
    y = targets_for(data, kind)
    dim = X.shape[1]
    template = KernelSpec.default(kind, dim)
    means, stds, lower, upper = _prior_arrays(priors, dim)

    def log_density(u: np.ndarray) -> float:
        if np.any(u < lower) or np.any(u > upper):
            return -np.inf
        spec, noise = _unpack(u, kind, template)
        try:
            model = gp_fit_arrays(X, T, y, spec, noise, standardize=standardize)
        except GPFitError:
            return -np.inf
        log_prior = -0.5 * np.sum(((u - means) / stds) ** 2)
        return log_marginal_likelihood(model) + log_prior

    u = np.clip(means if initial is None else np.asarray(initial, dtype=float), lower, upper)
    logp = log_density(u)
    if not np.isfinite(logp):
        u = np.clip(means, lower, upper)
        logp = log_density(u)
        if not np.isfinite(logp):
            raise GPFitError("사전분포 평균에서도 GP 적합에 실패했습니다")

    widths = np.ones_like(u)
    draws: List[Draw] = []
    total = burn_in + thin * n_samples
    for sweep in range(total):
        u, logp = slice_sample(u, log_density, rng, widths, lower, upper, last_logp=logp)
        if sweep >= burn_in and (sweep - burn_in + 1) % thin == 0:
            draws.append(_unpack(u, kind, template))

    logger.debug(f"MCMC 완료: kind={kind.value}, draws={len(draws)}, logp={logp:.3f}")
    if return_state:
        return draws, u
    return draws


def fit_ensemble(data: Sequence[Observation], kind: KernelKind, cfg: McmcConfig,
                 rng: np.random.Generator, initial: Optional[np.ndarray] = None
                 ) -> Tuple[GPEnsemble, np.ndarray]:
    """MCMC 표본마다 GP를 적합해 앙상블 구성 (체인 최종 상태 함께 반환)"""
    burn_in = cfg.burn_in if initial is None else cfg.warm_burn_in
    draws, state = sample_hyperparams_mcmc(
        data, kind, cfg.priors, cfg.n_samples, rng,
        burn_in=burn_in, thin=cfg.thin, initial=initial, return_state=True)
    members = tuple(gp_fit(data, spec, noise, standardize=True) for spec, noise in draws)
    return GPEnsemble(members), state
