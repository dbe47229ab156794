"""Levy-flight steps via the Mantegna algorithm, and Brownian steps.

All samplers take an injected numpy ``Generator`` (anything with ``normal``
and ``uniform`` methods works), so streams are reproducible per seed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

_MAX_RESAMPLE = 8
# |v|**(1/beta) below this makes the ratio overflow to inf
_TINY = 1e-300


def sigma_mu(beta: float) -> float:
    """Mantegna scale of the numerator normal for stability index ``beta``."""
    if not 0 < beta <= 2:
        raise ValueError(f"beta must lie in (0, 2], got {beta}")
    # sin(pi*b/2) == sin(pi*(2-b)/2); the second form is exact at b == 2
    s = math.sin(math.pi * (2.0 - beta) / 2.0) if beta > 1 else math.sin(math.pi * beta / 2.0)
    num = math.gamma(1 + beta) * s
    den = math.gamma((1 + beta) / 2) * beta * 2 ** ((beta - 1) / 2)
    return (num / den) ** (1 / beta)


@dataclass(frozen=True)
class LevyParams:
    beta: float = 1.5
    sigma_v: float = 1.0
    sigma_mu: float = field(init=False)

    def __post_init__(self):
        if self.sigma_v != 1.0:
            raise ValueError("sigma_v is fixed at 1")
        object.__setattr__(self, "sigma_mu", sigma_mu(self.beta))


def levy_step(params: LevyParams, rng) -> float:
    mu = rng.normal(0.0, params.sigma_mu)
    for _ in range(_MAX_RESAMPLE):
        v = rng.normal(0.0, params.sigma_v)
        denom = abs(v) ** (1.0 / params.beta)
        if denom > _TINY:
            return float(mu / denom)
    raise FloatingPointError("|v| underflowed on every resample")


def levy_steps(params: LevyParams, rng, size) -> np.ndarray:
    """Vectorized :func:`levy_step`; draws all numerators, then all denominators."""
    mu = rng.normal(0.0, params.sigma_mu, size=size)
    v = rng.normal(0.0, params.sigma_v, size=size)
    denom = np.abs(v) ** (1.0 / params.beta)
    for _ in range(_MAX_RESAMPLE):
        bad = denom <= _TINY
        if not bad.any():
            break
        denom[bad] = np.abs(rng.normal(0.0, params.sigma_v, size=int(bad.sum()))) ** (1.0 / params.beta)
    else:
        raise FloatingPointError("|v| underflowed on every resample")
    return mu / denom


def brownian_step(v_min: float, v_max: float, rng) -> float:
    if not v_min < v_max:
        raise ValueError(f"need v_min < v_max, got [{v_min}, {v_max}]")
    return float(rng.uniform(v_min, v_max))


def init_velocity(params: LevyParams, v_min: float, v_max: float, rng) -> float:
    """Levy step if it beats a fresh Brownian draw, else the Brownian draw."""
    levy = levy_step(params, rng)
    brown = brownian_step(v_min, v_max, rng)
    return levy if levy > brown else brown


def init_velocities(params: LevyParams, v_min: float, v_max: float, rng, size) -> np.ndarray:
    if not v_min < v_max:
        raise ValueError(f"need v_min < v_max, got [{v_min}, {v_max}]")
    levy = levy_steps(params, rng, size)
    brown = rng.uniform(v_min, v_max, size=size)
    return np.where(levy > brown, levy, brown)
