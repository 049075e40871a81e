'''SM-NLMS and NLMS coefficient recursions as pure steps over explicit state.

All arithmetic is float64. The set-membership recursion is

    w(k+1) = w(k) + (mu_bar(k) / alpha(k)) e(k) x(k) f(e(k), gamma_bar)

with ``mu_bar = 1 - gamma_bar / |e|``, ``alpha = ||x||^2 + delta`` and ``f``
the indicator of ``|e| > gamma_bar``. The error bound is written nu_bar in
the set definitions and gamma_bar in the recursion; both are ``gamma_bar`` here.
'''

from typing import NamedTuple, TYPE_CHECKING

if TYPE_CHECKING:
    from typing import Self

import logging
import math

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, NonFiniteError, SpecError


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FilterConfig:
    gamma_bar: float
    delta: float
    taps: int

    def __post_init__(self) -> None:
        if not 0 <= self.gamma_bar < math.inf:
            raise SpecError(f'gamma_bar must be finite and >= 0, got {self.gamma_bar}')
        if not 0 < self.delta < math.inf:
            raise SpecError(f'delta must be finite and > 0, got {self.delta}')
        if self.taps < 1:
            raise SpecError(f'taps must be >= 1, got {self.taps}')


class FilterState(NamedTuple):
    w: np.ndarray

    @classmethod
    def zeros(cls, taps: int) -> 'Self':
        return cls(np.zeros(taps))

    @property
    def taps(self) -> int:
        return len(self.w)


class StepRecord(NamedTuple):
    k: int
    x: np.ndarray
    d: float
    e: float
    mu_bar: float
    f: int
    alpha: float
    updated: bool
    w: np.ndarray  # pre-update
    w_next: np.ndarray


def regressor(state: FilterState, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != state.w.shape:
        raise DimensionError(f'regressor of shape {x.shape}, expected {state.w.shape}')
    return x


def error(state: FilterState, x, d: float) -> float:
    x = regressor(state, x)
    return float(d - state.w @ x)


def mu_bar(e: float, gamma_bar: float) -> float:
    # e == 0 never reaches an update (f = 0 there, even with gamma_bar = 0)
    if e == 0:
        return 0.0
    return 1.0 - gamma_bar / abs(e)


def indicator(e: float, gamma_bar: float) -> int:
    return int(abs(e) > gamma_bar)


def alpha(x, delta: float) -> float:
    if not 0 < delta < math.inf:
        raise SpecError(f'delta must be finite and > 0, got {delta}')
    x = np.asarray(x, dtype=np.float64)
    return float(x @ x + delta)


def _finite(x: np.ndarray, d: float, k: int) -> None:
    if not (math.isfinite(d) and np.isfinite(x).all()):
        raise NonFiniteError(f'non-finite sample at iteration {k}')


def sm_nlms_step(state: FilterState, x, d: float, config: FilterConfig, k: int) -> tuple[FilterState, StepRecord]:
    x = regressor(state, x)
    _finite(x, d, k)

    e = error(state, x, d)
    f = indicator(e, config.gamma_bar)
    a = alpha(x, config.delta)

    if not f:  # inside the constraint set, keep w(k) as is
        return state, StepRecord(k, x, d, e, 0.0, 0, a, False, state.w, state.w)

    mu = mu_bar(e, config.gamma_bar)
    w_next = state.w + (mu / a) * e * x
    return FilterState(w_next), StepRecord(k, x, d, e, mu, 1, a, True, state.w, w_next)


def nlms_step(state: FilterState, x, d: float, step: float, delta: float, k: int) -> tuple[FilterState, StepRecord]:
    if not 0 < step < math.inf:
        raise SpecError(f'NLMS step must be finite and > 0, got {step}')
    x = regressor(state, x)
    _finite(x, d, k)

    e = error(state, x, d)
    a = alpha(x, delta)

    w_next = state.w + (step / a) * e * x
    return FilterState(w_next), StepRecord(k, x, d, e, step, 1, a, True, state.w, w_next)
