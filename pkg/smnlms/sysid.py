'''System-identification scenario: unknown FIR system, BPSK excitation, Gaussian noise.'''

from typing import NamedTuple, Optional, TYPE_CHECKING

if TYPE_CHECKING:
    from typing import Self

import logging
import math

from concurrent.futures import ProcessPoolExecutor

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .algorithms import Algorithm, SM_NLMS
from .errors import Error, DimensionError, SpecError, StepError
from .filters import FilterConfig, FilterState, StepRecord, sm_nlms_step, nlms_step
from .robustness import (TruthContext, RobustnessRecord, GlobalReport, Violation,
                         audit_step, global_report, deviation)
from .signals import SeededSource, NoiseSpec, SEED_MAX, SYSTEM, INPUT, NOISE


logger = logging.getLogger(__name__)


INPUTS = ('delay-line', 'iid')


class ScenarioConfig(NamedTuple):
    taps: int = 10
    noise_variance: float = 0.01
    delta: float = 1e-12
    tau: float = 2.0
    iterations: int = 1000
    seed: int = 0
    algorithm: Algorithm = SM_NLMS
    nlms_step: float = 1.0
    input: str = 'delay-line'
    gamma_bar: Optional[float] = None  # overrides tau

    @property
    def bound(self) -> float:
        if self.gamma_bar is not None:
            return self.gamma_bar
        return math.sqrt(self.tau * self.noise_variance)

    def filter(self) -> FilterConfig:
        return FilterConfig(self.bound, self.delta, self.taps)

    def validate(self) -> 'Self':
        inf = math.inf
        problems = [
            (self.taps >= 1, f'taps must be >= 1, got {self.taps}'),
            (0 <= self.noise_variance < inf, f'noise variance must be finite and >= 0, got {self.noise_variance}'),
            (0 < self.delta < inf, f'delta must be finite and > 0, got {self.delta}'),
            (0 <= self.tau < inf, f'tau must be finite and >= 0, got {self.tau}'),
            (self.gamma_bar is None or 0 <= self.gamma_bar < inf,
             f'gamma_bar must be finite and >= 0, got {self.gamma_bar}'),
            (self.iterations >= 1, f'iterations must be >= 1, got {self.iterations}'),
            (0 <= self.seed <= SEED_MAX, f'seed must be a 64-bit unsigned integer, got {self.seed}'),
            (0 < self.nlms_step < inf, f'NLMS step must be finite and > 0, got {self.nlms_step}'),
            (self.input in INPUTS, f'input must be one of {", ".join(INPUTS)}, got {self.input!r}'),
        ]
        for ok, message in problems:
            if not ok:
                raise SpecError(message)
        return self


class RunResult(NamedTuple):
    config: ScenarioConfig
    steps: list[StepRecord]
    audits: list[RobustnessRecord]
    report: GlobalReport
    w0: np.ndarray
    final_w: np.ndarray

    @property
    def violations(self) -> tuple[Violation, ...]:
        return self.report.violations

    @property
    def misalignment(self) -> Optional[float]:
        power = float(self.w0 @ self.w0)
        return self.report.final / power if power > 0 else None


def draw_system(cfg: ScenarioConfig, src: SeededSource) -> np.ndarray:
    return src.gaussian(NoiseSpec(1.0), cfg.taps)


def reference_sample(w0, x, n: float) -> float:
    w0, x = np.asarray(w0, dtype=np.float64), np.asarray(x, dtype=np.float64)
    if w0.shape != x.shape:
        raise DimensionError(f'system of shape {w0.shape}, regressor of shape {x.shape}')
    return float(w0 @ x + n)


def regressors(cfg: ScenarioConfig, src: SeededSource) -> np.ndarray:
    '''All input vectors x(0..K-1), one per row, most recent sample first.'''
    if cfg.input == 'iid':
        return src.bpsk(cfg.iterations * cfg.taps).reshape(cfg.iterations, cfg.taps)

    # zero-padded warm-up of the delay line
    line = np.concatenate([np.zeros(cfg.taps - 1), src.bpsk(cfg.iterations)])
    return sliding_window_view(line, cfg.taps)[:, ::-1]


def run(cfg: ScenarioConfig) -> RunResult:
    cfg.validate()
    system, inputs, noise = (SeededSource(cfg.seed, tag) for tag in (SYSTEM, INPUT, NOISE))

    w0 = draw_system(cfg, system)
    xs = regressors(cfg, inputs)
    ns = noise.gaussian(NoiseSpec(cfg.noise_variance), cfg.iterations)

    ctx = TruthContext(w0, ns)
    fc, bounded = cfg.filter(), cfg.algorithm.bounded()
    logger.debug(f'run: seed={cfg.seed} {cfg.algorithm} gamma_bar={fc.gamma_bar:.6g} K={cfg.iterations}')

    state = FilterState.zeros(cfg.taps)
    w_tilde = deviation(w0, state.w)

    steps: list[StepRecord] = []
    audits: list[RobustnessRecord] = []
    for k, x in enumerate(xs):
        d = reference_sample(w0, x, ns[k])
        try:
            match cfg.algorithm.name:
                case 'sm-nlms':
                    state, rec = sm_nlms_step(state, x, d, fc, k)
                case 'nlms':
                    state, rec = nlms_step(state, x, d, cfg.nlms_step, cfg.delta, k)
                case _:
                    raise NotImplementedError('algorithm not identified')
            audit = audit_step(ctx, rec, bounded)
        except Error as err:
            raise StepError(k, err) from err
        steps.append(rec)
        audits.append(audit)

    report = global_report(audits, float(w_tilde @ w_tilde), bounded)
    logger.debug(f'run: seed={cfg.seed} updates={report.update_count}/{report.K} ratio={report.ratio}')

    return RunResult(cfg, steps, audits, report, w0, state.w)


def ensemble(cfg: ScenarioConfig, runs: int = 1, jobs: int = 1) -> list[RunResult]:
    '''Independent runs with seeds ``seed + 0 .. seed + runs - 1``, in seed order.'''
    if runs < 1:
        raise SpecError(f'ensemble size must be >= 1, got {runs}')
    configs = [cfg._replace(seed=(cfg.seed + i) & SEED_MAX) for i in range(runs)]

    if jobs > 1 and runs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            return list(pool.map(run, configs))
    return [run(c) for c in configs]
