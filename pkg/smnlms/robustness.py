'''Local and global l2-robustness audits of the SM-NLMS recursion.

For every step with deviation ``w_tilde = w0 - w`` and noiseless error
``e_tilde = w_tilde . x`` the two sides

    g1 = ||w_tilde(k+1)||^2 + (mu_bar f / alpha) e_tilde^2
    g2 = ||w_tilde(k)||^2   + (mu_bar f / alpha) n^2

satisfy ``g1 = g2 + c1 c2`` with ``c1 = (mu_bar f / alpha)(e_tilde + n)^2``
and ``c2 = (mu_bar f / alpha) ||x||^2 - 1``. Without an update both sides are
equal; with one, ``c1 > 0`` and ``c2 < 0`` so ``g1 < g2``. Summed over a run
the deviation terms telescope into the global ratio, which stays below one.

Audits never raise on a failed bound: failures are returned as ``Violation``
diagnostics so a harness can report where and by how much.
'''

from typing import NamedTuple, Optional, Sequence, Iterable

import logging
import math

import numpy as np

from .errors import DimensionError, ContextMismatch, RecordsError
from .filters import StepRecord


logger = logging.getLogger(__name__)


IDENTITY_RTOL = 1e-9
CONTEXT_ATOL = 1e-12
TELESCOPE_TOL = 1e-9


class TruthContext(NamedTuple):
    w0: np.ndarray
    noise: np.ndarray  # n(k), indexed by iteration


class Violation(NamedTuple):
    k: Optional[int]  # None for whole-run checks
    check: str
    margin: float

    def __str__(self) -> str:
        where = 'run' if self.k is None else f'k={self.k}'
        return f'{where}: {self.check} (margin {self.margin:.3e})'


class RobustnessRecord(NamedTuple):
    k: int
    w_tilde_sq_pre: float
    w_tilde_sq_post: float
    e_tilde: float
    n: float
    g1: float
    g2: float
    c1: float
    c2: float
    f: int
    gain: float  # mu_bar f / alpha
    xsq: float
    violations: tuple[Violation, ...] = ()

    @property
    def margin(self) -> float:
        return -self.c1 * self.c2


class GlobalReport(NamedTuple):
    K: int
    update_count: int
    numerator: float
    denominator: float
    ratio: Optional[float]  # None when the denominator vanishes
    initial: float
    final: float
    telescoping: float
    margin: float = 0.0  # sum of -c1 c2 over updates, denominator - numerator
    violations: tuple[Violation, ...] = ()

    @property
    def undefined(self) -> bool:
        return self.ratio is None

    @property
    def update_fraction(self) -> float:
        return self.update_count / self.K if self.K else 0.0


def _pair(a: np.ndarray, b: np.ndarray, what: str) -> None:
    if np.shape(a) != np.shape(b):
        raise DimensionError(f'{what}: shapes {np.shape(a)} and {np.shape(b)} differ')


def deviation(w0, w) -> np.ndarray:
    w0, w = np.asarray(w0, dtype=np.float64), np.asarray(w, dtype=np.float64)
    _pair(w0, w, 'deviation')
    return w0 - w


def decompose_error(w_tilde, x, n: float) -> tuple[float, float]:
    w_tilde, x = np.asarray(w_tilde, dtype=np.float64), np.asarray(x, dtype=np.float64)
    _pair(w_tilde, x, 'error decomposition')
    e_tilde = float(w_tilde @ x)
    return e_tilde, e_tilde + n


def audit_step(ctx: TruthContext, rec: StepRecord, bounded: bool = True) -> RobustnessRecord:
    '''Audit one recorded step against the true system and noise.

    With ``bounded`` unset (baseline algorithms) only the algebraic identity
    and the error decomposition are checked.
    '''
    n = float(ctx.noise[rec.k])
    _pair(ctx.w0, rec.x, 'context')
    if abs(rec.d - (ctx.w0 @ rec.x + n)) > CONTEXT_ATOL:
        raise ContextMismatch(f'd({rec.k}) = {rec.d!r} is not w0.x + n within {CONTEXT_ATOL}')

    pre, post = deviation(ctx.w0, rec.w), deviation(ctx.w0, rec.w_next)
    e_tilde, e = decompose_error(pre, rec.x, n)
    pre_sq, post_sq = float(pre @ pre), float(post @ post)
    xsq = float(rec.x @ rec.x)

    gain = rec.mu_bar * rec.f / rec.alpha
    g1 = post_sq + gain * (e_tilde * e_tilde)
    g2 = pre_sq + gain * (n * n)
    c1 = gain * ((e_tilde + n) * (e_tilde + n))
    c2 = gain * xsq - 1.0

    violations: list[Violation] = []

    def check(ok: bool, name: str, margin: float):
        if not ok:
            logger.warning(f'violation at k={rec.k}: {name} (margin {margin:.3e})')
            violations.append(Violation(rec.k, name, margin))

    slack = CONTEXT_ATOL * max(1.0, abs(rec.d))
    check(abs(e - rec.e) <= slack, 'error decomposition', slack - abs(e - rec.e))

    residual = abs(g1 - (g2 + c1 * c2))
    tol = IDENTITY_RTOL * max(1.0, g2)
    check(residual <= tol, 'proof identity', tol - residual)

    if bounded and not rec.f:
        check(post_sq == pre_sq and g1 == g2, 'no-update equality', g2 - g1)
    elif bounded:
        check(c1 > 0, 'c1 > 0', c1)
        check(c2 < 0, 'c2 < 0', -c2)
        check(0 <= xsq / rec.alpha < 1, 'normalized input power < 1', 1 - xsq / rec.alpha)

    return RobustnessRecord(rec.k, pre_sq, post_sq, e_tilde, n, g1, g2, c1, c2,
                            rec.f, gain, xsq, tuple(violations))


def global_report(records: Sequence[RobustnessRecord], w_tilde_sq_0: float, bounded: bool = True) -> GlobalReport:
    for i, r in enumerate(records):
        if r.k != i:
            raise RecordsError(f'records must cover k = 0..K-1 in order: position {i} holds k={r.k}')

    K = len(records)
    final = records[-1].w_tilde_sq_post if records else w_tilde_sq_0
    updates = [r for r in records if r.f]

    numerator = final + math.fsum(r.gain * (r.e_tilde * r.e_tilde) for r in updates)
    denominator = w_tilde_sq_0 + math.fsum(r.gain * (r.n * r.n) for r in updates)
    ratio = numerator / denominator if denominator > 0 else None
    margin = math.fsum(r.margin for r in updates)

    steps = math.fsum(r.w_tilde_sq_post - r.w_tilde_sq_pre for r in records)
    telescoping = abs(steps - (final - w_tilde_sq_0))

    violations = [v for r in records for v in r.violations]

    def check(ok: bool, name: str, margin: float):
        if not ok:
            logger.warning(f'violation over the run: {name} (margin {margin:.3e})')
            violations.append(Violation(None, name, margin))

    check(telescoping <= TELESCOPE_TOL * max(1, K), 'telescoping', TELESCOPE_TOL * max(1, K) - telescoping)

    if bounded:
        if ratio is not None:
            # strictness comes from the margin, the ratio itself may round to one
            ok = (ratio <= 1 and margin > 0) if updates else ratio == 1
            check(ok, 'global ratio < 1', min(margin, 1 - ratio) if updates else 1 - ratio)
        slack = TELESCOPE_TOL * max(1.0, denominator)
        check(final <= denominator + slack, 'bounded deviation', denominator + slack - final)

    return GlobalReport(K, len(updates), numerator, denominator, ratio,
                        w_tilde_sq_0, final, telescoping, margin, tuple(violations))


def in_constraint_set(w, x, d: float, gamma_bar: float) -> bool:
    w, x = np.asarray(w, dtype=np.float64), np.asarray(x, dtype=np.float64)
    _pair(w, x, 'constraint set')
    return bool(abs(d - w @ x) <= gamma_bar)


def in_membership_set(w, history: Iterable[tuple[np.ndarray, float]], gamma_bar: float) -> bool:
    '''Membership in the intersection of the constraint sets of ``history``.

    Evaluated pair by pair against the stored data; an empty history is the
    whole coefficient space.
    '''
    return all(in_constraint_set(w, x, d, gamma_bar) for x, d in history)
