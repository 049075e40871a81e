import math

import numpy as np
import pytest

from smnlms.algorithms import NLMS
from smnlms.errors import DimensionError, SpecError, StepError
from smnlms.signals import SeededSource, SYSTEM, INPUT
from smnlms.sysid import ScenarioConfig, draw_system, reference_sample, regressors, run, ensemble


@pytest.fixture(scope='module')
def figure():
    '''Default scenario for both bounds on the same realization.'''
    return {tau: run(ScenarioConfig(tau=tau, seed=42)) for tau in (2.0, 5.0)}


def test_draw_system_is_deterministic():
    cfg = ScenarioConfig()
    a, b = draw_system(cfg, SeededSource(7, SYSTEM)), draw_system(cfg, SeededSource(7, SYSTEM))
    assert a.shape == (10,)
    assert np.array_equal(a, b)


def test_draw_system_moments():
    w0 = draw_system(ScenarioConfig(taps=10**4), SeededSource(3, SYSTEM))
    assert abs(w0.var() - 1) < 0.1


@pytest.mark.parametrize('w0, x, n, expected', [
    ([1, 1], [1, -1], 0.0, 0.0),
    ([0.5], [2], 0.1, 1.1),
    ([0.3, 0.2], [0, 0], 0.0, 0.0),
])
def test_reference_sample(w0, x, n, expected):
    assert reference_sample(w0, x, n) == pytest.approx(expected)


def test_reference_sample_dimension():
    with pytest.raises(DimensionError):
        reference_sample([1, 2], [1], 0.0)


def test_delay_line_structure():
    cfg = ScenarioConfig(taps=4, iterations=20)
    xs = regressors(cfg, SeededSource(1, INPUT))
    s = SeededSource(1, INPUT).bpsk(20)

    assert xs.shape == (20, 4)
    assert np.array_equal(xs[0], [s[0], 0, 0, 0])
    assert np.array_equal(xs[5], s[5:1:-1])
    for k in range(1, 20):
        assert np.array_equal(xs[k][1:], xs[k - 1][:-1])


def test_iid_regressors():
    cfg = ScenarioConfig(taps=4, iterations=20, input='iid')
    xs = regressors(cfg, SeededSource(1, INPUT))
    assert xs.shape == (20, 4)
    assert set(np.unique(xs)) <= {-1.0, 1.0}
    assert not all(np.array_equal(xs[k][1:], xs[k - 1][:-1]) for k in range(1, 20))


def test_figure_traces(figure):
    for tau, result in figure.items():
        assert len(result.steps) == len(result.audits) == 1000
        assert result.violations == ()
        for s, a in zip(result.steps, result.audits):
            if s.f:
                assert a.g1 < a.g2
            else:
                assert a.g1 == a.g2
                assert a.w_tilde_sq_post == a.w_tilde_sq_pre
        assert result.report.ratio < 1


def test_proof_identity(figure):
    for result in figure.values():
        for s, a in zip(result.steps, result.audits):
            assert abs(a.g1 - a.g2 - a.c1 * a.c2) <= 1e-9 * max(1, a.g2)
            if s.f:
                assert a.c1 > 0 and a.c2 < 0
                assert 0 <= a.xsq / s.alpha < 1


def test_boundary_projection(figure):
    for tau, result in figure.items():
        gamma_bar = result.config.bound
        assert gamma_bar == pytest.approx(math.sqrt(tau * 0.01))
        for s in result.steps:
            if s.updated and s.x @ s.x >= 1:
                assert abs(s.d - s.w_next @ s.x) == pytest.approx(gamma_bar, rel=1e-6)


def test_data_selectivity(figure):
    strict, loose = figure[5.0], figure[2.0]
    assert np.array_equal(strict.w0, loose.w0)
    assert [s.d for s in strict.steps] == [s.d for s in loose.steps]

    # a larger bound admits less data
    assert strict.report.update_count < loose.report.update_count < 1000
    late = sum(s.f for s in strict.steps[200:])
    assert late / 800 < 0.5


def test_telescoping(figure):
    for result in figure.values():
        audits = result.audits
        steps = math.fsum(a.w_tilde_sq_post - a.w_tilde_sq_pre for a in audits)
        assert steps == pytest.approx(audits[-1].w_tilde_sq_post - audits[0].w_tilde_sq_pre,
                                      abs=1e-9 * len(audits))


def test_run_is_deterministic():
    cfg = ScenarioConfig(iterations=200, seed=9)
    a, b = run(cfg), run(cfg)
    assert np.array_equal(a.final_w, b.final_w)
    assert a.report == b.report


def test_reference_is_consistent():
    result = run(ScenarioConfig(iterations=100, seed=5))
    noise = [a.n for a in result.audits]
    for s, n in zip(result.steps, noise):
        assert s.d == reference_sample(result.w0, s.x, n)


def test_noise_free_run_never_grows():
    result = run(ScenarioConfig(noise_variance=0.0, tau=0.0, iterations=300, seed=3))
    for a in result.audits:
        assert a.w_tilde_sq_post <= a.w_tilde_sq_pre * (1 + 1e-12)
    assert result.report.final < result.report.initial
    assert result.violations == ()


def test_global_bound_across_seeds():
    for tau in (0.0, 2.0, 5.0, 50.0):
        for seed in range(100):
            result = run(ScenarioConfig(tau=tau, seed=seed, iterations=150))
            report = result.report
            assert report.violations == (), (tau, seed)
            if report.denominator > 0 and report.update_count:
                assert report.ratio < 1, (tau, seed)


@pytest.mark.parametrize('delta', [1e6, 1e20, 1e300])
def test_global_bound_with_huge_regularizer(delta):
    report = run(ScenarioConfig(delta=delta, iterations=1000, seed=0)).report
    assert report.update_count > 0
    # the quotient may round to one, the summed margin stays positive
    assert report.ratio <= 1 and report.margin > 0
    assert report.violations == ()


def test_never_diverges():
    result = run(ScenarioConfig(tau=0.0, iterations=10**5, seed=1))
    report = result.report
    assert np.isfinite(result.final_w).all()
    assert report.final <= report.denominator * (1 + 1e-9)
    assert report.violations == ()


def test_nlms_baseline():
    result = run(ScenarioConfig(algorithm=NLMS, nlms_step=0.5, iterations=300, seed=2))
    assert all(s.updated and s.f == 1 and s.mu_bar == 0.5 for s in result.steps)
    assert result.report.update_count == 300
    assert result.violations == ()


def test_iid_run():
    result = run(ScenarioConfig(input='iid', iterations=300, seed=2))
    assert result.violations == ()
    assert result.report.ratio < 1


@pytest.mark.parametrize('change', [
    dict(taps=0),
    dict(noise_variance=-1.0),
    dict(delta=0.0),
    dict(tau=-1.0),
    dict(iterations=0),
    dict(seed=-1),
    dict(nlms_step=0.0),
    dict(input='colored'),
    dict(gamma_bar=-0.1),
    dict(delta=math.inf),
    dict(noise_variance=math.inf),
    dict(tau=math.inf),
    dict(gamma_bar=math.inf),
    dict(nlms_step=math.inf),
])
def test_invalid_config(change):
    with pytest.raises(SpecError):
        run(ScenarioConfig(**change))


def test_gamma_bar_overrides_tau():
    cfg = ScenarioConfig(tau=5.0, gamma_bar=0.3)
    assert cfg.bound == 0.3
    assert cfg.filter().gamma_bar == 0.3


def test_step_errors_carry_iteration(monkeypatch):
    import smnlms.sysid as sysid

    def broken(w0, x, n):
        return math.nan if n == ns[3] else reference_sample(w0, x, n)

    cfg = ScenarioConfig(iterations=10, seed=4)
    ns = [a.n for a in run(cfg).audits]
    monkeypatch.setattr(sysid, 'reference_sample', broken)
    with pytest.raises(StepError) as err:
        run(cfg)
    assert err.value.k == 3


def test_ensemble_seeds():
    results = ensemble(ScenarioConfig(iterations=50, seed=10), runs=3)
    assert [r.config.seed for r in results] == [10, 11, 12]
    single = run(ScenarioConfig(iterations=50, seed=11))
    assert np.array_equal(results[1].final_w, single.final_w)


def test_ensemble_in_processes():
    serial = ensemble(ScenarioConfig(iterations=50, seed=0), runs=2)
    parallel = ensemble(ScenarioConfig(iterations=50, seed=0), runs=2, jobs=2)
    assert [r.report for r in serial] == [r.report for r in parallel]


def test_ensemble_size():
    with pytest.raises(SpecError):
        ensemble(ScenarioConfig(), runs=0)
