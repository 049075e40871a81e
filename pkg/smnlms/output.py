'''Per-iteration CSV traces and key:value run summaries.

Floats are written with 17 significant digits so both files round-trip
exactly; the trace alone is enough to re-verify the bound externally.
'''

from typing import NamedTuple, Optional, Iterable, Any

import csv
import logging
import math

from pathlib import Path

import yaml

from .sysid import RunResult


logger = logging.getLogger(__name__)


COLUMNS = ('k', 'e', 'mu_bar', 'f', 'alpha', 'updated', 'e_tilde', 'n',
           'w_tilde_sq_pre', 'w_tilde_sq_post', 'g1', 'g2', 'c1', 'c2')

UNDEFINED = 'undefined'


class OutputPaths(NamedTuple):
    trace: Optional[Path]  # None when tracing is off
    summary: Path

    def for_seed(self, seed: int) -> 'OutputPaths':
        '''Distinct trace per ensemble member: ``trace.csv`` -> ``trace-<seed>.csv``.'''
        if self.trace is None:
            return self
        return self._replace(trace=self.trace.with_stem(f'{self.trace.stem}-{seed}'))


def real(value: float) -> str:
    return format(value, '.17g')


def rows(result: RunResult) -> Iterable[tuple]:
    yield COLUMNS
    for s, a in zip(result.steps, result.audits):
        yield (s.k, real(s.e), real(s.mu_bar), s.f, real(s.alpha), int(s.updated),
               real(a.e_tilde), real(a.n), real(a.w_tilde_sq_pre), real(a.w_tilde_sq_post),
               real(a.g1), real(a.g2), real(a.c1), real(a.c2))


def emit_trace(result: RunResult, path: Path):
    with path.open('w', encoding='utf-8', newline='') as file:
        logger.info(f'saving: {file.name}')
        csv.writer(file, lineterminator='\n').writerows(rows(result))


class SummaryDumper(yaml.SafeDumper):
    pass


def _represent_real(dumper: yaml.SafeDumper, value: float) -> yaml.ScalarNode:
    if math.isnan(value):
        text = '.nan'
    elif math.isinf(value):
        text = '.inf' if value > 0 else '-.inf'
    else:
        text = real(value)
        # YAML 1.1 only resolves floats with a dot in the mantissa
        if '.' not in text:
            mantissa, e, exponent = text.partition('e')
            text = f'{mantissa}.0{e}{exponent}'
    return dumper.represent_scalar('tag:yaml.org,2002:float', text)


SummaryDumper.add_representer(float, _represent_real)
SummaryDumper.add_multi_representer(float, _represent_real)  # numpy floats


def summary(result: RunResult) -> dict[str, Any]:
    cfg, report = result.config, result.report

    tau: float | str = cfg.tau
    if cfg.gamma_bar is not None:
        tau = cfg.gamma_bar**2 / cfg.noise_variance if cfg.noise_variance > 0 else UNDEFINED

    def defined(value: Optional[float]) -> float | str:
        return UNDEFINED if value is None else value

    return {
        'algorithm': str(cfg.algorithm),
        'input': cfg.input,
        'seed': cfg.seed,
        'taps': cfg.taps,
        'noise_var': float(cfg.noise_variance),
        'tau': tau if isinstance(tau, str) else float(tau),
        'gamma_bar': float(cfg.bound),
        'delta': float(cfg.delta),
        'K': report.K,
        'update_count': report.update_count,
        'update_fraction': float(report.update_fraction),
        'numerator': report.numerator,
        'denominator': report.denominator,
        'ratio': defined(report.ratio),
        'violations': len(report.violations),
        'final_misalignment': defined(result.misalignment),
    }


def emit_summary(result: RunResult | list[RunResult], path: Path):
    '''Write one flat key:value block per run (YAML documents, ``---`` between runs).'''
    results = result if isinstance(result, list) else [result]
    with path.open('w', encoding='utf-8', newline='') as file:
        logger.info(f'saving: {file.name}')
        yaml.dump_all((summary(r) for r in results), file, Dumper=SummaryDumper,
                      sort_keys=False, allow_unicode=True)
