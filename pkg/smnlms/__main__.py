#!/usr/bin/env python3

from typing import Optional, Callable, Sequence, Any

import logging
import math
import sys

from argparse import ArgumentParser, ArgumentTypeError
from pathlib import Path

import yaml

from peewee import DatabaseError

from . import logger, report, tracer
from .algorithms import Algorithm
from .db import prepare, select
from .db.model import Scenario, Run
from .errors import Error, StepError
from .output import OutputPaths, UNDEFINED, emit_trace, emit_summary, summary
from .signals import SEED_MAX
from .stats import stats, decibels
from .sysid import ScenarioConfig, RunResult, INPUTS, ensemble


# exit codes, usage errors exit with 2 through argparse
OK, VIOLATION, IO = 0, 1, 3

# scenario field names accepted in --config files
ALIAS = {
    'noise_variance': 'noise_var',
}


class Args:
    config: Optional[Path]
    algorithm: Algorithm
    taps: int
    noise_var: float
    delta: float
    tau: float
    gamma_bar: Optional[float]
    iterations: int
    seed: int
    nlms_step: float
    input: str
    ensemble: int
    jobs: int
    trace: Path
    summary: Path
    no_trace: bool
    db: Optional[Path]
    fresh: bool
    log: Optional[Path]


def number(kind: Callable[[str], Any], low=None, high=None, strict=False) -> Callable[[str], Any]:
    def parse(text: str):
        try:
            value = kind(text)
        except ValueError:
            raise ArgumentTypeError(f'invalid {kind.__name__} value: {text!r}')
        if isinstance(value, float) and not math.isfinite(value):
            raise ArgumentTypeError(f'must be finite, got {text!r}')
        if low is not None and (value <= low if strict else value < low):
            raise ArgumentTypeError(f'must be {">" if strict else ">="} {low}, got {text!r}')
        if high is not None and value > high:
            raise ArgumentTypeError(f'must be <= {high}, got {text!r}')
        return value
    parse.__name__ = kind.__name__
    return parse


def algorithm(text: str) -> Algorithm:
    if not Algorithm.supports(text):
        raise ArgumentTypeError(f'choose from {", ".join(Algorithm.SUPPORTS)}, got {text!r}')
    return Algorithm(text)


def add_args(parser: ArgumentParser):
    defaults = ScenarioConfig()
    parser.add_argument('--algorithm', type=algorithm, default=str(defaults.algorithm),
                        help='sm-nlms (default) or the nlms baseline')
    parser.add_argument('--taps', type=number(int, 1), default=defaults.taps)
    parser.add_argument('--noise-var', type=number(float, 0), default=defaults.noise_variance)
    parser.add_argument('--delta', type=number(float, 0, strict=True), default=defaults.delta)
    parser.add_argument('--tau', type=number(float, 0), default=defaults.tau,
                        help='error bound gamma_bar = sqrt(tau * noise_var); 0 is the stress mode')
    parser.add_argument('--gamma-bar', type=number(float, 0), default=None,
                        help='explicit error bound, overrides --tau')
    parser.add_argument('--iterations', type=number(int, 1), default=defaults.iterations)
    parser.add_argument('--seed', type=number(int, 0, SEED_MAX), default=defaults.seed)
    parser.add_argument('--nlms-step', type=number(float, 0, strict=True), default=defaults.nlms_step)
    parser.add_argument('--input', choices=INPUTS, default=defaults.input)
    parser.add_argument('--ensemble', type=number(int, 1), default=1,
                        help='independent runs with seeds seed..seed+R-1')
    parser.add_argument('--jobs', type=number(int, 1), default=1)
    parser.add_argument('--trace', type=Path, default=Path('trace.csv'))
    parser.add_argument('--summary', type=Path, default=Path('summary.txt'))
    parser.add_argument('--no-trace', action='store_true')
    parser.add_argument('--db', type=Path, default=None, help='record runs in a sqlite store')
    parser.add_argument('--fresh', action='store_true', help='truncate the store first')
    parser.add_argument('--log', type=Path, default=None, help='debug log file')


def load_config(path: Path, parser: ArgumentParser) -> dict[str, Any]:
    '''Parser defaults from a YAML mapping of scenario fields.'''
    try:
        with path.open() as file:
            data = yaml.safe_load(file) or {}
    except (OSError, yaml.YAMLError) as err:
        parser.error(f'argument --config: {err}')

    if not isinstance(data, dict):
        parser.error(f'argument --config: expected a mapping in {path}')

    known = {a.dest for a in parser._actions}
    defaults = {}
    for key, value in data.items():
        dest = str(key).replace('-', '_')
        dest = ALIAS.get(dest, dest)
        if dest not in known or dest in ('config', 'help'):
            parser.error(f'argument --config: unknown key {key!r}')
        # strings go through the argument type, like command-line values
        defaults[dest] = str(value) if isinstance(value, (int, float)) and not isinstance(value, bool) else value
    return defaults


def parse_args(argv: Optional[Sequence[str]] = None) -> tuple[ScenarioConfig, OutputPaths, Args]:
    pre = ArgumentParser(add_help=False)
    pre.add_argument('--config', type=Path, default=None, help='YAML scenario file')
    known, _ = pre.parse_known_args(argv)

    parser = ArgumentParser(prog='smnlms', parents=[pre],
                            description='SM-NLMS system identification with l2-robustness audits.')
    add_args(parser)
    if known.config:
        parser.set_defaults(**load_config(known.config, parser))

    args = parser.parse_args(argv, namespace=Args())

    config = ScenarioConfig(
        taps=args.taps,
        noise_variance=args.noise_var,
        delta=args.delta,
        tau=args.tau,
        iterations=args.iterations,
        seed=args.seed,
        algorithm=args.algorithm,
        nlms_step=args.nlms_step,
        input=args.input,
        gamma_bar=args.gamma_bar,
    )
    try:
        config.validate()
    except Error as err:
        parser.error(str(err))

    paths = OutputPaths(None if args.no_trace else args.trace, args.summary)
    return config, paths, args


def describe(result: RunResult):
    s = summary(result)
    report(
        f'run: seed {s["seed"]} ({s["algorithm"]}, {s["input"]})',
        f'gamma_bar\t{s["gamma_bar"]:.6g}',
        f'updates\t{s["update_count"]}/{s["K"]} ({100 * s["update_fraction"]:.2f}%)',
        f'ratio\t{s["ratio"] if s["ratio"] == UNDEFINED else format(s["ratio"], ".17g")}',
        f'violations\t{s["violations"]}',
    )
    for v in result.violations[:10]:
        logger.error(f'seed {s["seed"]}: {v}')


def store(path: Path, fresh: bool, results: list[RunResult]):
    prepare(path, truncate=fresh)
    for result in results:
        Run.collect(Scenario.from_config(result.config), result)

    for t in select.totals():
        report(
            f'store: scenario #{t.scenario.id}',
            f'{t.runs:5} runs',
            f'{100 * t.update_fraction:5.2f}% mean updates',
            f'worst ratio {t.worst_ratio}',
            f'{t.violations:5} violations',
        )
        for seed, k in select.first_violations(t.scenario):
            logger.error(f'store: seed {seed} first violation at k={k}')


def main(argv: Optional[Sequence[str]] = None) -> int:
    config, paths, args = parse_args(argv)

    handlers: list[logging.Handler] = [console := logging.StreamHandler()]
    try:
        if args.log:
            handlers.append(tracer(args.log))
    except OSError as err:
        logger.error(f'log file: {err}')
        return IO
    logging.basicConfig(level=logging.DEBUG, handlers=handlers)

    # disable detailed logging in the terminal
    console.setLevel(logging.INFO)

    try:
        results = ensemble(config, args.ensemble, args.jobs)
    except StepError as err:
        logger.error(f'run aborted: {err}')
        return VIOLATION

    for result in results:
        describe(result)

    if len(results) > 1:
        report(stats('ratio', (r.report.ratio for r in results if r.report.ratio is not None)))
        report(stats('update fraction', (r.report.update_fraction for r in results)))
        report(stats('final misalignment', (decibels(r.misalignment) for r in results
                                            if r.misalignment), 'dB'))

    try:
        if paths.trace is not None:
            for result in results:
                target = paths if len(results) == 1 else paths.for_seed(result.config.seed)
                emit_trace(result, target.trace)  # type: ignore
        emit_summary(results, paths.summary)
        if args.db:
            store(args.db, args.fresh, results)
    except (OSError, DatabaseError) as err:
        logger.error(f'output failed: {err}')
        return IO

    violations = sum(len(r.violations) for r in results)
    return VIOLATION if violations else OK


if __name__ == '__main__':
    sys.exit(main())
