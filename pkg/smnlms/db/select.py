from typing import Iterable, NamedTuple, Optional

from peewee import fn

from .model import Scenario, Run, Audit


class Totals(NamedTuple):
    scenario: Scenario
    runs: int
    update_fraction: float
    worst_ratio: Optional[float]
    violations: int


def totals() -> Iterable[Totals]:
    '''Per stored scenario: run count, mean update fraction, worst ratio, violations.'''
    return (Totals(s, s.runs, s.fraction, s.worst, s.violated) for s in (
        Scenario.select(
            Scenario,
            fn.COUNT(Run.id).alias('runs'),
            fn.AVG(Run.update_count * 1.0 / Run.iterations).alias('fraction'),
            fn.MAX(Run.ratio).alias('worst'),
            fn.SUM(Run.violations).alias('violated'),
        )
        .join(Run)
        .group_by(Scenario.id).order_by(Scenario.id)
    ))


def first_violations(scenario: Scenario) -> Iterable[tuple[int, int]]:
    '''Seed and first violating iteration of every run of ``scenario`` that failed a step check.'''
    return ((int(r.seed), r.first) for r in (
        Run.select(Run.seed, fn.MIN(Audit.k).alias('first'))
        .join(Audit)
        .where((Run.scenario == scenario) & (Audit.violations > 0))
        .group_by(Run.id).order_by(Run.id)
    ))
