from typing import Any, TYPE_CHECKING

if TYPE_CHECKING:
    from typing import Self

import logging

from peewee import ForeignKeyField, CharField, IntegerField, FloatField
from playhouse.sqlite_ext import JSONField

from ..algorithms import Algorithm
from ..sysid import ScenarioConfig, RunResult
from . import Base, db


logger = logging.getLogger(__name__)


class Scenario(Base):
    data: dict = JSONField(unique=True)  # type: ignore

    @classmethod
    def from_config(cls, cfg: ScenarioConfig) -> 'Self':
        data = cfg._replace(algorithm=str(cfg.algorithm))._asdict()
        del data['seed']  # runs of one scenario differ by seed only
        return cls.ensure(data=data)

    def config(self, seed: int) -> ScenarioConfig:
        data = dict(self.data, algorithm=Algorithm(self.data['algorithm']))
        return ScenarioConfig(seed=seed, **data)


class Run(Base):
    scenario: Scenario = ForeignKeyField(Scenario)  # type: ignore
    # 64-bit unsigned seeds overflow sqlite integers
    seed: str = CharField()  # type: ignore

    class Meta:  # type: ignore
        indexes = (('scenario', 'seed'), True),

    iterations: int = IntegerField()  # type: ignore
    update_count: int = IntegerField()  # type: ignore
    numerator: float = FloatField()  # type: ignore
    denominator: float = FloatField()  # type: ignore
    ratio: float | None = FloatField(null=True)  # type: ignore
    misalignment: float | None = FloatField(null=True)  # type: ignore
    violations: int = IntegerField()  # type: ignore

    # Silence report type errors
    scenario_id: Any

    @classmethod
    @db.atomic()
    def collect(cls, scenario: Scenario, result: RunResult) -> 'Self':
        report = result.report
        run = cls.ensure(dict(
            iterations=report.K,
            update_count=report.update_count,
            numerator=report.numerator,
            denominator=report.denominator,
            ratio=report.ratio,
            misalignment=result.misalignment,
            violations=len(report.violations),
        ), scenario=scenario, seed=str(result.config.seed))

        if run._created:
            Audit.bulk_insert((run, a.k, a.f, a.g1, a.g2, a.c1, a.c2, len(a.violations))
                              for a in result.audits)
        else:
            logger.debug(f'cached - scenario #{scenario.id} seed {result.config.seed}')
        return run


class Audit(Base):
    run: Run = ForeignKeyField(Run, on_delete='CASCADE')  # type: ignore

    # Silence report type errors
    run_id: Any

    k, f = IntegerField(), IntegerField()
    g1, g2 = FloatField(), FloatField()
    c1, c2 = FloatField(), FloatField()
    violations = IntegerField()
