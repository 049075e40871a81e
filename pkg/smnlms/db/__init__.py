'''Optional SQLite store of audited runs.'''

from typing import Iterable, Any, Optional, TYPE_CHECKING

if TYPE_CHECKING:
    from typing import Self

import logging

from pathlib import Path

from peewee import SqliteDatabase, Model, IntegrityError, chunked


logger = logging.getLogger(__name__)


db = SqliteDatabase(None)


class Base(Model):
    # Silence report type errors
    id: Any

    class Meta:
        database = db

    @classmethod
    def bulk_insert(cls, it: Iterable[tuple], fields=None):
        if fields is None:
            fields = cls._meta.sorted_field_names[1:]  # type: ignore

        # https://www.sqlite.org/limits.html#max_variable_number
        for chunk in chunked(it, 32766 // len(fields)):
            cls.insert_many(chunk, fields).execute()

    _created: bool

    @classmethod
    def ensure(cls, defaults: Optional[dict] = None, **key) -> 'Self':
        '''Row identified by ``key``, created with ``defaults`` unless stored already.'''
        try:
            with db.atomic():
                row = cls.create(**key, **(defaults or {}))
            row._created = True
        except IntegrityError:
            row = cls.get(**key)
            row._created = False
        return row


def tables() -> list[type[Base]]:
    '''Store tables, parents first.'''
    from .model import Scenario, Run, Audit
    return [Scenario, Run, Audit]


def prepare(database: Path, truncate=False):
    # https://docs.peewee-orm.com/en/latest/peewee/database.html#recommended-settings
    db.init(database, pragmas={
        'journal_mode': 'wal',
        'cache_size': -1 * 64000,  # 64MB
        'foreign_keys': 1,
        'ignore_check_constraints': 0,
        'synchronous': 0,
    })
    logger.debug(f'store: {database}')

    models = tables()
    db.create_tables(models)

    if truncate:
        for m in reversed(models):
            dropped = m.delete().execute()
            logger.info(f'store: dropped {dropped} {m.__name__.lower()} rows')
