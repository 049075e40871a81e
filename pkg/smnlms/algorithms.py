from typing import ClassVar

from dataclasses import dataclass

from .errors import SpecError


@dataclass(frozen=True)
class Algorithm:
    name: str

    SUPPORTS: ClassVar[list[str]] = [
        'sm-nlms',
        'nlms',
    ]

    ALIAS: ClassVar[dict[str, str]] = {
        'smnlms': 'sm-nlms',
        'sm_nlms': 'sm-nlms',
        'set-membership': 'sm-nlms',
        'normalized': 'nlms',
    }

    # algorithms whose l2 bound is proven, hence audited
    BOUNDED: ClassVar[set[str]] = {
        'sm-nlms',
    }

    def __init__(self, name: str) -> None:
        if not self.supports(name):
            raise SpecError(f'unknown algorithm: {name!r}')
        object.__setattr__(self, 'name', self._canonical(name))

    @classmethod
    def supports(cls, name: str) -> bool:
        return cls._canonical(name) in cls.SUPPORTS

    @classmethod
    def _canonical(cls, name: str) -> str:
        name = name.lower()
        return cls.ALIAS.get(name, name)

    def bounded(self) -> bool:
        return self.name in self.BOUNDED

    def __str__(self) -> str:
        return self.name


SM_NLMS, NLMS = Algorithm('sm-nlms'), Algorithm('nlms')
