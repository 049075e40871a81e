from typing import ClassVar

import logging
import math

from dataclasses import dataclass

import numpy as np

from .errors import SpecError


logger = logging.getLogger(__name__)


SEED_MAX = 2**64 - 1

# stream tags, one independent stream per signal of the scenario
SYSTEM, INPUT, NOISE = 1, 2, 3


@dataclass(frozen=True)
class NoiseSpec:
    variance: float

    def __post_init__(self) -> None:
        if not 0 <= self.variance < math.inf:  # also rejects nan
            raise SpecError(f'noise variance must be finite and >= 0, got {self.variance}')


class SeededSource:
    '''Position-addressable random stream keyed by a seed and a stream tag.

    The bits come from a Philox-4x64 counter-based generator keyed with
    ``tag << 64 | seed``. Sample ``p`` of the stream is a function of the
    64-bit words ``2p`` and ``2p + 1`` only, whatever the sample kind:

    - BPSK takes the sign from the top bit of the first word;
    - Gaussian samples use the Box-Muller cosine branch with
      ``u1 = (hi53(w1) + 1) * 2**-53`` in (0, 1] and
      ``u2 = hi53(w2) * 2**-53`` in [0, 1).

    So replaying a (seed, tag, position) triple reproduces the value bit by
    bit, and streams with different tags never share words.
    '''

    WORDS: ClassVar[int] = 2
    BLOCK: ClassVar[int] = 4  # words per Philox counter step

    def __init__(self, seed: int, tag: int = 0, position: int = 0) -> None:
        if not 0 <= seed <= SEED_MAX:
            raise SpecError(f'seed must be a 64-bit unsigned integer, got {seed}')
        if not 0 <= tag <= SEED_MAX:
            raise SpecError(f'invalid stream tag: {tag}')
        self.seed, self.tag = seed, tag
        self.seek(position)

    def seek(self, position: int) -> None:
        if position < 0:
            raise SpecError(f'negative stream position: {position}')
        words = self.WORDS * position
        # the counter addresses blocks of four words, only the remainder is drawn
        self._bits = np.random.Philox(key=self.tag << 64 | self.seed, counter=words // self.BLOCK)
        if words % self.BLOCK:
            self._bits.random_raw(words % self.BLOCK)  # discard
        self.position = position

    def derive(self, tag: int) -> 'SeededSource':
        return SeededSource(self.seed, tag)

    def _words(self, n: int) -> np.ndarray:
        words = self._bits.random_raw(self.WORDS * n).reshape(n, self.WORDS)
        self.position += n
        return words

    def bpsk(self, n: int) -> np.ndarray:
        words = self._words(n)
        return np.where(words[:, 0] >> 63, 1.0, -1.0)

    def normal(self, n: int) -> np.ndarray:
        words = self._words(n) >> 11
        u1 = (words[:, 0] + 1.0) * 2.0**-53
        u2 = words[:, 1] * 2.0**-53
        return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)

    def gaussian(self, spec: NoiseSpec, n: int) -> np.ndarray:
        z = self.normal(n)  # the stream advances even for a degenerate spec
        if spec.variance == 0:
            return np.zeros(n)
        return math.sqrt(spec.variance) * z

    def __repr__(self) -> str:
        return f'SeededSource(seed={self.seed}, tag={self.tag}, position={self.position})'


def bpsk_sample(src: SeededSource) -> float:
    return float(src.bpsk(1)[0])


def gaussian_sample(src: SeededSource, spec: NoiseSpec) -> float:
    return float(src.gaussian(spec, 1)[0])
