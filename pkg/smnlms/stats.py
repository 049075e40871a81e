from typing import Iterable

import math

from statistics import mean, median, stdev


def stats(name: str, data: Iterable[float], units: str = '') -> str:
    vs = list(data)  # materialize values
    if not vs:
        return f'{name}\n- n =\t0'
    spread = stdev(vs) if len(vs) > 1 else 0.0
    return '\n- '.join([
        name,
        f'n =\t{len(vs)}',
        f'min\t{min(vs):.6g} {units}'.rstrip(),
        f'med\t{median(vs):.6g} {units}'.rstrip(),
        f'mean\t{mean(vs):.6g}±{spread:.2g} {units}'.rstrip(),
        f'max\t{max(vs):.6g} {units}'.rstrip(),
    ])


def decibels(ratio: float) -> float:
    return 10 * math.log10(ratio) if ratio > 0 else -math.inf
