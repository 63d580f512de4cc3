"""
Wick pairing for centered Gaussian moments

A moment is expanded into a list of (count, pairs) terms, where pairs is a
sorted tuple of index pairs; contract_terms evaluates the expansion against a
covariance entry function, vectorized over any leading batch shape.
"""

from collections import Counter
from functools import lru_cache
from itertools import permutations
from typing import Callable, Iterator, List, Sequence, Tuple

import numpy as np

Pair = Tuple[int, int]
WickTerm = Tuple[int, Tuple[Pair, ...]]


def perfect_matchings(items: Sequence[int]) -> Iterator[List[Pair]]:
    """All perfect matchings of a list (positions distinct, labels may repeat)"""
    if not items:
        yield []
        return
    if len(items) % 2:
        return
    first, rest = items[0], list(items[1:])
    for idx, partner in enumerate(rest):
        remaining = rest[:idx] + rest[idx + 1:]
        for matching in perfect_matchings(remaining):
            yield [(first, partner)] + matching


def _expand(exponents: Sequence[int]) -> List[int]:
    return [index for index, power in enumerate(exponents) for _ in range(power)]


@lru_cache(maxsize=None)
def real_moment_terms(exponents: Tuple[int, ...]) -> Tuple[WickTerm, ...]:
    """Hafnian expansion of E[prod x_a^e_a] for a real centered Gaussian"""
    items = _expand(exponents)
    if len(items) % 2:
        return ()
    counts: Counter = Counter()
    for matching in perfect_matchings(items):
        counts[tuple(sorted(tuple(sorted(pair)) for pair in matching))] += 1
    return tuple(sorted((count, pairs) for pairs, count in counts.items()))


@lru_cache(maxsize=None)
def complex_moment_terms(
    w_exponents: Tuple[int, ...], wbar_exponents: Tuple[int, ...]
) -> Tuple[WickTerm, ...]:
    """
    Expansion of E[prod w_a^e_a prod wbar_b^f_b] for a circular complex Gaussian

    Only w-wbar pairings contribute, so terms are bijections; each pair (a, b)
    stands for E[w_a wbar_b].
    """
    ws = _expand(w_exponents)
    wbars = _expand(wbar_exponents)
    if len(ws) != len(wbars):
        return ()
    counts: Counter = Counter()
    for image in permutations(wbars):
        counts[tuple(sorted(zip(ws, image)))] += 1
    return tuple(sorted((count, pairs) for pairs, count in counts.items()))


def contract_terms(
    terms: Sequence[WickTerm], entry: Callable[[int, int], np.ndarray]
) -> np.ndarray:
    """Sum of count * prod entry(a, b) over the expansion"""
    total = 0.0
    cache = {}
    for count, pairs in terms:
        product = 1.0
        for pair in pairs:
            if pair not in cache:
                cache[pair] = entry(*pair)
            product = product * cache[pair]
        total = total + count * product
    return total
