"""Counter-based random streams derived from a single master seed.

A seed token is either a non-negative int (the master seed) or a tuple
``(master, k1, k2, ...)``. The trailing keys form a spawn path: every
distinct path yields an independent Philox stream, so the number of
replicates can grow without re-correlating the streams already in use.

    make_rng((7, 3, 12))  ==  Philox keyed by SeedSequence(7, spawn_key=(3, 12))
"""

import typing

import numpy as np

from shotmax.errors import DomainError

SeedToken = typing.Union[int, typing.Tuple[int, ...]]

# Stream labels used by the samplers when they split a token.
STREAM_WALK = 0
STREAM_NOISE = 1
STREAM_FBM = 2
STREAM_POINTS = 3
STREAM_LIMIT = 4


def normalize_seed(seed: SeedToken) -> typing.Tuple[int, ...]:
    if isinstance(seed, (int, np.integer)):
        token: typing.Tuple[int, ...] = (int(seed),)
    elif isinstance(seed, (tuple, list)) and len(seed) > 0:
        token = tuple(int(part) for part in seed)
    else:
        raise DomainError(
            f"Seed format is incorrect: expected int or non-empty tuple, got {seed!r}"
        )

    if any(part < 0 for part in token):
        raise DomainError(
            f"Seed is incorrect: expected non-negative parts, got {token}"
        )
    if token[0] >= 2**64:
        raise DomainError(
            f"Seed is incorrect: master seed must fit in 64 bits, got {token[0]}"
        )
    return token


def sub_seed(seed: SeedToken, *keys: int) -> typing.Tuple[int, ...]:
    """Extend the spawn path of ``seed`` with ``keys``."""
    return normalize_seed(seed) + tuple(int(k) for k in keys)


def make_rng(seed: SeedToken) -> np.random.Generator:
    token = normalize_seed(seed)
    sequence = np.random.SeedSequence(token[0], spawn_key=token[1:])
    return np.random.Generator(np.random.Philox(sequence))


def chunk_sizes(total: int, chunk_size: int) -> list[int]:
    """Split ``total`` replicates into fixed-size chunks (last one shorter)."""
    if total < 0:
        raise DomainError(f"Replicate count is incorrect: got {total}")
    full, rest = divmod(total, chunk_size)
    sizes = [chunk_size] * full
    if rest:
        sizes.append(rest)
    return sizes
