# rts_eval/utils.py
from __future__ import annotations

import hashlib
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, List, Mapping, Optional, Tuple, TypeVar

import numpy as np

T = TypeVar("T")
R = TypeVar("R")

OrderKey = Tuple[int, int, int, str]


def push_order_key(push_epoch: int, tweet: str, creation: Optional[int]) -> OrderKey:
    """
    Deterministic push order: push epoch, then creation epoch when known
    (unknown sorts after known), then tweet id.
    """
    if creation is None:
        return (push_epoch, 1, 0, tweet)
    return (push_epoch, 0, creation, tweet)


def order_key(push, epochs: Mapping[str, int]) -> OrderKey:
    return push_order_key(push.push_epoch, push.tweet, epochs.get(push.tweet))


def stable_int(token: str) -> int:
    """32-bit integer derived from a token, identical on every platform."""
    digest = hashlib.sha1(token.encode("utf-8")).digest()
    return int.from_bytes(digest[:4], "big")


def rng_stream(seed: int, *keys: object) -> np.random.Generator:
    """
    PCG64 generator for one named stream. Non-negative ints are used as spawn
    keys directly; anything else goes through stable_int.
    """
    spawn_key = tuple(
        k if isinstance(k, int) and not isinstance(k, bool) and k >= 0 else stable_int(str(k))
        for k in keys
    )
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=spawn_key)))


def parallel_map(fn: Callable[[T], R], items: Iterable[T], jobs: int = 1) -> List[R]:
    """Order-preserving map; jobs <= 1 runs inline."""
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))
