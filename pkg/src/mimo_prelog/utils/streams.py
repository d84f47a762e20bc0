"""Deterministic per-task random streams derived from one master seed."""

import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Sequence, Tuple, TypeVar

import numpy as np

T_co = TypeVar("T_co")


def spawn_generators(seed: int, count: int) -> List[np.random.Generator]:
    """``count`` independent generators; stream i depends only on (seed, i)."""
    children = np.random.SeedSequence(seed).spawn(count)
    return [np.random.default_rng(child) for child in children]


def chunk_plan(samples: int, chunk_size: int) -> List[int]:
    """Split ``samples`` into consecutive chunk sizes (all full except the last)."""
    full, rest = divmod(samples, chunk_size)
    return [chunk_size] * full + ([rest] if rest else [])


def run_chunks(
    seed: int,
    sizes: Sequence[int],
    task: Callable[[np.random.Generator, int], T_co],
    max_workers: int = 1,
) -> List[T_co]:
    """Run ``task(rng_i, size_i)`` per chunk; results come back in chunk order."""
    generators = spawn_generators(seed, len(sizes))
    jobs: Iterable[Tuple[np.random.Generator, int]] = zip(generators, sizes)
    if max_workers <= 1 or len(sizes) <= 1:
        return [task(rng, size) for rng, size in jobs]
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        return list(pool.map(lambda job: task(*job), jobs))


def compensated_mean_and_stderr(values: np.ndarray) -> Tuple[float, float]:
    """Mean and standard error with exactly rounded (fsum) accumulation."""
    flat = np.asarray(values, dtype=np.float64).ravel()
    count = flat.size
    if count == 0:
        return math.nan, math.nan
    mean = math.fsum(flat) / count
    if count == 1:
        return mean, 0.0
    variance = math.fsum((flat - mean) ** 2) / (count - 1)
    return mean, math.sqrt(variance / count)
