"""Population dynamics for the quenched free energy.

A pool of ``M`` log partition functions stands in for the iid family at one
level. The next level is built entry by entry from ``s`` parents drawn
uniformly with replacement. Randomness comes from ``hierpin.rng``, so each
entry is a pure function of ``(seed, level, index)`` and the thread count
never changes the result.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import rng
from .annealed import annealed_partial
from .errors import BracketError, DomainError
from .model import initial_weights, map_sum_array, sum_children

CHUNK = 1 << 16
BISECTION_STEPS = 30


@dataclass(frozen=True)
class Population:
    params: object
    law: object
    seed: int
    level: int
    pool: np.ndarray = field(repr=False)

    @property
    def pool_size(self):
        return len(self.pool)


@dataclass(frozen=True)
class FreeEnergyEstimate:
    mean: float
    std_err: float
    level: int
    pool_size: int
    beta: float
    h: float


def _chunks(m):
    return [(lo, min(lo + CHUNK, m)) for lo in range(0, m, CHUNK)]


def _run_chunks(fn, m, workers):
    chunks = _chunks(m)
    if workers <= 1 or len(chunks) == 1:
        return np.concatenate([fn(lo, hi) for lo, hi in chunks])
    with ThreadPoolExecutor(max_workers=workers) as ex:
        parts = list(ex.map(lambda c: fn(*c), chunks))
    return np.concatenate(parts)


def init_population(params, law, m, seed, workers=1):
    if m < 2:
        raise DomainError(f"pool size must be >= 2, got {m}")

    def fill(lo, hi):
        return initial_weights(law, params, seed, lo, hi - lo)

    return Population(params, law, seed, 0, _run_chunks(fill, m, workers))


def population_step(pop, workers=1):
    """Build the next level; entry ``i`` combines ``s`` parents drawn from
    stream coordinates ``(seed, level + 1, i)``."""
    s, b = pop.params.s, pop.params.b
    m = pop.pool_size
    level = pop.level + 1
    old = pop.pool

    def build(lo, hi):
        words = rng.raw_words(pop.seed, rng.PARENTS, level, lo * s, (hi - lo) * s)
        parents = rng.to_index(words, m).reshape(hi - lo, s)
        return map_sum_array(sum_children([old[parents[:, j]] for j in range(s)]), b)

    return replace(pop, level=level, pool=_run_chunks(build, m, workers))


def estimate_from_pool(pop):
    s_n = float(pop.params.s) ** pop.level
    pool = pop.pool
    if np.all(pool == pool[0]):
        mean, std = float(pool[0]), 0.0
    else:
        mean, std = float(np.mean(pool)), float(np.std(pool, ddof=1))
    m = pop.pool_size
    return FreeEnergyEstimate(
        mean / s_n, std / (math.sqrt(m) * s_n), pop.level, m, pop.params.beta, pop.params.h
    )


def evolve(params, law, m, n_levels, seed, workers=1):
    pop = init_population(params, law, m, seed, workers)
    for _ in range(n_levels):
        pop = population_step(pop, workers)
    return pop


def quenched_free_energy(params, law, m, n_levels, seed, workers=1):
    """Pool estimate of ``F_N(beta, h) = E[log R_N] / s**N``."""
    if n_levels < 1:
        raise DomainError(f"n_levels must be >= 1, got {n_levels}")
    return estimate_from_pool(evolve(params, law, m, n_levels, seed, workers))


def replica_seed(seed, replica):
    return int(np.random.SeedSequence([seed, replica]).generate_state(1, np.uint64)[0])


def replicated_free_energy(params, law, m, n_levels, seed, replicas, workers=1):
    """Average of independent pool runs, with the between-run standard error.

    The pool standard error of a single run ignores the correlation that
    resampling builds between entries and understates the Monte Carlo error
    by orders of magnitude; the replica spread does not.
    """
    if replicas < 2:
        raise DomainError(f"need at least 2 replicas, got {replicas}")
    means = np.array(
        [
            quenched_free_energy(params, law, m, n_levels, replica_seed(seed, r), workers).mean
            for r in range(replicas)
        ]
    )
    return FreeEnergyEstimate(
        float(means.mean()),
        float(means.std(ddof=1) / math.sqrt(replicas)),
        n_levels,
        m,
        params.beta,
        params.h,
    )


def critical_point_scan(
    params, law, m, n_levels, seed, h_lo, h_hi, f_threshold, workers=1, steps=BISECTION_STEPS
):
    """Bisect on ``h`` for ``estimate > f_threshold + 3 std_err``.

    Returns the final midpoint: an upper estimate of the finite-size
    pseudo-critical point, not ``h_c`` itself.
    """
    if not h_lo < h_hi:
        raise DomainError(f"need h_lo < h_hi, got {h_lo}, {h_hi}")
    if not f_threshold > 0:
        raise DomainError(f"f_threshold must be positive, got {f_threshold}")

    def localized(h):
        est = quenched_free_energy(params.with_h(h), law, m, n_levels, seed, workers)
        return est.mean > f_threshold + 3.0 * est.std_err

    if localized(h_lo):
        raise BracketError(f"predicate already true at h_lo={h_lo}")
    if not localized(h_hi):
        raise BracketError(f"predicate still false at h_hi={h_hi}")
    lo, hi = h_lo, h_hi
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        if localized(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def annealed_reference(params, n_levels):
    """Annealed ``F_N`` at the same ``(b, s, h)``; ``E[R_0] = e**h`` for every law."""
    return annealed_partial(params, n_levels)
