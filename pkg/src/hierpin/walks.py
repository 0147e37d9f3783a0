"""Wall-avoidance probabilities of the uniform walk on a diamond lattice."""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

EXACT_COUNT_MAX_LEVEL = 12


@dataclass(frozen=True)
class WalkTables:
    """``q[m]`` is the probability that the walk crosses an m-diamond
    without touching the wall."""

    s: int
    b: int
    q: np.ndarray
    log_q_prefix: np.ndarray  # log_q_prefix[m] = sum_{1 <= j < m} log q_j

    @property
    def n_max(self):
        return len(self.q) - 1

    def log_q(self, n):
        if not 1 <= n <= self.n_max:
            raise DomainError(f"log q_n needs 1 <= n <= {self.n_max}, got {n}")
        return math.log(self.q[n])


def build_q_table(s, n, b=None):
    """Iterate ``q_{m+1} = (q_m**s + b - 1) / b`` from ``q_0 = 0``; ``b`` defaults to ``s``."""
    b = s if b is None else b
    if s < 2 or b < 2:
        raise DomainError(f"need s >= 2 and b >= 2, got s={s}, b={b}")
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    q = np.empty(n + 1)
    q[0] = 0.0
    x = 0.0
    for m in range(n):
        x = (x**s + b - 1) / b
        q[m + 1] = x
    prefix = np.zeros(n + 2)
    if n >= 1:
        prefix[2:] = np.cumsum(np.log(q[1:]))
    return WalkTables(s, b, q, prefix)


def p_kn(tables, k, n):
    """``log prod_{j=k}^{n-1} q_j**(s-1)``.

    This is the bare product of escape factors. The probability that the walk
    actually crosses one designated k-subdiamond of an n-diamond while avoiding
    the wall elsewhere carries an extra ``b**-(n-k)`` for picking the wall
    branch at every level between ``n`` and ``k``; see
    ``lattice.enumerate_crossing_probability``.
    """
    if k > n:
        raise IndexError(f"p_kn needs k <= n, got k={k}, n={n}")
    if n > tables.n_max + 1 or k < 0:
        raise IndexError(f"table covers q_0..q_{tables.n_max}, requested k={k}, n={n}")
    if k == n:
        return 0.0
    if k == 0:
        raise DomainError("k = 0 gives log q_0 = -inf")
    return (tables.s - 1) * float(tables.log_q_prefix[n] - tables.log_q_prefix[k])


def path_count(b, s, n):
    """``(N_n, log N_n)`` with ``N_0 = 1``, ``N_{n+1} = b * N_n**s``.

    The exact integer is ``None`` beyond ``EXACT_COUNT_MAX_LEVEL``.
    """
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    log_count = math.log(b) * (s**n - 1) / (s - 1)
    if n > EXACT_COUNT_MAX_LEVEL:
        return None, log_count
    count = 1
    for _ in range(n):
        count = b * count**s
    return count, log_count
