"""Deterministic annealed recursion ``r' = (r**s + b - 1) / b`` and its free energy.

At ``beta = 0`` the model has no disorder and this recursion *is* the model,
so ``annealed_free_energy`` gives ``F(0, h)`` exactly (up to a certified,
astronomically small tail).
"""

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import BracketError, DomainError, NotConvergedError
from .model import ModelParams, _map_sum, sum_children

RHO_BIG = 50.0
DEFAULT_MAX_LEVELS = 10**6
A0_TOL = 1e-10


class Phase(enum.Enum):
    LOCALIZED = "localized"
    DELOCALIZED = "delocalized"


@dataclass(frozen=True)
class AnnealedState:
    level: int
    rho: float  # log r_n


@dataclass(frozen=True)
class FreeEnergyValue:
    """``value`` can underflow to 0.0 deep in the critical window even though
    the phase is localized; ``log_value`` stays finite there (``-inf`` only
    when delocalized)."""

    value: float
    levels_used: int
    converged: bool
    phase: Phase
    log_value: float = -math.inf
    tail_bound: float = 0.0


@dataclass(frozen=True)
class EpsilonSequence:
    s: int
    a: tuple

    def __len__(self):
        return len(self.a)

    def __getitem__(self, n):
        return self.a[n]


def annealed_step(state, params):
    """Advance ``log r_n`` by one level."""
    total = sum_children([state.rho] * params.s)
    return AnnealedState(state.level + 1, _map_sum(total, params.b))


def annealed_log_r(params, k):
    """``log r_k`` with ``r_0 = e**h``."""
    if k < 0:
        raise DomainError(f"k must be >= 0, got {k}")
    state = AnnealedState(0, float(params.h))
    for _ in range(k):
        state = annealed_step(state, params)
    return state.rho


def annealed_partial(params, n_levels):
    """Finite-level annealed free energy ``log r_N / s**N``."""
    return annealed_log_r(params, n_levels) / float(params.s) ** n_levels


def annealed_free_energy(params, tol=1e-12, max_levels=DEFAULT_MAX_LEVELS):
    """Infinite-volume annealed free energy ``F(0, h)``.

    ``beta`` in ``params`` is ignored.

    The localized exit uses the exact identity
    ``F = (rho_n - log b / (s - 1)) / s**n + sum_{m >= n} c_m / s**(m + 1)``
    with ``c_m = log1p((b - 1) exp(-s rho_m))``; once ``rho_n >= RHO_BIG`` the
    remaining sum is bounded by ``tail_bound`` and is dropped.

    The delocalized exit is exact as well: ``r <= 1`` is invariant under the
    map, and because the map is increasing, a single non-increasing step means
    the orbit stays bounded forever.

    Raises
    ------
    NotConvergedError
        If ``max_levels`` steps pass without either exit (critical window).
    """
    if not tol > 0:
        raise DomainError(f"tol must be positive, got {tol}")
    b, s = params.b, params.s
    log_b_shift = math.log(b) / (s - 1)
    log_s = math.log(s)
    state = AnnealedState(0, float(params.h))
    while True:
        rho = state.rho
        if rho <= 0.0:
            return FreeEnergyValue(0.0, state.level, True, Phase.DELOCALIZED)
        if rho >= RHO_BIG:
            log_value = math.log(rho - log_b_shift) - state.level * log_s
            # tail / value, with the common 1/s**n factor cancelled
            rel_tail = (b - 1) * math.exp(-s * rho) / ((s - 1) * (rho - log_b_shift))
            if rel_tail <= tol:
                return FreeEnergyValue(
                    math.exp(log_value),
                    state.level,
                    True,
                    Phase.LOCALIZED,
                    log_value,
                    math.exp(log_value) * rel_tail,
                )
        if state.level >= max_levels:
            raise NotConvergedError(
                f"no phase decision after {max_levels} levels (h={params.h!r})",
                lower_estimate=max(rho - log_b_shift, 0.0) * math.exp(-state.level * log_s),
                levels_used=state.level,
            )
        nxt = annealed_step(state, params)
        if nxt.rho <= rho:
            return FreeEnergyValue(0.0, nxt.level, True, Phase.DELOCALIZED)
        state = nxt


def f_hat(eps, s, b=None, **kwargs):
    """Annealed free energy in the ``eps = e**h - 1`` parametrisation."""
    return f_hat_value(eps, s, b, **kwargs).value


def f_hat_value(eps, s, b=None, **kwargs):
    b = s if b is None else b
    return annealed_free_energy(ModelParams(b, s, 0.0, math.log1p(eps)), **kwargs)


def _find_a0(s):
    """Bisection for ``f_hat(a0) = 1``."""
    lo, hi = 1e-3, 1.0
    while f_hat(hi, s) < 1.0:
        lo, hi = hi, 2.0 * hi
        if hi > 1e6:
            raise BracketError("could not bracket f_hat(eps) = 1")
    if f_hat(lo, s) >= 1.0:
        raise BracketError("lower end of the a0 bracket already exceeds 1")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        val = f_hat(mid, s)
        if abs(val - 1.0) < A0_TOL:
            return mid
        if val < 1.0:
            lo = mid
        else:
            hi = mid
    raise BracketError("bisection for a0 did not reach tolerance")


def next_epsilon(a, s):
    """``(s a + 1)**(1/s) - 1`` evaluated without cancellation."""
    return math.expm1(math.log1p(s * a) / s)


def build_epsilon_sequence(params, n_terms):
    """The sequence ``a_0 > a_1 > ...`` with ``f_hat(a_n) = s**-n``.

    ``a_0`` solves ``f_hat(a_0) = 1``; each later term is one inverse step of
    the annealed map in the ``eps`` variable.
    """
    params.require_equal("build_epsilon_sequence")
    if n_terms < 1:
        raise DomainError(f"n_terms must be >= 1, got {n_terms}")
    s = params.s
    a = [_find_a0(s)]
    for _ in range(n_terms - 1):
        a.append(next_epsilon(a[-1], s))
    return EpsilonSequence(s, tuple(a))


def fit_singularity(params, eps_grid, max_levels=DEFAULT_MAX_LEVELS):
    """Least-squares fit of ``-log f_hat(eps)`` against ``1/eps``.

    Returns ``(slope, intercept, residual)`` where ``residual`` is the largest
    relative misfit over the grid. The slope estimates ``2 log(s) / (s - 1)``.
    """
    params.require_equal("fit_singularity")
    eps = np.asarray(eps_grid, dtype=float)
    if eps.size < 2 or np.any(eps <= 0):
        raise DomainError("eps_grid needs at least two strictly positive points")
    y = np.empty_like(eps)
    for i, e in enumerate(eps):
        try:
            val = f_hat_value(e, params.s, max_levels=max_levels)
        except NotConvergedError as exc:
            raise DomainError(f"annealed solver did not converge at eps={e!r}") from exc
        if val.phase is not Phase.LOCALIZED:
            raise DomainError(f"f_hat vanishes at eps={e!r}")
        y[i] = -val.log_value
    x = 1.0 / eps
    slope, intercept = np.polyfit(x, y, 1)
    residual = float(np.max(np.abs(y - (slope * x + intercept)) / np.abs(y)))
    return float(slope), float(intercept), residual


def singularity_constant(params, h_grid):
    """Smallest ``c > 1`` with ``exp(-c/h)/c <= F(h) <= c exp(-1/(c h))`` on the grid.

    Both sides are monotone in ``c``, so any larger ``c`` works too.
    """
    params.require_equal("singularity_constant")
    c_needed = 1.0
    for h in h_grid:
        fe = annealed_free_energy(params.with_h(h))
        if fe.phase is not Phase.LOCALIZED:
            raise DomainError(f"F vanishes at h={h!r}")
        log_f = fe.log_value

        def lower_gap(c):
            return -c / h - math.log(c) - log_f  # <= 0 when the lower bound holds

        def upper_gap(c):
            return log_f - math.log(c) + 1.0 / (c * h)  # <= 0 when the upper bound holds

        for gap in (lower_gap, upper_gap):
            if gap(c_needed) > 0:
                hi = 2.0 * c_needed
                while gap(hi) > 0:
                    hi *= 2.0
                c_needed = brentq(gap, c_needed, hi, xtol=1e-14, rtol=1e-14)
                c_needed *= 1.0 + 1e-12
    return c_needed


def fit_power_law(params, h_grid):
    """Slope and intercept of ``log F(0, h)`` against ``log h``."""
    h = np.asarray(h_grid, dtype=float)
    values = [annealed_free_energy(params.with_h(x)) for x in h]
    if any(v.phase is not Phase.LOCALIZED for v in values):
        raise DomainError("F vanishes on part of the grid")
    log_f = np.array([v.log_value for v in values])
    slope, intercept = np.polyfit(np.log(h), log_f, 1)
    return float(slope), float(intercept)
