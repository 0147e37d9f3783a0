"""Model parameters, disorder laws and the log-space one-step map.

All partition functions are carried as natural logarithms. The map

    R' = (R_1 * ... * R_s + b - 1) / b

becomes ``combine_children(L_1, ..., L_s, b)`` on logs.
"""

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtri

from . import rng
from .errors import ArityError, DomainError, InvalidLawError

# Switch to the large-S branch once exp(S) dominates b - 1; below that point
# log1p(expm1(S)/b) is the accurate form (no cancellation near S = 0).
_LARGE_S_OFFSET = 1.0


class Regime(enum.Enum):
    EQUAL = "equal"  # b == s
    RELEVANT = "relevant"  # s > b
    OTHER = "other"  # b > s


@dataclass(frozen=True)
class ModelParams:
    b: int
    s: int
    beta: float = 0.0
    h: float = 0.0

    def __post_init__(self):
        if int(self.b) != self.b or int(self.s) != self.s:
            raise DomainError("b and s must be integers")
        if self.b < 2 or self.s < 2:
            raise DomainError(f"need b >= 2 and s >= 2, got b={self.b}, s={self.s}")
        if not self.beta >= 0:
            raise DomainError(f"beta must be >= 0, got {self.beta}")
        if not math.isfinite(self.h):
            raise DomainError(f"h must be finite, got {self.h}")

    @property
    def regime(self):
        if self.b == self.s:
            return Regime.EQUAL
        return Regime.RELEVANT if self.s > self.b else Regime.OTHER

    def require_equal(self, what="this operation"):
        if self.regime is not Regime.EQUAL:
            raise DomainError(f"{what} requires b == s, got b={self.b}, s={self.s}")

    def with_h(self, h):
        return ModelParams(self.b, self.s, self.beta, h)

    def with_beta(self, beta):
        return ModelParams(self.b, self.s, beta, self.h)


# ---------------------------------------------------------------------------
# disorder laws


@dataclass(frozen=True)
class StandardGaussian:
    name = "gaussian"

    def log_m(self, beta):
        return 0.5 * beta * beta

    def log_m2_ratio(self, beta):
        """log E[exp(2 beta w)] - 2 log M(beta)."""
        return beta * beta

    def from_uniform(self, u):
        return ndtri(u)


@dataclass(frozen=True)
class FairSigns:
    name = "signs"

    def log_m(self, beta):
        # log cosh without overflow for large beta
        return beta + math.log1p(math.exp(-2.0 * beta)) - math.log(2.0)

    def log_m2_ratio(self, beta):
        return self.log_m(2.0 * beta) - 2.0 * self.log_m(beta)

    def from_uniform(self, u):
        return np.where(u < 0.5, -1.0, 1.0)


@dataclass(frozen=True)
class FiniteDiscrete:
    values: tuple
    probs: tuple
    name: str = field(default="discrete", init=False)

    def __post_init__(self):
        values = tuple(float(v) for v in self.values)
        probs = tuple(float(p) for p in self.probs)
        if len(values) == 0 or len(values) != len(probs):
            raise InvalidLawError("values and probs must be non-empty and of equal length")
        if any(p < 0 for p in probs):
            raise InvalidLawError("probabilities must be non-negative")
        if abs(math.fsum(probs) - 1.0) > 1e-12:
            raise InvalidLawError(f"probabilities sum to {math.fsum(probs)!r}, not 1")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "probs", probs)

    def _log_mgf(self, beta):
        terms = [math.log(p) + beta * v for v, p in zip(self.values, self.probs) if p > 0]
        top = max(terms)
        return top + math.log(math.fsum(math.exp(t - top) for t in terms))

    def log_m(self, beta):
        return self._log_mgf(beta)

    def log_m2_ratio(self, beta):
        return self._log_mgf(2.0 * beta) - 2.0 * self._log_mgf(beta)

    def from_uniform(self, u):
        cdf = np.cumsum(self.probs)
        cdf[-1] = 1.0
        idx = np.searchsorted(cdf, u, side="right")
        return np.asarray(self.values)[np.minimum(idx, len(self.values) - 1)]


def parse_law(text):
    """Build a law from a short descriptor.

    ``"gaussian"``, ``"signs"`` or ``"discrete:v1,v2,...:p1,p2,..."``.
    """
    text = text.strip()
    if text == "gaussian":
        return StandardGaussian()
    if text == "signs":
        return FairSigns()
    if text.startswith("discrete:"):
        try:
            _, vals, probs = text.split(":")
            return FiniteDiscrete(
                tuple(float(v) for v in vals.split(",")),
                tuple(float(p) for p in probs.split(",")),
            )
        except ValueError as exc:
            if isinstance(exc, InvalidLawError):
                raise
            raise InvalidLawError(f"cannot parse law descriptor {text!r}") from exc
    raise InvalidLawError(f"unknown law {text!r}")


def law_descriptor(law):
    if isinstance(law, FiniteDiscrete):
        vals = ",".join(repr(v) for v in law.values)
        probs = ",".join(repr(p) for p in law.probs)
        return f"discrete:{vals}:{probs}"
    return law.name


def log_m(law, beta):
    """Closed-form ``log E[exp(beta * omega)]``."""
    if not beta >= 0:
        raise DomainError(f"beta must be >= 0, got {beta}")
    if isinstance(law, FiniteDiscrete):
        # frozen instances can be built via object.__new__; re-check the sum
        if abs(math.fsum(law.probs) - 1.0) > 1e-12:
            raise InvalidLawError("probabilities do not sum to 1")
    return law.log_m(beta)


# ---------------------------------------------------------------------------
# initial weights


@dataclass(frozen=True)
class StreamCoords:
    """Coordinates of one draw in the counter-based generator."""

    seed: int
    level: int = 0
    index: int = 0


def initial_weights(law, params, seed, start, count):
    """Log initial weights ``beta*w + h - log M(beta)`` for pool indices
    ``start .. start+count-1``."""
    if params.beta == 0:
        return np.full(count, float(params.h))
    words = rng.raw_words(seed, rng.INITIAL, 0, start, count)
    omega = law.from_uniform(rng.to_open_unit(words))
    return params.beta * omega + (params.h - log_m(law, params.beta))


def sample_initial(law, params, rng_stream):
    """One draw of ``log R_0`` at the coordinates in ``rng_stream``."""
    coords = rng_stream if isinstance(rng_stream, StreamCoords) else StreamCoords(*rng_stream)
    return float(initial_weights(law, params, coords.seed, coords.index, 1)[0])


# ---------------------------------------------------------------------------
# one-step map


def _map_sum(total, b):
    """log((exp(total) + b - 1) / b), accurate to a few ulps for every total.

    Uses numpy scalar ufuncs rather than ``math`` so the result is bit-identical
    to ``map_sum_array`` (libm and numpy's SIMD kernels differ in the last ulp).
    """
    total = np.float64(total)
    if total > math.log(b) + _LARGE_S_OFFSET:
        return float(total + np.log1p((b - 1) * np.exp(-total)) - math.log(b))
    return float(np.log1p(np.expm1(total) / b))


def map_sum_array(total, b):
    """Vectorised ``_map_sum``."""
    total = np.asarray(total, dtype=np.float64)
    out = np.empty_like(total)
    big = total > math.log(b) + _LARGE_S_OFFSET
    tb = total[big]
    out[big] = tb + np.log1p((b - 1) * np.exp(-tb)) - math.log(b)
    ts = total[~big]
    out[~big] = np.log1p(np.expm1(ts) / b)
    return out


def sum_children(children):
    """Left-to-right sum, the single summation order used everywhere.

    Keeping one order makes the disorder-free population bit-identical to the
    annealed recursion.
    """
    total = children[0]
    for c in children[1:]:
        total = total + c
    return total


def combine_children(children, b, s=None):
    """Log of ``(prod exp(children) + b - 1) / b``.

    Parameters
    ----------
    children : sequence of float
        The ``s`` child log-weights.
    b : int
        Branching factor.
    s : int, optional
        Expected arity; when given, a mismatch raises ``ArityError``.
    """
    children = list(children)
    if s is not None and len(children) != s:
        raise ArityError(f"expected {s} children, got {len(children)}")
    if len(children) < 2:
        raise ArityError(f"need at least 2 children, got {len(children)}")
    return _map_sum(sum_children(children), b)
