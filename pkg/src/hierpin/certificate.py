"""Good-diamond lower bound on the quenched free energy (``b == s``).

An n-block of the wall is *good* when the ``s**(n-k)`` level-k partition
functions inside it sum to at least half their mean. Forcing the walk to
touch the wall only inside one k-subdiamond of each good block gives

    F(beta, h) >= p_good / s**n * [ (n - k) log s - log 2 + log r_k
                                    + log p_kn + log(q_n) * E[i_1] ]

with ``p_good`` the probability that a block is good and ``E[i_1]`` the mean
index of the first good block. Every statistical input is recorded so the
caller can propagate Monte Carlo error.

That bracket leaves out the ``b**-(n-k)`` chance that the walk picks the
wall branch at each level between ``n`` and ``k``, and without it the value
can exceed the exact free energy (at ``beta = 0``, ``h = 0.25`` it does).
``Certificate.bound`` keeps the bracket above; ``Certificate.bound_spine``
subtracts ``(n - k) log b`` inside it and is the one to trust.
"""

import logging
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.special import logsumexp

from . import rng
from .annealed import Phase, annealed_free_energy, annealed_log_r
from .errors import DomainError, ResourceError
from .model import law_descriptor, log_m, map_sum_array
from .population import evolve
from .walks import build_q_table, p_kn

logger = logging.getLogger(__name__)

MAX_BLOCK_TERMS = 10**8
LEAF_CHUNK = 1 << 22
SAFE_LOG = 700.0
MIN_VARIANCE_POOL = 10**4
CHOOSE_K_MAX = 200


@dataclass(frozen=True)
class Certificate:
    b: int
    s: int
    beta: float
    h: float
    law: str
    k: int
    n: int
    seed: int
    pool_size: int
    trials: int
    conservative: bool
    log_r_k: float
    r_k: float
    var_k: float
    var_k_se: float
    p_good: float
    p_good_se: float
    mean_first_good: float
    cond15_ok: bool
    log_pkn: float
    log_qn: float
    bound: float
    # the same bracket after paying (n - k) log b for steering the walk onto
    # the wall spine down to scale k, i.e. bound - p_good (n - k) log b / s**n
    bound_spine: float = field(default=math.nan)

    def as_record(self):
        return asdict(self)


def annealed_mean_rk(params, k):
    """``log r_k`` where ``r_k = E[R_k]``."""
    return annealed_log_r(params, k)


def choose_k(params, law=None, target=None):
    """Smallest ``k`` with ``log(r_k) / s**k >= target``.

    ``target`` defaults to half the annealed free energy at ``h``.
    """
    params.require_equal("choose_k")
    if params.h <= 0:
        raise DomainError("choose_k needs h > 0 (the annealed free energy vanishes otherwise)")
    if target is None:
        fe = annealed_free_energy(params)
        if fe.phase is not Phase.LOCALIZED:
            raise DomainError("annealed free energy is zero; no valid k")
        target = fe.value / 2.0
    log_r = float(params.h)
    for k in range(CHOOSE_K_MAX + 1):
        if log_r / float(params.s) ** k >= target:
            return k
        log_r = annealed_log_r(params, k + 1)
    raise DomainError(f"no k <= {CHOOSE_K_MAX} reaches target {target!r}")


def _variance_stats(params, law, k, m, seed):
    if m < MIN_VARIANCE_POOL:
        raise DomainError(f"variance pool needs M >= {MIN_VARIANCE_POOL}, got {m}")
    if params.beta == 0:
        return 0.0, 0.0
    pool = evolve(params, law, m, k, seed).pool
    if pool.max() > SAFE_LOG:
        raise ResourceError(f"level-{k} weights overflow exp(); use a smaller k")
    x = np.exp(pool)
    dev = x - x.mean()
    var = float(np.sum(dev**2) / (m - 1))
    m4 = float(np.mean(dev**4))
    se = math.sqrt(max(m4 - var**2, 0.0) / m)
    return var, se


def estimate_variance_rk(params, law, k, m, seed):
    """Sample variance of ``R_k`` over a level-k pool of size ``m``."""
    return _variance_stats(params, law, k, m, seed)[0]


def condition15_lhs(params, log_r_k, var_k, k):
    """``log_s(8 s**k V / r_k**2)``; ``-inf`` when ``V == 0``."""
    if var_k <= 0:
        return -math.inf
    s = params.s
    return (math.log(8.0) + k * math.log(s) + math.log(var_k) - 2.0 * log_r_k) / math.log(s)


def min_n_condition15(params, log_r_k, var_k, k):
    lhs = condition15_lhs(params, log_r_k, var_k, k)
    return 0 if lhs == -math.inf else math.floor(lhs) + 1


def check_condition15(params, law, k, n, m, seed):
    log_r_k = annealed_mean_rk(params, k)
    var_k = estimate_variance_rk(params, law, k, m, seed)
    return condition15_lhs(params, log_r_k, var_k, k) < n


def _leaf_energies(params, law, seed, offset, count):
    if params.beta == 0:
        return np.full(count, float(params.h))
    words = rng.raw_words(seed, rng.LEAVES, 0, offset, count)
    omega = law.from_uniform(rng.to_open_unit(words))
    return params.beta * omega + (params.h - log_m(law, params.beta))


def _block_log_rk(params, law, seed, first_trial, n_trials, k, n):
    """Level-k log partition functions, exact on full trees: shape (trials, s**(n-k))."""
    s, b = params.s, params.b
    leaves_per_trial = s**n
    x = _leaf_energies(params, law, seed, first_trial * leaves_per_trial, n_trials * leaves_per_trial)
    for _ in range(k):
        x = map_sum_array(x.reshape(-1, s).sum(axis=1), b)
    return x.reshape(n_trials, s ** (n - k))


def good_block_mask(params, law, k, n, trials, seed):
    """Boolean array: which of ``trials`` independent n-blocks are good."""
    if not n > k:
        raise DomainError(f"need n > k, got k={k}, n={n}")
    s = params.s
    if s ** (n - k) > MAX_BLOCK_TERMS:
        raise ResourceError(f"s**(n-k) = {s ** (n - k)} level-k terms per block; reduce n - k")
    log_r_k = annealed_mean_rk(params, k)
    threshold = (n - k) * math.log(s) + log_r_k - math.log(2.0)
    per_chunk = max(1, LEAF_CHUNK // s**n)
    out = np.empty(trials, dtype=bool)
    for lo in range(0, trials, per_chunk):
        hi = min(lo + per_chunk, trials)
        block = _block_log_rk(params, law, seed, lo, hi - lo, k, n)
        out[lo:hi] = logsumexp(block, axis=1) >= threshold
    return out


def estimate_p_good(params, law, k, n, trials, seed):
    """``(p_good, mean_first_good)`` with ``mean_first_good = 1 / p_good``."""
    mask = good_block_mask(params, law, k, n, trials, seed)
    p = float(mask.mean())
    return p, (1.0 / p if p > 0 else math.inf)


def _bracket(params, k, n, log_r_k, log_pkn, log_qn, mean_first):
    return (n - k) * math.log(params.s) - math.log(2.0) + log_r_k + log_pkn + log_qn * mean_first


def lower_bound(params, law, k, n, m, seed, trials=4000, conservative=False):
    """Assemble a certificate at scales ``(k, n)``.

    In conservative mode ``p_good`` is lowered and ``V(R_k)`` raised by three
    standard errors, and the first-good index is taken as ``1/p_good + 1``.
    """
    params.require_equal("lower_bound")
    if not 1 <= k < n:
        raise DomainError(f"need 1 <= k < n, got k={k}, n={n}")
    s = params.s
    log_r_k = annealed_mean_rk(params, k)
    var_k, var_se = _variance_stats(params, law, k, m, seed)
    mask = good_block_mask(params, law, k, n, trials, seed)
    p_good = float(mask.mean())
    p_se = math.sqrt(p_good * (1.0 - p_good) / trials)
    var_used = var_k + 3.0 * var_se if conservative else var_k
    p_used = p_good - 3.0 * p_se if conservative else p_good
    cond_ok = condition15_lhs(params, log_r_k, var_used, k) < n
    if p_used > 0:
        mean_first = 1.0 / p_used + (1.0 if conservative else 0.0)
    else:
        mean_first = math.inf
    tables = build_q_table(s, n)
    log_pkn = p_kn(tables, k, n)
    log_qn = tables.log_q(n)
    if p_used > 0:
        bracket = _bracket(params, k, n, log_r_k, log_pkn, log_qn, mean_first)
        bound = p_used / float(s) ** n * bracket
        spine = p_used / float(s) ** n * (bracket - (n - k) * math.log(params.b))
    else:
        bound = spine = 0.0
    if not cond_ok:
        logger.warning("condition (k=%d, n=%d) fails; p_good >= 1/2 is not guaranteed", k, n)
    return Certificate(
        b=params.b,
        s=s,
        beta=params.beta,
        h=params.h,
        law=law_descriptor(law),
        k=k,
        n=n,
        seed=seed,
        pool_size=m,
        trials=trials,
        conservative=conservative,
        log_r_k=log_r_k,
        r_k=math.exp(log_r_k) if log_r_k < SAFE_LOG else math.inf,
        var_k=var_used,
        var_k_se=var_se,
        p_good=p_used,
        p_good_se=p_se,
        mean_first_good=mean_first,
        cond15_ok=cond_ok,
        log_pkn=log_pkn,
        log_qn=log_qn,
        bound=bound,
        bound_spine=spine,
    )


def bound_from_fields(cert):
    """Re-evaluate the bound from the stored fields alone."""
    if not cert.p_good > 0:
        return 0.0
    bracket = (
        (cert.n - cert.k) * math.log(cert.s)
        - math.log(2.0)
        + cert.log_r_k
        + cert.log_pkn
        + cert.log_qn * cert.mean_first_good
    )
    return cert.p_good / float(cert.s) ** cert.n * bracket


def finite_volume_bound(cert, good):
    """Finite-N version of the bound for an explicit good/bad block sequence.

    ``good`` lists the ``s**(N-n)`` blocks of an N-diamond in order. Each good
    block contributes ``log(s**(n-k) r_k / 2) + log p_kn``; each gap
    ``i_{j+1} - i_j + 1`` between consecutive good blocks (the last one wraps
    to the end of the sequence) costs that many factors of ``q_n``.
    """
    good = np.asarray(good, dtype=bool)
    idx = np.flatnonzero(good) + 1
    n_blocks = good.size
    if idx.size == 0:
        return 0.0
    s_total = float(cert.s) ** cert.n * n_blocks
    per_good = (cert.n - cert.k) * math.log(cert.s) - math.log(2.0) + cert.log_r_k + cert.log_pkn
    nxt = np.append(idx[1:], n_blocks + idx[0])
    gaps = nxt - idx + 1
    return (idx.size * per_good + gaps.sum() * cert.log_qn) / s_total


@dataclass
class SearchResult:
    found: Certificate = None
    tried: list = field(default_factory=list)


def search_certificate(
    params, law, m, seed, trials=4000, conservative=True, k_count=4, n_span=20, leaf_budget=2 * 10**8
):
    """Scan ``k`` upward from ``choose_k`` and ``n`` upward from the smallest
    value passing the variance condition; stop at the first positive,
    condition-satisfying certificate."""
    params.require_equal("search_certificate")
    k0 = max(choose_k(params, law), 1)
    result = SearchResult()
    for k in range(k0, k0 + k_count):
        log_r_k = annealed_mean_rk(params, k)
        var_k, var_se = _variance_stats(params, law, k, m, seed)
        var_used = var_k + 3.0 * var_se if conservative else var_k
        n_start = max(k + 1, min_n_condition15(params, log_r_k, var_used, k))
        for n in range(n_start, n_start + n_span + 1):
            if float(params.s) ** n * trials > leaf_budget or params.s ** (n - k) > MAX_BLOCK_TERMS:
                break
            cert = lower_bound(params, law, k, n, m, seed, trials, conservative)
            result.tried.append(cert)
            if cert.cond15_ok and cert.bound > 0:
                result.found = cert
                return result
    return result
