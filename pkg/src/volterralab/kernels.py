"""Extremal test vectors and smooth reproducing kernels.

These are the inputs that realize lower bounds: squarefree prime products for
the blow-up of shifted-zeta primitives, indicator-type multiplicative test
functions over small primes with bounded exponents, and smooth-cutoff
reproducing kernels whose Rayleigh quotients witness non-compactness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .dirichlet import DirichletPolynomial, h2_norm
from .numtheory import (
    PrimeTable,
    iterated_log,
    shared_prime_table,
    smooth_integers,
)
from .volterra import apply_volterra, apply_volterra_tilde

__all__ = [
    "SmoothKernelSpec",
    "RayleighQuotients",
    "squarefree_product_test",
    "gal_test_function",
    "smooth_kernel",
    "choose_smooth_truncation",
    "zeta_smooth",
    "s_phi_direct",
    "rayleigh_quotient",
    "multcomp_double_sum",
    "subset_product_quotient",
]

_SUPPORT_CAP = 1 << 22


def squarefree_product_test(J: int, truncation: int | None = None) -> DirichletPolynomial:
    """The product of (1 + p_j^{-s}) over the first J primes, expanded.

    Coefficients are 1 exactly on the squarefree products of the first J
    primes (2^J of them), so the squared norm is 2^J.  The test vector must
    be complete: a truncation below the full product is rejected.
    """
    if J < 0:
        raise ValueError("J must be >= 0")
    if J > 22:
        raise ValueError(f"support 2^{J} exceeds the enumeration cap")
    table = shared_prime_table(128)
    while table.primes.size < J:
        table = shared_prime_table(table.limit * 4)
    primes = [int(p) for p in table.primes[:J]]
    support = [1]
    for p in primes:
        support.extend(n * p for n in support)
    full = max(support)
    if truncation is None:
        truncation = full
    elif truncation < full:
        raise ValueError(
            f"truncation {truncation} clips the full product support {full}"
        )
    idx = np.array(sorted(support), dtype=np.int64)
    return DirichletPolynomial(truncation, idx, np.ones(idx.size, dtype=np.complex128))


def gal_test_function(
    x: float,
    truncation: int | None = None,
    table: PrimeTable | None = None,
) -> DirichletPolynomial:
    """Unit-norm indicator test function over small primes with bounded exponents.

    Admissible primes are p <= log(x)/log_2(x) and admissible exponents
    r <= (1/2) log_2(x); the support is every product of admissible prime
    powers.  Coefficients are equal and the result is normalized to unit
    norm, so quotients are directly comparable across x.
    """
    if x < 16:
        raise ValueError("x too small for the threshold construction")
    prime_bound = math.log(x) / iterated_log(x, 2)
    max_exponent = int(math.floor(0.5 * iterated_log(x, 2)))
    if table is None or table.limit < max(2, int(prime_bound)):
        table = shared_prime_table(max(2, int(prime_bound)))
    primes = [int(p) for p in table.primes_up_to(prime_bound)]
    count = (max_exponent + 1) ** len(primes)
    if count > _SUPPORT_CAP:
        raise ValueError(f"support size {count} exceeds the enumeration cap")
    support = [1]
    for p in primes:
        block = list(support)
        pe = 1
        for _ in range(max_exponent):
            pe *= p
            support.extend(n * pe for n in block)
    full = max(support)
    if truncation is None:
        truncation = full
    elif truncation < full:
        raise ValueError(f"truncation {truncation} clips the support ({full})")
    idx = np.array(sorted(support), dtype=np.int64)
    coeff = np.full(idx.size, 1.0 / math.sqrt(idx.size), dtype=np.complex128)
    return DirichletPolynomial(truncation, idx, coeff)


@dataclass(frozen=True)
class SmoothKernelSpec:
    """Parameters of a smooth-cutoff reproducing kernel: abscissa, smoothness, truncation."""

    sigma: float
    y: int
    truncation: int

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        if self.y < 1 or self.truncation < 1:
            raise ValueError("y and truncation must be >= 1")


def smooth_kernel(
    spec: SmoothKernelSpec, table: PrimeTable | None = None
) -> DirichletPolynomial:
    """Kernel with coefficients n^{-sigma} exactly on y-smooth n <= truncation."""
    idx = smooth_integers(spec.truncation, spec.y, table)
    coeff = idx.astype(np.float64) ** (-spec.sigma)
    return DirichletPolynomial(spec.truncation, idx, coeff.astype(np.complex128))


def zeta_smooth(s: float, y: int, table: PrimeTable | None = None) -> float:
    """Finite Euler product prod_{p <= y} (1 - p^{-s})^{-1}.

    Raises:
        ValueError: for s <= 0 (a factor diverges).
    """
    if s <= 0:
        raise ValueError("zeta_smooth requires s > 0")
    if table is None or table.limit < y:
        table = shared_prime_table(max(y, 2))
    p = table.primes_up_to(y).astype(np.float64)
    if p.size == 0:
        return 1.0
    return float(np.exp(-np.sum(np.log1p(-(p ** (-s))))))


def choose_smooth_truncation(
    sigma: float,
    y: int,
    tail_fraction: float = 1e-3,
    max_truncation: int = 1 << 22,
    table: PrimeTable | None = None,
) -> tuple[int, float]:
    """Smallest power-of-two truncation whose dropped squared-norm tail is below
    tail_fraction of the full kernel mass, capped at max_truncation.

    Returns (truncation, achieved tail fraction).  At small sigma and large y
    the target may be unreachable below the cap; the achieved fraction is
    reported so callers can label the truncation bias.
    """
    full = zeta_smooth(2 * sigma, y, table)
    n = 1024
    while True:
        idx = smooth_integers(n, y, table)
        partial = float(np.sum(idx.astype(np.float64) ** (-2 * sigma)))
        frac = (full - partial) / full
        if frac <= tail_fraction or n >= max_truncation:
            return n, max(frac, 0.0)
        n *= 2


class SPhiSum(NamedTuple):
    value: float
    tail_bound: float


def s_phi_direct(
    m: int, n: int, spec: SmoothKernelSpec, cutoff: int, table: PrimeTable | None = None
) -> SPhiSum:
    """Direct truncated evaluation of the kernel-pair lattice sum.

    Sums phi(k)^2 / (log k + a)^2 with a = log(mn / gcd(m,n)) over y-smooth
    k <= cutoff, phi(k) = k^{-sigma}.  The tail bound is rigorous: terms
    beyond the cutoff are positive and dominated by
    (full power-sum minus partial) / (log cutoff + a)^2.
    """
    if m < 2 or n < 2:
        raise ValueError("m and n must be >= 2")
    a = math.log(m * n // math.gcd(m, n))
    k = smooth_integers(cutoff, spec.y, table).astype(np.float64)
    weights = k ** (-2 * spec.sigma)
    value = float(np.sum(weights / (np.log(k) + a) ** 2))
    full = zeta_smooth(2 * spec.sigma, spec.y, table)
    tail = max(full - float(np.sum(weights)), 0.0) / (math.log(cutoff) + a) ** 2
    return SPhiSum(value=value, tail_bound=tail)


class RayleighQuotients(NamedTuple):
    """Certified lower bounds ||T f|| / ||f|| in both operator conventions."""

    tilde: float
    plain: float


def rayleigh_quotient(
    g: DirichletPolynomial,
    f: DirichletPolynomial,
    truncation: int | None = None,
) -> RayleighQuotients:
    """Rayleigh quotients of f under the tilde and plain operators, matched truncation.

    Raises:
        ValueError: for f = 0.
    """
    denom = h2_norm(f)
    if denom == 0:
        raise ValueError("rayleigh_quotient requires a nonzero test vector")
    if truncation is None:
        truncation = max(f.truncation, g.truncation)
    tilde = h2_norm(apply_volterra_tilde(g, f, truncation)) / denom
    plain = h2_norm(apply_volterra(g, f, truncation)) / denom
    return RayleighQuotients(tilde=tilde, plain=plain)


def multcomp_double_sum(
    g: DirichletPolynomial,
    spec: SmoothKernelSpec,
    m_cut: int,
    cutoff: int | None = None,
    table: PrimeTable | None = None,
    match_truncation: int | None = None,
) -> SPhiSum:
    """Bilinear route to the squared image norm of the smooth kernel.

    Evaluates sum over 2 <= m, n <= m_cut of
    (b_m log m)(b_n log n) phi(mn/(m,n)^2) S_phi(m, n), with phi the kernel's
    completely multiplicative coefficient rule.  For a symbol supported in
    [2, m_cut] this equals the squared norm of the plain log-weighted image
    of the full (untruncated) kernel; only the inner lattice sums are
    truncated, and their aggregated rigorous tail is returned alongside.

    With ``match_truncation`` = N the tail instead bounds the gap to the
    direct route that applies the operator to the kernel truncated at N:
    that route reaches exactly the lattice points t <= min(m, n) N / lcm(m, n)
    of each pair, so the reported tail bounds (bilinear - direct) >= 0.

    Raises:
        ValueError: if g has negative (or non-real) coefficients.
    """
    if not g.is_real() or bool(np.any(g.coefficients.real < 0)):
        raise ValueError("the bilinear route requires nonnegative coefficients")
    if cutoff is None:
        cutoff = spec.truncation
    keep = (g.indices >= 2) & (g.indices <= m_cut)
    idx = g.indices[keep].astype(np.int64)
    weights = g.coefficients[keep].real * np.log(idx.astype(np.float64))

    k = smooth_integers(cutoff, spec.y, table).astype(np.float64)
    k_weights = k ** (-2 * spec.sigma)
    logk = np.log(k)
    full = zeta_smooth(2 * spec.sigma, spec.y, table)
    cumulative = np.cumsum(k_weights)
    partial_mass = float(cumulative[-1])

    total = 0.0
    tail = 0.0
    small_primes = _primes_up_to(spec.y, table)
    items = list(zip(idx.tolist(), weights.tolist()))
    for m, wm in items:
        for n, wn in items:
            gcd = math.gcd(m, n)
            ratio = m * n // (gcd * gcd)
            r = ratio
            for p in small_primes:
                while r % p == 0:
                    r //= p
            if r != 1:
                continue  # phi vanishes off the y-smooth set
            phi = float(ratio) ** (-spec.sigma)
            a = math.log(m * n // gcd)
            s_val = float(np.sum(k_weights / (logk + a) ** 2))
            if match_truncation is None:
                s_tail = max(full - partial_mass, 0.0) / (math.log(cutoff) + a) ** 2
            else:
                reach = min(m, n) * match_truncation * gcd // (m * n)
                pos = int(np.searchsorted(k, reach, side="right"))
                covered = float(cumulative[pos - 1]) if pos else 0.0
                s_tail = max(full - covered, 0.0) / (
                    math.log(max(reach, 2)) + a
                ) ** 2
            total += wm * wn * phi * s_val
            tail += wm * wn * phi * s_tail
    return SPhiSum(value=total, tail_bound=tail)


def _primes_up_to(y: int, table: PrimeTable | None) -> list[int]:
    t = table if table is not None and table.limit >= y else shared_prime_table(max(y, 2))
    return [int(p) for p in t.primes_up_to(y)]


def subset_product_quotient(J: int, alpha: float) -> float:
    """Exact restricted Rayleigh quotient of the squarefree product test vector
    under the tilde operator with the shifted-zeta primitive symbol.

    Enumerates all 2^J - 1 nonempty subsets S of the first J primes; the
    image coefficient at the product of S is prod (1 + p^{-alpha}) / log(n_S),
    and the quotient restricts the image norm to those frequencies (a lower
    bound for the unrestricted quotient).  Doubling arrays keep this exact
    and fast through J ~ 22.
    """
    if J < 1:
        raise ValueError("J must be >= 1")
    if J > 22:
        raise ValueError("subset enumeration capped at J = 22")
    table = shared_prime_table(1 << 7)
    while table.primes.size < J:
        table = shared_prime_table(table.limit * 4)
    primes = table.primes[:J].astype(np.float64)
    log_n = np.zeros(1)
    factor = np.ones(1)
    for p in primes:
        log_n = np.concatenate([log_n, log_n + math.log(p)])
        factor = np.concatenate([factor, factor * (1.0 + p ** (-alpha))])
    log_n = log_n[1:]  # drop the empty subset
    factor = factor[1:]
    image_sq = float(np.sum((factor / log_n) ** 2))
    return math.sqrt(image_sq / 2.0**J)
