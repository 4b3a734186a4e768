"""Constructors for the named symbol families, weights, and summability statistics.

Weight formulas are implemented without their absolute constants (those are
existence statements, not values); users compare ratios of measured norms to
weighted statistics and assert stability, never a specific constant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .dirichlet import DirichletPolynomial
from .numtheory import (
    MultiplicativeFunction,
    PrimeTable,
    divisor_count_sieve,
    factorize,
    iterated_log,
    multiplicative_value_table,
    shared_prime_table,
)

__all__ = [
    "SymbolSpec",
    "zeta_primitive_symbol",
    "lambda_symbol",
    "lambda_psi",
    "linear_symbol",
    "coprime_symbol",
    "m_homogeneous_symbol",
    "two_homogeneous_sharpness_symbol",
    "weight_w2",
    "weight_wm",
    "weight_general",
    "weighted_l2_statistic",
    "helson_statistic",
]


def zeta_primitive_symbol(alpha: float, truncation: int) -> DirichletPolynomial:
    """Primitive-of-shifted-zeta symbol: b_n = n^{-alpha} / log n for n >= 2."""
    if truncation < 2:
        raise ValueError("truncation must be >= 2")
    n = np.arange(2, truncation + 1, dtype=np.int64)
    nf = n.astype(np.float64)
    coeffs = nf ** (-alpha) / np.log(nf)
    return DirichletPolynomial(truncation, n, coeffs.astype(np.complex128))


def lambda_psi(lam: float) -> MultiplicativeFunction:
    """The completely multiplicative weight with psi(p) = lam * (log p) / p."""
    if lam < 0:
        raise ValueError("lambda must be >= 0")
    return MultiplicativeFunction.completely_multiplicative(
        lambda p: lam * math.log(p) / p
    )


def lambda_symbol(
    lam: float, truncation: int, table: PrimeTable | None = None
) -> DirichletPolynomial:
    """Multiplicative-edge symbol: b_n = psi(n) / log n with the lambda weight.

    lam = 0 gives the zero symbol.
    """
    if truncation < 2:
        raise ValueError("truncation must be >= 2")
    if lam < 0:
        raise ValueError("lambda must be >= 0")
    if lam == 0:
        return DirichletPolynomial.zero(truncation)
    psi = multiplicative_value_table(lambda_psi(lam), truncation, table)
    n = np.arange(2, truncation + 1, dtype=np.int64)
    coeffs = psi[2:] / np.log(n.astype(np.float64))
    return DirichletPolynomial(truncation, n, coeffs.astype(np.complex128))


def linear_symbol(
    prime_coefficients: Mapping[int, complex],
    truncation: int,
    table: PrimeTable | None = None,
) -> DirichletPolynomial:
    """Symbol supported exactly on the given primes.

    Raises:
        ValueError: if any key is not a prime <= truncation.
    """
    if table is None or table.limit < truncation:
        table = shared_prime_table(truncation)
    for p in prime_coefficients:
        if p > truncation:
            raise ValueError(f"prime {p} exceeds truncation {truncation}")
        if not table.is_prime(int(p)):
            raise ValueError(f"linear symbol key {p} is not prime")
    return DirichletPolynomial.from_dict(dict(prime_coefficients), truncation=truncation)


def coprime_symbol(
    indices: Sequence[int],
    coefficients: Sequence[complex],
    truncation: int | None = None,
) -> DirichletPolynomial:
    """Symbol on pairwise-coprime frequencies n_j >= 2.

    Raises:
        ValueError: naming the offending pair if two indices share a factor,
            or if any index is < 2.
    """
    indices = [int(n) for n in indices]
    if len(indices) != len(coefficients):
        raise ValueError("indices and coefficients must have equal length")
    for n in indices:
        if n < 2:
            raise ValueError(f"coprime symbol index {n} must be >= 2")
    for i in range(len(indices)):
        for j in range(i + 1, len(indices)):
            d = math.gcd(indices[i], indices[j])
            if d != 1:
                raise ValueError(
                    f"indices {indices[i]} and {indices[j]} share the factor {d}"
                )
    if truncation is None:
        truncation = max(indices, default=2)
    return DirichletPolynomial.from_dict(
        dict(zip(indices, coefficients)), truncation=truncation
    )


def m_homogeneous_symbol(
    m: int,
    coefficient_rule: Callable[[int], complex],
    truncation: int,
    table: PrimeTable | None = None,
) -> DirichletPolynomial:
    """Symbol supported on {n <= truncation : Omega(n) = m} via a coefficient rule."""
    if m < 1:
        raise ValueError("homogeneity degree m must be >= 1")
    if table is None or table.limit < truncation:
        table = shared_prime_table(truncation)
    big_omega = np.zeros(truncation + 1, dtype=np.int64)
    for p in table.primes_up_to(truncation):
        pe = int(p)
        while pe <= truncation:
            big_omega[pe::pe] += 1
            pe *= int(p)
    support = np.flatnonzero(big_omega == m)
    support = support[support >= 2]
    coeffs = np.array([coefficient_rule(int(n)) for n in support], dtype=np.complex128)
    return DirichletPolynomial(truncation, support.astype(np.int64), coeffs)


def two_homogeneous_sharpness_symbol(
    x: int,
    epsilon: float,
    table: PrimeTable | None = None,
    companion_prime: int | None = None,
) -> tuple[DirichletPolynomial, int]:
    """The 2-homogeneous sharpness family: terms (log_2(pq))^{1+eps/2}/p at pq.

    The construction pairs every prime p in (x/2, x] with one large prime q.
    The asymptotically faithful choice q ~ e^x is out of reach numerically,
    so q defaults to the least prime exceeding x^3; the growth driver is the
    p-sum, not the exact size of q.  Returns (symbol, q).
    """
    if x < 4:
        raise ValueError("x must be >= 4")
    if companion_prime is None:
        bound = x**3
        t = shared_prime_table(2 * bound)
        pos = int(np.searchsorted(t.primes, bound, side="right"))
        companion_prime = int(t.primes[pos])
        table = t
    q = companion_prime
    if table is None or table.limit < x:
        table = shared_prime_table(x)
    ps = table.primes_up_to(x)
    ps = ps[ps > x // 2].astype(np.int64)
    coeffs = {}
    for p in ps.tolist():
        w = iterated_log(p * q, 2) ** (1.0 + epsilon / 2.0) / p
        coeffs[p * q] = w
    poly = DirichletPolynomial.from_dict(coeffs, truncation=max(coeffs, default=2))
    return poly, q


def weight_w2(n: int) -> float:
    """Two-homogeneous weight log(n) / log_2(n), iterated log clamped to 1."""
    if n < 2:
        raise ValueError("weights are defined for n >= 2")
    return math.log(n) / iterated_log(n, 2)


def weight_wm(n: int, m: int) -> float:
    """m-homogeneous weight n^{(m-2)/m} / (log n)^{m-2} for m >= 3."""
    if n < 2:
        raise ValueError("weights are defined for n >= 2")
    if m < 3:
        raise ValueError("weight_wm requires m >= 3; use weight_w2 for m = 2")
    return n ** ((m - 2) / m) / math.log(n) ** (m - 2)


def weight_general(n: int, c: float) -> float:
    """Homogeneity-free weight n * exp(-c * sqrt(log n * log_2 n))."""
    if n < 2:
        raise ValueError("weights are defined for n >= 2")
    return n * math.exp(-c * math.sqrt(math.log(n) * iterated_log(n, 2)))


def weighted_l2_statistic(
    g: DirichletPolynomial, weight: Callable[[int], float]
) -> float:
    """(sum over support of |b_n|^2 w(n))^{1/2}.

    Raises whatever the weight raises on an index where it is undefined.
    """
    total = 0.0
    for n, b in zip(g.indices.tolist(), g.coefficients.tolist()):
        total += abs(b) ** 2 * weight(n)
    return math.sqrt(total)


def helson_statistic(
    g: DirichletPolynomial, table: PrimeTable | None = None
) -> float:
    """sum |b_n|^2 d(n) over the support, the Hilbert-Schmidt sufficiency probe."""
    if g.support_size == 0:
        return 0.0
    if g.support_size > 1000 and g.max_index == g.support_size + g.indices[0] - 1:
        # dense contiguous support: bulk divisor sieve is cheaper
        d = divisor_count_sieve(g.max_index)
        return float(np.sum(np.abs(g.coefficients) ** 2 * d[g.indices]))
    if table is None or table.limit < g.max_index:
        table = shared_prime_table(g.max_index)
    total = 0.0
    for n, b in zip(g.indices.tolist(), g.coefficients.tolist()):
        total += abs(b) ** 2 * factorize(n, table).divisor_count
    return total


_FAMILIES = ("zeta-primitive", "lambda", "linear", "m-homogeneous", "coprime")


@dataclass(frozen=True)
class SymbolSpec:
    """Declarative description of a named symbol family plus truncation.

    params per family:
        zeta-primitive: {"alpha": float}
        lambda:         {"lam": float}
        linear:         {"primes": {prime: coefficient}}
        m-homogeneous:  {"m": int, "coefficients": {n: coefficient}}
        coprime:        {"indices": [...], "coefficients": [...]}
    """

    family: str
    truncation: int
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise ValueError(
                f"unknown symbol family {self.family!r}; expected one of {_FAMILIES}"
            )

    def build(self, table: PrimeTable | None = None) -> DirichletPolynomial:
        if self.family == "zeta-primitive":
            return zeta_primitive_symbol(float(self.params["alpha"]), self.truncation)
        if self.family == "lambda":
            return lambda_symbol(float(self.params["lam"]), self.truncation, table)
        if self.family == "linear":
            primes = {int(p): complex(c) for p, c in self.params["primes"].items()}
            return linear_symbol(primes, self.truncation, table)
        if self.family == "m-homogeneous":
            coeffs = {int(n): complex(c) for n, c in self.params["coefficients"].items()}
            m = int(self.params["m"])
            if table is None or table.limit < max(coeffs, default=2):
                table = shared_prime_table(max(coeffs, default=2))
            for n in coeffs:
                if factorize(n, table).big_omega != m:
                    raise ValueError(f"index {n} is not {m}-homogeneous")
            return DirichletPolynomial.from_dict(coeffs, truncation=self.truncation)
        return coprime_symbol(
            [int(n) for n in self.params["indices"]],
            [complex(c) for c in self.params["coefficients"]],
            self.truncation,
        )

    @staticmethod
    def from_config(cfg: Mapping) -> "SymbolSpec":
        cfg = dict(cfg)
        family = cfg.pop("family")
        truncation = int(cfg.pop("truncation"))
        return SymbolSpec(family=family, truncation=truncation, params=cfg)
