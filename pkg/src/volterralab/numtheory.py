"""Prime sieves, factorization, divisor enumeration, and multiplicative functions.

Everything downstream (coefficient formulas, symbol constructors, smooth
kernels) consumes factorizations in bulk, so the sieve stores the smallest
prime factor of every integer up to its limit: factoring any n <= limit then
costs one division per prime power.

Conventions fixed here once and for all:
    P+(1) = 1, mu(1) = 1, Omega(1) = omega(1) = 0, d(1) = 1.
    Logarithms are natural.
    iterated_log(x, k) is the k-fold logarithm, clamped to 1 for x <= x_k
    where x_2 = e^e and x_{k+1} = e^{x_k}.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from typing import Callable, Iterator, NamedTuple, Sequence

import numpy as np

__all__ = [
    "PrimeTable",
    "Factorization",
    "MultiplicativeFunction",
    "ArithmeticStatistics",
    "build_prime_table",
    "shared_prime_table",
    "factorize",
    "divisors",
    "arithmetic_statistics",
    "evaluate_multiplicative",
    "multiplicative_value_table",
    "smooth_integers",
    "smooth_count",
    "mertens_sum",
    "iterated_log",
    "divisor_count_sieve",
    "completely_multiplicative_prefix_sums",
]


@dataclass(frozen=True)
class PrimeTable:
    """Smallest-prime-factor sieve up to ``limit``.

    Immutable after construction; safe to share across threads.

    Attributes:
        limit: Inclusive upper bound N >= 1.
        smallest_prime_factor: int64 array of length N+1.
            Entry n (2 <= n <= N) is the least prime dividing n.
            Entries 0 and 1 are sentinels (0 and 1).
        primes: Strictly increasing int64 array of all primes <= N.
    """

    limit: int
    smallest_prime_factor: np.ndarray
    primes: np.ndarray

    def is_prime(self, n: int) -> bool:
        if n < 2 or n > self.limit:
            if n > self.limit:
                raise ValueError(f"{n} exceeds sieve limit {self.limit}")
            return False
        return int(self.smallest_prime_factor[n]) == n

    def primes_up_to(self, y: float) -> np.ndarray:
        """Primes p <= y as a view into the sieved prime list."""
        if y > self.limit:
            raise ValueError(f"bound {y} exceeds sieve limit {self.limit}")
        hi = int(np.searchsorted(self.primes, math.floor(y), side="right"))
        return self.primes[:hi]


class ArithmeticStatistics(NamedTuple):
    """(Omega, omega, d, P+, mu) of one integer."""

    big_omega: int
    little_omega: int
    divisor_count: int
    largest_prime_factor: int
    mobius: int


@dataclass(frozen=True)
class Factorization:
    """Prime-power decomposition n = prod p^e with strictly increasing primes."""

    n: int
    prime_powers: tuple[tuple[int, int], ...]

    @property
    def big_omega(self) -> int:
        return sum(e for _, e in self.prime_powers)

    @property
    def little_omega(self) -> int:
        return len(self.prime_powers)

    @property
    def divisor_count(self) -> int:
        d = 1
        for _, e in self.prime_powers:
            d *= e + 1
        return d

    @property
    def largest_prime_factor(self) -> int:
        if not self.prime_powers:
            return 1
        return self.prime_powers[-1][0]

    @property
    def mobius(self) -> int:
        if any(e > 1 for _, e in self.prime_powers):
            return 0
        return -1 if len(self.prime_powers) % 2 else 1

    @property
    def exponent_multiindex(self) -> tuple[tuple[int, int], ...]:
        """Alias for the (prime, exponent) pairs viewed as a sparse multi-index."""
        return self.prime_powers


def build_prime_table(limit: int) -> PrimeTable:
    """Sieve smallest prime factors for 2..limit.

    Args:
        limit: N >= 1.  limit = 1 yields an empty prime list.

    Raises:
        ValueError: if limit < 1.
    """
    if limit < 1:
        raise ValueError(f"sieve limit must be >= 1, got {limit}")
    spf = np.zeros(limit + 1, dtype=np.int64)
    if limit >= 1:
        spf[1] = 1
    if limit >= 2:
        idx = np.arange(limit + 1, dtype=np.int64)
        spf[2:] = idx[2:]
        for p in range(2, math.isqrt(limit) + 1):
            if spf[p] == p:
                sl = spf[p * p :: p]
                np.minimum(sl, p, out=sl)
        primes = idx[2:][spf[2:] == idx[2:]]
    else:
        primes = np.zeros(0, dtype=np.int64)
    spf.setflags(write=False)
    primes.setflags(write=False)
    return PrimeTable(limit=limit, smallest_prime_factor=spf, primes=primes)


_shared_lock = threading.Lock()
_shared_table: PrimeTable | None = None


def shared_prime_table(limit: int) -> PrimeTable:
    """Return a cached table covering at least ``limit``, growing it if needed."""
    global _shared_table
    with _shared_lock:
        if _shared_table is None or _shared_table.limit < limit:
            _shared_table = build_prime_table(max(limit, 1024))
        return _shared_table


def factorize(n: int, table: PrimeTable) -> Factorization:
    """Prime factorization of 1 <= n <= table.limit; n = 1 yields the empty product."""
    if n < 1 or n > table.limit:
        raise ValueError(f"n={n} outside table range [1, {table.limit}]")
    spf = table.smallest_prime_factor
    pairs: list[tuple[int, int]] = []
    m = n
    while m > 1:
        p = int(spf[m])
        e = 0
        while m % p == 0:
            m //= p
            e += 1
        pairs.append((p, e))
    return Factorization(n=n, prime_powers=tuple(pairs))


def divisors(n: int, table: PrimeTable) -> list[int]:
    """All divisors of n in ascending order; length equals d(n)."""
    fac = factorize(n, table)
    divs = [1]
    for p, e in fac.prime_powers:
        pk = 1
        block = list(divs)
        for _ in range(e):
            pk *= p
            divs.extend(d * pk for d in block)
    divs.sort()
    return divs


def arithmetic_statistics(n: int, table: PrimeTable) -> ArithmeticStatistics:
    """(Omega(n), omega(n), d(n), P+(n), mu(n)) with P+(1)=1 and mu(1)=1."""
    fac = factorize(n, table)
    return ArithmeticStatistics(
        big_omega=fac.big_omega,
        little_omega=fac.little_omega,
        divisor_count=fac.divisor_count,
        largest_prime_factor=fac.largest_prime_factor,
        mobius=fac.mobius,
    )


@dataclass(frozen=True)
class MultiplicativeFunction:
    """A multiplicative function given by its values on prime powers.

    ``prime_power_value(p, e)`` must return the value at p^e; value_at_1 is 1.
    For the completely multiplicative kind the constructor takes values at the
    primes only and raises them to powers.
    """

    kind: str  # "completely-multiplicative" | "multiplicative"
    prime_power_value: Callable[[int, int], complex]

    @staticmethod
    def completely_multiplicative(
        prime_value: Callable[[int], complex],
    ) -> "MultiplicativeFunction":
        return MultiplicativeFunction(
            kind="completely-multiplicative",
            prime_power_value=lambda p, e: prime_value(p) ** e,
        )

    @staticmethod
    def multiplicative(
        prime_power_value: Callable[[int, int], complex],
    ) -> "MultiplicativeFunction":
        return MultiplicativeFunction(
            kind="multiplicative", prime_power_value=prime_power_value
        )


def evaluate_multiplicative(
    f: MultiplicativeFunction, n: int, table: PrimeTable
) -> complex:
    """Value of f at n as the product of its prime-power values; f(1) = 1."""
    fac = factorize(n, table)
    value: complex = 1.0
    for p, e in fac.prime_powers:
        value *= f.prime_power_value(p, e)
    return value


def multiplicative_value_table(
    f: MultiplicativeFunction, limit: int, table: PrimeTable | None = None
) -> np.ndarray:
    """Values f(1..limit) as a float64/complex array (index 0 unused, set to 0).

    Bulk evaluation via per-prime-power slice multiplication; requires all
    prime-power values to be nonzero (telescoping ratios are used).
    """
    if limit < 1:
        raise ValueError("limit must be >= 1")
    if table is None or table.limit < limit:
        table = shared_prime_table(limit)
    probe = f.prime_power_value(2, 1) if limit >= 2 else 1.0
    dtype = np.complex128 if isinstance(probe, complex) else np.float64
    values = np.ones(limit + 1, dtype=dtype)
    values[0] = 0.0
    for p in table.primes_up_to(limit):
        p = int(p)
        prev: complex = 1.0
        pe = p
        e = 1
        while pe <= limit:
            cur = f.prime_power_value(p, e)
            if cur == 0:
                raise ValueError(
                    f"bulk evaluation requires nonzero prime-power values; "
                    f"f({p}^{e}) = 0"
                )
            values[pe::pe] *= cur / prev
            prev = cur
            pe *= p
            e += 1
    return values


def smooth_integers(limit: int, y: int, table: PrimeTable | None = None) -> np.ndarray:
    """Sorted array of all y-smooth integers n <= limit (n = 1 included).

    Depth-first over primes <= y, so the cost scales with the size of the
    smooth set rather than with limit.
    """
    if limit < 1:
        raise ValueError("limit must be >= 1")
    if table is None or table.limit < min(y, limit):
        table = shared_prime_table(min(y, limit))
    primes = [int(p) for p in table.primes_up_to(min(y, limit))]
    out: list[int] = []

    def descend(value: int, start: int) -> None:
        out.append(value)
        for i in range(start, len(primes)):
            p = primes[i]
            v = value * p
            if v > limit:
                break
            while v <= limit:
                descend(v, i + 1)
                v *= p

    descend(1, 0)
    result = np.array(sorted(out), dtype=np.int64)
    return result


def smooth_count(x: int, y: int, table: PrimeTable | None = None) -> int:
    """Psi(x, y): number of y-smooth integers n <= x, counting n = 1."""
    if x < 1 or y < 1:
        raise ValueError("smooth_count requires x >= 1 and y >= 1")
    if y >= x:
        return x
    if table is None or table.limit < y:
        table = shared_prime_table(y)
    primes = [int(p) for p in table.primes_up_to(y)]

    def count(bound: int, start: int) -> int:
        total = 1
        for i in range(start, len(primes)):
            p = primes[i]
            b = bound // p
            if b < 1:
                break
            while b >= 1:
                total += count(b, i + 1)
                b //= p
        return total

    return count(x, 0)


def mertens_sum(y: int, table: PrimeTable | None = None) -> float:
    """Exact partial sum sum_{p <= y} (log p)/p over sieved primes; y >= 2."""
    if y < 2:
        raise ValueError(f"mertens_sum needs y >= 2, got {y}")
    if table is None or table.limit < y:
        table = shared_prime_table(y)
    p = table.primes_up_to(y).astype(np.float64)
    return float(np.sum(np.log(p) / p))


def _iterated_log_thresholds(k: int) -> float:
    x = math.e**math.e
    for _ in range(k - 2):
        x = math.exp(x)
    return x


def iterated_log(x: float, k: int = 1) -> float:
    """k-fold natural logarithm with the clamp log_k x = 1 for x <= x_k.

    x_2 = e^e and x_{k+1} = e^{x_k}; no clamp is applied for k = 1.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if k == 1:
        return math.log(x)
    if x <= _iterated_log_thresholds(k):
        return 1.0
    v = float(x)
    for _ in range(k):
        v = math.log(v)
    return v


def divisor_count_sieve(limit: int) -> np.ndarray:
    """d(n) for all n <= limit as an int64 array (index 0 unused).

    Hyperbola pairing: each divisor pair (a, n/a) with a < sqrt(n) is counted
    twice, perfect squares once, so only a <= sqrt(limit) slices are touched.
    """
    if limit < 1:
        raise ValueError("limit must be >= 1")
    counts = np.zeros(limit + 1, dtype=np.int64)
    for a in range(1, math.isqrt(limit) + 1):
        counts[a * a] += 1
        if a * (a + 1) <= limit:
            counts[a * (a + 1) :: a] += 2
    return counts


def completely_multiplicative_prefix_sums(
    prime_value_squared: Callable[[np.ndarray], np.ndarray],
    thresholds: Sequence[int],
    table: PrimeTable | None = None,
    block_size: int = 4_000_000,
) -> np.ndarray:
    """Prefix sums sum_{t <= z} u(t) of a completely multiplicative u >= 0.

    ``prime_value_squared`` maps an array of primes p to u(p).  The sum is
    exact (every integer up to max(thresholds) is visited once) but runs in
    numpy blocks: within a block, all prime factors <= sqrt(max) are divided
    out by slicing, and whatever remains of each integer is a single prime
    > sqrt(max), handled vectorized.

    Returns the prefix sums evaluated at each threshold, in the given order.
    """
    thresholds = [int(z) for z in thresholds]
    if any(z < 1 for z in thresholds):
        raise ValueError("thresholds must be >= 1")
    z_max = max(thresholds)
    root = max(math.isqrt(z_max), 2)
    if table is None or table.limit < root:
        table = shared_prime_table(root)
    small_primes = table.primes_up_to(root)
    small_u = prime_value_squared(small_primes).astype(np.float64)

    order = np.argsort(thresholds, kind="stable")
    results = np.zeros(len(thresholds), dtype=np.float64)
    running = 0.0
    pos = 0  # next threshold to snapshot (in sorted order)
    sorted_thresholds = [thresholds[i] for i in order]

    lo = 1
    while lo <= z_max:
        hi = min(lo + block_size - 1, z_max)
        size = hi - lo + 1
        rem = np.arange(lo, hi + 1, dtype=np.int64)
        val = np.ones(size, dtype=np.float64)
        for p, up in zip(small_primes.tolist(), small_u.tolist()):
            pe = p
            while pe <= hi:
                s = ((lo + pe - 1) // pe) * pe
                if s > hi:
                    break
                sl = slice(s - lo, size, pe)
                rem[sl] //= p
                val[sl] *= up
                pe *= p
        big = rem > 1
        if np.any(big):
            val[big] *= prime_value_squared(rem[big])
        cumulative = np.cumsum(val)
        while pos < len(sorted_thresholds) and sorted_thresholds[pos] <= hi:
            z = sorted_thresholds[pos]
            results[order[pos]] = running + cumulative[z - lo]
            pos += 1
        running += cumulative[-1]
        lo = hi + 1
    return results
