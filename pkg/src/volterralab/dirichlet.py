"""Truncated Dirichlet-series algebra at the coefficient level.

A polynomial is a sparse complex coefficient vector over integer frequencies
1..N.  All operations are pure; every product or operator application
truncates at an explicit N (default: the larger operand's truncation) and
silently drops frequencies beyond it.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "DirichletPolynomial",
    "VerticalLineSample",
    "multiply",
    "derivative",
    "antiderivative",
    "h2_norm",
    "inner_product",
    "evaluate",
    "partial_sum",
    "horizontal_shift",
    "boundary_samples",
    "polynomial_to_csv",
    "polynomial_from_csv",
]

# Below this truncation, convolutions accumulate into a dense buffer
# (16 bytes per slot); above it they group sparse index arrays instead.
_DENSE_ACCUMULATOR_MAX = 8_000_000


class DirichletPolynomial:
    """Finite Dirichlet series sum a_n n^{-s} with support in 1..truncation.

    Stores only nonzero coefficients as a sorted int64 index array plus a
    complex128 coefficient array.  Instances are immutable.
    """

    __slots__ = ("truncation", "indices", "coefficients")

    def __init__(self, truncation: int, indices: np.ndarray, coefficients: np.ndarray):
        if truncation < 1:
            raise ValueError(f"truncation must be >= 1, got {truncation}")
        indices = np.asarray(indices, dtype=np.int64)
        coefficients = np.asarray(coefficients, dtype=np.complex128)
        if indices.shape != coefficients.shape or indices.ndim != 1:
            raise ValueError("indices and coefficients must be 1-d arrays of equal length")
        if indices.size:
            if indices.min() < 1:
                raise ValueError("frequency indices must be >= 1")
            if indices.max() > truncation:
                raise ValueError(
                    f"index {indices.max()} exceeds truncation {truncation}"
                )
            if np.any(np.diff(indices) <= 0):
                raise ValueError("indices must be strictly increasing")
        keep = coefficients != 0
        if not keep.all():
            indices = indices[keep]
            coefficients = coefficients[keep]
        indices.setflags(write=False)
        coefficients.setflags(write=False)
        object.__setattr__(self, "truncation", truncation)
        object.__setattr__(self, "indices", indices)
        object.__setattr__(self, "coefficients", coefficients)

    def __setattr__(self, name, value):  # pragma: no cover - immutability guard
        raise AttributeError("DirichletPolynomial is immutable")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def from_dict(coeffs: Mapping[int, complex], truncation: int | None = None) -> "DirichletPolynomial":
        items = sorted((int(n), complex(c)) for n, c in coeffs.items() if c != 0)
        if truncation is None:
            truncation = max((n for n, _ in items), default=1)
        idx = np.array([n for n, _ in items], dtype=np.int64)
        val = np.array([c for _, c in items], dtype=np.complex128)
        return DirichletPolynomial(truncation, idx, val)

    @staticmethod
    def zero(truncation: int = 1) -> "DirichletPolynomial":
        return DirichletPolynomial(
            truncation, np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.complex128)
        )

    @staticmethod
    def one(truncation: int = 1) -> "DirichletPolynomial":
        return DirichletPolynomial(
            truncation, np.array([1], dtype=np.int64), np.array([1.0 + 0j])
        )

    @staticmethod
    def basis(n: int, truncation: int | None = None) -> "DirichletPolynomial":
        """e_n, the single frequency n^{-s}."""
        if truncation is None:
            truncation = n
        return DirichletPolynomial(
            truncation, np.array([n], dtype=np.int64), np.array([1.0 + 0j])
        )

    # -- accessors ---------------------------------------------------------

    def coefficient(self, n: int) -> complex:
        pos = np.searchsorted(self.indices, n)
        if pos < self.indices.size and self.indices[pos] == n:
            return complex(self.coefficients[pos])
        return 0j

    def to_dict(self) -> dict[int, complex]:
        return {int(n): complex(c) for n, c in zip(self.indices, self.coefficients)}

    @property
    def support_size(self) -> int:
        return int(self.indices.size)

    @property
    def max_index(self) -> int:
        return int(self.indices[-1]) if self.indices.size else 1

    def is_real(self) -> bool:
        return bool(np.all(self.coefficients.imag == 0))

    def with_truncation(self, truncation: int) -> "DirichletPolynomial":
        """Same coefficients in a new ambient truncation; drops n > truncation."""
        keep = self.indices <= truncation
        return DirichletPolynomial(
            truncation, self.indices[keep], self.coefficients[keep]
        )

    # -- arithmetic conveniences (used heavily by tests) --------------------

    def __add__(self, other: "DirichletPolynomial") -> "DirichletPolynomial":
        n = max(self.truncation, other.truncation)
        idx = np.concatenate([self.indices, other.indices])
        val = np.concatenate([self.coefficients, other.coefficients])
        uniq, inv = np.unique(idx, return_inverse=True)
        acc = np.zeros(uniq.size, dtype=np.complex128)
        np.add.at(acc, inv, val)
        return DirichletPolynomial(n, uniq, acc)

    def __sub__(self, other: "DirichletPolynomial") -> "DirichletPolynomial":
        return self + (other * (-1.0))

    def __mul__(self, scalar: complex) -> "DirichletPolynomial":
        return DirichletPolynomial(
            self.truncation, self.indices, self.coefficients * scalar
        )

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DirichletPolynomial):
            return NotImplemented
        return (
            np.array_equal(self.indices, other.indices)
            and np.array_equal(self.coefficients, other.coefficients)
        )

    def __hash__(self):  # pragma: no cover - identity hashing only
        return id(self)

    def __repr__(self) -> str:
        return (
            f"DirichletPolynomial(truncation={self.truncation}, "
            f"support={self.support_size})"
        )


@dataclass(frozen=True)
class VerticalLineSample:
    """Samples of a polynomial along the vertical line Re s = sigma."""

    sigma: float
    t_values: np.ndarray
    values: np.ndarray


def _accumulate_products(
    pairs: Iterable[tuple[np.ndarray, np.ndarray]], truncation: int
) -> DirichletPolynomial:
    """Sum sparse (index, value) contribution batches into one polynomial."""
    if truncation <= _DENSE_ACCUMULATOR_MAX:
        acc = np.zeros(truncation + 1, dtype=np.complex128)
        for idx, val in pairs:
            acc[idx] += val  # indices within one batch are distinct
        nz = np.flatnonzero(acc)
        nz = nz[nz >= 1]
        return DirichletPolynomial(truncation, nz.astype(np.int64), acc[nz])
    chunks_idx: list[np.ndarray] = []
    chunks_val: list[np.ndarray] = []
    for idx, val in pairs:
        chunks_idx.append(idx)
        chunks_val.append(val)
    if not chunks_idx:
        return DirichletPolynomial.zero(truncation)
    all_idx = np.concatenate(chunks_idx)
    all_val = np.concatenate(chunks_val)
    uniq, inv = np.unique(all_idx, return_inverse=True)
    acc = np.zeros(uniq.size, dtype=np.complex128)
    np.add.at(acc, inv, all_val)
    return DirichletPolynomial(truncation, uniq, acc)


def multiply(
    f: DirichletPolynomial, g: DirichletPolynomial, truncation: int | None = None
) -> DirichletPolynomial:
    """Dirichlet convolution (fg)_n = sum_{k|n} f_k g_{n/k}, truncated.

    Terms with n > truncation are dropped; the default truncation is the
    larger operand's.
    """
    if truncation is None:
        truncation = max(f.truncation, g.truncation)
    outer, inner = (f, g) if f.support_size <= g.support_size else (g, f)

    def contributions():
        for m, c in zip(outer.indices.tolist(), outer.coefficients.tolist()):
            hi = np.searchsorted(inner.indices, truncation // m, side="right")
            if hi == 0:
                continue
            yield inner.indices[:hi] * m, inner.coefficients[:hi] * c

    return _accumulate_products(contributions(), truncation)


def derivative(f: DirichletPolynomial) -> DirichletPolynomial:
    """f'(s) = -sum a_n (log n) n^{-s}; the constant term vanishes."""
    keep = f.indices >= 2
    idx = f.indices[keep]
    val = -f.coefficients[keep] * np.log(idx.astype(np.float64))
    return DirichletPolynomial(f.truncation, idx, val)


def antiderivative(f: DirichletPolynomial) -> DirichletPolynomial:
    """The primitive -int_s^infty f(w) dw, defined when the constant term is 0.

    Coefficientwise: a_n -> -a_n / log n for n >= 2.

    Raises:
        ValueError: if f has a nonzero constant term (the integral diverges).
    """
    if f.coefficient(1) != 0:
        raise ValueError("antiderivative requires a zero constant term")
    idx = f.indices
    val = -f.coefficients / np.log(idx.astype(np.float64))
    return DirichletPolynomial(f.truncation, idx, val)


def h2_norm(f: DirichletPolynomial) -> float:
    """Coefficient-space norm (sum |a_n|^2)^{1/2}, an exact finite sum."""
    return float(np.sqrt(np.sum(np.abs(f.coefficients) ** 2)))


def inner_product(f: DirichletPolynomial, g: DirichletPolynomial) -> complex:
    """sum_n a_n conj(b_n); the second argument is conjugated."""
    common, fi, gi = np.intersect1d(
        f.indices, g.indices, assume_unique=True, return_indices=True
    )
    if common.size == 0:
        return 0j
    return complex(np.sum(f.coefficients[fi] * np.conj(g.coefficients[gi])))


def evaluate(f: DirichletPolynomial, s: complex) -> complex:
    """sum a_n n^{-s} over stored coefficients, compensated summation."""
    if f.indices.size == 0:
        return 0j
    terms = f.coefficients * np.exp(-complex(s) * np.log(f.indices.astype(np.float64)))
    return complex(math.fsum(terms.real), math.fsum(terms.imag))


def partial_sum(f: DirichletPolynomial, m: int) -> DirichletPolynomial:
    """S_m f: keep frequencies n <= m (ambient truncation unchanged)."""
    keep = f.indices <= m
    return DirichletPolynomial(f.truncation, f.indices[keep], f.coefficients[keep])


def horizontal_shift(f: DirichletPolynomial, delta: float) -> DirichletPolynomial:
    """B_delta f(s) = f(s + delta): coefficientwise a_n -> a_n n^{-delta}."""
    if delta < 0:
        raise ValueError("horizontal shift requires delta >= 0")
    damp = f.indices.astype(np.float64) ** (-delta)
    return DirichletPolynomial(f.truncation, f.indices, f.coefficients * damp)


def boundary_samples(
    f: DirichletPolynomial,
    sigma: float,
    t_grid: Sequence[float] | np.ndarray,
) -> VerticalLineSample:
    """Pointwise values f(sigma + it) over a finite grid of t.

    Vectorized in chunks sized to a bounded work buffer; each value agrees
    with evaluate() at the same point up to roundoff.
    """
    t = np.asarray(t_grid, dtype=np.float64)
    values = np.zeros(t.shape, dtype=np.complex128)
    if f.indices.size:
        logn = np.log(f.indices.astype(np.float64))
        damped = f.coefficients * np.exp(-sigma * logn)
        chunk = max(1, 2_000_000 // f.indices.size)
        for start in range(0, t.size, chunk):
            ts = t[start : start + chunk]
            phases = np.exp(np.multiply.outer(ts, logn) * (-1j))
            values[start : start + chunk] = phases @ damped
    values.setflags(write=False)
    return VerticalLineSample(sigma=sigma, t_values=t, values=values)


def polynomial_to_csv(f: DirichletPolynomial, path_or_buffer) -> None:
    """Write coefficients as CSV lines ``n,re,im`` with a header row."""
    own = isinstance(path_or_buffer, (str, bytes)) or hasattr(path_or_buffer, "__fspath__")
    handle = open(path_or_buffer, "w", newline="") if own else path_or_buffer
    try:
        handle.write("n,re,im\n")
        for n, c in zip(f.indices.tolist(), f.coefficients.tolist()):
            handle.write(f"{n},{c.real!r},{c.imag!r}\n")
    finally:
        if own:
            handle.close()


def polynomial_from_csv(path_or_buffer, truncation: int | None = None) -> DirichletPolynomial:
    """Read a polynomial written by :func:`polynomial_to_csv`."""
    own = isinstance(path_or_buffer, (str, bytes)) or hasattr(path_or_buffer, "__fspath__")
    handle = open(path_or_buffer, "r", newline="") if own else path_or_buffer
    try:
        header = handle.readline().strip()
        if header != "n,re,im":
            raise ValueError(f"unexpected CSV header {header!r}")
        coeffs: dict[int, complex] = {}
        for line in handle:
            line = line.strip()
            if not line:
                continue
            n_str, re_str, im_str = line.split(",")
            coeffs[int(n_str)] = complex(float(re_str), float(im_str))
    finally:
        if own:
            handle.close()
    return DirichletPolynomial.from_dict(coeffs, truncation=truncation)
