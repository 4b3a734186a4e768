"""Coefficient-space algebra tests for truncated Dirichlet polynomials."""

import io
import math

import numpy as np
import pytest

from volterralab.dirichlet import (
    DirichletPolynomial,
    antiderivative,
    boundary_samples,
    derivative,
    evaluate,
    h2_norm,
    horizontal_shift,
    inner_product,
    multiply,
    partial_sum,
    polynomial_from_csv,
    polynomial_to_csv,
)
from volterralab.numtheory import factorize, shared_prime_table


def random_polynomial(rng, truncation, support, complex_coeffs=True):
    idx = rng.choice(np.arange(1, truncation + 1), size=support, replace=False)
    if complex_coeffs:
        vals = rng.normal(size=support) + 1j * rng.normal(size=support)
    else:
        vals = rng.normal(size=support) + 0j
    return DirichletPolynomial.from_dict(
        dict(zip(idx.tolist(), vals.tolist())), truncation=truncation
    )


def brute_force_multiply(f, g, truncation):
    out = {}
    for k, a in f.to_dict().items():
        for m, b in g.to_dict().items():
            n = k * m
            if n <= truncation:
                out[n] = out.get(n, 0j) + a * b
    return out


class TestMultiply:
    def test_two_prime_product(self):
        f = DirichletPolynomial.from_dict({1: 1, 2: 1})
        g = DirichletPolynomial.from_dict({1: 1, 3: 1})
        assert multiply(f, g, 6).to_dict() == {1: 1, 2: 1, 3: 1, 6: 1}

    def test_identity_element(self):
        rng = np.random.default_rng(5)
        f = random_polynomial(rng, 50, 10)
        e1 = DirichletPolynomial.one()
        assert multiply(f, e1, 50) == f

    def test_mobius_inversion(self):
        table = shared_prime_table(64)
        zeta = DirichletPolynomial.from_dict({n: 1 for n in range(1, 65)})
        mu = DirichletPolynomial.from_dict(
            {n: factorize(n, table).mobius for n in range(1, 65)}
        )
        product = multiply(zeta, mu, 64)
        assert product.to_dict() == {1: 1}

    def test_matches_double_loop(self):
        rng = np.random.default_rng(42)
        for _ in range(20):
            f = random_polynomial(rng, 200, 12)
            g = random_polynomial(rng, 200, 9)
            expected = brute_force_multiply(f, g, 200)
            got = multiply(f, g, 200).to_dict()
            assert set(got) == set(n for n, c in expected.items() if c != 0)
            for n, c in got.items():
                assert c == pytest.approx(expected[n], rel=1e-12, abs=1e-12)

    def test_untruncated_norm_matches_double_loop(self):
        rng = np.random.default_rng(43)
        f = random_polynomial(rng, 14, 9)
        g = random_polynomial(rng, 14, 9)
        full = brute_force_multiply(f, g, 196)
        norm_sq = sum(abs(c) ** 2 for c in full.values())
        assert h2_norm(multiply(f, g, 196)) == pytest.approx(
            math.sqrt(norm_sq), rel=1e-12
        )

    def test_commutative_associative(self):
        rng = np.random.default_rng(44)
        for _ in range(10):
            f = random_polynomial(rng, 1000, 15)
            g = random_polynomial(rng, 1000, 15)
            h = random_polynomial(rng, 1000, 15)
            fg = multiply(f, g, 1000)
            gf = multiply(g, f, 1000)
            for n in set(fg.to_dict()) | set(gf.to_dict()):
                assert fg.coefficient(n) == pytest.approx(
                    gf.coefficient(n), rel=1e-12, abs=1e-13
                )
            left = multiply(fg, h, 1000)
            right = multiply(f, multiply(g, h, 1000), 1000)
            for n in set(left.to_dict()) | set(right.to_dict()):
                assert left.coefficient(n) == pytest.approx(
                    right.coefficient(n), rel=1e-10, abs=1e-12
                )


class TestDerivativeAntiderivative:
    def test_single_frequency(self):
        f = DirichletPolynomial.basis(2)
        assert derivative(f).to_dict() == {2: -math.log(2)}

    def test_constant_derivative_vanishes(self):
        assert derivative(DirichletPolynomial.one()).support_size == 0

    def test_antiderivative_single(self):
        f = DirichletPolynomial.basis(2)
        assert antiderivative(f).to_dict() == {2: pytest.approx(-1 / math.log(2))}

    def test_antiderivative_of_zero(self):
        assert antiderivative(DirichletPolynomial.zero()).support_size == 0

    def test_rejects_constant_term(self):
        with pytest.raises(ValueError):
            antiderivative(DirichletPolynomial.one())

    def test_mutually_inverse(self):
        rng = np.random.default_rng(11)
        f = random_polynomial(rng, 1000, 60)
        no_const = DirichletPolynomial.from_dict(
            {n: c for n, c in f.to_dict().items() if n >= 2}, truncation=1000
        )
        roundtrip = derivative(antiderivative(no_const))
        assert roundtrip == no_const or all(
            roundtrip.coefficient(n) == pytest.approx(no_const.coefficient(n), rel=1e-14)
            for n in no_const.to_dict()
        )
        roundtrip2 = antiderivative(derivative(f))
        for n, c in f.to_dict().items():
            if n >= 2:
                assert roundtrip2.coefficient(n) == pytest.approx(c, rel=1e-14)
        assert roundtrip2.coefficient(1) == 0


class TestNormsAndInnerProduct:
    def test_sqrt_two(self):
        assert h2_norm(DirichletPolynomial.from_dict({1: 1, 2: 1})) == pytest.approx(
            math.sqrt(2)
        )

    def test_squarefree_product_norm(self):
        # prod_{j<=J} (1 + p_j^{-s}) has squared norm 2^J
        table = shared_prime_table(100)
        poly = DirichletPolynomial.one()
        for j in range(8):
            p = int(table.primes[j])
            factor = DirichletPolynomial.from_dict({1: 1, p: 1})
            poly = multiply(poly, factor, 10**10 // 1)
            assert h2_norm(poly) ** 2 == pytest.approx(2.0 ** (j + 1), rel=1e-12)

    def test_inner_product_is_norm_squared(self):
        rng = np.random.default_rng(3)
        f = random_polynomial(rng, 100, 20)
        assert inner_product(f, f).real == pytest.approx(h2_norm(f) ** 2, rel=1e-13)
        assert inner_product(f, f).imag == pytest.approx(0, abs=1e-13)

    def test_conjugates_second_argument(self):
        f = DirichletPolynomial.from_dict({2: 1j})
        g = DirichletPolynomial.from_dict({2: 1j})
        assert inner_product(f, g) == pytest.approx(1.0 + 0j)

    def test_parseval_against_bohr_lift_monte_carlo(self):
        # <f, g> equals the torus average of Bf * conj(Bg) over d variables
        table = shared_prime_table(100)
        rng = np.random.default_rng(314)
        d = 3
        support = [1, 2, 3, 4, 5, 6, 8, 9, 10, 12, 15, 18, 20, 30]
        f = DirichletPolynomial.from_dict(
            {n: rng.normal() + 1j * rng.normal() for n in support}
        )
        g = DirichletPolynomial.from_dict(
            {n: rng.normal() + 1j * rng.normal() for n in support}
        )
        exponents = {}
        for n in support:
            vec = [0, 0, 0]
            for p, e in factorize(n, table).prime_powers:
                vec[[2, 3, 5].index(p)] = e
            exponents[n] = vec
        samples = 200_000
        theta = rng.uniform(0, 2 * math.pi, size=(samples, d))
        bf = np.zeros(samples, dtype=np.complex128)
        bg = np.zeros(samples, dtype=np.complex128)
        for n in support:
            phase = np.exp(1j * theta @ np.array(exponents[n], dtype=float))
            bf += f.coefficient(n) * phase
            bg += g.coefficient(n) * phase
        mc = np.mean(bf * np.conj(bg))
        exact = inner_product(f, g)
        sigma = np.std(bf * np.conj(bg)) / math.sqrt(samples)
        assert abs(mc - exact) < 5 * sigma + 1e-12


class TestEvaluate:
    def test_at_zero(self):
        f = DirichletPolynomial.from_dict({1: 1, 2: 1})
        assert evaluate(f, 0) == pytest.approx(2.0)

    def test_basel_tail(self):
        n = np.arange(1, 10**6 + 1, dtype=np.int64)
        f = DirichletPolynomial(10**6, n, np.ones(n.size, dtype=np.complex128))
        value = evaluate(f, 2.0)
        assert abs(value - math.pi**2 / 6) < 1e-6

    def test_linearity(self):
        rng = np.random.default_rng(8)
        f = random_polynomial(rng, 60, 10)
        g = random_polynomial(rng, 60, 10)
        s = 0.7 + 1.3j
        combo = f + g * (2.5 - 1j)
        assert evaluate(combo, s) == pytest.approx(
            evaluate(f, s) + (2.5 - 1j) * evaluate(g, s), rel=1e-12
        )


class TestPartialSumAndShift:
    def test_partial_sum_keeps_constant(self):
        f = DirichletPolynomial.from_dict({1: 2, 5: 3, 7: 4})
        assert partial_sum(f, 1).to_dict() == {1: 2}

    def test_zero_shift_is_identity(self):
        rng = np.random.default_rng(2)
        f = random_polynomial(rng, 100, 10)
        assert horizontal_shift(f, 0.0) == f

    def test_shift_norm_strictly_decreasing(self):
        rng = np.random.default_rng(4)
        idx = rng.choice(np.arange(2, 100), size=5, replace=False)
        f = DirichletPolynomial.from_dict({int(n): 1.0 for n in idx})
        norms = [h2_norm(horizontal_shift(f, d)) for d in (0.0, 0.1, 0.5, 1.0, 2.0)]
        assert all(a > b for a, b in zip(norms, norms[1:]))

    def test_negative_shift_rejected(self):
        with pytest.raises(ValueError):
            horizontal_shift(DirichletPolynomial.one(), -0.1)


class TestBoundarySamples:
    def test_constant_polynomial(self):
        f = DirichletPolynomial.from_dict({1: 3.5})
        sample = boundary_samples(f, 0.0, np.linspace(0, 10, 33))
        assert np.allclose(sample.values, 3.5)

    def test_unimodular_frequency(self):
        f = DirichletPolynomial.basis(2)
        sample = boundary_samples(f, 0.0, np.linspace(-5, 5, 101))
        assert np.allclose(np.abs(sample.values), 1.0)

    def test_agrees_with_evaluate(self):
        rng = np.random.default_rng(12)
        f = random_polynomial(rng, 500, 40)
        ts = rng.uniform(-20, 20, size=25)
        sample = boundary_samples(f, 0.3, ts)
        for t, v in zip(ts, sample.values):
            assert v == pytest.approx(evaluate(f, 0.3 + 1j * t), rel=1e-11, abs=1e-12)


class TestCsvRoundTrip:
    def test_round_trip(self):
        rng = np.random.default_rng(77)
        f = random_polynomial(rng, 300, 25)
        buf = io.StringIO()
        polynomial_to_csv(f, buf)
        buf.seek(0)
        g = polynomial_from_csv(buf, truncation=300)
        assert g == f

    def test_header_checked(self):
        with pytest.raises(ValueError):
            polynomial_from_csv(io.StringIO("a,b,c\n1,2,3\n"))

    def test_file_round_trip(self, tmp_path):
        f = DirichletPolynomial.from_dict({1: 1.5, 7: -2.25 + 0.5j})
        path = tmp_path / "poly.csv"
        polynomial_to_csv(f, path)
        text = path.read_text()
        assert text.splitlines()[0] == "n,re,im"
        assert polynomial_from_csv(path) == f


class TestValidation:
    def test_indices_beyond_truncation_rejected(self):
        with pytest.raises(ValueError):
            DirichletPolynomial(5, np.array([6]), np.array([1.0 + 0j]))

    def test_nonpositive_indices_rejected(self):
        with pytest.raises(ValueError):
            DirichletPolynomial(5, np.array([0]), np.array([1.0 + 0j]))

    def test_zero_coefficients_dropped(self):
        f = DirichletPolynomial.from_dict({1: 1.0, 3: 0.0})
        assert f.support_size == 1

    def test_immutability(self):
        f = DirichletPolynomial.one()
        with pytest.raises(AttributeError):
            f.truncation = 10
        with pytest.raises(ValueError):
            f.coefficients[0] = 2.0
