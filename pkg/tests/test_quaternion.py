"""Algebra layer: Hamilton product, involutions, rotations, polar form."""

import math

import numpy as np
import pytest

from quatcalc.quaternion import (ABS_TOL, AXES, I, J, K, ONE, UNITS, ZERO,
                                 Quaternion, components_from_involutions,
                                 conjugate_links, format_quaternion, involute,
                                 involute_conj, isclose, mu_basis,
                                 parse_quaternion, polar, reflect, rotate)
from quatcalc.sampling import make_rng, random_quaternion, random_pure_unit

SEED = 20240117
N_DRAWS = 200


def test_unit_products():
    assert I * J == K
    assert J * K == I
    assert K * I == J
    assert J * I == -K
    assert I * I == -ONE
    assert J * J == -ONE
    assert K * K == -ONE


def test_square_oracle():
    q = Quaternion(1.0, 2.0, 3.0, 4.0)
    assert q * q == Quaternion(-28.0, 4.0, 6.0, 8.0)


def test_cube_oracle():
    q = Quaternion(1.0, 1.0, 0.0, 0.0)
    assert q * q * q == Quaternion(-2.0, 2.0, 0.0, 0.0)


def test_conjugate_and_modulus():
    q = Quaternion(1.0, 2.0, 3.0, 4.0)
    assert q.conjugate() == Quaternion(1.0, -2.0, -3.0, -4.0)
    assert q.modulus_squared() == 30.0
    assert q.modulus() == pytest.approx(math.sqrt(30.0))
    assert q.vector_modulus() == pytest.approx(math.sqrt(29.0))
    assert (q * q.conjugate()).a == pytest.approx(30.0)


def test_inverse():
    q = Quaternion(1.0, 2.0, 3.0, 4.0)
    assert isclose(q * q.inverse(), ONE)
    assert isclose(q.inverse() * q, ONE)
    with pytest.raises(ValueError, match="zero quaternion has no inverse"):
        ZERO.inverse()


def test_inverse_of_product_reverses_factors():
    p = Quaternion(1.0, 1.0, 0.0, 0.0)
    q = Quaternion(1.0, 0.0, 1.0, 0.0)
    assert isclose((p * q).inverse(), q.inverse() * p.inverse())


def test_scalar_operations():
    q = Quaternion(1.0, -2.0, 0.5, 3.0)
    assert 2.0 * q == Quaternion(2.0, -4.0, 1.0, 6.0)
    assert q * 2.0 == 2.0 * q
    assert q / 2.0 == Quaternion(0.5, -1.0, 0.25, 1.5)
    assert q + 1.0 == Quaternion(2.0, -2.0, 0.5, 3.0)
    assert 1.0 - q == Quaternion(0.0, 2.0, -0.5, -3.0)


def test_involutions_oracle():
    q = Quaternion(1.0, 1.0, 1.0, 1.0)
    assert involute(q, "1") == q
    assert involute(q, "i") == Quaternion(1.0, 1.0, -1.0, -1.0)
    assert involute(q, "j") == Quaternion(1.0, -1.0, 1.0, -1.0)
    assert involute(q, "k") == Quaternion(1.0, -1.0, -1.0, 1.0)
    with pytest.raises(ValueError, match="unknown involution axis"):
        involute(q, "x")


def test_involution_is_rotation():
    rng = make_rng(SEED)
    for _ in range(50):
        q = random_quaternion(rng)
        for axis in ("i", "j", "k"):
            assert isclose(involute(q, axis), rotate(q, UNITS[axis]))


def test_involution_self_inverse_and_multiplicative():
    rng = make_rng(SEED, stream=1)
    for _ in range(N_DRAWS):
        p = random_quaternion(rng)
        q = random_quaternion(rng)
        for axis in AXES:
            assert involute(involute(p, axis), axis) == p
            assert isclose(involute(p * q, axis),
                           involute(p, axis) * involute(q, axis))
            assert involute_conj(p, axis) == involute(p, axis).conjugate()


def test_rotation_oracle():
    assert isclose(rotate(I, J), -I)
    assert isclose(rotate(J, I), -J)
    assert isclose(rotate(K, K), K)
    with pytest.raises(ValueError, match="rotation axis must be nonzero"):
        rotate(I, ZERO)


def test_rotation_ignores_axis_scale():
    rng = make_rng(SEED, stream=2)
    for _ in range(50):
        q = random_quaternion(rng)
        mu = random_quaternion(rng, min_modulus=0.1)
        assert isclose(rotate(q, mu), rotate(q, mu * 3.5))
        assert isclose(rotate(rotate(q, mu), mu.inverse()), q)


def test_rotation_preserves_real_part_and_modulus():
    rng = make_rng(SEED, stream=3)
    for _ in range(N_DRAWS):
        q = random_quaternion(rng)
        mu = random_quaternion(rng, min_modulus=0.1)
        r = rotate(q, mu)
        assert r.a == pytest.approx(q.a, abs=1e-12)
        assert r.modulus() == pytest.approx(q.modulus(), abs=1e-12)


def test_reflection():
    assert isclose(reflect(J, I), J)
    assert isclose(reflect(I, I), -I)
    assert isclose(reflect(ONE, I), -ONE)
    with pytest.raises(ValueError, match="pure"):
        reflect(J, Quaternion(0.5, 1.0, 0.0, 0.0))
    with pytest.raises(ValueError, match="unit"):
        reflect(J, Quaternion(0.0, 2.0, 0.0, 0.0))


def test_reflection_is_involutive():
    rng = make_rng(SEED, stream=4)
    for _ in range(50):
        q = random_quaternion(rng)
        eta = random_pure_unit(rng)
        assert isclose(reflect(reflect(q, eta), eta), q)


def test_mu_basis_matches_rotation():
    rng = make_rng(SEED, stream=5)
    for _ in range(50):
        mu = random_quaternion(rng, min_modulus=0.1)
        basis = mu_basis(mu)
        assert isclose(basis.i_mu, rotate(I, mu))
        assert isclose(basis.j_mu, rotate(J, mu))
        assert isclose(basis.k_mu, rotate(K, mu))
        for row, unit in zip(basis.m, (basis.i_mu, basis.j_mu, basis.k_mu)):
            np.testing.assert_allclose(row, [unit.b, unit.c, unit.d],
                                       atol=1e-12)


def test_mu_basis_matrix_is_special_orthogonal():
    rng = make_rng(SEED, stream=6)
    for _ in range(N_DRAWS):
        m = mu_basis(random_quaternion(rng, min_modulus=0.1)).m
        np.testing.assert_allclose(m @ m.T, np.eye(3), atol=1e-12)
        assert np.linalg.det(m) == pytest.approx(1.0, abs=1e-12)


def test_mu_basis_identity_axis():
    basis = mu_basis(ONE)
    assert basis.i_mu == I
    assert basis.j_mu == J
    assert basis.k_mu == K
    with pytest.raises(ValueError, match="nonzero"):
        mu_basis(ZERO)


def test_components_from_involutions_is_exact():
    rng = make_rng(SEED, stream=7)
    for _ in range(N_DRAWS):
        q = random_quaternion(rng, -10.0, 10.0)
        assert components_from_involutions(q) == tuple(q)


def test_conjugate_links():
    rng = make_rng(SEED, stream=8)
    for _ in range(50):
        q = random_quaternion(rng)
        links = conjugate_links(q)
        assert isclose(links["conj"], q.conjugate())
        for axis in ("i", "j", "k"):
            assert isclose(links[axis], involute_conj(q, axis))


def test_polar_roundtrip():
    rng = make_rng(SEED, stream=9)
    for _ in range(N_DRAWS):
        q = random_quaternion(rng)
        form = polar(q)
        assert 0.0 <= form.angle <= math.pi
        assert form.axis.a == pytest.approx(0.0, abs=ABS_TOL)
        assert form.axis.modulus() == pytest.approx(1.0)
        assert isclose(form.to_quaternion(), q)


def test_polar_of_reals():
    form = polar(Quaternion(2.0, 0.0, 0.0, 0.0))
    assert (form.modulus, form.angle) == (2.0, 0.0)
    form = polar(Quaternion(-3.0, 0.0, 0.0, 0.0))
    assert form.modulus == 3.0
    assert form.angle == pytest.approx(math.pi)
    assert isclose(form.to_quaternion(), Quaternion(-3.0, 0.0, 0.0, 0.0))


def test_format_parse_roundtrip():
    rng = make_rng(SEED, stream=10)
    for _ in range(N_DRAWS):
        q = random_quaternion(rng, -100.0, 100.0)
        assert parse_quaternion(format_quaternion(q)) == q


def test_parse_flexible_forms():
    assert parse_quaternion("1+2i+3j+4k") == Quaternion(1.0, 2.0, 3.0, 4.0)
    assert parse_quaternion("-i") == Quaternion(0.0, -1.0, 0.0, 0.0)
    assert parse_quaternion("3k - 2j") == Quaternion(0.0, 0.0, -2.0, 3.0)
    assert parse_quaternion("0") == ZERO
    assert parse_quaternion("1.5e-3i") == Quaternion(0.0, 1.5e-3, 0.0, 0.0)


@pytest.mark.parametrize("text", ["", "1+2i+3i", "1+2x", "1++2i", "2i4j"])
def test_parse_rejects_malformed(text):
    with pytest.raises(ValueError):
        parse_quaternion(text)


def test_noncommutativity_witness():
    p = Quaternion(0.0, 1.0, 0.0, 0.0)
    q = Quaternion(0.0, 0.0, 1.0, 0.0)
    assert p * q != q * p
    assert p * q == -(q * p)
