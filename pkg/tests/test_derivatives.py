"""Numerical HR/GHR engine: golden values, calculus rules, second order."""

import math

import pytest

from quatcalc.derivatives import (DegenerateAxisError, EvaluationError,
                                  check_chain_rule, check_product_rule,
                                  conjugation_relation,
                                  differential_consistency, left_ghr, left_hr,
                                  real_partials, right_ghr, right_hr,
                                  second_order_left)
from quatcalc.quaternion import (AXES, I, J, K, ONE, ZERO, Quaternion,
                                 involute, isclose, rotate)
from quatcalc.sampling import make_rng, random_quaternion

SEED = 20240229


def f_sq(p):
    return p * p


def f_conj(p):
    return p.conjugate()


def f_mod2(p):
    return Quaternion.from_real(p.modulus_squared())


def f_cross(p):
    return Quaternion.from_real(p.b * p.c)


def f_exp(p, terms=30):
    total = ONE
    term = ONE
    for n in range(1, terms + 1):
        term = term * p / n
        total = total + term
    return total


def test_real_partials_oracle():
    parts = real_partials(f_sq, I)
    assert isclose(parts.d_qa, 2.0 * I, abs_tol=1e-9)
    assert isclose(parts.d_qb, Quaternion(-2.0, 0.0, 0.0, 0.0), abs_tol=1e-9)
    assert isclose(parts.d_qc, ZERO, abs_tol=1e-9)
    assert isclose(parts.d_qd, ZERO, abs_tol=1e-9)
    assert parts.as_tuple() == (parts.d_qa, parts.d_qb, parts.d_qc, parts.d_qd)


def test_real_partials_rejects_bad_step():
    with pytest.raises(ValueError, match="step size must be positive"):
        real_partials(f_sq, I, h=0.0)


def test_evaluation_error_carries_point():
    def blows_up(p):
        return Quaternion(math.inf, 0.0, 0.0, 0.0)

    with pytest.raises(EvaluationError, match="not finite") as info:
        real_partials(blows_up, ONE)
    assert info.value.point is not None


def test_identity_function_golden():
    rng = make_rng(SEED)
    for _ in range(20):
        q = random_quaternion(rng)
        ds = left_hr(lambda p: p, q)
        assert isclose(ds.wrt_q, ONE, abs_tol=1e-9)
        assert isclose(ds.wrt_qc, Quaternion(-0.5, 0.0, 0.0, 0.0), abs_tol=1e-9)
        # d q/d q^(eta*) = (-eta*/2) eta^-1 = +1/2 on the imaginary axes.
        for axis in ("i", "j", "k"):
            assert abs(ds.wrt(axis)) < 1e-9
            assert isclose(ds.wrt(axis, conj=True),
                           Quaternion(0.5, 0.0, 0.0, 0.0), abs_tol=1e-9)


def test_square_and_conjugate_golden():
    rng = make_rng(SEED, stream=1)
    for _ in range(20):
        q = random_quaternion(rng)
        assert isclose(left_hr(f_sq, q).wrt_q, q + q.a, abs_tol=1e-8)
        assert isclose(left_hr(f_conj, q).wrt_q,
                       Quaternion(-0.5, 0.0, 0.0, 0.0), abs_tol=1e-9)
        assert isclose(left_hr(f_mod2, q).wrt_q, q.conjugate() * 0.5,
                       abs_tol=1e-8)
        assert isclose(left_hr(f_mod2, q).wrt_qc, q * 0.5, abs_tol=1e-8)


def test_right_flavor_identity():
    rng = make_rng(SEED, stream=2)
    q = random_quaternion(rng)
    ds = right_hr(lambda p: p, q)
    assert isclose(ds.wrt_q, ONE, abs_tol=1e-9)
    ds = right_hr(f_conj, q)
    assert isclose(ds.wrt_q, Quaternion(-0.5, 0.0, 0.0, 0.0), abs_tol=1e-9)


def test_flavors_differ_for_nonreal_functions():
    # f(p) = i p j: d f/d q^i is 0 on the left but k on the right.
    sandwich = lambda p: I * p * J
    q = Quaternion(0.3, -0.7, 1.1, 0.4)
    left = left_hr(sandwich, q).wrt_qi
    right = right_hr(sandwich, q).wrt_qi
    assert abs(left) < 1e-9
    assert isclose(right, K, abs_tol=1e-9)


def test_flavors_agree_for_real_functions():
    rng = make_rng(SEED, stream=3)
    for _ in range(20):
        q = random_quaternion(rng)
        left = left_hr(f_mod2, q)
        right = right_hr(f_mod2, q)
        for axis in AXES:
            for conj in (False, True):
                assert abs(left.wrt(axis, conj) - right.wrt(axis, conj)) < 1e-12


def test_ghr_reduces_to_hr_at_unit_axis():
    rng = make_rng(SEED, stream=4)
    for _ in range(20):
        q = random_quaternion(rng)
        pair = left_ghr(f_sq, q, ONE)
        ds = left_hr(f_sq, q)
        assert abs(pair.d_mu - ds.wrt_q) == 0.0
        assert abs(pair.d_mu_conj - ds.wrt_qc) == 0.0


def test_ghr_rejects_degenerate_axis():
    with pytest.raises(DegenerateAxisError):
        left_ghr(f_sq, ONE, ZERO)
    with pytest.raises(DegenerateAxisError):
        right_ghr(f_sq, ONE, Quaternion(0.0, 1e-12, 0.0, 0.0))


def test_ghr_identity_columns():
    # d q/d q^mu * mu = Re(mu) and d q/d q^(mu*) * mu = -mu*/2 for any axis.
    rng = make_rng(SEED, stream=5)
    for _ in range(20):
        q = random_quaternion(rng)
        mu = random_quaternion(rng, min_modulus=0.1)
        pair = left_ghr(lambda p: p, q, mu)
        assert isclose(pair.d_mu * mu, Quaternion.from_real(mu.a), abs_tol=1e-8)
        assert isclose(pair.d_mu_conj * mu, mu.conjugate() * -0.5, abs_tol=1e-8)


def test_ghr_rotation_transport():
    # (d f/d q^mu)^nu = d f^nu / d q^(nu mu)
    rng = make_rng(SEED, stream=6)
    for _ in range(10):
        q = random_quaternion(rng)
        mu = random_quaternion(rng, min_modulus=0.1)
        nu = random_quaternion(rng, min_modulus=0.1)
        lhs = rotate(left_ghr(f_sq, q, mu).d_mu, nu)
        rhs = left_ghr(lambda p: rotate(f_sq(p), nu), q, nu * mu).d_mu
        assert abs(lhs - rhs) < 1e-7


def test_product_rule():
    rng = make_rng(SEED, stream=7)
    for _ in range(20):
        q = random_quaternion(rng, min_modulus=0.1)
        mu = random_quaternion(rng, min_modulus=0.1)
        assert check_product_rule(f_sq, lambda p: p, q, mu) < 1e-6
        assert check_product_rule(f_conj, f_exp, q, mu) < 1e-5
        assert check_product_rule(f_sq, f_conj, q, mu, conjugate=True) < 1e-5


def test_product_rule_degenerate_axis():
    q = Quaternion(0.4, 0.1, -0.2, 0.3)
    vanishing = lambda p: p - q
    with pytest.raises(DegenerateAxisError, match="degenerate rotation axis"):
        check_product_rule(f_sq, vanishing, q, I)


def test_chain_rule():
    rng = make_rng(SEED, stream=8)
    linear = lambda p: Quaternion(0.3, 0.5, -0.2, 0.1) * p + ONE
    for _ in range(10):
        q = random_quaternion(rng)
        mu = random_quaternion(rng, min_modulus=0.1)
        nu = random_quaternion(rng, min_modulus=0.1)
        assert check_chain_rule(f_sq, linear, q, mu, nu) < 1e-6
        assert check_chain_rule(f_exp, linear, q, mu, nu, conjugate=True) < 1e-5


def test_chain_rule_any_intermediate_axis():
    # The eta sum telescopes identically for every nonzero nu.
    q = Quaternion(0.2, -0.6, 0.3, 0.9)
    mu = Quaternion(1.0, 0.5, -0.3, 0.2)
    linear = lambda p: p * Quaternion(0.2, -0.4, 0.7, 0.1)
    for nu in (ONE, I, Quaternion(0.3, 1.2, -0.8, 0.5)):
        assert check_chain_rule(f_sq, linear, q, mu, nu) < 1e-6


def test_chain_rule_degenerate_axis():
    with pytest.raises(DegenerateAxisError):
        check_chain_rule(f_sq, f_sq, ONE, ZERO, I)
    with pytest.raises(DegenerateAxisError):
        check_chain_rule(f_sq, f_sq, ONE, I, ZERO)


def test_conjugation_relations():
    rng = make_rng(SEED, stream=9)
    for _ in range(10):
        q = random_quaternion(rng)
        mu = random_quaternion(rng, min_modulus=0.1)
        assert conjugation_relation(f_sq, q, mu) < 1e-12
        assert conjugation_relation(f_exp, q, mu) < 1e-12


def test_differential_consistency_quarters():
    rng = make_rng(SEED, stream=10)
    for _ in range(10):
        q = random_quaternion(rng)
        dq = random_quaternion(rng) * 1e-3
        e1 = differential_consistency(f_sq, q, dq)
        e2 = differential_consistency(f_sq, q, dq * 0.5)
        assert e1 < 1e-5
        if e1 > 1e-12:
            assert e1 / e2 == pytest.approx(4.0, rel=0.05)


def test_second_order_laplacian():
    rng = make_rng(SEED, stream=11)
    for _ in range(10):
        q = random_quaternion(rng)
        mu = random_quaternion(rng, min_modulus=0.1)
        mixed = second_order_left(f_mod2, q, mu, mu).mu_nu_conj
        assert isclose(mixed * 16.0, Quaternion.from_real(8.0), abs_tol=1e-2)


def test_mixed_derivatives_do_not_commute():
    rng = make_rng(SEED, stream=12)
    q = random_quaternion(rng)
    one_i = second_order_left(f_cross, q, ONE, I).mu_nu
    i_one = second_order_left(f_cross, q, I, ONE).mu_nu
    assert isclose(one_i, K * 0.125, abs_tol=1e-3)
    assert isclose(i_one, K * -0.125, abs_tol=1e-3)
    assert abs(one_i - i_one) == pytest.approx(0.25, abs=1e-3)


def test_square_mixed_derivatives_commute():
    # q^2 is the exception: every mixed pair agrees, here (i, j) both -1/4.
    rng = make_rng(SEED, stream=13)
    q = random_quaternion(rng)
    ij = second_order_left(f_sq, q, I, J).mu_nu
    ji = second_order_left(f_sq, q, J, I).mu_nu
    assert isclose(ij, Quaternion(-0.25, 0.0, 0.0, 0.0), abs_tol=1e-3)
    assert abs(ij - ji) < 1e-3


def test_left_hr_of_involved_arguments():
    # d q^i / d q^i = 1: the involution seen through its own variable.
    rng = make_rng(SEED, stream=14)
    q = random_quaternion(rng)
    ds = left_hr(lambda p: involute(p, "i"), q)
    assert isclose(ds.wrt_qi, ONE, abs_tol=1e-9)
    assert abs(ds.wrt_q) < 1e-9
