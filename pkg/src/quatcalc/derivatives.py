"""Numerical HR and generalized HR (GHR) derivatives of quaternion functions.

A quaternion function f: H -> H is seen as a function of the four real
components (a, b, c, d).  The eight HR derivatives repackage the four real
partials with the imaginary units attached on the right (left flavor) or on
the left (right flavor):

    left   d f / d q        = (f_a - f_b i - f_c j - f_d k) / 4
    right  d_r f / d q      = (f_a - i f_b - j f_c - k f_d) / 4

and analogously for the involved variables q^i, q^j, q^k and the conjugate
family q*, q^(i*), q^(j*), q^(k*) with the sign patterns below.  The GHR
derivative with respect to q^mu replaces the fixed units by the rotated basis
i^mu, j^mu, k^mu, which is what makes product and chain rules work for
non-analytic targets such as |q|^2.

All partials come from central differences; nothing here requires f to be
given in closed form.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .quaternion import (AXES, UNITS, Quaternion, involute, mu_basis, rotate)

QFunction = Callable[[Quaternion], Quaternion]

# Central-difference step defaults: first order, and the outer step of the
# nested scheme for second order.
DEFAULT_H = 1e-6
DEFAULT_H2 = 1e-4

# An axis this small cannot be normalized meaningfully by rotation.
DEGENERATE_AXIS = 1e-9

# Sign patterns for the eight derivatives, applied to (f_a, f_b*i, f_c*j, f_d*k).
_SIGNS = {
    ("q", False): (1, -1, -1, -1),
    ("i", False): (1, -1, 1, 1),
    ("j", False): (1, 1, -1, 1),
    ("k", False): (1, 1, 1, -1),
    ("q", True): (1, 1, 1, 1),
    ("i", True): (1, 1, -1, -1),
    ("j", True): (1, -1, 1, -1),
    ("k", True): (1, -1, -1, 1),
}


class EvaluationError(ValueError):
    """A function produced a non-finite value at a stencil point."""

    def __init__(self, message: str, point: Quaternion):
        super().__init__(f"{message} at {tuple(point)}")
        self.point = point


class DegenerateAxisError(ValueError):
    """The shifted rotation axis g(q)*mu collapsed below the usable threshold."""


@dataclass(frozen=True)
class RealPartials:
    """Central-difference partials of f along the four real components."""

    d_qa: Quaternion
    d_qb: Quaternion
    d_qc: Quaternion
    d_qd: Quaternion
    point: Quaternion
    step: float

    def as_tuple(self):
        return (self.d_qa, self.d_qb, self.d_qc, self.d_qd)


@dataclass(frozen=True)
class DerivativeSet:
    """The eight HR derivatives of f at a point, in one flavor."""

    wrt_q: Quaternion
    wrt_qi: Quaternion
    wrt_qj: Quaternion
    wrt_qk: Quaternion
    wrt_qc: Quaternion
    wrt_qic: Quaternion
    wrt_qjc: Quaternion
    wrt_qkc: Quaternion
    flavor: str

    def wrt(self, axis: str, conj: bool = False) -> Quaternion:
        name = {"1": "q", "i": "qi", "j": "qj", "k": "qk"}[axis]
        return getattr(self, f"wrt_{name}c" if conj else f"wrt_{name}")


@dataclass(frozen=True)
class GhrPair:
    """GHR derivatives with respect to q^mu and q^(mu*)."""

    d_mu: Quaternion
    d_mu_conj: Quaternion
    mu: Quaternion


def _evaluate(f: QFunction, p: Quaternion) -> Quaternion:
    value = f(p)
    if not isinstance(value, Quaternion):
        value = Quaternion.from_components(value)
    if not value.is_finite():
        raise EvaluationError("function evaluation is not finite", p)
    return value


def real_partials(f: QFunction, q: Quaternion, h: float = DEFAULT_H) -> RealPartials:
    """Central differences (f(q + h e) - f(q - h e)) / 2h along e in {1,i,j,k}."""
    if h <= 0.0:
        raise ValueError("step size must be positive")
    a, b, c, d = q
    inv = 1.0 / (2.0 * h)
    partials = []
    for offsets in ((h, 0.0, 0.0, 0.0), (0.0, h, 0.0, 0.0),
                    (0.0, 0.0, h, 0.0), (0.0, 0.0, 0.0, h)):
        plus = Quaternion(a + offsets[0], b + offsets[1], c + offsets[2], d + offsets[3])
        minus = Quaternion(a - offsets[0], b - offsets[1], c - offsets[2], d - offsets[3])
        partials.append((_evaluate(f, plus) - _evaluate(f, minus)) * inv)
    return RealPartials(partials[0], partials[1], partials[2], partials[3], q, h)


def _combine(parts, units, signs, side: str) -> Quaternion:
    fa, fb, fc, fd = parts
    iu, ju, ku = units
    if side == "left":
        total = fa * signs[0] + (fb * iu) * signs[1] + (fc * ju) * signs[2] + (fd * ku) * signs[3]
    else:
        total = fa * signs[0] + (iu * fb) * signs[1] + (ju * fc) * signs[2] + (ku * fd) * signs[3]
    return total * 0.25


def _hr_set(parts, units, side: str) -> DerivativeSet:
    values = {}
    for axis in ("q", "i", "j", "k"):
        key = "q" if axis == "q" else f"q{axis}"
        values[f"wrt_{key}"] = _combine(parts, units, _SIGNS[(axis, False)], side)
        values[f"wrt_{key}c"] = _combine(parts, units, _SIGNS[(axis, True)], side)
    return DerivativeSet(flavor=side, **values)


def left_hr(f: QFunction, q: Quaternion, h: float = DEFAULT_H) -> DerivativeSet:
    """All eight left HR derivatives of f at q."""
    parts = real_partials(f, q, h).as_tuple()
    return _hr_set(parts, (UNITS["i"], UNITS["j"], UNITS["k"]), "left")


def right_hr(f: QFunction, q: Quaternion, h: float = DEFAULT_H) -> DerivativeSet:
    """All eight right HR derivatives of f at q (units multiply from the left)."""
    parts = real_partials(f, q, h).as_tuple()
    return _hr_set(parts, (UNITS["i"], UNITS["j"], UNITS["k"]), "right")


def left_ghr(f: QFunction, q: Quaternion, mu: Quaternion,
             h: float = DEFAULT_H) -> GhrPair:
    """Left GHR derivatives of f with respect to q^mu and q^(mu*)."""
    if mu.modulus() < DEGENERATE_AXIS:
        raise DegenerateAxisError("degenerate rotation axis")
    basis = mu_basis(mu)
    fa, fb, fc, fd = real_partials(f, q, h).as_tuple()
    mixed = fb * basis.i_mu + fc * basis.j_mu + fd * basis.k_mu
    return GhrPair(d_mu=(fa - mixed) * 0.25, d_mu_conj=(fa + mixed) * 0.25, mu=mu)


def right_ghr(f: QFunction, q: Quaternion, mu: Quaternion,
              h: float = DEFAULT_H) -> GhrPair:
    """Right GHR derivatives of f with respect to q^mu and q^(mu*)."""
    if mu.modulus() < DEGENERATE_AXIS:
        raise DegenerateAxisError("degenerate rotation axis")
    basis = mu_basis(mu)
    fa, fb, fc, fd = real_partials(f, q, h).as_tuple()
    mixed = basis.i_mu * fb + basis.j_mu * fc + basis.k_mu * fd
    return GhrPair(d_mu=(fa - mixed) * 0.25, d_mu_conj=(fa + mixed) * 0.25, mu=mu)


@dataclass(frozen=True)
class SecondOrderSet:
    """Nested second-order left GHR derivatives for a pair of axes (mu, nu).

    ``mu_nu`` is d^2 f / dq^mu dq^nu, the outer mu-derivative of the inner
    nu-derivative, and so on.  Mixed orders do not commute in general.
    """

    mu_nu: Quaternion
    mu_nu_conj: Quaternion
    mu_conj_nu: Quaternion
    mu_conj_nu_conj: Quaternion


def second_order_left(f: QFunction, q: Quaternion, mu: Quaternion, nu: Quaternion,
                      h2: float = DEFAULT_H2, h: float = DEFAULT_H) -> SecondOrderSet:
    """Second-order derivatives by differentiating the inner derivative field."""
    def inner(p: Quaternion) -> GhrPair:
        return left_ghr(f, p, nu, h)

    outer_plain = left_ghr(lambda p: inner(p).d_mu, q, mu, h2)
    outer_conj = left_ghr(lambda p: inner(p).d_mu_conj, q, mu, h2)
    return SecondOrderSet(
        mu_nu=outer_plain.d_mu,
        mu_nu_conj=outer_conj.d_mu,
        mu_conj_nu=outer_plain.d_mu_conj,
        mu_conj_nu_conj=outer_conj.d_mu_conj,
    )


def second_order_right(f: QFunction, q: Quaternion, mu: Quaternion, nu: Quaternion,
                       h2: float = DEFAULT_H2, h: float = DEFAULT_H) -> SecondOrderSet:
    """Right-flavor counterpart of second_order_left."""
    def inner(p: Quaternion) -> GhrPair:
        return right_ghr(f, p, nu, h)

    outer_plain = right_ghr(lambda p: inner(p).d_mu, q, mu, h2)
    outer_conj = right_ghr(lambda p: inner(p).d_mu_conj, q, mu, h2)
    return SecondOrderSet(
        mu_nu=outer_plain.d_mu,
        mu_nu_conj=outer_conj.d_mu,
        mu_conj_nu=outer_plain.d_mu_conj,
        mu_conj_nu_conj=outer_conj.d_mu_conj,
    )


def check_product_rule(f: QFunction, g: QFunction, q: Quaternion, mu: Quaternion,
                       h: float = DEFAULT_H, conjugate: bool = False) -> float:
    """Residual of the GHR product rule for f*g at q.

    d(fg)/dq^mu = f * dg/dq^mu + df/dq^(g(q) mu) * g, and the same shape for
    the conjugate variable with the shifted axis g(q) mu.  The shift uses the
    value of g at the point, so g(q) mu must stay away from zero.
    """
    gq = _evaluate(g, q)
    axis = gq * mu
    if axis.modulus() < DEGENERATE_AXIS:
        raise DegenerateAxisError("degenerate rotation axis")
    fq = _evaluate(f, q)
    lhs = left_ghr(lambda p: f(p) * g(p), q, mu, h)
    dg = left_ghr(g, q, mu, h)
    df_shift = left_ghr(f, q, axis, h)
    if conjugate:
        rhs = fq * dg.d_mu_conj + df_shift.d_mu_conj * gq
        return abs(lhs.d_mu_conj - rhs)
    rhs = fq * dg.d_mu + df_shift.d_mu * gq
    return abs(lhs.d_mu - rhs)


def check_chain_rule(f: QFunction, g: QFunction, q: Quaternion, mu: Quaternion,
                     nu: Quaternion, h: float = DEFAULT_H,
                     conjugate: bool = False) -> float:
    """Residual of the GHR chain rule for f(g(q)) at q.

    d f(g)/dq^mu = sum over eta in {1,i,j,k} of
    df/dg^(nu eta) * d g^(nu eta)/dq^mu, for any nonzero nu.
    """
    if mu.modulus() < DEGENERATE_AXIS or nu.modulus() < DEGENERATE_AXIS:
        raise DegenerateAxisError("degenerate rotation axis")
    s = _evaluate(g, q)
    lhs = left_ghr(lambda p: f(g(p)), q, mu, h)
    total = Quaternion(0.0, 0.0, 0.0, 0.0)
    for eta in AXES:
        axis = nu * UNITS[eta]
        inner = left_ghr(f, s, axis, h).d_mu
        outer = left_ghr(lambda p, ax=axis: rotate(g(p), ax), q, mu, h)
        total = total + inner * (outer.d_mu_conj if conjugate else outer.d_mu)
    return abs((lhs.d_mu_conj if conjugate else lhs.d_mu) - total)


def conjugation_relation(f: QFunction, q: Quaternion, mu: Quaternion,
                         h: float = DEFAULT_H) -> float:
    """Largest residual among the four left/right conjugation identities.

    d_r f/dq^mu = (d f*/dq^(mu*))*, d_r f/dq^(mu*) = (d f*/dq^mu)*, and the
    two mirrored forms expressing the left derivatives through right ones.
    """
    fc = lambda p: f(p).conjugate()
    left_f = left_ghr(f, q, mu, h)
    right_f = right_ghr(f, q, mu, h)
    left_fc = left_ghr(fc, q, mu, h)
    right_fc = right_ghr(fc, q, mu, h)
    residuals = (
        abs(right_f.d_mu - left_fc.d_mu_conj.conjugate()),
        abs(right_f.d_mu_conj - left_fc.d_mu.conjugate()),
        abs(left_f.d_mu - right_fc.d_mu_conj.conjugate()),
        abs(left_f.d_mu_conj - right_fc.d_mu.conjugate()),
    )
    return max(residuals)


def differential_consistency(f: QFunction, q: Quaternion, dq: Quaternion,
                             h: float = DEFAULT_H) -> float:
    """Error of the first-order reconstruction df = sum d f/dq^eta dq^eta."""
    ds = left_hr(f, q, h)
    predicted = Quaternion(0.0, 0.0, 0.0, 0.0)
    for eta in AXES:
        predicted = predicted + ds.wrt(eta) * involute(dq, eta)
    actual = _evaluate(f, q + dq) - _evaluate(f, q)
    return abs(actual - predicted)


def is_real_valued_near(f: QFunction, q: Quaternion, h: float = DEFAULT_H,
                        tol: float = 1e-12) -> bool:
    """True when f stays real (imaginary part <= tol) on the difference stencil."""
    a, b, c, d = q
    points = [q]
    for offsets in ((h, 0.0, 0.0, 0.0), (0.0, h, 0.0, 0.0),
                    (0.0, 0.0, h, 0.0), (0.0, 0.0, 0.0, h)):
        points.append(Quaternion(a + offsets[0], b + offsets[1], c + offsets[2], d + offsets[3]))
        points.append(Quaternion(a - offsets[0], b - offsets[1], c - offsets[2], d - offsets[3]))
    return all(_evaluate(f, p).vector_modulus() <= tol for p in points)
