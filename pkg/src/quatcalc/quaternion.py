"""Quaternion value type and the algebraic operations the calculus is built on.

A quaternion q = a + i*b + j*c + k*d is stored as four doubles.  The imaginary
units multiply by the usual rules ij = k = -ji, jk = i = -kj, ki = j = -ik,
i^2 = j^2 = k^2 = -1, which makes the product non-commutative; everything in
this package that looks surprising downstream traces back to that fact.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

ABS_TOL = 1e-12
REL_TOL = 1e-10

# Tolerance for "is this a unit / pure quaternion" preconditions.
UNIT_TOL = 1e-9


class Quaternion(NamedTuple):
    """Immutable quaternion a + i*b + j*c + k*d."""

    a: float
    b: float
    c: float
    d: float

    @classmethod
    def from_real(cls, x: float) -> "Quaternion":
        return cls(float(x), 0.0, 0.0, 0.0)

    @classmethod
    def from_components(cls, comps) -> "Quaternion":
        a, b, c, d = comps
        return cls(float(a), float(b), float(c), float(d))

    def __add__(self, other):
        if isinstance(other, Quaternion):
            return Quaternion(self.a + other.a, self.b + other.b,
                              self.c + other.c, self.d + other.d)
        if isinstance(other, (int, float)):
            return Quaternion(self.a + other, self.b, self.c, self.d)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Quaternion):
            return Quaternion(self.a - other.a, self.b - other.b,
                              self.c - other.c, self.d - other.d)
        if isinstance(other, (int, float)):
            return Quaternion(self.a - other, self.b, self.c, self.d)
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, (int, float)):
            return Quaternion(other - self.a, -self.b, -self.c, -self.d)
        return NotImplemented

    def __neg__(self) -> "Quaternion":
        return Quaternion(-self.a, -self.b, -self.c, -self.d)

    def __mul__(self, other):
        if isinstance(other, Quaternion):
            a1, b1, c1, d1 = self
            a2, b2, c2, d2 = other
            return Quaternion(
                a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
                a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
                a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
                a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
            )
        if isinstance(other, (int, float)):
            return Quaternion(self.a * other, self.b * other,
                              self.c * other, self.d * other)
        return NotImplemented

    def __rmul__(self, other):
        # Scalars commute; quaternion * quaternion goes through __mul__.
        if isinstance(other, (int, float)):
            return Quaternion(other * self.a, other * self.b,
                              other * self.c, other * self.d)
        return NotImplemented

    def __truediv__(self, other):
        # Division is only defined by a real scalar: q / mu is ambiguous
        # (left vs right inverse), so callers multiply by inverse() explicitly.
        if isinstance(other, (int, float)):
            return Quaternion(self.a / other, self.b / other,
                              self.c / other, self.d / other)
        return NotImplemented

    def conjugate(self) -> "Quaternion":
        return Quaternion(self.a, -self.b, -self.c, -self.d)

    def modulus_squared(self) -> float:
        return self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d

    def modulus(self) -> float:
        return math.sqrt(self.modulus_squared())

    __abs__ = modulus

    def inverse(self) -> "Quaternion":
        n2 = self.modulus_squared()
        if n2 == 0.0:
            raise ValueError("zero quaternion has no inverse")
        return Quaternion(self.a / n2, -self.b / n2, -self.c / n2, -self.d / n2)

    def real_part(self) -> float:
        return self.a

    def vector(self) -> "Quaternion":
        """Imaginary (vector) part i*b + j*c + k*d."""
        return Quaternion(0.0, self.b, self.c, self.d)

    def vector_modulus(self) -> float:
        return math.sqrt(self.b * self.b + self.c * self.c + self.d * self.d)

    def is_finite(self) -> bool:
        return all(math.isfinite(x) for x in self)


ZERO = Quaternion(0.0, 0.0, 0.0, 0.0)
ONE = Quaternion(1.0, 0.0, 0.0, 0.0)
I = Quaternion(0.0, 1.0, 0.0, 0.0)
J = Quaternion(0.0, 0.0, 1.0, 0.0)
K = Quaternion(0.0, 0.0, 0.0, 1.0)

UNITS = {"1": ONE, "i": I, "j": J, "k": K}
AXES = ("1", "i", "j", "k")


def isclose(p: Quaternion, q: Quaternion,
            abs_tol: float = ABS_TOL, rel_tol: float = REL_TOL) -> bool:
    """Tolerance-based comparison: true when |p - q| <= abs_tol + rel_tol*scale."""
    scale = max(abs(p), abs(q))
    return abs(p - q) <= abs_tol + rel_tol * scale


def multiply(p: Quaternion, q: Quaternion) -> Quaternion:
    return p * q


def rotate(q: Quaternion, mu: Quaternion) -> Quaternion:
    """Rotation q^mu = mu q mu^-1, computed as mu q mu* / |mu|^2."""
    n2 = mu.modulus_squared()
    if n2 == 0.0:
        raise ValueError("rotation axis must be nonzero")
    return (mu * q * mu.conjugate()) / n2


def involute(q: Quaternion, axis: str) -> Quaternion:
    """Involution q^eta for eta in {1, i, j, k}, applied as exact sign flips.

    q^i = a + i*b - j*c - k*d and cyclically for j, k; axis "1" is the
    identity.  Each involution is self-inverse.
    """
    a, b, c, d = q
    if axis == "1":
        return q
    if axis == "i":
        return Quaternion(a, b, -c, -d)
    if axis == "j":
        return Quaternion(a, -b, c, -d)
    if axis == "k":
        return Quaternion(a, -b, -c, d)
    raise ValueError(f"unknown involution axis {axis!r}")


def involute_conj(q: Quaternion, axis: str) -> Quaternion:
    """Conjugate involution q^(eta*) = (q^eta)* for eta in {1, i, j, k}."""
    return involute(q, axis).conjugate()


def reflect(q: Quaternion, eta: Quaternion) -> Quaternion:
    """Reflection eta q eta across the plane normal to a pure unit eta."""
    if abs(eta.real_part()) > UNIT_TOL:
        raise ValueError("reflection axis must be a pure quaternion")
    if abs(eta.modulus() - 1.0) > UNIT_TOL:
        raise ValueError("reflection axis must have unit modulus")
    return eta * q * eta


@dataclass(frozen=True)
class MuBasis:
    """The rotated imaginary units i^mu, j^mu, k^mu and their 3x3 matrix.

    Row r of ``m`` holds the (i, j, k) components of the r-th rotated unit, so
    the vector part of q^mu is (b, c, d) @ m.  The matrix is orthogonal with
    determinant +1.
    """

    mu: Quaternion
    i_mu: Quaternion
    j_mu: Quaternion
    k_mu: Quaternion
    m: np.ndarray


def mu_basis(mu: Quaternion) -> MuBasis:
    """Rotated basis for a nonzero axis mu; mu = 1 returns the standard units."""
    n2 = mu.modulus_squared()
    if n2 == 0.0:
        raise ValueError("rotation axis must be nonzero")
    a, b, c, d = mu
    m = np.array([
        [a * a + b * b - c * c - d * d, 2 * (a * d + b * c), 2 * (b * d - a * c)],
        [2 * (b * c - a * d), a * a + c * c - b * b - d * d, 2 * (c * d + a * b)],
        [2 * (a * c + b * d), 2 * (c * d - a * b), a * a + d * d - b * b - c * c],
    ]) / n2
    return MuBasis(mu=mu, i_mu=rotate(I, mu), j_mu=rotate(J, mu),
                   k_mu=rotate(K, mu), m=m)


def components_from_involutions(q: Quaternion) -> tuple[float, float, float, float]:
    """Recover (a, b, c, d) from q and its three involutions.

    a = (q + q^i + q^j + q^k)/4, b = -i(q + q^i - q^j - q^k)/4 and cyclically.
    Pairwise association keeps the round trip exact in floating point.
    """
    qi = involute(q, "i")
    qj = involute(q, "j")
    qk = involute(q, "k")
    s_a = (q + qi) + (qj + qk)
    s_b = (q + qi) - (qj + qk)
    s_c = (q - qi) + (qj - qk)
    s_d = (q - qi) - (qj - qk)
    a = (s_a / 4.0).a
    b = ((-I) * (s_b / 4.0)).a
    c = ((-J) * (s_c / 4.0)).a
    d = ((-K) * (s_d / 4.0)).a
    return (a, b, c, d)


def conjugate_links(q: Quaternion) -> dict[str, Quaternion]:
    """Express q*, q^(i*), q^(j*), q^(k*) through q and its involutions.

    q* = (-q + q^i + q^j + q^k)/2, q^(i*) = (q - q^i + q^j + q^k)/2, etc.
    """
    qi = involute(q, "i")
    qj = involute(q, "j")
    qk = involute(q, "k")
    return {
        "conj": (-q + qi + qj + qk) / 2.0,
        "i": (q - qi + qj + qk) / 2.0,
        "j": (q + qi - qj + qk) / 2.0,
        "k": (q + qi + qj - qk) / 2.0,
    }


@dataclass(frozen=True)
class PolarForm:
    """Polar decomposition q = modulus * (cos(angle) + axis * sin(angle)).

    ``axis`` is a pure unit quaternion and ``angle`` lies in [0, pi].  A real
    quaternion has no preferred axis; the i unit is used by convention with
    angle 0 (positive reals) or pi (negative reals).
    """

    modulus: float
    axis: Quaternion
    angle: float

    def to_quaternion(self) -> Quaternion:
        return (math.cos(self.angle) + self.axis * math.sin(self.angle)) * self.modulus


def polar(q: Quaternion) -> PolarForm:
    mod = q.modulus()
    v = q.vector_modulus()
    if v == 0.0:
        return PolarForm(modulus=mod, axis=I, angle=0.0 if q.a >= 0.0 else math.pi)
    axis = q.vector() / v
    angle = math.atan2(v, q.a)
    return PolarForm(modulus=mod, axis=axis, angle=angle)


# One signed term: a float (exponent signs included) with an optional unit,
# or a bare unit.  Anchored scanning keeps "2i4j" and "1++2i" invalid.
_TERM = re.compile(
    r"[+-]?(?:(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?[ijk]?|[ijk])")


def format_quaternion(q: Quaternion) -> str:
    """Render q as "a+bi+cj+dk" with full round-trip (17 digit) precision."""
    parts = [f"{q.a:.17g}"]
    for value, unit in ((q.b, "i"), (q.c, "j"), (q.d, "k")):
        sign = "-" if value < 0 or (value == 0 and math.copysign(1.0, value) < 0) else "+"
        parts.append(f"{sign}{abs(value):.17g}{unit}")
    return "".join(parts)


def parse_quaternion(text: str) -> Quaternion:
    """Parse "a+bi+cj+dk"; terms may be omitted or reordered, signs optional."""
    s = text.strip().replace(" ", "")
    if not s:
        raise ValueError("empty quaternion literal")
    comps = {"": 0.0, "i": 0.0, "j": 0.0, "k": 0.0}
    seen = set()
    idx = 0
    while idx < len(s):
        if idx > 0 and s[idx] not in "+-":
            raise ValueError(f"trailing characters in quaternion literal {text!r}")
        match = _TERM.match(s, idx)
        if match is None:
            raise ValueError(f"bad quaternion term {s[idx:]!r} in {text!r}")
        idx = match.end()
        term = match.group(0)
        unit = term[-1] if term[-1] in "ijk" else ""
        body = term[:-1] if unit else term
        if body in ("", "+", "-"):
            body += "1"
        if unit in seen:
            raise ValueError(f"repeated {unit or 'real'} term in {text!r}")
        seen.add(unit)
        comps[unit] = float(body)
    return Quaternion(comps[""], comps["i"], comps["j"], comps["k"])
