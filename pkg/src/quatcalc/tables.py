"""Closed-form GHR derivative catalogue for elementary quaternion functions.

Each family pairs an evaluator with the two derivative columns in the
"times mu" convention:

    col_mu      = d f / d q^mu     * mu
    col_mu_conj = d f / d q^(mu*)  * mu

Multiplying by mu on the right absorbs the rotated basis and keeps the
formulas free of mu inverses; the bare derivative is recovered by a single
right-multiplication with mu^-1.  Every family is cross-validated against the
numerical GHR engine, which is the point of keeping value and derivative
next to each other.

Parameters omega, nu, lam are fixed quaternion constants; g always denotes
the inner linear map omega*q*nu + lam (or its conjugate variant), and f the
value of the family at the point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional

import numpy as np

from . import derivatives
from .quaternion import ONE, Quaternion, rotate
from .sampling import random_quaternion

MIN_MODULUS = 1e-9
DEFAULT_EXP_TERMS = 30


def _real(x: float) -> Quaternion:
    return Quaternion(float(x), 0.0, 0.0, 0.0)


def _re(q: Quaternion) -> float:
    return q.a


@dataclass(frozen=True)
class TableEntry:
    """One instantiated family: the name plus whatever parameters it takes."""

    family: str
    omega: Optional[Quaternion] = None
    nu: Optional[Quaternion] = None
    lam: Optional[Quaternion] = None
    n: Optional[int] = None
    terms: Optional[int] = None

    def describe(self) -> str:
        bits = [self.family]
        if self.n is not None:
            bits.append(f"n={self.n}")
        if self.terms is not None:
            bits.append(f"terms={self.terms}")
        return " ".join(bits)


class EntryDerivatives(NamedTuple):
    """The two closed-form columns at a point, both already times mu."""

    d_mu_times_mu: Quaternion
    d_mu_conj_times_mu: Quaternion

    def bare(self, mu: Quaternion) -> tuple[Quaternion, Quaternion]:
        inv = mu.inverse()
        return (self.d_mu_times_mu * inv, self.d_mu_conj_times_mu * inv)


@dataclass(frozen=True)
class FamilySpec:
    """Evaluator, derivative columns, guards and samplers for one family."""

    name: str
    value: Callable[[TableEntry, Quaternion], Quaternion]
    columns: Callable[[TableEntry, Quaternion, Quaternion], EntryDerivatives]
    domain: Callable[[TableEntry, Quaternion], Optional[str]]
    sample_entry: Callable[[np.random.Generator], TableEntry]
    sample_point: Callable[[TableEntry, np.random.Generator], Quaternion]
    scale_class: str
    real_valued: bool


def _no_guard(entry, q):
    return None


def _guard_modulus(entry, q):
    if q.modulus() < MIN_MODULUS:
        return f"requires |q| >= {MIN_MODULUS}"
    return None


def _guard_vector(entry, q):
    if q.vector_modulus() < MIN_MODULUS:
        return f"requires |Im(q)| >= {MIN_MODULUS}"
    return None


def _guard_arctan(entry, q):
    if q.vector_modulus() < MIN_MODULUS:
        return f"requires |Im(q)| >= {MIN_MODULUS}"
    if q.modulus() < MIN_MODULUS:
        return f"requires |q| >= {MIN_MODULUS}"
    return None


def _linear_inner(entry: TableEntry, q: Quaternion) -> Quaternion:
    return entry.omega * q * entry.nu + entry.lam


def _conj_linear_inner(entry: TableEntry, q: Quaternion) -> Quaternion:
    return entry.omega * q.conjugate() * entry.nu + entry.lam


def _guard_linear_inner(entry, q):
    if _linear_inner(entry, q).modulus() < MIN_MODULUS:
        return f"requires |omega q nu + lam| >= {MIN_MODULUS}"
    return None


def _guard_conj_linear_inner(entry, q):
    if _conj_linear_inner(entry, q).modulus() < MIN_MODULUS:
        return f"requires |omega q* nu + lam| >= {MIN_MODULUS}"
    return None


def _sample_params(rng: np.random.Generator) -> dict:
    return {
        "omega": random_quaternion(rng, -1.0, 1.0),
        "nu": random_quaternion(rng, -1.0, 1.0),
        "lam": random_quaternion(rng, -1.0, 1.0),
    }


def _sample_plain(family: str):
    def sample(rng):
        return TableEntry(family=family)
    return sample


def _sample_with_params(family: str):
    def sample(rng):
        return TableEntry(family=family, **_sample_params(rng))
    return sample


def _point_any(entry, rng):
    return random_quaternion(rng, -2.0, 2.0)


def _point_away_from_zero(entry, rng):
    return random_quaternion(rng, -2.0, 2.0, min_modulus=0.1)


def _point_vector(entry, rng):
    for _ in range(1000):
        q = random_quaternion(rng, -2.0, 2.0)
        if q.vector_modulus() >= 0.2:
            return q
    raise RuntimeError("could not sample an admissible point")


def _point_inner(inner):
    def sample(entry, rng):
        for _ in range(1000):
            q = random_quaternion(rng, -2.0, 2.0)
            if inner(entry, q).modulus() >= 0.1:
                return q
        raise RuntimeError("could not sample an admissible point")
    return sample


# --- family evaluators and columns ------------------------------------------

def _linear_value(e, q):
    return _linear_inner(e, q)


def _linear_cols(e, q, mu):
    nm = e.nu * mu
    return EntryDerivatives(e.omega * _re(nm), (e.omega * nm.conjugate()) * -0.5)


def _conj_linear_value(e, q):
    return _conj_linear_inner(e, q)


def _conj_linear_cols(e, q, mu):
    nm = e.nu * mu
    return EntryDerivatives((e.omega * nm.conjugate()) * -0.5, e.omega * _re(nm))


def _square_value(e, q):
    return q * q


def _square_cols(e, q, mu):
    qm = q * mu
    col1 = q * _re(mu) + _real(_re(qm))
    col2 = (q * mu.conjugate()) * -0.5 + qm.conjugate() * -0.5
    return EntryDerivatives(col1, col2)


def _conj_square_value(e, q):
    qc = q.conjugate()
    return qc * qc


def _conj_square_cols(e, q, mu):
    qc = q.conjugate()
    qcm = qc * mu
    col1 = (qc * mu.conjugate()) * -0.5 + qcm.conjugate() * -0.5
    col2 = qc * _re(mu) + _real(_re(qcm))
    return EntryDerivatives(col1, col2)


def _linear_square_value(e, q):
    g = _linear_inner(e, q)
    return g * g


def _linear_square_cols(e, q, mu):
    g = _linear_inner(e, q)
    nm = e.nu * mu
    ngm = e.nu * g * mu
    col1 = (g * e.omega) * _re(nm) + e.omega * _re(ngm)
    col2 = (g * e.omega * nm.conjugate()) * -0.5 + (e.omega * ngm.conjugate()) * -0.5
    return EntryDerivatives(col1, col2)


def _conj_linear_square_value(e, q):
    g = _conj_linear_inner(e, q)
    return g * g


def _conj_linear_square_cols(e, q, mu):
    g = _conj_linear_inner(e, q)
    nm = e.nu * mu
    ngm = e.nu * g * mu
    col1 = (g * e.omega * nm.conjugate()) * -0.5 + (e.omega * ngm.conjugate()) * -0.5
    col2 = (g * e.omega) * _re(nm) + e.omega * _re(ngm)
    return EntryDerivatives(col1, col2)


def _inverse_value(e, q):
    return q.inverse()


def _inverse_cols(e, q, mu):
    qi = q.inverse()
    col1 = qi * -_re(qi * mu)
    col2 = (qi * mu.conjugate() * qi.conjugate()) * 0.5
    return EntryDerivatives(col1, col2)


def _conj_inverse_value(e, q):
    return q.conjugate().inverse()


def _conj_inverse_cols(e, q, mu):
    ci = q.conjugate().inverse()
    col1 = (ci * mu.conjugate() * q.inverse()) * 0.5
    col2 = ci * -_re(ci * mu)
    return EntryDerivatives(col1, col2)


def _linear_inverse_value(e, q):
    return _linear_inner(e, q).inverse()


def _linear_inverse_cols(e, q, mu):
    fv = _linear_inner(e, q).inverse()
    nfm = e.nu * fv * mu
    col1 = (fv * e.omega) * -_re(nfm)
    col2 = (fv * e.omega * nfm.conjugate()) * 0.5
    return EntryDerivatives(col1, col2)


def _conj_linear_inverse_value(e, q):
    return _conj_linear_inner(e, q).inverse()


def _conj_linear_inverse_cols(e, q, mu):
    fv = _conj_linear_inner(e, q).inverse()
    nfm = e.nu * fv * mu
    col1 = (fv * e.omega * nfm.conjugate()) * 0.5
    col2 = (fv * e.omega) * -_re(nfm)
    return EntryDerivatives(col1, col2)


def _real_part_value(e, q):
    return _real(q.a)


def _real_part_cols(e, q, mu):
    quarter = mu * 0.25
    return EntryDerivatives(quarter, quarter)


def _linear_real_part_value(e, q):
    return _real(_re(_linear_inner(e, q)))


def _linear_real_part_cols(e, q, mu):
    col1 = (mu * e.nu * e.omega) * 0.25
    col2 = (mu * e.omega.conjugate() * e.nu.conjugate()) * 0.25
    return EntryDerivatives(col1, col2)


def _conj_linear_real_part_value(e, q):
    return _real(_re(_conj_linear_inner(e, q)))


def _conj_linear_real_part_cols(e, q, mu):
    col1 = (mu * e.omega.conjugate() * e.nu.conjugate()) * 0.25
    col2 = (mu * e.nu * e.omega) * 0.25
    return EntryDerivatives(col1, col2)


def _vector_modulus_value(e, q):
    return _real(q.vector_modulus())


def _vector_modulus_cols(e, q, mu):
    q_hat = q.vector() / q.vector_modulus()
    mq = mu * q_hat
    return EntryDerivatives(mq * -0.25, mq * 0.25)


def _unit_pure_axis_value(e, q):
    return q.vector() / q.vector_modulus()


def _unit_pure_axis_cols(e, q, mu):
    alpha = q.vector_modulus()
    q_hat = q.vector() / alpha
    core = (mu.conjugate() * 2.0 + mu - rotate(mu, q_hat)) * (0.25 / alpha)
    return EntryDerivatives(core, -core)


def _arctan_arg_value(e, q):
    return _real(math.atan2(q.vector_modulus(), q.a))


def _arctan_arg_cols(e, q, mu):
    n2 = q.modulus_squared()
    q_hat = q.vector() / q.vector_modulus()
    col1 = (mu * q_hat * q.conjugate()) * (-0.25 / n2)
    col2 = (mu * q_hat * q) * (0.25 / n2)
    return EntryDerivatives(col1, col2)


def _unit_vector_value(e, q):
    return q / q.modulus()


def _unit_vector_cols(e, q, mu):
    mod = q.modulus()
    col1 = _real(_re(mu) / mod) - (q * mu * q.conjugate()) * (0.25 / mod ** 3)
    col2 = mu.conjugate() * (-0.5 / mod) - (q * mu * q) * (0.25 / mod ** 3)
    return EntryDerivatives(col1, col2)


def _conj_unit_vector_value(e, q):
    return q.conjugate() / q.modulus()


def _conj_unit_vector_cols(e, q, mu):
    mod = q.modulus()
    qc = q.conjugate()
    col1 = mu.conjugate() * (-0.5 / mod) - (qc * mu * qc) * (0.25 / mod ** 3)
    col2 = _real(_re(mu) / mod) - (qc * mu * q) * (0.25 / mod ** 3)
    return EntryDerivatives(col1, col2)


def _linear_unit_vector_value(e, q):
    g = _linear_inner(e, q)
    return g / g.modulus()


def _linear_unit_vector_cols(e, q, mu):
    g = _linear_inner(e, q)
    mod = g.modulus()
    nm = e.nu * mu
    wgm = e.omega.conjugate() * g * mu
    col1 = e.omega * (_re(nm) / (2.0 * mod)) \
        + (g * e.nu.conjugate() * wgm.conjugate()) * (0.25 / mod ** 3)
    col2 = (e.omega * nm.conjugate()) * (-0.25 / mod) \
        + (g * e.nu.conjugate()) * (-_re(wgm) / (2.0 * mod ** 3))
    return EntryDerivatives(col1, col2)


def _conj_linear_modulus_value(e, q):
    return _real(_conj_linear_inner(e, q).modulus())


def _conj_linear_modulus_cols(e, q, mu):
    g = _conj_linear_inner(e, q)
    mod = g.modulus()
    wm = e.omega.conjugate() * mu
    ngm = e.nu * g.conjugate() * mu
    col1 = (g * e.nu.conjugate()) * (_re(wm) / (2.0 * mod)) \
        + (e.omega * ngm.conjugate()) * (-0.25 / mod)
    col2 = (g * e.nu.conjugate() * wm.conjugate()) * (-0.25 / mod) \
        + e.omega * (_re(ngm) / (2.0 * mod))
    return EntryDerivatives(col1, col2)


def _conj_linear_unit_vector_value(e, q):
    g = _conj_linear_inner(e, q)
    return g / g.modulus()


def _conj_linear_unit_vector_cols(e, q, mu):
    g = _conj_linear_inner(e, q)
    mod = g.modulus()
    fv = g / mod
    nm = e.nu * mu
    dmod1, dmod2 = _conj_linear_modulus_cols(e, q, mu)
    col1 = (e.omega * nm.conjugate()) * (-0.5 / mod) - (fv * dmod1) * (1.0 / mod)
    col2 = e.omega * (_re(nm) / mod) - (fv * dmod2) * (1.0 / mod)
    return EntryDerivatives(col1, col2)


def _modulus_value(e, q):
    return _real(q.modulus())


def _modulus_cols(e, q, mu):
    mod = q.modulus()
    return EntryDerivatives((mu * q.conjugate()) * (0.25 / mod), (mu * q) * (0.25 / mod))


def _modulus_squared_value(e, q):
    return _real(q.modulus_squared())


def _modulus_squared_cols(e, q, mu):
    return EntryDerivatives((mu * q.conjugate()) * 0.5, (mu * q) * 0.5)


def _linear_modulus_value(e, q):
    return _real(_linear_inner(e, q).modulus())


def _linear_modulus_cols(e, q, mu):
    g = _linear_inner(e, q)
    mod = g.modulus()
    nm = e.nu * mu
    wgm = e.omega.conjugate() * g * mu
    col1 = (g.conjugate() * e.omega) * (_re(nm) / (2.0 * mod)) \
        + (e.nu.conjugate() * wgm.conjugate()) * (-0.25 / mod)
    col2 = (g.conjugate() * e.omega * nm.conjugate()) * (-0.25 / mod) \
        + e.nu.conjugate() * (_re(wgm) / (2.0 * mod))
    return EntryDerivatives(col1, col2)


def _linear_modulus_squared_value(e, q):
    return _real(_linear_inner(e, q).modulus_squared())


def _linear_modulus_squared_cols(e, q, mu):
    g = _linear_inner(e, q)
    nm = e.nu * mu
    wgm = e.omega.conjugate() * g * mu
    col1 = (g.conjugate() * e.omega) * _re(nm) + (e.nu.conjugate() * wgm.conjugate()) * -0.5
    col2 = (g.conjugate() * e.omega * nm.conjugate()) * -0.5 + e.nu.conjugate() * _re(wgm)
    return EntryDerivatives(col1, col2)


def _conj_linear_modulus_squared_value(e, q):
    return _real(_conj_linear_inner(e, q).modulus_squared())


def _conj_linear_modulus_squared_cols(e, q, mu):
    g = _conj_linear_inner(e, q)
    wm = e.omega.conjugate() * mu
    ngm = e.nu * g.conjugate() * mu
    col1 = (g * e.nu.conjugate()) * _re(wm) + (e.omega * ngm.conjugate()) * -0.5
    col2 = (g * e.nu.conjugate() * wm.conjugate()) * -0.5 + e.omega * _re(ngm)
    return EntryDerivatives(col1, col2)


def _power_value(e, q):
    result = ONE
    for _ in range(e.n):
        result = result * q
    return result


def _power_sums(q: Quaternion, mu: Quaternion, n: int) -> tuple[Quaternion, Quaternion]:
    """Inner sums of the power rule: sum over m of q^(n-m) Re(q^(m-1) mu)
    and -1/2 sum of q^(n-m) (q^(m-1) mu)*."""
    powers = [ONE]
    for _ in range(n):
        powers.append(powers[-1] * q)
    plain = Quaternion(0.0, 0.0, 0.0, 0.0)
    conj = Quaternion(0.0, 0.0, 0.0, 0.0)
    for m in range(1, n + 1):
        head = powers[m - 1] * mu
        plain = plain + powers[n - m] * _re(head)
        conj = conj + powers[n - m] * head.conjugate()
    return plain, conj * -0.5


def _power_cols(e, q, mu):
    plain, conj = _power_sums(q, mu, e.n)
    return EntryDerivatives(plain, conj)


def _exponential_value(e, q):
    total = ONE
    term = ONE
    for n in range(1, e.terms + 1):
        term = term * q / n
        total = total + term
    return total


def _exponential_cols(e, q, mu):
    plain_total = Quaternion(0.0, 0.0, 0.0, 0.0)
    conj_total = Quaternion(0.0, 0.0, 0.0, 0.0)
    factorial = 1.0
    for n in range(1, e.terms + 1):
        factorial *= n
        plain, conj = _power_sums(q, mu, n)
        plain_total = plain_total + plain / factorial
        conj_total = conj_total + conj / factorial
    return EntryDerivatives(plain_total, conj_total)


def exp_series_tail_bound(entry: TableEntry, q: Quaternion, mu: Quaternion) -> float:
    """Bound on the derivative mass dropped by truncating the exponential series."""
    n = entry.terms
    mod = q.modulus()
    return mod ** (n + 1) / math.factorial(n + 1) * math.exp(mod) * abs(mu)


def _sample_power(rng):
    return TableEntry(family="power", n=int(rng.integers(2, 6)))


def _sample_exponential(rng):
    return TableEntry(family="exponential", terms=DEFAULT_EXP_TERMS)


FAMILIES: dict[str, FamilySpec] = {}


def _register(name, value, columns, domain, sample_entry, sample_point,
              scale_class, real_valued=False):
    FAMILIES[name] = FamilySpec(name=name, value=value, columns=columns,
                                domain=domain, sample_entry=sample_entry,
                                sample_point=sample_point, scale_class=scale_class,
                                real_valued=real_valued)


_register("linear", _linear_value, _linear_cols, _no_guard,
          _sample_with_params("linear"), _point_any, "linear")
_register("conj_linear", _conj_linear_value, _conj_linear_cols, _no_guard,
          _sample_with_params("conj_linear"), _point_any, "linear")
_register("square", _square_value, _square_cols, _no_guard,
          _sample_plain("square"), _point_any, "quadratic")
_register("conj_square", _conj_square_value, _conj_square_cols, _no_guard,
          _sample_plain("conj_square"), _point_any, "quadratic")
_register("linear_square", _linear_square_value, _linear_square_cols, _no_guard,
          _sample_with_params("linear_square"), _point_any, "quadratic")
_register("conj_linear_square", _conj_linear_square_value, _conj_linear_square_cols,
          _no_guard, _sample_with_params("conj_linear_square"), _point_any, "quadratic")
_register("inverse", _inverse_value, _inverse_cols, _guard_modulus,
          _sample_plain("inverse"), _point_away_from_zero, "linear")
_register("conj_inverse", _conj_inverse_value, _conj_inverse_cols, _guard_modulus,
          _sample_plain("conj_inverse"), _point_away_from_zero, "linear")
_register("linear_inverse", _linear_inverse_value, _linear_inverse_cols,
          _guard_linear_inner, _sample_with_params("linear_inverse"),
          _point_inner(_linear_inner), "linear")
_register("conj_linear_inverse", _conj_linear_inverse_value, _conj_linear_inverse_cols,
          _guard_conj_linear_inner, _sample_with_params("conj_linear_inverse"),
          _point_inner(_conj_linear_inner), "linear")
_register("real_part", _real_part_value, _real_part_cols, _no_guard,
          _sample_plain("real_part"), _point_any, "linear", real_valued=True)
_register("linear_real_part", _linear_real_part_value, _linear_real_part_cols,
          _no_guard, _sample_with_params("linear_real_part"), _point_any,
          "linear", real_valued=True)
_register("conj_linear_real_part", _conj_linear_real_part_value,
          _conj_linear_real_part_cols, _no_guard,
          _sample_with_params("conj_linear_real_part"), _point_any,
          "linear", real_valued=True)
_register("vector_modulus", _vector_modulus_value, _vector_modulus_cols,
          _guard_vector, _sample_plain("vector_modulus"), _point_vector,
          "linear", real_valued=True)
_register("unit_pure_axis", _unit_pure_axis_value, _unit_pure_axis_cols,
          _guard_vector, _sample_plain("unit_pure_axis"), _point_vector, "linear")
_register("arctan_arg", _arctan_arg_value, _arctan_arg_cols, _guard_arctan,
          _sample_plain("arctan_arg"), _point_vector, "linear", real_valued=True)
_register("unit_vector", _unit_vector_value, _unit_vector_cols, _guard_modulus,
          _sample_plain("unit_vector"), _point_away_from_zero, "linear")
_register("conj_unit_vector", _conj_unit_vector_value, _conj_unit_vector_cols,
          _guard_modulus, _sample_plain("conj_unit_vector"),
          _point_away_from_zero, "linear")
_register("linear_unit_vector", _linear_unit_vector_value, _linear_unit_vector_cols,
          _guard_linear_inner, _sample_with_params("linear_unit_vector"),
          _point_inner(_linear_inner), "linear")
_register("conj_linear_unit_vector", _conj_linear_unit_vector_value,
          _conj_linear_unit_vector_cols, _guard_conj_linear_inner,
          _sample_with_params("conj_linear_unit_vector"),
          _point_inner(_conj_linear_inner), "linear")
_register("modulus", _modulus_value, _modulus_cols, _guard_modulus,
          _sample_plain("modulus"), _point_away_from_zero, "linear", real_valued=True)
_register("modulus_squared", _modulus_squared_value, _modulus_squared_cols,
          _no_guard, _sample_plain("modulus_squared"), _point_any,
          "quadratic", real_valued=True)
_register("linear_modulus", _linear_modulus_value, _linear_modulus_cols,
          _guard_linear_inner, _sample_with_params("linear_modulus"),
          _point_inner(_linear_inner), "linear", real_valued=True)
_register("conj_linear_modulus", _conj_linear_modulus_value, _conj_linear_modulus_cols,
          _guard_conj_linear_inner, _sample_with_params("conj_linear_modulus"),
          _point_inner(_conj_linear_inner), "linear", real_valued=True)
_register("linear_modulus_squared", _linear_modulus_squared_value,
          _linear_modulus_squared_cols, _no_guard,
          _sample_with_params("linear_modulus_squared"), _point_any,
          "quadratic", real_valued=True)
_register("conj_linear_modulus_squared", _conj_linear_modulus_squared_value,
          _conj_linear_modulus_squared_cols, _no_guard,
          _sample_with_params("conj_linear_modulus_squared"), _point_any,
          "quadratic", real_valued=True)
_register("power", _power_value, _power_cols, _no_guard,
          _sample_power, _point_any, "quadratic")
_register("exponential", _exponential_value, _exponential_cols, _no_guard,
          _sample_exponential, _point_any, "quadratic")


def catalogue() -> tuple[FamilySpec, ...]:
    """All registered families, in a stable order."""
    return tuple(FAMILIES.values())


def _check_entry(entry: TableEntry) -> FamilySpec:
    spec = FAMILIES.get(entry.family)
    if spec is None:
        raise ValueError(f"unknown table family {entry.family!r}")
    if entry.family == "power" and (entry.n is None or entry.n < 1):
        raise ValueError("power: n must be a positive integer")
    if entry.family == "exponential" and (entry.terms is None or entry.terms < 1):
        raise ValueError("exponential: terms must be a positive integer")
    return spec


def eval_entry(entry: TableEntry, q: Quaternion) -> Quaternion:
    """Value of the family at q, after checking the domain guard."""
    spec = _check_entry(entry)
    violation = spec.domain(entry, q)
    if violation:
        raise ValueError(f"{entry.family}: {violation}")
    return spec.value(entry, q)


def derivative(entry: TableEntry, q: Quaternion, mu: Quaternion) -> EntryDerivatives:
    """Closed-form derivative columns (times mu) of the family at q."""
    spec = _check_entry(entry)
    if mu.modulus() == 0.0:
        raise ValueError("rotation axis must be nonzero")
    violation = spec.domain(entry, q)
    if violation:
        raise ValueError(f"{entry.family}: {violation}")
    return spec.columns(entry, q, mu)


def as_function(entry: TableEntry) -> Callable[[Quaternion], Quaternion]:
    spec = _check_entry(entry)
    return lambda p: spec.value(entry, p)


def conj_gradient(entry: TableEntry, q: Quaternion) -> Quaternion:
    """Closed-form d f / d q* for real-valued families, used by descent."""
    return derivative(entry, q, ONE).d_mu_conj_times_mu


class CrossCheck(NamedTuple):
    closed_mu: Quaternion
    closed_mu_conj: Quaternion
    numerical_mu: Quaternion
    numerical_mu_conj: Quaternion
    residual_mu: float
    residual_mu_conj: float


def cross_validate(entry: TableEntry, q: Quaternion, mu: Quaternion,
                   h: float = derivatives.DEFAULT_H) -> CrossCheck:
    """Compare the closed-form columns against the numerical GHR derivative.

    Residuals are relative: |closed - numerical| / (1 + |closed|).
    """
    closed = derivative(entry, q, mu)
    pair = derivatives.left_ghr(as_function(entry), q, mu, h)
    num_mu = pair.d_mu * mu
    num_conj = pair.d_mu_conj * mu
    res_mu = abs(closed.d_mu_times_mu - num_mu) / (1.0 + abs(closed.d_mu_times_mu))
    res_conj = abs(closed.d_mu_conj_times_mu - num_conj) / (1.0 + abs(closed.d_mu_conj_times_mu))
    return CrossCheck(closed.d_mu_times_mu, closed.d_mu_conj_times_mu,
                      num_mu, num_conj, res_mu, res_conj)
