"""Segment-level consequences of the GHR calculus.

The mean value theorem here is an integral identity: the increment of f along
a segment equals the integral of the four-involution derivative pairing with
the segment direction.  The second-order Taylor expansion uses the same
derivative engine twice.  Both are checked numerically, which is what this
module exists for; steepest descent closes the loop from calculus to
optimization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .derivatives import (DEFAULT_H, DEFAULT_H2, QFunction, left_hr)
from .quaternion import AXES, Quaternion, involute, involute_conj

# Error floor model for the remainder fit: second derivatives come from a
# nested difference scheme, so the expansion carries noise of roughly
# curvature_noise * |lambda|^2 on top of a small absolute term.
FLOOR_ABS = 1e-12
FLOOR_CURVATURE = 1e-4


class DivergenceError(RuntimeError):
    """An iteration is moving away from any minimum."""


@dataclass(frozen=True)
class SegmentCheck:
    """Both sides of the mean value identity along one segment."""

    q0: Quaternion
    q1: Quaternion
    panels: int
    lhs: Quaternion
    rhs: Quaternion
    residual: float


@dataclass(frozen=True)
class TaylorFit:
    """Remainder decay of the second-order expansion across shrinking scales."""

    base_point: Quaternion
    direction: Quaternion
    scales: tuple[float, ...]
    errors: tuple[float, ...]
    slope: float
    at_floor: bool
    used: tuple[bool, ...]


@dataclass(frozen=True)
class DescentTrace:
    """Iterates, objective values and gradient norms of a descent run."""

    iterates: tuple[Quaternion, ...]
    values: tuple[float, ...]
    grad_norms: tuple[float, ...]
    step: float


def _segment_integrand(f: QFunction, lam: Quaternion, h: float,
                       real_form: bool) -> Callable[[Quaternion], Quaternion]:
    lam_eta = {eta: involute(lam, eta) for eta in AXES}

    def integrand(p: Quaternion) -> Quaternion:
        ds = left_hr(f, p, h)
        if real_form:
            return Quaternion.from_real(4.0 * (ds.wrt_q * lam).a)
        total = Quaternion(0.0, 0.0, 0.0, 0.0)
        for eta in AXES:
            total = total + ds.wrt(eta) * lam_eta[eta]
        return total

    return integrand


def _simpson(values: Sequence[Quaternion], width: float) -> Quaternion:
    # Composite Simpson over an even number of panels; len(values) is odd.
    total = values[0] + values[-1]
    for idx in range(1, len(values) - 1):
        total = total + values[idx] * (4.0 if idx % 2 else 2.0)
    return total * (width / 3.0)


def mvt_left(f: QFunction, q0: Quaternion, q1: Quaternion, panels: int = 1000,
             h: float = DEFAULT_H, real_form: bool = False) -> SegmentCheck:
    """Check f(q1) - f(q0) against the segment integral of the derivative.

    The right-hand side integrates sum over eta of d f/dq^eta * lambda^eta
    for t in [0, 1] with lambda = q1 - q0, by composite Simpson quadrature.
    With ``real_form`` the real-valued corollary 4 Re(d f/dq * lambda) is
    integrated instead.
    """
    if panels < 2 or panels % 2 != 0:
        raise ValueError("panels must be an even integer >= 2")
    lam = q1 - q0
    integrand = _segment_integrand(f, lam, h, real_form)
    nodes = [q0 + lam * (idx / panels) for idx in range(panels + 1)]
    values = [integrand(p) for p in nodes]
    rhs = _simpson(values, 1.0 / panels)
    lhs = f(q1) - f(q0)
    return SegmentCheck(q0=q0, q1=q1, panels=panels, lhs=lhs, rhs=rhs,
                        residual=abs(lhs - rhs))


def first_order_error(f: QFunction, q0: Quaternion, q1: Quaternion,
                      h: float = DEFAULT_H) -> float:
    """Error of the one-point approximation f(q1) - f(q0) by the derivative at q0."""
    lam = q1 - q0
    ds = left_hr(f, q0, h)
    approx = Quaternion(0.0, 0.0, 0.0, 0.0)
    for eta in AXES:
        approx = approx + ds.wrt(eta) * involute(lam, eta)
    return abs(f(q1) - f(q0) - approx)


def mvt_error_bound_check(f: QFunction, q0: Quaternion, q1: Quaternion,
                          lipschitz: float, h: float = DEFAULT_H,
                          slack: float = 0.1) -> tuple[float, float, bool]:
    """Observed first-order error against the bound 2 L |lambda|^2.

    L is a Lipschitz constant for the derivative set along the segment,
    supplied by the caller.  Returns (observed, bound, within_bound) where the
    bound is allowed the given relative slack.
    """
    lam = q1 - q0
    observed = first_order_error(f, q0, q1, h)
    bound = 2.0 * lipschitz * lam.modulus_squared()
    return observed, bound, observed <= bound * (1.0 + slack)


def taylor2_left(f: QFunction, q0: Quaternion, lam: Quaternion,
                 h: float = DEFAULT_H, h2: float = DEFAULT_H2,
                 center: bool = False) -> Quaternion:
    """Second-order expansion of f at q0 + lam.

    f(q0) + sum_mu d f/dq^mu lam^mu
          + 1/2 sum_{mu,nu} d^2 f/dq^nu dq^mu lam^nu lam^mu

    over mu, nu in {1, i, j, k}.  With ``center`` the quadratic term is the
    conjugate-sandwich variant 1/2 sum lam^(mu*) d^2 f/dq^nu dq^(mu*) lam^nu,
    which agrees for real-valued f.
    """
    base = f(q0)
    first_set = left_hr(f, q0, h)
    total = base
    for mu in AXES:
        total = total + first_set.wrt(mu) * involute(lam, mu)
    half = Quaternion(0.0, 0.0, 0.0, 0.0)
    for mu in AXES:
        def inner(p: Quaternion, _mu=mu) -> Quaternion:
            return left_hr(f, p, h).wrt(_mu, conj=center)

        outer = left_hr(inner, q0, h2)
        for nu in AXES:
            second = outer.wrt(nu)
            if center:
                term = involute_conj(lam, mu) * second * involute(lam, nu)
            else:
                term = second * involute(lam, nu) * involute(lam, mu)
            half = half + term
    return total + half * 0.5


def taylor_remainder_slope(f: QFunction, q0: Quaternion, direction: Quaternion,
                           scales: Sequence[float], h: float = DEFAULT_H,
                           h2: float = DEFAULT_H2, center: bool = False,
                           floor_abs: float = FLOOR_ABS,
                           floor_curvature: float = FLOOR_CURVATURE) -> TaylorFit:
    """Fit the log-log decay rate of the second-order remainder.

    Needs at least four strictly decreasing scales spanning two decades.
    Scales whose error sits below the numerical floor (absolute term plus
    curvature noise times |lambda|^2) are excluded from the fit; when fewer
    than two scales survive, the expansion is exact to the floor and the
    slope is reported as nan.
    """
    scales = tuple(float(s) for s in scales)
    if len(scales) < 4:
        raise ValueError("need at least four scales")
    if any(s2 >= s1 for s1, s2 in zip(scales, scales[1:])):
        raise ValueError("scales must be strictly decreasing")
    if scales[0] / scales[-1] < 100.0:
        raise ValueError("scales must span at least two decades")
    errors = []
    used = []
    for s in scales:
        lam = direction * s
        err = abs(f(q0 + lam) - taylor2_left(f, q0, lam, h, h2, center))
        floor = floor_abs + floor_curvature * lam.modulus_squared()
        errors.append(err)
        used.append(err > floor)
    if sum(used) < 2:
        return TaylorFit(q0, direction, scales, tuple(errors), float("nan"),
                         True, tuple(used))
    logs = np.log([s for s, u in zip(scales, used) if u])
    loge = np.log([e for e, u in zip(errors, used) if u])
    slope = float(np.polyfit(logs, loge, 1)[0])
    return TaylorFit(q0, direction, scales, tuple(errors), slope, False, tuple(used))


def steepest_descent(f: QFunction, q_init: Quaternion, alpha: float,
                     max_iters: int = 100, grad_tol: float = 1e-8,
                     gradient: Optional[Callable[[Quaternion], Quaternion]] = None,
                     h: float = DEFAULT_H) -> DescentTrace:
    """Minimize a real-valued f by stepping against the conjugate gradient.

    The update is q <- q - alpha * d f/dq*, with the gradient either supplied
    in closed form or taken from the numerical engine.  Ten consecutive
    objective increases abort the run.
    """
    if alpha <= 0.0:
        raise ValueError("step size must be positive")
    grad = gradient if gradient is not None else (lambda p: left_hr(f, p, h).wrt_qc)
    q = q_init
    iterates = [q]
    values = [f(q).a]
    g = grad(q)
    grad_norms = [abs(g)]
    rising = 0
    for _ in range(max_iters):
        if grad_norms[-1] < grad_tol:
            break
        q = q - g * alpha
        iterates.append(q)
        values.append(f(q).a)
        g = grad(q)
        grad_norms.append(abs(g))
        if values[-1] > values[-2]:
            rising += 1
            if rising >= 10:
                raise DivergenceError("step size too large")
        else:
            rising = 0
    return DescentTrace(tuple(iterates), tuple(values), tuple(grad_norms), alpha)


def descent_direction_gap(grad: Quaternion, direction: Quaternion) -> float:
    """Re(d f/dq * d) minus its minimum over unit directions.

    The minimizing unit direction is -(d f/dq)* / |d f/dq|; the gap is
    nonnegative for every other unit direction.
    """
    best = -abs(grad)
    return (grad * direction).a - best
