"""Quaternion adaptive filters derived from the GHR gradient.

Three variants share the same error-power objective |e(n)|^2:

* QLMS        strictly linear,  y = w^T x, update w += alpha e x*
* WL-QLMS     widely linear over the involution regressors x, x^i, x^j, x^k
              with Hermitian branch outputs h^H x + g^H x^i + u^H x^j + v^H x^k
* QNGD        nonlinear output y = Phi(w^T x); the update sums the four
              involution error terms e^mu weighted by the conjugate
              derivatives of Phi^(mu*)

The step directions are exactly the negative conjugate GHR gradients of the
objective (up to the constant absorbed into alpha), which the test suite
verifies numerically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .derivatives import DEFAULT_H, left_hr
from .quaternion import AXES, Quaternion, involute
from .theorems import DivergenceError

DIVERGENCE_NORM = 1e6

INVOLUTION_AXES = ("i", "j", "k")


class QVector:
    """Immutable vector of quaternions with the products the filters need."""

    __slots__ = ("elements",)

    def __init__(self, elements):
        self.elements = tuple(elements)

    @classmethod
    def zeros(cls, n: int) -> "QVector":
        return cls([Quaternion(0.0, 0.0, 0.0, 0.0)] * n)

    @classmethod
    def from_components(cls, rows) -> "QVector":
        return cls([Quaternion.from_components(row) for row in rows])

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, idx) -> Quaternion:
        return self.elements[idx]

    def __eq__(self, other) -> bool:
        return isinstance(other, QVector) and self.elements == other.elements

    def __repr__(self) -> str:
        return f"QVector({list(self.elements)!r})"

    def conj(self) -> "QVector":
        return QVector([q.conjugate() for q in self.elements])

    def involute(self, axis: str) -> "QVector":
        return QVector([involute(q, axis) for q in self.elements])

    def dot_t(self, other: "QVector") -> Quaternion:
        """Transpose pairing sum self_m * other_m (order matters)."""
        total = Quaternion(0.0, 0.0, 0.0, 0.0)
        for p, q in zip(self.elements, other.elements):
            total = total + p * q
        return total

    def dot_h(self, other: "QVector") -> Quaternion:
        """Hermitian pairing sum self_m* * other_m."""
        total = Quaternion(0.0, 0.0, 0.0, 0.0)
        for p, q in zip(self.elements, other.elements):
            total = total + p.conjugate() * q
        return total

    def norm_squared(self) -> float:
        return sum(q.modulus_squared() for q in self.elements)

    def norm(self) -> float:
        return math.sqrt(self.norm_squared())


PhiFunction = Callable[[Quaternion], Quaternion]
PhiDerivatives = Callable[[Quaternion], tuple[Quaternion, ...]]


@dataclass(frozen=True)
class FilterState:
    """State of one adaptive filter between samples.

    ``weights`` holds one vector for qlms/qngd and the four branch vectors
    (h, g, u, v) for wl_qlms.  ``nonlinearity`` only applies to qngd; when it
    is None the output stays linear and qngd degenerates to qlms exactly.
    """

    variant: str
    weights: tuple[QVector, ...]
    alpha: float
    nonlinearity: Optional[PhiFunction] = None
    phi_derivatives: Optional[PhiDerivatives] = None
    iteration: int = 0


def qlms_state(taps: int, alpha: float) -> FilterState:
    return FilterState(variant="qlms", weights=(QVector.zeros(taps),), alpha=alpha)


def wl_qlms_state(taps: int, alpha: float) -> FilterState:
    return FilterState(variant="wl_qlms",
                       weights=tuple(QVector.zeros(taps) for _ in range(4)),
                       alpha=alpha)


def qngd_state(taps: int, alpha: float, nonlinearity: Optional[PhiFunction] = None,
               phi_derivatives: Optional[PhiDerivatives] = None) -> FilterState:
    return FilterState(variant="qngd", weights=(QVector.zeros(taps),), alpha=alpha,
                       nonlinearity=nonlinearity, phi_derivatives=phi_derivatives)


def _check_input(state: FilterState, x: QVector) -> None:
    if len(x) != len(state.weights[0]):
        raise ValueError("regressor length does not match filter taps")


def _linear_update(w: QVector, x: QVector, e: Quaternion, alpha: float) -> QVector:
    return QVector([w_m + (e * x_m.conjugate()) * alpha
                    for w_m, x_m in zip(w, x)])


def qlms_step(state: FilterState, x: QVector,
              d: Quaternion) -> tuple[FilterState, Quaternion]:
    """One QLMS update; returns the new state and the a priori error."""
    _check_input(state, x)
    w = state.weights[0]
    e = d - w.dot_t(x)
    new_w = _linear_update(w, x, e, state.alpha)
    new_state = replace(state, weights=(new_w,), iteration=state.iteration + 1)
    return new_state, e


def wl_qlms_step(state: FilterState, x: QVector,
                 d: Quaternion) -> tuple[FilterState, Quaternion]:
    """One widely linear QLMS update over the four involution branches."""
    _check_input(state, x)
    h, g, u, v = state.weights
    branches = (x, x.involute("i"), x.involute("j"), x.involute("k"))
    y = h.dot_h(branches[0]) + g.dot_h(branches[1]) \
        + u.dot_h(branches[2]) + v.dot_h(branches[3])
    e = d - y
    ec = e.conjugate()
    alpha = state.alpha
    new_weights = tuple(
        QVector([w_m + (b_m * ec) * alpha for w_m, b_m in zip(w_vec, branch)])
        for w_vec, branch in zip((h, g, u, v), branches)
    )
    new_state = replace(state, weights=new_weights, iteration=state.iteration + 1)
    return new_state, e


def _numerical_phi_derivatives(phi: PhiFunction, h: float = DEFAULT_H) -> PhiDerivatives:
    """Conjugate derivatives of the four conjugate involutions of Phi at s.

    Returns (d Phi^(1*)/ds*, d Phi^(i*)/ds*, d Phi^(j*)/ds*, d Phi^(k*)/ds*).
    """
    def derivs(s: Quaternion) -> tuple[Quaternion, ...]:
        out = []
        for mu in AXES:
            fn = lambda p, _mu=mu: involute(phi(p), _mu).conjugate()
            out.append(left_hr(fn, s, h).wrt_qc)
        return tuple(out)

    return derivs


def qngd_step(state: FilterState, x: QVector,
              d: Quaternion) -> tuple[FilterState, Quaternion]:
    """One nonlinear gradient-descent update.

    The update direction is alpha * sum over mu in {1,i,j,k} of
    e^mu * d Phi^(mu*)/ds* * x_m*.  With no nonlinearity this is computed on
    the same code path as qlms_step, so the two traces match bit for bit.
    """
    _check_input(state, x)
    w = state.weights[0]
    if state.nonlinearity is None:
        s = w.dot_t(x)
        e = d - s
        new_w = _linear_update(w, x, e, state.alpha)
        new_state = replace(state, weights=(new_w,), iteration=state.iteration + 1)
        return new_state, e
    s = w.dot_t(x)
    e = d - state.nonlinearity(s)
    derivs_at = state.phi_derivatives or _numerical_phi_derivatives(state.nonlinearity)
    gammas = derivs_at(s)
    e_eff = Quaternion(0.0, 0.0, 0.0, 0.0)
    for mu, gamma in zip(AXES, gammas):
        e_eff = e_eff + involute(e, mu) * gamma
    new_w = _linear_update(w, x, e_eff, state.alpha)
    new_state = replace(state, weights=(new_w,), iteration=state.iteration + 1)
    return new_state, e


def phi_tanh(s: Quaternion) -> Quaternion:
    """Componentwise tanh, the usual bounded quaternion activation."""
    return Quaternion(math.tanh(s.a), math.tanh(s.b), math.tanh(s.c), math.tanh(s.d))


NONLINEARITIES: dict[str, PhiFunction] = {"tanh": phi_tanh}

SIGNAL_KINDS = ("white_circular", "ar1", "fir_channel")

AR1_COEFF = 0.5
AR1_BURN_IN = 100

Taps = Union[QVector, Sequence[QVector]]


def _clean_output(taps: Taps, window: QVector) -> Quaternion:
    if isinstance(taps, QVector):
        return taps.dot_t(window)
    h, g, u, v = taps
    return h.dot_h(window) + g.dot_h(window.involute("i")) \
        + u.dot_h(window.involute("j")) + v.dot_h(window.involute("k"))


def _tap_count(taps: Taps) -> int:
    return len(taps) if isinstance(taps, QVector) else len(taps[0])


def generate_signal(kind: str, taps: Taps, n: int, snr_db: float,
                    seed: int) -> list[tuple[QVector, Quaternion]]:
    """Deterministic (regressor window, desired output) stream.

    The raw input is circular white Gaussian with unit-variance components;
    ``ar1`` colors it with a unit-variance AR(1) recursion instead.  The
    desired output pushes the input through the ground-truth taps (a single
    vector for a strictly linear channel, four vectors for a widely linear
    one) and adds white quaternion noise scaled to the requested SNR, with
    powers measured as mean squared modulus.  ``white_circular`` and
    ``fir_channel`` name the same experiment from either end; they produce
    identical streams.
    """
    if kind not in SIGNAL_KINDS:
        raise ValueError(f"unknown signal kind {kind!r}")
    taps_len = _tap_count(taps)
    if n <= taps_len:
        raise ValueError("stream length must exceed the tap count")
    root = np.random.SeedSequence(seed)
    sample_ss, noise_ss = root.spawn(2)
    sample_rng = np.random.Generator(np.random.Philox(sample_ss))
    noise_rng = np.random.Generator(np.random.Philox(noise_ss))

    total = n + taps_len - 1
    if kind == "ar1":
        raw = sample_rng.normal(size=(total + AR1_BURN_IN, 4))
        drive = math.sqrt(1.0 - AR1_COEFF ** 2)
        colored = np.empty_like(raw)
        colored[0] = raw[0]
        for t in range(1, len(raw)):
            colored[t] = AR1_COEFF * colored[t - 1] + drive * raw[t]
        raw = colored[AR1_BURN_IN:]
    else:
        raw = sample_rng.normal(size=(total, 4))
    samples = [Quaternion.from_components(row) for row in raw]

    windows = []
    clean = []
    for t in range(n):
        top = t + taps_len - 1
        window = QVector(samples[top - m] for m in range(taps_len))
        windows.append(window)
        clean.append(_clean_output(taps, window))

    if math.isinf(snr_db):
        return list(zip(windows, clean))
    signal_power = sum(d.modulus_squared() for d in clean) / n
    noise_power = signal_power * 10.0 ** (-snr_db / 10.0)
    sigma = math.sqrt(noise_power / 4.0)
    noise = noise_rng.normal(scale=sigma, size=(n, 4)) if sigma > 0.0 else np.zeros((n, 4))
    stream = []
    for window, d, row in zip(windows, clean, noise):
        stream.append((window, d + Quaternion.from_components(row)))
    return stream


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything needed to reproduce one adaptation run."""

    variant: str
    taps: Taps
    alpha: float
    steps: int
    snr_db: float
    seed: int
    kind: str = "fir_channel"
    nonlinearity: Optional[str] = None


@dataclass(frozen=True)
class ExperimentResult:
    mse_curve: tuple[float, ...]
    weight_error_curve: tuple[float, ...]
    final_weight_error: float
    steps: int
    seed: int


def _weight_error(state: FilterState, taps: Taps) -> float:
    """Relative distance between the adapted weights and the ground truth.

    A strictly linear channel d = sum taps_m x_m seen by the widely linear
    filter is reproduced by the Hermitian branch with h = taps*, so that is
    the reference the four-branch weights are held against.
    """
    truth = (taps,) if isinstance(taps, QVector) else tuple(taps)
    if state.variant == "wl_qlms":
        current = state.weights
        if len(truth) == 1:
            zeros = QVector.zeros(len(truth[0]))
            truth = (truth[0].conj(), zeros, zeros, zeros)
    else:
        current = (state.weights[0],)
    err = 0.0
    ref = 0.0
    for w_vec, t_vec in zip(current, truth):
        for w_m, t_m in zip(w_vec, t_vec):
            err += (w_m - t_m).modulus_squared()
            ref += t_m.modulus_squared()
    return math.sqrt(err / ref) if ref > 0.0 else math.sqrt(err)


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Stream a generated signal through the chosen filter and record errors."""
    if config.variant not in ("qlms", "wl_qlms", "qngd"):
        raise ValueError(f"unknown filter variant {config.variant!r}")
    taps_len = _tap_count(config.taps)
    if config.variant == "qlms":
        state = qlms_state(taps_len, config.alpha)
        step = qlms_step
    elif config.variant == "wl_qlms":
        state = wl_qlms_state(taps_len, config.alpha)
        step = wl_qlms_step
    else:
        phi = NONLINEARITIES[config.nonlinearity] if config.nonlinearity else None
        state = qngd_state(taps_len, config.alpha, nonlinearity=phi)
        step = qngd_step

    stream = generate_signal(config.kind, config.taps, config.steps,
                             config.snr_db, config.seed)
    mse = []
    weight_errors = []
    for idx, (x, d) in enumerate(stream):
        state, e = step(state, x, d)
        mse.append(e.modulus_squared())
        weight_errors.append(_weight_error(state, config.taps))
        total_norm = sum(w.norm_squared() for w in state.weights)
        if not math.isfinite(total_norm) or total_norm > DIVERGENCE_NORM ** 2:
            raise DivergenceError(f"filter diverged at step {idx}")
    return ExperimentResult(mse_curve=tuple(mse),
                            weight_error_curve=tuple(weight_errors),
                            final_weight_error=weight_errors[-1],
                            steps=config.steps, seed=config.seed)
