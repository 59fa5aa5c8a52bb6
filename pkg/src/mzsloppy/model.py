"""Two-mode interferometer model and its parameter derivatives.

The statistical model has two estimated parameters: the phase lam1 applied
before the intermediate squeezer and the phase lam2 applied after it, both
on the upper arm (mode 0). Everything else in ModelConfig is fixed
configuration. Derivative order is always (lam1, lam2).
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from .gaussian import (
    BeamSplitter,
    Displacement,
    Gate,
    GaussianState,
    PhaseRotation,
    Squeezer,
    apply_circuit,
    gate_symplectic,
    vacuum_state,
)

FD_STEP_DEFAULT = 1e-5
FD_STEP_MIN = 1e-8
FD_STEP_MAX = 1e-3

PARAMETER_NAMES = ("lam1", "lam2")


@dataclasses.dataclass(frozen=True)
class ModelConfig:
    """Full parameter tuple of the interferometer.

    r: input squeezing of both arms; q, beta: input displacement of the
    upper arm; theta, phi: beam-splitter phase and mix; x, alpha:
    intermediate squeezer; lam1, lam2: true values of the estimated phases.
    """

    r: float = 0.0
    q: float = 0.0
    beta: float = 0.0
    theta: float = 0.0
    phi: float = 0.0
    x: float = 0.0
    alpha: float = 0.0
    lam1: float = 0.0
    lam2: float = 0.0

    def __post_init__(self):
        for name in ("r", "q", "beta", "theta", "phi", "x", "alpha", "lam1", "lam2"):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or not math.isfinite(v):
                raise ValueError(f"model field {name} must be finite")
            object.__setattr__(self, name, float(v))
        for name in ("r", "x", "q"):
            if getattr(self, name) < 0:
                raise ValueError(f"model field {name} must be non-negative")

    @property
    def gamma(self) -> float:
        # the squeezer angle and lam1 enter the second moments only through this
        return self.alpha + 2.0 * self.lam1


@dataclasses.dataclass(frozen=True)
class ModelJet:
    """Output state with its derivatives along (lam1, lam2)."""

    state: GaussianState
    dcov: tuple[np.ndarray, np.ndarray]
    dmean: tuple[np.ndarray, np.ndarray]


def build_mz_model(config: ModelConfig) -> list[Gate]:
    """Gate sequence on two modes; inputs are vacuum + vacuum."""
    return [
        Squeezer(mode=0, magnitude=config.r, angle=0.0),
        Squeezer(mode=1, magnitude=config.r, angle=0.0),
        Displacement(mode=0, amplitude=config.q, angle=config.beta),
        BeamSplitter(modes=(0, 1), mix=config.phi, phase=config.theta),
        PhaseRotation(mode=0, angle=config.lam1),
        Squeezer(mode=0, magnitude=config.x, angle=config.alpha),
        PhaseRotation(mode=0, angle=config.lam2),
    ]


# positions of the bound phase gates in the list above -> derivative slot
_BOUND_GATES = {4: 0, 6: 1}

# d/da [[cos a, sin a], [-sin a, cos a]] = R(a) @ [[0, 1], [-1, 0]]
_ROTATION_GENERATOR = np.array([[0.0, 1.0], [-1.0, 0.0]])


def evaluate_state(config: ModelConfig) -> GaussianState:
    return apply_circuit(vacuum_state(2), build_mz_model(config))


def jacobian_analytic(config: ModelConfig) -> ModelJet:
    """Exact (dcov, dmean) along (lam1, lam2) by chain rule.

    At each bound phase gate the derivative S' = S @ J is inserted once
    (J is the rotation generator on the gate's mode); every later gate
    conjugates the accumulated derivatives exactly.
    """
    gates = build_mz_model(config)
    state = vacuum_state(2)
    cov, mean = state.cov.copy(), state.mean.copy()
    dcov = [np.zeros((4, 4)), np.zeros((4, 4))]
    dmean = [np.zeros(4), np.zeros(4)]
    for i, gate in enumerate(gates):
        S, shift = gate_symplectic(gate, 2)
        for p in range(2):
            dcov[p] = S @ dcov[p] @ S.T
            dmean[p] = S @ dmean[p]
        if i in _BOUND_GATES:
            p = _BOUND_GATES[i]
            mode = gate.mode
            J = np.zeros((4, 4))
            J[2 * mode : 2 * mode + 2, 2 * mode : 2 * mode + 2] = _ROTATION_GENERATOR
            Sp = S @ J
            dcov[p] += Sp @ cov @ S.T + S @ cov @ Sp.T
            dmean[p] += Sp @ mean
        cov = S @ cov @ S.T
        mean = S @ mean + shift
    out = GaussianState(modes=2, mean=mean, cov=cov)
    return ModelJet(state=out, dcov=(dcov[0], dcov[1]), dmean=(dmean[0], dmean[1]))


def jacobian_fd(config: ModelConfig, step: float = FD_STEP_DEFAULT) -> ModelJet:
    """Central-difference jet; the independent oracle for jacobian_analytic."""
    if not (FD_STEP_MIN <= step <= FD_STEP_MAX):
        raise ValueError(
            f"step must lie in [{FD_STEP_MIN:g}, {FD_STEP_MAX:g}], got {step:g}"
        )
    center = evaluate_state(config)
    dcov, dmean = [], []
    for name in PARAMETER_NAMES:
        lo = evaluate_state(dataclasses.replace(config, **{name: getattr(config, name) - step}))
        hi = evaluate_state(dataclasses.replace(config, **{name: getattr(config, name) + step}))
        dcov.append((hi.cov - lo.cov) / (2 * step))
        dmean.append((hi.mean - lo.mean) / (2 * step))
    return ModelJet(state=center, dcov=(dcov[0], dcov[1]), dmean=(dmean[0], dmean[1]))
