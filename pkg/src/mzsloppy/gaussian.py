"""Phase-space core: Gaussian states and the symplectic action of gates.

Conventions (fixed here, relied on everywhere else):

* quadrature ordering (q1, p1, q2, p2, ...), with q = (a^dag + a)/sqrt(2)
* vacuum covariance = identity/2
* symplectic form Omega = direct sum of 2x2 blocks [[0, 1], [-1, 0]]
* PhaseRotation(angle) acts on its (q, p) block as
  [[cos a, sin a], [-sin a, cos a]]
* Squeezer(x, angle) acts as Rc(angle/2) diag(e^x, e^-x) Rc(angle/2)^T with
  Rc the counterclockwise rotation, i.e.
  [[ch + sh cos a, sh sin a], [sh sin a, ch - sh cos a]]
* BeamSplitter(mix, phase) under the default "transmissivity" convention
  transmits cos^2(mix) of each input; the phase is a rotation of the second
  mode applied before the real mixer. A "literal" convention is exposed in
  which the phase field is the mixing prefactor instead (see BeamSplitter).
* Displacement(amplitude, angle) leaves the covariance alone and shifts the
  mean by (amplitude/sqrt(2)) (cos angle, sin angle).

All values are immutable; all operations are pure functions.
"""

from __future__ import annotations

import dataclasses
import math
from typing import NamedTuple, Sequence, Union

import numpy as np

# tolerances used by state validation / classification
COV_SYMMETRY_RTOL = 1e-12
PHYSICALITY_TOL = 1e-10
PURITY_TOL = 1e-9

_OMEGA_BLOCK = np.array([[0.0, 1.0], [-1.0, 0.0]])


def symplectic_form(modes: int) -> np.ndarray:
    """Block-diagonal symplectic form for the given number of modes."""
    if not isinstance(modes, (int, np.integer)) or modes < 1:
        raise ValueError("modes must be a positive integer")
    out = np.zeros((2 * modes, 2 * modes))
    for k in range(modes):
        out[2 * k : 2 * k + 2, 2 * k : 2 * k + 2] = _OMEGA_BLOCK
    return out


def _frozen(a: np.ndarray) -> np.ndarray:
    b = np.array(a, dtype=float, copy=True)
    b.flags.writeable = False
    return b


@dataclasses.dataclass(frozen=True)
class GaussianState:
    """Mean vector and covariance matrix of M bosonic modes."""

    modes: int
    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        if self.modes < 1:
            raise ValueError("modes must be a positive integer")
        mean = np.asarray(self.mean, dtype=float)
        cov = np.asarray(self.cov, dtype=float)
        n = 2 * self.modes
        if mean.shape != (n,):
            raise ValueError(f"mean must have shape ({n},), got {mean.shape}")
        if cov.shape != (n, n):
            raise ValueError(f"cov must have shape ({n}, {n}), got {cov.shape}")
        if not (np.all(np.isfinite(mean)) and np.all(np.isfinite(cov))):
            raise ValueError("state moments must be finite")
        scale = max(1.0, float(np.max(np.abs(cov))))
        if np.max(np.abs(cov - cov.T)) > COV_SYMMETRY_RTOL * scale:
            raise ValueError("cov must be symmetric")
        object.__setattr__(self, "mean", _frozen(mean))
        object.__setattr__(self, "cov", _frozen(cov))


@dataclasses.dataclass(frozen=True)
class PhaseRotation:
    mode: int
    angle: float


@dataclasses.dataclass(frozen=True)
class Squeezer:
    mode: int
    magnitude: float
    angle: float = 0.0


@dataclasses.dataclass(frozen=True)
class BeamSplitter:
    """Two-mode mixer.

    convention="transmissivity" (default): `mix` is the mixing angle
    (transmissivity cos^2 mix) and `phase` is a relative phase applied to
    the second mode before mixing.

    convention="literal": the roles follow the generator
    exp[i*phase*(e^{i*mix} a^dag b + e^{-i*mix} b^dag a)], i.e. the phase
    field is the mixing prefactor and the mix field is the internal phase.
    Kept as an explicit switch so the two readings can be compared.
    """

    modes: tuple[int, int] = (0, 1)
    mix: float = 0.0
    phase: float = 0.0
    convention: str = "transmissivity"

    def __post_init__(self):
        if self.convention not in ("transmissivity", "literal"):
            raise ValueError(f"unknown beam-splitter convention: {self.convention!r}")
        if len(self.modes) != 2 or self.modes[0] == self.modes[1]:
            raise ValueError("beam splitter needs two distinct modes")


@dataclasses.dataclass(frozen=True)
class Displacement:
    mode: int
    amplitude: float
    angle: float = 0.0


Gate = Union[PhaseRotation, Squeezer, BeamSplitter, Displacement]


def vacuum_state(modes: int) -> GaussianState:
    """M-mode vacuum: zero mean, covariance identity/2."""
    if not isinstance(modes, (int, np.integer)) or modes < 1:
        raise ValueError("modes must be a positive integer")
    n = 2 * modes
    return GaussianState(modes=int(modes), mean=np.zeros(n), cov=np.eye(n) / 2)


def _rotation_block(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, s], [-s, c]])


def _squeezer_block(magnitude: float, angle: float) -> np.ndarray:
    ch, sh = math.cosh(magnitude), math.sinh(magnitude)
    ca, sa = math.cos(angle), math.sin(angle)
    # Rc(a/2) diag(e^x, e^-x) Rc(a/2)^T, Rc counterclockwise; angle=0 stretches q
    return np.array([[ch + sh * ca, sh * sa], [sh * sa, ch - sh * ca]])


def _beamsplitter_pair(gate: BeamSplitter) -> np.ndarray:
    """4x4 action on the ordered pair (q_a, p_a, q_b, p_b)."""
    if gate.convention == "transmissivity":
        c, s = math.cos(gate.mix), math.sin(gate.mix)
        mixer = np.block(
            [[c * np.eye(2), s * np.eye(2)], [-s * np.eye(2), c * np.eye(2)]]
        )
        pre = np.eye(4)
        pre[2:4, 2:4] = _rotation_block(gate.phase)
        return mixer @ pre
    # literal: a' = a cos(t) + e^{i(m+pi/2)} b sin(t), t=phase field, m=mix field
    t = gate.phase
    c, s = math.cos(t), math.sin(t)
    ct, st = math.cos(gate.mix + math.pi / 2), math.sin(gate.mix + math.pi / 2)
    return np.array(
        [
            [c, 0.0, s * ct, -s * st],
            [0.0, c, s * st, s * ct],
            [-s * ct, -s * st, c, 0.0],
            [s * st, -s * ct, 0.0, c],
        ]
    )


def _check_finite(gate: Gate, *values: float) -> None:
    for v in values:
        if not math.isfinite(v):
            raise ValueError(f"non-finite parameter in {type(gate).__name__}")


def gate_symplectic(gate: Gate, modes: int) -> tuple[np.ndarray, np.ndarray]:
    """Symplectic matrix and mean shift of a gate on an M-mode register."""
    n = 2 * modes
    S = np.eye(n)
    shift = np.zeros(n)
    if isinstance(gate, PhaseRotation):
        _check_finite(gate, gate.angle)
        _check_mode(gate.mode, modes)
        S[2 * gate.mode : 2 * gate.mode + 2, 2 * gate.mode : 2 * gate.mode + 2] = (
            _rotation_block(gate.angle)
        )
    elif isinstance(gate, Squeezer):
        _check_finite(gate, gate.magnitude, gate.angle)
        _check_mode(gate.mode, modes)
        S[2 * gate.mode : 2 * gate.mode + 2, 2 * gate.mode : 2 * gate.mode + 2] = (
            _squeezer_block(gate.magnitude, gate.angle)
        )
    elif isinstance(gate, BeamSplitter):
        _check_finite(gate, gate.mix, gate.phase)
        a, b = gate.modes
        _check_mode(a, modes)
        _check_mode(b, modes)
        idx = [2 * a, 2 * a + 1, 2 * b, 2 * b + 1]
        S[np.ix_(idx, idx)] = _beamsplitter_pair(gate)
    elif isinstance(gate, Displacement):
        _check_finite(gate, gate.amplitude, gate.angle)
        _check_mode(gate.mode, modes)
        shift[2 * gate.mode] = gate.amplitude / math.sqrt(2) * math.cos(gate.angle)
        shift[2 * gate.mode + 1] = gate.amplitude / math.sqrt(2) * math.sin(gate.angle)
    else:
        raise ValueError(f"unknown gate type: {type(gate).__name__}")
    return S, shift


def _check_mode(mode: int, modes: int) -> None:
    if not 0 <= mode < modes:
        raise ValueError(f"gate targets mode {mode}, register has {modes}")


def apply_gate(state: GaussianState, gate: Gate) -> GaussianState:
    """Conjugation rule: cov -> S cov S^T, mean -> S mean + shift."""
    S, shift = gate_symplectic(gate, state.modes)
    return GaussianState(
        modes=state.modes,
        mean=S @ state.mean + shift,
        cov=S @ state.cov @ S.T,
    )


def apply_circuit(state: GaussianState, gates: Sequence[Gate]) -> GaussianState:
    """Left-to-right composition of apply_gate."""
    out = state
    for gate in gates:
        out = apply_gate(out, gate)
    return out


def symplectic_eigenvalues(cov: np.ndarray) -> np.ndarray:
    """Symplectic spectrum: moduli of the eigenvalues of Omega @ cov.

    The 2M eigenvalues come in +-i*nu pairs; returns the M moduli, ascending.
    """
    cov = np.asarray(cov, dtype=float)
    modes = cov.shape[0] // 2
    ev = np.linalg.eigvals(symplectic_form(modes) @ cov)
    return np.sort(np.abs(ev))[::2]


class Physicality(NamedTuple):
    classification: str  # "pure" | "mixed" | "unphysical"
    symplectic_eigenvalues: np.ndarray


def physicality_check(state: GaussianState) -> Physicality:
    """Classify a state from its symplectic spectrum.

    Unphysical is a classification, not an error: any eigenvalue below
    1/2 - 1e-10. Pure means all eigenvalues equal 1/2 within 1e-9.
    """
    nus = symplectic_eigenvalues(state.cov)
    if np.min(nus) < 0.5 - PHYSICALITY_TOL:
        label = "unphysical"
    elif np.max(np.abs(nus - 0.5)) <= PURITY_TOL:
        label = "pure"
    else:
        label = "mixed"
    return Physicality(label, nus)
