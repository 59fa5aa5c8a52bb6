"""Closed-form reference layer and the cross-check engine.

The expressions in this module are a deliberately verbatim transcription of
the reference analytic results for this interferometer (information-matrix
entries, curvature entry, landmark values, ratio identities, displacement
coefficients f22/f12). They are kept as written, typos and all: no symbolic
simplification, no re-derivation, no reconciliation with the numeric layer.
`compare` reports differences between the two layers and never asserts
agreement; the known tensions are documented in the report notes and in the
README.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from . import metrology
from .model import ModelConfig, jacobian_analytic


@dataclasses.dataclass(frozen=True)
class ClosedFormInputs:
    """Arguments of the reference expressions.

    gamma = alpha + 2*lam1 is used directly; lam2 is needed only by the
    displacement term of u12_closed.
    """

    r: float = 0.0
    q: float = 0.0
    beta: float = 0.0
    theta: float = 0.0
    phi: float = 0.0
    x: float = 0.0
    gamma: float = 0.0
    lam2: float = 0.0

    def __post_init__(self):
        for name in ("r", "q", "beta", "theta", "phi", "x", "gamma", "lam2"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"closed-form input {name} must be finite")
        for name in ("r", "q", "x"):
            if getattr(self, name) < 0:
                raise ValueError(f"closed-form input {name} must be non-negative")

    @classmethod
    def from_model_config(cls, config: ModelConfig) -> "ClosedFormInputs":
        return cls(
            r=config.r,
            q=config.q,
            beta=config.beta,
            theta=config.theta,
            phi=config.phi,
            x=config.x,
            gamma=config.gamma,
            lam2=config.lam2,
        )


def _mix_trig(inp: ClosedFormInputs) -> float:
    # recurring bracket: cos(t) cos(g+t) + cos(2f) sin(t) sin(g+t)
    return math.cos(inp.theta) * math.cos(inp.gamma + inp.theta) + math.cos(
        2 * inp.phi
    ) * math.sin(inp.theta) * math.sin(inp.gamma + inp.theta)


def q11_closed(inp: ClosedFormInputs) -> float:
    # the printed "sin(2 phi)^2" is read as sin^2(2 phi)
    bracket = math.cos(2 * inp.beta) * math.cos(2 * inp.phi) + math.cos(
        2 * inp.beta + inp.theta
    ) * math.sin(inp.theta) * math.sin(2 * inp.phi) ** 2
    return 2 * math.cosh(2 * inp.r) ** 2 + 2 * inp.q**2 * (
        math.cosh(2 * inp.r) + bracket * math.sinh(2 * inp.r)
    )


def q22_closed(inp: ClosedFormInputs) -> float:
    base = math.cosh(2 * inp.r) * math.cosh(2 * inp.x) + math.sinh(
        2 * inp.r
    ) * _mix_trig(inp) * math.sinh(2 * inp.x)
    return 2 * base**2 + 2 * inp.q**2 * f22(inp)


def q12_closed(inp: ClosedFormInputs) -> float:
    return (
        2 * math.cosh(2 * inp.r) ** 2
        + 2
        * (2 - math.sin(2 * inp.phi) ** 2 * math.sin(inp.theta) ** 2)
        * math.sinh(2 * inp.r) ** 2
        * math.sinh(inp.x) ** 2
        + _mix_trig(inp) * math.sinh(4 * inp.r) * math.sinh(2 * inp.x)
        + 2 * inp.q**2 * f12(inp)
    )


def f22(inp: ClosedFormInputs) -> float:
    """Displacement coefficient of q22_closed (enters as +2 q^2 f22)."""
    r, b, t, f, x, g = inp.r, inp.beta, inp.theta, inp.phi, inp.x, inp.gamma
    inner = 2 * math.cosh(2 * x) * (
        2 * math.cos(2 * b + t) * math.sin(t) * math.sin(f) ** 2
        + math.sinh(2 * x) * _mix_trig(inp)
    ) + math.sinh(2 * x) * (
        4 * math.cos(g + t) * math.sin(t) * math.sin(f) ** 2
        + 2
        * math.sinh(2 * x)
        * math.cos(g - 2 * b)
        * (math.cos(g) - 2 * math.sin(t) * math.sin(g + t) * math.sin(f) ** 2)
    )
    return math.sinh(2 * r) * (
        math.cos(2 * b) * math.cos(2 * f) + math.cos(f) ** 2 * inner
    ) + math.cosh(2 * r) * (
        1
        + math.cos(f) ** 2
        * (math.cosh(4 * x) + math.cos(g - 2 * b) * math.sinh(4 * x) - 1)
    )


def f12(inp: ClosedFormInputs) -> float:
    """Displacement coefficient of q12_closed (enters as +2 q^2 f12)."""
    r, b, t, f, x, g = inp.r, inp.beta, inp.theta, inp.phi, inp.x, inp.gamma
    middle = (
        2
        * math.sin(t)
        * (
            2
            * (
                math.cos(2 * b + t) * math.cosh(x) ** 2
                - math.sin(2 * b + t) * math.sinh(x) ** 2
            )
            - math.sinh(2 * x) * (math.sin(g + t) - math.cos(g + t))
        )
        * math.cos(f) ** 2
        * math.sin(f) ** 2
    )
    return (
        math.sinh(2 * r)
        * (
            math.cos(2 * b) * (2 * math.cosh(x) ** 2 * math.cos(f) ** 2 - 1)
            + middle
            + math.sinh(2 * x) * math.cos(f) ** 2 * math.cos(g)
        )
        + math.cosh(2 * r)
        + 2
        * math.cosh(2 * r)
        * math.sinh(x)
        * math.cos(f) ** 2
        * (math.sinh(x) + math.cos(g - 2 * b) * math.cosh(x))
    )


def f22_optimal(r: float, x: float, beta: float, gamma: float) -> float:
    """f22 evaluated at the balanced, quarter-phase configuration."""
    return -math.sinh(2 * r) * (
        math.cosh(2 * x) * math.sin(2 * beta) + math.sinh(2 * x) * math.sin(gamma)
    ) + math.cosh(2 * r) * math.cosh(2 * x) * (
        math.cosh(2 * x) + math.sinh(2 * x) * math.cos(gamma - 2 * beta)
    )


def u12_closed(inp: ClosedFormInputs) -> float:
    return 2 * (
        math.cos(inp.gamma + inp.theta) * math.cos(2 * inp.phi) * math.sin(inp.theta)
        - math.cos(inp.theta) * math.sin(inp.gamma + inp.theta)
    ) * math.sinh(2 * inp.r) * math.sinh(2 * inp.x) - 4 * inp.q**2 * math.cos(
        inp.phi
    ) ** 2 * math.sin(2 * (inp.beta - inp.lam2)) * math.sinh(2 * inp.x)


# configurations behind the landmark values
MAXIMUM_CONFIGURATION = {"theta": 0.0, "phi": 0.0, "gamma": 0.0}
OPTIMAL_CONFIGURATION = {"theta": math.pi / 2, "phi": math.pi / 4}


def landmarks(r: float, x: float, q: float = 0.0) -> dict[str, float]:
    """Named landmark values and ratio identities at the given (r, x, q)."""
    if r < 0 or x < 0:
        raise ValueError("r and x must be non-negative")
    return {
        "q22_max": 2 * math.cosh(2 * (r + x)) ** 2,
        "q22_opt": 2 * math.cosh(2 * r) ** 2 * math.cosh(2 * x) ** 2,
        "q22_inf": 1 + math.cosh(4 * (r - x)),
        "q11_max": 2 * math.cosh(2 * r) ** 2 + 2 * math.exp(2 * r) * q**2,
        "ratio_opt_max": 0.25
        * (1 + math.cosh(2 * (r - x)) / math.cosh(2 * (r + x))) ** 2,
        "ratio_inf_opt": (math.tanh(2 * x) * math.tanh(2 * r) - 1) ** 2,
    }


def closed_q_matrix(inp: ClosedFormInputs) -> np.ndarray:
    """Reference-layer 2x2 information matrix (displacement terms included)."""
    q11 = q11_closed(inp)
    q22 = q22_closed(inp)
    q12 = q12_closed(inp)
    return np.array([[q11, q12], [q12, q22]])


def det_ratio(r: float, x: float) -> float:
    """det Q at the maximum configuration over det Q at the optimal one.

    Both determinants vanish at x=0 (sloppy baseline); that case returns
    NaN as the undefined-ratio marker rather than raising.
    """
    if r < 0 or x < 0:
        raise ValueError("r and x must be non-negative")
    det_max = float(
        np.linalg.det(closed_q_matrix(ClosedFormInputs(r=r, x=x, **MAXIMUM_CONFIGURATION)))
    )
    det_opt = float(
        np.linalg.det(
            closed_q_matrix(
                ClosedFormInputs(
                    r=r,
                    x=x,
                    theta=OPTIMAL_CONFIGURATION["theta"],
                    phi=OPTIMAL_CONFIGURATION["phi"],
                )
            )
        )
    )
    if x == 0 or det_opt == 0:
        return float("nan")
    return det_max / det_opt


@dataclasses.dataclass(frozen=True)
class DiscrepancyRecord:
    entry: str
    closed_form: float
    numeric: float
    abs_difference: float
    rel_difference: float


@dataclasses.dataclass(frozen=True)
class DiscrepancyReport:
    records: tuple[DiscrepancyRecord, ...]
    flags: dict


def _record(entry: str, cf: float, num: float) -> DiscrepancyRecord:
    diff = abs(cf - num)
    scale = max(abs(cf), abs(num))
    return DiscrepancyRecord(
        entry=entry,
        closed_form=float(cf),
        numeric=float(num),
        abs_difference=float(diff),
        rel_difference=float(diff / scale) if scale > 0 else 0.0,
    )


def compare(config: ModelConfig) -> DiscrepancyReport:
    """Entrywise closed-form vs first-principles values for one config.

    Reports, never asserts: the two layers are known to disagree on the
    displacement-free parts of the Q entries (constant offset) and on the
    normalization and displacement term of U12.
    """
    jet = jacobian_analytic(config)
    Q = metrology.qfi_matrix(jet)
    U = metrology.uhlmann_matrix(jet)
    inp = ClosedFormInputs.from_model_config(config)
    records = (
        _record("Q11", q11_closed(inp), Q[0, 0]),
        _record("Q22", q22_closed(inp), Q[1, 1]),
        _record("Q12", q12_closed(inp), Q[0, 1]),
        _record("U12", u12_closed(inp), U[0, 1]),
    )
    diffs = [rec.closed_form - rec.numeric for rec in records[:3]]
    spread = max(diffs) - min(diffs)
    scale = max(1.0, max(abs(d) for d in diffs))
    flags = {
        "max_abs_difference": max(rec.abs_difference for rec in records),
        "max_rel_difference": max(rec.rel_difference for rec in records),
        "q_offset_shared": bool(spread <= 1e-9 * scale),
        "q_offset_value": float(np.mean(diffs)),
        "u12_abs_difference": records[3].abs_difference,
    }
    return DiscrepancyReport(records=records, flags=flags)
