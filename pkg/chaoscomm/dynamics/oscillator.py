"""
Mackey-Glass oscillator node.

Holds the circuit constants of one delay-feedback oscillator and evaluates its
nonlinear function

    f(x) = G * alpha * mu**mu * x**(alpha*mu - 1) / (Gamma(mu) * x_hat**(alpha*mu))
           * exp(-mu * (x / x_hat)**alpha)

which stands in for the op-amp/FET block of the electronic circuit.
"""

import dataclasses
import logging
from dataclasses import dataclass
from typing import Any, Dict, Union

import numpy as np
from scipy.special import gamma

from chaoscomm.core.errors import InvalidParameter

logger = logging.getLogger("chaoscomm.dynamics")

ArrayLike = Union[float, np.ndarray]

# Circuit values of the reference experiment: R4 = 1 kOhm, C1 = 1 uF.
REFERENCE_R4 = 1.0e3
REFERENCE_C1 = 1.0e-6


@dataclass(frozen=True)
class OscillatorParams:
    """Circuit constants of one Mackey-Glass node.

    Attributes:
        G: Gain of the nonlinear block (dimensionless).
        alpha: Shape exponent (> 0).
        mu: Shape parameter (> 0).
        x_hat: Voltage scale of the nonlinearity (V, > 0).
        kappa_f: Gain of the delayed self-feedback.
        tau_f: Delay of the self-feedback (s, > 0).
        rc: Time constant of the RC low-pass filter (s, > 0), R4*C1.
    """

    G: float = 0.7
    alpha: float = 2.0
    mu: float = 1.0
    x_hat: float = 0.4
    kappa_f: float = 0.4
    tau_f: float = 0.018
    rc: float = REFERENCE_R4 * REFERENCE_C1

    def __post_init__(self):
        for name in ("alpha", "mu", "x_hat", "tau_f", "rc"):
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0:
                raise InvalidParameter(f"{name} must be > 0 (got {value})")
        for name in ("G", "kappa_f"):
            if not np.isfinite(getattr(self, name)):
                raise InvalidParameter(f"{name} must be finite")

    @classmethod
    def from_circuit(cls, r4: float, c1: float, **kwargs) -> "OscillatorParams":
        """Build parameters from the filter's resistor and capacitor values."""
        return cls(rc=r4 * c1, **kwargs)

    @property
    def coefficient(self) -> float:
        """Constant prefactor G*alpha*mu^mu / (Gamma(mu) * x_hat^(alpha*mu))."""
        return (self.G * self.alpha * self.mu ** self.mu
                / (gamma(self.mu) * self.x_hat ** (self.alpha * self.mu)))

    @property
    def max_step(self) -> float:
        """Largest integration step the integrator accepts for this node."""
        return self.rc / 50.0

    def replace(self, **changes) -> "OscillatorParams":
        """Return a copy with some fields changed."""
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> Dict[str, Any]:
        return dataclasses.asdict(self)


def nonlinearity(x: ArrayLike, p: OscillatorParams) -> ArrayLike:
    """Evaluate the node's nonlinear function.

    The function is defined as zero for x < 0: the power term is undefined there
    for non-integer alpha*mu - 1, and the circuit only drives non-negative
    voltages. At x = 0 the limit is used (0 when alpha*mu > 1).

    Args:
        x: Input voltage, scalar or array.
        p: Node parameters.

    Returns:
        f(x) with the same shape as ``x``.
    """
    values = np.asarray(x, dtype=float)
    power = p.alpha * p.mu - 1.0
    positive = values > 0
    safe = np.where(positive, values, 1.0)
    out = (p.coefficient * safe ** power
           * np.exp(-p.mu * (safe / p.x_hat) ** p.alpha))
    at_zero = p.coefficient if power == 0 else 0.0
    out = np.where(positive, out, np.where(values == 0, at_zero, 0.0))
    if out.ndim == 0:
        return float(out)
    return out
