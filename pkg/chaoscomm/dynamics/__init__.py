"""Delay-feedback Mackey-Glass oscillators and their integration."""

from chaoscomm.dynamics.drive import DriveSignal
from chaoscomm.dynamics.integrator import integrate
from chaoscomm.dynamics.oscillator import OscillatorParams, nonlinearity
from chaoscomm.dynamics.trajectory import (Trajectory, autocorrelation,
                                           load_trajectory, save_trajectory)

__all__ = [
    "DriveSignal",
    "OscillatorParams",
    "Trajectory",
    "autocorrelation",
    "integrate",
    "load_trajectory",
    "nonlinearity",
    "save_trajectory",
]
