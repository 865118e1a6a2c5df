"""Chaos-shift-keying modems, channels and BER sweeps."""

from chaoscomm.modem.ber import (BerCurve, BerPoint, ber_sweep, theoretical_ber,
                                 wilson_interval)
from chaoscomm.modem.channel import ChannelKind, ChannelSpec, channel_apply
from chaoscomm.modem.chips import ChipKind, chip_source
from chaoscomm.modem.frames import (FrameBatch, Scheme, SymbolFrame, demodulate,
                                    modulate)

__all__ = [
    "BerCurve",
    "BerPoint",
    "ChannelKind",
    "ChannelSpec",
    "ChipKind",
    "FrameBatch",
    "Scheme",
    "SymbolFrame",
    "ber_sweep",
    "channel_apply",
    "chip_source",
    "demodulate",
    "modulate",
    "theoretical_ber",
    "wilson_interval",
]
