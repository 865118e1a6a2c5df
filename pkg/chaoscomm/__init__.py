"""
chaoscomm

A simulation toolkit for chaos-based communication: delay-feedback Mackey-Glass
oscillators, synchronization and chaotic masking, chaos-shift-keying modems and
complexity analysis of the resulting signals.
"""

__version__ = "0.1.0"
