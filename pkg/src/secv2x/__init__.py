"""Spectrum and power allocation simulator for platooning C-V2X networks
with an eavesdropper, plus the multi-agent DQN that learns the allocation."""

__version__ = "0.1.0"
