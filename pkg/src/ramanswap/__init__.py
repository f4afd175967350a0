"""Simulation and estimation toolkit for a deterministic atom-photon SWAP gate."""

__version__ = "0.1.0"
