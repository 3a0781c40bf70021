"""Post-DFT analysis of point defects and spin-qubit candidates."""

__version__ = "0.1.0"
