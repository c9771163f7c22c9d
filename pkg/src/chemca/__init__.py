"""Simulator and analysis toolkit for a hybrid chemical-digital computer.

Pure-simulation stand-in for an array of coupled chemical oscillator cells
driven by programmable stirrers: probabilistic chemical state machines,
1D/2D chemical cellular automata, chemical clocking, hybrid Ising/QUBO
solvers with a tunable deterministic index, and exact Markov-chain success
analysis.
"""

__version__ = "0.1.0"

from . import cca1d, cca2d, chemodel, harness, hybrid, lattice, markov, qubo, signals

__all__ = [
    "__version__",
    "cca1d",
    "cca2d",
    "chemodel",
    "harness",
    "hybrid",
    "lattice",
    "markov",
    "qubo",
    "signals",
]
