"""Verification toolkit for the conserved charges of the one-dimensional
delta-interacting Bose gas: exact plane-wave algebra, charge ladders with
boundary-condition checks, finite-box root equations, transfer-eigenvalue
expansions with printed-table adjudication, lattice integrability on
truncated Fock spaces, and the shift-generating integral operator."""

__version__ = "0.1.0"

from .planewaves import (BetheWavefunction, Coupling, ExpPoly, RapiditySet,
                         build_bethe)

__all__ = [
    "BetheWavefunction",
    "Coupling",
    "ExpPoly",
    "RapiditySet",
    "build_bethe",
    "__version__",
]
