"""bandbraid: simulation and topological characterization of knotted
non-Hermitian band structures.

Submodules:
    numerics    small dense complex matrix kernel (eig, expm, QR, Hermitian)
    twister     model construction, analytic spectra, phase regions
    circuit     protocol emulation: embedding, measurement, postselection
    reconstruct Bloch-angle eigenstate reconstruction
    braidtrace  windings, crossings, braid words, Berry phase
    knots       Burau / Alexander / Kauffman / Jones invariants
    pipeline    end-to-end orchestration
    cli         batch command-line front end
"""
from .twister import KnotClass, TwisterSpec

__version__ = "0.1.0"

__all__ = ["KnotClass", "TwisterSpec", "__version__"]
