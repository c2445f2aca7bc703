"""Fourier 1-norm dequantization of quantum query algorithms.

Modules
-------
fourier
    Walsh-Hadamard analysis on {0,1}^n: spectra, 1-norm, degree, monomials.
qqm
    State-vector simulation of phase-oracle query algorithms.
decomp
    Phase-flip state decomposition and the quantities derived from it.
dequant
    Parity-tree mixture simulator, majority amplification, Chernoff tails.
bounds
    Speedup caps F_eps and derived randomized / exact-quantum bounds.
kernels
    Hot loops, compiled with Cython when available.
"""

from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "__version__"]
