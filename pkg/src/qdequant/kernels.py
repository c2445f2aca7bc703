"""Kernel backend selection.

The Cython extension is used when it was built; otherwise the numpy
fallback is loaded. Set ``QDEQUANT_PURE_PYTHON=1`` to force the fallback.
"""

import os

import numpy as np

from . import _kernels_py

if os.environ.get("QDEQUANT_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl
        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _kernels_py
        BACKEND = "python"


def fwht(values, backend=None):
    """Return the unnormalized Walsh-Hadamard transform of ``values`` (a copy)."""
    out = np.array(values, dtype=np.float64, copy=True, order="C")
    _select(backend).fwht_inplace(out)
    return out


def xor_bin_pairs(masks, gram, n, backend=None):
    """Bin a complex Gram matrix by XOR of row/column masks.

    Returns ``(bins, abs_total)`` where ``bins[b]`` is the complex sum of
    ``gram[k, h]`` over pairs with ``masks[k] ^ masks[h] == b`` and
    ``abs_total`` is the sum of ``|gram[k, h]|`` over all pairs.
    """
    masks = np.ascontiguousarray(masks, dtype=np.int64)
    gram = np.asarray(gram, dtype=np.complex128)
    out_re = np.zeros(1 << n)
    out_im = np.zeros(1 << n)
    total = _select(backend).xor_bin_pairs(
        masks,
        np.ascontiguousarray(gram.real),
        np.ascontiguousarray(gram.imag),
        out_re,
        out_im,
    )
    return out_re + 1j * out_im, float(total)


def _select(backend):
    if backend is None:
        return _impl
    if backend == "python":
        return _kernels_py
    if backend == "cython":
        from . import _kernels
        return _kernels
    raise ValueError(f"unknown backend {backend!r}")
