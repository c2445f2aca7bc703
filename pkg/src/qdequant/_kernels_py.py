"""Numpy fallback for the compiled kernels in ``_kernels.pyx``."""

import numpy as np


def fwht_inplace(a):
    """Unnormalized Walsh-Hadamard butterfly, in place. len(a) must be 2**n."""
    size = a.shape[0]
    if size & (size - 1):
        raise ValueError(f"length {size} is not a power of two")
    h = 1
    while h < size:
        view = a.reshape(-1, 2, h)
        top = view[:, 0, :].copy()
        view[:, 0, :] += view[:, 1, :]
        view[:, 1, :] = top - view[:, 1, :]
        h *= 2


def xor_bin_pairs(masks, gram_re, gram_im, out_re, out_im):
    """Add gram[k, h] into bin masks[k] ^ masks[h]; return sum of |gram[k, h]|."""
    bins = np.bitwise_xor.outer(masks, masks).ravel()
    np.add.at(out_re, bins, gram_re.ravel())
    np.add.at(out_im, bins, gram_im.ravel())
    return float(np.hypot(gram_re, gram_im).sum())
