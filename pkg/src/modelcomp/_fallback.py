"""Pure-Python/numpy versions of the compiled kernels in ``_kernels.pyx``."""
from collections import deque

import numpy as np


def blaschke_eval(zeros, z):
    """Value and derivative of the finite Blaschke product at each z."""
    zeros = np.ascontiguousarray(zeros, dtype=np.complex128)
    z = np.ascontiguousarray(z, dtype=np.complex128)
    p = np.ones_like(z)
    d = np.zeros_like(z)
    for lam in zeros:
        mod2 = lam.real * lam.real + lam.imag * lam.imag
        if mod2 == 0.0:
            b = z
            db = np.ones_like(z)
        else:
            u = np.sqrt(mod2) / lam
            den = 1.0 - np.conj(lam) * z
            b = u * (lam - z) / den
            db = u * (mod2 - 1.0) / (den * den)
        d = d * b + p * db
        p = p * b
    return p, d


def label_components(mask):
    """Label 4-connected components of ``mask``; returns (labels, count)."""
    mask = np.asarray(mask, dtype=bool)
    nr, nc = mask.shape
    labels = np.zeros((nr, nc), dtype=np.int32)
    current = 0
    for i, j in zip(*np.nonzero(mask)):
        if labels[i, j]:
            continue
        current += 1
        labels[i, j] = current
        queue = deque([(i, j)])
        while queue:
            r, c = queue.popleft()
            for rr, cc in ((r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1)):
                if 0 <= rr < nr and 0 <= cc < nc and mask[rr, cc] and not labels[rr, cc]:
                    labels[rr, cc] = current
                    queue.append((rr, cc))
    return labels, current
