"""Backend selection for the hot kernels.

The compiled extension is used when it imports cleanly; otherwise the
numpy fallback is used. Setting ``MODELCOMP_PURE_PYTHON=1`` forces the
fallback.
"""
import os

import numpy as np

from . import _fallback

BACKEND = "python"
_impl = _fallback

if not os.environ.get("MODELCOMP_PURE_PYTHON"):
    try:
        from . import _kernels as _impl  # noqa: F811

        BACKEND = "compiled"
    except ImportError:  # extension not built
        _impl = _fallback


def blaschke_eval(zeros, z):
    z = np.asarray(z, dtype=np.complex128)
    shape = z.shape
    val, der = _impl.blaschke_eval(
        np.ascontiguousarray(zeros, dtype=np.complex128),
        np.ascontiguousarray(z.ravel()),
    )
    return np.asarray(val).reshape(shape), np.asarray(der).reshape(shape)


def label_components(mask):
    mask = np.ascontiguousarray(mask, dtype=np.uint8)
    labels, count = _impl.label_components(mask)
    return np.asarray(labels), int(count)
