"""Kernel backend selection.

The compiled ``_ckernels`` extension is used when it imports; otherwise the
numpy implementation in ``_pykernels`` is used. Setting the environment
variable ``SLICEREG_BACKEND=python`` forces the fallback, and
:func:`use_backend` switches at runtime.
"""

import os

from . import _pykernels

python_backend = _pykernels

try:
    from . import _ckernels as compiled_backend
except ImportError:  # extension not built
    compiled_backend = None

_FUNCTIONS = (
    "star_mul",
    "star_inverse",
    "bullet_compose",
    "evaluate",
    "bullet_inverse_right",
    "bullet_inverse_left",
)


def available_backends():
    out = {"python": python_backend}
    if compiled_backend is not None:
        out["cython"] = compiled_backend
    return out


def use_backend(name: str) -> str:
    """Route the kernel functions of this module to backend ``name``; returns the previous name."""
    global BACKEND
    backends = available_backends()
    if name not in backends:
        raise ValueError(f"backend {name!r} is not available; have {sorted(backends)}")
    previous = globals().get("BACKEND")
    impl = backends[name]
    for fn in _FUNCTIONS:
        globals()[fn] = getattr(impl, fn)
    BACKEND = impl.NAME
    return previous


if compiled_backend is not None and os.environ.get("SLICEREG_BACKEND", "").lower() != "python":
    use_backend("cython")
else:
    use_backend("python")
