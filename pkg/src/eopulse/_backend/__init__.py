"""Kernel backend selection.

The compiled extension is preferred when importable; the pure-numpy kernels
are the fallback. Selection can be forced with the ``EOPULSE_BACKEND``
environment variable (``auto`` | ``compiled`` | ``python``) or switched at
runtime with :func:`use` (used by the equivalence tests and the benchmark).
"""

import os

from . import pykernels

_impls = {"python": pykernels}

try:
    from . import _fastkernels
    _impls["compiled"] = _fastkernels
except ImportError:
    _fastkernels = None

_requested = os.environ.get("EOPULSE_BACKEND", "auto").lower()
if _requested == "auto":
    _active_name = "compiled" if "compiled" in _impls else "python"
elif _requested in _impls:
    _active_name = _requested
elif _requested == "compiled":
    raise ImportError(
        "EOPULSE_BACKEND=compiled but the accelerator extension is not built"
    )
else:
    raise ValueError(f"unknown EOPULSE_BACKEND value: {_requested!r}")

_active = _impls[_active_name]


def available_backends():
    """Names of the importable kernel implementations."""
    return sorted(_impls)


def active_backend():
    """Name of the implementation currently dispatched to."""
    return _active_name


def use(name):
    """Switch the active kernel implementation ('python' or 'compiled')."""
    global _active, _active_name
    if name not in _impls:
        raise ValueError(f"backend {name!r} not available; have {available_backends()}")
    _active = _impls[name]
    _active_name = name


def chain_forward(props):
    return _active.chain_forward(props)


def chain_backward(props, tail):
    return _active.chain_backward(props, tail)


def evolve_density(props, kraus, rho0):
    return _active.evolve_density(props, kraus, rho0)
