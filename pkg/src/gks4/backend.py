"""Kernel backend selection.

The compiled extension is used when it imports; otherwise, or when
``GKS4_BACKEND=python`` is set, the numpy implementation is used.  Both
expose the same ``flux_batch`` signature.
"""

from __future__ import annotations

import logging
import os

import numpy as np

from . import flux as _pyflux
from .kinetics import GasModel

log = logging.getLogger(__name__)

try:
    if os.environ.get("GKS4_BACKEND", "").lower() == "python":
        raise ImportError("python backend requested")
    from . import _kernels
except ImportError as exc:  # pragma: no cover - exercised without a build
    _kernels = None
    log.info("compiled kernels unavailable (%s); using numpy fallback", exc)

NAME = "compiled" if _kernels is not None else "python"
_threads = int(os.environ.get("GKS4_THREADS", "1") or 1)


def set_threads(n: int) -> None:
    global _threads
    _threads = max(1, int(n))


def get_threads() -> int:
    return _threads


def _gas_args(gas: GasModel):
    exponent = gas.mu_exponent if gas.viscosity == "power" else 0.0
    return (gas.K, int(gas.viscous), gas.tau_eps, gas.tau_c, gas.mu0, gas.t0, exponent, gas.pr)


def flux_batch(wl, dl, wr, dr, d0, dt, gas: GasModel, backend: str | None = None, force=None):
    """Integrated face-frame fluxes over [0, dt] and [0, dt/2].

    ``wl, wr``: (5, N); ``dl, dr, d0``: (3, 5, N); ``force`` an optional
    face-frame acceleration.  Returns ``(full, half)``.
    """
    use = backend or NAME
    if use == "compiled":
        if _kernels is None:
            raise RuntimeError("compiled backend not built")
        c = np.ascontiguousarray
        return _kernels.gks_flux_batch(c(wl), c(dl), c(wr), c(dr), c(d0), float(dt),
                                       *_gas_args(gas), _threads,
                                       *(float(g) for g in (force if force is not None else (0, 0, 0))))
    return _pyflux.gks_flux_batch(wl, dl, wr, dr, d0, dt, gas, force)
