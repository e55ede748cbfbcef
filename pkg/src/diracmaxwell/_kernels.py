"""Hot loops of the 1D integrator: periodic 4th-order stencil and classical RK4.

Both a numba and a pure-numpy implementation are provided. numba is used when
it imports and ``DIRACMAXWELL_DISABLE_NUMBA`` is unset (or "0"); otherwise the
numpy path runs. The two agree to rounding, not bit for bit.
"""
import os

import numpy as np

try:
    from numba import njit
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is an install dependency
    HAVE_NUMBA = False

JIT_OPTIONS = {"nogil": True, "cache": True}

_backend = "numpy"


def _default_backend():
    disabled = os.environ.get("DIRACMAXWELL_DISABLE_NUMBA", "0") not in ("", "0")
    return "numba" if HAVE_NUMBA and not disabled else "numpy"


def get_backend() -> str:
    return _backend


def set_backend(name: str) -> str:
    """Select "numba" or "numpy"; returns the previous backend."""
    global _backend
    if name not in ("numba", "numpy"):
        raise ValueError("unknown backend %r" % name)
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not importable")
    previous, _backend = _backend, name
    return previous


def central_diff_numpy(u, inv_dx):
    """4th-order centered first derivative along axis 0, periodic."""
    return (8.0 * (np.roll(u, -1, 0) - np.roll(u, 1, 0))
            - (np.roll(u, -2, 0) - np.roll(u, 2, 0))) * (inv_dx / 12.0)


def rhs_numpy(psi, A, B, inv_dx):
    return central_diff_numpy(psi, inv_dx) @ A.T + psi @ B.T


def rk4_step_numpy(psi, A, B, dt, inv_dx):
    k1 = rhs_numpy(psi, A, B, inv_dx)
    k2 = rhs_numpy(psi + (0.5 * dt) * k1, A, B, inv_dx)
    k3 = rhs_numpy(psi + (0.5 * dt) * k2, A, B, inv_dx)
    k4 = rhs_numpy(psi + dt * k3, A, B, inv_dx)
    return psi + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4), k1


if HAVE_NUMBA:
    @njit(**JIT_OPTIONS)
    def _rhs_nb(psi, A, B, inv_dx, out):
        n = psi.shape[0]
        m = psi.shape[1]
        w = inv_dx / 12.0
        d = np.empty(m, dtype=np.complex128)
        for j in range(n):
            jp1 = (j + 1) % n
            jp2 = (j + 2) % n
            jm1 = (j - 1) % n
            jm2 = (j - 2) % n
            for q in range(m):
                d[q] = (8.0 * (psi[jp1, q] - psi[jm1, q]) - (psi[jp2, q] - psi[jm2, q])) * w
            for r in range(m):
                acc = 0j
                for q in range(m):
                    acc += A[r, q] * d[q] + B[r, q] * psi[j, q]
                out[j, r] = acc

    @njit(**JIT_OPTIONS)
    def _rk4_nb(psi, A, B, dt, inv_dx):
        k1 = np.empty_like(psi)
        k2 = np.empty_like(psi)
        k3 = np.empty_like(psi)
        k4 = np.empty_like(psi)
        _rhs_nb(psi, A, B, inv_dx, k1)
        _rhs_nb(psi + (0.5 * dt) * k1, A, B, inv_dx, k2)
        _rhs_nb(psi + (0.5 * dt) * k2, A, B, inv_dx, k3)
        _rhs_nb(psi + dt * k3, A, B, inv_dx, k4)
        return psi + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4), k1

    def rhs_numba(psi, A, B, inv_dx):
        out = np.empty_like(psi)
        _rhs_nb(psi, A, B, inv_dx, out)
        return out

    def rk4_step_numba(psi, A, B, dt, inv_dx):
        return _rk4_nb(psi, A, B, dt, inv_dx)


def rhs(psi, A, B, inv_dx):
    if _backend == "numba":
        return rhs_numba(psi, A, B, inv_dx)
    return rhs_numpy(psi, A, B, inv_dx)


def rk4_step(psi, A, B, dt, inv_dx):
    """One RK4 step; returns (new state, right-hand side at the old state)."""
    if _backend == "numba":
        return rk4_step_numba(psi, A, B, dt, inv_dx)
    return rk4_step_numpy(psi, A, B, dt, inv_dx)


_backend = _default_backend()
