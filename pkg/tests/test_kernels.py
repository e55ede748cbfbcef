import os
import subprocess
import sys

import numpy as np
import pytest

from diracmaxwell import _kernels
from diracmaxwell.wave import SimConfig, generator, run

needs_numba = pytest.mark.skipif(not _kernels.HAVE_NUMBA, reason="numba not importable")


@pytest.fixture
def problem(rng):
    psi = rng.normal(size=(96, 4)) + 1j * rng.normal(size=(96, 4))
    A, B = generator(SimConfig(n_cells=96, mass_omega=1.3))
    return np.ascontiguousarray(psi), A, B


def test_stencil_differentiates_sine_to_fourth_order():
    errs = []
    for n in (32, 64):
        x = np.arange(n) * 2 * np.pi / n
        d = _kernels.central_diff_numpy(np.sin(x), n / (2 * np.pi))
        errs.append(np.max(np.abs(d - np.cos(x))))
    assert 14 < errs[0] / errs[1] < 18


@needs_numba
def test_rhs_backends_agree(problem):
    psi, A, B = problem
    a = _kernels.rhs_numpy(psi, A, B, 7.0)
    b = _kernels.rhs_numba(psi, A, B, 7.0)
    assert np.max(np.abs(a - b)) < 1e-12


@needs_numba
def test_rk4_backends_agree(problem):
    psi, A, B = problem
    a, ka = _kernels.rk4_step_numpy(psi, A, B, 0.01, 7.0)
    b, kb = _kernels.rk4_step_numba(psi, A, B, 0.01, 7.0)
    assert np.max(np.abs(a - b)) < 1e-12
    assert np.max(np.abs(ka - kb)) < 1e-12


@needs_numba
def test_full_run_backends_agree():
    cfg = SimConfig(n_cells=64, mass_omega=1.0, n_steps=100)
    prev = _kernels.set_backend("numpy")
    try:
        a, ta = run(cfg)
        _kernels.set_backend("numba")
        b, tb = run(cfg)
    finally:
        _kernels.set_backend(prev)
    assert np.max(np.abs(a.grid - b.grid)) < 1e-12
    assert np.max(np.abs(ta.total_energy - tb.total_energy)) < 1e-12


def test_set_backend_validation():
    with pytest.raises(ValueError):
        _kernels.set_backend("fortran")


def test_env_flag_selects_numpy():
    code = "from diracmaxwell import _kernels; print(_kernels.get_backend())"
    env = dict(os.environ, DIRACMAXWELL_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert out.stdout.strip() == "numpy"
