"""Time the numba and numpy RK4 kernels on the same plane-wave grid.

    python benchmarks/bench_kernels.py [--cells 256 1024 4096] [--steps 200]
"""
import argparse
import time

import numpy as np

from diracmaxwell import _kernels
from diracmaxwell.wave import PlaneWave, SimConfig, generator, initial_state


def time_backend(name, psi, A, B, dt, inv_dx, steps):
    _kernels.set_backend(name)
    _kernels.rk4_step(psi, A, B, dt, inv_dx)  # compile / warm caches
    t0 = time.perf_counter()
    out = psi
    for _ in range(steps):
        out, _ = _kernels.rk4_step(out, A, B, dt, inv_dx)
    return time.perf_counter() - t0, out


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--cells", type=int, nargs="+", default=[256, 1024, 4096])
    p.add_argument("--steps", type=int, default=200)
    p.add_argument("--mass-omega", type=float, default=1.0)
    args = p.parse_args(argv)
    backends = ["numpy"] + (["numba"] if _kernels.HAVE_NUMBA else [])
    previous = _kernels.get_backend()
    print("%8s %12s %12s %9s %12s" % ("cells", "numpy [s]", "numba [s]", "speedup", "max |diff|"))
    try:
        for n in args.cells:
            cfg = SimConfig(n_cells=n, mass_omega=args.mass_omega, initial=PlaneWave(2))
            A, B = generator(cfg)
            psi = np.ascontiguousarray(initial_state(cfg).grid)
            res = {b: time_backend(b, psi, A, B, cfg.dt, 1.0 / cfg.dx, args.steps) for b in backends}
            t_np, out_np = res["numpy"]
            if "numba" in res:
                t_nb, out_nb = res["numba"]
                diff = float(np.max(np.abs(out_np - out_nb)))
                print("%8d %12.4f %12.4f %8.1fx %12.2e" % (n, t_np, t_nb, t_np / t_nb, diff))
            else:
                print("%8d %12.4f %12s %9s %12s" % (n, t_np, "-", "-", "-"))
    finally:
        _kernels.set_backend(previous)


if __name__ == "__main__":
    main()
