"""Compare the numba kernels with the pure-numpy fallback.

The backend is fixed at import time, so each backend runs in its own
subprocess with ``COLLAPSE_BOUND_NUMBA`` set accordingly.

    python benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import json
import os
import subprocess
import sys
import timeit

WORKER = r"""
import json, math, sys, timeit
import numpy as np
from collapse_bound import csl, electromech
from collapse_bound._jit import backend
from collapse_bound.dynamics import ModeRegister, NoiseRates, System, single_phonon_state
from collapse_bound.numerics import bessel_j, bessel_i_scaled, erfc

repeat = int(sys.argv[1])
xs = np.linspace(0.01, 200.0, 20000)
reg = ModeRegister.from_modes(electromech.register_modes_around(
    240e-6, electromech.PiezoQubitParams(v_l=6346.0)))
gen = System(reg, NoiseRates()).generator
rho = single_phonon_state(reg)
geom = csl.ResonatorGeometry.from_height(35e-6, 240e-6, 503, 2648.0, 6.65e9)

cases = {
    "bessel_j0 x20000": lambda: bessel_j(0, xs),
    "bessel_i0e x20000": lambda: bessel_i_scaled(0, xs),
    "erfc x20000": lambda: erfc(xs - 100.0),
    "longitudinal_integral": lambda: csl.longitudinal_integral(9.5e-7, 1e-7),
    "cross_section": lambda: csl.cross_section(geom, 1e-7),
    "lindblad_rhs dim128": lambda: gen(rho),
}
out = {"backend": backend()}
for name, fn in cases.items():
    fn()  # warm-up (JIT compile / cache load)
    n = 5
    best = min(timeit.repeat(fn, number=n, repeat=repeat)) / n
    out[name] = best
print(json.dumps(out))
"""


def run(flag, repeat):
    env = dict(os.environ, COLLAPSE_BOUND_NUMBA=flag)
    res = subprocess.run([sys.executable, "-c", WORKER, str(repeat)], env=env,
                         capture_output=True, text=True, check=True)
    return json.loads(res.stdout.strip().splitlines()[-1])


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    fast = run("1", args.repeat)
    slow = run("0", args.repeat)
    names = [k for k in fast if k != "backend"]
    width = max(len(n) for n in names)
    print(f"{'kernel'.ljust(width)}  {'numba (s)':>11}  {'numpy (s)':>11}  {'speedup':>8}")
    for n in names:
        print(f"{n.ljust(width)}  {fast[n]:11.3e}  {slow[n]:11.3e}  {slow[n] / fast[n]:8.1f}")


if __name__ == "__main__":
    main()
