"""Compare the compiled and numpy RK4 Lindblad kernels on a full swap window.

    python3 benchmarks/bench_kernel.py [--repeat 5]

Prints the best-of-N wall time for each backend, the speedup and the largest
elementwise difference between the two trajectories.
"""

import argparse
import time

import numpy as np

from ramanswap import kernel
from ramanswap import dynamics as dyn
from ramanswap.model import find_impedance_match, device_drive, device_system
from ramanswap.qmath import PureQubitState


def problem(t1_ns=900.0):
    """Kernel arguments for a photon->atom swap at the matched drive."""
    p = device_system("p2a", t1_ns=t1_ns)
    d = find_impedance_match(p, device_drive("p2a")).drive
    timing = dyn.SwapTiming()
    pulse = dyn.photon_pulse(PureQubitState.from_amplitudes(1, 1, "photon"), np.sqrt(0.1),
                             dyn.raman_carriers(p, d), timing)
    captured = {}
    real = kernel.rk4_lindblad

    def grab(*args):
        captured["args"] = args
        return real(*args)

    kernel.rk4_lindblad = grab
    try:
        dyn.evolve(p, timing.ramp(d), pulse, PureQubitState(1, 0, "atom"),
                   dyn.NoiseParams(t1_atom=t1_ns))
    finally:
        kernel.rk4_lindblad = real
    return captured["args"]


def best_time(fn, args, repeat):
    best, out = np.inf, None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    kargs = problem()
    steps = (len(kargs[5]) - 1) // 2
    print(f"problem: {kargs[0].shape[0]}-dim density matrix, {steps} RK4 steps, "
          f"{len(kargs[4])} jump operators")
    t_py, r_py = best_time(kernel.rk4_lindblad_python, kargs, args.repeat)
    print(f"python  : {t_py * 1e3:9.2f} ms")
    if kernel.BACKEND != "cython":
        print("compiled: not built (pure-python fallback active)")
        return
    t_cy, r_cy = best_time(kernel.rk4_lindblad, kargs, args.repeat)
    print(f"compiled: {t_cy * 1e3:9.2f} ms")
    print(f"speedup : {t_py / t_cy:9.2f}x")
    print(f"max |diff|: {np.max(np.abs(r_py - r_cy)):.3g}")


if __name__ == "__main__":
    main()
