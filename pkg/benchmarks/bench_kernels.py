"""Compiled kernels against their numpy twins.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Both versions are called directly, so the result does not depend on
FRACSEMIGROUP_NO_NUMBA.  The first compiled call (JIT or cache load) is excluded.
"""
import argparse
import time

import numpy as np

from fracsemigroup import _kernels as K
from fracsemigroup._accel import USING_NUMBA


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def cases():
    rng = np.random.default_rng(0)
    x_jv = np.ascontiguousarray(rng.uniform(0.0, 200.0, 400_000))
    x_tail = np.ascontiguousarray(rng.uniform(20.0, 400.0, 20_000))
    vals = np.ascontiguousarray(rng.standard_normal(2_000_000))
    expo = np.ascontiguousarray(2.0 + 1.0 / (1.0 + rng.uniform(-20, 20, vals.size) ** 2))
    xi = np.ascontiguousarray(np.abs(2 * np.pi * np.fft.fftfreq(16384, d=40 / 16384)))
    sig = np.ascontiguousarray(np.sin(np.linspace(0, 40 * np.pi, 1 << 20)))
    return [
        ("jv(0.5, x)", lambda: K._nb_jv(0.5, x_jv), lambda: K._np_jv(0.5, x_jv)),
        ("oscillatory_tail", lambda: K._nb_oscillatory_tail(0.0, 1.5, x_tail),
         lambda: K._np_oscillatory_tail(0.0, 1.5, x_tail)),
        ("modular_sum", lambda: K._nb_modular_sum(vals, expo, 1e-3), lambda: K._np_modular_sum(vals, expo, 1e-3)),
        ("binomial_semigroup_symbol", lambda: K._nb_binomial_semigroup_symbol(0.5, 0.01, xi, 50_000, 1e-12),
         lambda: K._np_binomial_semigroup_symbol(0.5, 0.01, xi, 50_000, 1e-12)),
        ("periodic_cubic_shift", lambda: K._nb_periodic_cubic_shift(sig, 0.37),
         lambda: K._np_periodic_cubic_shift(sig, 0.37)),
    ]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not USING_NUMBA:
        print("numba disabled; only the numpy path is timed")
    print(f"{'kernel':<28}{'numba s':>12}{'numpy s':>12}{'speedup':>10}{'max |diff|':>14}")
    for name, nb, npf in cases():
        t_np, r_np = best_of(npf, args.repeat)
        if USING_NUMBA:
            nb()  # compile / load cache
            t_nb, r_nb = best_of(nb, args.repeat)
            diff = float(np.max(np.abs(np.asarray(r_nb) - np.asarray(r_np))))
            print(f"{name:<28}{t_nb:12.4f}{t_np:12.4f}{t_np / t_nb:10.1f}{diff:14.2e}")
        else:
            print(f"{name:<28}{'-':>12}{t_np:12.4f}{'-':>10}{'-':>14}")


if __name__ == "__main__":
    main()
