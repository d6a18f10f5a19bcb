"""Compare the compiled tick kernel against the pure-Python twin.

Runs two workloads through each implementation:
  active: per-tick calls with chamber targets held away from the state,
          so every exponential update does work
  idle:   one run_idle call over a long quiet stretch, the case the
          compiled kernel exists for

Usage: python3 benchmarks/bench_kernel.py [--ticks N]
"""

import argparse
import math
import time
from array import array

from auxsim import _kernel_py

try:
    from auxsim import _kernel_cy
except ImportError:
    _kernel_cy = None

TAU_BODY_S = 0.08
TAU_FINGER_S = 0.18
TAU_FOLD_S = 0.05
TICK_S = 0.005
THETA_MAX_DEG = 144.0


def fresh_state():
    ch = array("d", [0.0] * 12)
    tg = array("d", [0.0] * 12)
    decay = array("d",
                  [math.exp(-TICK_S / TAU_BODY_S)] * 4
                  + [math.exp(-TICK_S / TAU_FINGER_S)] * 8)
    fold_f = array("d", [0.0, THETA_MAX_DEG, math.exp(-TICK_S / TAU_FOLD_S)])
    fold_i = array("i", [0, 1])
    return ch, tg, decay, fold_f, fold_i


def bench_active(impl, n_ticks):
    ch, tg, decay, fold_f, fold_i = fresh_state()
    # alternate finger targets each tick so contractions keep chasing
    t0 = time.perf_counter()
    for i in range(n_ticks):
        tg[4] = float(i & 1)
        tg[5] = float(1 - (i & 1))
        impl.tick(ch, tg, decay, fold_f, fold_i)
    return time.perf_counter() - t0, ch[4]


def bench_idle(impl, n_ticks):
    ch, tg, decay, fold_f, fold_i = fresh_state()
    t0 = time.perf_counter()
    done, ev = impl.run_idle(ch, tg, decay, fold_f, fold_i, n_ticks)
    dt = time.perf_counter() - t0
    assert done == n_ticks and ev == 0, "idle run hit an event"
    return dt, ch[4]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--ticks", type=int, default=1_000_000,
                    help="ticks per workload (default 1e6)")
    args = ap.parse_args()

    impls = [("python", _kernel_py)]
    if _kernel_cy is not None:
        impls.append(("cython", _kernel_cy))
    else:
        print("compiled kernel not built; benchmarking the fallback only")

    print(f"{args.ticks} ticks per workload\n")
    print(f"{'impl':<8} {'workload':<8} {'seconds':>9} {'ticks/s':>12}")
    rates = {}
    for name, impl in impls:
        for workload, fn in (("active", bench_active), ("idle", bench_idle)):
            dt, probe = fn(impl, args.ticks)
            rates[(name, workload)] = args.ticks / dt
            print(f"{name:<8} {workload:<8} {dt:9.3f} {args.ticks / dt:12.0f}")

    if _kernel_cy is not None:
        for workload in ("active", "idle"):
            speedup = rates[("cython", workload)] / rates[("python", workload)]
            print(f"\n{workload}: compiled is {speedup:.1f}x the fallback", end="")
        print()

        # the twins must agree bit for bit, not just fast vs slow
        sa = fresh_state()
        sb = fresh_state()
        for i in range(5000):
            sa[1][4] = sb[1][4] = float(i % 3 == 0)
            sa[1][1] = sb[1][1] = float(i % 200 < 60)
            eva = _kernel_py.tick(*sa)
            evb = _kernel_cy.tick(*sb)
            assert eva == evb
        assert bytes(sa[0]) == bytes(sb[0]) and bytes(sa[3]) == bytes(sb[3])
        print("twin check: 5000 mixed ticks bit-identical")


if __name__ == "__main__":
    main()
