"""Compare the compiled kernels with the numpy fallback.

    python benchmarks/bench_kernels.py [--sizes 8 32 128] [--reps 20000] [--campaign]

Kernel timings call both modules directly. The campaign timing runs the
bundled mini-corpus once per backend in a subprocess, since the backend is
picked at import time (LEAP_PURE_PYTHON=1 forces the fallback).
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from leap import _core_py

try:
    from leap import _core
except ImportError:
    _core = None

CAMPAIGN = """
import time
from leap import kernels
from leap.campaign import run_campaign
from leap.cli import bundled
from leap.dataset import load_dataset
from leap.lexicon import default_lexicon, default_stopwords
from leap.search import SearchConfig
from leap.victim import load_keyword_victim
ds = load_dataset(bundled("minicorpus.csv"))
v = load_keyword_victim(bundled("keyword_weights.json"))
args = (v, default_lexicon(), default_stopwords(), SearchConfig())
t = time.perf_counter()
r = run_campaign(ds, range(len(ds)), *args).report
print(kernels.BACKEND, time.perf_counter() - t, r.s_rate)
"""


def kernel_cases(mod, n, rng):
    v = rng.normal(size=n)
    x = rng.integers(0, 3, n).astype(np.int64)
    lb = rng.integers(0, 3, n).astype(np.int64)
    gb = rng.integers(0, 3, n).astype(np.int64)
    prob, u = np.empty(n), rng.random(n)
    w = rng.normal(size=(4 * n, 2))
    idx = rng.integers(-1, 4 * n, n).astype(np.int64)
    out = np.empty(2)
    budget = max(1, n // 4)

    def moves():
        xx = x.copy()
        mod.apply_moves(xx, lb, prob, u, int(np.count_nonzero(xx)), max(budget, int(np.count_nonzero(xx))))

    return {
        "velocity_update": lambda: mod.velocity_update(v.copy(), x, lb, gb, 0.5, 1.0),
        "adoption_probabilities": lambda: mod.adoption_probabilities(v, prob),
        "apply_moves": moves,
        "linear_scores": lambda: mod.linear_scores(w, idx, out),
        "softmax": lambda: mod.softmax(out, np.empty(2)),
    }


def bench_kernels(sizes, reps):
    mods = [("python", _core_py)] + ([("cython", _core)] if _core is not None else [])
    print(f"{'kernel':<24}{'n':>6}" + "".join(f"{name + ' us':>12}" for name, _ in mods) + f"{'speedup':>9}")
    for n in sizes:
        per = {}
        for name, mod in mods:
            cases = kernel_cases(mod, n, np.random.default_rng(0))
            for k, fn in cases.items():
                per.setdefault(k, []).append(min(timeit.repeat(fn, number=reps, repeat=3)) / reps * 1e6)
        for k, ts in per.items():
            speed = f"{ts[0] / ts[1]:>8.1f}x" if len(ts) > 1 else ""
            print(f"{k:<24}{n:>6}" + "".join(f"{t:>12.2f}" for t in ts) + speed)


def bench_campaign():
    for pure in ("1", "0"):
        env = dict(os.environ, LEAP_PURE_PYTHON=pure)
        out = subprocess.run([sys.executable, "-c", CAMPAIGN], env=env, capture_output=True, text=True, check=True)
        backend, secs, s_rate = out.stdout.split()
        print(f"campaign  backend={backend:<7} {float(secs):.2f}s  s_rate={float(s_rate):.3f}")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", type=int, nargs="+", default=[8, 32, 128])
    ap.add_argument("--reps", type=int, default=20000)
    ap.add_argument("--campaign", action="store_true", help="also time a full mini-corpus campaign per backend")
    args = ap.parse_args()
    if _core is None:
        print("compiled kernels not built; timing the numpy fallback only")
    bench_kernels(args.sizes, args.reps)
    if args.campaign:
        bench_campaign()


if __name__ == "__main__":
    main()
