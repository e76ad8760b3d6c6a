"""Compare the compiled and pure-Python ball kernels.

Times the oracle translation length of every reduced word up to a given
syllable length on a ball of the thistle for Z2*Z3*F1, once per backend.

    python3 benchmarks/bench_kernels.py [--radius R] [--max-len L] [--repeat N]
"""
import argparse
import time

from outerfp import _kernels_py
from outerfp.bass_serre import build_ball, oracle_translation_length
from outerfp.factor_systems import build_thistle
from outerfp.groups import cyclic
from outerfp.words import enumerate_words

try:
    from outerfp import _kernels as _kernels_c
except ImportError:
    _kernels_c = None


def use_backend(mod):
    # bass_serre looks the kernels up through outerfp.kernels at call time
    from outerfp import kernels

    kernels.Context, kernels.act, kernels.displacements = mod.Context, mod.act, mod.displacements
    kernels.BACKEND = "cython" if mod is _kernels_c else "python"


def run(radius, max_len):
    X = build_thistle([cyclic(2), cyclic(3)], 1, ["1/2", "1/3", "1/6"])
    ball = build_ball(X, radius)
    words = [u for u in enumerate_words(X, max_len) if u.syllables]
    t0 = time.perf_counter()
    values = [oracle_translation_length(u, ball) for u in words]
    return time.perf_counter() - t0, len(ball), len(words), values


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--radius", default="2")
    ap.add_argument("--max-len", type=int, default=4)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = [("python", _kernels_py)] + ([("cython", _kernels_c)] if _kernels_c else [])
    results = {}
    for name, mod in backends:
        use_backend(mod)
        best = None
        for _ in range(args.repeat):
            dt, nv, nw, values = run(args.radius, args.max_len)
            best = dt if best is None else min(best, dt)
        results[name] = (best, values)
        print(f"{name:7s} ball={nv} vertices words={nw} best={best:.3f}s")
    if "cython" in results:
        assert results["cython"][1] == results["python"][1], "backends disagree"
        print(f"speedup {results['python'][0] / results['cython'][0]:.1f}x (results identical)")
    else:
        print("compiled kernels not built; only the pure-Python backend was timed")


if __name__ == "__main__":
    main()
