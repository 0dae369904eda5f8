"""Compare the compiled and numpy kernel backends.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import timeit

import numpy as np

from nkverify import _pykernels

try:
    from nkverify import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def cases(k):
    rng = np.random.default_rng(0)
    a, b = rng.normal(size=(2, 8))
    A, B = rng.normal(size=(2, 1000, 8))
    u, v = rng.normal(size=(2, 7))
    p0 = np.eye(7)[0]
    frame = np.eye(7)[:, 1:]
    rot = np.eye(7)
    x = np.full(6, 0.1)
    return {
        "oct_mul (single)": lambda: k.oct_mul(a, b),
        "oct_mul_batch (1000)": lambda: k.oct_mul_batch(A, B),
        "cross7 (single)": lambda: k.cross7(u, v),
        "sphere_chart_eval": lambda: k.sphere_chart_eval(p0, frame, rot, x),
    }


def end_to_end(k):
    # Nijenhuis tensor by finite differences: 12 chart evaluations
    from nkverify.chart import SphereChart

    chart = SphereChart(np.eye(7)[0], np.eye(7)[:, 1:])
    x = np.full(6, 0.1)

    def run():
        f = lambda y: k.sphere_chart_eval(chart.base_point, chart.frame, np.eye(7), y)[2]
        h = chart.fd_step
        e = np.eye(6)
        d = np.array([(f(x + h * e[l]) - f(x - h * e[l])) / (2 * h) for l in range(6)])
        j = f(x)
        t1 = np.einsum("li,lkj->kij", j, d)
        t3 = np.einsum("kl,ilj->kij", j, d)
        return t1 - t1.transpose(0, 2, 1) - (t3 - t3.transpose(0, 2, 1))

    return run


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=2000)
    args = parser.parse_args(argv)
    backends = [("python", _pykernels)]
    if _ckernels is not None:
        backends.append(("cython", _ckernels))
    else:
        print("compiled extension not available; timing the numpy backend only")
    rows = {}
    for name, k in backends:
        fns = cases(k)
        fns["nijenhuis_fd (end to end)"] = end_to_end(k)
        for case, fn in fns.items():
            n = max(args.repeat // (50 if "batch" in case or "end" in case else 1), 10)
            rows.setdefault(case, {})[name] = min(timeit.repeat(fn, number=n, repeat=3)) / n
    print(f"{'kernel':30s} {'python [us]':>12s} {'cython [us]':>12s} {'speedup':>8s}")
    for case, t in rows.items():
        py = t["python"] * 1e6
        cy = t.get("cython")
        if cy is None:
            print(f"{case:30s} {py:12.2f} {'-':>12s} {'-':>8s}")
        else:
            print(f"{case:30s} {py:12.2f} {cy * 1e6:12.2f} {py / (cy * 1e6):7.1f}x")


if __name__ == "__main__":
    main()
