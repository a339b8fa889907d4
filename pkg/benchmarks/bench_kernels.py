"""Compare the compiled and pure-Python kernel backends.

    python benchmarks/bench_kernels.py [--repeat N]

Each backend is imported in a fresh interpreter so the selection made at
import time is honoured.
"""
import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, timeit
import numpy as np
from bjarima import ArimaOrder, BACKEND, fit, simulate_arima
from bjarima import kernels

repeat = int(sys.argv[1])
rng = np.random.default_rng(0)
w = rng.normal(size=2000)
phi = np.array([0.5, -0.2, 0.1])
theta = np.array([0.3, 0.1])
x = simulate_arima(ArimaOrder(2, 1, 2), [0.5, -0.2], [0.3, 0.1], n=300, seed=1)

cases = {
    "css_objective n=2000 ARMA(3,2)": lambda: kernels.css_objective(w, phi, theta),
    "arma_filter n=2000 ARMA(3,2)": lambda: kernels.arma_filter(w, phi, theta),
    "fit ARIMA(2,1,2) n=300": lambda: fit(x, ArimaOrder(2, 1, 2), max_evals=4000),
}
out = {"backend": BACKEND, "times": {}}
for name, fn in cases.items():
    number = 1 if name.startswith("fit") else 200
    best = min(timeit.repeat(fn, number=number, repeat=repeat)) / number
    out["times"][name] = best
print(json.dumps(out))
"""


def run(pure: bool, repeat: int) -> dict:
    env = dict(os.environ)
    env.pop("BJARIMA_PURE_PYTHON", None)
    if pure:
        env["BJARIMA_PURE_PYTHON"] = "1"
    proc = subprocess.run([sys.executable, "-c", WORKER, str(repeat)],
                          env=env, capture_output=True, text=True, check=True)
    return json.loads(proc.stdout)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    compiled = run(False, args.repeat)
    python = run(True, args.repeat)
    if compiled["backend"] != "cython":
        print("compiled extension not built; both columns use the fallback")
    print(f"{'case':34s} {'compiled':>12s} {'python':>12s} {'ratio':>7s}")
    for name, t_py in python["times"].items():
        t_c = compiled["times"][name]
        print(f"{name:34s} {t_c * 1e6:10.1f}us {t_py * 1e6:10.1f}us {t_py / t_c:6.1f}x")


if __name__ == "__main__":
    main()
