"""Compare the jitted and pure-numpy matching kernels.

Runs the same workload in two subprocesses (CXGMINER_NO_NUMBA toggled),
checks the outputs agree, and reports throughput.

    python3 benchmarks/bench_match.py [--lines 2000] [--constructions 500]
"""

import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, time
import numpy as np
from cxgminer import _kernels

n_lines, n_cons = json.loads(sys.argv[1])
rng = np.random.default_rng(0)

kinds, fillers, offsets = [], [], [0]
for _ in range(n_cons):
    m = int(rng.integers(3, 7))
    kinds.extend(int(k) for k in rng.integers(0, 3, size=m))
    fillers.extend(int(f) for f in rng.integers(0, 30, size=m))
    offsets.append(len(kinds))
kinds = np.asarray(kinds, dtype=np.int64)
fillers = np.asarray(fillers, dtype=np.int64)
offsets = np.asarray(offsets, dtype=np.int64)

lines = []
for _ in range(n_lines):
    arr = rng.integers(-1, 30, size=(100, 3)).astype(np.int64)
    arr[:, 1] = rng.integers(0, 14, size=100)
    lines.append(arr)

# warmup (compilation on the jitted path)
_kernels.match_all(lines[0], kinds, fillers, offsets)

t0 = time.perf_counter()
total = 0
checksum = 0
for arr in lines:
    out = _kernels.match_all(arr, kinds, fillers, offsets)
    total += out.shape[0]
    checksum += int(out.sum())
elapsed = time.perf_counter() - t0

print(json.dumps({
    "using_numba": _kernels.USING_NUMBA,
    "elapsed_s": elapsed,
    "lines_per_s": n_lines / elapsed,
    "matches": total,
    "checksum": checksum,
}))
"""


def run(flag, payload):
    env = dict(os.environ, CXGMINER_NO_NUMBA=flag)
    proc = subprocess.run([sys.executable, "-c", WORKER, json.dumps(payload)],
                          env=env, capture_output=True, text=True, check=True)
    return json.loads(proc.stdout)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lines", type=int, default=2000)
    ap.add_argument("--constructions", type=int, default=500)
    args = ap.parse_args()
    payload = [args.lines, args.constructions]

    jit = run("0", payload)
    npy = run("1", payload)

    if (jit["matches"], jit["checksum"]) != (npy["matches"], npy["checksum"]):
        raise SystemExit("kernel outputs disagree!")

    for name, r in (("numba", jit), ("numpy", npy)):
        tag = "jit" if r["using_numba"] else "fallback"
        print(f"{name:6s} ({tag:8s}): {r['elapsed_s']:.3f} s, "
              f"{r['lines_per_s']:.0f} lines/s, {r['matches']} matches")
    print(f"speedup: {npy['elapsed_s'] / jit['elapsed_s']:.2f}x")


if __name__ == "__main__":
    main()
