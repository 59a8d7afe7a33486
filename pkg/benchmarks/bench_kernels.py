"""Time the numba kernels against the pure-numpy reference path.

Run as a script; prints per-kernel timings for both backends on the same
inputs, plus one end-to-end EM fit per backend. The two backends are
required to agree; this only measures speed. Backend selection happens at
import time, so each backend runs in its own subprocess.

    python3 benchmarks/bench_kernels.py            # orchestrates both
    python3 benchmarks/bench_kernels.py --backend numpy   # one child run
"""
import argparse
import json
import os
import subprocess
import sys
import time
from pathlib import Path

import numpy as np

REPEATS = 200
N = 1000


def build_inputs():
    sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))
    from ordmnar.data import augment_dataset
    from ordmnar.simlab import preset
    from ordmnar.simlab.generate import gen_replicate

    cfg = preset("t2", n=N)
    rng = np.random.default_rng(np.random.SeedSequence((20260816, 0)))
    observed, _ = gen_replicate(cfg.n, cfg.po_true, cfg.miss_true, rng)
    aug = augment_dataset(observed)
    gamma = np.concatenate([cfg.po_true.as_vector(), cfg.miss_true.alpha])
    return observed, aug, cfg, gamma


def time_call(fn, *args, repeats=REPEATS):
    fn(*args)  # warmup (jit compilation on the numba path)
    t0 = time.perf_counter()
    for _ in range(repeats):
        fn(*args)
    return (time.perf_counter() - t0) / repeats


def run_backend():
    import ordmnar.kernels as K

    observed, aug, cfg, gamma = build_inputs()
    k = cfg.n_categories - 1
    theta, beta, alpha = gamma[:k], gamma[k:k + 3], gamma[k + 3:]
    y, X, Z, starts = aug.y, aug.x, aug.miss_design(), aug.group_starts
    w = np.ones_like(y, dtype=np.float64)
    r = aug.r.astype(np.float64)

    timings = {"backend": K.BACKEND}
    timings["po_loglik"] = time_call(K.po_loglik, theta, beta, y, X, w)
    timings["po_derivs"] = time_call(K.po_derivs, theta, beta, y, X, w)
    timings["logit_loglik"] = time_call(K.logit_loglik, alpha, Z, r, w)
    timings["logit_derivs"] = time_call(K.logit_derivs, alpha, Z, r, w)
    timings["estep_weights"] = time_call(K.estep_weights, theta, beta, alpha, y, X, Z, starts)
    timings["obs_loglik"] = time_call(K.obs_loglik, theta, beta, alpha, y, X, Z, starts)

    from ordmnar.em import em_fit
    t0 = time.perf_counter()
    em_fit(observed)
    timings["em_fit_once"] = time.perf_counter() - t0
    print(json.dumps(timings))


def orchestrate():
    results = []
    for backend, env_val in (("numba", "0"), ("numpy", "1")):
        env = dict(os.environ, ORDMNAR_NO_NUMBA=env_val)
        out = subprocess.run(
            [sys.executable, __file__, "--backend", backend],
            env=env, capture_output=True, text=True, check=True,
        )
        results.append(json.loads(out.stdout.strip().splitlines()[-1]))
    names = [k for k in results[0] if k != "backend"]
    width = max(len(n) for n in names)
    print(f"{'kernel':<{width}}  {'numba':>12}  {'numpy':>12}  {'speedup':>8}")
    for name in names:
        a, b = results[0][name], results[1][name]
        print(f"{name:<{width}}  {a * 1e3:>10.3f}ms  {b * 1e3:>10.3f}ms  {b / a:>7.1f}x")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--backend", default=None, help="internal: run one backend child")
    args = ap.parse_args()
    if args.backend:
        run_backend()
    else:
        orchestrate()


if __name__ == "__main__":
    main()
