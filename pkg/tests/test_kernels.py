"""Cross-backend agreement: the numba kernels and the numpy reference
implementations must compute the same numbers on identical inputs."""
import os
import subprocess
import sys

import numpy as np
import pytest
from numpy.random import default_rng

from ordmnar.data import OrdinalDataset, augment_dataset
from ordmnar.kernels import jit, reference


def make_inputs(seed, n=50, J=3, p=2, miss_rate=0.3):
    rng = default_rng(seed)
    x = rng.normal(0, 1, (n, p))
    y = rng.integers(1, J + 1, n)
    miss = rng.random(n) < miss_rate
    y = np.where(miss, 0, y)
    if (y == 0).all() or (y > 0).sum() < J:
        return make_inputs(seed + 99, n, J, p, miss_rate)
    ds = OrdinalDataset.from_arrays(y, x, n_categories=J)
    aug = augment_dataset(ds)
    theta = np.sort(rng.uniform(-1.5, 1.5, J - 1))[::-1].copy()
    theta[:-1] += 0.2 * np.arange(J - 2, 0, -1) + 0.2
    beta = rng.uniform(-1, 1, p)
    alpha = rng.uniform(-0.8, 0.8, p + 2)
    w = rng.uniform(0.1, 1.0, aug.n_rows)
    return aug, theta, beta, alpha, w


@pytest.mark.parametrize("seed", range(8))
class TestBackendsAgree:
    def test_po_kernels(self, seed):
        aug, theta, beta, _, w = make_inputs(seed)
        f_r, ok_r = reference.po_loglik(theta, beta, aug.y, aug.x, w)
        f_j, ok_j = jit.po_loglik(theta, beta, aug.y, aug.x, w)
        assert ok_r == ok_j
        np.testing.assert_allclose(f_j, f_r, rtol=1e-14, atol=1e-14)

        fr, sr, hr, okr = reference.po_derivs(theta, beta, aug.y, aug.x, w)
        fj, sj, hj, okj = jit.po_derivs(theta, beta, aug.y, aug.x, w)
        assert okr == okj
        np.testing.assert_allclose(fj, fr, rtol=1e-14, atol=1e-14)
        np.testing.assert_allclose(sj, sr, rtol=1e-12, atol=1e-13)
        np.testing.assert_allclose(hj, hr, rtol=1e-12, atol=1e-13)

    def test_logit_kernels(self, seed):
        aug, _, _, alpha, w = make_inputs(seed)
        Z = aug.miss_design()
        r = aug.r.astype(np.float64)
        np.testing.assert_allclose(
            jit.logit_loglik(alpha, Z, r, w),
            reference.logit_loglik(alpha, Z, r, w), rtol=1e-14, atol=1e-14,
        )
        fr, sr, hr = reference.logit_derivs(alpha, Z, r, w)
        fj, sj, hj = jit.logit_derivs(alpha, Z, r, w)
        np.testing.assert_allclose(fj, fr, rtol=1e-14, atol=1e-14)
        np.testing.assert_allclose(sj, sr, rtol=1e-12, atol=1e-13)
        np.testing.assert_allclose(hj, hr, rtol=1e-12, atol=1e-13)

    def test_estep_and_obs_loglik(self, seed):
        aug, theta, beta, alpha, _ = make_inputs(seed)
        Z = aug.miss_design()
        args = (theta, beta, alpha, aug.y, aug.x, Z, aug.group_starts)
        w_r, ok_r = reference.estep_weights(*args)
        w_j, ok_j = jit.estep_weights(*args)
        assert ok_r and ok_j
        np.testing.assert_allclose(w_j, w_r, rtol=1e-14, atol=1e-15)
        np.testing.assert_allclose(
            jit.obs_loglik(*args), reference.obs_loglik(*args),
            rtol=1e-14, atol=1e-14,
        )


class TestInfeasiblePoints:
    def test_bad_cut_order_flags_both_backends(self):
        aug, theta, beta, alpha, w = make_inputs(123)
        theta_bad = theta[::-1].copy() if theta[0] > theta[-1] else theta + [0.0, 1.0]
        _, ok_r = reference.po_loglik(theta_bad, beta, aug.y, aug.x, w)
        _, ok_j = jit.po_loglik(theta_bad, beta, aug.y, aug.x, w)
        assert not ok_r and not ok_j
        args = (theta_bad, beta, alpha, aug.y, aug.x, aug.miss_design(), aug.group_starts)
        assert reference.obs_loglik(*args) == -np.inf
        assert jit.obs_loglik(*args) == -np.inf


class TestBackendSelection:
    def test_env_flag_forces_numpy(self):
        code = "import ordmnar.kernels as k; print(k.BACKEND)"
        env = dict(os.environ, ORDMNAR_NO_NUMBA="1")
        out = subprocess.run([sys.executable, "-c", code], env=env,
                             capture_output=True, text=True, check=True)
        assert out.stdout.strip() == "numpy"

    def test_default_is_numba_when_importable(self):
        env = {k: v for k, v in os.environ.items() if k != "ORDMNAR_NO_NUMBA"}
        code = "import ordmnar.kernels as k; print(k.BACKEND)"
        out = subprocess.run([sys.executable, "-c", code], env=env,
                             capture_output=True, text=True, check=True)
        assert out.stdout.strip() == "numba"
