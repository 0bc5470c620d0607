from __future__ import annotations

import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ptwist import _kernels

needs_numba = pytest.mark.skipif(not _kernels.NUMBA_AVAILABLE, reason="numba not installed")


@needs_numba
@settings(max_examples=80, deadline=None)
@given(
    st.sampled_from([2, 3, 7, 32003, 2**31 - 1]),
    st.integers(1, 12),
    st.integers(1, 12),
    st.integers(0, 2**32 - 1),
)
def test_backends_agree(p, rows, cols, seed):
    rng = np.random.default_rng(seed)
    a = rng.integers(0, p, (rows, cols), dtype=np.int64)
    # sprinkle zeros so pivots get skipped
    a[rng.random((rows, cols)) < 0.4] = 0
    x, y = a.copy(), a.copy()
    px = _kernels.rref_modp_numpy(x, p)
    py = _kernels.rref_modp_numba(y, p)
    assert np.array_equal(px, py)
    assert np.array_equal(x, y)


def test_numpy_kernel_reduced_form():
    a = np.array([[2, 4, 1], [1, 2, 4]], dtype=np.int64)
    piv = _kernels.rref_modp_numpy(a, 5)
    assert list(piv) == [0, 2]
    assert a.tolist() == [[1, 2, 0], [0, 0, 1]]


def test_empty_matrix():
    assert _kernels.rref_modp(np.zeros((0, 3), dtype=np.int64), 7).size == 0


@pytest.mark.parametrize("flag,expected", [("0", "False"), ("off", "False"), ("1", str(_kernels.NUMBA_AVAILABLE))])
def test_env_flag_selects_backend(flag, expected):
    env = dict(os.environ, PTWIST_NUMBA=flag)
    out = subprocess.run(
        [sys.executable, "-c", "from ptwist import _kernels; print(_kernels.USE_NUMBA)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == expected
