import numpy as np
import pytest

from gapspec.jacobi import JacobiCoeffs, eig_tridiag, jacobi_eigh


@pytest.fixture(scope="session", autouse=True)
def warmup_jit():
    # compile the numba kernels once so timed tests measure work, not JIT
    J = JacobiCoeffs(np.ones(9), np.zeros(10))
    eig_tridiag(J)
    jacobi_eigh(J.dense())
    yield
