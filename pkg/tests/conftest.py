import numpy as np
import pytest


def random_symmetric(p: int, seed: int) -> np.ndarray:
    b = np.random.default_rng(seed).standard_normal((p, p))
    return (b + b.T) / 2.0


def random_spd(p: int, seed: int) -> np.ndarray:
    a = np.random.default_rng(seed).standard_normal((p, p))
    m = a @ a.T / p + 0.5 * np.eye(p)
    return (m + m.T) / 2.0


@pytest.fixture(scope="session", autouse=True)
def warm_jacobi_kernel():
    """Compile the Jacobi kernel once so timings elsewhere stay honest."""
    from covsel.symmat import jacobi_eigen

    jacobi_eigen(np.eye(3))
