import numpy as np
import pytest

from src.ibo.errors import KernelError
from src.ibo.kernels import (KernelKind, KernelSpec, cost_task_factor, gram_matrix,
                             kernel_cost, kernel_objective, matern52, objective_task_factor)
from src.ibo.models import ConfigPoint


def test_matern52_identity_and_unit_distance():
    assert matern52([0.3, 0.7], [0.3, 0.7], [0.5, 2.0], 1.0) == pytest.approx(1.0)
    # r = 1: (1 + sqrt5 + 5/3) exp(-sqrt5)
    assert matern52([0.2], [0.7], [0.5], 1.0) == pytest.approx(0.52399, abs=1e-5)


def test_matern52_decays_far_away():
    assert matern52([0.0], [1.0], [0.02], 1.0) < 1e-20


def test_matern52_is_symmetric():
    a, b = [0.1, 0.9, 0.4], [0.6, 0.2, 0.3]
    assert matern52(a, b, [0.3, 0.4, 0.5], 1.3) == matern52(b, a, [0.3, 0.4, 0.5], 1.3)


def test_matern52_errors():
    with pytest.raises(KernelError):
        matern52([0.1, 0.2], [0.1], [1.0, 1.0], 1.0)
    with pytest.raises(KernelError):
        matern52([0.1], [0.2], [0.0], 1.0)
    with pytest.raises(KernelError):
        KernelSpec((1.0, -1.0), 1.0, 2.0, KernelKind.OBJECTIVE)


def test_objective_kernel_task_factor():
    spec = KernelSpec.default(KernelKind.OBJECTIVE, 2, lengthscale=0.3)
    x, x2 = ConfigPoint((0.2, 0.4)), ConfigPoint((0.5, 0.1))
    assert kernel_objective((x, 1.0), (x2, 1.0), spec) == pytest.approx(matern52(x, x2, spec.lengthscales, 1.0))
    assert kernel_objective((x, 0.0), (x, 0.0), spec) == pytest.approx(2.0)
    assert kernel_objective((x, 0.5), (x, 0.5), spec) == pytest.approx(1.0625)


def test_cost_kernel_task_factor():
    spec = KernelSpec.default(KernelKind.COST, 1)
    x = ConfigPoint((0.4,))
    assert kernel_cost((x, 1.0), (x, 1.0), spec) == pytest.approx(2.0)
    assert kernel_cost((x, 0.5), (x, 1.0), spec) == pytest.approx(1.5)
    assert cost_task_factor([0.0], [0.0])[0, 0] == 1.0


def test_task_factor_endpoints_are_exact():
    assert objective_task_factor([1.0], [1.0])[0, 0] == 1.0
    assert objective_task_factor([0.0], [0.0])[0, 0] == 2.0
    assert cost_task_factor([1.0], [1.0])[0, 0] == 2.0
    assert cost_task_factor([0.0], [0.0])[0, 0] == 1.0


def test_kernel_kind_mismatch_rejected():
    x = ConfigPoint((0.4,))
    with pytest.raises(KernelError):
        kernel_cost((x, 1.0), (x, 1.0), KernelSpec.default(KernelKind.OBJECTIVE, 1))


def test_task_out_of_range_rejected():
    spec = KernelSpec.default(KernelKind.OBJECTIVE, 1)
    x = ConfigPoint((0.4,))
    with pytest.raises(KernelError):
        kernel_objective((x, 1.2), (x, 1.0), spec)


@pytest.mark.parametrize('kind', [KernelKind.OBJECTIVE, KernelKind.COST])
def test_gram_matrix_is_positive_semidefinite(kind, rng):
    X = rng.uniform(size=(50, 3))
    T = rng.uniform(size=50)
    spec = KernelSpec.default(kind, 3, lengthscale=0.4, amplitude=1.5)
    K = gram_matrix(X, T, X, T, spec)
    assert np.allclose(K, K.T)
    assert np.linalg.eigvalsh(K).min() >= -1e-8
