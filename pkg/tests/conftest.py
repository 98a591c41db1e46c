import os
import sys
from pathlib import Path

import numpy as np
import pytest

# 저장소 루트를 sys.path에 추가 (src 패키지 import용)
ROOT = Path(__file__).resolve().parents[1]
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from src.ibo.gp import GPEnsemble, gp_fit  # noqa: E402
from src.ibo.kernels import KernelKind, KernelSpec  # noqa: E402
from src.ibo.models import (AcquisitionConfig, ConfigPoint, McmcConfig,  # noqa: E402
                            Observation, RunConfig)


def make_observations(xs, ys, ts=None, costs=None):
    """1-D 또는 d-D 좌표 목록으로 관측 목록 생성"""
    out = []
    for i, (x, y) in enumerate(zip(xs, ys)):
        coords = tuple(np.atleast_1d(x))
        t = 1.0 if ts is None else ts[i]
        c = 1.0 if costs is None else costs[i]
        out.append(Observation(ConfigPoint(coords), t, float(y), float(c)))
    return out


def make_ensemble(xs, ys, lengthscale=0.2, amplitude=1.0, noise=1e-6, ts=None,
                  kind=KernelKind.OBJECTIVE, standardize=False, costs=None):
    data = make_observations(xs, ys, ts, costs)
    spec = KernelSpec.default(kind, data[0].x.dim, lengthscale=lengthscale, amplitude=amplitude)
    return GPEnsemble((gp_fit(data, spec, noise, standardize=standardize),))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def tiny_run():
    """빠른 테스트용 실행 설정 (작은 MCMC / 획득 함수)"""
    return RunConfig(
        n_init=3,
        n_bo=2,
        mcmc=McmcConfig(n_samples=2, burn_in=2, thin=1, warm_burn_in=1),
        acquisition=AcquisitionConfig(n_representers=5, n_mc=20, n_fantasy=2, n_candidates=10),
    )


@pytest.fixture(autouse=True)
def _log_dir(tmp_path, monkeypatch):
    monkeypatch.setenv('IBO_LOG_DIR', str(tmp_path / 'logs'))
    yield
    os.environ.pop('DEBUG', None)
