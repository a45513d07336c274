"""测试共用的小规模方案配置."""
import numpy as np
import pytest

from app.models.scheme import SchemeConfig, SchemeKind
from app.models.waveform import PrototypeKind


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def ofdm_cfg() -> SchemeConfig:
    return SchemeConfig(scheme=SchemeKind.OFDM_QAM, n_subcarriers=8, oversampling=2)


@pytest.fixture
def fbmc_cfg() -> SchemeConfig:
    # L = 16，原型长度 4L + 1 = 65
    return SchemeConfig(scheme=SchemeKind.FBMC_OQAM, n_subcarriers=8, oversampling=2)


@pytest.fixture
def sc_cfg() -> SchemeConfig:
    return SchemeConfig(scheme=SchemeKind.SC_QPSK, n_subcarriers=8, oversampling=4)


@pytest.fixture
def sc_rect_cfg() -> SchemeConfig:
    return SchemeConfig(
        scheme=SchemeKind.SC_QPSK,
        n_subcarriers=8,
        oversampling=4,
        prototype_kind=PrototypeKind.RECTANGULAR,
    )
