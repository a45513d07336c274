"""采样信号、符号网格与偏振信号的数据模型."""
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from app.core.errors import InvalidArgumentError


def _readonly(values: np.ndarray) -> np.ndarray:
    values.setflags(write=False)
    return values


@dataclass(frozen=True)
class SampledSignal:
    """复基带采样波形.

    Attributes:
        samples: 复数采样序列（只读）
        sample_rate: 采样率 (Hz)
        epoch_offset: 有效帧在 samples 中的起始采样位置
        center_frequency: 基带直流对应的物理频率偏移 (Hz)，信道按 f + center_frequency 计算时延相位
        payload_length: 有效帧长度（采样数），None 表示直到序列末尾
    """
    samples: np.ndarray
    sample_rate: float
    epoch_offset: int = 0
    center_frequency: float = 0.0
    payload_length: Optional[int] = None

    def __post_init__(self):
        samples = np.array(self.samples, dtype=complex)
        if samples.ndim != 1:
            raise InvalidArgumentError("samples 必须为一维序列")
        if not self.sample_rate > 0:
            raise InvalidArgumentError(f"sample_rate 必须 > 0，当前为 {self.sample_rate}")
        if not np.all(np.isfinite(samples)):
            raise InvalidArgumentError("samples 含有 NaN 或 Inf")
        if self.epoch_offset < 0 or self.epoch_offset > samples.size:
            raise InvalidArgumentError(f"epoch_offset 越界: {self.epoch_offset}")
        if self.payload_length is not None and self.epoch_offset + self.payload_length > samples.size:
            raise InvalidArgumentError("payload_length 超出信号长度")
        object.__setattr__(self, "samples", _readonly(samples))

    def __len__(self) -> int:
        return int(self.samples.size)

    @property
    def payload(self) -> np.ndarray:
        """有效帧采样（去除信道补零）."""
        stop = len(self) if self.payload_length is None else self.epoch_offset + self.payload_length
        return self.samples[self.epoch_offset:stop]

    @property
    def energy(self) -> float:
        return float(np.sum(np.abs(self.samples) ** 2))

    @property
    def mean_power(self) -> float:
        return self.energy / len(self) if len(self) else 0.0

    def with_samples(self, samples: np.ndarray, **changes) -> "SampledSignal":
        return replace(self, samples=samples, **changes)


@dataclass(frozen=True)
class SymbolGrid:
    """调制符号矩阵 a_{n,k}（行：子载波 n，列：时隙 k）.

    staggered=True 表示 OQAM 交错后的实数半符号网格。
    erased 标记迫零均衡时增益为 0 的子载波（擦除）。
    """
    values: np.ndarray
    staggered: bool = False
    erased: Optional[np.ndarray] = field(default=None)

    def __post_init__(self):
        values = np.array(self.values)
        if values.ndim != 2:
            raise InvalidArgumentError(f"符号网格必须为二维矩阵，当前维度 {values.ndim}")
        if self.staggered:
            if np.iscomplexobj(values) and np.any(np.imag(values) != 0):
                raise InvalidArgumentError("交错网格只能包含实数")
            values = np.real(values).astype(float)
        else:
            values = values.astype(complex)
        erased = np.zeros(values.shape[0], dtype=bool) if self.erased is None else np.array(self.erased, dtype=bool)
        if erased.shape != (values.shape[0],):
            raise InvalidArgumentError("erased 长度必须等于子载波数")
        object.__setattr__(self, "values", _readonly(values))
        object.__setattr__(self, "erased", _readonly(erased))

    @property
    def n_subcarriers(self) -> int:
        return int(self.values.shape[0])

    @property
    def n_slots(self) -> int:
        return int(self.values.shape[1])


@dataclass(frozen=True)
class PolarizedSignal:
    """两个正交主偏振态 (PSP) 轴上的信号分量."""
    component1: SampledSignal
    component2: SampledSignal

    def __post_init__(self):
        if len(self.component1) != len(self.component2):
            raise InvalidArgumentError("两个偏振分量长度必须一致")
        if self.component1.sample_rate != self.component2.sample_rate:
            raise InvalidArgumentError("两个偏振分量采样率必须一致")

    @property
    def energy(self) -> float:
        return self.component1.energy + self.component2.energy
