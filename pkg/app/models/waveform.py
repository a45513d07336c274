"""原型滤波器（成形脉冲）数据模型."""
from dataclasses import dataclass
from enum import Enum

import numpy as np

from app.core.errors import InvalidArgumentError


class PrototypeKind(str, Enum):
    """原型滤波器类型（EGF/IOTA 可在此扩展）."""
    RECTANGULAR = "rectangular"
    SRRC = "srrc"


@dataclass(frozen=True)
class Prototype:
    """滤波器组各子载波共用的原型脉冲 g(t).

    taps 以“每符号 samples_per_symbol 个采样”离散化，符号周期取 1，
    因此单位能量表示为 sum(taps**2) / samples_per_symbol == 1。
    """
    taps: np.ndarray
    samples_per_symbol: int
    kind: PrototypeKind
    rolloff: float = 0.0
    span_symbols: int = 1

    def __post_init__(self):
        if self.samples_per_symbol < 1:
            raise InvalidArgumentError("samples_per_symbol 必须 >= 1")
        taps = np.array(self.taps, dtype=float)
        if taps.ndim != 1 or taps.size == 0:
            raise InvalidArgumentError("taps 必须为非空一维序列")
        taps.setflags(write=False)
        object.__setattr__(self, "taps", taps)

    @property
    def length(self) -> int:
        return int(self.taps.size)

    @property
    def energy(self) -> float:
        """以符号周期为单位的能量（采样周期 1/samples_per_symbol）."""
        return float(np.sum(self.taps ** 2) / self.samples_per_symbol)

    def time_reversed(self) -> "Prototype":
        return Prototype(
            taps=self.taps[::-1].copy(),
            samples_per_symbol=self.samples_per_symbol,
            kind=self.kind,
            rolloff=self.rolloff,
            span_symbols=self.span_symbols,
        )
