"""一阶偏振模色散 (PMD) 状态模型."""
import math
from typing import Tuple

import numpy as np
from pydantic import BaseModel, Field

# 2×2 复数 Jones 矩阵
JonesMatrix = np.ndarray


class PmdState(BaseModel):
    """一阶 PMD 实现：DGD Δτ 与主偏振态功率分配比 γ.

    γ 为主参数；azimuth / ellipticity 只参与 Jones 矩阵计算，
    stokes_half_angle ψ 由 γ = cos²ψ 推出。
    """
    dgd: float = Field(default=0.0, ge=0, description="差分群时延 Δτ (s)")
    gamma: float = Field(default=0.5, ge=0, le=1, description="快轴 PSP 功率分配比 γ")
    azimuth: float = Field(default=0.0, description="快轴 PSP 方位角 θ (rad)")
    ellipticity: float = Field(default=0.0, description="快轴 PSP 椭圆率角 φ (rad)")
    carrier_phase: Tuple[float, float] = Field(default=(0.0, 0.0), description="两路径的静态载波相位 (rad)")

    model_config = {
        "frozen": True,
    }

    @classmethod
    def from_stokes_half_angle(cls, psi: float, **kwargs) -> "PmdState":
        """由快轴 PSP 与输入偏振态夹角的一半 ψ 构造（γ = cos²ψ）."""
        return cls(gamma=math.cos(psi) ** 2, **kwargs)

    @property
    def stokes_half_angle(self) -> float:
        return math.acos(math.sqrt(self.gamma))

    @property
    def c1(self) -> float:
        return math.sqrt(self.gamma)

    @property
    def c2(self) -> float:
        return math.sqrt(1.0 - self.gamma)
