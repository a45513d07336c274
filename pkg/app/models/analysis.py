"""功率代价解析模型相关的 Pydantic 数据模型."""
from enum import Enum

from pydantic import BaseModel, Field, model_validator


class TimeNormalization(str, Enum):
    """子载波代价公式中 T 的取法."""
    BIT_INTERVAL = "bit_interval"  # T = N·T_b
    SYMBOL_DURATION = "symbol_duration"  # T = 1/ν₀


class PenaltyModel(BaseModel):
    """解析功率代价模型参数."""
    coefficient_a: float = Field(..., gt=0, description="与脉冲形状、调制格式和接收机相关的系数 A")
    bit_interval: float = Field(..., gt=0, description="比特间隔 T_b (s)")
    symbol_duration: float = Field(..., gt=0, description="多载波符号周期 T (s)")
    n_subcarriers: int = Field(..., ge=1, description="子载波数 N")
    gamma: float = Field(default=0.5, gt=0, lt=1, description="PSP 功率分配比 γ")
    time_normalization: TimeNormalization = Field(default=TimeNormalization.BIT_INTERVAL, description="T 的归一化方式")

    model_config = {
        "frozen": True,
    }

    @property
    def subcarrier_period(self) -> float:
        """子载波公式中使用的 T."""
        if self.time_normalization is TimeNormalization.BIT_INTERVAL:
            return self.n_subcarriers * self.bit_interval
        return self.symbol_duration


class WidthPair(BaseModel):
    """输入 / 展宽后 RMS 脉宽."""
    delta1: float = Field(..., ge=0, description="输入 RMS 脉宽 δ₁ (s)")
    delta2: float = Field(..., ge=0, description="输出 RMS 脉宽 δ₂ (s)")

    @model_validator(mode="after")
    def check_order(self):
        if self.delta2 < self.delta1:
            raise ValueError(f"δ₂ ({self.delta2}) 不能小于 δ₁ ({self.delta1})")
        return self
