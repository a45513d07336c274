"""调制方案配置模型."""
import math
from enum import Enum
from typing import Optional

from pydantic import BaseModel, Field, model_validator

from app.core.errors import ConstraintError
from app.models.waveform import PrototypeKind


class SchemeKind(str, Enum):
    """调制方案."""
    SC_QPSK = "sc_qpsk"
    OFDM_QAM = "ofdm_qam"
    FBMC_OQAM = "fbmc_oqam"

    @property
    def is_multicarrier(self) -> bool:
        return self is not SchemeKind.SC_QPSK


class Equalization(str, Enum):
    """接收端均衡方式."""
    NONE = "none"
    ZF = "zf"


class SchemeConfig(BaseModel):
    """收发机配置.

    三种方案共用相同的 N 与 ν₀，因此比特率 R_b = N·ν₀·log2(M) 一致；
    SC-QPSK 的符号率取 N·ν₀。
    """
    scheme: SchemeKind = Field(..., description="调制方案")
    n_subcarriers: int = Field(default=128, ge=1, description="子载波数 N")
    subcarrier_spacing: float = Field(default=1e8, gt=0, description="子载波间隔 ν₀ (Hz)")
    qam_order: int = Field(default=4, description="QAM 阶数 M")
    cp_samples: int = Field(default=0, ge=0, description="循环前缀采样数（仅 OFDM）")
    prototype_kind: PrototypeKind = Field(default=PrototypeKind.SRRC, description="原型滤波器类型（SC 与 FBMC）")
    rolloff: float = Field(default=1.0, gt=0, le=1, description="SRRC 滚降系数")
    span_symbols: int = Field(default=4, ge=1, description="原型滤波器长度（符号数）")
    oversampling: int = Field(default=2, ge=1, description="过采样倍数")
    sc_band_offset_hz: Optional[float] = Field(default=None, description="SC 频带中心相对光载波的偏移 (Hz)，None 表示自动")

    model_config = {
        "frozen": True,
    }

    @model_validator(mode="after")
    def check_scheme_constraints(self):
        if self.qam_order not in (4, 16):
            raise ConstraintError("qam_order", f"qam_order 仅支持 4 或 16，当前为 {self.qam_order}")
        if self.scheme is SchemeKind.SC_QPSK and self.qam_order != 4:
            raise ConstraintError("qam_order", "SC-QPSK 只支持 qam_order = 4")
        if self.scheme is not SchemeKind.OFDM_QAM and self.cp_samples:
            raise ConstraintError("cp_samples", "循环前缀只适用于 OFDM/QAM")
        if self.scheme.is_multicarrier and self.oversampling < 2:
            raise ConstraintError("oversampling", "多载波方案要求 oversampling >= 2")
        if self.scheme is SchemeKind.FBMC_OQAM:
            if self.samples_per_slot % 2:
                raise ConstraintError("oversampling", "FBMC/OQAM 要求 N·oversampling 为偶数（τ₀ = T/2 为整数采样）")
            if self.prototype_kind is PrototypeKind.SRRC and self.span_symbols % 2:
                raise ConstraintError("span_symbols", "SRRC 原型要求 span_symbols 为偶数")
        return self

    @property
    def bits_per_symbol(self) -> int:
        return int(math.log2(self.qam_order))

    @property
    def bit_rate(self) -> float:
        return self.n_subcarriers * self.subcarrier_spacing * self.bits_per_symbol

    @property
    def bit_interval(self) -> float:
        return 1.0 / self.bit_rate

    @property
    def symbol_duration(self) -> float:
        """多载波符号周期 T = 1/ν₀（FBMC 的 τ₀ = T/2）."""
        return 1.0 / self.subcarrier_spacing

    @property
    def samples_per_slot(self) -> int:
        """一个多载波符号周期 T 内的采样数 L = N·oversampling."""
        return self.n_subcarriers * self.oversampling

    @property
    def sample_rate(self) -> float:
        return self.n_subcarriers * self.subcarrier_spacing * self.oversampling
