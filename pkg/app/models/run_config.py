"""运行配置模型（key = value 配置文档的校验结果）."""
from typing import Dict, List, Optional

import numpy as np
from pydantic import BaseModel, Field, ValidationError, ValidationInfo, field_validator, model_validator

from app.core.errors import ConstraintError
from app.models.analysis import PenaltyModel, TimeNormalization
from app.models.scheme import Equalization, SchemeConfig, SchemeKind
from app.models.simulation import Scenario
from app.models.waveform import PrototypeKind

# 各方案的默认系数 A
DEFAULT_COEFFICIENT_A: Dict[SchemeKind, float] = {
    SchemeKind.SC_QPSK: 68.0,
    SchemeKind.OFDM_QAM: 64.0,
    SchemeKind.FBMC_OQAM: 60.0,
}


# 派生模型字段名 -> 配置键
_DERIVED_KEYS: Dict[str, str] = {
    "prototype_kind": "prototype",
    "dgd_norm": "dgd_norm_list",
}


def _split_list(value):
    if isinstance(value, str):
        return [item.strip() for item in value.split(",") if item.strip()]
    return value


def _offending_key(error) -> Optional[str]:
    """从派生模型的校验错误中找出对应的配置键."""
    field = getattr(error.get("ctx", {}).get("error"), "field", None)
    if field is None:
        names = [part for part in error["loc"] if isinstance(part, str) and part != "scheme_config"]
        field = names[-1] if names else None
    return _DERIVED_KEYS.get(field, field)


class RunConfig(BaseModel):
    """一次运行的全部参数，默认值对应 N=128、ν₀=100 MHz、γ=0.5 的参考系统."""
    # 方案与收发机
    scheme: List[SchemeKind] = Field(
        default_factory=lambda: [SchemeKind.SC_QPSK, SchemeKind.OFDM_QAM, SchemeKind.FBMC_OQAM],
        description="参与比较的方案（逗号分隔）",
    )
    n_subcarriers: int = Field(default=128, ge=1, description="子载波数 N")
    subcarrier_spacing: float = Field(default=1e8, gt=0, description="子载波间隔 ν₀ (Hz)")
    qam_order: int = Field(default=4, description="QAM 阶数 M")
    cp_samples: int = Field(default=0, ge=0, description="OFDM 循环前缀采样数")
    prototype: PrototypeKind = Field(default=PrototypeKind.SRRC, description="原型滤波器类型")
    rolloff: float = Field(default=1.0, gt=0, le=1, description="SRRC 滚降系数")
    span_symbols: int = Field(default=4, ge=1, description="原型长度（符号数），L = 4N 对应 4")
    oversampling: int = Field(default=2, ge=1, description="过采样倍数")
    sc_band_offset_hz: Optional[float] = Field(default=None, description="SC 频带中心偏移 (Hz)")

    # 信道与仿真
    gamma: float = Field(default=0.5, ge=0, le=1, description="PSP 功率分配比 γ")
    equalization: Equalization = Field(default=Equalization.NONE, description="均衡方式")
    seed: int = Field(default=1, ge=0, description="主随机种子")
    min_errors: int = Field(default=100, ge=1, description="每点最少误比特数")
    max_bits: int = Field(default=20_000_000, ge=1, description="每点最大比特数")
    frame_slots: int = Field(default=16, ge=1, description="每帧时隙数 K")

    # 扫描网格
    ebn0_start: float = Field(default=0.0, description="Eb/N0 起点 (dB)")
    ebn0_stop: float = Field(default=12.0, description="Eb/N0 终点 (dB)")
    ebn0_step: float = Field(default=0.5, gt=0, description="Eb/N0 步长 (dB)")
    dgd_norm_list: List[float] = Field(
        default_factory=lambda: [0.0, 0.2, 0.4, 0.8, 1.0],
        description="归一化 DGD 列表 Δτ/T_b",
    )
    target_ber: float = Field(default=1e-3, gt=0, lt=1, description="功率代价的目标 BER")

    # 解析模型与正交性检查
    coefficient_a: Optional[float] = Field(default=None, gt=0, description="系数 A，None 时按方案取 68/64/60")
    time_normalization: TimeNormalization = Field(default=TimeNormalization.BIT_INTERVAL, description="T 的归一化方式")
    neighborhood: int = Field(default=8, ge=1, description="正交性检查的邻域范围")

    output: Optional[str] = Field(default=None, description="CSV 输出路径")

    model_config = {
        "extra": "forbid",
    }

    @field_validator("scheme", "dgd_norm_list", mode="before")
    @classmethod
    def split_comma_list(cls, v):
        return _split_list(v)

    @field_validator("scheme")
    @classmethod
    def validate_scheme(cls, v: List[SchemeKind]) -> List[SchemeKind]:
        if not v:
            raise ValueError("至少需要一个方案")
        if len(set(v)) != len(v):
            raise ValueError("方案不能重复")
        return v

    @field_validator("qam_order")
    @classmethod
    def validate_qam_order(cls, v: int, info: ValidationInfo) -> int:
        if v not in (4, 16):
            raise ValueError("qam_order 仅支持 4 或 16")
        if v != 4 and SchemeKind.SC_QPSK in info.data.get("scheme", []):
            raise ValueError("sc_qpsk 只支持 qam_order = 4")
        return v

    @field_validator("cp_samples")
    @classmethod
    def validate_cp_samples(cls, v: int, info: ValidationInfo) -> int:
        if v and any(kind is not SchemeKind.OFDM_QAM for kind in info.data.get("scheme", [])):
            raise ValueError("循环前缀只适用于 ofdm_qam（FBMC/OQAM 与 SC-QPSK 无 CP）")
        return v

    @field_validator("ebn0_stop")
    @classmethod
    def validate_ebn0_stop(cls, v: float, info: ValidationInfo) -> float:
        start = info.data.get("ebn0_start")
        if start is not None and v < start:
            raise ValueError(f"ebn0_stop ({v}) 不能小于 ebn0_start ({start})")
        return v

    @field_validator("dgd_norm_list")
    @classmethod
    def validate_dgd_norm_list(cls, v: List[float]) -> List[float]:
        if not v:
            raise ValueError("dgd_norm_list 不能为空")
        if any(x < 0 for x in v):
            raise ValueError("归一化 DGD 不能为负")
        return v

    @model_validator(mode="after")
    def check_derived_models(self):
        for kind in self.scheme:
            try:
                self.scenario(kind)
            except ValidationError as exc:
                errors = exc.errors()
                detail = "; ".join(error["msg"] for error in errors)
                raise ConstraintError(_offending_key(errors[0]), f"{kind.value} 配置无效: {detail}") from None
        return self

    def ebn0_grid(self) -> List[float]:
        """闭区间 [ebn0_start, ebn0_stop] 上的等步长网格."""
        n_steps = int(np.floor((self.ebn0_stop - self.ebn0_start) / self.ebn0_step + 1e-9))
        return [round(self.ebn0_start + i * self.ebn0_step, 10) for i in range(n_steps + 1)]

    def scheme_config(self, kind: SchemeKind) -> SchemeConfig:
        return SchemeConfig(
            scheme=kind,
            n_subcarriers=self.n_subcarriers,
            subcarrier_spacing=self.subcarrier_spacing,
            qam_order=4 if kind is SchemeKind.SC_QPSK else self.qam_order,
            cp_samples=self.cp_samples if kind is SchemeKind.OFDM_QAM else 0,
            prototype_kind=self.prototype,
            rolloff=self.rolloff,
            span_symbols=self.span_symbols,
            oversampling=self.oversampling,
            sc_band_offset_hz=self.sc_band_offset_hz,
        )

    def scenario(self, kind: SchemeKind, dgd_norm: float = 0.0) -> Scenario:
        return Scenario(
            scheme_config=self.scheme_config(kind),
            dgd_norm=dgd_norm,
            gamma=self.gamma,
            equalization=self.equalization,
            seed=self.seed,
            min_errors=self.min_errors,
            max_bits=self.max_bits,
            frame_slots=self.frame_slots,
        )

    def penalty_model(self, kind: SchemeKind) -> PenaltyModel:
        cfg = self.scheme_config(kind)
        return PenaltyModel(
            coefficient_a=self.coefficient_a if self.coefficient_a is not None else DEFAULT_COEFFICIENT_A[kind],
            bit_interval=cfg.bit_interval,
            symbol_duration=cfg.symbol_duration,
            n_subcarriers=cfg.n_subcarriers,
            gamma=self.gamma,
            time_normalization=self.time_normalization,
        )
