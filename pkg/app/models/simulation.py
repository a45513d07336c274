"""蒙特卡洛仿真与运行命令相关的 Pydantic 数据模型."""
from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

from app.core.errors import ConstraintError
from app.models.pmd import PmdState
from app.models.scheme import Equalization, SchemeConfig, SchemeKind


class Scenario(BaseModel):
    """一次 BER 仿真的完整场景."""
    scheme_config: SchemeConfig = Field(..., description="收发机配置")
    dgd_norm: float = Field(default=0.0, ge=0, description="归一化 DGD Δτ/T_b")
    gamma: float = Field(default=0.5, ge=0, le=1, description="PSP 功率分配比 γ")
    equalization: Equalization = Field(default=Equalization.NONE, description="均衡方式")
    seed: int = Field(default=1, ge=0, description="主随机种子")
    min_errors: int = Field(default=100, ge=1, description="停止所需的最少误比特数")
    max_bits: int = Field(default=20_000_000, ge=1, description="每个 Eb/N0 点的最大仿真比特数")
    frame_slots: int = Field(default=16, ge=1, description="每帧 QAM 符号时隙数 K")

    model_config = {
        "frozen": True,
    }

    @model_validator(mode="after")
    def check_frame(self):
        cfg = self.scheme_config
        if cfg.scheme is SchemeKind.FBMC_OQAM and self.frame_slots < cfg.span_symbols:
            raise ConstraintError(
                "frame_slots",
                f"FBMC/OQAM 帧时隙数 ({self.frame_slots}) 不能小于原型长度 ({cfg.span_symbols})，否则没有可计数的半符号",
            )
        if self.max_bits < self.frame_bits:
            raise ConstraintError("max_bits", f"max_bits ({self.max_bits}) 小于一帧比特数 ({self.frame_bits})")
        return self

    @property
    def frame_bits(self) -> int:
        """每帧发送的比特数（三种方案一致：N·K·log2M）."""
        cfg = self.scheme_config
        return cfg.n_subcarriers * self.frame_slots * cfg.bits_per_symbol

    @property
    def bit_interval(self) -> float:
        return self.scheme_config.bit_interval

    @property
    def dgd(self) -> float:
        return self.dgd_norm * self.bit_interval

    def pmd_state(self) -> PmdState:
        return PmdState(dgd=self.dgd, gamma=self.gamma)

    def with_pmd(self, dgd_norm: Optional[float] = None, gamma: Optional[float] = None) -> "Scenario":
        update = {}
        if dgd_norm is not None:
            update["dgd_norm"] = dgd_norm
        if gamma is not None:
            update["gamma"] = gamma
        return self.model_copy(update=update)


class BerPoint(BaseModel):
    """单个 Eb/N0 点的误码率测量."""
    ebn0_db: float = Field(..., description="Eb/N0 (dB)")
    bits_simulated: int = Field(..., ge=0, description="计数比特数")
    bit_errors: int = Field(..., ge=0, description="误比特数")
    ber: float = Field(..., ge=0, le=1, description="误码率")
    ber_ci95: float = Field(..., ge=0, description="95% 置信区间半宽（删失点为三倍法则上界）")
    censored: bool = Field(default=False, description="达到 max_bits 仍无误码")


class BerCurve(BaseModel):
    """BER 随 Eb/N0 变化曲线."""
    points: List[BerPoint] = Field(default_factory=list, description="按 Eb/N0 严格递增排列的测量点")

    @field_validator("points")
    @classmethod
    def check_ascending(cls, v: List[BerPoint]) -> List[BerPoint]:
        for prev, cur in zip(v, v[1:]):
            if cur.ebn0_db <= prev.ebn0_db:
                raise ValueError("BER 曲线的 Eb/N0 必须严格递增")
        return v

    @property
    def ebn0_db(self) -> List[float]:
        return [p.ebn0_db for p in self.points]

    @property
    def ber(self) -> List[float]:
        return [p.ber for p in self.points]


class PenaltyRecord(BaseModel):
    """单个 DGD 值的功率代价."""
    dgd_norm: float = Field(..., ge=0, description="归一化 DGD Δτ/T_b")
    required_ebn0_db: float = Field(..., description="达到目标 BER 所需 Eb/N0 (dB)")
    penalty_db: float = Field(..., description="相对无 PMD 基线的功率代价 (dB)")
    penalty_sigma_db: float = Field(default=0.0, ge=0, description="代价的一倍标准差 (dB)，由目标附近的二项误差换算")


class PenaltyCurve(BaseModel):
    """功率代价随归一化 DGD 变化曲线."""
    records: List[PenaltyRecord] = Field(default_factory=list, description="各 DGD 的代价记录")
    bit_interval: float = Field(..., gt=0, description="比特间隔 T_b (s)，用于换算 Δτ")
    gamma: float = Field(default=0.5, ge=0, le=1, description="测量时的 γ")

    @property
    def dgd_norm(self) -> List[float]:
        return [r.dgd_norm for r in self.records]

    @property
    def penalty_db(self) -> List[float]:
        return [r.penalty_db for r in self.records]


class RunCommand(str, Enum):
    """命令行 / HTTP 支持的运行命令."""
    BER_SWEEP = "ber-sweep"
    PENALTY = "penalty"
    ANALYTIC = "analytic"
    ORTHO_CHECK = "ortho-check"
    FIT_A = "fit-a"


class CommandResult(BaseModel):
    """命令执行结果."""
    command: RunCommand = Field(..., description="执行的命令")
    exit_status: int = Field(default=0, description="退出码")
    rows: int = Field(..., ge=0, description="CSV 数据行数")
    csv_text: str = Field(..., description="CSV 内容")
    output: Optional[str] = Field(default=None, description="写入的文件路径")


class SimulationRunRequest(BaseModel):
    """HTTP 仿真运行请求."""
    command: RunCommand = Field(..., description="运行命令")
    config_text: str = Field(default="", description="key = value 格式的配置文本")
    seed: Optional[int] = Field(default=None, description="覆盖配置中的主随机种子")


class SimulationRunResponse(BaseModel):
    """HTTP 仿真运行响应."""
    success: bool = Field(..., description="是否成功")
    command: RunCommand = Field(..., description="运行命令")
    rows: int = Field(..., description="CSV 数据行数")
    csv: str = Field(..., description="CSV 内容")
    timestamp: str = Field(..., description="时间戳")
