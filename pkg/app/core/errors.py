"""仿真异常定义."""
from typing import Optional


class SimulationError(Exception):
    """所有仿真相关异常的基类."""


class InvalidArgumentError(SimulationError, ValueError):
    """参数不满足前置条件."""


class FramingError(SimulationError):
    """信号长度与帧结构不一致."""


class DegenerateFitError(SimulationError):
    """拟合数据退化（例如全部 DGD 为 0）."""


class UnbracketedTargetError(SimulationError):
    """目标误码率不在 BER 曲线范围内，需要扩展 Eb/N0 扫描网格."""

    def __init__(self, target_ber: float, ber_min: Optional[float], ber_max: Optional[float]):
        self.target_ber = target_ber
        self.ber_min = ber_min
        self.ber_max = ber_max
        super().__init__(
            f"目标 BER {target_ber:g} 未被曲线包围（曲线非零 BER 范围: {ber_min} ~ {ber_max}），"
            f"请扩展 Eb/N0 网格（ebn0_start/ebn0_stop）"
        )


class ConfigError(SimulationError):
    """配置文档解析或校验失败."""

    def __init__(self, message: str, key: Optional[str] = None, line: Optional[int] = None):
        self.key = key
        self.line = line
        location = []
        if line is not None:
            location.append(f"第 {line} 行")
        if key is not None:
            location.append(f"键 '{key}'")
        prefix = "，".join(location)
        super().__init__(f"{prefix}: {message}" if prefix else message)


class ConstraintError(InvalidArgumentError):
    """跨字段约束不满足，field 指向需要修改的字段."""

    def __init__(self, field: Optional[str], message: str):
        self.field = field
        super().__init__(message)
