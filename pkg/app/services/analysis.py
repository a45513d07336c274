"""RMS 脉宽展宽与 PMD 功率代价解析公式、系数 A 拟合."""
import logging
from typing import Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from app.core.errors import DegenerateFitError, InvalidArgumentError
from app.models.analysis import PenaltyModel, WidthPair
from app.models.simulation import PenaltyCurve

logger = logging.getLogger(__name__)


# ==================== 脉宽 ====================

def rms_width(intensity, sample_period: float) -> float:
    """
    把归一化强度当作时间密度计算 RMS 宽度 √(⟨t²⟩ − ⟨t⟩²).

    每个采样视为宽 sample_period 的常数单元（矩形法），
    单元内方差 sample_period²/12 计入结果。

    Raises:
        InvalidArgumentError: 全零或含负值
    """
    intensity = np.asarray(intensity, dtype=float)
    if sample_period <= 0:
        raise InvalidArgumentError(f"sample_period 必须 > 0，当前为 {sample_period}")
    if np.any(intensity < 0):
        raise InvalidArgumentError("强度波形不能含负值")
    total = np.sum(intensity)
    if not total > 0:
        raise InvalidArgumentError("强度波形全为零，RMS 宽度无定义")

    t = np.arange(intensity.size) * sample_period
    weights = intensity / total
    mean = np.sum(weights * t)
    variance = np.sum(weights * (t - mean) ** 2) + sample_period ** 2 / 12.0
    return float(np.sqrt(variance))


def broadened_width(delta1: float, dgd: float, gamma: float) -> float:
    """δ₂ = √(δ₁² + Δτ²·γ(1−γ))."""
    if delta1 < 0:
        raise InvalidArgumentError(f"delta1 不能为负，当前为 {delta1}")
    if not 0 <= gamma <= 1:
        raise InvalidArgumentError(f"gamma 必须在 [0, 1] 内，当前为 {gamma}")
    return float(np.sqrt(delta1 ** 2 + dgd ** 2 * gamma * (1.0 - gamma)))


def penalty_exact(widths: WidthPair) -> float:
    """
    由脉宽比给出的功率代价 10·log10(δ₂/δ₁).

    Raises:
        InvalidArgumentError: δ₁ = 0
    """
    if widths.delta1 == 0:
        raise InvalidArgumentError("δ₁ 为 0 时功率代价无定义")
    return float(10.0 * np.log10(widths.delta2 / widths.delta1))


# ==================== 解析功率代价 ====================

def penalty_sc(model: PenaltyModel, dgd: float) -> float:
    """单载波 ε = A·Δτ²·γ(1−γ)/T_b²."""
    gamma = model.gamma
    return float(model.coefficient_a * dgd ** 2 * gamma * (1.0 - gamma) / model.bit_interval ** 2)


def penalty_subcarrier(model: PenaltyModel, n: int, dgd: float) -> float:
    """
    第 n 个子载波 εₙ = A·γ(1−γ)·n²·Δτ²/T².

    Raises:
        InvalidArgumentError: n 不在 1..N
    """
    if not 1 <= n <= model.n_subcarriers:
        raise InvalidArgumentError(f"子载波序号 n 必须在 1..{model.n_subcarriers} 内，当前为 {n}")
    return float(_subcarrier_penalties(model, dgd)[n - 1])


def _subcarrier_penalties(model: PenaltyModel, dgd: float) -> np.ndarray:
    n = np.arange(1, model.n_subcarriers + 1)
    gamma = model.gamma
    return model.coefficient_a * gamma * (1.0 - gamma) * n ** 2 * dgd ** 2 / model.subcarrier_period ** 2


def penalty_multicarrier(subcarrier_penalties: Sequence[float]) -> float:
    """
    多载波总代价 ε = 10·log10((1/N)·Σ 10^{εₙ/10}).

    Raises:
        InvalidArgumentError: 输入为空
    """
    values = np.asarray(subcarrier_penalties, dtype=float)
    if values.size == 0:
        raise InvalidArgumentError("子载波代价序列不能为空")
    return float(10.0 * np.log10(np.mean(10.0 ** (values / 10.0))))


def penalty_multicarrier_model(model: PenaltyModel, dgd: float) -> float:
    """n = 1..N 的子载波代价按功率平均聚合."""
    return penalty_multicarrier(_subcarrier_penalties(model, dgd))


def dgd_for_penalty_sc(model: PenaltyModel, penalty_db: float) -> float:
    """单载波公式的反函数：给定代价求 Δτ."""
    if penalty_db < 0:
        raise InvalidArgumentError(f"penalty_db 不能为负，当前为 {penalty_db}")
    gamma = model.gamma
    return float(model.bit_interval * np.sqrt(penalty_db / (model.coefficient_a * gamma * (1.0 - gamma))))


# ==================== 系数拟合 ====================

def _curve_arrays(measured: PenaltyCurve):
    dgd = np.asarray(measured.dgd_norm, dtype=float) * measured.bit_interval
    penalty = np.asarray(measured.penalty_db, dtype=float)
    return dgd, penalty


def fit_coefficient_a(measured: PenaltyCurve, gamma: float, time_base: float) -> float:
    """
    过原点最小二乘拟合 ε ≈ A·x，x = Δτ²·γ(1−γ)/time_base².

    Args:
        measured: 测得的功率代价曲线
        gamma: PSP 功率分配比
        time_base: 归一化时间（单载波取 T_b）

    Returns:
        float: 拟合的 A

    Raises:
        DegenerateFitError: 没有 Δτ > 0 的点
    """
    if time_base <= 0:
        raise InvalidArgumentError(f"time_base 必须 > 0，当前为 {time_base}")
    dgd, penalty = _curve_arrays(measured)
    x = dgd ** 2 * gamma * (1.0 - gamma) / time_base ** 2
    denominator = float(np.sum(x ** 2))
    if denominator == 0:
        raise DegenerateFitError("拟合需要至少一个 Δτ > 0 且 0 < γ < 1 的测量点")
    coefficient = float(np.sum(x * penalty) / denominator)
    logger.info(f"单载波系数拟合完成: A={coefficient:.4f}, 点数={int(np.count_nonzero(x))}")
    return coefficient


def fit_coefficient_a_multicarrier(measured: PenaltyCurve, template: PenaltyModel) -> float:
    """
    对多载波聚合模型做一维最小二乘拟合 A.

    Args:
        measured: 测得的功率代价曲线
        template: 提供 T_b、T、N、γ 与归一化方式的模型（其 coefficient_a 被忽略）

    Returns:
        float: 拟合的 A

    Raises:
        DegenerateFitError: 没有 Δτ > 0 的点
    """
    dgd, penalty = _curve_arrays(measured)
    if not np.any(dgd > 0):
        raise DegenerateFitError("拟合需要至少一个 Δτ > 0 的测量点")

    # 小代价线性化给出上界量级
    unit = template.model_copy(update={"coefficient_a": 1.0})
    linear = np.array([np.mean(_subcarrier_penalties(unit, d)) for d in dgd])
    initial = float(np.sum(linear * penalty) / np.sum(linear ** 2))
    upper = max(4.0 * abs(initial), 1.0)

    def residual(a: float) -> float:
        model = template.model_copy(update={"coefficient_a": max(a, 1e-12)})
        predicted = np.array([penalty_multicarrier_model(model, d) for d in dgd])
        return float(np.sum((predicted - penalty) ** 2))

    result = minimize_scalar(residual, bounds=(1e-12, upper), method="bounded", options={"xatol": 1e-10})
    coefficient = float(result.x)
    logger.info(f"多载波系数拟合完成: A={coefficient:.4f}, 残差平方和={result.fun:.3e}")
    return coefficient


def coefficient_fit_residual_rms(measured: PenaltyCurve, predicted_db: Sequence[float]) -> float:
    """测量代价与模型预测之间的均方根残差 (dB)."""
    penalty = np.asarray(measured.penalty_db, dtype=float)
    predicted = np.asarray(predicted_db, dtype=float)
    if penalty.size != predicted.size:
        raise InvalidArgumentError("预测值个数与测量点个数不一致")
    if penalty.size == 0:
        raise InvalidArgumentError("测量曲线为空")
    return float(np.sqrt(np.mean((penalty - predicted) ** 2)))
