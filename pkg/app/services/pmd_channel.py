"""一阶 PMD 光纤信道：Jones 矩阵、双路径时延、AWGN 注入与平方律检测."""
import logging
from typing import Optional, Union

import numpy as np

from app.core.errors import InvalidArgumentError
from app.models.pmd import JonesMatrix, PmdState
from app.models.signal import PolarizedSignal, SampledSignal

logger = logging.getLogger(__name__)

SeedLike = Union[int, np.random.SeedSequence, np.random.Generator, None]


# ==================== Jones 矩阵 ====================

def jones_rotation(azimuth: float, ellipticity: float) -> JonesMatrix:
    """
    快轴 PSP 旋转矩阵 R = [[r₁, −r₂*], [r₂, r₁*]].

    Args:
        azimuth: 方位角 θ (rad)
        ellipticity: 椭圆率角 φ (rad)

    Returns:
        JonesMatrix: 2×2 酉矩阵
    """
    r1 = np.cos(azimuth) * np.cos(ellipticity) - 1j * np.sin(azimuth) * np.sin(ellipticity)
    r2 = np.sin(azimuth) * np.cos(ellipticity) + 1j * np.cos(azimuth) * np.sin(ellipticity)
    return np.array([[r1, -np.conj(r2)], [r2, np.conj(r1)]])


def pmd_delay_matrix(omega, dgd: float) -> JonesMatrix:
    """
    一阶 PMD 时延矩阵 U(ω) = diag(e^{jωΔτ/2}, e^{−jωΔτ/2}).

    omega 为数组时返回形状 (..., 2, 2)。

    Raises:
        InvalidArgumentError: dgd < 0
    """
    if dgd < 0:
        raise InvalidArgumentError(f"DGD 不能为负，当前为 {dgd}")
    phase = np.exp(0.5j * np.asarray(omega, dtype=float) * dgd)
    U = np.zeros(phase.shape + (2, 2), dtype=complex)
    U[..., 0, 0] = phase
    U[..., 1, 1] = np.conj(phase)
    return U


def fiber_jones(omega, state: PmdState) -> JonesMatrix:
    """光纤 Jones 矩阵 F(ω) = R·U(ω)·R⁻¹（R 酉，R⁻¹ = R†）."""
    R = jones_rotation(state.azimuth, state.ellipticity)
    U = pmd_delay_matrix(omega, state.dgd)
    return np.einsum("ij,...jk,kl->...il", R, U, R.conj().T)


# ==================== 场信号路径 ====================

def _delay_padding(dgd: float, sample_rate: float) -> int:
    # 容差避免整数采样时延被浮点误差向上取整
    return int(np.ceil(dgd * sample_rate - 1e-9)) if dgd > 0 else 0


def apply_pmd_field(signal: SampledSignal, state: PmdState) -> PolarizedSignal:
    """
    双路径场传输：分量 1 = √γ·E(t+Δτ/2)，分量 2 = √(1−γ)·E(t−Δτ/2).

    两端各补 ⌈Δτ·f_s⌉ 个零后在频域乘线性相位实现分数时延，
    频率取 f + center_frequency（物理频率偏移）。输出为补零后的长度，
    epoch_offset 相应后移，总能量守恒。

    Args:
        signal: 输入复基带信号
        state: PMD 状态

    Returns:
        PolarizedSignal: 两个 PSP 轴上的分量
    """
    pad = _delay_padding(state.dgd, signal.sample_rate)
    padded = np.pad(signal.samples, (pad, pad))
    spectrum = np.fft.fft(padded)
    freqs = np.fft.fftfreq(padded.size, d=1.0 / signal.sample_rate) + signal.center_frequency
    half_delay_phase = np.exp(1j * np.pi * freqs * state.dgd)

    phi1, phi2 = state.carrier_phase
    advanced = state.c1 * np.fft.ifft(spectrum * half_delay_phase) * np.exp(1j * phi1)
    delayed = state.c2 * np.fft.ifft(spectrum * np.conj(half_delay_phase)) * np.exp(1j * phi2)

    payload_length = signal.payload_length
    if payload_length is None:
        payload_length = len(signal) - signal.epoch_offset
    common = dict(
        sample_rate=signal.sample_rate,
        epoch_offset=signal.epoch_offset + pad,
        center_frequency=signal.center_frequency,
        payload_length=payload_length,
    )
    return PolarizedSignal(
        component1=SampledSignal(samples=advanced, **common),
        component2=SampledSignal(samples=delayed, **common),
    )


def project_to_launch(field: PolarizedSignal, state: PmdState) -> SampledSignal:
    """相干接收：投影回发射偏振态 √γ·分量1 + √(1−γ)·分量2."""
    combined = state.c1 * field.component1.samples + state.c2 * field.component2.samples
    return field.component1.with_samples(combined)


def effective_transfer(frequencies, state: PmdState) -> np.ndarray:
    """
    project_to_launch 之后的标量信道 H(f) = γ·e^{jπfΔτ}·e^{jφ₁} + (1−γ)·e^{−jπfΔτ}·e^{jφ₂}.

    Args:
        frequencies: 物理频率偏移 (Hz)
        state: PMD 状态

    Returns:
        np.ndarray: 各频率的复增益（γ = 0.5 且载波相位为 0 时为实数）
    """
    f = np.asarray(frequencies, dtype=float)
    phi1, phi2 = state.carrier_phase
    phase = np.exp(1j * np.pi * f * state.dgd)
    return state.gamma * phase * np.exp(1j * phi1) + (1.0 - state.gamma) * np.conj(phase) * np.exp(1j * phi2)


# ==================== 强度路径 ====================

def apply_pmd_intensity(intensity, dgd: float, gamma: float, sample_rate: float) -> np.ndarray:
    """
    非相干双路径强度叠加 i_out(t) = γ·i(t+Δτ/2) + (1−γ)·i(t−Δτ/2).

    与 apply_pmd_field 使用相同的补零长度，输出长度为 len + 2·⌈Δτ·f_s⌉。
    分数时延采用采样间线性插值：整数采样时延精确，输出保持非负，
    且 Σ i_out = Σ i（补零保证移位后不越界）。

    Raises:
        InvalidArgumentError: 输入含负值或参数越界
    """
    intensity = np.asarray(intensity, dtype=float)
    if np.any(intensity < 0):
        raise InvalidArgumentError("强度波形不能含负值")
    if dgd < 0:
        raise InvalidArgumentError(f"DGD 不能为负，当前为 {dgd}")
    if not 0 <= gamma <= 1:
        raise InvalidArgumentError(f"gamma 必须在 [0, 1] 内，当前为 {gamma}")
    if not sample_rate > 0:
        raise InvalidArgumentError(f"sample_rate 必须 > 0，当前为 {sample_rate}")

    pad = _delay_padding(dgd, sample_rate)
    padded = np.pad(intensity, (pad, pad))
    shift = 0.5 * dgd * sample_rate
    index = np.arange(padded.size, dtype=float)
    advanced = np.interp(index + shift, index, padded, left=0.0, right=0.0)
    delayed = np.interp(index - shift, index, padded, left=0.0, right=0.0)
    return gamma * advanced + (1.0 - gamma) * delayed


def direct_detect(field: PolarizedSignal, responsivity: float = 1.0) -> np.ndarray:
    """
    平方律光电检测 i = ρ·(|分量1|² + |分量2|²)，正交 PSP 间无交叉项.

    Raises:
        InvalidArgumentError: responsivity <= 0
    """
    if not responsivity > 0:
        raise InvalidArgumentError(f"responsivity 必须 > 0，当前为 {responsivity}")
    return responsivity * (np.abs(field.component1.samples) ** 2 + np.abs(field.component2.samples) ** 2)


# ==================== 噪声 ====================

def add_awgn(
    signal: SampledSignal,
    ebn0_db: float,
    bits_per_symbol: float,
    samples_per_symbol: float,
    seed: SeedLike,
    reference_power: Optional[float] = None,
) -> SampledSignal:
    """
    加入循环对称复高斯白噪声.

    每采样噪声方差 σ² = P·sps / (bps·10^{Eb/N0/10})，P 默认取信号实测平均功率；
    ebn0_db = +inf 表示不加噪声。

    Args:
        signal: 输入信号
        ebn0_db: Eb/N0 (dB)
        bits_per_symbol: 每符号比特数
        samples_per_symbol: 每符号采样数（可为小数）
        seed: 随机种子（整数、SeedSequence 或 Generator）
        reference_power: 可选，参考信号功率（如发射端功率）

    Returns:
        SampledSignal: 加噪后的信号

    Raises:
        InvalidArgumentError: 参考功率为 0 或参数越界
    """
    if np.isposinf(ebn0_db):
        return signal
    if np.isnan(ebn0_db):
        raise InvalidArgumentError("ebn0_db 不能为 NaN")
    if bits_per_symbol <= 0 or samples_per_symbol <= 0:
        raise InvalidArgumentError("bits_per_symbol 与 samples_per_symbol 必须 > 0")
    power = signal.mean_power if reference_power is None else float(reference_power)
    if not power > 0:
        raise InvalidArgumentError("信号功率为 0，无法按 Eb/N0 确定噪声功率")

    variance = power * samples_per_symbol / (bits_per_symbol * 10.0 ** (ebn0_db / 10.0))
    rng = np.random.default_rng(seed)
    # 按 (n, 2) 抽样，实部与虚部交错
    draws = rng.standard_normal((len(signal), 2))
    noise = np.sqrt(variance / 2.0) * (draws[:, 0] + 1j * draws[:, 1])
    return signal.with_samples(signal.samples + noise)
