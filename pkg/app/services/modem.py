"""SC-QPSK、OFDM/QAM 与 FBMC/OQAM 收发机.

三种方案共用采样率 f_s = N·ν₀·oversampling：
多载波一个符号周期 T = 1/ν₀ 对应 L = N·oversampling 个采样，
SC-QPSK 的符号率为 N·ν₀，每符号 oversampling 个采样。
"""
import logging
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy.signal import fftconvolve, upfirdn

from app.core.errors import FramingError, InvalidArgumentError
from app.models.scheme import Equalization, SchemeConfig, SchemeKind
from app.models.signal import SampledSignal, SymbolGrid
from app.models.waveform import Prototype, PrototypeKind
from app.services.qam import qam_demap, qam_map
from app.services.waveforms import rect_prototype, srrc_prototype

logger = logging.getLogger(__name__)

_J_POWERS = np.array([1.0, 1.0j, -1.0, -1.0j])


# ==================== 方案参数 ====================

@lru_cache(maxsize=32)
def scheme_prototype(cfg: SchemeConfig) -> Prototype:
    """
    按方案构造成形原型.

    SC 以 oversampling 为每符号采样数；OFDM 固定为一个周期 T 的矩形；
    FBMC 以 L = N·oversampling 为每符号采样数。
    """
    if cfg.scheme is SchemeKind.OFDM_QAM:
        return rect_prototype(cfg.samples_per_slot)
    sps = cfg.oversampling if cfg.scheme is SchemeKind.SC_QPSK else cfg.samples_per_slot
    if cfg.prototype_kind is PrototypeKind.RECTANGULAR:
        return rect_prototype(sps)
    return srrc_prototype(cfg.rolloff, cfg.span_symbols, sps)


def center_frequency(cfg: SchemeConfig) -> float:
    """
    基带直流对应的物理频率偏移.

    多载波：DFT 第 b 个频点对应第 n = b+1 个子载波，偏移为 ν₀。
    SC：占用频带下沿对齐光载波，中心位于 (1+β)·N·ν₀/2（矩形脉冲按 β = 1）。
    """
    if cfg.scheme.is_multicarrier:
        return cfg.subcarrier_spacing
    if cfg.sc_band_offset_hz is not None:
        return cfg.sc_band_offset_hz
    beta = cfg.rolloff if cfg.prototype_kind is PrototypeKind.SRRC else 1.0
    return (1.0 + beta) * cfg.n_subcarriers * cfg.subcarrier_spacing / 2.0


def subcarrier_frequencies(cfg: SchemeConfig) -> np.ndarray:
    """各子载波的物理频率偏移 nν₀ (n = 1..N)."""
    return np.arange(cfg.n_subcarriers) * cfg.subcarrier_spacing + center_frequency(cfg)


def bits_per_frame(cfg: SchemeConfig, frame_slots: int) -> int:
    return cfg.n_subcarriers * frame_slots * cfg.bits_per_symbol


def _check_scheme(cfg: SchemeConfig, expected: SchemeKind) -> None:
    if cfg.scheme is not expected:
        raise InvalidArgumentError(f"配置方案为 {cfg.scheme.value}，此操作需要 {expected.value}")


def _apply_gains(values: np.ndarray, channel_gains, equalization: Equalization):
    """单抽头迫零；增益为 0 的子载波记为擦除并置 0."""
    n_subcarriers = values.shape[0]
    erased = np.zeros(n_subcarriers, dtype=bool)
    if channel_gains is None or equalization is Equalization.NONE:
        return values, erased
    gains = np.asarray(channel_gains, dtype=complex).ravel()
    if gains.size != n_subcarriers:
        raise InvalidArgumentError(f"信道增益长度 {gains.size} 与子载波数 {n_subcarriers} 不一致")
    erased = gains == 0
    out = np.zeros_like(values)
    out[~erased] = values[~erased] / gains[~erased, None]
    if np.any(erased):
        logger.debug(f"迫零均衡擦除子载波: {np.flatnonzero(erased).tolist()}")
    return out, erased


# ==================== OFDM/QAM ====================

def ofdm_modulate(grid: SymbolGrid, cfg: SchemeConfig) -> SampledSignal:
    """
    OFDM 调制：每个时隙做 L 点 IDFT（子载波占用频点 0..N−1），加循环前缀后串接.

    x = √L·IDFT(X)，使输出能量等于符号网格能量。

    Raises:
        InvalidArgumentError: 交错网格或子载波数不匹配
    """
    _check_scheme(cfg, SchemeKind.OFDM_QAM)
    if grid.staggered:
        raise InvalidArgumentError("OFDM 调制不接受 OQAM 交错网格")
    if grid.n_subcarriers != cfg.n_subcarriers:
        raise InvalidArgumentError(f"网格子载波数 {grid.n_subcarriers} 与配置 {cfg.n_subcarriers} 不一致")

    L = cfg.samples_per_slot
    spectrum = np.zeros((L, grid.n_slots), dtype=complex)
    spectrum[:cfg.n_subcarriers] = grid.values
    slots = np.sqrt(L) * np.fft.ifft(spectrum, axis=0)
    if cfg.cp_samples:
        slots = np.vstack([slots[L - cfg.cp_samples:], slots])
    samples = slots.ravel(order="F")
    return SampledSignal(
        samples=samples,
        sample_rate=cfg.sample_rate,
        center_frequency=center_frequency(cfg),
        payload_length=samples.size,
    )


def ofdm_demodulate(
    signal: SampledSignal,
    cfg: SchemeConfig,
    channel_gains: Optional[np.ndarray] = None,
    equalization: Equalization = Equalization.NONE,
) -> SymbolGrid:
    """
    OFDM 解调：去循环前缀，逐时隙 DFT，可选单抽头迫零.

    Raises:
        FramingError: 有效帧长度不是整数个时隙
    """
    _check_scheme(cfg, SchemeKind.OFDM_QAM)
    L = cfg.samples_per_slot
    slot_len = L + cfg.cp_samples
    payload = signal.payload
    if payload.size == 0 or payload.size % slot_len:
        raise FramingError(f"信号长度 {payload.size} 不是时隙长度 {slot_len} 的整数倍")

    slots = payload.reshape(-1, slot_len).T[cfg.cp_samples:]
    values = np.fft.fft(slots, axis=0)[:cfg.n_subcarriers] / np.sqrt(L)
    values, erased = _apply_gains(values, channel_gains, equalization)
    return SymbolGrid(values=values, erased=erased)


# ==================== FBMC/OQAM ====================

def oqam_stagger(qam_grid: SymbolGrid) -> SymbolGrid:
    """实部、虚部依次放到相邻的半周期时隙，列数加倍."""
    if qam_grid.staggered:
        raise InvalidArgumentError("网格已经是交错网格")
    values = np.empty((qam_grid.n_subcarriers, 2 * qam_grid.n_slots))
    values[:, 0::2] = qam_grid.values.real
    values[:, 1::2] = qam_grid.values.imag
    return SymbolGrid(values=values, staggered=True)


def oqam_destagger(staggered_grid: SymbolGrid) -> SymbolGrid:
    if not staggered_grid.staggered:
        raise InvalidArgumentError("输入不是交错网格")
    if staggered_grid.n_slots % 2:
        raise InvalidArgumentError("交错网格的时隙数必须为偶数")
    values = staggered_grid.values[:, 0::2] + 1j * staggered_grid.values[:, 1::2]
    return SymbolGrid(values=values, erased=staggered_grid.erased)


def _fbmc_geometry(cfg: SchemeConfig):
    prototype = scheme_prototype(cfg)
    L = cfg.samples_per_slot
    return prototype, L, L // 2


def fbmc_modulate(staggered_grid: SymbolGrid, cfg: SchemeConfig) -> SampledSignal:
    """
    FBMC/OQAM 综合滤波器组.

    实数符号 a_{n,k} 乘以 j^{n+k}，调制到第 n 个子载波，由原型 g 成形后
    延迟 k·τ₀（τ₀ = L/2 采样）叠加。基函数为单位能量（g/√L）。
    输出长度 (2K−1)·L/2 + len(g)，两端各含原型拖尾。

    Raises:
        InvalidArgumentError: 非交错网格或子载波数不匹配
    """
    _check_scheme(cfg, SchemeKind.FBMC_OQAM)
    if not staggered_grid.staggered:
        raise InvalidArgumentError("FBMC 调制需要 OQAM 交错网格")
    if staggered_grid.n_subcarriers != cfg.n_subcarriers:
        raise InvalidArgumentError(
            f"网格子载波数 {staggered_grid.n_subcarriers} 与配置 {cfg.n_subcarriers} 不一致"
        )

    prototype, L, half = _fbmc_geometry(cfg)
    g = prototype.taps / np.sqrt(L)
    n_half_slots = staggered_grid.n_slots
    n = np.arange(cfg.n_subcarriers)[:, None]
    k = np.arange(n_half_slots)[None, :]
    # e^{j2πn(k·L/2)/L} = (−1)^{nk}
    coefficients = staggered_grid.values * _J_POWERS[(n + k) % 4] * np.where((n * k) % 2, -1.0, 1.0)

    spectrum = np.zeros((L, n_half_slots), dtype=complex)
    spectrum[:cfg.n_subcarriers] = coefficients
    periodic = np.fft.ifft(spectrum, axis=0) * L
    shaped = periodic[np.arange(prototype.length) % L] * g[:, None]

    samples = np.zeros((n_half_slots - 1) * half + prototype.length, dtype=complex)
    for slot in range(n_half_slots):
        start = slot * half
        samples[start:start + prototype.length] += shaped[:, slot]
    return SampledSignal(
        samples=samples,
        sample_rate=cfg.sample_rate,
        center_frequency=center_frequency(cfg),
        payload_length=samples.size,
    )


def fbmc_analysis(signal: SampledSignal, cfg: SchemeConfig) -> np.ndarray:
    """
    分析滤波器组：对每个 (n, k) 基函数（不含 j^{n+k} 相位因子）做匹配滤波投影.

    Returns:
        np.ndarray: N×(2K) 复投影，尚未去旋转

    Raises:
        FramingError: 有效帧长度与半周期时隙结构不一致
    """
    _check_scheme(cfg, SchemeKind.FBMC_OQAM)
    prototype, L, half = _fbmc_geometry(cfg)
    payload = signal.payload
    excess = payload.size - prototype.length
    if excess < 0 or excess % half:
        raise FramingError(
            f"信号长度 {payload.size} 与 FBMC 帧结构不符（原型长度 {prototype.length}，半周期 {half}）"
        )
    n_half_slots = excess // half + 1

    index = np.arange(n_half_slots)[:, None] * half + np.arange(prototype.length)[None, :]
    weighted = payload[index] * (prototype.taps / np.sqrt(L))[None, :]
    folded_len = -(-prototype.length // L) * L
    padded = np.zeros((n_half_slots, folded_len), dtype=complex)
    padded[:, :prototype.length] = weighted
    folded = padded.reshape(n_half_slots, -1, L).sum(axis=1)
    projections = np.fft.fft(folded, axis=1)[:, :cfg.n_subcarriers].T

    n = np.arange(cfg.n_subcarriers)[:, None]
    k = np.arange(n_half_slots)[None, :]
    return projections * np.where((n * k) % 2, -1.0, 1.0)


def oqam_project(
    projections: np.ndarray,
    channel_gains: Optional[np.ndarray] = None,
    equalization: Equalization = Equalization.NONE,
) -> SymbolGrid:
    """去旋转 j^{−(n+k)}，可选迫零，再取实部."""
    projections = np.asarray(projections, dtype=complex)
    n = np.arange(projections.shape[0])[:, None]
    k = np.arange(projections.shape[1])[None, :]
    derotated = projections * np.conj(_J_POWERS[(n + k) % 4])
    equalized, erased = _apply_gains(derotated, channel_gains, equalization)
    return SymbolGrid(values=equalized.real, staggered=True, erased=erased)


def fbmc_demodulate(
    signal: SampledSignal,
    cfg: SchemeConfig,
    channel_gains: Optional[np.ndarray] = None,
    equalization: Equalization = Equalization.NONE,
) -> SymbolGrid:
    """FBMC/OQAM 解调：分析滤波器组 + 去旋转 + 可选迫零 + 取实部."""
    return oqam_project(fbmc_analysis(signal, cfg), channel_gains, equalization)


# ==================== SC-QPSK ====================

def sc_modulate(bits, cfg: SchemeConfig) -> SampledSignal:
    """
    SC-QPSK 调制：QPSK 映射后按 oversampling 上采样并经原型成形.

    Raises:
        InvalidArgumentError: 比特数为奇数或为空
    """
    _check_scheme(cfg, SchemeKind.SC_QPSK)
    bits = np.asarray(bits)
    if bits.size == 0 or bits.size % 2:
        raise InvalidArgumentError(f"SC-QPSK 需要偶数个比特，当前为 {bits.size}")
    symbols = qam_map(bits, 4)
    taps = scheme_prototype(cfg).taps
    samples = upfirdn(taps, symbols, up=cfg.oversampling)
    return SampledSignal(
        samples=samples,
        sample_rate=cfg.sample_rate,
        center_frequency=center_frequency(cfg),
        payload_length=samples.size,
    )


def sc_demodulate(signal: SampledSignal, cfg: SchemeConfig) -> np.ndarray:
    """
    匹配滤波后在发收滤波器总群时延处按符号率采样，QPSK 硬判决.

    Raises:
        FramingError: 信号短于一个符号加滤波器长度
    """
    _check_scheme(cfg, SchemeKind.SC_QPSK)
    taps = scheme_prototype(cfg).taps
    sps = cfg.oversampling
    payload = signal.payload
    if payload.size < taps.size:
        raise FramingError(f"信号长度 {payload.size} 短于滤波器长度 {taps.size}")
    n_symbols = (payload.size - taps.size) // sps + 1

    matched = fftconvolve(payload, taps[::-1]) / sps
    decisions = matched[taps.size - 1 + sps * np.arange(n_symbols)]
    return qam_demap(decisions, 4)


# ==================== 帧级封装 ====================

def counted_bit_mask(cfg: SchemeConfig, frame_slots: int) -> np.ndarray:
    """
    帧内参与误码统计的比特.

    FBMC/OQAM 丢弃首尾各 span_symbols−1 个半周期时隙（原型拖尾）；
    I 比特位于半时隙 2k，Q 比特位于 2k+1。
    """
    n_bits = bits_per_frame(cfg, frame_slots)
    if cfg.scheme is not SchemeKind.FBMC_OQAM:
        return np.ones(n_bits, dtype=bool)

    edge = scheme_prototype(cfg).span_symbols - 1
    n_half_slots = 2 * frame_slots
    bits_per_axis = cfg.bits_per_symbol // 2
    slot = np.arange(cfg.n_subcarriers * frame_slots) // cfg.n_subcarriers

    def valid(half_slot: np.ndarray) -> np.ndarray:
        return (half_slot >= edge) & (half_slot < n_half_slots - edge)

    mask_i = np.repeat(valid(2 * slot)[:, None], bits_per_axis, axis=1)
    mask_q = np.repeat(valid(2 * slot + 1)[:, None], bits_per_axis, axis=1)
    return np.hstack([mask_i, mask_q]).ravel()


def modulate_frame(bits, cfg: SchemeConfig, frame_slots: int) -> SampledSignal:
    """把一帧 N·K·log2M 个比特调制成波形（符号按时隙优先排列）."""
    bits = np.asarray(bits)
    expected = bits_per_frame(cfg, frame_slots)
    if bits.size != expected:
        raise InvalidArgumentError(f"帧比特数应为 {expected}，当前为 {bits.size}")

    if cfg.scheme is SchemeKind.SC_QPSK:
        return sc_modulate(bits, cfg)
    symbols = qam_map(bits, cfg.qam_order)
    grid = SymbolGrid(values=symbols.reshape(frame_slots, cfg.n_subcarriers).T)
    if cfg.scheme is SchemeKind.OFDM_QAM:
        return ofdm_modulate(grid, cfg)
    return fbmc_modulate(oqam_stagger(grid), cfg)


def demodulate_frame(
    signal: SampledSignal,
    cfg: SchemeConfig,
    channel_gains: Optional[np.ndarray] = None,
    equalization: Equalization = Equalization.NONE,
) -> np.ndarray:
    """解调一帧并返回比特（SC 不使用信道增益）."""
    if cfg.scheme is SchemeKind.SC_QPSK:
        return sc_demodulate(signal, cfg)
    if cfg.scheme is SchemeKind.OFDM_QAM:
        grid = ofdm_demodulate(signal, cfg, channel_gains, equalization)
    else:
        grid = oqam_destagger(fbmc_demodulate(signal, cfg, channel_gains, equalization))
    return qam_demap(grid.values.T.ravel(), cfg.qam_order)
