"""方形 Gray 编码 QAM 映射与硬判决解映射."""
from typing import Tuple

import numpy as np

from app.core.errors import InvalidArgumentError


def _axis_parameters(order: int) -> Tuple[int, int, float]:
    """返回 (每轴比特数, 每轴电平数, 归一化因子)."""
    if order < 4 or order & (order - 1):
        raise InvalidArgumentError(f"QAM 阶数必须为 4 的幂，当前为 {order}")
    bits_per_symbol = int(order).bit_length() - 1
    if bits_per_symbol % 2:
        raise InvalidArgumentError(f"只支持方形 QAM（log2(M) 为偶数），当前 M = {order}")
    bits_per_axis = bits_per_symbol // 2
    levels = 1 << bits_per_axis
    scale = np.sqrt(2.0 * (order - 1) / 3.0)
    return bits_per_axis, levels, scale


def _gray_to_binary(gray: np.ndarray, n_bits: int) -> np.ndarray:
    binary = gray.copy()
    shift = gray >> 1
    for _ in range(n_bits):
        binary ^= shift
        shift = shift >> 1
    return binary


def _axis_levels(order: int) -> np.ndarray:
    """按 Gray 码取值 g = 0..√M−1 排列的单轴电平（已归一化）."""
    bits_per_axis, levels, scale = _axis_parameters(order)
    gray = np.arange(levels)
    binary = _gray_to_binary(gray, bits_per_axis)
    return ((levels - 1) - 2 * binary) / scale


def _bits_to_int(bits: np.ndarray) -> np.ndarray:
    weights = 1 << np.arange(bits.shape[-1] - 1, -1, -1)
    return bits.astype(np.int64) @ weights


def _int_to_bits(values: np.ndarray, n_bits: int) -> np.ndarray:
    shifts = np.arange(n_bits - 1, -1, -1)
    return ((values[:, None] >> shifts) & 1).astype(np.uint8)


def qam_map(bits, order: int) -> np.ndarray:
    """
    Gray 映射 QAM，平均符号能量为 1.

    每个符号的前一半比特（MSB 在前）决定 I 轴，后一半决定 Q 轴；
    M = 4 时比特 00 映射到 (1+j)/√2。

    Args:
        bits: 0/1 比特序列
        order: 调制阶数 M

    Returns:
        np.ndarray: 复数符号序列

    Raises:
        InvalidArgumentError: 比特数不能被 log2(M) 整除或含非 0/1 值
    """
    bits_per_axis, _, _ = _axis_parameters(order)
    bits = np.asarray(bits)
    bits_per_symbol = 2 * bits_per_axis
    if bits.ndim != 1 or bits.size % bits_per_symbol:
        raise InvalidArgumentError(f"比特数 {bits.size} 不能被 log2(M) = {bits_per_symbol} 整除")
    if np.any((bits != 0) & (bits != 1)):
        raise InvalidArgumentError("比特序列只能包含 0 和 1")

    levels = _axis_levels(order)
    grouped = bits.reshape(-1, bits_per_symbol)
    gray_i = _bits_to_int(grouped[:, :bits_per_axis])
    gray_q = _bits_to_int(grouped[:, bits_per_axis:])
    return levels[gray_i] + 1j * levels[gray_q]


def qam_demap(symbols, order: int) -> np.ndarray:
    """
    最小距离硬判决，qam_map 的逆映射.

    判决边界上的平局取 Gray 码较小的电平，即字典序最小的比特组合。

    Args:
        symbols: 复数符号序列
        order: 调制阶数 M

    Returns:
        np.ndarray: uint8 比特序列
    """
    bits_per_axis, _, _ = _axis_parameters(order)
    symbols = np.asarray(symbols, dtype=complex).ravel()
    levels = _axis_levels(order)

    # argmin 返回第一个最小值，候选按 Gray 码升序排列
    gray_i = np.argmin(np.abs(symbols.real[:, None] - levels[None, :]), axis=1)
    gray_q = np.argmin(np.abs(symbols.imag[:, None] - levels[None, :]), axis=1)
    bits = np.hstack([_int_to_bits(gray_i, bits_per_axis), _int_to_bits(gray_q, bits_per_axis)])
    return bits.ravel()
