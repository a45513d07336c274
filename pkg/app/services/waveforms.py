"""原型滤波器生成与正交性检验服务."""
import logging
from typing import Dict, Tuple

import numpy as np

from app.core.config import settings
from app.core.errors import InvalidArgumentError
from app.models.scheme import SchemeKind
from app.models.waveform import Prototype, PrototypeKind

logger = logging.getLogger(__name__)

_J_POWERS = np.array([1.0, 1.0j, -1.0, -1.0j])

# 对称性容差
_SYMMETRY_TOL = 1e-12

_DEFECT_METRICS = ("peak", "aggregate")


def _unit_energy(taps: np.ndarray, samples_per_symbol: int) -> np.ndarray:
    return taps * np.sqrt(samples_per_symbol / np.sum(taps ** 2))


def rect_prototype(samples_per_symbol: int) -> Prototype:
    """
    矩形原型（OFDM/QAM）.

    Args:
        samples_per_symbol: 每个符号周期的采样数

    Returns:
        Prototype: 一个符号周期的常数窗，单位能量

    Raises:
        InvalidArgumentError: samples_per_symbol < 1
    """
    if samples_per_symbol < 1:
        raise InvalidArgumentError(f"samples_per_symbol 必须 >= 1，当前为 {samples_per_symbol}")
    return Prototype(
        taps=np.ones(samples_per_symbol),
        samples_per_symbol=samples_per_symbol,
        kind=PrototypeKind.RECTANGULAR,
        rolloff=0.0,
        span_symbols=1,
    )


def _srrc_response(t: np.ndarray, rolloff: float) -> np.ndarray:
    """t 以符号周期为单位；奇点处使用解析极限."""
    beta = rolloff
    h = np.empty_like(t)
    at_zero = t == 0
    at_edge = np.abs(np.abs(4 * beta * t) - 1) < 1e-12
    regular = ~(at_zero | at_edge)

    tr = t[regular]
    numerator = np.sin(np.pi * tr * (1 - beta)) + 4 * beta * tr * np.cos(np.pi * tr * (1 + beta))
    denominator = np.pi * tr * (1 - (4 * beta * tr) ** 2)
    h[regular] = numerator / denominator
    h[at_zero] = 1 - beta + 4 * beta / np.pi
    h[at_edge] = beta / np.sqrt(2) * (
        (1 + 2 / np.pi) * np.sin(np.pi / (4 * beta))
        + (1 - 2 / np.pi) * np.cos(np.pi / (4 * beta))
    )
    return h


def srrc_prototype(rolloff: float = 1.0, span_symbols: int = 4, samples_per_symbol: int = 8) -> Prototype:
    """
    截断的根升余弦原型.

    长度为 span_symbols·samples_per_symbol + 1（奇数，中心抽头对齐整数采样）。

    Args:
        rolloff: 滚降系数 β，(0, 1]
        span_symbols: 截断长度（符号数），必须为偶数
        samples_per_symbol: 每符号采样数

    Returns:
        Prototype: 偶对称、单位能量的 SRRC 原型

    Raises:
        InvalidArgumentError: 参数越界
    """
    if not 0 < rolloff <= 1:
        raise InvalidArgumentError(f"rolloff 必须在 (0, 1] 内，当前为 {rolloff}")
    if span_symbols < 1 or span_symbols % 2:
        raise InvalidArgumentError(f"span_symbols 必须为正偶数，当前为 {span_symbols}")
    if samples_per_symbol < 1:
        raise InvalidArgumentError(f"samples_per_symbol 必须 >= 1，当前为 {samples_per_symbol}")

    half = span_symbols * samples_per_symbol // 2
    t = np.arange(-half, half + 1) / samples_per_symbol
    taps = _srrc_response(t, rolloff)
    taps = 0.5 * (taps + taps[::-1])
    taps = _unit_energy(taps, samples_per_symbol)

    return Prototype(
        taps=taps,
        samples_per_symbol=samples_per_symbol,
        kind=PrototypeKind.SRRC,
        rolloff=rolloff,
        span_symbols=span_symbols,
    )


def is_symmetric(prototype: Prototype) -> bool:
    taps = prototype.taps
    return bool(np.allclose(taps, taps[::-1], rtol=0, atol=_SYMMETRY_TOL * np.max(np.abs(taps))))


def _basis(prototype: Prototype, n: int, k: int, lattice: SchemeKind) -> Tuple[int, np.ndarray]:
    """返回基函数 g_{n,k} 的起始采样位置与采样值."""
    L = prototype.samples_per_symbol
    shift = L // 2 if lattice is SchemeKind.FBMC_OQAM else L
    start = k * shift
    m = start + np.arange(prototype.length)
    values = prototype.taps * np.exp(2j * np.pi * n * m / L)
    if lattice is SchemeKind.FBMC_OQAM:
        values = values * _J_POWERS[(n + k) % 4]
    return start, values


def _inner(a: Tuple[int, np.ndarray], b: Tuple[int, np.ndarray]) -> complex:
    """⟨a, b⟩ = Σ conj(a)·b，只在重叠区求和."""
    (start_a, xa), (start_b, xb) = a, b
    lo = max(start_a, start_b)
    hi = min(start_a + xa.size, start_b + xb.size)
    if hi <= lo:
        return 0j
    return complex(np.vdot(xa[lo - start_a:hi - start_a], xb[lo - start_b:hi - start_b]))


def interference_terms(
    prototype: Prototype,
    n_subcarriers: int,
    neighborhood: int,
    lattice: SchemeKind = SchemeKind.FBMC_OQAM,
) -> Dict[Tuple[int, int], float]:
    """
    计算邻域内全部 (Δn, Δk) 的归一化内积幅度.

    FBMC/OQAM 格点取实部内积（ν₀τ₀ = 1/2，相位因子 j^{n+k}）；
    OFDM/QAM 格点取完整复内积（ν₀τ₀ = 1）。对原点奇偶性 (n, k) ∈ {0,1}² 取最大值。

    Args:
        prototype: 原型滤波器
        n_subcarriers: 子载波数，限制 |Δn| < N
        neighborhood: 扫描范围 |Δn|, |Δk| <= neighborhood
        lattice: 时频格点类型

    Returns:
        Dict[Tuple[int, int], float]: (Δn, Δk) -> 幅度（(0,0) 项归一化为 1）

    Raises:
        InvalidArgumentError: 参数越界
    """
    if neighborhood < 1:
        raise InvalidArgumentError(f"neighborhood 必须 >= 1，当前为 {neighborhood}")
    if n_subcarriers < 1:
        raise InvalidArgumentError(f"n_subcarriers 必须 >= 1，当前为 {n_subcarriers}")
    if lattice is SchemeKind.SC_QPSK:
        raise InvalidArgumentError("单载波没有多载波时频格点")
    if lattice is SchemeKind.FBMC_OQAM and prototype.samples_per_symbol % 2:
        raise InvalidArgumentError("FBMC/OQAM 格点要求每符号采样数为偶数")

    reference = float(np.sum(prototype.taps ** 2))
    n_span = min(neighborhood, n_subcarriers - 1)
    L = prototype.samples_per_symbol
    shift = L // 2 if lattice is SchemeKind.FBMC_OQAM else L
    terms: Dict[Tuple[int, int], float] = {}
    for n0 in (0, 1):
        for k0 in (0, 1):
            origin = _basis(prototype, n0, k0, lattice)
            for dn in range(-n_span, n_span + 1):
                for dk in range(-neighborhood, neighborhood + 1):
                    if abs(dk) * shift >= prototype.length:
                        # 时间上不重叠
                        terms.setdefault((dn, dk), 0.0)
                        continue
                    value = _inner(origin, _basis(prototype, n0 + dn, k0 + dk, lattice)) / reference
                    if lattice is SchemeKind.FBMC_OQAM:
                        magnitude = abs(value.real)
                    else:
                        magnitude = abs(value)
                    key = (dn, dk)
                    terms[key] = max(terms.get(key, 0.0), magnitude)
    return terms


def orthogonality_defect(
    prototype: Prototype,
    n_subcarriers: int,
    neighborhood: int = 8,
    lattice: SchemeKind = SchemeKind.FBMC_OQAM,
    metric: str = "peak",
) -> float:
    """
    正交性缺陷：邻域内交叉项相对 (0,0) 项的 dB 值.

    metric="peak" 取最大单个交叉项；metric="aggregate" 取全部交叉项幅度之和，
    即单位幅度符号网格在无噪声接收端看到的最坏总干扰。

    Returns:
        float: 20·log10(交叉项)，精确正交时返回 DEFECT_FLOOR_DB

    Raises:
        InvalidArgumentError: metric 不是 peak / aggregate
    """
    if metric not in _DEFECT_METRICS:
        raise InvalidArgumentError(f"metric 只支持 {', '.join(_DEFECT_METRICS)}，当前为 {metric}")
    terms = interference_terms(prototype, n_subcarriers, neighborhood, lattice)
    cross = [v for key, v in terms.items() if key != (0, 0)]
    if not cross:
        worst = 0.0
    elif metric == "aggregate":
        worst = float(np.sum(cross))
    else:
        worst = max(cross)
    if worst <= 0:
        defect = settings.DEFECT_FLOOR_DB
    else:
        defect = max(20.0 * np.log10(worst), settings.DEFECT_FLOOR_DB)
    logger.debug(
        f"正交性缺陷: kind={prototype.kind.value}, lattice={lattice.value}, metric={metric}, defect={defect:.2f} dB"
    )
    return float(defect)
