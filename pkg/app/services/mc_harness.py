"""蒙特卡洛 BER 引擎、所需 Eb/N0 提取与功率代价测量."""
import logging
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed
from scipy.special import erfc
from scipy.stats import norm

from app.core.config import settings
from app.core.errors import InvalidArgumentError, UnbracketedTargetError
from app.core.logger import jdebug, jinfo, jwarn
from app.models.scheme import Equalization, SchemeKind
from app.models.simulation import BerCurve, BerPoint, PenaltyCurve, PenaltyRecord, Scenario
from app.services.modem import (
    bits_per_frame,
    center_frequency,
    counted_bit_mask,
    demodulate_frame,
    modulate_frame,
    subcarrier_frequencies,
)
from app.services.pmd_channel import add_awgn, apply_pmd_field, effective_transfer, project_to_launch

logger = logging.getLogger(__name__)

_Z95 = float(norm.ppf(0.975))


def qpsk_awgn_ber(ebn0_db: float) -> float:
    """AWGN 下 Gray 编码 QPSK 的理论误码率 Q(√(2·Eb/N0))."""
    return float(0.5 * erfc(math.sqrt(10.0 ** (ebn0_db / 10.0))))


def _frame_rngs(scenario: Scenario, point_index: int, frame_index: int):
    """按 (主种子, 点序号, 帧序号) 派生比特流与噪声流."""
    sequence = np.random.SeedSequence([scenario.seed, point_index, frame_index])
    bits_seq, noise_seq = sequence.spawn(2)
    return np.random.default_rng(bits_seq), noise_seq


def _run_frame(scenario: Scenario, ebn0_db: float, point_index: int, frame_index: int) -> Tuple[int, int]:
    """
    仿真一帧：调制 → PMD 场传输 → 相干投影 → 加噪 → 解调.

    Returns:
        Tuple[int, int]: (计数比特数, 误比特数)
    """
    cfg = scenario.scheme_config
    bits_rng, noise_seed = _frame_rngs(scenario, point_index, frame_index)
    n_bits = bits_per_frame(cfg, scenario.frame_slots)
    bits = bits_rng.integers(0, 2, size=n_bits, dtype=np.uint8)

    tx = modulate_frame(bits, cfg, scenario.frame_slots)
    state = scenario.pmd_state()
    rx = project_to_launch(apply_pmd_field(tx, state), state)
    # 只保留有效帧窗口，各 DGD 下噪声与帧逐采样对齐（公共随机数）
    rx = rx.with_samples(rx.payload.copy(), epoch_offset=0)

    # 噪声以发射功率为参考：σ² = E_tx / (n_bits · Eb/N0)
    samples_per_symbol = len(tx) * cfg.bits_per_symbol / n_bits
    rx = add_awgn(rx, ebn0_db, cfg.bits_per_symbol, samples_per_symbol, noise_seed, reference_power=tx.mean_power)

    if cfg.scheme is SchemeKind.SC_QPSK:
        transfer = effective_transfer(center_frequency(cfg), state)
        if abs(transfer) > 0:
            rx = rx.with_samples(rx.samples * np.exp(-1j * np.angle(transfer)))
        decoded = demodulate_frame(rx, cfg)
    else:
        transfer = effective_transfer(subcarrier_frequencies(cfg), state)
        if scenario.equalization is Equalization.ZF:
            gains = transfer
        else:
            magnitude = np.abs(transfer)
            gains = np.divide(transfer, magnitude, out=np.zeros_like(transfer), where=magnitude > 0)
        decoded = demodulate_frame(rx, cfg, gains, Equalization.ZF)

    mask = counted_bit_mask(cfg, scenario.frame_slots)
    errors = int(np.count_nonzero(decoded[mask] != bits[mask]))
    return int(np.count_nonzero(mask)), errors


def _ber_point(ebn0_db: float, bits: int, errors: int) -> BerPoint:
    if errors == 0:
        return BerPoint(
            ebn0_db=ebn0_db,
            bits_simulated=bits,
            bit_errors=0,
            ber=0.0,
            ber_ci95=3.0 / bits if bits else 1.0,
            censored=True,
        )
    ber = errors / bits
    return BerPoint(
        ebn0_db=ebn0_db,
        bits_simulated=bits,
        bit_errors=errors,
        ber=ber,
        ber_ci95=_Z95 * math.sqrt(ber * (1.0 - ber) / bits),
    )


def simulate_ber(
    scenario: Scenario,
    ebn0_db: float,
    point_index: int = 0,
    n_jobs: Optional[int] = None,
) -> BerPoint:
    """
    单个 Eb/N0 点的蒙特卡洛误码率.

    帧按固定批次并行计算，再按帧序号依次累加并逐帧检查停止条件
    （误比特数达到 min_errors，或下一帧将超过 max_bits），
    因此结果与 worker 数无关。

    Args:
        scenario: 仿真场景
        ebn0_db: Eb/N0 (dB)
        point_index: 点序号，参与随机种子派生
        n_jobs: 并行 worker 数，None 时取配置默认值

    Returns:
        BerPoint: 测量结果；无误码时标记 censored
    """
    n_jobs = settings.DEFAULT_WORKERS if n_jobs is None else n_jobs
    counted_per_frame = int(np.count_nonzero(counted_bit_mask(scenario.scheme_config, scenario.frame_slots)))
    max_frames = scenario.max_bits // counted_per_frame
    batch_size = max(1, settings.FRAMES_PER_BATCH)

    bits = 0
    errors = 0
    frame_index = 0
    done = False
    with Parallel(n_jobs=n_jobs, backend=settings.PARALLEL_BACKEND) as parallel:
        while not done and frame_index < max_frames:
            batch = range(frame_index, min(frame_index + batch_size, max_frames))
            results = parallel(delayed(_run_frame)(scenario, ebn0_db, point_index, f) for f in batch)
            for frame_bits, frame_errors in results:
                bits += frame_bits
                errors += frame_errors
                frame_index += 1
                if errors >= scenario.min_errors or bits + counted_per_frame > scenario.max_bits:
                    done = True
                    break
            jdebug(logger, "批次完成", 阶段="simulate_ber", 帧数=frame_index, 比特数=bits, 误比特数=errors)

    point = _ber_point(ebn0_db, bits, errors)
    jinfo(
        logger,
        "BER 点完成",
        阶段="simulate_ber",
        方案=scenario.scheme_config.scheme.value,
        归一化DGD=scenario.dgd_norm,
        gamma=scenario.gamma,
        ebn0_db=ebn0_db,
        比特数=bits,
        误比特数=errors,
        ber=point.ber,
        删失=point.censored,
    )
    if point.censored:
        jwarn(logger, "无误码，结果为删失上界", 阶段="simulate_ber", ebn0_db=ebn0_db, 上界=point.ber_ci95)
    return point


def sweep_ebn0(
    scenario: Scenario,
    grid: Sequence[float],
    stop_below_ber: Optional[float] = None,
    n_jobs: Optional[int] = None,
) -> BerCurve:
    """
    按 Eb/N0 网格扫描 BER 曲线，每个点以网格位置派生独立种子.

    Args:
        scenario: 仿真场景
        grid: 严格递增的 Eb/N0 网格 (dB)
        stop_below_ber: 可选，某点 BER 低于此值后停止扫描
        n_jobs: 并行 worker 数

    Raises:
        InvalidArgumentError: 网格为空或非严格递增
    """
    values = [float(v) for v in grid]
    if not values:
        raise InvalidArgumentError("Eb/N0 网格不能为空")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise InvalidArgumentError("Eb/N0 网格必须严格递增")

    points: List[BerPoint] = []
    for index, ebn0_db in enumerate(values):
        point = simulate_ber(scenario, ebn0_db, point_index=index, n_jobs=n_jobs)
        points.append(point)
        if stop_below_ber is not None and point.ber < stop_below_ber:
            break
    return BerCurve(points=points)


def _bracketing_points(curve: BerCurve, target_ber: float) -> Tuple[BerPoint, BerPoint]:
    """返回包围目标 BER 的相邻非零点."""
    points = [p for p in curve.points if p.ber > 0]
    for lo, hi in zip(points, points[1:]):
        if min(lo.ber, hi.ber) <= target_ber <= max(lo.ber, hi.ber):
            return lo, hi
    bers = [p.ber for p in points]
    raise UnbracketedTargetError(target_ber, min(bers) if bers else None, max(bers) if bers else None)


def required_ebn0(curve: BerCurve, target_ber: float) -> float:
    """
    在 (dB, log10 BER) 空间线性插值，求达到目标 BER 所需的 Eb/N0.

    Raises:
        UnbracketedTargetError: 目标 BER 不在两个非零 BER 点之间
    """
    if not 0 < target_ber < 1:
        raise InvalidArgumentError(f"target_ber 必须在 (0, 1) 内，当前为 {target_ber}")
    for p in curve.points:
        if p.ber == target_ber:
            return p.ebn0_db

    lo, hi = _bracketing_points(curve, target_ber)
    log_lo, log_hi = math.log10(lo.ber), math.log10(hi.ber)
    fraction = (math.log10(target_ber) - log_lo) / (log_hi - log_lo)
    return lo.ebn0_db + fraction * (hi.ebn0_db - lo.ebn0_db)


def required_ebn0_sigma(curve: BerCurve, target_ber: float) -> float:
    """
    所需 Eb/N0 的一倍标准差 (dB).

    目标处 log10 BER 的二项标准差 √((1−p)/(p·n))/ln10 除以包围点间的曲线斜率，
    n 取两个包围点中较少的比特数。

    Raises:
        UnbracketedTargetError: 目标 BER 不在两个非零 BER 点之间
    """
    if not 0 < target_ber < 1:
        raise InvalidArgumentError(f"target_ber 必须在 (0, 1) 内，当前为 {target_ber}")
    lo, hi = _bracketing_points(curve, target_ber)
    slope = abs(math.log10(lo.ber) - math.log10(hi.ber)) / (hi.ebn0_db - lo.ebn0_db)
    if slope == 0:
        return math.inf
    bits = min(lo.bits_simulated, hi.bits_simulated)
    log_sigma = math.sqrt((1.0 - target_ber) / (target_ber * bits)) / math.log(10.0)
    return log_sigma / slope


def measure_penalty(
    base: Scenario,
    dgd_norm_list: Sequence[float],
    target_ber: float,
    grid: Sequence[float],
    n_jobs: Optional[int] = None,
) -> PenaltyCurve:
    """
    各 DGD 值相对无 PMD 基线的功率代价.

    基线每个方案只算一次；各 DGD 使用相同的点种子（公共随机数），
    扫描在 BER 低于目标后停止。penalty_sigma_db 按基线与 DGD 曲线独立合成，
    公共随机数使实际离散度更小。

    Raises:
        UnbracketedTargetError: 某条曲线未包围目标 BER
    """
    baseline_curve = sweep_ebn0(base.with_pmd(dgd_norm=0.0), grid, stop_below_ber=target_ber, n_jobs=n_jobs)
    baseline = required_ebn0(baseline_curve, target_ber)
    baseline_sigma = required_ebn0_sigma(baseline_curve, target_ber)

    records: List[PenaltyRecord] = []
    for dgd_norm in dgd_norm_list:
        dgd_norm = float(dgd_norm)
        if dgd_norm == 0:
            required, sigma = baseline, 0.0
        else:
            curve = sweep_ebn0(base.with_pmd(dgd_norm=dgd_norm), grid, stop_below_ber=target_ber, n_jobs=n_jobs)
            required = required_ebn0(curve, target_ber)
            sigma = math.hypot(baseline_sigma, required_ebn0_sigma(curve, target_ber))
        record = PenaltyRecord(
            dgd_norm=dgd_norm,
            required_ebn0_db=required,
            penalty_db=required - baseline,
            penalty_sigma_db=sigma,
        )
        records.append(record)
        jinfo(
            logger,
            "功率代价记录",
            阶段="measure_penalty",
            方案=base.scheme_config.scheme.value,
            归一化DGD=dgd_norm,
            所需ebn0_db=required,
            代价_db=record.penalty_db,
            标准差_db=sigma,
        )
    return PenaltyCurve(records=records, bit_interval=base.bit_interval, gamma=base.gamma)


def dgd_tolerance(curve: PenaltyCurve, penalty_db: float = 1.0) -> float:
    """
    代价首次达到 penalty_db 时的归一化 DGD（线性插值）.

    Raises:
        InvalidArgumentError: 曲线从未达到该代价
    """
    records = sorted(curve.records, key=lambda r: r.dgd_norm)
    for record in records:
        if record.penalty_db == penalty_db:
            return record.dgd_norm
    for lo, hi in zip(records, records[1:]):
        if lo.penalty_db < penalty_db < hi.penalty_db:
            fraction = (penalty_db - lo.penalty_db) / (hi.penalty_db - lo.penalty_db)
            return lo.dgd_norm + fraction * (hi.dgd_norm - lo.dgd_norm)
    raise InvalidArgumentError(f"代价曲线未达到 {penalty_db} dB，请扩展 DGD 列表")
