"""运行编排服务 - 把命令分派到仿真与解析模块，并渲染 CSV."""
import logging
from pathlib import Path
from typing import Callable, Dict, List, Optional

import pandas as pd

from app.core.config import settings
from app.core.errors import SimulationError
from app.core.logger import jerror, jinfo
from app.models.run_config import RunConfig
from app.models.scheme import SchemeKind
from app.models.simulation import CommandResult, PenaltyCurve, RunCommand
from app.services.analysis import (
    coefficient_fit_residual_rms,
    fit_coefficient_a,
    fit_coefficient_a_multicarrier,
    penalty_multicarrier_model,
    penalty_sc,
)
from app.services.mc_harness import measure_penalty, sweep_ebn0
from app.services.modem import scheme_prototype
from app.services.waveforms import orthogonality_defect, rect_prototype

logger = logging.getLogger(__name__)

# 各命令的 CSV 列（顺序即输出顺序）
CSV_COLUMNS: Dict[RunCommand, List[str]] = {
    RunCommand.BER_SWEEP: ["scheme", "n_subcarriers", "gamma", "dgd_norm", "ebn0_db", "bits", "errors", "ber", "ber_ci95"],
    RunCommand.PENALTY: ["scheme", "n_subcarriers", "gamma", "dgd_norm", "required_ebn0_db", "penalty_db"],
    RunCommand.ANALYTIC: ["scheme", "model", "coefficient_a", "time_normalization", "dgd_norm", "penalty_db"],
    RunCommand.ORTHO_CHECK: ["prototype", "rolloff", "span", "n_subcarriers", "defect_db"],
    RunCommand.FIT_A: ["scheme", "fitted_a", "residual_rms_db"],
}


class OrchestrationService:
    """运行编排服务类."""

    def __init__(self):
        """初始化命令分派表."""
        self._handlers: Dict[RunCommand, Callable[[RunConfig, Optional[int]], List[dict]]] = {
            RunCommand.BER_SWEEP: self._ber_sweep,
            RunCommand.PENALTY: self._penalty,
            RunCommand.ANALYTIC: self._analytic,
            RunCommand.ORTHO_CHECK: self._ortho_check,
            RunCommand.FIT_A: self._fit_a,
        }

    def run_command(
        self,
        command: RunCommand,
        config: RunConfig,
        output: Optional[str] = None,
        seed: Optional[int] = None,
        workers: Optional[int] = None,
    ) -> CommandResult:
        """
        执行命令并生成 CSV.

        Args:
            command: 运行命令
            config: 运行配置
            output: 可选，CSV 输出路径（优先于 config.output）
            seed: 可选，覆盖主随机种子
            workers: 可选，并行 worker 数

        Returns:
            CommandResult: CSV 文本与行数

        Raises:
            SimulationError: 仿真失败（例如目标 BER 未被包围）
            OSError: 输出路径不可写
        """
        if seed is not None:
            config = config.model_copy(update={"seed": seed})
        jinfo(logger, "命令开始", 阶段=command.value, 方案=[k.value for k in config.scheme], seed=config.seed)

        try:
            rows = self._handlers[command](config, workers)
        except SimulationError as e:
            jerror(logger, "命令失败", 阶段=command.value, 错误=str(e))
            raise
        frame = self.to_frame(command, rows)
        csv_text = self.render_csv(frame)

        target = output or config.output
        if target:
            Path(target).write_text(csv_text, encoding="utf-8", newline="")
        jinfo(logger, "命令完成", 阶段=command.value, 行数=len(frame), 输出=target)
        return CommandResult(command=command, rows=len(frame), csv_text=csv_text, output=target)

    # ==================== CSV ====================

    @staticmethod
    def to_frame(command: RunCommand, rows: List[dict]) -> pd.DataFrame:
        return pd.DataFrame(rows, columns=CSV_COLUMNS[command])

    @staticmethod
    def render_csv(frame: pd.DataFrame) -> str:
        """以固定有效位数渲染 CSV（\\n 换行，无索引列）."""
        return frame.to_csv(
            index=False,
            float_format=f"%.{settings.CSV_SIGNIFICANT_DIGITS}g",
            lineterminator="\n",
        )

    # ==================== 命令实现 ====================

    def _ber_sweep(self, config: RunConfig, workers: Optional[int]) -> List[dict]:
        rows = []
        grid = config.ebn0_grid()
        for kind in config.scheme:
            for dgd_norm in config.dgd_norm_list:
                curve = sweep_ebn0(config.scenario(kind, dgd_norm), grid, n_jobs=workers)
                for point in curve.points:
                    rows.append({
                        "scheme": kind.value,
                        "n_subcarriers": config.n_subcarriers,
                        "gamma": config.gamma,
                        "dgd_norm": dgd_norm,
                        "ebn0_db": point.ebn0_db,
                        "bits": point.bits_simulated,
                        "errors": point.bit_errors,
                        "ber": point.ber,
                        "ber_ci95": point.ber_ci95,
                    })
        return rows

    def _measure(self, config: RunConfig, kind: SchemeKind, workers: Optional[int]) -> PenaltyCurve:
        return measure_penalty(
            config.scenario(kind),
            config.dgd_norm_list,
            config.target_ber,
            config.ebn0_grid(),
            n_jobs=workers,
        )

    def _penalty(self, config: RunConfig, workers: Optional[int]) -> List[dict]:
        rows = []
        for kind in config.scheme:
            curve = self._measure(config, kind, workers)
            for record in curve.records:
                rows.append({
                    "scheme": kind.value,
                    "n_subcarriers": config.n_subcarriers,
                    "gamma": config.gamma,
                    "dgd_norm": record.dgd_norm,
                    "required_ebn0_db": record.required_ebn0_db,
                    "penalty_db": record.penalty_db,
                })
        return rows

    def _analytic(self, config: RunConfig, workers: Optional[int]) -> List[dict]:
        rows = []
        for kind in config.scheme:
            model = config.penalty_model(kind)
            for dgd_norm in config.dgd_norm_list:
                dgd = dgd_norm * model.bit_interval
                if kind is SchemeKind.SC_QPSK:
                    name, penalty = "single_carrier", penalty_sc(model, dgd)
                else:
                    name, penalty = "multicarrier", penalty_multicarrier_model(model, dgd)
                rows.append({
                    "scheme": kind.value,
                    "model": name,
                    "coefficient_a": model.coefficient_a,
                    "time_normalization": model.time_normalization.value,
                    "dgd_norm": dgd_norm,
                    "penalty_db": penalty,
                })
        return rows

    def _ortho_check(self, config: RunConfig, workers: Optional[int]) -> List[dict]:
        rows = []
        for kind in config.scheme:
            if kind is SchemeKind.SC_QPSK:
                logger.info("SC-QPSK 没有多载波格点，跳过正交性检查")
                continue
            cfg = config.scheme_config(kind)
            if kind is SchemeKind.OFDM_QAM:
                prototype = rect_prototype(cfg.samples_per_slot)
            else:
                prototype = scheme_prototype(cfg)
            defect = orthogonality_defect(prototype, cfg.n_subcarriers, config.neighborhood, lattice=kind)
            rows.append({
                "prototype": prototype.kind.value,
                "rolloff": prototype.rolloff,
                "span": prototype.span_symbols,
                "n_subcarriers": cfg.n_subcarriers,
                "defect_db": defect,
            })
        return rows

    def _fit_a(self, config: RunConfig, workers: Optional[int]) -> List[dict]:
        rows = []
        for kind in config.scheme:
            curve = self._measure(config, kind, workers)
            model = config.penalty_model(kind)
            dgd_values = [d * curve.bit_interval for d in curve.dgd_norm]
            if kind is SchemeKind.SC_QPSK:
                fitted = fit_coefficient_a(curve, config.gamma, model.bit_interval)
                fitted_model = model.model_copy(update={"coefficient_a": fitted})
                predicted = [penalty_sc(fitted_model, d) for d in dgd_values]
            else:
                fitted = fit_coefficient_a_multicarrier(curve, model)
                fitted_model = model.model_copy(update={"coefficient_a": fitted})
                predicted = [penalty_multicarrier_model(fitted_model, d) for d in dgd_values]
            rows.append({
                "scheme": kind.value,
                "fitted_a": fitted,
                "residual_rms_db": coefficient_fit_residual_rms(curve, predicted),
            })
        return rows


# 创建全局编排服务实例
orchestration_service = OrchestrationService()
