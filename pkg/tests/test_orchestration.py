"""运行命令编排、CSV 输出与命令行退出码测试."""
import io

import pandas as pd
import pytest

from app.cli import EXIT_CONFIG_ERROR, EXIT_OK, EXIT_RUNTIME_ERROR, main
from app.core.errors import UnbracketedTargetError
from app.models.simulation import RunCommand
from app.services.orchestration_service import CSV_COLUMNS, orchestration_service
from app.services.run_config import parse_config

SMALL_OFDM = "\n".join([
    "scheme = ofdm_qam",
    "n_subcarriers = 8",
    "frame_slots = 8",
    "min_errors = 50",
    "max_bits = 100000",
    "ebn0_start = 0",
    "ebn0_stop = 10",
    "ebn0_step = 1",
    "target_ber = 1e-2",
    "dgd_norm_list = 0, 0.3, 0.5",
])

SMALL_SWEEP = SMALL_OFDM.replace("ebn0_stop = 10", "ebn0_stop = 2")

UNBRACKETED = "\n".join([
    "scheme = ofdm_qam",
    "n_subcarriers = 8",
    "frame_slots = 4",
    "min_errors = 20",
    "max_bits = 2000",
    "ebn0_start = 0",
    "ebn0_stop = 1",
    "target_ber = 1e-5",
    "dgd_norm_list = 0",
])


def _read(csv_text: str) -> pd.DataFrame:
    return pd.read_csv(io.StringIO(csv_text))


class TestCommands:
    """各运行命令."""

    def test_analytic(self):
        result = orchestration_service.run_command(RunCommand.ANALYTIC, parse_config(""))
        frame = _read(result.csv_text)
        assert list(frame.columns) == CSV_COLUMNS[RunCommand.ANALYTIC]
        assert result.rows == len(frame) == 15
        sc = frame[(frame.scheme == "sc_qpsk") & (frame.dgd_norm == 0.4)]
        assert sc.penalty_db.iloc[0] == pytest.approx(2.72)
        assert set(frame.model) == {"single_carrier", "multicarrier"}

    def test_ortho_check(self):
        config = parse_config("scheme = sc_qpsk, ofdm_qam, fbmc_oqam\nn_subcarriers = 16")
        frame = _read(orchestration_service.run_command(RunCommand.ORTHO_CHECK, config).csv_text)
        assert list(frame.prototype) == ["rectangular", "srrc"]
        assert frame.defect_db.iloc[0] <= -200
        assert frame.defect_db.iloc[1] <= -30

    def test_ortho_check_single_carrier_only(self):
        result = orchestration_service.run_command(RunCommand.ORTHO_CHECK, parse_config("scheme = sc_qpsk"))
        assert result.rows == 0
        assert result.csv_text == ",".join(CSV_COLUMNS[RunCommand.ORTHO_CHECK]) + "\n"

    def test_ber_sweep_rows(self):
        config = parse_config(SMALL_SWEEP)
        frame = _read(orchestration_service.run_command(RunCommand.BER_SWEEP, config).csv_text)
        assert list(frame.columns) == CSV_COLUMNS[RunCommand.BER_SWEEP]
        assert len(frame) == 3 * 3
        assert (frame.errors <= frame.bits).all()

    def test_penalty_and_fit(self):
        config = parse_config(SMALL_OFDM)
        penalty = _read(orchestration_service.run_command(RunCommand.PENALTY, config).csv_text)
        assert list(penalty.dgd_norm) == [0.0, 0.3, 0.5]
        assert penalty.penalty_db.iloc[0] == 0.0

        fit = _read(orchestration_service.run_command(RunCommand.FIT_A, config).csv_text)
        assert list(fit.columns) == CSV_COLUMNS[RunCommand.FIT_A]
        assert len(fit) == 1
        assert fit.residual_rms_db.iloc[0] >= 0

    def test_csv_is_reproducible(self, tmp_path):
        config = parse_config(SMALL_OFDM)
        out = tmp_path / "penalty.csv"
        first = orchestration_service.run_command(RunCommand.PENALTY, config, output=str(out))
        second = orchestration_service.run_command(RunCommand.PENALTY, config)
        assert first.csv_text == second.csv_text
        assert out.read_bytes() == first.csv_text.encode("utf-8")
        assert b"\r\n" not in out.read_bytes()

    @pytest.mark.parametrize("command, text", [(RunCommand.PENALTY, SMALL_OFDM), (RunCommand.BER_SWEEP, SMALL_SWEEP)])
    def test_csv_independent_of_worker_count(self, command, text):
        config = parse_config(text)
        serial = orchestration_service.run_command(command, config, workers=1)
        parallel = orchestration_service.run_command(command, config, workers=2)
        assert serial.csv_text.encode("utf-8") == parallel.csv_text.encode("utf-8")

    def test_csv_round_trips_at_nine_digits(self):
        result = orchestration_service.run_command(RunCommand.BER_SWEEP, parse_config(SMALL_SWEEP))
        frame = _read(result.csv_text)
        # 重新解析后再渲染得到同一字节串
        assert orchestration_service.render_csv(frame) == result.csv_text
        for value in frame.ber:
            assert float(f"{value:.9g}") == value

    def test_seed_override(self):
        config = parse_config(SMALL_SWEEP)
        a = orchestration_service.run_command(RunCommand.BER_SWEEP, config, seed=5)
        b = orchestration_service.run_command(RunCommand.BER_SWEEP, config.model_copy(update={"seed": 5}))
        assert a.csv_text == b.csv_text

    def test_unbracketed_target(self):
        with pytest.raises(UnbracketedTargetError):
            orchestration_service.run_command(RunCommand.PENALTY, parse_config(UNBRACKETED))


class TestCli:
    """命令行退出码."""

    def test_success_writes_file(self, tmp_path):
        out = tmp_path / "analytic.csv"
        assert main(["analytic", "--out", str(out)]) == EXIT_OK
        assert _read(out.read_text(encoding="utf-8")).shape[0] == 15

    def test_stdout_without_output(self, capsys):
        assert main(["analytic"]) == EXIT_OK
        assert capsys.readouterr().out.startswith(",".join(CSV_COLUMNS[RunCommand.ANALYTIC]))

    def test_config_file(self, tmp_path, capsys):
        path = tmp_path / "run.cfg"
        path.write_text("scheme = fbmc_oqam\ndgd_norm_list = 0.1, 0.2\n", encoding="utf-8")
        assert main(["analytic", "--config", str(path)]) == EXIT_OK
        assert len(_read(capsys.readouterr().out)) == 2

    def test_invalid_config(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text("gamma = 2\n", encoding="utf-8")
        assert main(["analytic", "--config", str(path)]) == EXIT_CONFIG_ERROR

    def test_missing_config_file(self, tmp_path):
        assert main(["analytic", "--config", str(tmp_path / "none.cfg")]) == EXIT_CONFIG_ERROR

    def test_unknown_command(self):
        assert main(["simulate"]) == EXIT_CONFIG_ERROR

    def test_negative_seed(self):
        assert main(["analytic", "--seed", "-1"]) == EXIT_CONFIG_ERROR

    def test_analytic_gamma_boundary(self, tmp_path):
        path = tmp_path / "edge.cfg"
        path.write_text("gamma = 0\n", encoding="utf-8")
        assert main(["analytic", "--config", str(path)]) == EXIT_CONFIG_ERROR

    def test_unbracketed_target_is_runtime_error(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text(UNBRACKETED, encoding="utf-8")
        assert main(["penalty", "--config", str(path)]) == EXIT_RUNTIME_ERROR

    def test_unwritable_output(self, tmp_path):
        out = tmp_path / "missing" / "out.csv"
        assert main(["analytic", "--out", str(out)]) == EXIT_RUNTIME_ERROR
