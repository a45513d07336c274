"""key = value 运行配置解析测试."""
import pytest

from app.core.errors import ConfigError
from app.models.analysis import TimeNormalization
from app.models.run_config import DEFAULT_COEFFICIENT_A, RunConfig
from app.models.scheme import Equalization, SchemeKind
from app.services.run_config import load_config, parse_config


class TestParseConfig:
    """配置文档解析."""

    def test_empty_document_gives_defaults(self):
        config = parse_config("")
        assert config.scheme == list(SchemeKind)
        assert config.n_subcarriers == 128
        assert config.gamma == 0.5
        assert config.target_ber == 1e-3

    def test_values_comments_and_lists(self):
        text = "\n".join([
            "# 参考系统",
            "scheme = sc_qpsk, ofdm_qam",
            "n_subcarriers = 64   # 子载波数",
            "",
            "dgd_norm_list = 0, 0.25,0.5",
            "equalization = zf",
            "time_normalization = symbol_duration",
        ])
        config = parse_config(text)
        assert config.scheme == [SchemeKind.SC_QPSK, SchemeKind.OFDM_QAM]
        assert config.n_subcarriers == 64
        assert config.dgd_norm_list == [0.0, 0.25, 0.5]
        assert config.equalization is Equalization.ZF
        assert config.time_normalization is TimeNormalization.SYMBOL_DURATION

    def test_missing_equals(self):
        with pytest.raises(ConfigError) as info:
            parse_config("gamma = 0.3\nn_subcarriers 64")
        assert info.value.line == 2

    def test_duplicate_key(self):
        with pytest.raises(ConfigError) as info:
            parse_config("gamma = 0.3\n\ngamma = 0.4")
        assert info.value.key == "gamma"
        assert info.value.line == 3

    def test_unknown_key(self):
        with pytest.raises(ConfigError) as info:
            parse_config("scheme = ofdm_qam\nbandwidth = 5")
        assert info.value.key == "bandwidth"
        assert info.value.line == 2

    @pytest.mark.parametrize(
        "text, key",
        [
            ("gamma = 1.5", "gamma"),
            ("n_subcarriers = abc", "n_subcarriers"),
            ("scheme = qpsk", "scheme"),
            ("qam_order = 8\nscheme = ofdm_qam", "qam_order"),
            ("qam_order = 16", "qam_order"),
            ("cp_samples = 4\nscheme = fbmc_oqam", "cp_samples"),
            ("ebn0_start = 5\nebn0_stop = 2", "ebn0_stop"),
            ("dgd_norm_list = 0, -0.1", "dgd_norm_list"),
            ("scheme = ofdm_qam, ofdm_qam", "scheme"),
        ],
    )
    def test_invalid_values_report_key(self, text, key):
        with pytest.raises(ConfigError) as info:
            parse_config(text)
        assert info.value.key == key

    def test_cross_field_constraint(self):
        with pytest.raises(ConfigError, match="fbmc_oqam"):
            parse_config("scheme = fbmc_oqam\nframe_slots = 2")

    @pytest.mark.parametrize(
        "text, key, line",
        [
            ("oversampling = 1", "oversampling", 1),
            ("# 参考系统\nframe_slots = 2", "frame_slots", 2),
            ("scheme = fbmc_oqam\nn_subcarriers = 3\noversampling = 3", "oversampling", 3),
            ("scheme = fbmc_oqam\nspan_symbols = 3", "span_symbols", 2),
            ("scheme = ofdm_qam\nmax_bits = 10", "max_bits", 2),
        ],
    )
    def test_cross_field_constraint_reports_key_and_line(self, text, key, line):
        with pytest.raises(ConfigError) as info:
            parse_config(text)
        assert info.value.key == key
        assert info.value.line == line
        assert f"第 {line} 行" in str(info.value)

    def test_cross_field_key_without_line(self):
        # frame_slots 取默认值 16，文档中没有对应行
        with pytest.raises(ConfigError) as info:
            parse_config("scheme = fbmc_oqam\nspan_symbols = 20")
        assert info.value.key == "frame_slots"
        assert info.value.line is None

    def test_16qam_for_multicarrier(self):
        config = parse_config("scheme = ofdm_qam, fbmc_oqam\nqam_order = 16\ncp_samples = 0")
        assert config.scheme_config(SchemeKind.FBMC_OQAM).bits_per_symbol == 4

    def test_load_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(tmp_path / "missing.cfg")

    def test_load_file(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("scheme = sc_qpsk\nseed = 7\n", encoding="utf-8")
        assert load_config(path).seed == 7


class TestRunConfig:
    """派生模型."""

    def test_ebn0_grid_is_inclusive(self):
        config = RunConfig(ebn0_start=0.0, ebn0_stop=1.0, ebn0_step=0.25)
        assert config.ebn0_grid() == [0.0, 0.25, 0.5, 0.75, 1.0]

    def test_default_grid(self):
        assert len(RunConfig().ebn0_grid()) == 25

    def test_scenario_carries_run_parameters(self):
        config = RunConfig(scheme=[SchemeKind.OFDM_QAM], gamma=0.3, seed=9, cp_samples=8)
        scenario = config.scenario(SchemeKind.OFDM_QAM, dgd_norm=0.4)
        assert scenario.gamma == 0.3
        assert scenario.seed == 9
        assert scenario.scheme_config.cp_samples == 8
        assert scenario.dgd == pytest.approx(0.4 * scenario.bit_interval)

    @pytest.mark.parametrize("kind", list(SchemeKind))
    def test_default_coefficients(self, kind):
        assert RunConfig().penalty_model(kind).coefficient_a == DEFAULT_COEFFICIENT_A[kind]

    def test_coefficient_override(self):
        config = RunConfig(coefficient_a=50.0)
        assert config.penalty_model(SchemeKind.SC_QPSK).coefficient_a == 50.0

    def test_reference_bit_interval(self):
        model = RunConfig().penalty_model(SchemeKind.OFDM_QAM)
        assert model.bit_interval == pytest.approx(1.0 / 25.6e9)
        assert model.symbol_duration == pytest.approx(1e-8)
