"""OFDM/QAM、FBMC/OQAM 与 SC-QPSK 收发机测试."""
import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from app.core.errors import FramingError, InvalidArgumentError
from app.models.scheme import Equalization, SchemeConfig, SchemeKind
from app.models.signal import SampledSignal, SymbolGrid
from app.services.modem import (
    bits_per_frame,
    center_frequency,
    counted_bit_mask,
    demodulate_frame,
    fbmc_analysis,
    fbmc_demodulate,
    fbmc_modulate,
    modulate_frame,
    ofdm_demodulate,
    ofdm_modulate,
    oqam_destagger,
    oqam_project,
    oqam_stagger,
    sc_demodulate,
    sc_modulate,
    scheme_prototype,
    subcarrier_frequencies,
)
from app.services.qam import qam_map
from app.services.waveforms import orthogonality_defect

_J_POWERS = np.array([1.0, 1.0j, -1.0, -1.0j])


def _qam_grid(rng, n_subcarriers: int, n_slots: int, order: int = 4) -> SymbolGrid:
    bits = rng.integers(0, 2, size=n_subcarriers * n_slots * int(np.log2(order)))
    symbols = qam_map(bits, order)
    return SymbolGrid(values=symbols.reshape(n_slots, n_subcarriers).T)


class TestSchemeGeometry:
    """采样率、频带位置与帧长度."""

    def test_multicarrier_band_starts_at_first_subcarrier(self, ofdm_cfg):
        assert center_frequency(ofdm_cfg) == pytest.approx(ofdm_cfg.subcarrier_spacing)
        assert_allclose(subcarrier_frequencies(ofdm_cfg), np.arange(1, 9) * ofdm_cfg.subcarrier_spacing)

    def test_single_carrier_band_center(self, sc_cfg):
        # β = 1：频带 [0, 2Nν₀]，中心 Nν₀
        assert center_frequency(sc_cfg) == pytest.approx(8 * sc_cfg.subcarrier_spacing)

    def test_single_carrier_band_override(self):
        cfg = SchemeConfig(scheme=SchemeKind.SC_QPSK, n_subcarriers=8, sc_band_offset_hz=0.0)
        assert center_frequency(cfg) == 0.0

    def test_equal_frame_duration(self, rng, ofdm_cfg, fbmc_cfg, sc_cfg):
        K = 4
        bits = rng.integers(0, 2, size=bits_per_frame(ofdm_cfg, K))
        duration = K / ofdm_cfg.subcarrier_spacing

        ofdm = modulate_frame(bits, ofdm_cfg, K)
        assert len(ofdm) / ofdm.sample_rate == pytest.approx(duration)

        fbmc = modulate_frame(bits, fbmc_cfg, K)
        half = fbmc_cfg.samples_per_slot // 2
        assert (2 * K * half) / fbmc.sample_rate == pytest.approx(duration)

        n_symbols = bits.size // 2
        assert n_symbols / (sc_cfg.n_subcarriers * sc_cfg.subcarrier_spacing) == pytest.approx(duration)

    def test_same_bit_rate(self, ofdm_cfg, fbmc_cfg, sc_cfg):
        assert ofdm_cfg.bit_rate == fbmc_cfg.bit_rate == sc_cfg.bit_rate


class TestOfdm:
    """OFDM/QAM 调制解调."""

    def test_single_subcarrier_symbol(self, ofdm_cfg):
        values = np.zeros((8, 1), dtype=complex)
        values[0, 0] = 1.0
        signal = ofdm_modulate(SymbolGrid(values=values), ofdm_cfg)
        assert len(signal) == 16
        assert_allclose(signal.samples, np.full(16, 0.25), atol=1e-15)

    def test_zero_grid(self, ofdm_cfg):
        signal = ofdm_modulate(SymbolGrid(values=np.zeros((8, 3), dtype=complex)), ofdm_cfg)
        assert_array_equal(signal.samples, np.zeros(48))

    @pytest.mark.parametrize("cp_samples", [0, 4])
    def test_round_trip(self, rng, cp_samples):
        cfg = SchemeConfig(scheme=SchemeKind.OFDM_QAM, n_subcarriers=8, cp_samples=cp_samples)
        grid = _qam_grid(rng, 8, 5, order=16)
        signal = ofdm_modulate(grid, cfg)
        assert len(signal) == 5 * (16 + cp_samples)
        assert_allclose(ofdm_demodulate(signal, cfg).values, grid.values, atol=1e-10)

    def test_energy_equals_grid_energy(self, rng, ofdm_cfg):
        grid = _qam_grid(rng, 8, 6)
        signal = ofdm_modulate(grid, ofdm_cfg)
        assert signal.energy == pytest.approx(np.sum(np.abs(grid.values) ** 2), rel=1e-9)

    def test_linearity(self, rng, ofdm_cfg):
        a, b = _qam_grid(rng, 8, 3), _qam_grid(rng, 8, 3)
        combined = ofdm_modulate(SymbolGrid(values=a.values + 2 * b.values), ofdm_cfg)
        separate = ofdm_modulate(a, ofdm_cfg).samples + 2 * ofdm_modulate(b, ofdm_cfg).samples
        assert_allclose(combined.samples, separate, atol=1e-12)

    def test_zero_forcing_restores_scaled_grid(self, rng, ofdm_cfg):
        grid = _qam_grid(rng, 8, 2)
        gains = 0.5 * np.exp(1j * np.linspace(0, 1, 8))
        signal = ofdm_modulate(SymbolGrid(values=grid.values * gains[:, None]), ofdm_cfg)
        result = ofdm_demodulate(signal, ofdm_cfg, gains, Equalization.ZF)
        assert_allclose(result.values, grid.values, atol=1e-10)
        assert not result.erased.any()

    def test_zero_gain_subcarrier_is_erased(self, rng, ofdm_cfg):
        grid = _qam_grid(rng, 8, 2)
        gains = np.ones(8)
        gains[3] = 0.0
        result = ofdm_demodulate(ofdm_modulate(grid, ofdm_cfg), ofdm_cfg, gains, Equalization.ZF)
        assert_array_equal(result.erased, np.arange(8) == 3)
        assert_array_equal(result.values[3], np.zeros(2))
        assert_allclose(np.delete(result.values, 3, axis=0), np.delete(grid.values, 3, axis=0), atol=1e-10)

    def test_gains_ignored_without_equalization(self, rng, ofdm_cfg):
        grid = _qam_grid(rng, 8, 2)
        result = ofdm_demodulate(ofdm_modulate(grid, ofdm_cfg), ofdm_cfg, np.full(8, 2.0), Equalization.NONE)
        assert_allclose(result.values, grid.values, atol=1e-10)

    def test_staggered_grid_rejected(self, ofdm_cfg):
        with pytest.raises(InvalidArgumentError):
            ofdm_modulate(SymbolGrid(values=np.zeros((8, 2)), staggered=True), ofdm_cfg)

    def test_wrong_subcarrier_count(self, ofdm_cfg):
        with pytest.raises(InvalidArgumentError):
            ofdm_modulate(SymbolGrid(values=np.zeros((4, 2), dtype=complex)), ofdm_cfg)

    def test_partial_slot_is_framing_error(self, ofdm_cfg):
        signal = SampledSignal(samples=np.zeros(20, dtype=complex), sample_rate=ofdm_cfg.sample_rate)
        with pytest.raises(FramingError):
            ofdm_demodulate(signal, ofdm_cfg)

    def test_scheme_mismatch(self, fbmc_cfg):
        with pytest.raises(InvalidArgumentError):
            ofdm_modulate(SymbolGrid(values=np.zeros((8, 1), dtype=complex)), fbmc_cfg)


class TestOqamStagger:
    """OQAM 交错."""

    def test_single_symbol(self):
        staggered = oqam_stagger(SymbolGrid(values=np.array([[0.3 - 0.7j]])))
        assert staggered.staggered
        assert_array_equal(staggered.values, [[0.3, -0.7]])

    def test_destagger_inverts(self, rng):
        grid = _qam_grid(rng, 4, 3, order=16)
        assert_array_equal(oqam_destagger(oqam_stagger(grid)).values, grid.values)

    def test_already_staggered(self):
        with pytest.raises(InvalidArgumentError):
            oqam_stagger(SymbolGrid(values=np.zeros((2, 2)), staggered=True))

    def test_destagger_requires_staggered(self):
        with pytest.raises(InvalidArgumentError):
            oqam_destagger(SymbolGrid(values=np.zeros((2, 2), dtype=complex)))


class TestFbmc:
    """FBMC/OQAM 滤波器组."""

    def test_zero_grid(self, fbmc_cfg):
        signal = fbmc_modulate(SymbolGrid(values=np.zeros((8, 6)), staggered=True), fbmc_cfg)
        assert len(signal) == 5 * 8 + 65
        assert_array_equal(signal.samples, np.zeros(len(signal)))

    def test_single_symbol_is_scaled_prototype(self, fbmc_cfg):
        values = np.zeros((8, 1))
        values[0, 0] = 1.0
        signal = fbmc_modulate(SymbolGrid(values=values, staggered=True), fbmc_cfg)
        taps = scheme_prototype(fbmc_cfg).taps
        assert_allclose(signal.samples, taps / 4.0, atol=1e-12)
        assert signal.energy == pytest.approx(1.0, abs=1e-12)

    def test_unit_symbol_projection(self, fbmc_cfg):
        values = np.zeros((8, 8))
        values[2, 5] = 1.0
        signal = fbmc_modulate(SymbolGrid(values=values, staggered=True), fbmc_cfg)
        projections = fbmc_analysis(signal, fbmc_cfg)
        assert projections.shape == (8, 8)
        assert projections[2, 5] == pytest.approx(_J_POWERS[(2 + 5) % 4], abs=1e-12)

    @pytest.mark.parametrize("n_subcarriers", [8, 64])
    def test_round_trip_within_interference_bound(self, rng, n_subcarriers):
        cfg = SchemeConfig(scheme=SchemeKind.FBMC_OQAM, n_subcarriers=n_subcarriers, oversampling=2)
        values = rng.choice([-1.0, 1.0], size=(n_subcarriers, 40)) / np.sqrt(2)
        signal = fbmc_modulate(SymbolGrid(values=values, staggered=True), cfg)
        recovered = fbmc_demodulate(signal, cfg).values

        # 邻域取 N 覆盖全部子载波偏移，时间方向非重叠项为零
        defect_db = orthogonality_defect(
            scheme_prototype(cfg), n_subcarriers, neighborhood=n_subcarriers, metric="aggregate"
        )
        bound = np.max(np.abs(values)) * 10 ** (defect_db / 20)
        edge = 2 * cfg.span_symbols
        error = np.abs(recovered - values)[:, edge:-edge]
        assert error.max() <= bound * (1 + 1e-9) + 1e-12

    def test_peak_defect_meets_threshold_at_64(self):
        cfg = SchemeConfig(scheme=SchemeKind.FBMC_OQAM, n_subcarriers=64, oversampling=2)
        assert orthogonality_defect(scheme_prototype(cfg), 64, neighborhood=8) <= -30.0

    def test_imaginary_interference_discarded(self, rng, fbmc_cfg):
        values = rng.choice([-1.0, 1.0], size=(8, 8))
        signal = fbmc_modulate(SymbolGrid(values=values, staggered=True), fbmc_cfg)
        projections = fbmc_analysis(signal, fbmc_cfg)
        n = np.arange(8)[:, None]
        k = np.arange(8)[None, :]
        disturbed = projections + 1j * rng.normal(size=(8, 8)) * _J_POWERS[(n + k) % 4]
        assert_allclose(oqam_project(disturbed).values, oqam_project(projections).values, atol=1e-12)

    def test_linearity(self, rng, fbmc_cfg):
        a = rng.normal(size=(8, 6))
        b = rng.normal(size=(8, 6))
        combined = fbmc_modulate(SymbolGrid(values=a - 3 * b, staggered=True), fbmc_cfg)
        separate = (
            fbmc_modulate(SymbolGrid(values=a, staggered=True), fbmc_cfg).samples
            - 3 * fbmc_modulate(SymbolGrid(values=b, staggered=True), fbmc_cfg).samples
        )
        assert_allclose(combined.samples, separate, atol=1e-12)

    def test_zero_signal_gives_zero_grid(self, fbmc_cfg):
        signal = SampledSignal(samples=np.zeros(3 * 8 + 65, dtype=complex), sample_rate=fbmc_cfg.sample_rate)
        assert_array_equal(fbmc_demodulate(signal, fbmc_cfg).values, np.zeros((8, 4)))

    def test_requires_staggered_grid(self, fbmc_cfg):
        with pytest.raises(InvalidArgumentError):
            fbmc_modulate(SymbolGrid(values=np.zeros((8, 2), dtype=complex)), fbmc_cfg)

    def test_framing_error(self, fbmc_cfg):
        signal = SampledSignal(samples=np.zeros(70, dtype=complex), sample_rate=fbmc_cfg.sample_rate)
        with pytest.raises(FramingError):
            fbmc_analysis(signal, fbmc_cfg)

    def test_counted_bits_drop_edge_half_slots(self, fbmc_cfg):
        mask = counted_bit_mask(fbmc_cfg, 16)
        assert mask.size == 256
        # 每个半时隙 8 个子载波 × 1 比特，首尾各丢 3 个半时隙
        assert np.count_nonzero(mask) == 8 * (32 - 6)


class TestSingleCarrier:
    """SC-QPSK 收发机."""

    def test_rect_single_symbol(self, sc_rect_cfg):
        signal = sc_modulate([0, 0], sc_rect_cfg)
        assert_allclose(signal.samples, np.full(4, (1 + 1j) / np.sqrt(2)), atol=1e-15)

    def test_output_length(self, rng, sc_cfg):
        bits = rng.integers(0, 2, size=16)
        signal = sc_modulate(bits, sc_cfg)
        assert len(signal) == 7 * 4 + scheme_prototype(sc_cfg).length

    @pytest.mark.parametrize("fixture", ["sc_cfg", "sc_rect_cfg"])
    def test_round_trip(self, rng, request, fixture):
        cfg = request.getfixturevalue(fixture)
        bits = rng.integers(0, 2, size=512).astype(np.uint8)
        assert_array_equal(sc_demodulate(sc_modulate(bits, cfg), cfg), bits)

    def test_scaling_keeps_decisions(self, rng, sc_cfg):
        bits = rng.integers(0, 2, size=128).astype(np.uint8)
        signal = sc_modulate(bits, sc_cfg)
        assert_array_equal(sc_demodulate(signal.with_samples(3 * signal.samples), sc_cfg), bits)

    def test_phase_inversion_flips_bits(self, rng, sc_cfg):
        bits = rng.integers(0, 2, size=128).astype(np.uint8)
        signal = sc_modulate(bits, sc_cfg)
        assert_array_equal(sc_demodulate(signal.with_samples(-signal.samples), sc_cfg), 1 - bits)

    def test_odd_bit_count(self, sc_cfg):
        with pytest.raises(InvalidArgumentError):
            sc_modulate([0, 1, 0], sc_cfg)

    def test_short_signal(self, sc_cfg):
        signal = SampledSignal(samples=np.zeros(5, dtype=complex), sample_rate=sc_cfg.sample_rate)
        with pytest.raises(FramingError):
            sc_demodulate(signal, sc_cfg)


class TestFrames:
    """帧级调制解调."""

    @pytest.mark.parametrize("fixture", ["ofdm_cfg", "fbmc_cfg", "sc_cfg"])
    def test_noiseless_round_trip(self, rng, request, fixture):
        cfg = request.getfixturevalue(fixture)
        K = 8
        bits = rng.integers(0, 2, size=bits_per_frame(cfg, K)).astype(np.uint8)
        decoded = demodulate_frame(modulate_frame(bits, cfg, K), cfg)
        mask = counted_bit_mask(cfg, K)
        assert_array_equal(decoded[mask], bits[mask])

    def test_16qam_frame(self, rng):
        cfg = SchemeConfig(scheme=SchemeKind.FBMC_OQAM, n_subcarriers=8, qam_order=16)
        bits = rng.integers(0, 2, size=bits_per_frame(cfg, 8)).astype(np.uint8)
        decoded = demodulate_frame(modulate_frame(bits, cfg, 8), cfg)
        mask = counted_bit_mask(cfg, 8)
        assert_array_equal(decoded[mask], bits[mask])

    def test_wrong_bit_count(self, ofdm_cfg):
        with pytest.raises(InvalidArgumentError):
            modulate_frame(np.zeros(10, dtype=np.uint8), ofdm_cfg, 4)
