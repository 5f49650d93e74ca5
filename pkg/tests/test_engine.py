"""Cycle-level engine checks: butterfly datapath, reorder elements, full runs."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pipefft.engine import (
    DataShuffler,
    EngineConfig,
    FftEngine,
    ShufflerSpec,
    bit_reversed_indices,
    butterfly,
    butterfly_trace,
    data_shuffle,
    engine_metrics,
    fft_engine_run,
    fft_radix2,
    latency_cycles,
)
from pipefft.numerics import dft_1d, relative_spectrum_error, twiddle

finite = st.floats(min_value=-1e3, max_value=1e3, allow_nan=False, allow_infinity=False)


class TestButterfly:
    def test_identical_inputs_cancel(self):
        assert butterfly(1 + 0j, 1 + 0j, 1 + 0j) == (2 + 0j, 0 + 0j)

    def test_rotation_by_minus_i(self):
        assert butterfly(1 + 0j, 0 + 0j, -1j) == (1 + 0j, -1j)

    def test_trace_matches_expanded_equations(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            xi, xj = (complex(*rng.standard_normal(2)) for _ in range(2))
            w = twiddle(int(rng.integers(0, 16)), 16)
            t = butterfly_trace(xi, xj, w)
            # expanded real/imaginary datapath, written out independently
            assert t.a1 == xi.real + xj.real
            assert t.a2 == xi.real - xj.real
            assert t.a3 == xi.imag + xj.imag
            assert t.a4 == xi.imag - xj.imag
            assert abs(t.c1 - (t.a2 * w.real - t.a4 * w.imag)) < 1e-15
            assert abs(t.c2 - (t.a2 * w.imag + t.a4 * w.real)) < 1e-15
            assert abs(t.top - (xi + xj)) < 1e-15
            assert abs(t.bottom - (xi - xj) * w) < 1e-15

    @given(finite, finite, finite, finite, finite, finite)
    @settings(max_examples=100, deadline=None)
    def test_trace_agrees_with_butterfly(self, xr, xi, yr, yi, wr, wi):
        a, b, w = complex(xr, xi), complex(yr, yi), complex(wr, wi)
        top, bottom = butterfly(a, b, w)
        t = butterfly_trace(a, b, w)
        assert t.top == top
        # python's complex multiply is the identical expansion, so the
        # datapath result is bitwise equal, not merely close
        assert t.bottom == bottom


class TestDataShuffler:
    def test_length_one_eight_cycle_trace(self):
        # hand-simulated register-level model, L=1: pre-register on the
        # bottom lane, crossbar on alternating beats, post-register on top
        top_in = [0 + 0j, 1 + 0j, 2 + 0j, 3 + 0j]
        bot_in = [10 + 0j, 11 + 0j, 12 + 0j, 13 + 0j]
        out_top, out_bot = data_shuffle(top_in, bot_in, 1)
        assert out_top == [None, None, 0, 10, 2, 12]
        assert out_bot == [None, None, 1, 11, 3, 13]

    def test_length_four_delay_is_five(self):
        n = 16
        top_in = list(range(n))
        bot_in = list(range(100, 100 + n))
        out_top, _ = data_shuffle(top_in, bot_in, 4)
        first_valid = next(i for i, v in enumerate(out_top) if v is not None)
        assert first_valid == 5

    def test_zero_length_rejected(self):
        with pytest.raises(ValueError):
            DataShuffler(0)
        with pytest.raises(ValueError):
            data_shuffle([1], [2], 0)

    def test_element_delay_and_storage(self):
        el = DataShuffler(8)
        assert el.delay == 9
        assert el.storage_words == 16

    def test_nothing_lost(self):
        rng = np.random.default_rng(12)
        top_in = list(rng.standard_normal(8) + 1j * rng.standard_normal(8))
        bot_in = list(rng.standard_normal(8) + 1j * rng.standard_normal(8))
        out_top, out_bot = data_shuffle(top_in, bot_in, 2)
        flushed = [v for v in out_top + out_bot if v is not None]
        assert sorted(map(complex, flushed), key=lambda z: (z.real, z.imag)) == sorted(
            map(complex, top_in + bot_in), key=lambda z: (z.real, z.imag)
        )


class TestShufflerSpec:
    def test_per_stage_lengths(self):
        assert ShufflerSpec.for_stage(8, 1).length == 2
        assert ShufflerSpec.for_stage(8, 2).length == 1
        assert ShufflerSpec.for_stage(1024, 1).length == 256

    def test_delay_is_length_plus_one(self):
        for n in (8, 64, 1024):
            for s in range(1, n.bit_length() - 2):
                spec = ShufflerSpec.for_stage(n, s)
                assert spec.delay_cycles == spec.length + 1
                assert spec.storage_words == 2 * spec.length

    def test_stage_range_enforced(self):
        with pytest.raises(ValueError):
            ShufflerSpec.for_stage(8, 0)
        with pytest.raises(ValueError):
            ShufflerSpec.for_stage(8, 3)  # last stage has no reorder element


class TestEngineConfig:
    def test_l_but_derivation(self):
        cfg = EngineConfig.from_operator_latency(512, 1, 3, 250.0)
        assert cfg.l_but == 13
        cfg = EngineConfig.from_operator_latency(1024, 1, 6, 345.0)
        assert cfg.l_but == 22

    def test_multiplier_cap_at_twelve(self):
        cfg = EngineConfig.from_operator_latency(512, 1, 14, 250.0)
        assert cfg.l_b == 12
        assert cfg.l_but == 14 + 12 + 14 + 4

    def test_rejects_bad_geometry(self):
        with pytest.raises(ValueError):
            EngineConfig(n=12)
        with pytest.raises(ValueError):
            EngineConfig(n=8, rows=8)  # rows > n/2
        with pytest.raises(ValueError):
            EngineConfig(n=8, rows=3)


class TestLatency:
    def test_published_spot_values(self):
        # printed latency columns sit one cycle above the closed form
        cfg = EngineConfig.from_operator_latency(512, 1, 3, 250.0)
        assert latency_cycles(cfg) == 14 * 9 + 255 == 381
        cfg = EngineConfig.from_operator_latency(1024, 1, 6, 345.0)
        assert latency_cycles(cfg) == 23 * 10 + 511 == 741
        report = engine_metrics(cfg)
        assert report.t_fft_seconds == pytest.approx((741 + 512) / 345.0e6, rel=1e-12)
        assert report.t_fft_seconds * 1e6 == pytest.approx(3.63, abs=0.005)

    def test_measured_equals_closed_form(self):
        for n, rows, l_op in [(8, 1, 3), (16, 2, 6), (64, 4, 9), (128, 2, 14), (256, 4, 0)]:
            cfg = EngineConfig.from_operator_latency(n, rows, l_op, 200.0)
            engine = FftEngine(cfg)
            assert engine.measured_latency_cycles == latency_cycles(cfg)
            assert engine.measured_total_cycles == latency_cycles(cfg) + cfg.burst_cycles


class TestMetrics:
    def test_bandwidth_anchor(self):
        cfg = EngineConfig.from_operator_latency(512, 1, 3, 250.0)
        report = engine_metrics(cfg)
        assert report.bandwidth_bytes_per_s == pytest.approx(32 * 250.0e6)
        assert round(report.bandwidth_gib_per_s, 2) == 7.45

    def test_gflops_anchors(self):
        cfg = EngineConfig.from_operator_latency(512, 1, 3, 250.0)
        assert round(engine_metrics(cfg).gflops, 2) == 22.5
        cfg = EngineConfig.from_operator_latency(2048, 4, 9, 376.0)
        assert engine_metrics(cfg).gflops == pytest.approx(165.44)

    def test_total_cycles_identity(self):
        cfg = EngineConfig.from_operator_latency(4096, 4, 6, 180.0)
        report = engine_metrics(cfg)
        assert report.t_fft_cycles == report.l_fft_cycles + 4096 // 8


class TestEngineRuns:
    @pytest.mark.parametrize("rows", [1, 2, 4])
    def test_delta_all_ones(self, rows):
        x = np.zeros(8, dtype=complex)
        x[0] = 1.0
        cfg = EngineConfig.from_operator_latency(8, rows, 6, 250.0)
        spectrum, _ = FftEngine(cfg).run(x)
        assert np.max(np.abs(spectrum - 1.0)) < 1e-12

    @pytest.mark.parametrize("n", [8, 16, 32, 64, 128])
    @pytest.mark.parametrize("rows", [1, 2, 4])
    def test_oracle_equivalence(self, n, rows):
        rng = np.random.default_rng(n * 10 + rows)
        x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        cfg = EngineConfig.from_operator_latency(n, rows, 6, 250.0)
        spectrum, report = FftEngine(cfg).run(x)
        assert relative_spectrum_error(spectrum, dft_1d(x), x) < 1e-9
        assert report.l_fft_cycles == latency_cycles(cfg)

    def test_linearity(self):
        rng = np.random.default_rng(13)
        cfg = EngineConfig.from_operator_latency(64, 2, 6, 250.0)
        engine = FftEngine(cfg)
        x = rng.standard_normal(64) + 1j * rng.standard_normal(64)
        y = rng.standard_normal(64) + 1j * rng.standard_normal(64)
        a, b = 2.5 - 1j, -0.75 + 3j
        combined, _ = engine.run(a * x + b * y)
        fx, _ = engine.run(x)
        fy, _ = engine.run(y)
        assert relative_spectrum_error(combined, a * fx + b * fy, x) < 1e-9

    def test_wrong_size_rejected(self):
        cfg = EngineConfig.from_operator_latency(16, 1, 6, 250.0)
        with pytest.raises(ValueError):
            FftEngine(cfg).run(np.zeros(8, dtype=complex))

    def test_one_shot_helper(self):
        x = np.zeros(16, dtype=complex)
        x[0] = 1.0
        cfg = EngineConfig.from_operator_latency(16, 2, 6, 250.0)
        spectrum, report = fft_engine_run(x, cfg)
        assert np.max(np.abs(spectrum - 1.0)) < 1e-12
        assert report.l_fft_cycles == latency_cycles(cfg)


class TestEngineStructure:
    @pytest.mark.parametrize("n,rows", [(8, 1), (64, 1), (64, 2), (64, 4), (256, 4)])
    def test_storage_is_n_minus_2r(self, n, rows):
        cfg = EngineConfig.from_operator_latency(n, rows, 6, 250.0)
        engine = FftEngine(cfg)
        assert engine.storage_words == n - 2 * rows

    def test_shuffler_lengths_halve(self):
        cfg = EngineConfig.from_operator_latency(64, 1, 6, 250.0)
        engine = FftEngine(cfg)
        lengths = [spec.length for spec in engine.shufflers]
        assert lengths == [16, 8, 4, 2, 1]
        assert all(spec.delay_cycles == spec.length + 1 for spec in engine.shufflers)

    def test_lane_crossing_stages_use_registers(self):
        cfg = EngineConfig.from_operator_latency(64, 4, 6, 250.0)
        plan = FftEngine(cfg).interconnect
        # 8 lanes: stages 1 and 2 cross rows, the rest reorder in time
        assert plan[0] == ("cross", 1)
        assert plan[1] == ("cross", 1)
        assert all(kind == "shuffle" for kind, _ in plan[2:])

    def test_rom_entries_are_table_roots(self):
        cfg = EngineConfig.from_operator_latency(16, 2, 6, 250.0)
        engine = FftEngine(cfg)
        table = {twiddle(k, 16) for k in range(16)}
        for stage in range(1, cfg.stages + 1):
            for row in range(cfg.rows):
                for value in engine.twiddle_rom(stage, row):
                    assert any(abs(value - t) < 1e-15 for t in table)


class TestVectorizedTransform:
    def test_matches_oracle(self):
        rng = np.random.default_rng(14)
        x = rng.standard_normal(64) + 1j * rng.standard_normal(64)
        assert np.max(np.abs(fft_radix2(x) - dft_1d(x))) < 1e-12

    def test_inverse_round_trip(self):
        rng = np.random.default_rng(15)
        x = rng.standard_normal(32) + 1j * rng.standard_normal(32)
        assert np.max(np.abs(fft_radix2(fft_radix2(x), inverse=True) - x)) < 1e-12

    @pytest.mark.parametrize("axis", [0, 1, 2])
    def test_batched_axis_application(self, axis):
        # non-final axes exercise the non-contiguous working-buffer path
        rng = np.random.default_rng(16)
        a = rng.standard_normal((4, 8, 16)) + 1j * rng.standard_normal((4, 8, 16))
        got = fft_radix2(a, axis=axis)
        want = np.apply_along_axis(dft_1d, axis, a)
        assert np.max(np.abs(got - want)) < 1e-10

    def test_rejects_non_power_of_two(self):
        with pytest.raises(ValueError):
            fft_radix2(np.zeros(12, dtype=complex))


def test_bit_reversed_indices():
    assert bit_reversed_indices(8) == (0, 4, 2, 6, 1, 5, 3, 7)
    assert bit_reversed_indices(2) == (0, 1)


@given(
    st.integers(min_value=3, max_value=6),
    st.sampled_from([1, 2, 4]),
    st.integers(min_value=0, max_value=2**32 - 1),
)
@settings(max_examples=20, deadline=None)
def test_engine_oracle_property(log_n, rows, seed):
    n = 2**log_n
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    cfg = EngineConfig.from_operator_latency(n, rows, 6, 250.0)
    spectrum, _ = FftEngine(cfg).run(x)
    assert relative_spectrum_error(spectrum, dft_1d(x), x) < 1e-9
