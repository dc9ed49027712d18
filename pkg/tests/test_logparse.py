import pytest
from hypothesis import given, settings, strategies as st

from mdtune.errors import LogParseError
from mdtune.logparse import (
    ADVISORY_GPU_UNDERUTILIZED,
    ADVISORY_OTHER,
    ADVISORY_PME_OVERPROVISIONED,
    Advisory,
    GpuCpuRatio,
    ParsedLoadBalance,
    PerfMetrics,
    metrics_csv_row,
    metrics_to_csv,
    metrics_to_json,
    parse_advisories,
    parse_gpu_cpu_ratio,
    parse_load_balance_table,
    parse_metrics,
    parse_pme_load,
    render_log,
)

plain_floats = st.floats(min_value=0.001, max_value=9999.0,
                         allow_nan=False, allow_infinity=False)


class TestPmeLoad:
    def test_imbalanced_block(self, si_pme_imbalance):
        assert parse_pme_load(si_pme_imbalance) == (0.625, 8.3)

    def test_balanced_block(self, si_pme_balanced):
        assert parse_pme_load(si_pme_balanced) == (1.011, 0.7)

    def test_empty_text(self):
        assert parse_pme_load("") is None

    def test_load_without_wait_line(self):
        assert parse_pme_load(" Average PME mesh/force load: 0.9\n") == (0.9, None)

    def test_last_occurrence_wins(self, si_pme_imbalance, si_pme_balanced):
        combined = si_pme_imbalance + "\n" + si_pme_balanced
        assert parse_pme_load(combined) == (1.011, 0.7)

    def test_locale_decimal_rejected(self):
        with pytest.raises(LogParseError):
            parse_pme_load(" Average PME mesh/force load: 0,625\n")


class TestGpuCpuRatio:
    def test_si_line(self, si_gpu_force):
        ratio = parse_gpu_cpu_ratio(si_gpu_force)
        assert (ratio.gpu_ms, ratio.cpu_ms, ratio.ratio) == (5.673, 8.301, 0.683)

    def test_trivial_unity(self):
        ratio = parse_gpu_cpu_ratio(
            " Force evaluation time GPU/CPU: 1.000 ms/1.000 ms = 1.000\n"
        )
        assert ratio.ratio == 1.0

    def test_absent(self):
        assert parse_gpu_cpu_ratio("nothing to see\n") is None

    def test_malformed_line_names_offset(self):
        text = "prefix\n Force evaluation time GPU/CPU: 5,673 ms/8.301 ms = 0.683\n"
        with pytest.raises(LogParseError) as err:
            parse_gpu_cpu_ratio(text)
        assert err.value.offset == text.index(" Force") + 1

    def test_consistent_ratio_produces_no_warning(self, si_gpu_force):
        # 5.673/8.301 = 0.6834, printed 0.683: inside the 0.001 band
        metrics = parse_metrics(si_gpu_force)
        assert not any("integrity" in n.text for n in metrics.notes)

    def test_inconsistent_ratio_warns(self):
        text = " Force evaluation time GPU/CPU: 5.673 ms/8.301 ms = 0.700\n"
        metrics = parse_metrics(text)
        warnings = [n for n in metrics.notes if "integrity" in n.text]
        assert len(warnings) == 1
        assert "0.7" in warnings[0].text


class TestLoadBalanceTable:
    def test_si_block(self, si_load_balance):
        lb = parse_load_balance_table(si_load_balance)
        assert lb.initial_rcoulomb == 1.000
        assert lb.initial_rlist == 1.012
        assert lb.initial_grid == (240, 240, 240)
        assert lb.initial_spacing == 0.130
        assert lb.initial_inv_beta == 0.289
        assert lb.final_rcoulomb == 1.607
        assert lb.final_rlist == 1.619
        assert lb.final_grid == (144, 144, 144)
        assert lb.final_spacing == 0.217
        assert lb.final_inv_beta == 0.465
        assert lb.cost_ratio_pp == 4.10
        assert lb.cost_ratio_pme == 0.22
        assert not lb.shrunk

    def test_identity_block_accepted(self):
        text = (
            " PP/PME load balancing changed the cut-off and PME settings:\n"
            "           particle-particle                    PME\n"
            "            rcoulomb  rlist            grid      spacing   1/beta\n"
            "   initial  1.000 nm  1.012 nm     96 96 96   0.120 nm  0.289 nm\n"
            "   final    1.000 nm  1.012 nm     96 96 96   0.120 nm  0.289 nm\n"
            " cost-ratio           1.00             1.00\n"
        )
        lb = parse_load_balance_table(text)
        assert lb.cost_ratio_pp == 1.0
        assert lb.cost_ratio_pme == 1.0

    def test_cube_law_integrity_passes_on_si_block(self, si_load_balance):
        # (1.607/1.000)^3 = 4.15 against printed 4.10: within 2%
        metrics = parse_metrics(si_load_balance)
        assert not any("integrity" in n.text for n in metrics.notes)

    def test_cube_law_violation_warns(self, si_load_balance):
        text = si_load_balance.replace("cost-ratio           4.10", "cost-ratio           3.00")
        metrics = parse_metrics(text)
        assert any("integrity" in n.text for n in metrics.notes)

    def test_missing_final_row_raises(self, si_load_balance):
        text = si_load_balance.replace("   final ", "   fnal  ")
        with pytest.raises(LogParseError, match="final"):
            parse_load_balance_table(text)

    def test_missing_cost_row_raises(self, si_load_balance):
        text = si_load_balance.replace("cost-ratio", "costs")
        with pytest.raises(LogParseError, match="cost-ratio"):
            parse_load_balance_table(text)

    def test_absent_table(self):
        assert parse_load_balance_table("no table here") is None


class TestAdvisories:
    def test_pme_note_classified(self, si_pme_imbalance):
        notes = parse_advisories(si_pme_imbalance)
        assert len(notes) == 1
        assert notes[0].kind == ADVISORY_PME_OVERPROVISIONED
        assert notes[0].text.startswith("NOTE: 8.3 % performance was lost")
        assert "had less work to do than the PP nodes." in notes[0].text

    def test_gpu_note_classified(self, si_gpu_force):
        notes = parse_advisories(si_gpu_force)
        assert len(notes) == 1
        assert notes[0].kind == ADVISORY_GPU_UNDERUTILIZED
        assert "performance loss" in notes[0].text

    def test_no_notes(self, si_pme_balanced):
        assert parse_advisories(si_pme_balanced) == []

    def test_unrecognized_note_is_other(self):
        notes = parse_advisories("NOTE: affinity setting failed\n")
        assert notes[0].kind == ADVISORY_OTHER


class TestParseMetrics:
    def test_full_log(self, si_pme_imbalance):
        metrics = parse_metrics(si_pme_imbalance)
        assert metrics.performance == 20.0
        assert metrics.pme_mesh_force_load == 0.625
        assert metrics.pp_pme_wait_pct == 8.3
        assert metrics.gpu_cpu is None
        assert [n.kind for n in metrics.notes] == [ADVISORY_PME_OVERPROVISIONED]

    def test_noise_insensitive(self, si_gpu_force):
        noisy = []
        for i, line in enumerate(si_gpu_force.splitlines()):
            noisy.append(f"step {i} energies: -1.23e+05 4.56")
            noisy.append(line)
            noisy.append("Writing checkpoint, step 1234 at Mon Jan 1 00:00:00 2014")
        metrics = parse_metrics("\n".join(noisy))
        assert metrics.gpu_cpu == GpuCpuRatio(5.673, 8.301, 0.683)
        assert metrics.performance == 30.303


class TestRoundTrip:
    @settings(max_examples=80, deadline=None)
    @given(
        performance=plain_floats,
        load=st.one_of(st.none(), plain_floats),
        wait=st.one_of(st.none(), st.floats(min_value=0, max_value=100,
                                            allow_nan=False)),
        gpu_ms=st.one_of(st.none(), plain_floats),
    )
    def test_random_metrics_round_trip(self, performance, load, wait, gpu_ms):
        metrics = PerfMetrics(performance=performance)
        if load is not None:
            metrics.pme_mesh_force_load = load
            metrics.pp_pme_wait_pct = wait
        if gpu_ms is not None:
            metrics.gpu_cpu = GpuCpuRatio(gpu_ms=gpu_ms, cpu_ms=2 * gpu_ms, ratio=0.5)
        parsed = parse_metrics(render_log(metrics))
        assert parsed.performance == metrics.performance
        assert parsed.pme_mesh_force_load == metrics.pme_mesh_force_load
        if load is not None:
            assert parsed.pp_pme_wait_pct == metrics.pp_pme_wait_pct
        assert parsed.gpu_cpu == metrics.gpu_cpu

    def test_load_balance_round_trip(self):
        lb = ParsedLoadBalance(
            initial_rcoulomb=1.0, initial_rlist=1.012, initial_grid=(240, 240, 240),
            initial_spacing=0.13, initial_inv_beta=0.289,
            final_rcoulomb=1.607, final_rlist=1.619, final_grid=(144, 144, 144),
            final_spacing=0.217, final_inv_beta=0.465,
            cost_ratio_pp=4.1, cost_ratio_pme=0.22,
        )
        metrics = PerfMetrics(performance=4.96, load_balance=lb)
        parsed = parse_metrics(render_log(metrics))
        assert parsed.load_balance == lb

    def test_notes_round_trip(self, si_pme_imbalance):
        metrics = parse_metrics(si_pme_imbalance)
        parsed = parse_metrics(render_log(metrics))
        assert [n.kind for n in parsed.notes] == [n.kind for n in metrics.notes]


class TestSerialization:
    def test_json_fields(self, si_load_balance):
        doc = metrics_to_json(parse_metrics(si_load_balance))
        assert doc["load_balance"]["final"]["grid"] == [144, 144, 144]
        assert doc["load_balance"]["cost_ratio_pme"] == 0.22
        assert doc["performance_ns_day"] == 4.96

    def test_csv_row(self, si_gpu_force):
        row = metrics_csv_row(parse_metrics(si_gpu_force))
        assert row["gpu_cpu_ratio"] == 0.683
        assert row["advisories"] == ADVISORY_GPU_UNDERUTILIZED

    def test_csv_table(self, si_pme_imbalance, si_pme_balanced):
        text = metrics_to_csv([parse_metrics(si_pme_imbalance),
                               parse_metrics(si_pme_balanced)])
        lines = text.strip().splitlines()
        assert len(lines) == 3
        assert lines[0].startswith("performance_ns_day,")
