import io
import json

import pytest

from concavity_bounds.core.bounds import ChainCheck
from concavity_bounds.core.errors import DomainError
from concavity_bounds.core.fuzz_campaign import (CSV_COLUMNS, CampaignReport, FuzzCampaign, FuzzConfig,
                                                 format_number, run_trial)


def _csv(report):
    stream = io.StringIO()
    report.write_csv(stream)
    return stream.getvalue()


def test_small_campaign_has_no_violations():
    config = FuzzConfig(dims=(2, 3, 4), trials=20, seed=7)
    report = FuzzCampaign(config).run()

    assert report.passed
    assert report.total_trials == 60
    for dim in (2, 3, 4):
        tally = report.tallies[dim]
        assert tally.trials == 20
        assert tally.passed == 20
        assert tally.failed == 0


def test_campaign_is_deterministic():
    config = FuzzConfig(dims=(2, 3), trials=10, seed=12345)
    first = FuzzCampaign(config).run()
    second = FuzzCampaign(config).run()
    assert _csv(first) == _csv(second)
    assert first.to_json() == second.to_json()


def test_worker_count_does_not_change_output():
    serial = FuzzCampaign(FuzzConfig(dims=(2, 3), trials=8, seed=99)).run()
    parallel = FuzzCampaign(FuzzConfig(dims=(2, 3), trials=8, seed=99, workers=2)).run()
    assert _csv(serial) == _csv(parallel)


def test_different_seeds_differ():
    first = FuzzCampaign(FuzzConfig(trials=5, seed=1)).run()
    second = FuzzCampaign(FuzzConfig(trials=5, seed=2)).run()
    assert _csv(first) != _csv(second)


def test_zero_trials():
    report = FuzzCampaign(FuzzConfig(dims=(2, 5), trials=0)).run()
    assert report.passed
    assert report.total_trials == 0
    assert _csv(report).strip() == ",".join(CSV_COLUMNS)
    assert json.loads(report.to_json())["total_trials"] == 0


def test_both_lower_bounds_win_somewhere():
    report = FuzzCampaign(FuzzConfig(dims=(2,), trials=200, seed=2024, extra_checks=False)).run()
    winners = report.tallies[2].winners
    assert winners["lowbd1"] > 0
    assert winners["lowbd2"] > 0


def test_pure_state_campaign():
    config = FuzzConfig(dims=(2, 3), ranks=(1,), trials=15, seed=3)
    report = FuzzCampaign(config).run()
    assert report.passed
    assert all(result.rank == 1 for result in report.results)


def test_advisory_failures_are_tallied_not_violations():
    report = FuzzCampaign(FuzzConfig(dims=(2,), trials=60, seed=20240101, extra_checks=False)).run()
    tally = report.tallies[2]
    assert report.passed
    assert tally.failed == 0
    assert tally.advisory_failures["kim_le_gap"] > 0
    assert "advisory_failures" in report.summary()["tallies"]["2"]

def test_rank_cycle_is_capped():
    config = FuzzConfig(dims=(2, 4), ranks=(1, 3))
    assert config.rank_for(4, 0) == 1
    assert config.rank_for(4, 1) == 3
    assert config.rank_for(2, 1) == 2
    assert FuzzConfig().rank_for(3, 0) is None


def test_trial_ids_and_progress():
    campaign = FuzzCampaign(FuzzConfig(dims=(2, 3), trials=3, seed=5))
    calls = []
    campaign.set_progress_callback(lambda done, total: calls.append((done, total)))
    report = campaign.run()

    assert [r.trial_id for r in report.results] == list(range(6))
    assert [r.dim for r in report.results] == [2, 2, 2, 3, 3, 3]
    assert calls[-1] == (6, 6)


def test_trial_reproduces_from_its_id():
    config = FuzzConfig(dims=(3,), trials=4, seed=11)
    report = FuzzCampaign(config).run()
    again = run_trial(config, 2, 3, 2)
    assert again.csv_row() == report.results[2].csv_row()
    assert config.delta < again.x < 1.0 - config.delta


def test_qubit_trials_include_half_check():
    result = run_trial(FuzzConfig(), 0, 2, 0)
    names = {check.name for check in result.extra_checks}
    assert "h2_half" in names
    assert "max_relative_cap_1" in names
    assert "gap_le_sandwiched_a=2" in names
    assert {"half_mixture_chain_a=1.5", "half_mixture_chain_a=2"} <= names
    assert all(check.ok for check in result.extra_checks)

    plain = run_trial(FuzzConfig(extra_checks=False), 0, 2, 0)
    assert plain.extra_checks == []


def test_injected_violation_is_recorded():
    config = FuzzConfig(trials=1)
    result = run_trial(config, 0, 2, 0)
    result.extra_checks.append(ChainCheck("injected", "a <= b", -0.25, False))

    report = CampaignReport(config)
    report.add(result)

    assert not report.passed
    assert report.tallies[2].failed == 1
    (violation,) = report.violations
    assert violation.inequality == "injected"
    assert violation.slack == -0.25
    assert violation.seed == result.seed
    assert result.max_abs_slack == 0.25

    payload = json.loads(report.to_json())
    record = payload["violations"][0]
    assert record["trial_id"] == 0
    assert len(record["states"]) == 2
    assert "gap" in record["values"]


def test_csv_layout():
    report = FuzzCampaign(FuzzConfig(trials=2, seed=4)).run()
    lines = _csv(report).splitlines()
    assert lines[0].split(",") == list(CSV_COLUMNS)
    row = lines[1].split(",")
    assert len(row) == len(CSV_COLUMNS)
    assert float(row[CSV_COLUMNS.index("x")]) == report.results[0].x


def test_format_number():
    assert format_number(None) == ""
    assert float(format_number(0.1)) == 0.1
    assert format_number(0.1) == "0.10000000000000001"


@pytest.mark.parametrize("kwargs", [
    {"dims": ()},
    {"dims": (1,)},
    {"ranks": ()},
    {"ranks": (0,)},
    {"trials": -1},
    {"seed": -1},
    {"seed": 2 ** 64},
    {"tolerance": -1.0},
    {"delta": 0.5},
    {"workers": 0},
    {"sandwiched_orders": (1.0,)},
])
def test_config_validation(kwargs):
    with pytest.raises(DomainError):
        FuzzConfig(**kwargs)


@pytest.mark.slow
def test_acceptance_qubits():
    report = FuzzCampaign(FuzzConfig(dims=(2,), trials=10_000, seed=20240101, workers=4)).run()
    assert report.passed, [v.to_dict() for v in report.violations[:5]]


@pytest.mark.slow
def test_acceptance_higher_dimensions():
    report = FuzzCampaign(FuzzConfig(dims=(3, 4, 5, 6, 7, 8), trials=1000, seed=20240102, workers=4)).run()
    assert report.passed, [v.to_dict() for v in report.violations[:5]]


@pytest.mark.slow
def test_acceptance_rank_deficient():
    config = FuzzConfig(dims=(3, 4, 6), ranks=(1, 2), trials=500, seed=20240103, workers=4)
    assert FuzzCampaign(config).run().passed
