import pytest

from normlab.experiments import (
    ExperimentResult,
    run_all,
    run_closure_experiments,
    run_compose_identity_suite,
    run_interleave_experiment,
    run_separation_example,
)


def test_separation_passes_in_base_3():
    r = run_separation_example(3, 12)
    assert r.verdict
    assert len(r.checks) == 24  # plain and doubled at each n
    assert r.params["x"] == "1/2"


def test_separation_passes_in_base_4():
    r = run_separation_example(4, 6)
    assert r.verdict
    assert r.params["x"] == "2/3"


def test_separation_rejects_binary():
    with pytest.raises(ValueError):
        run_separation_example(2, 4)


def test_interleave_parts_unbalanced_but_recombine():
    r = run_interleave_experiment(10_000, z_threshold=0.05)
    assert r.verdict
    by_name = {c.name: c for c in r.checks}
    assert by_name["positions where parts fail to recombine"].observed == "0"
    assert float(by_name["even part single-digit discrepancy"].observed) >= 0.2
    assert float(by_name["odd part single-digit discrepancy"].observed) >= 0.2


def test_interleave_parent_check_is_honest_at_tight_threshold():
    # at 10^4 digits the parent's k<=2 discrepancy sits near 0.043, so the
    # 0.02 default must report a failure rather than smooth it over
    r = run_interleave_experiment(10_000)
    assert not r.checks[0].passed
    assert all(c.passed for c in r.checks[1:])
    assert not r.verdict
    assert "FAIL" in r.to_text()


def test_interleave_rejects_short_prefix():
    with pytest.raises(ValueError):
        run_interleave_experiment(9_999)


def test_closure_transport_passes():
    r = run_closure_experiments()
    assert r.verdict
    assert len(r.checks) == 23


def test_compose_suite_deterministic_and_green():
    a = run_compose_identity_suite(trials=15, seed=7)
    b = run_compose_identity_suite(trials=15, seed=7)
    assert a.verdict and b.verdict
    assert list(a.csv_rows()) == list(b.csv_rows())
    assert a.seed == 7
    assert "seed=7" in a.to_text()


def test_csv_rows_match_header():
    r = run_separation_example(3, 2)
    rows = list(r.csv_rows())
    assert all(len(row) == len(ExperimentResult.CSV_HEADER) for row in rows)
    assert {row[4] for row in rows} <= {0, 1}


def test_run_all_covers_each_driver():
    names = [r.name for r in run_all(seed=1)]
    assert names == ["separation", "interleave", "closure", "compose-identity"]
