"""
Tests for the acceptance check runner
"""

from pathchains.layers.chains import Chain
from pathchains.layers.verification import VerificationSuite, chain_rank


def test_random_instances_are_reproducible():
    first = VerificationSuite(seed=3).random_instances(4)
    assert first == VerificationSuite(seed=3).random_instances(4)
    assert [len(g.vertices) for g in first] == [4, 5, 6, 7]


def test_chain_rank(q):
    a = Chain.path(q, "a", "b")
    b = Chain.path(q, "a", "c")
    assert chain_rank([a, b, a - b], q) == 2
    assert chain_rank([], q) == 0


def test_individual_checks_pass():
    suite = VerificationSuite(seed=0)
    for check in (suite.check_multisquare_over_z3, suite.check_multisquare_chain, suite.check_low_dimension_bases):
        row = check()
        assert row["passed"], row


def test_run_reports_errors_as_failed_rows(monkeypatch):
    suite = VerificationSuite(seed=0)
    names = [name for name in dir(suite) if name.startswith("check_")]
    for name in names:
        monkeypatch.setattr(suite, name, lambda: suite._row("stub", "x", "x", True))

    def broken():
        raise RuntimeError("boom")

    monkeypatch.setattr(suite, "check_trapezohedron", broken)
    rows = suite.run()
    assert [row["criterion"] for row in rows] == list(range(1, 13))
    assert rows[1]["passed"] is False
    assert "boom" in rows[1]["actual"]
    assert all(row["passed"] for row in rows if row["criterion"] != 2)
