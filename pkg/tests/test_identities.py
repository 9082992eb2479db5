"""Identity suite runner: record structure, determinism, overrides."""

import pytest

from quatcalc.identities import (DEFAULT_TOLERANCES, IdentityRecord,
                                 run_identity_suite)


def test_suite_passes_with_defaults():
    result = run_identity_suite()
    assert len(result.records) >= 500
    assert result.all_passed()
    assert all(isinstance(r, IdentityRecord) for r in result.records)


def test_suite_is_deterministic():
    a = run_identity_suite(points=5, seed=42)
    b = run_identity_suite(points=5, seed=42)
    assert len(a.records) == len(b.records)
    for ra, rb in zip(a.records, b.records):
        assert ra == rb


def test_different_seeds_differ():
    a = run_identity_suite(points=5, seed=42)
    b = run_identity_suite(points=5, seed=43)
    assert any(ra.residual != rb.residual
               for ra, rb in zip(a.records, b.records))


def test_covers_every_tolerance_class():
    result = run_identity_suite(points=5)
    names = {r.identity for r in result.records}
    # the not-small checks are present alongside the residual checks
    assert "traditional_rule_fails" in names
    assert "mixed_noncommute" in names
    assert "product_rule" in names or "product_rule_conj" in names
    assert "chain_rule_real" in names


def test_records_respect_tolerances():
    result = run_identity_suite(points=5)
    for r in result.records:
        assert r.passed == (r.residual <= r.tol)


def test_tolerance_override_can_fail_records():
    result = run_identity_suite(points=5,
                                tolerances={"product_rule": 1e-15})
    assert not result.all_passed()
    failing = {r.identity for r in result.records if not r.passed}
    assert failing <= {"product_rule", "product_rule_conj"}


def test_unknown_tolerance_rejected():
    with pytest.raises(ValueError, match="unknown tolerance names"):
        run_identity_suite(points=2, tolerances={"nope": 1.0})


def test_invalid_points_rejected():
    with pytest.raises(ValueError, match="positive"):
        run_identity_suite(points=0)


def test_default_tolerances_immutable_by_runs():
    before = dict(DEFAULT_TOLERANCES)
    run_identity_suite(points=2, tolerances={"golden": 1e-3})
    assert DEFAULT_TOLERANCES == before
