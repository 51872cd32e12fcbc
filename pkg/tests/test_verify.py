import pytest

from distill_lab.verify import SUITES, run_suite


@pytest.mark.parametrize("suite", sorted(SUITES))
def test_suite_passes(suite, tmp_path):
    results = run_suite(suite, seed=0xD157, bundle_dir=tmp_path)
    failed = [r for r in results if not r.ok]
    assert not failed, "; ".join(f"{r.name}: {r.detail}" for r in failed)


def test_all_runs_every_suite(tmp_path):
    combined = run_suite("all", seed=0xD157, bundle_dir=tmp_path)
    total = sum(len(v) for v in SUITES.values())
    assert len(combined) == total


def test_unknown_suite_rejected():
    with pytest.raises(ValueError):
        run_suite("bogus")
