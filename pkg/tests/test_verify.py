import pytest

from exlab import verify


@pytest.mark.parametrize("name,n", [
    ("linalg", None), ("game", None), ("zero-error", 6), ("classical-sim", 5),
    ("compression", 6), ("majority", 9), ("rectangle", 8), ("info-cost", 6), ("ic-bound", None),
])
def test_suites_pass(name, n):
    checks = verify.run_suite(name, n)
    assert checks and all(c.passed for c in checks), [c for c in checks if not c.passed]
    assert all(c.name.startswith(name + "/") for c in checks)


def test_perturbation_small():
    d, p = verify.perturbation_trials(500, seed=3)
    assert d < 1 and p < 1


def test_amplification_instance():
    res = verify.amplification_run(reps=200, seed=1)
    assert res["t"] >= 1 and res["exact"] < res["tau"]


def test_fixed_m():
    (check,) = verify.run_suite("zero-error", 7, 3)
    assert check.passed


def test_unknown_suite():
    with pytest.raises(KeyError):
        verify.run_suite("nope")
