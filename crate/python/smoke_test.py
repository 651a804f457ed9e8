"""Smoke test for the Python bindings.

Build and install first:  pip install --no-build-isolation -e crates/py
Run with `python python/smoke_test.py` or `pytest python/smoke_test.py`.
"""

import math
from pathlib import Path

import frontal_lab

SURFACES = Path(__file__).resolve().parent.parent / "surfaces"


def close(a, b, tol=1e-8):
    return abs(a - b) < tol


def test_examples():
    names = frontal_lab.examples()
    assert "paper-52" in names and "helicoid" in names


def test_invariants_of_the_52_example():
    inv = frontal_lab.invariants("paper-52", 0.0)
    expected = {"kappa_s": 2, "kappa_nu": 0, "kappa_t": 2, "r_b": 0, "r_c": 72, "kappa1": 2, "kappa2": -2}
    for key, value in expected.items():
        assert close(inv[key], value), (key, inv[key])


def test_surface_file_matches_builtin():
    path = str(SURFACES / "paper-52.surf")
    assert frontal_lab.invariants(path, 0.2) == frontal_lab.invariants("paper-52", 0.2)


def test_curvatures_off_the_axis():
    c = frontal_lab.curvatures("paper-52", 0.1, 0.2)
    assert math.isfinite(c["gauss"]) and close(c["gauss"], c["kappa1"] * c["kappa2"], 1e-9)


def test_focal_verdicts():
    assert frontal_lab.focal_verdict("paper-52", 1, 0.0) == "Regular"
    assert frontal_lab.focal_verdict("ridge-fold", 1, 0.0) == "NotCuspidalCrossCap"


def test_mesh():
    obj = frontal_lab.mesh_obj("paper-52", "f", 11, 11)
    assert sum(line.startswith("v ") for line in obj.splitlines()) == 121
    assert sum(line.startswith("f ") for line in obj.splitlines()) == 200


def test_verify_and_errors():
    ok, summary = frontal_lab.verify_criterion(1)
    assert ok, summary
    try:
        frontal_lab.invariants("no-such-surface", 0.0)
    except ValueError:
        pass
    else:
        raise AssertionError("expected ValueError")


if __name__ == "__main__":
    for name, fn in sorted(globals().items()):
        if name.startswith("test_") and callable(fn):
            fn()
            print(f"ok  {name}")
