import numpy as np
import pytest

from distill_lab.bundles import Bundle, read_bundle, write_bundle


def test_round_trip_is_bit_exact(tmp_path):
    rng = np.random.default_rng(0)
    bundle = Bundle(
        kind="distillation-witness",
        params={"d": 3, "n": 2, "beta": -0.6, "seed": 987654321, "value": -1.2345e-7},
        vectors={
            "u1": rng.standard_normal(9) + 1j * rng.standard_normal(9),
            "y": rng.standard_normal(4),
        },
    )
    path = write_bundle(bundle, tmp_path / "case.bundle")
    loaded = read_bundle(path)
    assert loaded.kind == bundle.kind
    assert loaded.params["d"] == 3 and loaded.params["n"] == 2
    assert loaded.params["beta"] == bundle.params["beta"]  # exact, not approximate
    assert loaded.params["value"] == bundle.params["value"]
    assert np.array_equal(loaded.vectors["u1"], bundle.vectors["u1"])
    assert np.array_equal(loaded.vectors["y"], bundle.vectors["y"])
    assert loaded.vectors["y"].dtype == np.float64
    assert loaded.vectors["u1"].dtype == np.complex128


def test_header_is_self_describing(tmp_path):
    path = write_bundle(Bundle(kind="x", params={"d": 2}), tmp_path / "h.bundle")
    lines = path.read_text().splitlines()
    assert lines[0] == "distill-lab bundle v1"
    assert lines[1] == "kind=x"
    assert lines[2] == "d=2"


def test_rejects_bad_magic(tmp_path):
    path = tmp_path / "bad.bundle"
    path.write_text("not a bundle\n")
    with pytest.raises(ValueError):
        read_bundle(path)


def test_rejects_truncated_vector(tmp_path):
    path = tmp_path / "trunc.bundle"
    path.write_text(
        "distill-lab bundle v1\nkind=x\nvector y real 3\n0x1.0p+0\n0x1.0p+0\n"
    )
    with pytest.raises(ValueError):
        read_bundle(path)


def test_rejects_garbage_line(tmp_path):
    path = tmp_path / "garbage.bundle"
    path.write_text("distill-lab bundle v1\nkind=x\nwhat is this\n")
    with pytest.raises(ValueError):
        read_bundle(path)
