import math

import pytest

import kmsspec


def test_closed_set_and_target():
    K = kmsspec.ClosedSet(intervals=[(1.0, 2.0)], points=[0.0])
    assert K.contains(1.5) and K.contains(0.0)
    assert K.distance(3.0) == pytest.approx(1.0)
    assert kmsspec.target_phi(K, 2.0, 1.5) == 1.0
    assert kmsspec.target_phi(K, 2.0, 4.0) != 1.0


def test_solve_spectrum_linear():
    rep = kmsspec.solve_spectrum(lambda b: 1.0 + b, R=2.0, tol=1e-6, grid_n=1000)
    assert len(rep["isolated_roots"]) == 1
    assert abs(float(rep["isolated_roots"][0])) < 1e-6


def test_fraction_pair_cancellation():
    pair = kmsspec.fraction_pair(kmsspec.ClosedSet(intervals=[(1.0, 2.0)]), 2, 4)
    assert pair.phi1(0.0) == pytest.approx(1.0, abs=1e-12)
    assert pair.phi2(0.0) == pytest.approx(1.0, abs=1e-12)
    assert pair.phi1(1.5) == pytest.approx(0.5, abs=1e-12)


def test_misc_values():
    assert kmsspec.approximate_unit_D(1) == pytest.approx(math.pi / (2 * math.log(2)), abs=1e-9)
    assert kmsspec.mobius(4.0, 1.0) == pytest.approx(0.6)
    assert kmsspec.sphere_sizes(2, 5)[1:] == [4, 8, 12, 16, 20]
    assert {kmsspec.classify_spectrum(a, b) for a in (False, True) for b in (False, True)} == {
        "{0}", "[0,inf)", "(-inf,0]", "R"}
    assert kmsspec.classify_preset("homomorphism") == "{0}"
    assert kmsspec.closure_order(3, 1) == kmsspec.sl2_order(3, 1) == 24


def test_run_and_verify(tmp_path):
    cfg = {"mode": "free-product", "K": {"points": ["-1", "2"]}, "k": 2,
           "grid": {"R": "10", "n": 2000, "tol": "1e-6"}}
    report = kmsspec.run(cfg)
    assert report["pass"]
    assert len(report["spectrum"]["isolated_roots"]) == 2
    assert kmsspec.run_to_dir(cfg, tmp_path / "out")
    ok, first = kmsspec.verify(str(tmp_path / "out"))
    assert ok and first == ""


def test_errors_surface():
    with pytest.raises(kmsspec.KmsError):
        kmsspec.run({"mode": "wreath", "K": {"points": ["1"]}})
