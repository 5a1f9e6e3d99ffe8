"""Kernel regression of set-valued responses and the interval demo problem."""

import math

import numpy as np
import pytest

from setstat.geometry import Box, bounds_of, hausdorff, interval
from setstat.kernelreg import (
    EPANECHNIKOV,
    INDICATOR,
    KERNELS,
    KernelSpec,
    LabeledSetSample,
    NoLocalDataError,
    SetRegressionDataset,
    consistency_curve,
    default_bandwidth,
    demo_truth,
    demo_truth_raw,
    estimate,
    generate_demo_dataset,
    kernel_family_eval,
    kernel_weights,
    local_mass_diagnostics,
    read_dataset_jsonl,
    validate_kernel,
    write_dataset_jsonl,
)
from setstat.randomsets import RngSeed


# ------------------------------------------------------------------ kernels


def test_builtin_kernels_satisfy_axioms():
    for spec in KERNELS.values():
        validate_kernel(spec)


def test_kernel_axiom_violations_detected():
    with pytest.raises(ValueError):
        validate_kernel(KernelSpec("neg", lambda t: 0.5 - t))
    with pytest.raises(ValueError):
        validate_kernel(KernelSpec("wide", lambda t: np.ones_like(np.asarray(t))))
    with pytest.raises(ValueError):
        validate_kernel(KernelSpec("hole", lambda t: np.where(np.asarray(t) < 0.1, 0.0, 0.0)))


def test_kernel_family_eval_closed_forms():
    # epanechnikov at the origin: 0.75 / h
    assert math.isclose(kernel_family_eval(EPANECHNIKOV, 0.5, [0.0]), 1.5, abs_tol=1e-12)
    # indicator in 1-D: 0.5 / h inside the window
    assert math.isclose(kernel_family_eval(INDICATOR, 0.5, [0.2]), 1.0, abs_tol=1e-12)
    assert kernel_family_eval(INDICATOR, 0.5, [0.6]) == 0.0
    # 2-D normalization uses h^-2
    assert math.isclose(
        kernel_family_eval(EPANECHNIKOV, 0.5, [0.0, 0.0]), 0.75 / 0.25, abs_tol=1e-12
    )
    with pytest.raises(ValueError):
        kernel_family_eval(EPANECHNIKOV, 0.0, [0.0])


def test_default_bandwidth_rates():
    assert default_bandwidth(1, 1) == 1.0
    assert math.isclose(default_bandwidth(10**5, 1), 0.1, abs_tol=1e-12)
    assert math.isclose(default_bandwidth(10**4, 1), 10 ** (-0.8), abs_tol=1e-12)
    assert math.isclose(default_bandwidth(10**6, 2), 0.1, abs_tol=1e-12)
    with pytest.raises(ValueError):
        default_bandwidth(0, 1)


def test_kernel_weights_normalized_and_local():
    inputs = np.array([[0.0], [0.1], [5.0]])
    w = kernel_weights(EPANECHNIKOV, inputs, [0.05], 0.5)
    assert math.isclose(w.sum(), 1.0, abs_tol=1e-12)
    assert w[2] == 0.0
    assert w[0] > 0 and w[1] > 0
    with pytest.raises(NoLocalDataError):
        kernel_weights(EPANECHNIKOV, inputs, [50.0], 0.5)


# --------------------------------------------------------------- estimator


def _tiny_dataset():
    return SetRegressionDataset(
        [
            LabeledSetSample([0.0], interval(0.0, 1.0)),
            LabeledSetSample([0.2], interval(1.0, 3.0)),
            LabeledSetSample([3.0], interval(10.0, 11.0)),
        ]
    )


def test_estimate_weighted_interval_average_by_hand():
    ds = _tiny_dataset()
    # indicator kernel with h=0.5 sees the first two samples equally
    est = estimate(ds, INDICATOR, [0.1], 0.5)
    lo, hi = bounds_of(est)
    assert math.isclose(lo[0], 0.5, abs_tol=1e-12)
    assert math.isclose(hi[0], 2.0, abs_tol=1e-12)


def test_estimate_reproduces_constant_sets():
    s = interval(-1.5, 2.5)
    ds = SetRegressionDataset(
        [LabeledSetSample([float(x)], s) for x in np.linspace(-2, 2, 20)]
    )
    for u in [-1.0, 0.0, 1.7]:
        assert hausdorff(estimate(ds, EPANECHNIKOV, [u], 0.8), s) <= 1e-12


def test_estimate_translation_equivariance_in_inputs():
    ds = _tiny_dataset()
    shift = 10.0
    shifted = SetRegressionDataset(
        [LabeledSetSample(smp.x + shift, smp.s) for smp in ds.samples]
    )
    a = estimate(ds, EPANECHNIKOV, [0.1], 0.5)
    b = estimate(shifted, EPANECHNIKOV, [0.1 + shift], 0.5)
    assert hausdorff(a, b) <= 1e-12


def test_estimate_invariant_to_kernel_scaling():
    ds = _tiny_dataset()
    doubled = KernelSpec("doubled", lambda t: 2.0 * EPANECHNIKOV.profile(t))
    a = estimate(ds, EPANECHNIKOV, [0.1], 0.5)
    b = estimate(ds, doubled, [0.1], 0.5)
    assert hausdorff(a, b) <= 1e-12


def test_estimate_respects_set_translation():
    ds = _tiny_dataset()
    v = np.array([7.5])
    moved = SetRegressionDataset(
        [LabeledSetSample(smp.x, smp.s.translate(v)) for smp in ds.samples]
    )
    a = estimate(ds, EPANECHNIKOV, [0.1], 0.5)
    b = estimate(moved, EPANECHNIKOV, [0.1], 0.5)
    assert hausdorff(a.translate(v), b) <= 1e-12


def test_estimate_raises_without_local_mass():
    with pytest.raises(NoLocalDataError):
        estimate(_tiny_dataset(), INDICATOR, [20.0], 0.5)


def test_estimate_handles_two_dimensional_sets():
    ds = SetRegressionDataset(
        [
            LabeledSetSample([0.0], Box([0, 0], [1, 1])),
            LabeledSetSample([0.1], Box([1, 1], [2, 2])),
        ]
    )
    est = estimate(ds, INDICATOR, [0.05], 1.0)
    lo, hi = bounds_of(est)
    np.testing.assert_allclose(lo, [0.5, 0.5])
    np.testing.assert_allclose(hi, [1.5, 1.5])


def test_dataset_validation():
    with pytest.raises(ValueError):
        SetRegressionDataset([])
    with pytest.raises(ValueError):
        SetRegressionDataset(
            [
                LabeledSetSample([0.0], interval(0, 1)),
                LabeledSetSample([0.0, 1.0], interval(0, 1)),
            ]
        )
    with pytest.raises(ValueError):
        SetRegressionDataset(
            [
                LabeledSetSample([0.0], interval(0, 1)),
                LabeledSetSample([1.0], Box([0, 0], [1, 1])),
            ]
        )


# ------------------------------------------------------------ demo problem


def test_demo_truth_oracle_values():
    lo, hi = bounds_of(demo_truth(0.0))
    assert (lo[0], hi[0]) == (-2.0, 2.0)
    lo, hi = bounds_of(demo_truth(1.0))
    assert (lo[0], hi[0]) == (1.0, 2.0)
    lo, hi = bounds_of(demo_truth(-2.0))
    assert (lo[0], hi[0]) == (-2.0, 0.5)
    lo, hi = bounds_of(demo_truth(2.0))
    assert (lo[0], hi[0]) == (1.5, 2.0)
    assert demo_truth_raw(-0.3) == (-2.0, 1.0 / 0.3)


def test_demo_truth_clipping_region():
    # raw upper endpoint exceeds 2 between -1/2 and -1/4; the set value clips
    raw_lo, raw_hi = demo_truth_raw(-0.3)
    assert raw_hi > 2.0
    lo, hi = bounds_of(demo_truth(-0.3))
    assert hi[0] == 2.0 and lo[0] == -2.0
    with pytest.raises(ValueError):
        demo_truth(2.5)


def test_generate_demo_dataset_shapes_and_determinism():
    ds1 = generate_demo_dataset(200, RngSeed(31))
    ds2 = generate_demo_dataset(200, RngSeed(31))
    assert len(ds1) == 200
    np.testing.assert_array_equal(ds1.inputs, ds2.inputs)
    for a, b in zip(ds1, ds2):
        assert hausdorff(a.s, b.s) == 0.0
    assert np.all(np.abs(ds1.inputs) <= 2.0)
    for smp in ds1:
        lo, hi = bounds_of(smp.s)
        tlo, thi = bounds_of(demo_truth(float(smp.x[0])))
        w = lo[0] - tlo[0]
        assert abs(w) <= 1.0 + 1e-12  # pure translate by w ~ U(-1, 1)
        assert math.isclose(hi[0] - thi[0], w, abs_tol=1e-12)


def test_local_mass_diagnostics_match_density():
    # x ~ U(-2, 2) has density 1/4; kernels integrate to one, so the first
    # diagnostic estimates 0.25 at interior points and the second decays
    ds = generate_demo_dataset(100_000, RngSeed(5))
    for spec in (EPANECHNIKOV, INDICATOR):
        h = default_bandwidth(len(ds), 1)
        mass, drift = local_mass_diagnostics(spec, ds.inputs, [0.3], h)
        assert abs(mass - 0.25) / 0.25 < 0.05
        assert drift < 0.05


def test_estimate_tracks_demo_truth_at_moderate_n():
    ds = generate_demo_dataset(4000, RngSeed(17))
    h = default_bandwidth(4000, 1)
    for u in [-1.5, -0.5, 0.0, 0.5, 1.5]:
        err = hausdorff(estimate(ds, EPANECHNIKOV, [u], h), demo_truth(u))
        assert err < 0.35


def test_consistency_curve_improves_with_n():
    u_grid = np.arange(-1.5, 1.5 + 1e-9, 0.25)
    points, records = consistency_curve([100, 2000], 3, u_grid, RngSeed(23))
    assert [p.n for p in points] == [100, 2000]
    assert len(records) == 2 * 3 * len(u_grid)
    assert points[1].median_error < points[0].median_error


# ------------------------------------------------------------------- files


def test_dataset_jsonl_round_trip(tmp_path):
    ds = generate_demo_dataset(50, RngSeed(2))
    path = tmp_path / "demo.jsonl"
    write_dataset_jsonl(ds, path)
    back = read_dataset_jsonl(path)
    assert len(back) == 50
    np.testing.assert_allclose(back.inputs, ds.inputs)
    for a, b in zip(ds, back):
        assert hausdorff(a.s, b.s) == 0.0


def test_dataset_jsonl_rejects_bad_records(tmp_path):
    path = tmp_path / "bad.jsonl"
    path.write_text('{"x": [0.0]}\n')
    with pytest.raises(ValueError):
        read_dataset_jsonl(path)
    path.write_text('{"x": [0.0], "set": {"type": "box", "lower": [0], "upper": [1]}, "y": 2}\n')
    with pytest.raises(ValueError):
        read_dataset_jsonl(path)
