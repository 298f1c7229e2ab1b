"""Synthetic vein-tree generator, rigid perturbation and ground-truth files."""

import numpy as np
import pytest

from dorsavein import GroundTruth, InvalidParameter, SynthParams, generate_identity, perturb
from dorsavein.exceptions import FormatError
from dorsavein.synth import (
    SILHOUETTE_LEVEL,
    SURROUND_LEVEL,
    VEIN_LEVEL,
    load_ground_truth,
    save_ground_truth,
    transform_points,
)


@pytest.fixture(scope="module")
def identity():
    return generate_identity(SynthParams(seed=123))


# ---------------------------------------------------------------------------
# generate_identity
# ---------------------------------------------------------------------------


def test_generator_is_deterministic():
    a_img, a_gt = generate_identity(SynthParams(seed=9))
    b_img, b_gt = generate_identity(SynthParams(seed=9))
    assert np.array_equal(a_img, b_img)
    assert a_gt == b_gt


def test_generator_seeds_differ():
    a_img, _ = generate_identity(SynthParams(seed=1))
    b_img, _ = generate_identity(SynthParams(seed=2))
    assert not np.array_equal(a_img, b_img)


def test_branch_count_matches_ground_truth():
    _, gt = generate_identity(SynthParams(seed=4, branch_count=4))
    assert len(gt.branch_points) == 4


def test_raster_levels_and_contrast(identity):
    img, _ = identity
    levels = set(np.unique(img))
    assert levels == {SURROUND_LEVEL, VEIN_LEVEL, SILHOUETTE_LEVEL}
    assert SILHOUETTE_LEVEL - VEIN_LEVEL >= 60


def test_branch_points_lie_on_veins_inside_silhouette(identity):
    img, gt = identity
    for x, y in gt.branch_points:
        assert img[int(round(y)), int(round(x)), 0] == VEIN_LEVEL


def test_branch_points_sit_on_three_or_more_edges(identity):
    _, gt = identity
    for bp in gt.branch_points:
        touching = sum(
            1 for edge in gt.tree_edges
            if any(abs(px - bp[0]) < 1e-9 and abs(py - bp[1]) < 1e-9
                   for px, py in edge))
        assert touching >= 3


def test_generator_validates_params():
    for params in (SynthParams(width=32), SynthParams(branch_count=3),
                   SynthParams(branch_count=13), SynthParams(wander=-1.0),
                   SynthParams(vein_thickness=1), SynthParams(vein_thickness=6)):
        with pytest.raises(InvalidParameter):
            generate_identity(params)


# ---------------------------------------------------------------------------
# perturb and transform_points
# ---------------------------------------------------------------------------


def test_perturb_identity_is_exact(identity):
    img, _ = identity
    out = perturb(img, 0.0, (0.0, 0.0), 0.0)
    assert np.array_equal(out, img)
    assert out is not img


def test_perturb_is_deterministic(identity):
    img, _ = identity
    a = perturb(img, 7.5, (3.0, -2.0), 0.01)
    b = perturb(img, 7.5, (3.0, -2.0), 0.01)
    assert np.array_equal(a, b)


def test_perturb_integer_translation_shifts_pixels(identity):
    img, _ = identity
    out = perturb(img, 0.0, (5.0, 0.0), 0.0)
    assert np.array_equal(out[:, 5:], img[:, :-5])


def test_perturb_rejects_out_of_range_parameters(identity):
    img, _ = identity
    with pytest.raises(InvalidParameter):
        perturb(img, 31.0, (0.0, 0.0), 0.0)
    with pytest.raises(InvalidParameter):
        perturb(img, 0.0, (0.0, 0.0), 0.06)
    with pytest.raises(InvalidParameter):
        perturb(img, 0.0, (0.0, 0.0), -0.01)


def test_perturb_noise_flips_to_extremes(identity):
    img, _ = identity
    out = perturb(img, 0.0, (0.0, 0.0), 0.02)
    changed = np.any(out != img, axis=2)
    assert changed.any()
    assert set(np.unique(out[changed])) <= {0, 255}
    # Flips hit all three channels with the same value.
    assert np.all(out[changed][:, 0] == out[changed][:, 1])
    assert np.all(out[changed][:, 1] == out[changed][:, 2])


def test_transform_points_pure_translation():
    pts = [(10.0, 20.0), (100.5, 7.0)]
    out = transform_points(pts, 0.0, (5.0, 0.0))
    assert np.allclose(out, np.asarray(pts) + [5.0, 0.0])


def test_transform_points_rotation_preserves_center_distance():
    pts = np.array([[300.0, 400.0]])
    out = transform_points(pts, 10.0, (0.0, 0.0), width=480, height=640)
    center = np.array([479 / 2.0, 639 / 2.0])
    assert np.hypot(*(out[0] - center)) == pytest.approx(
        np.hypot(*(pts[0] - center)))


def test_perturbed_veins_land_at_analytic_positions(identity):
    """Dark pixels of the rotated raster appear where the forward motion of
    the originals predicts, within the 1 px resampling tolerance."""
    img, gt = identity
    rotation, shift = 10.0, (4.0, -3.0)
    out = perturb(img, rotation, shift, 0.0)
    moved = transform_points(gt.branch_points, rotation, shift)
    for x, y in moved:
        patch = out[int(y) - 1:int(y) + 3, int(x) - 1:int(x) + 3, 0]
        assert patch.min() <= VEIN_LEVEL + 45  # a dark vein pixel is nearby


# ---------------------------------------------------------------------------
# ground-truth sidecar
# ---------------------------------------------------------------------------


def test_ground_truth_round_trip(tmp_path):
    pts = [(1.5, 2.25), (100.0, 200.125)]
    path = tmp_path / "a.gt"
    save_ground_truth(pts, path)
    text = path.read_text()
    assert text.splitlines()[0] == "GT 1"
    assert text.splitlines()[1] == "branches 2"
    assert load_ground_truth(path) == [(1.5, 2.25), (100.0, 200.125)]


def test_ground_truth_rejects_malformed(tmp_path):
    bad = tmp_path / "bad.gt"
    for text in ("", "GT 2\nbranches 0\n", "GT 1\nbranches x\n",
                 "GT 1\nbranches 2\n1.0 2.0\n"):
        bad.write_text(text)
        with pytest.raises(FormatError):
            load_ground_truth(bad)
    with pytest.raises(FormatError):
        load_ground_truth(tmp_path / "missing.gt")
