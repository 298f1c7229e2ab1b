"""Active-contour segmentation and boundary-stroke removal."""

import numpy as np
import pytest

from dorsavein import (
    EmptyROI,
    InvalidParameter,
    SnakeParams,
    auto_segment,
    evolve_snake,
    external_energy,
    remove_boundary_strokes,
    to_grayscale,
)
from dorsavein.segmentation import circle_contour, segment_roi


def disk_image(size, radius, level=255):
    """White disk on black, as a color raster."""
    yy, xx = np.mgrid[0:size, 0:size]
    c = (size - 1) / 2.0
    mask = (xx - c) ** 2 + (yy - c) ** 2 <= radius ** 2
    img = np.zeros((size, size, 3), dtype=np.uint8)
    img[mask] = level
    return img


# ---------------------------------------------------------------------------
# external energy
# ---------------------------------------------------------------------------


def test_energy_uniform_image_is_zero():
    field = external_energy(np.full((10, 10, 3), 90, dtype=np.uint8))
    assert np.all(field.values == 0.0)
    assert np.all(field.grad_x == 0.0)
    assert np.all(field.grad_y == 0.0)


def test_energy_is_never_positive():
    rng = np.random.default_rng(2)
    img = rng.integers(0, 256, (12, 12, 3)).astype(np.uint8)
    assert np.all(external_energy(img).values <= 0.0)


def test_energy_minimum_sits_on_the_edge():
    img = np.zeros((11, 11, 3), dtype=np.uint8)
    img[:, 5:] = 255
    field = external_energy(img)
    min_cols = set(np.nonzero(field.values == field.values.min())[1])
    assert min_cols <= {4, 5}


# ---------------------------------------------------------------------------
# contour initialization and evolution
# ---------------------------------------------------------------------------


def test_circle_contour_radius_and_count():
    pts = circle_contour(10.0, 20.0, 5.0, 32)
    assert pts.shape == (32, 2)
    radii = np.hypot(pts[:, 0] - 10.0, pts[:, 1] - 20.0)
    assert np.allclose(radii, 5.0)


def test_circle_contour_needs_16_points():
    with pytest.raises(InvalidParameter):
        circle_contour(0.0, 0.0, 5.0, 8)


def test_snake_elasticity_contracts_on_zero_field():
    field = external_energy(np.full((64, 64, 3), 50, dtype=np.uint8))
    pts = circle_contour(31.5, 31.5, 20.0, 40)
    params = SnakeParams(balloon=0.0, converge_eps=1e-9, max_iters=1)
    radii = [20.0]
    for _ in range(5):
        pts = evolve_snake(field, pts, params).contour
        radii.append(np.hypot(pts[:, 0] - 31.5, pts[:, 1] - 31.5).mean())
    assert all(b < a for a, b in zip(radii, radii[1:]))


def test_snake_preserves_point_count_and_stays_in_bounds():
    img = disk_image(64, 20)
    field = external_energy(img)
    init = circle_contour(31.5, 31.5, 3.0, 48)
    result = evolve_snake(field, init, SnakeParams(max_iters=300))
    assert result.contour.shape == (48, 2)
    assert result.contour[:, 0].min() >= 0.0
    assert result.contour[:, 0].max() <= 63.0
    assert result.contour[:, 1].min() >= 0.0
    assert result.contour[:, 1].max() <= 63.0


def test_snake_converges_early_when_stationary():
    field = external_energy(np.full((64, 64, 3), 50, dtype=np.uint8))
    init = circle_contour(31.5, 31.5, 20.0, 40)
    # Zero forces except elasticity; a huge eps stops immediately.
    result = evolve_snake(field, init, SnakeParams(balloon=0.0,
                                                  converge_eps=10.0))
    assert result.converged
    assert result.iterations == 1


def test_snake_recovers_disk_boundary():
    img = disk_image(128, 40)
    field = external_energy(img)
    init = circle_contour(63.5, 63.5, 5.0, 100)
    result = evolve_snake(field, init, SnakeParams())
    radii = np.hypot(result.contour[:, 0] - 63.5, result.contour[:, 1] - 63.5)
    assert np.max(np.abs(radii - 40.0)) <= 2.0


def test_snake_rejects_bad_contour_and_params():
    field = external_energy(np.full((32, 32, 3), 10, dtype=np.uint8))
    with pytest.raises(InvalidParameter):
        evolve_snake(field, np.zeros((4, 2)), SnakeParams())
    for params in (SnakeParams(step=0.0), SnakeParams(eta1=-1.0),
                   SnakeParams(max_iters=0), SnakeParams(converge_eps=0.0)):
        with pytest.raises(InvalidParameter):
            params.validate()


# ---------------------------------------------------------------------------
# segment_roi / auto_segment
# ---------------------------------------------------------------------------


def test_segment_crops_bright_rectangle():
    img = np.zeros((120, 120, 3), dtype=np.uint8)
    img[20:100, 30:90] = 220
    gray, bbox, result = segment_roi(img)
    x0, y0, x1, y1 = bbox
    # Crop within the rectangle extent plus the 5 px margin and 1 px rounding.
    assert 30 - 7 <= x0 <= 30 + 2
    assert 20 - 7 <= y0 <= 20 + 2
    assert 90 - 2 <= x1 <= 90 + 7
    assert 100 - 2 <= y1 <= 100 + 7
    assert gray.shape == (y1 - y0, x1 - x0)
    assert np.allclose(gray, to_grayscale(img)[y0:y1, x0:x1])


def test_segment_full_frame_bright_image_keeps_everything():
    img = np.full((80, 80, 3), 200, dtype=np.uint8)
    gray, bbox, _ = segment_roi(img)
    assert bbox == (0, 0, 80, 80)
    assert gray.shape == (80, 80)


def test_segment_rejects_degenerate_roi():
    img = np.zeros((64, 64, 3), dtype=np.uint8)
    with pytest.raises(EmptyROI):
        segment_roi(img, SnakeParams(max_iters=1))


def test_auto_segment_returns_gray_subraster():
    img = disk_image(96, 30, level=210)
    gray = auto_segment(img)
    assert gray.ndim == 2
    assert gray.shape[0] <= 96 and gray.shape[1] <= 96


# ---------------------------------------------------------------------------
# remove_boundary_strokes
# ---------------------------------------------------------------------------


def boundary_oracle(skel, min_size):
    """Naive simulation: clear first/last per row and column of the input,
    then keep only flood-fill components of at least min_size pixels."""
    from test_imaging import prune_oracle

    out = skel.copy()
    h, w = skel.shape
    for y in range(h):
        xs = np.nonzero(skel[y])[0]
        if xs.size:
            out[y, xs[0]] = False
            out[y, xs[-1]] = False
    for x in range(w):
        ys = np.nonzero(skel[:, x])[0]
        if ys.size:
            out[ys[0], x] = False
            out[ys[-1], x] = False
    return prune_oracle(out, min_size)


def test_boundary_hollow_square_vanishes():
    img = np.zeros((20, 20), dtype=bool)
    img[3, 3:17] = img[16, 3:17] = True
    img[3:17, 3] = img[3:17, 16] = True
    assert not remove_boundary_strokes(img, 5).any()


def test_boundary_interior_vein_survives():
    img = np.zeros((20, 20), dtype=bool)
    img[3, 3:17] = img[16, 3:17] = True
    img[3:17, 3] = img[3:17, 16] = True
    img[9, 6:14] = True  # interior horizontal vein, detached from the outline
    out = remove_boundary_strokes(img, 5)
    assert out[9, 6:14].sum() >= 6    # vein survives (ends may be clipped)
    assert not out[3, :].any()        # outline rows are gone
    assert not out[:, 3].any()


def test_boundary_empty_input():
    assert not remove_boundary_strokes(np.zeros((8, 8), dtype=bool)).any()


def test_boundary_output_subset_and_scan_positions_cleared():
    rng = np.random.default_rng(9)
    img = rng.random((24, 24)) < 0.3
    out = remove_boundary_strokes(img, 4)
    assert np.all(img | ~out)
    for y in range(24):
        xs = np.nonzero(img[y])[0]
        if xs.size:
            assert not out[y, xs[0]] and not out[y, xs[-1]]
    for x in range(24):
        ys = np.nonzero(img[:, x])[0]
        if ys.size:
            assert not out[ys[0], x] and not out[ys[-1], x]


def test_boundary_matches_simulation_oracle():
    rng = np.random.default_rng(10)
    for _ in range(20):
        img = rng.random((20, 20)) < rng.uniform(0.15, 0.5)
        min_size = int(rng.integers(1, 8))
        assert np.array_equal(remove_boundary_strokes(img, min_size),
                              boundary_oracle(img, min_size))
