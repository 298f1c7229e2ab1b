"""Per-pixel preprocessing kernels: grayscale conversion, color gradient,
Gaussian enhancement, mean/variance normalization, local-mean binarization,
median denoising, disk dilation, thinning and small-component pruning.

All window operations replicate the image border. Binarization marks pixels
*darker* than their local mean as foreground (veins are dark in absorption
captures).
"""

import math

import numpy as np
from scipy import ndimage

from .exceptions import DegenerateImage, InvalidParameter
from .validation import (
    check_binary_image,
    check_color_image,
    check_gray_image,
    check_odd_window,
    check_positive,
)

# ITU-R 601 luminance weights.
GRAY_WEIGHTS = (0.2989, 0.5870, 0.1140)

_SOBEL_X = np.array([[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]], dtype=np.float64)
_SOBEL_Y = _SOBEL_X.T


def to_grayscale(img):
    """Convert an RGB raster to luminance."""
    img = check_color_image(img)
    chans = img.astype(np.float64)
    return (GRAY_WEIGHTS[0] * chans[..., 0]
            + GRAY_WEIGHTS[1] * chans[..., 1]
            + GRAY_WEIGHTS[2] * chans[..., 2])


def color_gradient(img):
    """Per-pixel gradient magnitude, the maximum over the R, G and B bands.

    Each band uses Sobel 3x3 kernels with replicated edges.
    """
    img = check_color_image(img)
    mags = []
    for c in range(3):
        band = img[..., c].astype(np.float64)
        gx = ndimage.convolve(band, _SOBEL_X, mode="nearest")
        gy = ndimage.convolve(band, _SOBEL_Y, mode="nearest")
        mags.append(np.hypot(gx, gy))
    return np.maximum(np.maximum(mags[0], mags[1]), mags[2])


def gaussian_kernel(sigma):
    """Discrete normalized Gaussian of radius ceil(3*sigma)."""
    sigma = check_positive(sigma, "sigma")
    radius = math.ceil(3.0 * sigma)
    x = np.arange(-radius, radius + 1, dtype=np.float64)
    k = np.exp(-0.5 * (x / sigma) ** 2)
    return k / k.sum()


def gaussian_smooth(img, sigma):
    img = check_gray_image(img)
    k = gaussian_kernel(sigma)
    out = ndimage.correlate1d(img, k, axis=0, mode="nearest")
    return ndimage.correlate1d(out, k, axis=1, mode="nearest")


def normalize(img, m0, v0):
    """Map the raster to a target mean m0 and variance v0.

    out = m0 + sqrt(v0 * (in - mean)^2 / var) above the mean and the
    mirrored value below it, which collapses to an affine rescale.
    """
    img = check_gray_image(img)
    if not np.isfinite(m0):
        raise InvalidParameter("m0 must be finite")
    if not np.isfinite(v0) or v0 < 0:
        raise InvalidParameter(f"v0 must be >= 0, got {v0!r}")
    mean = img.mean()
    var = img.var()
    if var == 0.0:
        if v0 == 0.0:
            return np.full_like(img, float(m0))
        raise DegenerateImage("constant image cannot reach a nonzero target variance")
    return m0 + math.sqrt(v0 / var) * (img - mean)


def binarize_mean(img, window=9):
    """Foreground = strictly darker than the local window mean."""
    img = check_gray_image(img)
    window = check_odd_window(window)
    local_mean = ndimage.uniform_filter(img, size=window, mode="nearest")
    # Dead zone well below one gray level: flat regions are constant only up
    # to float rounding, and a bare `<` would turn that jitter into speckle.
    return local_mean - img > 1e-6


def median_denoise(img, window=3):
    """Binary median filter: each bit becomes the majority of its window."""
    img = check_binary_image(img)
    window = check_odd_window(window)
    frac = ndimage.uniform_filter(img.astype(np.float64), size=window, mode="nearest")
    return frac > 0.5


def disk_offsets(radius):
    if not isinstance(radius, (int, np.integer)) or radius < 1:
        raise InvalidParameter(f"radius must be an integer >= 1, got {radius!r}")
    r = int(radius)
    dy, dx = np.mgrid[-r:r + 1, -r:r + 1]
    return dy * dy + dx * dx <= r * r


def dilate_disk(img, radius=2):
    """Morphological dilation with the discrete disk dx^2 + dy^2 <= radius^2."""
    img = check_binary_image(img)
    return ndimage.binary_dilation(img, structure=disk_offsets(radius))


def prune_components(img, min_size=30):
    """Drop 8-connected components with fewer than min_size foreground pixels."""
    img = check_binary_image(img)
    if not isinstance(min_size, (int, np.integer)) or min_size < 1:
        raise InvalidParameter(f"min_size must be an integer >= 1, got {min_size!r}")
    if min_size == 1 or not img.any():
        return img.copy()
    labels, count = ndimage.label(img, structure=np.ones((3, 3), dtype=int))
    sizes = np.bincount(labels.ravel())
    keep = sizes >= min_size
    keep[0] = False
    return keep[labels]


# ---------------------------------------------------------------------------
# Thinning
# ---------------------------------------------------------------------------

# 8-neighbor ring in the order N, NE, E, SE, S, SW, W, NW as (dy, dx).
_RING = ((-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1), (0, -1), (-1, -1))


def _ring_connectivity_table():
    """For every 8-bit neighbor mask: is the foreground ring 8-connected?

    Bit i of the mask corresponds to _RING[i]. The empty mask maps to False.
    """
    adj = np.zeros((8, 8), dtype=bool)
    for i, (ay, ax) in enumerate(_RING):
        for j, (by, bx) in enumerate(_RING):
            if i != j and max(abs(ay - by), abs(ax - bx)) <= 1:
                adj[i, j] = True
    table = np.zeros(256, dtype=bool)
    for mask in range(1, 256):
        members = [i for i in range(8) if mask >> i & 1]
        seen = {members[0]}
        stack = [members[0]]
        while stack:
            u = stack.pop()
            for v in members:
                if v not in seen and adj[u, v]:
                    seen.add(v)
                    stack.append(v)
        table[mask] = len(seen) == len(members)
    return table


_RING_CONNECTED = _ring_connectivity_table()


def _neighbor_mask(padded, y, x):
    mask = 0
    for i, (dy, dx) in enumerate(_RING):
        if padded[y + dy, x + dx]:
            mask |= 1 << i
    return mask


def _removal_is_safe(padded, y, x):
    """Deleting (y, x) neither vanishes nor splits an 8-component."""
    mask = _neighbor_mask(padded, y, x)
    return mask != 0 and _RING_CONNECTED[mask]


def _zhang_suen_flags(padded, step):
    """Vectorized Zhang-Suen deletion conditions on the padded raster."""
    c = padded[1:-1, 1:-1]
    n = padded[:-2, 1:-1]
    s = padded[2:, 1:-1]
    e = padded[1:-1, 2:]
    w = padded[1:-1, :-2]
    ne = padded[:-2, 2:]
    nw = padded[:-2, :-2]
    se = padded[2:, 2:]
    sw = padded[2:, :-2]
    seq = (n, ne, e, se, s, sw, w, nw)
    b = sum(a.astype(np.uint8) for a in seq)
    a01 = sum((~seq[i] & seq[(i + 1) % 8]).astype(np.uint8) for i in range(8))
    flags = c & (b >= 2) & (b <= 6) & (a01 == 1)
    if step == 0:
        flags &= ~(n & e & s) & ~(e & s & w)
    else:
        flags &= ~(n & e & w) & ~(n & s & w)
    return flags


def _delete_flagged(padded, flags):
    """Apply a flagged subiteration, skipping topology-breaking deletions.

    Deletions are applied in raster order against the live raster, so a pixel
    whose removal would disconnect or erase its component is kept.
    """
    removed = 0
    ys, xs = np.nonzero(flags)
    for y, x in zip(ys.tolist(), xs.tolist()):
        py, px = y + 1, x + 1
        if _removal_is_safe(padded, py, px):
            padded[py, px] = False
            removed += 1
    return removed


def _global_component_count(padded):
    _, count = ndimage.label(padded, structure=np.ones((3, 3), dtype=int))
    return count


def _break_square_block(padded, y, x):
    """Remove one pixel so the 2x2 block with top-left (y, x) can dissolve.

    Tries, in order: a block pixel whose removal is locally safe; an endpoint
    hanging off the block (freeing a blocked diagonal); a block pixel whose
    removal provably keeps the global component count. Returns True on any
    deletion.
    """
    cells = ((y, x), (y, x + 1), (y + 1, x), (y + 1, x + 1))
    for cy, cx in cells:
        if _removal_is_safe(padded, cy, cx):
            padded[cy, cx] = False
            return True
    for cy, cx in cells:
        for dy, dx in _RING:
            ny, nx = cy + dy, cx + dx
            if padded[ny, nx] and bin(_neighbor_mask(padded, ny, nx)).count("1") == 1:
                padded[ny, nx] = False
                return True
    before = _global_component_count(padded)
    for cy, cx in cells:
        padded[cy, cx] = False
        if _global_component_count(padded) == before:
            return True
        padded[cy, cx] = True
    return False


def _dissolve_square_blocks(padded):
    removed = 0
    while True:
        blocks = (padded[:-1, :-1] & padded[1:, :-1]
                  & padded[:-1, 1:] & padded[1:, 1:])
        ys, xs = np.nonzero(blocks)
        if ys.size == 0:
            return removed
        if not _break_square_block(padded, int(ys[0]), int(xs[0])):
            return removed
        removed += 1


def skeletonize(img):
    """Thin foreground strokes to 1-pixel-wide curves.

    Two-subiteration Zhang-Suen peeling, guarded so that no deletion ever
    changes the 8-connected component count, followed by a cleanup that
    dissolves any surviving fully-set 2x2 block. Runs to a fixpoint, so the
    operation is idempotent.
    """
    img = check_binary_image(img)
    padded = np.pad(img, 1)
    while True:
        removed = 0
        for step in (0, 1):
            flags = _zhang_suen_flags(padded, step)
            if flags.any():
                removed += _delete_flagged(padded, flags)
        if removed == 0:
            if _dissolve_square_blocks(padded) == 0:
                break
    return padded[1:-1, 1:-1]
