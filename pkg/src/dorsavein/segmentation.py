"""ROI extraction with an outward-growing active contour, plus the
boundary-stroke removal that strips the hand outline from a skeleton.

The contour is initialized as a small circle at the image center and pushed
outward by a balloon pressure term; the edge-seeking external force stops it
at the object boundary. The final crop is the bounding box of the contour.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import EmptyROI, InvalidParameter
from .imaging import color_gradient, prune_components, to_grayscale
from .validation import check_binary_image, check_color_image


@dataclass(frozen=True)
class SnakeParams:
    eta1: float = 0.1          # elasticity weight
    eta2: float = 0.01         # bending weight
    step: float = 0.5          # evolution time step
    max_iters: int = 2000
    converge_eps: float = 0.01  # mean point displacement stop criterion, px
    balloon: float = 0.45       # outward normal pressure coefficient

    def validate(self):
        if self.eta1 < 0 or self.eta2 < 0:
            raise InvalidParameter("eta1 and eta2 must be >= 0")
        if self.step <= 0:
            raise InvalidParameter("step must be > 0")
        if self.max_iters < 1:
            raise InvalidParameter("max_iters must be >= 1")
        if self.converge_eps <= 0:
            raise InvalidParameter("converge_eps must be > 0")


@dataclass(frozen=True)
class EnergyField:
    values: np.ndarray   # external energy, shape (H, W)
    grad_x: np.ndarray
    grad_y: np.ndarray

    @property
    def height(self):
        return self.values.shape[0]

    @property
    def width(self):
        return self.values.shape[1]


@dataclass(frozen=True)
class SnakeResult:
    contour: np.ndarray  # shape (N, 2) of (x, y)
    converged: bool
    iterations: int


def external_energy(img):
    """Edge-seeking energy -|grad I|^2 with its spatial derivatives."""
    img = check_color_image(img)
    mag = color_gradient(img)
    values = -(mag * mag)
    grad_y, grad_x = np.gradient(values)
    return EnergyField(values=values, grad_x=grad_x, grad_y=grad_y)


def circle_contour(cx, cy, radius, n_points=100):
    if n_points < 16:
        raise InvalidParameter("a contour needs at least 16 points")
    t = np.linspace(0.0, 2.0 * np.pi, n_points, endpoint=False)
    return np.column_stack([cx + radius * np.cos(t), cy + radius * np.sin(t)])


def _bilinear(field, xs, ys):
    h, w = field.shape
    xs = np.clip(xs, 0.0, w - 1.0)
    ys = np.clip(ys, 0.0, h - 1.0)
    x0 = np.clip(np.floor(xs).astype(int), 0, w - 2) if w > 1 else np.zeros_like(xs, dtype=int)
    y0 = np.clip(np.floor(ys).astype(int), 0, h - 2) if h > 1 else np.zeros_like(ys, dtype=int)
    fx = xs - x0
    fy = ys - y0
    f00 = field[y0, x0]
    f01 = field[y0, x0 + 1]
    f10 = field[y0 + 1, x0]
    f11 = field[y0 + 1, x0 + 1]
    return (f00 * (1 - fx) * (1 - fy) + f01 * fx * (1 - fy)
            + f10 * (1 - fx) * fy + f11 * fx * fy)


def evolve_snake(field, init, params=SnakeParams()):
    """Relax the force-balance equation by explicit iteration.

    Each step moves every contour point by
    step * (internal + external + balloon * outward_normal) where the internal
    force uses cyclic 2nd/4th central differences and the external force is
    the (magnitude-normalized) negative energy gradient. Convergence is a
    mean displacement below converge_eps; exhaustion of max_iters is reported
    via the `converged` flag rather than an error.
    """
    params.validate()
    pts = np.asarray(init, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 16:
        raise InvalidParameter("contour must be an (N, 2) array with N >= 16")
    pts = pts.copy()
    h, w = field.values.shape

    fmax = max(np.abs(field.grad_x).max(), np.abs(field.grad_y).max())
    scale = 1.0 / fmax if fmax > 0 else 0.0

    for iteration in range(1, params.max_iters + 1):
        d2 = np.roll(pts, -1, axis=0) + np.roll(pts, 1, axis=0) - 2.0 * pts
        d4 = (np.roll(pts, -2, axis=0) - 4.0 * np.roll(pts, -1, axis=0)
              + 6.0 * pts - 4.0 * np.roll(pts, 1, axis=0) + np.roll(pts, 2, axis=0))
        f_int = params.eta1 * d2 - params.eta2 * d4

        # External force -grad(E), normalized so the strongest edge has unit pull.
        gx = _bilinear(field.grad_x, pts[:, 0], pts[:, 1])
        gy = _bilinear(field.grad_y, pts[:, 0], pts[:, 1])
        f_ext = np.column_stack([-gx, -gy]) * scale

        # Outward unit normal, oriented away from the contour centroid.
        tangent = (np.roll(pts, -1, axis=0) - np.roll(pts, 1, axis=0)) * 0.5
        normal = np.column_stack([tangent[:, 1], -tangent[:, 0]])
        norms = np.hypot(normal[:, 0], normal[:, 1])
        norms[norms == 0] = 1.0
        normal /= norms[:, None]
        outward = pts - pts.mean(axis=0)
        flip = np.sign(np.sum(normal * outward, axis=1))
        flip[flip == 0] = 1.0
        normal *= flip[:, None]

        move = params.step * (f_int + f_ext + params.balloon * normal)
        pts += move
        np.clip(pts[:, 0], 0.0, w - 1.0, out=pts[:, 0])
        np.clip(pts[:, 1], 0.0, h - 1.0, out=pts[:, 1])

        if np.mean(np.hypot(move[:, 0], move[:, 1])) < params.converge_eps:
            return SnakeResult(contour=pts, converged=True, iterations=iteration)
    return SnakeResult(contour=pts, converged=False, iterations=params.max_iters)


def segment_roi(img, params=SnakeParams(), n_points=100, margin=5):
    """Full segmentation with provenance: grayscale crop, bbox and snake result.

    The bounding box is (x0, y0, x1, y1) with exclusive upper bounds, in the
    source image frame.
    """
    img = check_color_image(img)
    h, w = img.shape[:2]
    field = external_energy(img)
    radius = min(w, h) / 20.0
    init = circle_contour(w / 2.0, h / 2.0, radius, n_points)
    result = evolve_snake(field, init, params)
    contour = result.contour
    x0 = max(int(np.floor(contour[:, 0].min())) - margin, 0)
    y0 = max(int(np.floor(contour[:, 1].min())) - margin, 0)
    x1 = min(int(np.ceil(contour[:, 0].max())) + margin + 1, w)
    y1 = min(int(np.ceil(contour[:, 1].max())) + margin + 1, h)
    if x1 - x0 < 32 or y1 - y0 < 32:
        raise EmptyROI(f"segmented region {x1 - x0}x{y1 - y0} is below 32x32")
    gray = to_grayscale(img[y0:y1, x0:x1])
    return gray, (x0, y0, x1, y1), result


def auto_segment(img, params=SnakeParams()):
    """Segment the ROI and return it as a grayscale raster."""
    gray, _, _ = segment_roi(img, params)
    return gray


def remove_boundary_strokes(skel, min_size=30):
    """Clear the first/last foreground pixel of every row and column, then
    prune stranded fragments. On a thinned hand image this deletes the outline
    and leaves the venal tree."""
    skel = check_binary_image(skel)
    out = skel.copy()
    h, w = skel.shape

    rows = skel.any(axis=1)
    idx = np.nonzero(rows)[0]
    if idx.size:
        first = skel.argmax(axis=1)
        last = w - 1 - skel[:, ::-1].argmax(axis=1)
        out[idx, first[idx]] = False
        out[idx, last[idx]] = False

    cols = skel.any(axis=0)
    jdx = np.nonzero(cols)[0]
    if jdx.size:
        first = skel.argmax(axis=0)
        last = h - 1 - skel[::-1, :].argmax(axis=0)
        out[first[jdx], jdx] = False
        out[last[jdx], jdx] = False

    return prune_components(out, min_size)
