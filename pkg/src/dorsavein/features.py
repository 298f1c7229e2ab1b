"""Forking-point detection on the vein skeleton and template handling.

A skeleton pixel is a forking when half the cyclic sum of absolute neighbor
transitions is 3 or more. Templates are made rigid-motion invariant by
translating the minutiae centroid to the origin and rotating the principal
axis of the constellation onto +x.
"""

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import (
    DegenerateTemplate,
    FormatError,
    InvalidParameter,
    NoFeatures,
)
from .validation import check_binary_image

# Neighbor order P1..P8: east first, anti-clockwise.
NEIGHBOR_OFFSETS = ((0, 1), (-1, 1), (-1, 0), (-1, -1),
                    (0, -1), (1, -1), (1, 0), (1, 1))  # (dy, dx)


@dataclass(frozen=True)
class Neighborhood:
    center: bool
    p: tuple  # 8 bits, P1..P8

    def __post_init__(self):
        if len(self.p) != 8:
            raise InvalidParameter("a neighborhood has exactly 8 neighbor bits")


@dataclass(frozen=True)
class Minutia:
    x: float
    y: float
    theta: float  # degrees in [0, 360)


@dataclass(frozen=True)
class Template:
    minutiae: tuple
    ref_point: tuple
    source_id: str = ""

    def __len__(self):
        return len(self.minutiae)


def crossing_number(nb):
    """Half the cyclic sum of absolute neighbor transitions, in {0..4}."""
    bits = [1 if b else 0 for b in nb.p]
    total = sum(abs(bits[i] - bits[(i + 1) % 8]) for i in range(8))
    return total // 2


def neighborhood_at(img, x, y):
    img = check_binary_image(img)
    h, w = img.shape
    bits = []
    for dy, dx in NEIGHBOR_OFFSETS:
        ny, nx = y + dy, x + dx
        bits.append(bool(img[ny, nx]) if 0 <= ny < h and 0 <= nx < w else False)
    return Neighborhood(center=bool(img[y, x]), p=tuple(bits))


def crossing_number_map(skel):
    """Crossing number of every pixel, vectorized."""
    skel = check_binary_image(skel)
    padded = np.pad(skel, 1).astype(np.int8)
    shifted = [padded[1 + dy:padded.shape[0] - 1 + dy,
                      1 + dx:padded.shape[1] - 1 + dx]
               for dy, dx in NEIGHBOR_OFFSETS]
    total = sum(np.abs(shifted[i] - shifted[(i + 1) % 8]) for i in range(8))
    return total // 2


def _merge_close(points, radius):
    """Single-linkage merge of points closer than radius, to cluster centroids.

    Repeats until every pair is separated by more than radius.
    """
    pts = np.asarray(points, dtype=np.float64)
    while len(pts) > 1:
        diff = pts[:, None, :] - pts[None, :, :]
        dist = np.hypot(diff[..., 0], diff[..., 1])
        close = dist <= radius
        if not np.any(close & ~np.eye(len(pts), dtype=bool)):
            break
        label = np.arange(len(pts))
        # Tiny union-find over the proximity graph.
        for i in range(len(pts)):
            for j in np.nonzero(close[i])[0]:
                ri, rj = label[i], label[j]
                if ri != rj:
                    label[label == rj] = ri
        pts = np.array([pts[label == l].mean(axis=0) for l in np.unique(label)])
    return pts


def extract_minutiae(skel, source_id="", merge_radius=3.0):
    """Collect forking points (crossing number >= 3) into a template.

    Adjacent forkings within merge_radius are thinning artifacts of a single
    physical branch and are merged to their centroid. Each minutia's theta is
    its bearing from the forking centroid.
    """
    skel = check_binary_image(skel)
    cn = crossing_number_map(skel)
    ys, xs = np.nonzero(skel & (cn >= 3))
    if ys.size == 0:
        raise NoFeatures("skeleton contains no forking points")
    pts = _merge_close(np.column_stack([xs, ys]).astype(np.float64), merge_radius)
    ref = pts.mean(axis=0)
    minutiae = []
    for x, y in pts:
        theta = math.degrees(math.atan2(y - ref[1], x - ref[0])) % 360.0
        minutiae.append(Minutia(x=float(x), y=float(y), theta=theta))
    minutiae.sort(key=lambda m: (m.y, m.x))
    return Template(minutiae=tuple(minutiae), ref_point=(float(ref[0]), float(ref[1])),
                    source_id=source_id)


def _coords(template):
    return np.array([[m.x, m.y] for m in template.minutiae], dtype=np.float64)


def normalize_template(template):
    """Canonical pose: centroid at the origin, principal axis along +x.

    The 180-degree ambiguity of the axis is resolved by requiring the third
    central moment along +x to be non-negative. Minutia orientations are
    rotated along with the coordinates.
    """
    if len(template) < 2:
        raise InvalidParameter("normalization needs at least 2 minutiae")
    coords = _coords(template)
    centroid = coords.mean(axis=0)
    centered = coords - centroid
    if np.max(np.hypot(centered[:, 0], centered[:, 1])) < 1e-9:
        raise DegenerateTemplate("all minutiae coincide")

    cov = centered.T @ centered / len(centered)
    _, vecs = np.linalg.eigh(cov)
    axis = vecs[:, -1]  # largest-eigenvalue direction
    phi = math.atan2(axis[1], axis[0])
    cos_p, sin_p = math.cos(phi), math.sin(phi)
    rot = np.array([[cos_p, sin_p], [-sin_p, cos_p]])
    aligned = centered @ rot.T
    if np.mean(aligned[:, 0] ** 3) < 0:
        aligned = -aligned
        phi += math.pi

    phi_deg = math.degrees(phi)
    minutiae = []
    for (x, y), m in zip(aligned, template.minutiae):
        minutiae.append(Minutia(x=float(x), y=float(y),
                                theta=(m.theta - phi_deg) % 360.0))
    return Template(minutiae=tuple(minutiae), ref_point=(0.0, 0.0),
                    source_id=template.source_id)


# ---------------------------------------------------------------------------
# VTPL v1 template file format
# ---------------------------------------------------------------------------

def dump_template(template):
    lines = ["VTPL 1", f"source {template.source_id}", f"count {len(template)}"]
    for m in template.minutiae:
        lines.append(f"{m.x:.6f} {m.y:.6f} {m.theta:.6f}")
    return "\n".join(lines) + "\n"


def save_template(template, path):
    with open(path, "w", newline="\n") as fh:
        fh.write(dump_template(template))


def parse_template(text):
    lines = text.split("\n")
    if len(lines) < 3 or lines[0] != "VTPL 1":
        raise FormatError("not a VTPL 1 template")
    if not lines[1].startswith("source "):
        raise FormatError("missing source line")
    source_id = lines[1][len("source "):]
    if not lines[2].startswith("count "):
        raise FormatError("missing count line")
    try:
        count = int(lines[2][len("count "):])
    except ValueError as exc:
        raise FormatError("malformed count line") from exc
    minutiae = []
    for line in lines[3:3 + count]:
        parts = line.split(" ")
        if len(parts) != 3:
            raise FormatError(f"malformed minutia line: {line!r}")
        try:
            x, y, theta = (float(p) for p in parts)
        except ValueError as exc:
            raise FormatError(f"malformed minutia line: {line!r}") from exc
        minutiae.append(Minutia(x=x, y=y, theta=theta))
    if len(minutiae) != count:
        raise FormatError(f"expected {count} minutiae, found {len(minutiae)}")
    coords = np.array([[m.x, m.y] for m in minutiae]) if minutiae else np.zeros((0, 2))
    ref = tuple(coords.mean(axis=0)) if minutiae else (0.0, 0.0)
    return Template(minutiae=tuple(minutiae), ref_point=ref, source_id=source_id)


def load_template(path):
    try:
        with open(path, "r") as fh:
            return parse_template(fh.read())
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc
