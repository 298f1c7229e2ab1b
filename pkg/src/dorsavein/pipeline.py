"""End-to-end chain from a color capture to a normalized minutiae template,
plus the `key = value` configuration file that carries every tunable."""

from dataclasses import dataclass, fields

from . import imaging, segmentation
from .exceptions import InvalidParameter, NoFeatures
from .features import extract_minutiae, normalize_template
from .matching import MatchParams
from .segmentation import SnakeParams


@dataclass(frozen=True)
class PipelineConfig:
    sigma: float = 1.0
    m0: float = 100.0
    v0: float = 100.0
    binarize_window: int = 9
    median_window: int = 3
    dilation_radius: int = 1
    prune_min_size: int = 30
    eta1: float = 0.1
    eta2: float = 0.01
    step: float = 0.5
    max_iters: int = 2000
    converge_eps: float = 0.01
    balloon: float = 0.45
    contour_points: int = 100
    t1: float = 10.0
    t2: float = 15.0
    decision_threshold: float = 25.0

    def snake_params(self):
        return SnakeParams(eta1=self.eta1, eta2=self.eta2, step=self.step,
                           max_iters=self.max_iters,
                           converge_eps=self.converge_eps, balloon=self.balloon)

    def match_params(self):
        return MatchParams(t1=self.t1, t2=self.t2,
                           decision_threshold=self.decision_threshold)

    def validate(self):
        if self.sigma <= 0:
            raise InvalidParameter("sigma must be > 0")
        if self.v0 < 0:
            raise InvalidParameter("v0 must be >= 0")
        for name in ("binarize_window", "median_window"):
            w = getattr(self, name)
            if w < 3 or w % 2 == 0:
                raise InvalidParameter(f"{name} must be odd and >= 3")
        if self.dilation_radius < 1:
            raise InvalidParameter("dilation_radius must be >= 1")
        if self.prune_min_size < 1:
            raise InvalidParameter("prune_min_size must be >= 1")
        if self.contour_points < 16:
            raise InvalidParameter("contour_points must be >= 16")
        self.snake_params().validate()
        self.match_params().validate()
        return self


def load_config(path):
    """Parse a line-oriented `key = value` file; unknown keys are an error."""
    field_types = {f.name: f.type for f in fields(PipelineConfig)}
    values = {}
    with open(path, "r") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InvalidParameter(f"{path}:{lineno}: expected 'key = value'")
            key, _, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            if key not in field_types:
                raise InvalidParameter(f"{path}:{lineno}: unknown key {key!r}")
            caster = int if field_types[key] in (int, "int") else float
            try:
                values[key] = caster(value)
            except ValueError as exc:
                raise InvalidParameter(f"{path}:{lineno}: bad value for {key!r}") from exc
    return PipelineConfig(**values).validate()


@dataclass(frozen=True)
class PipelineResult:
    template: object        # normalized Template
    roi_bbox: tuple         # (x0, y0, x1, y1) crop in the source frame
    snake_converged: bool
    skeleton: object        # venal-tree BinaryImage, ROI frame


def run_pipeline(img, config=PipelineConfig(), source_id=""):
    """Segment, enhance, binarize, thin, strip the outline and extract the
    normalized template. Raises EmptyROI or NoFeatures on degenerate inputs."""
    config.validate()
    gray, bbox, snake = segmentation.segment_roi(
        img, config.snake_params(), n_points=config.contour_points)
    gray = imaging.gaussian_smooth(gray, config.sigma)
    if gray.var() > 0:
        gray = imaging.normalize(gray, config.m0, config.v0)
    binary = imaging.binarize_mean(gray, config.binarize_window)
    binary = imaging.median_denoise(binary, config.median_window)
    binary = imaging.dilate_disk(binary, config.dilation_radius)
    skel = imaging.skeletonize(binary)
    skel = imaging.prune_components(skel, config.prune_min_size)
    tree = segmentation.remove_boundary_strokes(skel, config.prune_min_size)
    raw = extract_minutiae(tree, source_id=source_id)
    if len(raw) < 2:
        raise NoFeatures("fewer than 2 forking points; cannot normalize the template")
    template = normalize_template(raw)
    return PipelineResult(template=template, roi_bbox=bbox,
                          snake_converged=snake.converged, skeleton=tree)


def image_to_template(img, config=PipelineConfig(), source_id=""):
    return run_pipeline(img, config, source_id).template
