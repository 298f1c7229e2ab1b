"""Hand-vein verification: active-contour ROI segmentation, vein-skeleton
minutiae extraction, greedy template matching and FAR/FRR evaluation."""

from .exceptions import (
    DegenerateImage,
    DegenerateTemplate,
    DorsaVeinError,
    EmptyProbe,
    EmptyROI,
    FormatError,
    ImageTooSmall,
    InsufficientData,
    InvalidParameter,
    NoFeatures,
)
from .features import (
    Minutia,
    Neighborhood,
    Template,
    crossing_number,
    extract_minutiae,
    load_template,
    normalize_template,
    save_template,
)
from .imaging import (
    binarize_mean,
    color_gradient,
    dilate_disk,
    gaussian_smooth,
    median_denoise,
    normalize,
    prune_components,
    skeletonize,
    to_grayscale,
)
from .matching import MatchParams, MatchResult, match_templates, verify
from .evaluation import EvalReport, ScoreSet, score_dataset, sweep
from .pipeline import PipelineConfig, image_to_template, load_config, run_pipeline
from .segmentation import (
    EnergyField,
    SnakeParams,
    auto_segment,
    evolve_snake,
    external_energy,
    remove_boundary_strokes,
)
from .synth import GroundTruth, SynthParams, generate_identity, perturb
from .estimators import TemplateVerifier, VeinTemplateExtractor

__version__ = "0.1.0"
