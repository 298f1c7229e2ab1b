"""Command-line front end.

Subcommands:
  pipeline  capture (PPM) -> minutiae template (VTPL)
  match     template vs template -> score and accept/reject decision
  synth     seeded synthetic dataset of hand rasters + ground truth
  eval      dataset directory -> FAR/FRR/accuracy sweep CSV

Exit codes: 0 success/accept, 1 reject, 2 input or parameter error,
3 degenerate pipeline data (no features, empty ROI, insufficient data).
"""

import argparse
import os
import re
import sys

import numpy as np

from .evaluation import save_report, score_dataset, sweep
from .exceptions import (
    DorsaVeinError,
    EmptyROI,
    FormatError,
    InsufficientData,
    InvalidParameter,
    NoFeatures,
)
from .features import load_template, save_template
from .matching import MatchParams, match_templates, verify
from .pipeline import PipelineConfig, image_to_template, load_config
from .ppm import read_ppm, write_ppm
from .synth import SynthParams, generate_identity, perturb, save_ground_truth, transform_points

_SAMPLE_RE = re.compile(r"^id(\d+)_s(\d+)\.ppm$")

# Perturbation envelope for synthetic probe samples.
_SYNTH_MAX_ROTATION = 10.0
_SYNTH_MAX_SHIFT = 8.0
# Noise is left off for generated datasets: the centroid/principal-axis
# alignment tolerates rigid motion exactly but not spurious forkings, and
# even sparse salt-and-pepper seeds a few of those per capture.
_SYNTH_NOISE_P = 0.0


def _load_pipeline_config(path):
    if path is None:
        return PipelineConfig()
    return load_config(path)


def cmd_pipeline(args):
    config = _load_pipeline_config(args.config)
    img = read_ppm(args.input)
    out = args.out
    if out is None:
        out = os.path.splitext(args.input)[0] + ".vtpl"
    template = image_to_template(img, config,
                                 source_id=os.path.basename(args.input))
    save_template(template, out)
    print(out)
    return 0


def cmd_match(args):
    probe = load_template(args.probe)
    gallery = load_template(args.gallery)
    params = MatchParams(t1=args.t1, t2=args.t2,
                         decision_threshold=args.threshold)
    result = match_templates(probe, gallery, params)
    accepted = verify(result, params)
    print(f"V={result.score_v:.4f} decision={'accept' if accepted else 'reject'}")
    return 0 if accepted else 1


def _identity_seed(root_seed, index):
    ss = np.random.SeedSequence([int(root_seed), int(index)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def cmd_synth(args):
    if args.identities < 1 or args.samples < 1:
        raise InvalidParameter("--identities and --samples must be >= 1")
    os.makedirs(args.outdir, exist_ok=True)
    for i in range(args.identities):
        params = SynthParams(seed=_identity_seed(args.seed, i))
        img, gt = generate_identity(params)
        pert_rng = np.random.default_rng(
            np.random.SeedSequence([int(args.seed), int(i), 0xA5]))
        for j in range(args.samples):
            if j == 0:
                sample, points = img, np.asarray(gt.branch_points)
            else:
                rotation = float(pert_rng.uniform(-_SYNTH_MAX_ROTATION,
                                                  _SYNTH_MAX_ROTATION))
                shift = pert_rng.uniform(-_SYNTH_MAX_SHIFT, _SYNTH_MAX_SHIFT, 2)
                sample = perturb(img, rotation, (shift[0], shift[1]),
                                 _SYNTH_NOISE_P)
                points = transform_points(gt.branch_points, rotation,
                                          (shift[0], shift[1]),
                                          width=params.width,
                                          height=params.height)
            stem = os.path.join(args.outdir, f"id{i}_s{j}")
            write_ppm(stem + ".ppm", sample)
            save_ground_truth([tuple(p) for p in points], stem + ".gt")
    return 0


def _dataset_samples(directory):
    try:
        names = os.listdir(directory)
    except OSError as exc:
        raise FormatError(f"cannot read dataset directory {directory}: {exc}") from exc
    samples = []
    for name in names:
        m = _SAMPLE_RE.match(name)
        if m:
            samples.append((int(m.group(1)), int(m.group(2)),
                            os.path.join(directory, name)))
    samples.sort()
    return samples


def cmd_eval(args):
    config = _load_pipeline_config(args.config)
    samples = _dataset_samples(args.dataset)
    if not samples:
        raise FormatError(f"no id<i>_s<j>.ppm samples in {args.dataset}")
    grouped = {}
    for ident, _sample, path in samples:
        img = read_ppm(path)
        try:
            template = image_to_template(img, config,
                                         source_id=os.path.basename(path))
        except (NoFeatures, EmptyROI) as exc:
            print(f"warning: skipping {path}: {exc}", file=sys.stderr)
            continue
        grouped.setdefault(f"id{ident}", []).append(template)
    scores = score_dataset(grouped, config.match_params())
    report = sweep(scores)
    out = args.report
    if out is None:
        out = os.path.join(args.dataset, "report.csv")
    save_report(report, out)
    best = next(r for r in report.rows if r[0] == report.best_threshold)
    print(f"best_T={int(best[0])} accuracy={best[4]:.4f} "
          f"far={best[1]:.4f} frr={best[2]:.4f}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="dorsavein",
        description="Hand-vein verification: templating, matching, synthesis and evaluation.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pipeline", help="extract a VTPL template from a PPM capture")
    p.add_argument("input", help="input PPM image")
    p.add_argument("--config", default=None, help="pipeline config file")
    p.add_argument("--out", default=None, help="output VTPL path (default: input stem + .vtpl)")
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("match", help="score one template against another")
    p.add_argument("probe", help="probe VTPL file")
    p.add_argument("gallery", help="gallery VTPL file")
    p.add_argument("--t1", type=float, default=10.0, help="distance threshold, px")
    p.add_argument("--t2", type=float, default=15.0, help="angle threshold, degrees")
    p.add_argument("--threshold", type=float, default=25.0,
                   help="decision threshold on the match percentage")
    p.set_defaults(func=cmd_match)

    p = sub.add_parser("synth", help="generate a synthetic dataset")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--identities", type=int, required=True)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--outdir", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("eval", help="run the verification sweep over a dataset")
    p.add_argument("dataset", help="directory produced by the synth command")
    p.add_argument("--config", default=None, help="pipeline config file")
    p.add_argument("--report", default=None,
                   help="output CSV path (default: <dataset>/report.csv)")
    p.set_defaults(func=cmd_eval)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (NoFeatures, EmptyROI, InsufficientData) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (FormatError, InvalidParameter, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DorsaVeinError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
