"""Genuine/impostor scoring over a template gallery and the threshold sweep
producing FAR, FRR, GAR and accuracy per operating point."""

from dataclasses import dataclass

from .exceptions import InsufficientData
from .matching import match_templates


@dataclass(frozen=True)
class ScoreSet:
    genuine: tuple   # V-percent scores for same-identity pairs
    impostor: tuple  # V-percent scores for cross-identity pairs


@dataclass(frozen=True)
class EvalReport:
    rows: tuple           # (threshold, far, frr, gar, accuracy) per grid point
    best_threshold: float
    best_accuracy: float


def score_dataset(templates_by_identity, params):
    """First sample of each identity enrolls; the rest probe.

    Genuine scores pair each probe with its own enrolled sample; impostor
    scores pair each probe with every other identity's enrolled sample.
    """
    identities = sorted(templates_by_identity)
    if len(identities) < 2:
        raise InsufficientData("need at least 2 identities")
    if not any(len(templates_by_identity[i]) >= 2 for i in identities):
        raise InsufficientData("need at least one identity with 2+ samples")

    enrolled = {i: templates_by_identity[i][0] for i in identities}
    genuine, impostor = [], []
    for ident in identities:
        for probe in templates_by_identity[ident][1:]:
            genuine.append(match_templates(probe, enrolled[ident], params).score_v)
            for other in identities:
                if other != ident:
                    impostor.append(match_templates(probe, enrolled[other], params).score_v)
    return ScoreSet(genuine=tuple(genuine), impostor=tuple(impostor))


def sweep(scores, t_grid=None):
    """FAR/FRR/GAR/accuracy per threshold; accept means score > T.

    accuracy = 100 - (FAR + FRR) / 2; the best row maximizes accuracy with
    ties resolved toward the lowest threshold.
    """
    if not scores.genuine or not scores.impostor:
        raise InsufficientData("score set needs both genuine and impostor scores")
    if t_grid is None:
        t_grid = range(0, 101)
    n_gen = len(scores.genuine)
    n_imp = len(scores.impostor)
    rows = []
    best = None
    for t in t_grid:
        far = 100.0 * sum(1 for s in scores.impostor if s > t) / n_imp
        frr = 100.0 * sum(1 for s in scores.genuine if s <= t) / n_gen
        gar = 100.0 - frr
        accuracy = 100.0 - (far + frr) / 2.0
        rows.append((float(t), far, frr, gar, accuracy))
        if best is None or accuracy > best[4]:
            best = rows[-1]
    return EvalReport(rows=tuple(rows), best_threshold=best[0], best_accuracy=best[4])


def report_csv(report):
    lines = ["threshold,far,frr,gar,accuracy"]
    for t, far, frr, gar, acc in report.rows:
        lines.append(f"{t:.4f},{far:.4f},{frr:.4f},{gar:.4f},{acc:.4f}")
    return "\n".join(lines) + "\n"


def save_report(report, path):
    with open(path, "w", newline="\n") as fh:
        fh.write(report_csv(report))
