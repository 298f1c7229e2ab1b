"""Greedy nearest-feature matching with exclusion, and the accept decision.

Probe minutiae are processed in index order; each consumes the closest
not-yet-consumed gallery minutia. A pairing is accepted when both the
distance and the folded angular difference are within their thresholds, and
the match score is the percentage of accepted probe minutiae.
"""

import math
from dataclasses import dataclass

from .exceptions import EmptyProbe, InvalidParameter


@dataclass(frozen=True)
class MatchParams:
    t1: float = 10.0               # distance threshold, px
    t2: float = 15.0               # angle threshold, degrees
    decision_threshold: float = 25.0  # percent of V

    def validate(self):
        if self.t1 < 0 or self.t2 < 0:
            raise InvalidParameter("t1 and t2 must be >= 0")
        if not 0.0 <= self.decision_threshold <= 100.0:
            raise InvalidParameter("decision_threshold must be in [0, 100]")


@dataclass(frozen=True)
class MatchResult:
    pairs: tuple      # (probe_index, gallery_index or None) per probe minutia
    sd: tuple         # distances, px (inf when the gallery was exhausted)
    dd: tuple         # angular differences, degrees in [0, 180] (inf sentinel)
    accepted: tuple   # acceptance bits
    score_v: float    # percent


def angular_difference(theta, phi):
    """|theta - phi| wrapped to [0, 180] degrees."""
    d = abs(theta - phi) % 360.0
    return 360.0 - d if d > 180.0 else d


def match_templates(probe, gallery, params=MatchParams()):
    params.validate()
    n = len(probe.minutiae)
    if n == 0:
        raise EmptyProbe("probe template has no minutiae")

    available = list(range(len(gallery.minutiae)))
    pairs, sds, dds, accepted = [], [], [], []
    for i, pm in enumerate(probe.minutiae):
        if not available:
            pairs.append((i, None))
            sds.append(math.inf)
            dds.append(math.inf)
            accepted.append(0)
            continue
        best_j = None
        best_d = math.inf
        for j in available:
            gm = gallery.minutiae[j]
            d = math.hypot(pm.x - gm.x, pm.y - gm.y)
            if d < best_d:  # ties keep the lowest gallery index
                best_d = d
                best_j = j
        available.remove(best_j)
        dd = angular_difference(pm.theta, gallery.minutiae[best_j].theta)
        pairs.append((i, best_j))
        sds.append(best_d)
        dds.append(dd)
        accepted.append(1 if best_d <= params.t1 and dd <= params.t2 else 0)

    score = 100.0 * sum(accepted) / n
    return MatchResult(pairs=tuple(pairs), sd=tuple(sds), dd=tuple(dds),
                       accepted=tuple(accepted), score_v=score)


def verify(result, params=MatchParams()):
    """Accept iff the match score is strictly above the decision threshold."""
    params.validate()
    return result.score_v > params.decision_threshold
