"""Trade-off metrics: individual fairness, group fairness, utility loss and
selection rates for one theta setting.

Individual fairness is measured as the cross-group strict-inversion rate: the
fraction of cross-group pairs with distinct raw scores whose strict raw-score
order is reversed by the transform. Raw-score ties across groups are excluded
from the pair universe and fair-score ties never count as inversions.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import numpy as np

from .empirical import empirical_from_samples
from .errors import ValidationError
from .interpolation import FairScores, ThetaPolicy
from .population import GroupKey, ScoredPopulation
from .transport1d import w2_distance


@dataclass(frozen=True)
class SelectionRule:
    """Either a score threshold (selected iff fair >= threshold) or a top-k cut."""

    threshold: float | None = None
    top_k: int | None = None

    def __post_init__(self):
        if (self.threshold is None) == (self.top_k is None):
            raise ValidationError("specify exactly one of threshold or top_k")


@dataclass(frozen=True)
class SelectionOutcome:
    rates: dict[GroupKey, float]
    ratio: float


@dataclass(frozen=True)
class FairnessReport:
    """Metric bundle for one theta setting.

    Group-level and rank-based fields are ``None`` when undefined (single
    group, or multi-dimensional scores for the 1-D-only metrics).
    """

    individual_fairness_error: float | None
    group_fairness_w2: float | None
    group_fairness_ks: float | None
    utility_loss_mean_abs: float
    utility_loss_w2: float
    selection: SelectionOutcome | None
    theta: ThetaPolicy

    def to_dict(self) -> dict:
        return {
            "individual_fairness_error": self.individual_fairness_error,
            "group_fairness_w2": self.group_fairness_w2,
            "group_fairness_ks": self.group_fairness_ks,
            "utility_loss_mean_abs": self.utility_loss_mean_abs,
            "utility_loss_w2": self.utility_loss_w2,
            "selection": None
            if self.selection is None
            else {
                "rates": {str(k): v for k, v in sorted(self.selection.rates.items())},
                "ratio": self.selection.ratio,
            },
            "theta": self.theta.to_dict(),
        }


class _Fenwick:
    """Binary indexed tree over compressed value indices."""

    def __init__(self, size: int):
        self.size = size
        self.tree = [0] * (size + 1)

    def add(self, i: int) -> None:
        i += 1
        while i <= self.size:
            self.tree[i] += 1
            i += i & (-i)

    def prefix(self, i: int) -> int:
        """Count of inserted elements with compressed index <= i."""
        i += 1
        total = 0
        while i > 0:
            total += self.tree[i]
            i -= i & (-i)
        return total


def _count_inversions(raw: np.ndarray, fair: np.ndarray) -> int:
    """Pairs with raw_i < raw_j and fair_i > fair_j, raw ties excluded, in O(n log n)."""
    order = np.lexsort((fair, raw))
    raw_sorted = raw[order]
    fair_sorted = fair[order]
    comp = {v: i for i, v in enumerate(np.unique(fair))}
    tree = _Fenwick(len(comp))
    inserted = 0
    inversions = 0
    i = 0
    n = raw.size
    while i < n:
        j = i
        while j < n and raw_sorted[j] == raw_sorted[i]:
            j += 1
        for k in range(i, j):  # count against strictly smaller raw only
            inversions += inserted - tree.prefix(comp[fair_sorted[k]])
        for k in range(i, j):
            tree.add(comp[fair_sorted[k]])
        inserted += j - i
        i = j
    return inversions


def _distinct_pairs(raw: np.ndarray) -> int:
    """Unordered pairs with distinct raw values."""
    n = raw.size
    total = n * (n - 1) // 2
    _, counts = np.unique(raw, return_counts=True)
    ties = int(np.sum(counts * (counts - 1) // 2))
    return total - ties


def individual_fairness_error(pop: ScoredPopulation, fair: FairScores) -> float:
    """Cross-group strict-inversion rate, computed by inversion counting."""
    if pop.dimension != 1:
        raise ValidationError("individual_fairness_error is defined for 1-D scores")
    if len(fair) != len(pop):
        raise ValidationError("fair scores are not aligned with the population")
    raw = pop.scores_array()
    fv = fair.values

    cross_pairs = _distinct_pairs(raw)
    cross_inv = _count_inversions(raw, fv)
    for idx in pop.groups.values():
        idx = np.asarray(idx, dtype=int)
        cross_pairs -= _distinct_pairs(raw[idx])
        cross_inv -= _count_inversions(raw[idx], fv[idx])
    if cross_pairs == 0:
        return 0.0
    return cross_inv / cross_pairs


def individual_fairness_error_naive(pop: ScoredPopulation, fair: FairScores) -> float:
    """O(n^2) enumeration of the same quantity; reference for the fast path."""
    if len(fair) != len(pop):
        raise ValidationError("fair scores are not aligned with the population")
    raw = pop.scores_array()
    fv = fair.values
    group_of = np.empty(len(pop), dtype=int)
    for gi, idx in enumerate(pop.groups.values()):
        group_of[np.asarray(idx, dtype=int)] = gi

    pairs = 0
    inversions = 0
    for i, j in combinations(range(len(pop)), 2):
        if group_of[i] == group_of[j] or raw[i] == raw[j]:
            continue
        pairs += 1
        lo, hi = (i, j) if raw[i] < raw[j] else (j, i)
        if fv[lo] > fv[hi]:
            inversions += 1
    return inversions / pairs if pairs else 0.0


def _ks_statistic(a: np.ndarray, b: np.ndarray) -> float:
    a = np.sort(a)
    b = np.sort(b)
    xs = np.concatenate([a, b])
    fa = np.searchsorted(a, xs, side="right") / a.size
    fb = np.searchsorted(b, xs, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))


def group_fairness_error(
    pop: ScoredPopulation, fair: FairScores, m: int
) -> tuple[float, float]:
    """Max pairwise grid-W2 and max pairwise KS between fair group distributions."""
    if pop.dimension != 1:
        raise ValidationError("group_fairness_error is defined for 1-D scores")
    if len(pop.groups) < 2:
        raise ValidationError("group fairness needs at least two groups")
    fv = fair.values
    samples = {k: fv[np.asarray(idx, dtype=int)] for k, idx in pop.groups.items()}
    dists = {k: empirical_from_samples(v) for k, v in samples.items()}
    w2 = 0.0
    ks = 0.0
    for a, b in combinations(pop.group_keys(), 2):
        w2 = max(w2, w2_distance(dists[a], dists[b], m))
        ks = max(ks, _ks_statistic(samples[a], samples[b]))
    return w2, ks


def utility_loss(pop: ScoredPopulation, fair: FairScores) -> tuple[float, float]:
    """Mean absolute displacement and realized transport cost of the applied map."""
    if len(fair) != len(pop):
        raise ValidationError("fair scores are not aligned with the population")
    raw = pop.scores_array()
    disp = fair.values - raw
    if disp.ndim == 1:
        norms = np.abs(disp)
    else:
        norms = np.sqrt(np.sum(disp**2, axis=1))
    return float(np.mean(norms)), float(np.sqrt(np.mean(norms**2)))


def selection_rates(
    pop: ScoredPopulation, fair: FairScores, rule: SelectionRule
) -> SelectionOutcome:
    """Per-group selection rates under a threshold or deterministic top-k rule."""
    if pop.dimension != 1:
        raise ValidationError("selection_rates is defined for 1-D scores")
    n = len(pop)
    fv = fair.values
    raw = pop.scores_array()
    selected = np.zeros(n, dtype=bool)
    if rule.threshold is not None:
        selected = fv >= rule.threshold
    else:
        k = rule.top_k
        if not 1 <= k <= n:
            raise ValidationError(f"top_k {k} out of range [1, {n}]")
        # boundary ties broken by (raw score, then id) descending
        order = sorted(range(n), key=lambda i: pop.records[i].id, reverse=True)
        order.sort(key=lambda i: raw[i], reverse=True)
        order.sort(key=lambda i: fv[i], reverse=True)
        selected[order[:k]] = True

    rates = {}
    for key, idx in pop.groups.items():
        idx = np.asarray(idx, dtype=int)
        rates[key] = float(np.count_nonzero(selected[idx]) / idx.size)
    max_rate = max(rates.values())
    ratio = 1.0 if max_rate == 0.0 else min(rates.values()) / max_rate
    return SelectionOutcome(rates=rates, ratio=ratio)


def build_report(
    pop: ScoredPopulation,
    fair: FairScores,
    m: int = 1000,
    rule: SelectionRule | None = None,
) -> FairnessReport:
    """Assemble the full metric bundle; 1-D-only metrics are None in d >= 2."""
    mean_abs, w2_loss = utility_loss(pop, fair)
    ife = gw2 = gks = None
    selection = None
    if pop.dimension == 1:
        ife = individual_fairness_error(pop, fair)
        if len(pop.groups) >= 2:
            gw2, gks = group_fairness_error(pop, fair, m)
        if rule is not None:
            selection = selection_rates(pop, fair, rule)
    return FairnessReport(
        individual_fairness_error=ife,
        group_fairness_w2=gw2,
        group_fairness_ks=gks,
        utility_loss_mean_abs=mean_abs,
        utility_loss_w2=w2_loss,
        selection=selection,
        theta=fair.theta_used,
    )
