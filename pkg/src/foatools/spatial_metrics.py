"""Spatial agreement metrics between sphere energy maps.

Two saliency-style scores compare a generated sound field against a
reference: an area-weighted Pearson correlation of the two maps, and a
ROC AUC where the reference map's top-mass cells act as fixations and the
candidate map's values act as scores. Both are evaluated per temporal
window at three granularities (whole clip, 1000 ms, 200 ms) and averaged
over the usable windows of each granularity.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    GridMismatchError,
    IncompatibleClipsError,
    NoUsableWindowsError,
    UndefinedMetricError,
)
from .foa import ENERGY_MODE_POWER, EnergyMap, FoaClip, SphereGrid, energy_map

GRANULARITIES = ("all", "1fps", "5fps")

DEFAULT_FIXATION_PERCENTILE = 95.0


@dataclass(frozen=True)
class SpatialReport:
    """Averaged correlation/AUC scores per temporal granularity."""

    cc_all: float
    cc_1fps: float
    cc_5fps: float
    auc_all: float
    auc_1fps: float
    auc_5fps: float
    windows_used: dict = field(default_factory=dict)
    windows_skipped: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "cc_all": self.cc_all,
            "cc_1fps": self.cc_1fps,
            "cc_5fps": self.cc_5fps,
            "auc_all": self.auc_all,
            "auc_1fps": self.auc_1fps,
            "auc_5fps": self.auc_5fps,
            "windows_used": dict(self.windows_used),
            "windows_skipped": dict(self.windows_skipped),
        }


def _check_grids(gen: EnergyMap, gt: EnergyMap) -> SphereGrid:
    if gen.grid != gt.grid:
        raise GridMismatchError(f"maps use different grids: {gen.grid} vs {gt.grid}")
    return gen.grid


def correlation(gen: EnergyMap, gt: EnergyMap) -> float:
    """Area-weighted Pearson correlation of two maps on the same grid.

    Raises UndefinedMetricError when either map is constant, so callers can
    decide whether to skip the window.
    """
    grid = _check_grids(gen, gt)
    x, y, w = gen.values, gt.values, grid.weights
    if np.ptp(x) == 0.0 or np.ptp(y) == 0.0:
        raise UndefinedMetricError("correlation undefined for a constant map")
    dx = x - w @ x
    dy = y - w @ y
    cov = w @ (dx * dy)
    var_x = w @ (dx * dx)
    var_y = w @ (dy * dy)
    if var_x <= 0.0 or var_y <= 0.0:
        raise UndefinedMetricError("correlation undefined for zero weighted variance")
    return float(min(1.0, max(-1.0, cov / np.sqrt(var_x * var_y))))


def _weighted_percentile(values: np.ndarray, weights: np.ndarray, q: float) -> float:
    """Smallest value whose weighted CDF reaches q/100."""
    order = np.argsort(values, kind="stable")
    csum = np.cumsum(weights[order])
    csum /= csum[-1]
    idx = min(int(np.searchsorted(csum, q / 100.0, side="left")), values.size - 1)
    return float(values[order[idx]])


def auc(
    gen: EnergyMap,
    gt: EnergyMap,
    fixation_percentile: float = DEFAULT_FIXATION_PERCENTILE,
) -> float:
    """ROC AUC of ``gen`` values against fixations from the top of ``gt``.

    Cells with gt value at or above the weighted ``fixation_percentile`` of
    the gt map are positives; every cell contributes its area weight to the
    true/false positive rates, and gen-score ties are split 50/50 (the
    trapezoidal segment over each tie group).
    """
    grid = _check_grids(gen, gt)
    if not 0.0 < fixation_percentile < 100.0:
        raise ValueError("fixation_percentile must lie in (0, 100)")
    w = grid.weights
    if np.ptp(gt.values) == 0.0:
        raise UndefinedMetricError("fixations undefined for a constant reference map")
    threshold = _weighted_percentile(gt.values, w, fixation_percentile)
    positive = gt.values >= threshold
    pos_w = np.where(positive, w, 0.0)
    neg_w = np.where(positive, 0.0, w)
    total_pos = pos_w.sum()
    total_neg = neg_w.sum()
    if total_pos <= 0.0 or total_neg <= 0.0:
        raise UndefinedMetricError("reference map yields no usable fixation split")

    order = np.argsort(-gen.values, kind="stable")
    scores = gen.values[order]
    # Tie groups share one ROC segment; group ends are where the score changes.
    group_end = np.append(np.nonzero(np.diff(scores))[0], scores.size - 1)
    tp = np.cumsum(pos_w[order])[group_end]
    fp = np.cumsum(neg_w[order])[group_end]
    tp_prev = np.concatenate([[0.0], tp[:-1]])
    fp_prev = np.concatenate([[0.0], fp[:-1]])
    area = np.sum((fp - fp_prev) * (tp + tp_prev) / 2.0)
    return float(min(1.0, max(0.0, area / (total_pos * total_neg))))


def _window_lengths(n_samples: int, sample_rate: int) -> dict:
    return {
        "all": n_samples,
        "1fps": sample_rate,
        "5fps": max(1, sample_rate // 5),
    }


def evaluate_windows(
    gen: FoaClip,
    gt: FoaClip,
    grid: SphereGrid,
    fixation_percentile: float = DEFAULT_FIXATION_PERCENTILE,
) -> SpatialReport:
    """Windowed correlation/AUC between two clips at all three granularities.

    Power-mode energy maps are computed per window (whole clip, 1000 ms and
    200 ms, trailing partial windows dropped) and each granularity reports
    the mean metric over its usable windows. Windows where either metric is
    undefined (a silent or otherwise constant map) are counted in
    ``windows_skipped``; a granularity with no usable window raises
    NoUsableWindowsError.
    """
    if gen.n_samples != gt.n_samples or gen.sample_rate != gt.sample_rate:
        raise IncompatibleClipsError(
            f"clips differ: {gen.n_samples}@{gen.sample_rate} vs "
            f"{gt.n_samples}@{gt.sample_rate}"
        )

    cc_means, auc_means, used, skipped = {}, {}, {}, {}
    for name, length in _window_lengths(gen.n_samples, gen.sample_rate).items():
        n_windows = gen.n_samples // length
        cc_vals, auc_vals = [], []
        n_skipped = 0
        for k in range(n_windows):
            window = (k * length, (k + 1) * length)
            gen_map = energy_map(gen, grid, window, ENERGY_MODE_POWER)
            gt_map = energy_map(gt, grid, window, ENERGY_MODE_POWER)
            try:
                cc = correlation(gen_map, gt_map)
                roc = auc(gen_map, gt_map, fixation_percentile)
            except UndefinedMetricError:
                n_skipped += 1
                continue
            cc_vals.append(cc)
            auc_vals.append(roc)
        if not cc_vals:
            raise NoUsableWindowsError(
                f"no usable {name} window out of {n_windows}"
            )
        cc_means[name] = float(np.mean(cc_vals))
        auc_means[name] = float(np.mean(auc_vals))
        used[name] = len(cc_vals)
        skipped[name] = n_skipped

    return SpatialReport(
        cc_all=cc_means["all"],
        cc_1fps=cc_means["1fps"],
        cc_5fps=cc_means["5fps"],
        auc_all=auc_means["all"],
        auc_1fps=auc_means["1fps"],
        auc_5fps=auc_means["5fps"],
        windows_used=used,
        windows_skipped=skipped,
    )
