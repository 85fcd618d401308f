"""Corpus curation filters for raw ambisonic clips and external scores.

Clips are screened by per-second amplitude (all four channels must stay
above a floor), segmented into 1-second validity masks by the RMS of the
omnidirectional channel, merged into nonoverlapping 5-second windows that
keep at least 4 valid seconds, localized by the argmax of their full-clip
energy map, and finally thinned by a relevance-score cut at one population
standard deviation below the mean.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NoEnergyError
from .foa import Direction, FoaClip, SphereGrid, energy_map

DEFAULT_AMPLITUDE_FLOOR = 1e-20

WINDOW_SECONDS = 5
MIN_VALID_SECONDS = 4  # strictly more than 3 of 5 one-second segments


@dataclass(frozen=True)
class ClipWindow:
    """A five-second window, in whole seconds from the clip start."""

    start_second: int
    end_second: int

    def __post_init__(self) -> None:
        if self.end_second - self.start_second != WINDOW_SECONDS:
            raise ValueError("clip windows must span exactly 5 seconds")
        if self.start_second < 0:
            raise ValueError("window start must be nonnegative")


def _whole_seconds(clip: FoaClip) -> int:
    return clip.n_samples // clip.sample_rate


def amplitude_gate(clip: FoaClip, threshold: float = DEFAULT_AMPLITUDE_FLOOR) -> bool:
    """True iff every channel keeps a mean |amplitude| >= threshold each second."""
    seconds = _whole_seconds(clip)
    if seconds < 1:
        raise ValueError("amplitude gate needs at least one full second of audio")
    trimmed = np.abs(clip.samples[:, : seconds * clip.sample_rate])
    per_second = trimmed.reshape(4, seconds, clip.sample_rate).mean(axis=2)
    return bool(np.all(per_second >= threshold))


def segment_mask(clip: FoaClip, rms_threshold: float) -> np.ndarray:
    """Per-second validity: RMS of the W channel at or above the threshold."""
    if rms_threshold < 0.0:
        raise ValueError("rms_threshold must be nonnegative")
    seconds = _whole_seconds(clip)
    w = clip.samples[0, : seconds * clip.sample_rate]
    rms = np.sqrt((w.reshape(seconds, clip.sample_rate) ** 2).mean(axis=1))
    return rms >= rms_threshold


def select_windows(mask) -> list:
    """Nonoverlapping 5 s windows (stride 5 from second 0) with >= 4 valid seconds."""
    valid = np.asarray(mask, dtype=bool)
    if valid.ndim != 1 or valid.size < WINDOW_SECONDS:
        raise ValueError(f"mask must cover at least {WINDOW_SECONDS} seconds")
    windows = []
    for start in range(0, valid.size - WINDOW_SECONDS + 1, WINDOW_SECONDS):
        if int(valid[start : start + WINDOW_SECONDS].sum()) >= MIN_VALID_SECONDS:
            windows.append(ClipWindow(start, start + WINDOW_SECONDS))
    return windows


def fov_center(clip: FoaClip, grid: SphereGrid) -> Direction:
    """Direction of the strongest cell of the full-clip power energy map.

    Exact ties resolve to the lowest (elevation band, azimuth index) cell.
    """
    emap = energy_map(clip, grid)
    if emap.values.max() <= 0.0:
        raise NoEnergyError("clip carries no energy; argmax direction undefined")
    return grid.direction(emap.argmax_cell())


def relevance_filter(scores) -> np.ndarray:
    """Keep scores at or above mean - 1 population standard deviation."""
    s = np.asarray(scores, dtype=np.float64)
    if s.ndim != 1 or s.size < 2:
        raise ValueError("relevance filter needs at least 2 scores")
    if not np.all(np.isfinite(s)):
        raise ValueError("scores must be finite")
    cutoff = s.mean() - s.std()
    return s >= cutoff
