"""Scheduling patterns for 4-channel residual-vector-quantizer code matrices.

A code matrix holds 4N rows (N codebooks for each of the W, X, Y, Z
channels, channel-major) by L time frames. Rows split into four groups by
1-based row index i:

    W_p  primary omni codebooks      (i - 1) % N == 0 and i <= N
    W_r  residual omni codebooks     (i - 1) % N != 0 and i <= N
    S_p  primary spatial codebooks   (i - 1) % N == 0 and i > N
    S_r  residual spatial codebooks  (i - 1) % N != 0 and i > N

Each pattern maps the cell (row i, frame t) to one sequential step, filling
every other slot with a padding sentinel (the vocabulary size):

    interleaved ("proposed"): 2L+1 steps. W_p at step 2t-1, W_r and S_p at
        2t, S_r at 2t+1, so residual spatial codes of frame t arrive one
        step after the primary codes they depend on.
    sequential_delay: L+4N-1 steps; row i is delayed by i-1 steps
        (cell (i, t) at step t+i-1).
    residual_only: 2L steps; primaries at 2t-1, residuals at 2t.
    spatial_only: 2L steps; omni rows at 2t-1, spatial rows at 2t.

Every pattern is a bijection onto its non-padding slots, so unpacking is
exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import MalformedPatternError


class Pattern(str, Enum):
    PROPOSED = "proposed"
    SEQUENTIAL_DELAY = "sequential_delay"
    RESIDUAL_ONLY = "residual_only"
    SPATIAL_ONLY = "spatial_only"


class Group(str, Enum):
    W_PRIMARY = "W_p"
    W_RESIDUAL = "W_r"
    S_PRIMARY = "S_p"
    S_RESIDUAL = "S_r"


def group_of(row_index: int, n_codebooks_per_channel: int) -> Group:
    """Codebook group of a 1-based row in a 4N-row code matrix.

    Written as (i-1) % N == 0 so that N == 1 (a single codebook per channel,
    all rows primary) degenerates cleanly.
    """
    n = int(n_codebooks_per_channel)
    if n < 1:
        raise ValueError("n_codebooks_per_channel must be at least 1")
    i = int(row_index)
    if not 1 <= i <= 4 * n:
        raise ValueError(f"row index {i} outside 1..{4 * n}")
    primary = (i - 1) % n == 0
    omni = i <= n
    if omni:
        return Group.W_PRIMARY if primary else Group.W_RESIDUAL
    return Group.S_PRIMARY if primary else Group.S_RESIDUAL


def pattern_steps(pattern: Pattern, n_codebooks_per_channel: int, n_frames: int) -> int:
    """Number of sequential steps a pattern needs for an (4N x L) matrix."""
    n, length = int(n_codebooks_per_channel), int(n_frames)
    if n < 1 or length < 1:
        raise ValueError("need at least one codebook and one frame")
    pattern = Pattern(pattern)
    if pattern is Pattern.PROPOSED:
        return 2 * length + 1
    if pattern is Pattern.SEQUENTIAL_DELAY:
        return length + 4 * n - 1
    return 2 * length


def _step_table(pattern: Pattern, n: int, n_frames: int) -> np.ndarray:
    """1-based step of every (row, frame) cell, shaped (4N, L)."""
    rows = np.arange(1, 4 * n + 1)[:, None]
    frames = np.arange(1, n_frames + 1)[None, :]
    primary = (rows - 1) % n == 0
    omni = rows <= n
    pattern = Pattern(pattern)
    if pattern is Pattern.PROPOSED:
        # -1 for W_p, +1 for S_r, 0 for the middle groups.
        offset = np.where(primary & omni, -1, np.where(~primary & ~omni, 1, 0))
        return 2 * frames + offset
    if pattern is Pattern.SEQUENTIAL_DELAY:
        return frames + rows - 1
    if pattern is Pattern.RESIDUAL_ONLY:
        return 2 * frames - primary.astype(int)
    return 2 * frames - omni.astype(int)


@dataclass(frozen=True)
class CodeMatrix:
    """Raw (4N x L) code matrix: entries in [0, vocab_size)."""

    codes: np.ndarray
    n_codebooks_per_channel: int
    vocab_size: int

    def __post_init__(self) -> None:
        codes = np.asarray(self.codes)
        if codes.ndim != 2 or not np.issubdtype(codes.dtype, np.integer):
            raise ValueError("codes must be a 2-D integer matrix")
        n = int(self.n_codebooks_per_channel)
        v = int(self.vocab_size)
        if n < 1 or v < 1:
            raise ValueError("need positive codebook count and vocabulary size")
        if codes.shape[0] != 4 * n:
            raise ValueError(f"expected {4 * n} rows for N={n}, got {codes.shape[0]}")
        if codes.shape[1] < 1:
            raise ValueError("code matrix must hold at least one frame")
        if codes.min() < 0 or codes.max() >= v:
            raise ValueError(f"codes must lie in [0, {v})")
        object.__setattr__(self, "codes", codes.astype(np.int64))
        object.__setattr__(self, "n_codebooks_per_channel", n)
        object.__setattr__(self, "vocab_size", v)

    @property
    def n_frames(self) -> int:
        return self.codes.shape[1]


@dataclass(frozen=True)
class ReorgMatrix:
    """Pattern-scheduled (4N x steps) matrix; padding slots hold vocab_size."""

    codes: np.ndarray
    pattern: Pattern
    n_codebooks_per_channel: int
    vocab_size: int

    def __post_init__(self) -> None:
        codes = np.asarray(self.codes)
        if codes.ndim != 2 or not np.issubdtype(codes.dtype, np.integer):
            raise ValueError("codes must be a 2-D integer matrix")
        pattern = Pattern(self.pattern)
        n = int(self.n_codebooks_per_channel)
        v = int(self.vocab_size)
        if n < 1 or v < 1:
            raise ValueError("need positive codebook count and vocabulary size")
        if codes.shape[0] != 4 * n:
            raise ValueError(f"expected {4 * n} rows for N={n}, got {codes.shape[0]}")
        if codes.min() < 0 or codes.max() > v:
            raise ValueError(f"entries must lie in [0, {v}] (padding = {v})")
        n_frames = _frames_from_steps(pattern, n, codes.shape[1])
        object.__setattr__(self, "codes", codes.astype(np.int64))
        object.__setattr__(self, "pattern", pattern)
        object.__setattr__(self, "n_codebooks_per_channel", n)
        object.__setattr__(self, "vocab_size", v)
        object.__setattr__(self, "_n_frames", n_frames)

    @property
    def pad_value(self) -> int:
        return self.vocab_size

    @property
    def n_steps(self) -> int:
        return self.codes.shape[1]

    @property
    def n_frames(self) -> int:
        return self._n_frames


def _frames_from_steps(pattern: Pattern, n: int, steps: int) -> int:
    if pattern is Pattern.PROPOSED:
        frames, rem = divmod(steps - 1, 2)
    elif pattern is Pattern.SEQUENTIAL_DELAY:
        frames, rem = steps - 4 * n + 1, 0
    else:
        frames, rem = divmod(steps, 2)
    if rem != 0 or frames < 1:
        raise MalformedPatternError(
            f"{steps} steps is not a valid {pattern.value} schedule length for N={n}"
        )
    return frames


def pack(matrix: CodeMatrix, pattern: Pattern) -> ReorgMatrix:
    """Reorganize a code matrix onto a pattern's step schedule."""
    pattern = Pattern(pattern)
    n = matrix.n_codebooks_per_channel
    table = _step_table(pattern, n, matrix.n_frames)
    steps = pattern_steps(pattern, n, matrix.n_frames)
    out = np.full((4 * n, steps), matrix.vocab_size, dtype=np.int64)
    out[np.arange(4 * n)[:, None], table - 1] = matrix.codes
    return ReorgMatrix(out, pattern, n, matrix.vocab_size)


def unpack(reorg: ReorgMatrix) -> CodeMatrix:
    """Invert :func:`pack`, validating the padding layout first."""
    n = reorg.n_codebooks_per_channel
    table = _step_table(reorg.pattern, n, reorg.n_frames)
    occupied = np.zeros(reorg.codes.shape, dtype=bool)
    occupied[np.arange(4 * n)[:, None], table - 1] = True
    pad = reorg.codes == reorg.pad_value
    if np.any(pad & occupied):
        raise MalformedPatternError("padding found in a slot the pattern schedules")
    if np.any(~pad & ~occupied):
        raise MalformedPatternError("code found in a slot the pattern pads")
    codes = reorg.codes[np.arange(4 * n)[:, None], table - 1]
    return CodeMatrix(codes, n, reorg.vocab_size)
