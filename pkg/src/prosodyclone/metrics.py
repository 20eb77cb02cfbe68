"""Evaluation metrics for prosody and voice similarity.

Mel spectral distortion via dynamic time warping, the frame-level pitch
error family (voicing decision errors, gross pitch errors, and their
union rate), phone error rate, and embedding cosine similarity.

The pitch-error metrics require contours of equal length: they index a
shared frame grid and never resample. Callers are responsible for
analyzing both signals under one FrameConfig (see evaluate.py for the
padding convention used when lengths still differ).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .dsp import MelSpectrogram
from .errors import DegenerateInputError, InvalidInputError

# Inclusive relative band of Gross Pitch Error membership.
GPE_LOWER = 0.8
GPE_UPPER = 1.2

_DTW_STEPS = ((1, 1), (1, 0), (0, 1))  # backtracking preference order


@dataclass(frozen=True)
class DtwResult:
    """Minimal warping cost and the monotone index path that attains it."""

    total_cost: float
    path: tuple[tuple[int, int], ...]


def _as_frames(x) -> np.ndarray:
    if isinstance(x, MelSpectrogram):
        return x.frames
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 2:
        raise InvalidInputError(f"expected a T x D frame matrix, got shape {arr.shape}")
    return arr


def dtw(x, y) -> DtwResult:
    """Globally minimal monotone correspondence between two frame sequences.

    Steps are {(1,0), (0,1), (1,1)} with no slope weights; the local
    distance is the Euclidean distance between frame vectors. The path
    starts at (0, 0) and ends at (T_x-1, T_y-1). Ties during
    backtracking prefer the diagonal step, then advancing x, then y.
    """
    xf, yf = _as_frames(x), _as_frames(y)
    if xf.shape[0] == 0 or yf.shape[0] == 0:
        raise InvalidInputError("dtw inputs must be non-empty")
    if xf.shape[1] != yf.shape[1]:
        raise InvalidInputError(
            f"frame dimensions differ: {xf.shape[1]} vs {yf.shape[1]}"
        )
    dist = cdist(xf, yf)
    tx, ty = dist.shape
    acc = np.empty_like(dist)
    acc[0, 0] = dist[0, 0]
    acc[0, 1:] = dist[0, 1:].cumsum() + dist[0, 0]
    acc[1:, 0] = dist[1:, 0].cumsum() + dist[0, 0]
    for i in range(1, tx):
        row = acc[i - 1]
        cur = acc[i]
        for j in range(1, ty):
            cur[j] = dist[i, j] + min(row[j - 1], row[j], cur[j - 1])

    path = [(tx - 1, ty - 1)]
    i, j = tx - 1, ty - 1
    while (i, j) != (0, 0):
        if i == 0:
            j -= 1
        elif j == 0:
            i -= 1
        else:
            candidates = (acc[i - 1, j - 1], acc[i - 1, j], acc[i, j - 1])
            di, dj = _DTW_STEPS[int(np.argmin(candidates))]
            i, j = i - di, j - dj
        path.append((i, j))
    return DtwResult(float(acc[-1, -1]), tuple(reversed(path)))


def msd(x, y) -> float:
    """DTW cost between log-mel spectrograms divided by the frame count of x.

    Asymmetric in (x, y) by construction: the normalizer is always the
    first argument's length.
    """
    tx = _as_frames(x).shape[0]
    return dtw(x, y).total_cost / tx


def _check_contours(x, y) -> tuple[np.ndarray, np.ndarray]:
    xa = np.asarray(x, dtype=np.float64)
    ya = np.asarray(y, dtype=np.float64)
    if xa.ndim != 1 or ya.ndim != 1:
        raise InvalidInputError("pitch contours must be 1-D")
    if xa.size == 0:
        raise InvalidInputError("pitch contours must be non-empty")
    if xa.size != ya.size:
        raise InvalidInputError(
            f"contours must share a frame grid, got lengths {xa.size} vs {ya.size}"
        )
    return xa, ya


def vde(x, y) -> set[int]:
    """Frames where exactly one of the two contours is unvoiced."""
    xa, ya = _check_contours(x, y)
    return set(np.nonzero((xa == 0) != (ya == 0))[0].tolist())


def gpe(x, y, voiced_only: bool = False) -> set[int]:
    """Frames where y falls outside the inclusive [0.8x, 1.2x] band.

    Evaluated literally at every frame, including frames where x is
    unvoiced (the band degenerates to [0, 0] there). ``voiced_only``
    restricts membership to frames voiced in both contours, the
    conventional alternative.
    """
    xa, ya = _check_contours(x, y)
    inside = (xa * GPE_LOWER <= ya) & (ya <= xa * GPE_UPPER)
    errors = ~inside
    if voiced_only:
        errors &= (xa != 0) & (ya != 0)
    return set(np.nonzero(errors)[0].tolist())


def ffe(x, y) -> float:
    """Fraction of frames in the union of voicing and gross pitch errors."""
    xa, ya = _check_contours(x, y)
    return len(vde(xa, ya) | gpe(xa, ya)) / xa.size


def levenshtein(reference, hypothesis) -> int:
    """Edit distance with unit substitution/insertion/deletion costs."""
    ref = list(reference)
    hyp = list(hypothesis)
    prev = list(range(len(hyp) + 1))
    for i, r in enumerate(ref, start=1):
        cur = [i] + [0] * len(hyp)
        for j, h in enumerate(hyp, start=1):
            cur[j] = min(
                prev[j] + 1,
                cur[j - 1] + 1,
                prev[j - 1] + (r != h),
            )
        prev = cur
    return prev[-1]


def per(reference, hypothesis) -> float:
    """Phone error rate: edit distance divided by the reference length."""
    ref = list(reference)
    if not ref:
        raise InvalidInputError("reference phone sequence must be non-empty")
    return levenshtein(ref, hypothesis) / len(ref)


def cosine_similarity(a, b) -> float:
    """Cosine of the angle between two embedding vectors, in [-1, 1]."""
    va = np.asarray(getattr(a, "vector", a), dtype=np.float64)
    vb = np.asarray(getattr(b, "vector", b), dtype=np.float64)
    if va.ndim != 1 or vb.ndim != 1:
        raise InvalidInputError("embeddings must be 1-D vectors")
    if va.size != vb.size:
        raise InvalidInputError(
            f"embedding dimensions differ: {va.size} vs {vb.size}"
        )
    na, nb = np.linalg.norm(va), np.linalg.norm(vb)
    if na == 0.0 or nb == 0.0:
        raise DegenerateInputError("cosine similarity of a zero vector is undefined")
    return float(np.clip(va @ vb / (na * nb), -1.0, 1.0))
