"""Batch evaluation of reference/hypothesis audio pairs.

Computes the prosody metric suite per pair and serializes a report.
The frame-indexed pitch metrics need contours on one grid: both signals
are analyzed under the same FrameConfig, and when the hypothesis is
shorter or longer than the reference its contour is zero-padded or
truncated to the reference length (missing frames count as unvoiced).
The metric functions themselves stay strict about lengths.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np

from . import dsp, embed, metrics

REPORT_FORMAT_VERSION = "1"

_CSV_FIELDS = ("pair_id", "msd", "ffe", "vde_rate", "gpe_rate", "per", "cosine")


@dataclass(frozen=True)
class PairReport:
    pair_id: str
    msd: float
    ffe: float
    vde_rate: float
    gpe_rate: float
    per: float | None = None
    cosine: float | None = None


def on_reference_grid(reference, hypothesis) -> np.ndarray:
    """Zero-pad or truncate a hypothesis contour to the reference length."""
    reference = np.asarray(reference, dtype=np.float64)
    hypothesis = np.asarray(hypothesis, dtype=np.float64)
    if hypothesis.size >= reference.size:
        return hypothesis[: reference.size]
    return np.concatenate([hypothesis, np.zeros(reference.size - hypothesis.size)])


def evaluate_pair(
    reference: dsp.AudioBuffer,
    hypothesis: dsp.AudioBuffer,
    config: dsp.FrameConfig,
    pair_id: str = "pair",
    n_mels: int = dsp.DEFAULT_N_MELS,
    f_min: float = dsp.DEFAULT_F_MIN,
    f_max: float = dsp.DEFAULT_F_MAX,
    ref_phones=None,
    hyp_phones=None,
    with_cosine: bool = True,
) -> PairReport:
    """Metric suite for one reference/hypothesis pair.

    PER is included only when both phone sequences are supplied; cosine
    similarity uses the stats-baseline embeddings unless disabled.
    """
    ref_mel = dsp.mel_spectrogram(reference, config, n_mels=n_mels)
    hyp_mel = dsp.mel_spectrogram(hypothesis, config, n_mels=n_mels)
    ref_pitch = dsp.estimate_pitch(reference, config, f_min, f_max)
    hyp_pitch = on_reference_grid(ref_pitch, dsp.estimate_pitch(hypothesis, config, f_min, f_max))

    n_frames = ref_pitch.size
    vde_set = metrics.vde(ref_pitch, hyp_pitch)
    gpe_set = metrics.gpe(ref_pitch, hyp_pitch)
    per_value = None
    if ref_phones is not None and hyp_phones is not None:
        per_value = metrics.per(ref_phones, hyp_phones)
    cosine = None
    if with_cosine:
        cosine = metrics.cosine_similarity(
            embed.stats_embedding(reference, config, n_mels, f_min, f_max),
            embed.stats_embedding(hypothesis, config, n_mels, f_min, f_max),
        )
    return PairReport(
        pair_id=pair_id,
        msd=metrics.msd(ref_mel, hyp_mel),
        ffe=len(vde_set | gpe_set) / n_frames,
        vde_rate=len(vde_set) / n_frames,
        gpe_rate=len(gpe_set) / n_frames,
        per=per_value,
        cosine=cosine,
    )


def write_report_json(path, reports, extra: dict | None = None) -> None:
    """Write a versioned JSON report, pairs sorted by id."""
    payload = {
        "version": REPORT_FORMAT_VERSION,
        "pairs": [
            {field: getattr(r, field) for field in _CSV_FIELDS}
            for r in sorted(reports, key=lambda r: r.pair_id)
        ],
    }
    if extra:
        payload.update(extra)
    with open(path, "w") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)


def write_report_csv(path, reports) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_CSV_FIELDS)
        for r in sorted(reports, key=lambda r: r.pair_id):
            writer.writerow(
                ["" if (v := getattr(r, field)) is None else v for field in _CSV_FIELDS]
            )


def read_report_json(path) -> list[PairReport]:
    with open(path) as fh:
        payload = json.load(fh)
    return [PairReport(**pair) for pair in payload["pairs"]]
