"""Utterance-level speaker embeddings.

Externally computed embeddings (e.g. from neural speaker encoders) are
ingested from JSON or flat CSV; a deterministic spectral-statistics
baseline makes similarity experiments runnable without any neural
model.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import dsp
from .errors import InvalidInputError

SOURCE_EXTERNAL = "external"
SOURCE_STATS = "stats-baseline"


@dataclass(frozen=True)
class SpeakerEmbedding:
    """Fixed-dimension real vector tagged with its provenance."""

    vector: np.ndarray
    source: str

    def __post_init__(self):
        vector = np.asarray(self.vector, dtype=np.float64)
        if vector.ndim != 1 or vector.size == 0:
            raise InvalidInputError("embedding must be a non-empty 1-D vector")
        if not np.all(np.isfinite(vector)):
            raise InvalidInputError("embedding entries must be finite")
        object.__setattr__(self, "vector", vector)

    @property
    def dim(self) -> int:
        return self.vector.size


def load_embedding(path) -> SpeakerEmbedding:
    """Read an embedding from JSON {dim, values[], source?} or flat CSV.

    JSON files must declare their dimension and it must match the value
    count; CSV files are one real per line (or comma-separated) with the
    dimension inferred.
    """
    text = open(path).read()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidInputError(f"{path}: invalid JSON ({exc})") from exc
        if "dim" not in data or "values" not in data:
            raise InvalidInputError(f"{path}: embedding JSON needs 'dim' and 'values'")
        values = np.asarray(data["values"], dtype=np.float64)
        if values.ndim != 1 or values.size != int(data["dim"]):
            raise InvalidInputError(
                f"{path}: declared dim {data['dim']} but found {values.size} values"
            )
        source = data.get("source", SOURCE_EXTERNAL)
    else:
        try:
            values = np.asarray(
                [float(tok) for tok in text.replace(",", "\n").split()], dtype=np.float64
            )
        except ValueError as exc:
            raise InvalidInputError(f"{path}: could not parse CSV embedding ({exc})") from exc
        if values.size == 0:
            raise InvalidInputError(f"{path}: embedding file is empty")
        source = SOURCE_EXTERNAL
    if not np.all(np.isfinite(values)):
        raise InvalidInputError(f"{path}: embedding contains non-finite entries")
    return SpeakerEmbedding(values, source)


def save_embedding(path, embedding: SpeakerEmbedding) -> None:
    with open(path, "w") as fh:
        json.dump(
            {
                "dim": embedding.dim,
                "values": embedding.vector.tolist(),
                "source": embedding.source,
            },
            fh,
            sort_keys=True,
        )


def stats_embedding(
    audio: dsp.AudioBuffer,
    config: dsp.FrameConfig,
    n_mels: int = dsp.DEFAULT_N_MELS,
    f_min: float = dsp.DEFAULT_F_MIN,
    f_max: float = dsp.DEFAULT_F_MAX,
) -> SpeakerEmbedding:
    """Deterministic baseline: per-band log-mel mean and std, voiced-F0
    mean and std, and frame-energy mean and std (dim = 2*n_mels + 4).

    Silence yields the all-floor mel statistics with zero pitch/energy
    coordinates rather than an error.
    """
    spec = dsp.mel_spectrogram(audio, config, n_mels=n_mels)
    pitch = dsp.estimate_pitch(audio, config, f_min, f_max)
    energy = dsp.frame_energy(audio, config)
    voiced = pitch[pitch > 0]
    pitch_stats = (
        (float(voiced.mean()), float(voiced.std())) if voiced.size else (0.0, 0.0)
    )
    vector = np.concatenate(
        [
            spec.frames.mean(axis=0),
            spec.frames.std(axis=0),
            pitch_stats,
            (float(energy.mean()), float(energy.std())),
        ]
    )
    return SpeakerEmbedding(vector, SOURCE_STATS)
