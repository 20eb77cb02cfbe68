"""Phone-level prosody extraction, normalization, and transfer.

A prosody signature holds per-phone durations plus pitch and energy
values normalized by their utterance means; the means themselves form
the utterance's register. Applying a signature under a different
register de-normalizes the dimensionless curves into that voice's value
range, and "cloning" overwrites whatever a prosody predictor produced
with those values.

Unvoiced phones carry pitch 0 throughout and are excluded from the
normalization mean, so the register stays recoverable regardless of the
voiced/unvoiced mix.
"""

from __future__ import annotations

import json
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

from . import dsp
from .align import Alignment, AlignerModel, align_audio
from .errors import DegenerateInputError, InvalidInputError

SIGNATURE_FORMAT_VERSION = "1"


@dataclass(frozen=True)
class Register:
    """Absolute scale of an utterance: mean pitch (Hz) and mean energy."""

    pitch_mean: float
    energy_mean: float

    def __post_init__(self):
        if not (self.pitch_mean > 0 and self.energy_mean > 0):
            raise InvalidInputError(
                f"register means must be positive, got ({self.pitch_mean}, {self.energy_mean})"
            )


@dataclass(frozen=True)
class ProsodyTargets:
    """Absolute per-phone prosody: durations in frames, pitch in Hz
    (0 = unvoiced), energy in RMS units."""

    durations: tuple[int, ...]
    pitch: tuple[float, ...]
    energy: tuple[float, ...]

    def __post_init__(self):
        durations = tuple(int(d) for d in self.durations)
        pitch = tuple(float(p) for p in self.pitch)
        energy = tuple(float(e) for e in self.energy)
        if not (len(durations) == len(pitch) == len(energy)):
            raise InvalidInputError("duration/pitch/energy lengths must match")
        if any(d < 1 for d in durations):
            raise InvalidInputError("durations must be >= 1 frame")
        if any(p < 0 for p in pitch) or any(e < 0 for e in energy):
            raise InvalidInputError("pitch and energy must be non-negative")
        object.__setattr__(self, "durations", durations)
        object.__setattr__(self, "pitch", pitch)
        object.__setattr__(self, "energy", energy)

    def __len__(self) -> int:
        return len(self.durations)


@dataclass(frozen=True)
class ProsodySignature:
    """Transferable prosody: per-phone durations plus normalized pitch
    and energy, with the source register retained separately."""

    phones: tuple[str, ...]
    durations: tuple[int, ...]
    pitch_norm: tuple[float, ...]
    energy_norm: tuple[float, ...]
    register: Register
    frame_shift: float

    def __post_init__(self):
        phones = tuple(self.phones)
        durations = tuple(int(d) for d in self.durations)
        pitch_norm = tuple(float(v) for v in self.pitch_norm)
        energy_norm = tuple(float(v) for v in self.energy_norm)
        n = len(phones)
        if not (len(durations) == len(pitch_norm) == len(energy_norm) == n) or n == 0:
            raise InvalidInputError("signature per-phone lists must share one nonzero length")
        if any(d < 1 for d in durations):
            raise InvalidInputError("durations must be >= 1 frame")
        if self.frame_shift <= 0:
            raise InvalidInputError("frame_shift must be positive")
        for name, values in (("pitch_norm", pitch_norm), ("energy_norm", energy_norm)):
            nonzero = [v for v in values if v != 0.0]
            if not nonzero:
                raise InvalidInputError(f"{name} must contain a nonzero entry")
            mean = sum(nonzero) / len(nonzero)
            if abs(mean - 1.0) > 1e-6:
                raise InvalidInputError(
                    f"mean of nonzero {name} entries must be 1 +- 1e-6, got {mean}"
                )
        object.__setattr__(self, "phones", phones)
        object.__setattr__(self, "durations", durations)
        object.__setattr__(self, "pitch_norm", pitch_norm)
        object.__setattr__(self, "energy_norm", energy_norm)

    def __len__(self) -> int:
        return len(self.phones)


class ProsodyPredictor(ABC):
    """Maps a phone sequence plus target register to absolute prosody.

    Implementations must be reentrant or externally synchronized, and
    must return one duration/pitch/energy triple per input phone.
    """

    @abstractmethod
    def predict(self, phones, register: Register) -> ProsodyTargets:
        ...


class MeanPredictor(ProsodyPredictor):
    """Trivial statistics baseline: constant durations, register-mean
    pitch on voiced phones, register-mean energy everywhere."""

    def __init__(self, voiced_flags, duration_frames: int = 10):
        self.voiced_flags = dict(voiced_flags)
        if duration_frames < 1:
            raise InvalidInputError("duration_frames must be >= 1")
        self.duration_frames = int(duration_frames)

    def predict(self, phones, register: Register) -> ProsodyTargets:
        phones = list(phones)
        unknown = [p for p in phones if p not in self.voiced_flags]
        if unknown:
            raise InvalidInputError(f"no voicing information for phones {unknown}")
        pitch = [register.pitch_mean if self.voiced_flags[p] else 0.0 for p in phones]
        return ProsodyTargets(
            durations=(self.duration_frames,) * len(phones),
            pitch=tuple(pitch),
            energy=(register.energy_mean,) * len(phones),
        )


def average_per_phone(pitch, energy, alignment: Alignment):
    """Collapse frame contours to per-phone means.

    Pitch averages only the voiced frames of each span (0 when the span
    has none); energy averages every frame of the span.
    """
    pitch = np.asarray(pitch, dtype=np.float64)
    energy = np.asarray(energy, dtype=np.float64)
    if pitch.shape != energy.shape or pitch.ndim != 1:
        raise InvalidInputError("pitch and energy contours must be 1-D and equal length")
    if pitch.size != alignment.n_frames:
        raise InvalidInputError(
            f"contour length {pitch.size} does not match alignment frames {alignment.n_frames}"
        )
    phone_pitch = np.zeros(len(alignment.spans))
    phone_energy = np.zeros(len(alignment.spans))
    for i, (start, end) in enumerate(alignment.spans):
        voiced = pitch[start:end][pitch[start:end] > 0]
        phone_pitch[i] = voiced.mean() if voiced.size else 0.0
        phone_energy[i] = energy[start:end].mean()
    return phone_pitch, phone_energy


def normalize(values):
    """Divide the nonzero entries by their mean; zeros are preserved.

    Returns the normalized sequence and the mean (the register
    component). All-zero input raises DegenerateInputError.
    """
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 1 or values.size == 0:
        raise InvalidInputError("expected a non-empty 1-D value sequence")
    if np.any(values < 0):
        raise InvalidInputError("values must be non-negative")
    nonzero = values != 0
    if not np.any(nonzero):
        raise DegenerateInputError("cannot normalize an all-zero sequence")
    mean = float(values[nonzero].mean())
    return np.where(nonzero, values / mean, 0.0), mean


def denormalize(normalized, mean: float) -> np.ndarray:
    """Inverse of normalize for a known register mean; zeros stay zero."""
    normalized = np.asarray(normalized, dtype=np.float64)
    if mean <= 0:
        raise InvalidInputError("register mean must be positive")
    return np.where(normalized != 0, normalized * mean, 0.0)


def extract_signature(
    audio: dsp.AudioBuffer,
    phones,
    model: AlignerModel,
    config: dsp.FrameConfig,
    finetune_steps: int = 10,
    f_min: float = dsp.DEFAULT_F_MIN,
    f_max: float = dsp.DEFAULT_F_MAX,
    voicing_threshold: float = dsp.VOICING_THRESHOLD,
) -> ProsodySignature:
    """Measure a reference utterance's per-phone prosody.

    Aligns the audio to the transcript (finetuning the aligner on this
    sample first), averages the pitch and energy contours per phone, and
    normalizes both sequences; the two means form the register. Raises
    DegenerateInputError when the utterance has no voiced content. A
    higher ``voicing_threshold`` keeps phone-boundary frames with mixed
    periodicity out of the voiced means, which pays off on clean audio.
    """
    phones = tuple(phones)
    alignment = align_audio(model, audio, phones, config, finetune_steps)
    pitch = dsp.estimate_pitch(audio, config, f_min, f_max, voicing_threshold)
    energy = dsp.frame_energy(audio, config)
    phone_pitch, phone_energy = average_per_phone(pitch, energy, alignment)
    pitch_norm, pitch_mean = normalize(phone_pitch)
    energy_norm, energy_mean = normalize(phone_energy)
    return ProsodySignature(
        phones=phones,
        durations=alignment.durations,
        pitch_norm=tuple(pitch_norm),
        energy_norm=tuple(energy_norm),
        register=Register(pitch_mean, energy_mean),
        frame_shift=config.frame_shift,
    )


def apply_signature(sig: ProsodySignature, target_register: Register) -> ProsodyTargets:
    """De-normalize a signature into a target voice's value range.

    Durations transfer verbatim; pitch and energy are the normalized
    curves scaled by the target register (unvoiced zeros stay zero).
    """
    pitch = denormalize(sig.pitch_norm, target_register.pitch_mean)
    energy = denormalize(sig.energy_norm, target_register.energy_mean)
    return ProsodyTargets(sig.durations, tuple(pitch), tuple(energy))


def clone(
    predictor: ProsodyPredictor,
    phones,
    sig: ProsodySignature,
    target_register: Register,
) -> ProsodyTargets:
    """Run the predictor, then overwrite every value it produced.

    The result depends only on the signature and register; the predictor
    is still invoked (and its output validated) so the call sites mirror
    an unconditioned synthesis pipeline.
    """
    phones = tuple(phones)
    if len(phones) != len(sig):
        raise InvalidInputError(
            f"signature covers {len(sig)} phones but transcript has {len(phones)}"
        )
    predicted = predictor.predict(phones, target_register)
    if len(predicted) != len(phones):
        raise InvalidInputError(
            f"predictor returned {len(predicted)} phones for a {len(phones)}-phone input"
        )
    return apply_signature(sig, target_register)


def register_from_audio(
    audio: dsp.AudioBuffer,
    config: dsp.FrameConfig,
    f_min: float = dsp.DEFAULT_F_MIN,
    f_max: float = dsp.DEFAULT_F_MAX,
    voicing_threshold: float = dsp.VOICING_THRESHOLD,
) -> Register:
    """Voice register of an arbitrary (untranscribed) sample: mean voiced
    F0 and mean frame energy."""
    pitch = dsp.estimate_pitch(audio, config, f_min, f_max, voicing_threshold)
    voiced = pitch[pitch > 0]
    if voiced.size == 0:
        raise DegenerateInputError("audio has no voiced frames; register undefined")
    energy_mean = float(dsp.frame_energy(audio, config).mean())
    if energy_mean <= 0:
        raise DegenerateInputError("audio has zero mean energy; register undefined")
    return Register(float(voiced.mean()), energy_mean)


def signature_to_dict(sig: ProsodySignature) -> dict:
    return {
        "version": SIGNATURE_FORMAT_VERSION,
        "frame_shift_s": sig.frame_shift,
        "phones": list(sig.phones),
        "durations_frames": list(sig.durations),
        "pitch_norm": list(sig.pitch_norm),
        "energy_norm": list(sig.energy_norm),
        "register": {
            "pitch_mean_hz": sig.register.pitch_mean,
            "energy_mean": sig.register.energy_mean,
        },
    }


def signature_from_dict(data: dict) -> ProsodySignature:
    version = data.get("version")
    if version != SIGNATURE_FORMAT_VERSION:
        raise InvalidInputError(
            f"unsupported signature version {version!r}, expected {SIGNATURE_FORMAT_VERSION!r}"
        )
    return ProsodySignature(
        phones=tuple(data["phones"]),
        durations=tuple(data["durations_frames"]),
        pitch_norm=tuple(data["pitch_norm"]),
        energy_norm=tuple(data["energy_norm"]),
        register=Register(
            data["register"]["pitch_mean_hz"], data["register"]["energy_mean"]
        ),
        frame_shift=float(data["frame_shift_s"]),
    )


def save_signature(path, sig: ProsodySignature) -> None:
    with open(path, "w") as fh:
        json.dump(signature_to_dict(sig), fh, sort_keys=True, indent=2)


def load_signature(path) -> ProsodySignature:
    with open(path) as fh:
        return signature_from_dict(json.load(fh))
