"""Toy deterministic source-filter renderer.

Turns per-phone prosody targets into audio: voiced phones use a
band-limited impulse train at the target pitch, unvoiced phones use
white noise, both shaped by a fixed two-resonator filter per phone and
rescaled so the analysis-grid frame energy matches the target. The
renderer emits exactly ``sum(durations)`` analysis frames under the
given FrameConfig, which closes the extract -> clone -> render ->
measure loop on one grid, and the corpus generator stores its random
choices as exact ground truth for aligner training and evaluation.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from types import MappingProxyType

import numpy as np
from scipy.signal import lfilter

from . import dsp
from .align import Alignment, PhoneInventory
from .errors import InvalidInputError
from .prosody import ProsodyTargets

CORPUS_MANIFEST_VERSION = "1"

_CROSSFADE_SECONDS = 0.005
# keep harmonics comfortably below Nyquist
_HARMONIC_LIMIT = 0.45


@dataclass(frozen=True)
class PhoneTimbre:
    """Voicing flag plus two (center_hz, bandwidth_hz) resonances."""

    voiced: bool
    resonances: tuple[tuple[float, float], tuple[float, float]]


@dataclass(frozen=True)
class PhoneTimbreTable:
    """Spectral shape per phone; every rendered phone needs an entry."""

    entries: MappingProxyType

    def __init__(self, entries):
        object.__setattr__(self, "entries", MappingProxyType(dict(entries)))

    def __contains__(self, phone) -> bool:
        return phone in self.entries

    def __getitem__(self, phone) -> PhoneTimbre:
        try:
            return self.entries[phone]
        except KeyError:
            raise InvalidInputError(f"no timbre entry for phone {phone!r}") from None

    def voiced_flags(self) -> dict:
        return {p: t.voiced for p, t in self.entries.items()}

    def check_inventory(self, inventory: PhoneInventory) -> None:
        missing = [s for s in inventory.symbols if s not in self.entries]
        if missing:
            raise InvalidInputError(f"timbre table lacks entries for {missing}")

    def scaled(self, formant_scale: float) -> "PhoneTimbreTable":
        """Speaker-like timbre variant with all resonances scaled."""
        if formant_scale <= 0:
            raise InvalidInputError("formant_scale must be positive")
        return PhoneTimbreTable(
            {
                p: PhoneTimbre(
                    t.voiced,
                    tuple((fc * formant_scale, bw) for fc, bw in t.resonances),
                )
                for p, t in self.entries.items()
            }
        )


_DEFAULT_TIMBRES = {
    "aa": PhoneTimbre(True, ((700.0, 130.0), (1220.0, 160.0))),
    "eh": PhoneTimbre(True, ((550.0, 120.0), (1800.0, 180.0))),
    "iy": PhoneTimbre(True, ((300.0, 100.0), (2300.0, 200.0))),
    "ow": PhoneTimbre(True, ((500.0, 110.0), (1150.0, 140.0))),
    "uw": PhoneTimbre(True, ((330.0, 100.0), (850.0, 130.0))),
    "ss": PhoneTimbre(False, ((6000.0, 1000.0), (7000.0, 1000.0))),
    "sh": PhoneTimbre(False, ((2200.0, 800.0), (3200.0, 900.0))),
    "ff": PhoneTimbre(False, ((4200.0, 1000.0), (4800.0, 1000.0))),
}


def default_inventory() -> PhoneInventory:
    return PhoneInventory(tuple(_DEFAULT_TIMBRES))


def default_timbre_table() -> PhoneTimbreTable:
    return PhoneTimbreTable(_DEFAULT_TIMBRES)


def _pulse_train(f0: float, n: int, sample_rate: int) -> np.ndarray:
    """Band-limited impulse train: equal-amplitude cosine harmonics below
    the harmonic limit, via the Dirichlet kernel closed form."""
    n_harmonics = max(1, int(np.floor(_HARMONIC_LIMIT * sample_rate / f0)))
    theta = 2.0 * np.pi * f0 / sample_rate * np.arange(n)
    half = 0.5 * theta
    sin_half = np.sin(half)
    with np.errstate(divide="ignore", invalid="ignore"):
        kernel = np.sin((n_harmonics + 0.5) * theta) / (2.0 * sin_half)
    kernel = np.where(np.abs(sin_half) < 1e-9, n_harmonics + 0.5, kernel)
    return kernel - 0.5


def _resonator(x: np.ndarray, center_hz: float, bandwidth_hz: float,
               sample_rate: int) -> np.ndarray:
    radius = np.exp(-np.pi * bandwidth_hz / sample_rate)
    omega = 2.0 * np.pi * center_hz / sample_rate
    gain = (1.0 - radius * radius) * np.sin(omega)
    return lfilter([gain], [1.0, -2.0 * radius * np.cos(omega), radius * radius], x)


def render(
    targets: ProsodyTargets,
    phones,
    timbres: PhoneTimbreTable,
    config: dsp.FrameConfig,
    sample_rate: int = 16000,
    seed: int = 0,
) -> dsp.AudioBuffer:
    """Render per-phone prosody targets to audio.

    Each phone occupies ``duration * frame_shift`` seconds; a trailing
    ``frame_length - frame_shift`` pad continues the last phone so the
    output analyzes to exactly ``sum(durations)`` frames. Adjacent
    phones are joined with a 5 ms linear crossfade. Noise excitation is
    drawn from a generator seeded with ``seed``, so output is a pure
    function of (targets, phones, timbres, config, sample_rate, seed).
    """
    phones = list(phones)
    if len(phones) != len(targets):
        raise InvalidInputError(
            f"{len(phones)} phones but targets cover {len(targets)}"
        )
    if not phones:
        raise InvalidInputError("cannot render an empty phone sequence")
    nyquist = sample_rate / 2.0
    for i, phone in enumerate(phones):
        timbre = timbres[phone]
        if any(fc >= nyquist for fc, _ in timbre.resonances):
            raise InvalidInputError(
                f"phone {phone!r} has a resonance at or above Nyquist ({nyquist} Hz)"
            )
        if timbre.voiced and targets.pitch[i] <= 0:
            raise InvalidInputError(
                f"voiced phone {phone!r} at position {i} needs pitch > 0"
            )

    shift = config.shift_samples(sample_rate)
    tail = config.length_samples(sample_rate) - shift
    fade = int(round(_CROSSFADE_SECONDS * sample_rate))
    window_rms = dsp.window_rms(config, sample_rate)
    rng = np.random.default_rng(seed)

    total = sum(targets.durations) * shift + tail
    out = np.zeros(total)
    ramp_up = (np.arange(fade) + 0.5) / fade
    ramp_down = ramp_up[::-1]

    pos = 0
    last = len(phones) - 1
    for i, phone in enumerate(phones):
        timbre = timbres[phone]
        n = targets.durations[i] * shift
        extra = tail if i == last else fade
        if timbre.voiced:
            excitation = _pulse_train(targets.pitch[i], n + extra, sample_rate)
        else:
            excitation = rng.standard_normal(n + extra)
        segment = excitation
        for center, bandwidth in timbre.resonances:
            segment = _resonator(segment, center, bandwidth, sample_rate)

        if targets.energy[i] == 0.0:
            segment = np.zeros_like(segment)
        else:
            rms = np.sqrt(np.mean(segment[:n] ** 2))
            # frame_energy measures windowed RMS; compensate so the
            # analysis reading matches the target
            segment = segment * (targets.energy[i] / window_rms / max(rms, 1e-12))

        body = segment[:n].copy()
        if i > 0 and fade > 0:
            body[:fade] *= ramp_up
        out[pos : pos + n] += body
        if i == last:
            out[pos + n : pos + n + tail] += segment[n : n + tail]
        elif fade > 0:
            out[pos + n : pos + n + fade] += segment[n : n + fade] * ramp_down
        pos += n
    return dsp.AudioBuffer(out, sample_rate)


@dataclass(frozen=True)
class ToySample:
    """One generated utterance with its exact construction ground truth."""

    sample_id: str
    audio: dsp.AudioBuffer
    phones: tuple[str, ...]
    alignment: Alignment
    targets: ProsodyTargets


def make_toy_corpus(
    n: int,
    inventory: PhoneInventory | None = None,
    seed: int = 0,
    timbres: PhoneTimbreTable | None = None,
    config: dsp.FrameConfig | None = None,
    sample_rate: int = 16000,
    n_phones: tuple[int, int] = (3, 8),
    duration_frames: tuple[int, int] = (6, 16),
    base_pitch: tuple[float, float] = (140.0, 250.0),
    pitch_spread: float = 0.18,
    energy_range: tuple[float, float] = (0.02, 0.08),
) -> list[ToySample]:
    """Generate labeled utterances with known prosody.

    Phone sequences avoid immediate repeats (keeps every CTC instance
    trivially feasible); per-phone pitch is a per-utterance base value
    with a multiplicative spread, energy is uniform in ``energy_range``.
    Identical arguments produce bit-identical corpora.
    """
    if n < 1:
        raise InvalidInputError("corpus size must be >= 1")
    inventory = inventory or default_inventory()
    timbres = timbres or default_timbre_table()
    timbres.check_inventory(inventory)
    config = config or dsp.FrameConfig()
    rng = np.random.default_rng(seed)
    symbols = list(inventory.symbols)

    samples = []
    for k in range(n):
        count = int(rng.integers(n_phones[0], n_phones[1] + 1))
        phones: list[str] = []
        for _ in range(count):
            choices = [s for s in symbols if not phones or s != phones[-1]]
            phones.append(choices[int(rng.integers(len(choices)))])
        durations = rng.integers(duration_frames[0], duration_frames[1] + 1, size=count)
        base = rng.uniform(*base_pitch)
        pitch = []
        for phone in phones:
            if timbres[phone].voiced:
                pitch.append(base * rng.uniform(1.0 - pitch_spread, 1.0 + pitch_spread))
            else:
                pitch.append(0.0)
        energy = rng.uniform(energy_range[0], energy_range[1], size=count)
        targets = ProsodyTargets(tuple(int(d) for d in durations), tuple(pitch),
                                 tuple(float(e) for e in energy))
        audio = render(targets, phones, timbres, config, sample_rate,
                       seed=int(rng.integers(2**31)))
        bounds = np.concatenate(([0], np.cumsum(durations)))
        alignment = Alignment(tuple((int(bounds[i]), int(bounds[i + 1]))
                                    for i in range(count)))
        samples.append(ToySample(f"sample_{k:03d}", audio, tuple(phones),
                                 alignment, targets))
    return samples


def write_corpus(samples, out_dir, config: dsp.FrameConfig, seed: int | None = None) -> str:
    """Write WAVs plus a manifest carrying transcripts and ground truth.

    Returns the manifest path. Paths inside the manifest are relative,
    so equal corpora serialize byte-identically regardless of location.
    """
    os.makedirs(out_dir, exist_ok=True)
    entries = []
    sample_rate = None
    for sample in samples:
        sample_rate = sample.audio.sample_rate
        wav_name = f"{sample.sample_id}.wav"
        dsp.write_wav(os.path.join(out_dir, wav_name), sample.audio)
        entries.append(
            {
                "id": sample.sample_id,
                "wav": wav_name,
                "phones": list(sample.phones),
                "spans": [list(span) for span in sample.alignment.spans],
                "durations": list(sample.targets.durations),
                "pitch": list(sample.targets.pitch),
                "energy": list(sample.targets.energy),
            }
        )
    manifest = {
        "version": CORPUS_MANIFEST_VERSION,
        "seed": seed,
        "sample_rate": sample_rate,
        "frame_length_s": config.frame_length,
        "frame_shift_s": config.frame_shift,
        "window": config.window,
        "samples": entries,
    }
    manifest_path = os.path.join(out_dir, "manifest.json")
    with open(manifest_path, "w") as fh:
        json.dump(manifest, fh, sort_keys=True, indent=2)
    return manifest_path


def read_corpus(manifest_path) -> tuple[list[ToySample], dsp.FrameConfig]:
    """Load a written corpus back, reconstructing ground truth objects."""
    with open(manifest_path) as fh:
        manifest = json.load(fh)
    if manifest.get("version") != CORPUS_MANIFEST_VERSION:
        raise InvalidInputError(
            f"unsupported corpus manifest version {manifest.get('version')!r}"
        )
    config = dsp.FrameConfig(
        frame_length=manifest["frame_length_s"],
        frame_shift=manifest["frame_shift_s"],
        window=manifest["window"],
    )
    base = os.path.dirname(os.path.abspath(manifest_path))
    samples = []
    for entry in manifest["samples"]:
        audio = dsp.read_wav(os.path.join(base, entry["wav"]))
        samples.append(
            ToySample(
                sample_id=entry["id"],
                audio=audio,
                phones=tuple(entry["phones"]),
                alignment=Alignment(tuple(tuple(s) for s in entry["spans"])),
                targets=ProsodyTargets(
                    tuple(entry["durations"]), tuple(entry["pitch"]), tuple(entry["energy"])
                ),
            )
        )
    return samples, config
