"""Waveform analysis primitives.

Framing, log-mel spectrograms, MFCC features, frame RMS energy, and
autocorrelation pitch tracking with a voicing decision. All extractors
share one frame grid: for a signal of ``n`` samples analyzed with frame
length ``L`` and shift ``S`` (in samples), the frame count is
``(n - L) // S + 1`` and frame ``t`` covers samples ``[t*S, t*S + L)``.

Pitch contours are plain 1-D float arrays with 0 encoding unvoiced
frames; energy contours are 1-D non-negative float arrays.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from scipy.fft import dct
from scipy.io import wavfile

from .errors import InvalidInputError

LOG_MEL_FLOOR = 1e-5
DEFAULT_N_MELS = 80
DEFAULT_F_MIN = 60.0
DEFAULT_F_MAX = 400.0
VOICING_THRESHOLD = 0.45

# Praat-style bonus for shorter candidate lags; with frame-independent
# decisions (no transition costs) it must outweigh the compensation noise
# at the double-period lag, so it is stronger than Praat's default.
_OCTAVE_COST = 0.05
# Lag-domain floor for the window-autocorrelation compensation; caps the
# amplification of the normalized autocorrelation tail.
_WINDOW_ACF_FLOOR = 0.1
# The periodicity window must hold this many periods of the lowest
# searched pitch for the lag range to stay in the reliable zone.
_PITCH_WINDOW_PERIODS = 2.5

_WINDOWS = ("hann", "hamming", "rectangular")


@dataclass(frozen=True)
class AudioBuffer:
    """Mono waveform plus its sample rate."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise InvalidInputError(
                f"audio must be mono (1-D), got shape {samples.shape}"
            )
        if int(self.sample_rate) <= 0:
            raise InvalidInputError(f"sample_rate must be positive, got {self.sample_rate}")
        if samples.size and not np.all(np.isfinite(samples)):
            raise InvalidInputError("audio samples must all be finite")
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sample_rate", int(self.sample_rate))

    @property
    def duration(self) -> float:
        """Length in seconds."""
        return self.samples.size / self.sample_rate


@dataclass(frozen=True)
class FrameConfig:
    """Analysis frame geometry shared by every extractor.

    frame_length and frame_shift are in seconds; window is one of
    "hann", "hamming", "rectangular".
    """

    frame_length: float = 0.025
    frame_shift: float = 0.010
    window: str = "hann"

    def __post_init__(self):
        if not (0 < self.frame_shift <= self.frame_length):
            raise InvalidInputError(
                "need 0 < frame_shift <= frame_length, got "
                f"shift={self.frame_shift}, length={self.frame_length}"
            )
        if self.window not in _WINDOWS:
            raise InvalidInputError(
                f"unknown window {self.window!r}, expected one of {_WINDOWS}"
            )

    def length_samples(self, sample_rate: int) -> int:
        return int(round(self.frame_length * sample_rate))

    def shift_samples(self, sample_rate: int) -> int:
        return int(round(self.frame_shift * sample_rate))

    def window_array(self, sample_rate: int) -> np.ndarray:
        n = self.length_samples(sample_rate)
        if self.window == "hann":
            return np.hanning(n)
        if self.window == "hamming":
            return np.hamming(n)
        return np.ones(n)


@dataclass(frozen=True)
class MelSpectrogram:
    """Log-mel magnitude frames (T x n_mels) plus the frame geometry."""

    frames: np.ndarray
    config: FrameConfig

    def __post_init__(self):
        frames = np.asarray(self.frames, dtype=np.float64)
        if frames.ndim != 2 or frames.shape[0] < 1:
            raise InvalidInputError("mel spectrogram must be a non-empty T x n_mels matrix")
        if not np.all(np.isfinite(frames)):
            raise InvalidInputError("mel spectrogram entries must be finite")
        object.__setattr__(self, "frames", frames)

    @property
    def n_frames(self) -> int:
        return self.frames.shape[0]

    @property
    def n_mels(self) -> int:
        return self.frames.shape[1]


def num_frames(audio: AudioBuffer, config: FrameConfig) -> int:
    """Frame count for one analysis pass; raises if audio is shorter than one frame."""
    length = config.length_samples(audio.sample_rate)
    shift = config.shift_samples(audio.sample_rate)
    n = audio.samples.size
    if n < length:
        raise InvalidInputError(
            f"audio of {n} samples is shorter than one {length}-sample frame"
        )
    return (n - length) // shift + 1


def frame_signal(audio: AudioBuffer, config: FrameConfig) -> np.ndarray:
    """Slice audio into the shared T x frame_length sample matrix (no window)."""
    length = config.length_samples(audio.sample_rate)
    shift = config.shift_samples(audio.sample_rate)
    count = num_frames(audio, config)
    idx = np.arange(count)[:, None] * shift + np.arange(length)[None, :]
    return audio.samples[idx]


def hz_to_mel(freq_hz):
    """HTK mel scale."""
    return 2595.0 * np.log10(1.0 + np.asarray(freq_hz, dtype=np.float64) / 700.0)


def mel_to_hz(mel):
    return 700.0 * (10.0 ** (np.asarray(mel, dtype=np.float64) / 2595.0) - 1.0)


def mel_filterbank(
    n_mels: int, n_fft: int, sample_rate: int, f_min: float = 0.0, f_max: float | None = None
) -> np.ndarray:
    """Triangular mel filters (n_mels x n_fft//2+1), triangles in Hz space."""
    if f_max is None:
        f_max = sample_rate / 2.0
    nodes_hz = mel_to_hz(np.linspace(hz_to_mel(f_min), hz_to_mel(f_max), n_mels + 2))
    bin_freqs = np.arange(n_fft // 2 + 1) * (sample_rate / n_fft)
    bank = np.zeros((n_mels, bin_freqs.size))
    for k in range(n_mels):
        left, center, right = nodes_hz[k], nodes_hz[k + 1], nodes_hz[k + 2]
        rising = (bin_freqs - left) / (center - left)
        falling = (right - bin_freqs) / (right - center)
        bank[k] = np.maximum(0.0, np.minimum(rising, falling))
    return bank


def _fft_size(frame_length: int) -> int:
    n = 1
    while n < frame_length:
        n *= 2
    return n


def mel_spectrogram(
    audio: AudioBuffer, config: FrameConfig, n_mels: int = DEFAULT_N_MELS
) -> MelSpectrogram:
    """Log-mel magnitude spectrogram on the shared frame grid.

    Parameters
    ----------
    audio : AudioBuffer
        Mono signal; must hold at least one full frame.
    config : FrameConfig
        Frame geometry and window.
    n_mels : int
        Number of mel bands spanning 0 .. sample_rate/2.

    Returns
    -------
    MelSpectrogram
        T x n_mels matrix of log magnitudes, floored at log(1e-5).
    """
    if n_mels < 1:
        raise InvalidInputError("n_mels must be >= 1")
    frames = frame_signal(audio, config) * config.window_array(audio.sample_rate)
    n_fft = _fft_size(frames.shape[1])
    magnitude = np.abs(np.fft.rfft(frames, n_fft, axis=1))
    bank = mel_filterbank(n_mels, n_fft, audio.sample_rate)
    mel = magnitude @ bank.T
    return MelSpectrogram(np.log(np.maximum(mel, LOG_MEL_FLOOR)), config)


def frame_energy(audio: AudioBuffer, config: FrameConfig) -> np.ndarray:
    """Per-frame RMS of the windowed frame (length T, non-negative)."""
    windowed = frame_signal(audio, config) * config.window_array(audio.sample_rate)
    return np.sqrt(np.mean(windowed**2, axis=1))


def window_rms(config: FrameConfig, sample_rate: int) -> float:
    """RMS of the analysis window; the factor frame_energy applies to a
    stationary signal's plain RMS."""
    w = config.window_array(sample_rate)
    return float(np.sqrt(np.mean(w**2)))


def _autocorrelate(frames: np.ndarray) -> np.ndarray:
    """Row-wise raw autocorrelation, lags 0..L-1, via zero-padded FFT."""
    length = frames.shape[-1]
    n_fft = _fft_size(2 * length)
    spectrum = np.fft.rfft(frames, n_fft, axis=-1)
    return np.fft.irfft(spectrum.real**2 + spectrum.imag**2, n_fft, axis=-1)[..., :length]


def _pitch_frames(audio: AudioBuffer, config: FrameConfig, f_min: float) -> np.ndarray:
    """Frames for periodicity analysis, one per grid frame.

    The window is sized to hold ~2.5 periods of the lowest searched
    pitch (never below the configured frame length) and centered on
    frame t's shift slot, i.e. at (t + 0.5) * frame_shift, so the pitch
    read at frame t reflects the signal during that slot. Windows are
    clamped at the signal edges; the frame count is unchanged. Short
    windows would make high-lag autocorrelation values unreliable, which
    turns into octave errors and phantom voicing after compensation.
    """
    sr = audio.sample_rate
    grid_length = config.length_samples(sr)
    length = max(grid_length, int(np.ceil(_PITCH_WINDOW_PERIODS * sr / f_min)))
    shift = config.shift_samples(sr)
    count = num_frames(audio, config)
    samples = audio.samples
    if samples.size < length:
        samples = np.concatenate([samples, np.zeros(length - samples.size)])
    starts = np.arange(count) * shift + (shift - length) // 2
    starts = np.clip(starts, 0, samples.size - length)
    idx = starts[:, None] + np.arange(length)[None, :]
    return samples[idx]


def estimate_pitch(
    audio: AudioBuffer,
    config: FrameConfig,
    f_min: float = DEFAULT_F_MIN,
    f_max: float = DEFAULT_F_MAX,
    voicing_threshold: float = VOICING_THRESHOLD,
) -> np.ndarray:
    """Track F0 per frame with normalized autocorrelation.

    Each frame is mean-subtracted, windowed, and autocorrelated; the
    normalized autocorrelation is compensated by the window's own
    autocorrelation. Candidate lags are the local maxima inside the
    period range; an octave cost prefers shorter lags, and the winning
    peak is refined by parabolic interpolation. Frames whose refined
    peak value stays below ``voicing_threshold`` are unvoiced.

    Returns
    -------
    np.ndarray
        Length-T contour; entries are 0 (unvoiced) or within [f_min, f_max].
    """
    sr = audio.sample_rate
    if not (0 < f_min < f_max < sr / 2):
        raise InvalidInputError(
            f"need 0 < f_min < f_max < sample_rate/2, got ({f_min}, {f_max}) at {sr} Hz"
        )
    frames = _pitch_frames(audio, config, f_min)
    length = frames.shape[1]
    if config.window == "hann":
        window = np.hanning(length)
    elif config.window == "hamming":
        window = np.hamming(length)
    else:
        window = np.ones(length)

    lag_min = max(2, int(np.floor(sr / f_max)))
    lag_max = min(int(np.ceil(sr / f_min)), length - 2)
    if lag_max <= lag_min:
        raise InvalidInputError(
            f"frame of {length} samples cannot resolve pitch down to {f_min} Hz"
        )

    window_acf = _autocorrelate(window[None, :])[0]
    window_acf_norm = np.maximum(window_acf / window_acf[0], _WINDOW_ACF_FLOOR)

    frames = frames - frames.mean(axis=1, keepdims=True)
    acf = _autocorrelate(frames * window)
    lags = np.arange(length)
    octave_bonus = -_OCTAVE_COST * np.log2(np.maximum(lags, 1) * (f_min / sr))

    f0 = np.zeros(frames.shape[0])
    for t, r in enumerate(acf):
        if r[0] <= 1e-18:  # silent frame
            continue
        rn = (r / r[0]) / window_acf_norm
        seg = rn[lag_min : lag_max + 1]
        local_max = (seg[1:-1] > seg[:-2]) & (seg[1:-1] > seg[2:])
        peaks = np.nonzero(local_max)[0] + 1 + lag_min
        if peaks.size == 0:
            continue
        best = peaks[np.argmax(rn[peaks] + octave_bonus[peaks])]
        # parabolic refinement of lag and height
        r_m, r_0, r_p = rn[best - 1], rn[best], rn[best + 1]
        denom = r_m - 2.0 * r_0 + r_p
        delta = 0.0 if abs(denom) < 1e-12 else 0.5 * (r_m - r_p) / denom
        height = r_0 - 0.25 * (r_m - r_p) * delta
        if height > voicing_threshold:
            f0[t] = float(np.clip(sr / (best + delta), f_min, f_max))
    return f0


def mfcc(spec: MelSpectrogram, n_coeffs: int = 13, add_deltas: bool = False) -> np.ndarray:
    """DCT-II cepstral coefficients of the log-mel rows.

    With ``add_deltas`` the first-order frame differences (central,
    edge-replicated) are appended, doubling the feature dimension.
    """
    if n_coeffs < 1:
        raise InvalidInputError("n_coeffs must be >= 1")
    if n_coeffs > spec.n_mels:
        raise InvalidInputError(
            f"n_coeffs={n_coeffs} exceeds the {spec.n_mels} available mel bands"
        )
    coeffs = dct(spec.frames, type=2, norm="ortho", axis=1)[:, :n_coeffs]
    if not add_deltas:
        return coeffs
    padded = np.vstack([coeffs[:1], coeffs, coeffs[-1:]])
    deltas = (padded[2:] - padded[:-2]) / 2.0
    return np.hstack([coeffs, deltas])


def read_wav(path) -> AudioBuffer:
    """Read a mono PCM16 or float32/float64 WAV file."""
    try:
        sample_rate, data = wavfile.read(path)
    except FileNotFoundError:
        raise
    except Exception as exc:
        raise InvalidInputError(f"could not parse WAV file {path}: {exc}") from exc
    if data.ndim != 1:
        raise InvalidInputError(
            f"{path}: only mono WAV is supported, got {data.shape[1]} channels"
        )
    if data.dtype == np.int16:
        samples = data.astype(np.float64) / 32768.0
    elif data.dtype in (np.float32, np.float64):
        samples = data.astype(np.float64)
    else:
        raise InvalidInputError(
            f"{path}: unsupported sample format {data.dtype}, expected PCM16 or float32"
        )
    return AudioBuffer(samples, int(sample_rate))


def write_wav(path, audio: AudioBuffer) -> None:
    """Write mono float32 WAV."""
    wavfile.write(path, audio.sample_rate, audio.samples.astype(np.float32))


def write_contour_csv(path, values) -> None:
    """Serialize a per-frame contour as (frame_index, value) rows."""
    values = np.asarray(values, dtype=np.float64)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["frame_index", "value"])
        for i, v in enumerate(values):
            writer.writerow([i, repr(float(v))])


def read_contour_csv(path) -> np.ndarray:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["frame_index", "value"]:
            raise InvalidInputError(f"{path}: not a contour CSV (bad header {header})")
        rows = [(int(idx), float(val)) for idx, val in reader]
    out = np.zeros(len(rows))
    for idx, val in rows:
        if not 0 <= idx < len(rows):
            raise InvalidInputError(f"{path}: frame index {idx} out of range")
        out[idx] = val
    return out
