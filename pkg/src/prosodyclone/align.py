"""Lightweight trainable phone aligner.

A small feed-forward classifier maps MFCC frames to phone posteriors and
is trained with the CTC objective; decoding selects the posterior
columns of the target transcript and runs monotonic alignment search
(MAS) over them, yielding a contiguous partition of frames into phone
spans. The model is cheap enough to finetune on a single utterance
before decoding it.

The blank symbol always occupies the LAST posterior column; phone
columns follow the inventory order.
"""

from __future__ import annotations

import copy
import csv
import json
from dataclasses import dataclass, field

import numpy as np

from . import dsp
from .errors import (
    InfeasibleAlignmentError,
    InvalidInputError,
    TrainingFailureError,
)

MODEL_FORMAT_VERSION = "1"

_NEG_INF = -np.inf


@dataclass(frozen=True)
class PhoneInventory:
    """Ordered phone label set; the blank class sits after the last symbol."""

    symbols: tuple[str, ...]

    def __post_init__(self):
        symbols = tuple(self.symbols)
        if not symbols:
            raise InvalidInputError("phone inventory must not be empty")
        if len(set(symbols)) != len(symbols):
            raise InvalidInputError("phone inventory symbols must be unique")
        object.__setattr__(self, "symbols", symbols)

    @property
    def blank_index(self) -> int:
        return len(self.symbols)

    @property
    def n_classes(self) -> int:
        """Phones plus blank."""
        return len(self.symbols) + 1

    def encode(self, phones) -> np.ndarray:
        """Map phone symbols to label indices; unknown symbols raise."""
        lookup = {s: i for i, s in enumerate(self.symbols)}
        try:
            return np.asarray([lookup[p] for p in phones], dtype=np.intp)
        except KeyError as exc:
            raise InvalidInputError(f"phone {exc.args[0]!r} is not in the inventory") from exc


@dataclass(frozen=True)
class Posteriorgram:
    """Per-frame distribution over phones + blank (rows sum to 1)."""

    probs: np.ndarray

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=np.float64)
        if probs.ndim != 2 or probs.shape[0] < 1 or probs.shape[1] < 2:
            raise InvalidInputError("posteriorgram must be T x (K+1) with T >= 1")
        if np.any(probs < 0):
            raise InvalidInputError("posteriorgram entries must be non-negative")
        if np.any(np.abs(probs.sum(axis=1) - 1.0) > 1e-6):
            raise InvalidInputError("posteriorgram rows must sum to 1 within 1e-6")
        object.__setattr__(self, "probs", probs)

    @property
    def n_frames(self) -> int:
        return self.probs.shape[0]


@dataclass(frozen=True)
class Alignment:
    """Monotone, contiguous partition of frames into per-phone spans.

    Spans are (start, end) with end exclusive; consecutive spans abut,
    the first starts at 0, the last ends at the frame count, and every
    span holds at least one frame.
    """

    spans: tuple[tuple[int, int], ...]

    def __post_init__(self):
        spans = tuple((int(s), int(e)) for s, e in self.spans)
        if not spans:
            raise InvalidInputError("alignment must contain at least one span")
        if spans[0][0] != 0:
            raise InvalidInputError("first span must start at frame 0")
        for i, (start, end) in enumerate(spans):
            if end <= start:
                raise InvalidInputError(f"span {i} is empty: ({start}, {end})")
            if i and start != spans[i - 1][1]:
                raise InvalidInputError(
                    f"span {i} starts at {start}, expected {spans[i - 1][1]}"
                )
        object.__setattr__(self, "spans", spans)

    @property
    def n_frames(self) -> int:
        return self.spans[-1][1]

    @property
    def durations(self) -> tuple[int, ...]:
        return tuple(end - start for start, end in self.spans)


# ---------------------------------------------------------------------------
# CTC loss
# ---------------------------------------------------------------------------


def _extended_labels(labels: np.ndarray, blank: int) -> tuple[np.ndarray, np.ndarray]:
    """Blank-interleaved label row plus the skip-transition mask."""
    ext = np.full(2 * labels.size + 1, blank, dtype=np.intp)
    ext[1::2] = labels
    skip_ok = np.zeros(ext.size, dtype=bool)
    skip_ok[2:] = (ext[2:] != blank) & (ext[2:] != ext[:-2])
    return ext, skip_ok


def ctc_min_frames(labels) -> int:
    """Shortest input that still admits a CTC path for these labels."""
    labels = np.asarray(labels)
    if labels.size == 0:
        raise InvalidInputError("CTC target must be non-empty")
    repeats = int(np.sum(labels[1:] == labels[:-1]))
    return labels.size + repeats


def _check_ctc_inputs(log_probs: np.ndarray, labels) -> tuple[np.ndarray, np.ndarray]:
    log_probs = np.asarray(log_probs, dtype=np.float64)
    if log_probs.ndim != 2 or log_probs.shape[1] < 2:
        raise InvalidInputError("log_probs must be a T x (K+1) matrix")
    labels = np.asarray(labels, dtype=np.intp)
    if labels.size == 0:
        raise InvalidInputError("CTC target must be non-empty")
    blank = log_probs.shape[1] - 1
    if np.any(labels < 0) or np.any(labels >= blank):
        raise InvalidInputError(
            f"labels must lie in [0, {blank - 1}] (column {blank} is the blank)"
        )
    needed = ctc_min_frames(labels)
    if log_probs.shape[0] < needed:
        raise InfeasibleAlignmentError(
            f"{log_probs.shape[0]} frames cannot carry a target needing {needed}"
        )
    return log_probs, labels


def _ctc_alpha(log_probs, ext, skip_ok) -> np.ndarray:
    t_total = log_probs.shape[0]
    lp_ext = log_probs[:, ext]
    n_states = ext.size
    alpha = np.full((t_total, n_states), _NEG_INF)
    alpha[0, 0] = lp_ext[0, 0]
    if n_states > 1:
        alpha[0, 1] = lp_ext[0, 1]
    for t in range(1, t_total):
        prev = alpha[t - 1]
        stay = prev
        step = np.concatenate(([_NEG_INF], prev[:-1]))
        skip = np.concatenate(([_NEG_INF, _NEG_INF], prev[:-2]))
        skip = np.where(skip_ok, skip, _NEG_INF)
        alpha[t] = np.logaddexp(np.logaddexp(stay, step), skip) + lp_ext[t]
    return alpha


def _ctc_beta(log_probs, ext, skip_ok) -> np.ndarray:
    """Backward scores; emission at frame t is NOT included in beta[t]."""
    t_total = log_probs.shape[0]
    lp_ext = log_probs[:, ext]
    n_states = ext.size
    beta = np.full((t_total, n_states), _NEG_INF)
    beta[-1, -1] = 0.0
    if n_states > 1:
        beta[-1, -2] = 0.0
    # skip from state s to s+2 is allowed when skip_ok[s+2]
    skip_from = np.zeros(n_states, dtype=bool)
    skip_from[:-2] = skip_ok[2:]
    for t in range(t_total - 2, -1, -1):
        nxt = beta[t + 1] + lp_ext[t + 1]
        stay = nxt
        step = np.concatenate((nxt[1:], [_NEG_INF]))
        skip = np.concatenate((nxt[2:], [_NEG_INF, _NEG_INF]))
        skip = np.where(skip_from, skip, _NEG_INF)
        beta[t] = np.logaddexp(np.logaddexp(stay, step), skip)
    return beta


def ctc_forward(log_probs, labels) -> float:
    """Negative log-likelihood of the label sequence under CTC.

    ``log_probs`` rows are per-frame log distributions over phones plus
    a final blank column; ``labels`` are phone indices. Raises
    InfeasibleAlignmentError when the frame count cannot carry the
    target.
    """
    log_probs, labels = _check_ctc_inputs(log_probs, labels)
    ext, skip_ok = _extended_labels(labels, log_probs.shape[1] - 1)
    alpha = _ctc_alpha(log_probs, ext, skip_ok)
    tail = alpha[-1, -1] if ext.size == 1 else np.logaddexp(alpha[-1, -1], alpha[-1, -2])
    return float(-tail)


def ctc_label_posteriors(log_probs, labels) -> tuple[float, np.ndarray]:
    """CTC NLL plus the per-frame posterior over classes (T x (K+1)).

    The posterior row t sums to 1; entry (t, k) is the probability that
    a path emits class k at frame t given the target sequence.
    """
    log_probs, labels = _check_ctc_inputs(log_probs, labels)
    n_classes = log_probs.shape[1]
    ext, skip_ok = _extended_labels(labels, n_classes - 1)
    alpha = _ctc_alpha(log_probs, ext, skip_ok)
    beta = _ctc_beta(log_probs, ext, skip_ok)
    log_z = alpha[-1, -1] if ext.size == 1 else np.logaddexp(alpha[-1, -1], alpha[-1, -2])
    occupancy = np.exp(alpha + beta - log_z)
    posterior = np.zeros((log_probs.shape[0], n_classes))
    np.add.at(posterior.T, ext, occupancy.T)
    return float(-log_z), posterior


def ctc_gradient(log_probs, labels) -> np.ndarray:
    """Gradient of the CTC NLL with respect to the log-probabilities.

    Equals minus the class posterior, so every row sums to -1.
    """
    _, posterior = ctc_label_posteriors(log_probs, labels)
    return -posterior


# ---------------------------------------------------------------------------
# Monotonic alignment search
# ---------------------------------------------------------------------------


def mas_decode(post: Posteriorgram, labels) -> Alignment:
    """Maximum-score monotone contiguous partition of frames into phones.

    The score of a partition is the sum over frames of the log posterior
    of the phone assigned to that frame (blank column unused). Ties in
    the backtracking prefer staying on the current phone, which favors
    longer early spans and makes the result deterministic.
    """
    labels = np.asarray(labels, dtype=np.intp)
    if labels.size == 0:
        raise InvalidInputError("MAS target must be non-empty")
    if np.any(labels < 0) or np.any(labels >= post.probs.shape[1]):
        raise InvalidInputError("MAS labels out of posteriorgram range")
    t_total = post.n_frames
    n_phones = labels.size
    if t_total < n_phones:
        raise InfeasibleAlignmentError(
            f"{t_total} frames cannot cover {n_phones} phones"
        )
    scores = np.log(np.maximum(post.probs[:, labels], 1e-300))

    q = np.full((t_total, n_phones), _NEG_INF)
    q[0, 0] = scores[0, 0]
    for t in range(1, t_total):
        stay = q[t - 1]
        advance = np.concatenate(([_NEG_INF], q[t - 1, :-1]))
        q[t] = scores[t] + np.maximum(stay, advance)

    bounds = np.empty(n_phones + 1, dtype=np.intp)
    bounds[0], bounds[-1] = 0, t_total
    j = n_phones - 1
    for t in range(t_total - 1, 0, -1):
        if j == 0:
            break
        if q[t - 1, j] >= q[t - 1, j - 1]:  # tie -> stay on current phone
            continue
        bounds[j] = t
        j -= 1
    assert j == 0, "MAS backtracking left phones unplaced"
    return Alignment(tuple((int(bounds[i]), int(bounds[i + 1])) for i in range(n_phones)))


def alignment_log_score(post: Posteriorgram, labels, alignment: Alignment) -> float:
    """Sum of per-frame log posteriors under a given partition."""
    labels = np.asarray(labels, dtype=np.intp)
    if len(alignment.spans) != labels.size:
        raise InvalidInputError("alignment span count must match label count")
    if alignment.n_frames != post.n_frames:
        raise InvalidInputError("alignment frame count must match posteriorgram")
    scores = np.log(np.maximum(post.probs[:, labels], 1e-300))
    total = 0.0
    for j, (start, end) in enumerate(alignment.spans):
        total += float(scores[start:end, j].sum())
    return total


# ---------------------------------------------------------------------------
# Aligner model
# ---------------------------------------------------------------------------


def aligner_features(
    audio: dsp.AudioBuffer,
    config: dsp.FrameConfig,
    n_mels: int = 40,
    n_mfcc: int = 13,
    add_deltas: bool = True,
) -> np.ndarray:
    """MFCC(+delta) frame features the aligner consumes."""
    spec = dsp.mel_spectrogram(audio, config, n_mels=n_mels)
    return dsp.mfcc(spec, n_coeffs=n_mfcc, add_deltas=add_deltas)


@dataclass
class TrainConfig:
    """Hyperparameters for aligner training."""

    epochs: int = 60
    learning_rate: float = 1e-2
    hidden_size: int = 128
    seed: int = 0
    n_mels: int = 40
    n_mfcc: int = 13
    add_deltas: bool = True


@dataclass
class AlignerModel:
    """Framewise phone classifier: two tanh hidden layers over
    standardized MFCC features, softmax over phones + blank."""

    inventory: PhoneInventory
    weights: list[np.ndarray]
    feat_mean: np.ndarray
    feat_std: np.ndarray
    hidden_size: int = 128
    n_mels: int = 40
    n_mfcc: int = 13
    add_deltas: bool = True
    version: str = MODEL_FORMAT_VERSION
    loss_history: list[float] = field(default_factory=list)

    @property
    def input_dim(self) -> int:
        return self.n_mfcc * (2 if self.add_deltas else 1)

    @classmethod
    def initialize(cls, inventory: PhoneInventory, config: TrainConfig,
                   feat_mean, feat_std) -> "AlignerModel":
        rng = np.random.default_rng(config.seed)
        dims = [
            config.n_mfcc * (2 if config.add_deltas else 1),
            config.hidden_size,
            config.hidden_size,
            inventory.n_classes,
        ]
        weights = []
        for d_in, d_out in zip(dims[:-1], dims[1:]):
            scale = np.sqrt(2.0 / (d_in + d_out))
            weights.append(rng.normal(0.0, scale, size=(d_in, d_out)))
            weights.append(np.zeros(d_out))
        return cls(
            inventory=inventory,
            weights=weights,
            feat_mean=np.asarray(feat_mean, dtype=np.float64),
            feat_std=np.asarray(feat_std, dtype=np.float64),
            hidden_size=config.hidden_size,
            n_mels=config.n_mels,
            n_mfcc=config.n_mfcc,
            add_deltas=config.add_deltas,
        )

    def copy(self) -> "AlignerModel":
        return copy.deepcopy(self)

    def _standardize(self, features: np.ndarray) -> np.ndarray:
        features = np.asarray(features, dtype=np.float64)
        if features.ndim != 2 or features.shape[1] != self.input_dim:
            raise InvalidInputError(
                f"expected T x {self.input_dim} features, got {features.shape}"
            )
        return (features - self.feat_mean) / self.feat_std

    def _forward(self, x: np.ndarray):
        w1, b1, w2, b2, w3, b3 = self.weights
        z1 = np.tanh(x @ w1 + b1)
        z2 = np.tanh(z1 @ w2 + b2)
        return z1, z2, z2 @ w3 + b3

    def log_probs(self, features: np.ndarray) -> np.ndarray:
        """Per-frame log distribution over phones + blank."""
        x = self._standardize(features)
        _, _, logits = self._forward(x)
        return logits - _logsumexp_rows(logits)

    def posteriorgram(self, features: np.ndarray) -> Posteriorgram:
        return Posteriorgram(np.exp(self.log_probs(features)))

    def to_dict(self) -> dict:
        names = ["w1", "b1", "w2", "b2", "w3", "b3"]
        return {
            "format_version": self.version,
            "inventory": list(self.inventory.symbols),
            "hidden_size": self.hidden_size,
            "n_mels": self.n_mels,
            "n_mfcc": self.n_mfcc,
            "add_deltas": self.add_deltas,
            "feat_mean": self.feat_mean.tolist(),
            "feat_std": self.feat_std.tolist(),
            "weights": {n: w.tolist() for n, w in zip(names, self.weights)},
            "loss_history": list(self.loss_history),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "AlignerModel":
        version = data.get("format_version")
        if version != MODEL_FORMAT_VERSION:
            raise InvalidInputError(
                f"unsupported model format version {version!r}, "
                f"expected {MODEL_FORMAT_VERSION!r}"
            )
        names = ["w1", "b1", "w2", "b2", "w3", "b3"]
        weights = [np.asarray(data["weights"][n], dtype=np.float64) for n in names]
        model = cls(
            inventory=PhoneInventory(tuple(data["inventory"])),
            weights=weights,
            feat_mean=np.asarray(data["feat_mean"], dtype=np.float64),
            feat_std=np.asarray(data["feat_std"], dtype=np.float64),
            hidden_size=int(data["hidden_size"]),
            n_mels=int(data["n_mels"]),
            n_mfcc=int(data["n_mfcc"]),
            add_deltas=bool(data["add_deltas"]),
            loss_history=[float(v) for v in data.get("loss_history", [])],
        )
        if not all(np.all(np.isfinite(w)) for w in model.weights):
            raise InvalidInputError("model weights must be finite")
        return model

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, sort_keys=True)

    @classmethod
    def load(cls, path) -> "AlignerModel":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def _logsumexp_rows(logits: np.ndarray) -> np.ndarray:
    m = logits.max(axis=1, keepdims=True)
    return m + np.log(np.exp(logits - m).sum(axis=1, keepdims=True))


def _sample_loss_and_grads(model: AlignerModel, features, labels):
    """Per-frame-normalized CTC loss and parameter gradients for one sample."""
    x = model._standardize(features)
    z1, z2, logits = model._forward(x)
    log_probs = logits - _logsumexp_rows(logits)
    nll, posterior = ctc_label_posteriors(log_probs, labels)
    t_total = x.shape[0]
    d_logits = (np.exp(log_probs) - posterior) / t_total
    w1, b1, w2, b2, w3, b3 = model.weights
    d_z2 = d_logits @ w3.T
    d_a2 = d_z2 * (1.0 - z2**2)
    d_z1 = d_a2 @ w2.T
    d_a1 = d_z1 * (1.0 - z1**2)
    grads = [
        x.T @ d_a1,
        d_a1.sum(axis=0),
        z1.T @ d_a2,
        d_a2.sum(axis=0),
        z2.T @ d_logits,
        d_logits.sum(axis=0),
    ]
    return nll / t_total, grads


def _mean_corpus_loss(model: AlignerModel, encoded_corpus) -> float:
    total = 0.0
    for features, labels in encoded_corpus:
        total += ctc_forward(model.log_probs(features), labels) / features.shape[0]
    return total / len(encoded_corpus)


def train_aligner(corpus, inventory: PhoneInventory,
                  config: TrainConfig | None = None) -> AlignerModel:
    """Train the framewise classifier with per-sample SGD on the CTC loss.

    ``corpus`` is a list of (feature matrix, phone symbol sequence)
    pairs whose features were produced with the same parameters recorded
    in ``config``. The returned model's ``loss_history`` holds the mean
    per-frame CTC loss at initialization and after each epoch; the final
    entry is guaranteed to be strictly below the first.
    """
    config = config or TrainConfig()
    if not corpus:
        raise InvalidInputError("training corpus must not be empty")
    encoded = []
    dim = None
    for features, phones in corpus:
        features = np.asarray(features, dtype=np.float64)
        if features.ndim != 2 or features.shape[0] < 1:
            raise InvalidInputError("each corpus entry needs a T x D feature matrix")
        if dim is None:
            dim = features.shape[1]
        elif features.shape[1] != dim:
            raise InvalidInputError(
                f"inconsistent feature dimension: {features.shape[1]} vs {dim}"
            )
        encoded.append((features, inventory.encode(phones)))
    expected_dim = config.n_mfcc * (2 if config.add_deltas else 1)
    if dim != expected_dim:
        raise InvalidInputError(
            f"feature dimension {dim} does not match config ({expected_dim})"
        )

    stacked = np.vstack([f for f, _ in encoded])
    feat_mean = stacked.mean(axis=0)
    feat_std = np.maximum(stacked.std(axis=0), 1e-8)
    model = AlignerModel.initialize(inventory, config, feat_mean, feat_std)

    rng = np.random.default_rng(config.seed + 1)
    initial = _mean_corpus_loss(model, encoded)
    model.loss_history.append(initial)
    order = np.arange(len(encoded))
    for epoch in range(config.epochs):
        rng.shuffle(order)
        for idx in order:
            features, labels = encoded[idx]
            loss, grads = _sample_loss_and_grads(model, features, labels)
            if not np.isfinite(loss):
                raise TrainingFailureError(
                    f"CTC loss diverged (loss={loss}) at epoch {epoch}, sample {idx}; "
                    "try a smaller learning rate"
                )
            for w, g in zip(model.weights, grads):
                w -= config.learning_rate * g
        epoch_loss = _mean_corpus_loss(model, encoded)
        if not np.isfinite(epoch_loss):
            raise TrainingFailureError(
                f"mean CTC loss diverged after epoch {epoch}; try a smaller learning rate"
            )
        model.loss_history.append(epoch_loss)
    if not model.loss_history[-1] < initial:
        raise TrainingFailureError(
            f"training did not reduce the mean CTC loss "
            f"({initial:.4f} -> {model.loss_history[-1]:.4f})"
        )
    return model


def finetune_aligner(model: AlignerModel, sample, steps: int,
                     learning_rate: float = 1e-2) -> AlignerModel:
    """Adapt a copy of the model to one (features, phones) sample.

    Runs up to ``steps`` SGD steps with per-step backtracking: a step
    that would raise this sample's CTC loss is retried at half the step
    size and ultimately skipped, so the sample loss never increases.
    The input model is never mutated.
    """
    if steps < 0:
        raise InvalidInputError("steps must be >= 0")
    tuned = model.copy()
    if steps == 0:
        return tuned
    features, phones = sample
    features = np.asarray(features, dtype=np.float64)
    labels = tuned.inventory.encode(phones)
    # raises InfeasibleAlignmentError up-front for impossible samples
    current, _ = _sample_loss_and_grads(tuned, features, labels)
    for _ in range(steps):
        _, grads = _sample_loss_and_grads(tuned, features, labels)
        step = learning_rate
        for _ in range(8):
            trial = [w - step * g for w, g in zip(tuned.weights, grads)]
            saved = tuned.weights
            tuned.weights = trial
            new_loss, _ = _sample_loss_and_grads(tuned, features, labels)
            if np.isfinite(new_loss) and new_loss <= current:
                current = new_loss
                break
            tuned.weights = saved
            step *= 0.5
    return tuned


def align_audio(
    model: AlignerModel,
    audio: dsp.AudioBuffer,
    phones,
    config: dsp.FrameConfig,
    finetune_steps: int = 10,
) -> Alignment:
    """Full decode: features -> optional finetuning -> posteriors -> MAS."""
    phones = list(phones)
    if not phones:
        raise InvalidInputError("transcript must be non-empty")
    labels = model.inventory.encode(phones)
    features = aligner_features(
        audio, config, n_mels=model.n_mels, n_mfcc=model.n_mfcc,
        add_deltas=model.add_deltas,
    )
    if features.shape[0] < len(phones):
        raise InfeasibleAlignmentError(
            f"{features.shape[0]} frames cannot cover {len(phones)} phones"
        )
    if finetune_steps > 0:
        model = finetune_aligner(model, (features, phones), finetune_steps)
    return mas_decode(model.posteriorgram(features), labels)


def ensemble_boundaries(alignments) -> Alignment:
    """Average the interior boundaries of several alignments.

    All alignments must cover the same frame count with the same phone
    count. Each interior boundary of the result is the arithmetic mean
    of the corresponding input boundaries rounded to the nearest frame
    (ties to even); validity is preserved because means of strictly
    increasing integer boundaries stay at least one frame apart.
    """
    alignments = list(alignments)
    if not alignments:
        raise InvalidInputError("need at least one alignment to ensemble")
    n_phones = len(alignments[0].spans)
    n_frames = alignments[0].n_frames
    for a in alignments[1:]:
        if len(a.spans) != n_phones:
            raise InvalidInputError(
                f"phone counts differ: {len(a.spans)} vs {n_phones}"
            )
        if a.n_frames != n_frames:
            raise InvalidInputError(f"frame counts differ: {a.n_frames} vs {n_frames}")
    interior = np.array([[span[1] for span in a.spans[:-1]] for a in alignments])
    bounds = [0]
    if interior.size:
        bounds.extend(int(b) for b in np.rint(interior.mean(axis=0)))
    bounds.append(n_frames)
    return Alignment(tuple((bounds[i], bounds[i + 1]) for i in range(n_phones)))


# ---------------------------------------------------------------------------
# File formats
# ---------------------------------------------------------------------------


def write_alignment_csv(path, alignment: Alignment, phones) -> None:
    phones = list(phones)
    if len(phones) != len(alignment.spans):
        raise InvalidInputError("phone count must match span count")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["phone", "start_frame", "end_frame"])
        for phone, (start, end) in zip(phones, alignment.spans):
            writer.writerow([phone, start, end])


def read_alignment_csv(path) -> tuple[Alignment, list[str]]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["phone", "start_frame", "end_frame"]:
            raise InvalidInputError(f"{path}: not an alignment CSV (bad header {header})")
        phones, spans = [], []
        for phone, start, end in reader:
            phones.append(phone)
            spans.append((int(start), int(end)))
    return Alignment(tuple(spans)), phones


def write_posteriorgram_csv(path, post: Posteriorgram, inventory: PhoneInventory) -> None:
    """Debug dump: one row per frame, one column per class."""
    if post.probs.shape[1] != inventory.n_classes:
        raise InvalidInputError("posteriorgram width must match inventory size")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["frame"] + list(inventory.symbols) + ["<blank>"])
        for t, row in enumerate(post.probs):
            writer.writerow([t] + [repr(float(p)) for p in row])
