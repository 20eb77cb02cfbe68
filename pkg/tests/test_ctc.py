import itertools
import math

import numpy as np
import pytest

from prosodyclone.align import (
    ctc_forward,
    ctc_gradient,
    ctc_label_posteriors,
    ctc_min_frames,
)
from prosodyclone.errors import InfeasibleAlignmentError, InvalidInputError


def collapse(path, blank):
    """Remove repeats, then blanks."""
    out = []
    prev = None
    for symbol in path:
        if symbol != prev:
            if symbol != blank:
                out.append(symbol)
            prev = symbol
    return tuple(out)


def brute_force_probs(probs):
    """Total probability per collapsed label sequence, by enumerating
    every frame-level path."""
    t_total, n_classes = probs.shape
    blank = n_classes - 1
    table = {}
    for path in itertools.product(range(n_classes), repeat=t_total):
        p = 1.0
        for t, symbol in enumerate(path):
            p *= probs[t, symbol]
        key = collapse(path, blank)
        table[key] = table.get(key, 0.0) + p
    return table


def random_log_probs(rng, t_total, n_classes):
    probs = rng.uniform(0.05, 1.0, size=(t_total, n_classes))
    probs /= probs.sum(axis=1, keepdims=True)
    return np.log(probs)


def test_single_frame_single_label():
    log_probs = np.log(np.array([[0.7, 0.3]]))
    assert math.isclose(ctc_forward(log_probs, [0]), -math.log(0.7), rel_tol=1e-12)


def test_two_frames_single_label_path_sum():
    # paths collapsing to [a]: aa, a-, -a
    probs = np.array([[0.6, 0.4], [0.3, 0.7]])
    expected = 0.6 * 0.3 + 0.6 * 0.7 + 0.4 * 0.3
    loss = ctc_forward(np.log(probs), [0])
    assert math.isclose(loss, -math.log(expected), rel_tol=1e-12)


def test_infeasible_when_too_few_frames():
    log_probs = np.log(np.full((1, 3), 1.0 / 3.0))
    with pytest.raises(InfeasibleAlignmentError):
        ctc_forward(log_probs, [0, 1])


def test_repeated_label_needs_separating_blank():
    assert ctc_min_frames([0, 0]) == 3
    log_probs = np.log(np.full((2, 2), 0.5))
    with pytest.raises(InfeasibleAlignmentError):
        ctc_forward(log_probs, [0, 0])


def test_empty_target_rejected():
    with pytest.raises(InvalidInputError):
        ctc_forward(np.log(np.full((3, 2), 0.5)), [])


def test_label_out_of_range_rejected():
    with pytest.raises(InvalidInputError):
        ctc_forward(np.log(np.full((3, 3), 1 / 3)), [2])  # 2 is the blank column


def test_matches_brute_force_enumeration():
    rng = np.random.default_rng(42)
    for n_phones in (1, 2, 3, 4):
        for t_total in range(1, 7):
            log_probs = random_log_probs(rng, t_total, n_phones + 1)
            table = brute_force_probs(np.exp(log_probs))
            for length in (1, 2, 3):
                for target in itertools.product(range(n_phones), repeat=length):
                    target = list(target)
                    if ctc_min_frames(target) > t_total:
                        with pytest.raises(InfeasibleAlignmentError):
                            ctc_forward(log_probs, target)
                        continue
                    expected = table.get(tuple(target), 0.0)
                    loss = ctc_forward(log_probs, target)
                    assert math.isclose(
                        loss, -math.log(expected), rel_tol=1e-10
                    ), f"T={t_total} K={n_phones} target={target}"


def test_gradient_matches_finite_differences():
    rng = np.random.default_rng(7)
    log_probs = random_log_probs(rng, 4, 3)
    target = [0, 1]
    grad = ctc_gradient(log_probs, target)
    eps = 1e-6
    for t in range(4):
        for k in range(3):
            bumped = log_probs.copy()
            bumped[t, k] += eps
            dipped = log_probs.copy()
            dipped[t, k] -= eps
            numeric = (ctc_forward(bumped, target) - ctc_forward(dipped, target)) / (
                2 * eps
            )
            if abs(grad[t, k]) > 1e-6:
                assert abs(numeric - grad[t, k]) / abs(grad[t, k]) < 1e-4
            else:
                assert abs(numeric) < 1e-5


def test_gradient_rows_sum_to_minus_one():
    # exactly one class is emitted per frame, so the per-frame posterior
    # masses sum to 1 and the NLL gradient rows to -1
    rng = np.random.default_rng(11)
    log_probs = random_log_probs(rng, 6, 4)
    grad = ctc_gradient(log_probs, [0, 2, 1])
    assert np.allclose(grad.sum(axis=1), -1.0, atol=1e-10)


def test_logit_gradient_is_softmax_minus_posterior():
    # with rows produced by log-softmax, chain rule gives
    # d(nll)/d(logits) = softmax - posterior; checked by finite differences
    rng = np.random.default_rng(13)
    logits = rng.normal(size=(4, 3))

    def loss_of(logits):
        log_probs = logits - np.log(np.exp(logits).sum(axis=1, keepdims=True))
        return ctc_forward(log_probs, [0, 1])

    log_probs = logits - np.log(np.exp(logits).sum(axis=1, keepdims=True))
    _, posterior = ctc_label_posteriors(log_probs, [0, 1])
    analytic = np.exp(log_probs) - posterior
    eps = 1e-6
    for t in range(4):
        for k in range(3):
            bumped = logits.copy()
            bumped[t, k] += eps
            dipped = logits.copy()
            dipped[t, k] -= eps
            numeric = (loss_of(bumped) - loss_of(dipped)) / (2 * eps)
            assert abs(numeric - analytic[t, k]) < 1e-6


def test_posterior_concentrates_on_dominant_path():
    # one path carries almost all probability: posterior ~ its indicator
    probs = np.full((3, 3), 1e-4)
    for t, symbol in enumerate([0, 2, 1]):  # a, blank, b
        probs[t, symbol] = 1.0
    probs /= probs.sum(axis=1, keepdims=True)
    _, posterior = ctc_label_posteriors(np.log(probs), [0, 1])
    for t, symbol in enumerate([0, 2, 1]):
        assert posterior[t, symbol] > 0.999


def test_posterior_matches_brute_force_path_posterior():
    rng = np.random.default_rng(21)
    log_probs = random_log_probs(rng, 5, 3)
    probs = np.exp(log_probs)
    target = (0, 1)
    blank = 2
    # enumerate the paths that collapse to the target and accumulate
    # per-frame emission mass
    total = 0.0
    mass = np.zeros_like(probs)
    for path in itertools.product(range(3), repeat=5):
        if collapse(path, blank) != target:
            continue
        p = 1.0
        for t, symbol in enumerate(path):
            p *= probs[t, symbol]
        total += p
        for t, symbol in enumerate(path):
            mass[t, symbol] += p
    _, posterior = ctc_label_posteriors(log_probs, list(target))
    assert np.allclose(posterior, mass / total, atol=1e-12)
