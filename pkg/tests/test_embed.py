import json

import numpy as np
import pytest

from prosodyclone import dsp, embed, metrics, synth
from prosodyclone.errors import InvalidInputError
from prosodyclone.prosody import ProsodyTargets

SR = 16000


class TestLoadEmbedding:
    def test_json_round_trip(self, tmp_path):
        path = tmp_path / "emb.json"
        original = embed.SpeakerEmbedding(np.arange(5.0), embed.SOURCE_EXTERNAL)
        embed.save_embedding(path, original)
        loaded = embed.load_embedding(path)
        assert loaded.dim == 5
        assert loaded.source == embed.SOURCE_EXTERNAL
        assert np.array_equal(loaded.vector, original.vector)

    def test_declared_dimension_must_match(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"dim": 192, "values": [0.0] * 191}))
        with pytest.raises(InvalidInputError):
            embed.load_embedding(path)

    def test_non_finite_rejected(self, tmp_path):
        path = tmp_path / "nan.json"
        path.write_text(json.dumps({"dim": 2, "values": [0.0, 1e999]}))
        with pytest.raises(InvalidInputError):
            embed.load_embedding(path)

    def test_flat_csv_dimension_inferred(self, tmp_path):
        path = tmp_path / "emb.csv"
        path.write_text("0.5\n-1.25\n3.0\n")
        loaded = embed.load_embedding(path)
        assert loaded.dim == 3
        assert np.array_equal(loaded.vector, [0.5, -1.25, 3.0])

    def test_garbage_csv_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("hello\nworld\n")
        with pytest.raises(InvalidInputError):
            embed.load_embedding(path)


class TestStatsEmbedding:
    def test_deterministic_and_self_similar(self, frame_config, fresh_corpus):
        audio = fresh_corpus[0].audio
        a = embed.stats_embedding(audio, frame_config)
        b = embed.stats_embedding(audio, frame_config)
        assert np.array_equal(a.vector, b.vector)
        assert metrics.cosine_similarity(a, b) == pytest.approx(1.0)
        assert a.source == embed.SOURCE_STATS

    def test_documented_dimension(self, frame_config, fresh_corpus):
        a = embed.stats_embedding(fresh_corpus[0].audio, frame_config, n_mels=80)
        assert a.dim == 2 * 80 + 4

    def test_pitch_register_moves_pitch_coordinates(self, frame_config, timbres):
        phones = ("aa", "iy")
        durations = (20, 20)
        energy = (0.05, 0.05)
        low = synth.render(
            ProsodyTargets(durations, (150.0, 140.0), energy), phones, timbres,
            frame_config, SR, seed=3,
        )
        high = synth.render(
            ProsodyTargets(durations, (300.0, 280.0), energy), phones, timbres,
            frame_config, SR, seed=3,
        )
        a = embed.stats_embedding(low, frame_config)
        b = embed.stats_embedding(high, frame_config)
        # pitch mean coordinate sits right after the two mel blocks
        assert b.vector[160] > a.vector[160] * 1.5

    def test_silence_yields_floor_vector(self, frame_config):
        audio = dsp.AudioBuffer(np.zeros(SR), SR)
        a = embed.stats_embedding(audio, frame_config)
        assert np.all(np.isfinite(a.vector))
        assert np.all(a.vector[:80] == np.log(dsp.LOG_MEL_FLOOR))
        assert np.all(a.vector[160:] == 0.0)


def test_two_speaker_discrimination(frame_config, inventory, timbres):
    corp_a = synth.make_toy_corpus(
        6, inventory, seed=301, timbres=timbres.scaled(0.88),
        base_pitch=(100.0, 130.0),
    )
    corp_b = synth.make_toy_corpus(
        6, inventory, seed=302, timbres=timbres.scaled(1.12),
        base_pitch=(210.0, 270.0),
    )
    emb_a = [embed.stats_embedding(s.audio, frame_config) for s in corp_a]
    emb_b = [embed.stats_embedding(s.audio, frame_config) for s in corp_b]

    def mean_cos(xs, ys, skip_same=False):
        values = [
            metrics.cosine_similarity(x, y)
            for i, x in enumerate(xs)
            for j, y in enumerate(ys)
            if not (skip_same and i == j)
        ]
        return float(np.mean(values))

    within = (mean_cos(emb_a, emb_a, True) + mean_cos(emb_b, emb_b, True)) / 2
    across = mean_cos(emb_a, emb_b)
    assert within > across
