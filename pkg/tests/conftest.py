import pytest

from prosodyclone import align, dsp, synth

SAMPLE_RATE = 16000

# Extraction settings used by the closed-loop tests: the synthetic corpus
# is clean enough that a high voicing threshold keeps phone-boundary
# frames with mixed periodicity out of the per-phone means.
EXTRACT_KW = {"finetune_steps": 10, "voicing_threshold": 0.9}


@pytest.fixture(scope="session")
def frame_config():
    return dsp.FrameConfig()


@pytest.fixture(scope="session")
def inventory():
    return synth.default_inventory()


@pytest.fixture(scope="session")
def timbres():
    return synth.default_timbre_table()


@pytest.fixture(scope="session")
def training_samples(inventory, timbres):
    """Labeled corpus covering the registers and speaker-like timbre
    variants the closed-loop tests render."""
    parts = [
        synth.make_toy_corpus(36, inventory, seed=20250810),
        synth.make_toy_corpus(
            12, inventory, seed=20250811, base_pitch=(80.0, 360.0), pitch_spread=0.10
        ),
        synth.make_toy_corpus(
            8, inventory, seed=20250812, timbres=timbres.scaled(0.88),
            base_pitch=(100.0, 130.0),
        ),
        synth.make_toy_corpus(
            8, inventory, seed=20250813, timbres=timbres.scaled(1.12),
            base_pitch=(210.0, 270.0),
        ),
    ]
    return [sample for part in parts for sample in part]


@pytest.fixture(scope="session")
def trained_model(training_samples, inventory, frame_config):
    features = [
        (align.aligner_features(s.audio, frame_config), s.phones)
        for s in training_samples
    ]
    return align.train_aligner(features, inventory, align.TrainConfig(epochs=80, seed=7))


@pytest.fixture(scope="session")
def fresh_corpus(inventory):
    """Samples the aligner never trained on."""
    return synth.make_toy_corpus(25, inventory, seed=99)
