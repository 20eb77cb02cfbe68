"""Phone-level prosody extraction, transfer, toy rendering, and evaluation."""

from .align import (
    Alignment,
    AlignerModel,
    PhoneInventory,
    Posteriorgram,
    TrainConfig,
    align_audio,
    ctc_forward,
    ctc_gradient,
    ensemble_boundaries,
    finetune_aligner,
    mas_decode,
    train_aligner,
)
from .dsp import (
    AudioBuffer,
    FrameConfig,
    MelSpectrogram,
    estimate_pitch,
    frame_energy,
    mel_spectrogram,
    mfcc,
    read_wav,
    write_wav,
)
from .embed import SpeakerEmbedding, load_embedding, stats_embedding
from .errors import (
    DegenerateInputError,
    InfeasibleAlignmentError,
    InvalidInputError,
    ProsodyCloneError,
    TrainingFailureError,
)
from .metrics import DtwResult, cosine_similarity, dtw, ffe, gpe, msd, per, vde
from .prosody import (
    MeanPredictor,
    ProsodyPredictor,
    ProsodySignature,
    ProsodyTargets,
    Register,
    apply_signature,
    average_per_phone,
    clone,
    extract_signature,
    load_signature,
    normalize,
    register_from_audio,
    save_signature,
)
from .synth import (
    PhoneTimbre,
    PhoneTimbreTable,
    ToySample,
    default_inventory,
    default_timbre_table,
    make_toy_corpus,
    render,
)

__version__ = "0.1.0"
