"""Command-line interface.

Subcommands cover the whole loop: ``corpus`` generates labeled toy
data, ``train-align`` fits the aligner, ``extract`` measures a prosody
signature from a reference WAV, ``clone-render`` de-normalizes a
signature into a target register and renders it, and ``eval`` scores
reference/hypothesis pairs.

Exit codes: 0 success, 1 validation error, 2 computation infeasibility,
3 I/O failure. Every command writes a ``*.runconfig.json`` sidecar next
to its primary output so runs can be reproduced exactly; outputs are
never silently replaced (pass --overwrite).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict, dataclass, replace

from . import align, dsp, embed, evaluate, prosody, synth
from .errors import (
    DegenerateInputError,
    InfeasibleAlignmentError,
    InvalidInputError,
    TrainingFailureError,
)

CONFIG_ENV_VAR = "PROSODYCLONE_CONFIG"
RUN_CONFIG_VERSION = "1"

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_INFEASIBLE = 2
EXIT_IO = 3


@dataclass(frozen=True)
class RunConfig:
    """All knobs a run depends on; serialized next to every output."""

    frame_length: float = 0.025
    frame_shift: float = 0.010
    window: str = "hann"
    n_mels: int = dsp.DEFAULT_N_MELS
    f_min: float = dsp.DEFAULT_F_MIN
    f_max: float = dsp.DEFAULT_F_MAX
    sample_rate: int = 16000
    epochs: int = 60
    learning_rate: float = 1e-2
    hidden_size: int = 128
    finetune_steps: int = 10
    seed: int = 0

    def frame_config(self) -> dsp.FrameConfig:
        return dsp.FrameConfig(self.frame_length, self.frame_shift, self.window)

    def train_config(self) -> align.TrainConfig:
        return align.TrainConfig(
            epochs=self.epochs,
            learning_rate=self.learning_rate,
            hidden_size=self.hidden_size,
            seed=self.seed,
        )

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        with open(path) as fh:
            data = json.load(fh)
        if data.get("version") != RUN_CONFIG_VERSION:
            raise InvalidInputError(
                f"unsupported run config version {data.get('version')!r}"
            )
        data.pop("version")
        return cls(**data)

    def save(self, path) -> None:
        payload = {"version": RUN_CONFIG_VERSION, **asdict(self)}
        with open(path, "w") as fh:
            json.dump(payload, fh, sort_keys=True, indent=2)


class _Parser(argparse.ArgumentParser):
    # usage problems are validation errors under the exit-code contract
    def error(self, message):
        self.print_usage(sys.stderr)
        raise InvalidInputError(message)


def _prepare_output(path, overwrite: bool) -> None:
    if os.path.exists(path) and not overwrite:
        raise OSError(f"{path} exists; pass --overwrite to replace it")
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)


def _sidecar(path) -> str:
    return f"{path}.runconfig.json"


def _load_run_config(args) -> RunConfig:
    path = args.config or os.environ.get(CONFIG_ENV_VAR)
    config = RunConfig.from_file(path) if path else RunConfig()
    overrides = {
        name: getattr(args, name)
        for name in (
            "frame_length", "frame_shift", "window", "n_mels", "f_min", "f_max",
            "epochs", "learning_rate", "hidden_size", "finetune_steps", "seed",
        )
        if getattr(args, name, None) is not None
    }
    return replace(config, **overrides) if overrides else config


def _parse_phones(text: str) -> tuple[str, ...]:
    phones = tuple(p for p in text.replace(",", " ").split() if p)
    if not phones:
        raise InvalidInputError("empty phone sequence")
    return phones


def cmd_corpus(args) -> int:
    run = _load_run_config(args)
    manifest_path = os.path.join(args.out, "manifest.json")
    _prepare_output(manifest_path, args.overwrite)
    samples = synth.make_toy_corpus(
        args.n, seed=run.seed, config=run.frame_config(), sample_rate=run.sample_rate
    )
    synth.write_corpus(samples, args.out, run.frame_config(), seed=run.seed)
    run.save(_sidecar(manifest_path))
    print(f"wrote {len(samples)} samples and {manifest_path}")
    return EXIT_OK


def cmd_train_align(args) -> int:
    run = _load_run_config(args)
    _prepare_output(args.out, args.overwrite)
    samples, config = synth.read_corpus(args.manifest)
    train_config = run.train_config()
    inventory = synth.default_inventory()
    corpus = [
        (
            align.aligner_features(
                s.audio, config, train_config.n_mels, train_config.n_mfcc,
                train_config.add_deltas,
            ),
            s.phones,
        )
        for s in samples
    ]
    model = align.train_aligner(corpus, inventory, train_config)
    model.save(args.out)
    run.save(_sidecar(args.out))
    history = model.loss_history
    print(f"initial mean CTC loss: {history[0]:.6f}")
    print(f"final mean CTC loss:   {history[-1]:.6f}")
    print(f"model written to {args.out}")
    return EXIT_OK


def cmd_extract(args) -> int:
    run = _load_run_config(args)
    _prepare_output(args.out, args.overwrite)
    model = align.AlignerModel.load(args.model)
    audio = dsp.read_wav(args.wav)
    phones = _parse_phones(args.phones)
    config = run.frame_config()
    signature = prosody.extract_signature(
        audio, phones, model, config,
        finetune_steps=run.finetune_steps, f_min=run.f_min, f_max=run.f_max,
    )
    prosody.save_signature(args.out, signature)
    alignment = align.Alignment(_spans_from_durations(signature.durations))
    align.write_alignment_csv(f"{args.out}.align.csv", alignment, phones)
    run.save(_sidecar(args.out))
    print(f"signature written to {args.out}")
    print("boundary report (phone start_frame end_frame):")
    for phone, (start, end) in zip(phones, alignment.spans):
        print(f"  {phone} {start} {end}")
    return EXIT_OK


def _spans_from_durations(durations) -> tuple[tuple[int, int], ...]:
    spans = []
    pos = 0
    for d in durations:
        spans.append((pos, pos + d))
        pos += d
    return tuple(spans)


def cmd_clone_render(args) -> int:
    run = _load_run_config(args)
    _prepare_output(args.out, args.overwrite)
    signature = prosody.load_signature(args.signature)
    config = run.frame_config()
    if args.register_from:
        register = prosody.register_from_audio(
            dsp.read_wav(args.register_from), config, run.f_min, run.f_max
        )
    elif args.pitch_mean is not None and args.energy_mean is not None:
        register = prosody.Register(args.pitch_mean, args.energy_mean)
    else:
        raise InvalidInputError(
            "supply either --register-from WAV or both --pitch-mean and --energy-mean"
        )
    timbres = synth.default_timbre_table()
    predictor = prosody.MeanPredictor(timbres.voiced_flags())
    targets = prosody.clone(predictor, signature.phones, signature, register)
    audio = synth.render(
        targets, signature.phones, timbres, config, run.sample_rate, seed=run.seed
    )
    dsp.write_wav(args.out, audio)
    run.save(_sidecar(args.out))
    print(f"rendered {audio.duration:.3f} s to {args.out}")
    return EXIT_OK


def _pair_paths(ref, hyp) -> list[tuple[str, str, str]]:
    if os.path.isdir(ref) != os.path.isdir(hyp):
        raise InvalidInputError("--ref and --hyp must both be files or both directories")
    if not os.path.isdir(ref):
        return [(os.path.basename(ref), ref, hyp)]
    ref_names = sorted(n for n in os.listdir(ref) if n.endswith(".wav"))
    hyp_names = sorted(n for n in os.listdir(hyp) if n.endswith(".wav"))
    if len(ref_names) != len(hyp_names):
        raise InvalidInputError(
            f"directory sizes differ: {len(ref_names)} reference vs {len(hyp_names)} hypothesis WAVs"
        )
    return [
        (rn, os.path.join(ref, rn), os.path.join(hyp, hn))
        for rn, hn in zip(ref_names, hyp_names)
    ]


def cmd_eval(args) -> int:
    run = _load_run_config(args)
    _prepare_output(args.out, args.overwrite)
    pairs = _pair_paths(args.ref, args.hyp)
    ref_phones = _parse_phones(args.ref_phones) if args.ref_phones else None
    hyp_phones = _parse_phones(args.hyp_phones) if args.hyp_phones else None
    if (ref_phones is None) != (hyp_phones is None):
        raise InvalidInputError("--ref-phones and --hyp-phones must be given together")
    if ref_phones is not None and len(pairs) != 1:
        raise InvalidInputError("phone sequences only apply to single-file evaluation")
    config = run.frame_config()
    reports = [
        evaluate.evaluate_pair(
            dsp.read_wav(ref_path),
            dsp.read_wav(hyp_path),
            config,
            pair_id=pair_id,
            n_mels=run.n_mels,
            f_min=run.f_min,
            f_max=run.f_max,
            ref_phones=ref_phones,
            hyp_phones=hyp_phones,
            with_cosine=args.cosine == "stats",
        )
        for pair_id, ref_path, hyp_path in sorted(pairs)
    ]
    evaluate.write_report_json(args.out, reports)
    if args.csv:
        evaluate.write_report_csv(args.csv, reports)
    run.save(_sidecar(args.out))
    for report in reports:
        print(f"{report.pair_id}: msd={report.msd:.4f} ffe={report.ffe:.4f}")
    print(f"report written to {args.out}")
    return EXIT_OK


def _add_common(parser) -> None:
    parser.add_argument("--config", help=f"run config JSON (default ${CONFIG_ENV_VAR})")
    parser.add_argument("--overwrite", action="store_true",
                        help="replace existing outputs")
    parser.add_argument("--frame-length", dest="frame_length", type=float)
    parser.add_argument("--frame-shift", dest="frame_shift", type=float)
    parser.add_argument("--window", choices=("hann", "hamming", "rectangular"))
    parser.add_argument("--n-mels", dest="n_mels", type=int)
    parser.add_argument("--fmin", dest="f_min", type=float)
    parser.add_argument("--fmax", dest="f_max", type=float)
    parser.add_argument("--seed", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="prosodyclone", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("corpus", help="generate a labeled toy corpus")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_corpus)

    p = sub.add_parser("train-align", help="train the aligner on a corpus manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--epochs", type=int)
    p.add_argument("--learning-rate", dest="learning_rate", type=float)
    p.add_argument("--hidden-size", dest="hidden_size", type=int)
    _add_common(p)
    p.set_defaults(func=cmd_train_align)

    p = sub.add_parser("extract", help="extract a prosody signature from a WAV")
    p.add_argument("--model", required=True)
    p.add_argument("--wav", required=True)
    p.add_argument("--phones", required=True,
                   help="transcript, comma or space separated")
    p.add_argument("--out", required=True)
    p.add_argument("--finetune-steps", dest="finetune_steps", type=int)
    _add_common(p)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("clone-render", help="apply a signature to a register and render")
    p.add_argument("--signature", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--register-from", dest="register_from",
                   help="WAV to take the target register from")
    p.add_argument("--pitch-mean", dest="pitch_mean", type=float)
    p.add_argument("--energy-mean", dest="energy_mean", type=float)
    _add_common(p)
    p.set_defaults(func=cmd_clone_render)

    p = sub.add_parser("eval", help="score reference vs hypothesis audio")
    p.add_argument("--ref", required=True, help="reference WAV or directory")
    p.add_argument("--hyp", required=True, help="hypothesis WAV or directory")
    p.add_argument("--out", required=True, help="JSON report path")
    p.add_argument("--csv", help="optional CSV export path")
    p.add_argument("--ref-phones", dest="ref_phones")
    p.add_argument("--hyp-phones", dest="hyp_phones")
    p.add_argument("--cosine", choices=("stats", "none"), default="stats")
    _add_common(p)
    p.set_defaults(func=cmd_eval)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except (InfeasibleAlignmentError, TrainingFailureError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (InvalidInputError, DegenerateInputError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
