"""``recvae`` command-line entry point.

Every subcommand writes ``config_<command>.txt`` into its output directory
holding all effective settings; ``recvae <command> --config <that file>``
repeats the run.
Values given on the command line override the config file, which overrides
the built-in defaults.

Exit codes: 0 success, 1 usage or invalid setting, 2 data or format error,
3 numerical failure.
"""
import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import BACKEND
from .baselines import TABLE_ROWS, AblationConfig, Popularity, configure_ablation, ease_fit, format_table
from .baselines.ease import EaseModel
from .data import (
    load_ratings,
    planted_factor_data,
    preprocess,
    read_bundle,
    split_users,
    write_bundle,
    write_manifest,
    write_ratings_csv,
)
from .data.bundle import read_manifest
from .errors import CapabilityError, DataError, NumericalError
from .evaluation import DEFAULT_METRICS, evaluate
from .model import ModelConfig, RecVAE
from .model.checkpoint import load_checkpoint
from .training import TrainConfig, train

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERICAL = 0, 1, 2, 3
BUNDLE_NAME = "dataset.rvds"

logger = logging.getLogger("recvae")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _weights(text):
    parts = [p for p in text.replace(" ", "").split(",") if p]
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected three comma-separated weights")
    return tuple(float(p) for p in parts)


def _bool(text):
    value = str(text).strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"not a boolean: {text!r}")


def _codes(text):
    return tuple(AblationConfig.from_code(c.strip()).code for c in str(text).split(",") if c.strip())


# name -> (type, default, help); shared by the command line and config files
_COMMON = {
    "data": (str, None, "input CSV (preprocess) or dataset bundle / directory"),
    "out": (str, None, "output directory"),
    "seed": (int, 0, "random seed"),
}
_PREPROCESS = {
    "heldout_users": (int, 10000, "users in each of the validation and test sets"),
    "rating_threshold": (float, 4.0, "ratings at or above this count as positive"),
    "min_user_interactions": (int, 5, "drop users with fewer positives"),
    "fold_in_fraction": (float, 0.8, "share of a held-out user's items used as input"),
}
_SYNTH = {
    "users": (int, 2000, "number of users"),
    "items": (int, 300, "number of items"),
    "factors": (int, 8, "planted latent factors"),
}
_MODEL = {
    "latent_dim": (int, 200, "latent dimension"),
    "hidden_dim": (int, 600, "encoder hidden width"),
    "n_layers": (int, 5, "encoder hidden layers"),
    "gamma": (float, 0.005, "KL weight per positive item"),
    "noise_keep": (float, 0.5, "keep probability of input noising"),
    "prior_weights": (_weights, (3 / 20, 3 / 4, 1 / 10), "standard,old-posterior,wide prior weights"),
    "wide_logvar": (float, 10.0, "log-variance of the wide prior component"),
    "fixed_beta": (float, 0.2, "KL weight when per-user rescaling is off"),
}
_TRAIN = {
    "epochs": (int, 50, "outer epochs"),
    "batch_size": (int, 500, "users per batch"),
    "lr": (float, 5e-4, "Adam learning rate"),
    "enc_dec_ratio": (int, 3, "encoder steps per decoder step"),
    "flags": (str, "11111", "feature flags (arch, prior, rescaling, alternating, clean decoder)"),
}
_EVAL = {
    "model": (str, None, "checkpoint file (default: <out>/model.rvae)"),
    "which": (str, "test", "validation or test"),
    "n_boot": (int, 1000, "bootstrap resamples"),
}
_ABLATE = {
    "rows": (_codes, tuple(r.code for r in TABLE_ROWS), "comma-separated flag codes"),
    "popularity": (_bool, False, "also score the popularity ranking"),
}
_EASE = {
    "lam": (float, 500.0, "L2 regularization (flag --lambda)"),
}

COMMANDS = {
    "preprocess": (_COMMON, _PREPROCESS),
    "synth": (_COMMON, _SYNTH),
    "train": (_COMMON, _MODEL, _TRAIN),
    "evaluate": (_COMMON, _EVAL),
    "ablate": (_COMMON, _MODEL, _TRAIN, _ABLATE),
    "ease": (_COMMON, _EASE, {"which": _EVAL["which"], "n_boot": _EVAL["n_boot"]}),
}
HELP = {
    "preprocess": "binarize a rating log and write a split dataset bundle",
    "synth": "write a planted-factor synthetic rating log",
    "train": "train a model on a dataset bundle",
    "evaluate": "score a checkpoint on held-out users",
    "ablate": "train and score feature subsets",
    "ease": "fit and score the closed-form item-item baseline",
}


def _settings(command):
    merged = {}
    for group in COMMANDS[command]:
        merged.update(group)
    return merged


def _flag(name):
    return "--lambda" if name == "lam" else "--" + name.replace("_", "-")


def build_parser():
    parser = _Parser(prog="recvae", description="Variational autoencoder recommender toolkit.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    for command in COMMANDS:
        p = sub.add_parser(command, help=HELP[command], description=HELP[command])
        p.add_argument("--config", help="key = value file; command-line values take precedence")
        for name, (kind, default, text) in _settings(command).items():
            shown = ",".join(map(str, default)) if isinstance(default, tuple) else default
            p.add_argument(_flag(name), dest=name, type=kind, default=None,
                           help=f"{text} (default: {shown})")
    return parser


def resolve(command, cli_values, config_path=None):
    """Merge defaults, the config file and command-line values, in that order."""
    known = _settings(command)
    values = {name: default for name, (_, default, _) in known.items()}
    if config_path:
        path = Path(config_path)
        if not path.is_file():
            raise UsageError(f"config file not found: {path}")
        for key, raw in read_manifest(path).items():
            if key == "command":
                continue
            if key not in known:
                raise UsageError(f"{path}: unknown setting {key!r} for {command}")
            if raw == "None":
                values[key] = None
                continue
            try:
                values[key] = known[key][0](raw)
            except (ValueError, argparse.ArgumentTypeError) as exc:
                raise UsageError(f"{path}: bad value for {key}: {exc}") from None
    values.update({k: v for k, v in cli_values.items() if k in known and v is not None})
    for required in ("out",) + (("data",) if command != "synth" else ()):
        if values.get(required) is None:
            raise UsageError(f"recvae {command}: {_flag(required)} is required")
    return values


def config_path(out, command):
    return Path(out) / f"config_{command}.txt"


def write_config(out, command, values):
    def show(v):
        return ",".join(map(str, v)) if isinstance(v, tuple) else v

    entries = {k: show(v) for k, v in values.items()}
    entries["command"] = command
    write_manifest(config_path(out, command), entries)


def _bundle_path(data):
    path = Path(data)
    return path / BUNDLE_NAME if path.is_dir() else path


def _load_split(values):
    matrix, split = read_bundle(_bundle_path(values["data"]))
    if split is None:
        raise DataError(f"{values['data']} holds no user split; run 'recvae preprocess'")
    return matrix, split


def train_config(values, flags=None):
    flags = flags or AblationConfig.from_code(values["flags"])
    model = ModelConfig(
        latent_dim=values["latent_dim"], hidden_dim=values["hidden_dim"], n_layers=values["n_layers"],
        gamma=values["gamma"], noise_keep=values["noise_keep"], prior_weights=values["prior_weights"],
        wide_logvar=values["wide_logvar"], fixed_beta=values["fixed_beta"],
    )
    base = TrainConfig(model=model, epochs=values["epochs"], batch_size=values["batch_size"],
                       lr=values["lr"], seed=values["seed"], enc_dec_ratio=values["enc_dec_ratio"])
    return configure_ablation(flags, base, fixed_beta=values["fixed_beta"])


def cmd_preprocess(values):
    raw = load_ratings(values["data"])
    matrix = preprocess(raw, values["rating_threshold"], values["min_user_interactions"])
    split = split_users(matrix, values["heldout_users"], values["seed"], values["fold_in_fraction"])
    out = Path(values["out"])
    write_bundle(out / BUNDLE_NAME, matrix, split)
    write_manifest(out / "manifest.txt", {
        "source": values["data"], "users": matrix.n_users, "items": matrix.n_items,
        "interactions": matrix.nnz, "train_users": len(split.train_users),
        "validation_users": len(split.validation.users), "test_users": len(split.test.users),
        "validation_unusable": split.validation.n_unusable, "test_unusable": split.test.n_unusable,
        "seed": values["seed"],
    })
    print(f"{matrix.n_users} users, {matrix.n_items} items, {matrix.nnz} interactions -> {out / BUNDLE_NAME}")


def cmd_synth(values):
    matrix = planted_factor_data(values["users"], values["items"], values["factors"], values["seed"])
    path = Path(values["out"]) / "ratings.csv"
    write_ratings_csv(path, matrix)
    print(f"{matrix.nnz} interactions -> {path}")


def cmd_train(values):
    matrix, split = _load_split(values)
    cfg = train_config(values)
    state = train(matrix, split, cfg, out_dir=values["out"])
    print(f"best validation ndcg@100 {state.best_ndcg:.4f} at epoch {state.best_epoch} "
          f"-> {state.best_checkpoint}")


def _load_scorer(path):
    kind, _, _ = load_checkpoint(path)
    return EaseModel.load(path) if kind == "ease" else RecVAE.load(path)


def _report(scorer, matrix, split, values, out, stem="report"):
    report = evaluate(scorer, matrix.n_items, split, values["which"], DEFAULT_METRICS,
                      n_boot=values["n_boot"], seed=values["seed"])
    report.save(out / f"{stem}.txt", out / f"{stem}.json")
    print(report.to_text())
    return report


def cmd_evaluate(values):
    matrix, split = _load_split(values)
    out = Path(values["out"])
    model_path = values["model"] or out / "model.rvae"
    scorer = _load_scorer(model_path)
    if scorer.predict_scores(np.zeros((1, matrix.n_items), np.float32)).shape[1] != matrix.n_items:
        raise DataError(f"{model_path} was trained on a different item set")
    _report(scorer, matrix, split, values, out)


def cmd_ablate(values):
    matrix, split = _load_split(values)
    out = Path(values["out"])
    results = []
    for code in values["rows"]:
        flags = AblationConfig.from_code(code)
        state = train(matrix, split, train_config(values, flags), verbose=False,
                      log_path=out / f"train_{code}.log")
        summary = evaluate(state.best_model, matrix.n_items, split, "test", ("ndcg@100",),
                           seed=values["seed"])["ndcg@100"]
        results.append((flags, (summary.mean, summary.ci)))
        print(f"{code}  ndcg@100 {summary.mean:.4f} +/- {summary.ci:.4f}", flush=True)
    (out / "ablation.tsv").write_text(format_table(results))
    if values["popularity"]:
        pop = evaluate(Popularity(matrix, split.train_users), matrix.n_items, split, "test",
                       ("ndcg@100",), seed=values["seed"])["ndcg@100"]
        (out / "popularity.txt").write_text(f"ndcg@100 = {pop.mean!r}\nci = {pop.ci!r}\n")
        print(f"popularity  ndcg@100 {pop.mean:.4f} +/- {pop.ci:.4f}")


def cmd_ease(values):
    matrix, split = _load_split(values)
    out = Path(values["out"])
    model = ease_fit(matrix, values["lam"], users=split.train_users)
    model.save(out / "ease.rvae")
    _report(model, matrix, split, values, out)


HANDLERS = {
    "preprocess": cmd_preprocess, "synth": cmd_synth, "train": cmd_train,
    "evaluate": cmd_evaluate, "ablate": cmd_ablate, "ease": cmd_ease,
}


def run(argv=None):
    """Parse ``argv`` and run one subcommand; returns the exit code."""
    try:
        args = build_parser().parse_args(argv)
        if args.command is None:
            raise UsageError("recvae: a subcommand is required (" + ", ".join(COMMANDS) + ")")
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        values = resolve(args.command, vars(args), args.config)
        Path(values["out"]).mkdir(parents=True, exist_ok=True)
        if args.command in ("train", "ablate"):
            train_config(values) if args.command == "train" else train_config(values, TABLE_ROWS[-1])
        write_config(values["out"], args.command, values)
        logger.info("kernel backend: %s", BACKEND)
        HANDLERS[args.command](values)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (DataError, CapabilityError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"invalid setting: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
