"""Command-line entry point: ``smishdetect <subcommand> ...``.

Exit codes: 0 success, 1 usage error, 2 data or model error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__, _kernels
from .bayes import (
    SmoothingConfig,
    SmoothingMode,
    UnknownTokenPolicy,
    classify_many,
    load_model,
    save_model,
    train,
)
from .corpus import DEFAULT_ALIASES, Label, compute_stats, format_stats, load_corpus
from .errors import FingerprintMismatchError, SmishError
from .evaluation import evaluate, format_ablation, format_metrics, metrics, run_ablation
from .lingo import bundled_dictionary, load_dictionary
from .pipeline import PipelineConfig, bundled_stopwords, load_stopwords, preprocess

DEFAULTS = {
    "ratio": 0.9,
    "seed": 42,
    "smoothing": "floor",
    "epsilon": 1e-6,
    "alpha": 1.0,
    "unknown": "ignore",
    "format": "text",
}

# keys accepted in a --config file (key=value per line)
CONFIG_KEYS = {
    "corpus", "corpus_format", "lingo_dict", "stoplist", "ratio", "seed",
    "smoothing", "epsilon", "alpha", "use_priors", "unknown", "out", "model",
    "label_alias", "format",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _add_pipeline_args(p, normalize_flag=True):
    p.add_argument("--lingo-dict", dest="lingo_dict", help="slang dictionary (slang<TAB>expansion)")
    p.add_argument("--stoplist", help="stop-word file (one per line); default: bundled list")
    if normalize_flag:
        p.add_argument("--no-normalize", action="store_true", help="skip lingo normalization")
    p.add_argument("--no-stopwords", action="store_true", help="skip stop-word removal")
    p.add_argument("--no-stem", action="store_true", help="skip stemming")


def _add_corpus_args(p):
    p.add_argument("--corpus", required=False, help="labeled corpus (TSV or CSV)")
    p.add_argument("--corpus-format", dest="corpus_format", choices=("tsv", "csv"))
    p.add_argument("--label-alias", dest="label_alias", action="append", metavar="TOKEN=LABEL",
                   help="map a label token to ham|smish (repeatable)")


def _add_smoothing_args(p):
    p.add_argument("--smoothing", choices=[m.value for m in SmoothingMode])
    p.add_argument("--epsilon", type=float, help="floor for zero-count terms (floor mode)")
    p.add_argument("--alpha", type=float, help="Laplace pseudo-count (laplace mode)")
    p.add_argument("--use-priors", dest="use_priors", action="store_true", default=None,
                   help="add log class priors to the scores")
    p.add_argument("--unknown", choices=[u.value for u in UnknownTokenPolicy],
                   help="tokens unseen in training: ignore them or score as zero-count")


def _add_format(p):
    p.add_argument("--format", choices=("text", "kv"), help="output style")


def build_parser():
    parser = _Parser(prog="smishdetect", description="Smishing detection toolkit")
    parser.add_argument("--version", action="store_true",
                        help="print toolkit, dictionary and stop-list versions")
    parser.add_argument("--config", help="key=value defaults file; flags override it")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("train", help="train a model")
    _add_corpus_args(p)
    _add_pipeline_args(p)
    _add_smoothing_args(p)
    p.add_argument("--out", help="model file to write")

    p = sub.add_parser("classify", help="classify messages with a trained model")
    p.add_argument("--model")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--text", help="a single message")
    src.add_argument("--file", help="messages, one per line ('-' for stdin)")
    p.add_argument("--lingo-dict", dest="lingo_dict")
    p.add_argument("--stoplist")
    _add_format(p)

    p = sub.add_parser("eval", help="evaluate a model on a labeled corpus")
    p.add_argument("--model")
    _add_corpus_args(p)
    p.add_argument("--lingo-dict", dest="lingo_dict")
    p.add_argument("--stoplist")
    _add_format(p)

    p = sub.add_parser("ablate", help="compare with/without normalization on one split")
    _add_corpus_args(p)
    p.add_argument("--seed", type=int)
    p.add_argument("--ratio", type=float)
    p.add_argument("--train-counts", dest="train_counts", metavar="HAM,SMISH",
                   help="exact per-class training sizes, overriding --ratio")
    p.add_argument("--lingo-dict", dest="lingo_dict")
    p.add_argument("--stoplist")
    _add_smoothing_args(p)
    _add_format(p)

    p = sub.add_parser("stats", help="descriptive statistics per class")
    _add_corpus_args(p)
    _add_format(p)

    p = sub.add_parser("normalize", help="print preprocessed tokens, one message per line")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--text", help="a single message")
    src.add_argument("--file", help="messages, one per line ('-' or omitted: stdin)")
    _add_pipeline_args(p)
    return parser


def read_config_file(path):
    values = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith(("#", ";", "[")):
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in CONFIG_KEYS:
            raise UsageError(f"{path}:{lineno}: unknown config key {key!r}")
        if key == "label_alias":
            values.setdefault(key, []).extend(v.strip() for v in value.split(","))
        else:
            values[key] = value
    return values


_CASTS = {"ratio": float, "seed": int, "epsilon": float, "alpha": float,
          "use_priors": lambda v: str(v).lower() in ("1", "true", "yes", "on")}


def _merge(args, config):
    for key, value in {**DEFAULTS, **config}.items():
        if getattr(args, key, "missing") is None:
            setattr(args, key, _CASTS.get(key, lambda v: v)(value) if key in config else value)
    return args


def _aliases(args):
    aliases = dict(DEFAULT_ALIASES)
    for item in args.label_alias or ():
        token, _, label = item.partition("=")
        try:
            aliases[token.strip().lower()] = Label(label.strip().lower())
        except ValueError:
            raise UsageError(f"bad --label-alias {item!r}; expected TOKEN=ham|smish") from None
    return aliases


def _corpus(args):
    if not args.corpus:
        raise UsageError("--corpus is required")
    return load_corpus(args.corpus, args.corpus_format, _aliases(args))


def _resources(args):
    dictionary = load_dictionary(args.lingo_dict) if args.lingo_dict else bundled_dictionary()
    stopwords = load_stopwords(args.stoplist) if args.stoplist else bundled_stopwords()
    return dictionary, stopwords


def _pipeline(args):
    dictionary, stopwords = _resources(args)
    return PipelineConfig(
        dictionary=dictionary,
        stopwords=stopwords,
        enable_normalization=not getattr(args, "no_normalize", False),
        enable_stopword_removal=not args.no_stopwords,
        enable_stemming=not args.no_stem,
    )


def _smoothing(args):
    return SmoothingConfig(
        mode=SmoothingMode(args.smoothing),
        epsilon=args.epsilon,
        alpha=args.alpha,
        use_priors=bool(args.use_priors),
        unknown=UnknownTokenPolicy(args.unknown),
    )


def _model_pipeline(model, args):
    """Rebuild the preprocessing config a model was trained with."""
    dictionary, stopwords = _resources(args)
    flags = model.pipeline
    config = PipelineConfig(
        dictionary=dictionary,
        stopwords=stopwords,
        enable_normalization=flags.get("normalize", "1") == "1",
        enable_stopword_removal=flags.get("stopwords", "1") == "1",
        enable_stemming=flags.get("stem", "1") == "1",
    )
    if config.fingerprint != model.pipeline_fingerprint:
        raise FingerprintMismatchError(
            "dictionary or stop list differs from the one the model was trained with "
            f"(model used dictionary {flags.get('dictionary_version', '?')}, "
            f"stop list {flags.get('stoplist_version', '?')})"
        )
    return config


def _load_model(args):
    if not args.model:
        raise UsageError("--model is required")
    return load_model(args.model)


def _read_lines(args):
    if getattr(args, "text", None) is not None:
        return [args.text]
    if args.file and args.file != "-":
        return Path(args.file).read_text(encoding="utf-8").splitlines()
    return sys.stdin.read().splitlines()


def cmd_train(args, out):
    if not args.out:
        raise UsageError("--out is required")
    model = train(_corpus(args), _pipeline(args), _smoothing(args))
    save_model(model, args.out)
    print(f"wrote {args.out}: {model.ham_table.total_docs} ham, "
          f"{model.smish_table.total_docs} smish, {len(model.vocabulary)} terms", file=sys.stderr)


def cmd_classify(args, out):
    model = _load_model(args)
    config = _model_pipeline(model, args)
    if args.text is None and not args.file:
        raise UsageError("one of --text or --file is required")
    texts = _read_lines(args)
    for r in classify_many(model, texts, config):
        if args.format == "kv":
            out.write(f"label={r.decision.value} log_score_ham={r.log_score_ham!r} "
                      f"log_score_smish={r.log_score_smish!r}\n")
        else:
            out.write(f"{r.decision.value}\t{r.log_score_ham:.6f}\t{r.log_score_smish:.6f}\n")


def cmd_eval(args, out):
    model = _load_model(args)
    config = _model_pipeline(model, args)
    cm = evaluate(model, _corpus(args), config)
    out.write(format_metrics(cm, metrics(cm), args.format))


def cmd_ablate(args, out):
    corpus = _corpus(args)
    counts = None
    if args.train_counts:
        try:
            ham, smish = (int(v) for v in args.train_counts.split(","))
        except ValueError:
            raise UsageError("--train-counts expects HAM,SMISH") from None
        counts = {Label.HAM: ham, Label.SMISH: smish}
    dictionary, stopwords = _resources(args)
    report = run_ablation(corpus, args.ratio, args.seed, dictionary, stopwords,
                          _smoothing(args), train_counts=counts)
    out.write(format_ablation(report, args.format))


def cmd_stats(args, out):
    out.write(format_stats(compute_stats(_corpus(args)), args.format))


def cmd_normalize(args, out):
    config = _pipeline(args)
    for line in _read_lines(args):
        out.write(" ".join(preprocess(line, config).tokens) + "\n")


COMMANDS = {
    "train": cmd_train,
    "classify": cmd_classify,
    "eval": cmd_eval,
    "ablate": cmd_ablate,
    "stats": cmd_stats,
    "normalize": cmd_normalize,
}


def version_text():
    d, s = bundled_dictionary(), bundled_stopwords()
    return (f"smishdetect {__version__} (kernels: {_kernels.BACKEND})\n"
            f"dictionary: {d.source_version} ({len(d)} entries, bundled)\n"
            f"stoplist: {s.version} ({len(s)} words, bundled)\n")


def run(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.version:
            out.write(version_text())
            return 0
        if not args.command:
            parser.print_help(sys.stderr)
            return 1
        config = read_config_file(args.config) if args.config else {}
        _merge(args, config)
        COMMANDS[args.command](args, out)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help
        return 0 if not exc.code else 1
    except FileNotFoundError as exc:
        print(f"error: file not found: {exc.filename}", file=sys.stderr)
        return 2
    except (SmishError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
