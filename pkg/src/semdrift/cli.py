"""Command-line pipeline: ``analyze``, ``score``, and ``synth`` subcommands.

``analyze`` ingests a directory of per-period embedding files, runs the
pairwise selection + permutation pipeline, and writes ``pairs.json``, the
two heatmap CSVs (plus a p < 0.05 filtered counts variant), one
``scores_<period>.csv`` per period, and a ``manifest.json`` that makes the
run reproducible byte for byte.  ``score`` assembles ``series_<word>.csv``
from a completed analyze run.  ``synth`` writes a synthetic corpus with
known ground truth for validation.

Exit codes: 0 success, 1 user/config error, 2 internal invariant violation.
Progress and warnings go to stderr; data only to files.
"""

import argparse
import csv
import difflib
import json
import logging
import os
import sys
import traceback
from dataclasses import dataclass, field, replace
from pathlib import Path

from . import __version__
from .analysis import PermutationConfig, analyze_all_pairs, heatmap_matrices, rank_words, score_table
from .configio import dumps_kv, loads_kv, nest
from .embeddings import align, load_snapshot, split_vocab
from .errors import SemdriftError
from .selection import OptimizerConfig
from .synth import SynthSpec, write_corpus

logger = logging.getLogger("semdrift.cli")

__all__ = ["RunConfig", "main", "cmd_analyze", "cmd_score", "cmd_synth"]


@dataclass(frozen=True)
class RunConfig:
    input_dir: str
    output_dir: str
    format: str = "word2vec_text"
    n_train: int = 200
    n_test: int = 60
    seed: int = 0
    n_permutations: int = 500
    jobs: int = 0
    allowlist: str | None = None
    labels: str | None = None
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)

    def __post_init__(self):
        if self.n_train <= 0 or self.n_test <= 0:
            raise ValueError("n_train and n_test must be positive")
        if self.format not in ("word2vec_text", "tsv"):
            raise ValueError(f"unknown format {self.format!r}")

    def flat_dict(self):
        out = {
            "input_dir": self.input_dir,
            "output_dir": self.output_dir,
            "format": self.format,
            "n_train": self.n_train,
            "n_test": self.n_test,
            "seed": self.seed,
            "n_permutations": self.n_permutations,
            "jobs": self.jobs,
            "allowlist": self.allowlist,
            "labels": self.labels,
        }
        opt = self.optimizer
        out.update({
            "optimizer.lambda_grid": list(opt.lambda_grid),
            "optimizer.max_iters": opt.max_iters,
            "optimizer.step_size": opt.step_size,
            "optimizer.tolerance": opt.tolerance,
            "optimizer.init": opt.init,
            "optimizer.seed": opt.seed,
            "optimizer.cv_folds": opt.cv_folds,
            "optimizer.selection_threshold": opt.selection_threshold,
            "optimizer.weight_cutoff": opt.weight_cutoff,
        })
        return out


def _optimizer_from_dict(raw):
    if "lambda_grid" in raw:
        grid = raw["lambda_grid"]
        raw["lambda_grid"] = tuple(grid) if isinstance(grid, list) else (grid,)
    return OptimizerConfig(**raw)


def load_run_config(path=None, overrides=None):
    """Build a RunConfig from an optional key=value file plus CLI overrides."""
    raw = {}
    if path is not None:
        raw = nest(loads_kv(Path(path).read_text(encoding="utf-8")))
    for key, value in (overrides or {}).items():
        if value is not None:
            raw[key] = value
    opt_raw = raw.pop("optimizer", {})
    config = RunConfig(optimizer=_optimizer_from_dict(dict(opt_raw)), **raw)
    # variable selection and vocabulary splitting share the run seed unless
    # the config names an optimizer seed explicitly
    if "seed" not in opt_raw:
        config = replace(config, optimizer=replace(config.optimizer, seed=config.seed))
    return config


def _write_json(path, obj):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _cell(value):
    return "" if value is None else value


def _write_heatmap(path, labels, matrix):
    header = ["period"] + list(labels)
    rows = [[label] + [_cell(v) for v in row] for label, row in zip(labels, matrix)]
    _write_csv(path, header, rows)


def _discover_period_files(input_dir, labels_path):
    files = sorted(
        p for p in Path(input_dir).iterdir()
        if p.is_file() and not p.name.startswith(".") and p.suffix != ".json"
    )
    if not files:
        raise SemdriftError(f"no embedding files in {input_dir}")
    if labels_path:
        labels = [
            line.strip() for line in Path(labels_path).read_text(encoding="utf-8").splitlines()
            if line.strip()
        ]
        if len(labels) != len(files):
            raise SemdriftError(
                f"labels file has {len(labels)} entries for {len(files)} period files"
            )
    else:
        labels = [p.stem for p in files]
    return files, labels


def _load_corpus(config):
    files, labels = _discover_period_files(config.input_dir, config.labels)
    snapshots = [
        load_snapshot(path, fmt=config.format, period_label=label)
        for path, label in zip(files, labels)
    ]
    corpus = align(snapshots)
    if config.allowlist:
        allowed = {
            line.strip()
            for line in Path(config.allowlist).read_text(encoding="utf-8").splitlines()
            if line.strip()
        }
        kept = tuple(w for w in corpus.shared_vocab if w in allowed)
        if not kept:
            raise SemdriftError("allowlist removed every shared-vocabulary word")
        corpus = replace(corpus, shared_vocab=kept)
    return corpus


def cmd_analyze(args):
    config = load_run_config(args.config, {
        "input_dir": args.input_dir,
        "output_dir": args.output_dir,
        "seed": args.seed,
        "jobs": args.jobs,
    })
    if not Path(config.input_dir or "").is_dir():
        raise SemdriftError(f"input_dir {config.input_dir!r} is not a directory")
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    jobs = config.jobs if config.jobs > 0 else (os.cpu_count() or 1)

    corpus = _load_corpus(config)
    logger.info("aligned %d periods, %d shared words, dim %d",
                corpus.n_periods, len(corpus.shared_vocab), corpus.dim)
    split = split_vocab(corpus, config.n_train, config.n_test, config.seed)
    pairs = analyze_all_pairs(
        corpus, split, config.optimizer,
        test_config=PermutationConfig(n_permutations=config.n_permutations),
        seed=config.seed, jobs=jobs,
    )
    failed = [p for p in pairs if p.error]
    for pair in failed:
        logger.warning("pair (%s, %s) failed: %s", pair.period_a, pair.period_b, pair.error)
    logger.info("analyzed %d pairs (%d failed)", len(pairs), len(failed))

    _write_json(out / "manifest.json", {
        "tool": "semdrift",
        "version": __version__,
        "seed": config.seed,
        "config": config.flat_dict(),
        "period_labels": list(corpus.period_labels),
    })
    _write_json(out / "pairs.json", [p.to_json_dict() for p in pairs])

    labels = corpus.period_labels
    counts, pvals = heatmap_matrices(pairs, labels)
    _write_heatmap(out / "heatmap_counts.csv", labels, counts)
    _write_heatmap(out / "heatmap_pvalues.csv", labels, pvals)
    significant = [
        [
            c if (p is not None and p < 0.05) else (None if c is None else 0)
            for c, p in zip(crow, prow)
        ]
        for crow, prow in zip(counts, pvals)
    ]
    _write_heatmap(out / "heatmap_counts_significant.csv", labels, significant)

    table = score_table(corpus, pairs)
    for t, label in enumerate(labels):
        ranked = rank_words(table, label, len(table.words))
        ranked_words = {w for w, _ in ranked}
        rows = [[w, repr(float(s)), rank] for rank, (w, s) in enumerate(ranked, start=1)]
        rows.extend([w, "", ""] for w in table.words if w not in ranked_words)
        _write_csv(out / f"scores_{label}.csv", ["word", "score", "rank"], rows)
    logger.info("wrote outputs to %s", out)
    return 0


def _safe_filename(word):
    return "".join(c if (c.isalnum() or c in "-_.") else "_" for c in word)


def cmd_score(args):
    out = Path(args.output_dir)
    manifest_path = out / "manifest.json"
    if not manifest_path.is_file():
        raise SemdriftError(f"{out} does not contain a completed analyze run (no manifest.json)")
    manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    labels = manifest["period_labels"]
    word = args.word
    series = []
    vocab = None
    for label in labels:
        path = out / f"scores_{label}.csv"
        if not path.is_file():
            raise SemdriftError(f"missing {path}; rerun analyze")
        with open(path, encoding="utf-8", newline="") as fh:
            table = {row["word"]: row["score"] for row in csv.DictReader(fh)}
        if vocab is None:
            vocab = sorted(table)
        if word not in table:
            matches = difflib.get_close_matches(word, vocab, n=5)
            hint = f"; closest matches: {', '.join(matches)}" if matches else ""
            raise SemdriftError(f"word {word!r} not in the analyzed vocabulary{hint}")
        series.append((label, table[word]))
    path = out / f"series_{_safe_filename(word)}.csv"
    _write_csv(path, ["period", "score"], series)
    logger.info("wrote %s", path)
    return 0


def cmd_synth(args):
    overrides = {
        "n_periods": args.periods,
        "dim": args.dim,
        "n_words": args.words,
        "seed": args.seed,
        "magnitude": args.magnitude,
        "shift_period": args.shift_period,
        "shift_fraction": args.shift_fraction,
        "stability": args.stability,
        "trend_step": args.trend_step,
    }
    raw = {}
    if args.config:
        raw = nest(loads_kv(Path(args.config).read_text(encoding="utf-8")))
    for key, value in overrides.items():
        if value is not None:
            raw[key] = value
    for key, flag in (("shift_dims", args.shift_dims), ("trend_dims", args.trend_dims)):
        if flag is not None:
            raw[key] = tuple(int(v) for v in flag.split(",")) if flag else ()
        elif key in raw:
            value = raw[key]
            raw[key] = tuple(value) if isinstance(value, list) else (value,)
    spec = SynthSpec(**raw)
    out = Path(args.output_dir)
    paths, truth_path = write_corpus(spec, out)
    _write_json(out / "manifest.json", {
        "tool": "semdrift",
        "version": __version__,
        "seed": spec.seed,
        "config": {k: (list(v) if isinstance(v, tuple) else v) for k, v in vars(spec).items()},
    })
    logger.info("wrote %d period files and %s", len(paths), truth_path)
    return 0


def _add_common(sub):
    sub.add_argument("--config", default=None, help="key = value config file")
    sub.add_argument("--seed", type=int, default=None, help="master random seed")
    sub.add_argument("--jobs", type=int, default=None,
                     help="worker processes (default: available parallelism)")
    sub.add_argument("--output-dir", required=True, help="directory for outputs")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="semdrift",
        description="MMD-based variable selection and word scoring over embedding periods",
    )
    parser.add_argument("--version", action="version", version=f"semdrift {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("analyze", help="run the full pairwise pipeline")
    _add_common(p)
    p.add_argument("--input-dir", default=None, help="directory of per-period embedding files")
    p.set_defaults(func=cmd_analyze)

    p = subs.add_parser("score", help="emit one word's per-period score series")
    _add_common(p)
    p.add_argument("--word", required=True)
    p.set_defaults(func=cmd_score)

    p = subs.add_parser("synth", help="generate a synthetic corpus with known shifts")
    _add_common(p)
    p.add_argument("--periods", type=int, default=None)
    p.add_argument("--dim", type=int, default=None)
    p.add_argument("--words", type=int, default=None)
    p.add_argument("--magnitude", type=float, default=None)
    p.add_argument("--shift-dims", default=None, help="comma-separated dimension indices")
    p.add_argument("--shift-period", type=int, default=None)
    p.add_argument("--shift-fraction", type=float, default=None)
    p.add_argument("--stability", type=float, default=None)
    p.add_argument("--trend-dims", default=None, help="comma-separated dimension indices")
    p.add_argument("--trend-step", type=float, default=None)
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None):
    logging.basicConfig(stream=sys.stderr, level=logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (SemdriftError, OSError, ValueError, TypeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception:  # pragma: no cover - invariant violations
        traceback.print_exc()
        return 2


if __name__ == "__main__":
    sys.exit(main())
