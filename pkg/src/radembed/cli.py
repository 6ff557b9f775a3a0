"""``radembed`` command line.

Each subcommand reads and writes files in a data directory (``--data-dir``,
else ``$RADEMBED_DATA_DIR``, else the working directory), records a run log
under ``runs/`` and updates ``manifest.json`` with the checksums of its inputs
and outputs. Exit codes: 0 success, 1 validation error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
import time
from dataclasses import asdict, replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

log = logging.getLogger("radembed")

DATA_DIR_ENV = "RADEMBED_DATA_DIR"
MANIFEST = "manifest.json"

DEFAULTS = {
    "reports": "reports.jsonl",
    "groundtruth": "groundtruth.json",
    "condensed": "condensed.jsonl",
    "collocations": "collocations.tsv",
    "domain_dict": "domain_dict.tsv",
    "mapped": "mapped.jsonl",
    "model": "model.txt",
    "docvecs": "docvecs.tsv",
    "tsne": "tsne.tsv",
    "predictions": "predictions.tsv",
    "grid": "grid.tsv",
}


class ValidationError(Exception):
    """Bad arguments or inputs; exit code 1."""


class StaleInputError(ValidationError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# manifest

def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


class PipelineManifest:
    """Stage records ``{stage: {"inputs": {path: sha}, "outputs": {path: sha},
    "config": {...}}}`` kept in ``manifest.json``.

    Paths are stored as given relative to the data directory when possible.
    """

    def __init__(self, root: Path, stages: Optional[dict] = None):
        self.root = Path(root)
        self.stages = stages or {}

    @classmethod
    def load(cls, root) -> "PipelineManifest":
        path = Path(root) / MANIFEST
        if path.exists():
            with open(path, encoding="utf-8") as fh:
                return cls(root, json.load(fh).get("stages", {}))
        return cls(root)

    def save(self) -> None:
        self.root.mkdir(parents=True, exist_ok=True)
        with open(self.root / MANIFEST, "w", encoding="utf-8", newline="\n") as fh:
            json.dump({"stages": self.stages}, fh, indent=1, sort_keys=True)
            fh.write("\n")

    def key(self, path) -> str:
        p = Path(path).resolve()
        try:
            return str(p.relative_to(self.root.resolve()))
        except ValueError:
            return str(p)

    def producer(self, path) -> Optional[tuple]:
        k = self.key(path)
        for stage, rec in self.stages.items():
            if k in rec.get("outputs", {}):
                return stage, rec
        return None

    def check_inputs(self, paths: Sequence) -> list:
        """Problems with ``paths``: changed since their producing stage wrote
        them, or built (transitively) from inputs that have changed since."""
        problems = []
        seen = set()

        def visit(path, via):
            k = self.key(path)
            if k in seen:
                return
            seen.add(k)
            hit = self.producer(path)
            if hit is None:
                return
            stage, rec = hit
            stage = stage.split(" ", 1)[0]
            if sha256_file(path) != rec["outputs"][k]:
                what = f"{k} changed after stage {stage!r} wrote it"
                problems.append(what if via is None else f"{via} is stale: upstream {what}")
                return
            for up, sha in rec.get("inputs", {}).items():
                up_path = Path(up) if Path(up).is_absolute() else self.root / up
                if not up_path.exists():
                    continue
                if sha256_file(up_path) != sha:
                    problems.append(f"{via or k} is stale: {up} changed after stage {stage!r} ran")
                else:
                    visit(up_path, via or k)

        for path in paths:
            visit(path, None)
        return problems

    def record(self, stage: str, inputs: Sequence, outputs: Sequence, config: dict) -> None:
        # one record per (stage, primary output), so e.g. two map runs coexist
        self.stages[f"{stage} {self.key(outputs[0])}"] = {
            "inputs": {self.key(p): sha256_file(p) for p in inputs},
            "outputs": {self.key(p): sha256_file(p) for p in outputs},
            "config": config,
        }


# ---------------------------------------------------------------------------
# helpers

def _data_dir(args) -> Path:
    d = args.data_dir or os.environ.get(DATA_DIR_ENV) or "."
    return Path(d)


def _path(args, name: str, kind: str) -> Path:
    value = getattr(args, name, None)
    if value:
        return Path(value)
    return _data_dir(args) / DEFAULTS[kind]


def _require(*paths) -> None:
    for p in paths:
        if p is not None and not Path(p).is_file():
            raise ValidationError(f"input file not found: {p}")


def _emit(rows: list, fmt: str, columns: Optional[Sequence[str]] = None, out=None) -> None:
    out = out or sys.stdout
    if fmt == "json":
        out.write(json.dumps(rows, indent=2) + "\n")
        return
    columns = list(columns or (rows[0].keys() if rows else []))
    out.write("\t".join(columns) + "\n")
    for r in rows:
        out.write("\t".join(_fmt_cell(r.get(c)) for c in columns) + "\n")


def _fmt_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.6f}"
    return str(v)


def _csv_ints(text: str) -> list:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


class Run:
    """Per-invocation context: input checks, timings, run log and manifest."""

    def __init__(self, args, stage: str):
        self.args = args
        self.stage = stage
        self.root = _data_dir(args)
        self.manifest = PipelineManifest.load(self.root)
        self.inputs: list = []
        self.outputs: list = []
        self.config: dict = {}
        self.timings: dict = {}
        self._t0 = time.perf_counter()

    def use(self, *paths) -> None:
        _require(*paths)
        self.inputs.extend(Path(p) for p in paths if p is not None)
        problems = self.manifest.check_inputs([p for p in paths if p is not None])
        for msg in problems:
            if self.args.strict:
                raise StaleInputError(f"checksum mismatch: {msg}")
            log.warning("checksum mismatch: %s", msg)

    def produce(self, path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        self.outputs.append(path)
        return path

    def time(self, name: str, t0: float) -> None:
        self.timings[name] = round(time.perf_counter() - t0, 6)

    def finish(self) -> None:
        self.timings["total"] = round(time.perf_counter() - self._t0, 6)
        if self.outputs:
            self.manifest.record(self.stage, self.inputs, self.outputs, self.config)
            self.manifest.save()
        runs = self.root / "runs"
        runs.mkdir(parents=True, exist_ok=True)
        entry = {
            "stage": self.stage,
            "argv": self.args.argv,
            "config": self.config,
            "inputs": {str(p): sha256_file(p) for p in self.inputs},
            "outputs": {str(p): sha256_file(p) for p in self.outputs if p.exists()},
            "timings": self.timings,
        }
        with open(runs / f"{self.stage}.json", "w", encoding="utf-8", newline="\n") as fh:
            json.dump(entry, fh, indent=1, sort_keys=True)
            fh.write("\n")


# ---------------------------------------------------------------------------
# subcommands

def cmd_gen_corpus(args, run: Run) -> None:
    from .syncorpus import GenerationConfig, TemplateSet, generate_corpus, write_corpus

    cfg = GenerationConfig(
        n_reports=args.n, seed=args.seed, synonym_swap_prob=args.synonym_swap_prob,
        negation_prob=args.negation_prob, boilerplate_count=args.boilerplate_count,
        n_labeled=args.n_labeled,
    )
    run.config = cfg.to_dict()
    t0 = time.perf_counter()
    reports, gt = generate_corpus(TemplateSet.default(), cfg)
    run.time("generate", t0)
    write_corpus(reports, gt, run.produce(_path(args, "out", "reports")),
                 run.produce(_path(args, "groundtruth", "groundtruth")))
    log.info("wrote %d reports", len(reports))


def cmd_condense(args, run: Run) -> None:
    from .condenser import CollocationTable, CondenserConfig, condense_corpus
    from .corpus import load_reports, save_condensed

    src = _path(args, "input", "reports")
    run.use(src)
    cfg = CondenserConfig.from_file(args.config) if args.config else CondenserConfig.default()
    if args.config:
        run.use(args.config)
    overrides = {k: getattr(args, k) for k in ("min_term_frequency", "collocation_min_count")
                 if getattr(args, k) is not None}
    if overrides:
        cfg = replace(cfg, **overrides)
    table = None
    if args.collocations_in:
        run.use(args.collocations_in)
        table = CollocationTable.from_tsv(args.collocations_in)
    run.config = {**cfg.to_dict(), "threads": args.threads,
                  "collocations_in": str(args.collocations_in) if args.collocations_in else None}
    reports = load_reports(src)
    t0 = time.perf_counter()
    result = condense_corpus(reports, cfg, threads=args.threads, collocations=table)
    run.time("condense", t0)
    save_condensed(result.reports, run.produce(_path(args, "out", "condensed")))
    result.collocations.to_tsv(run.produce(_path(args, "collocations", "collocations")))
    if result.missing_sections:
        log.warning("%d report(s) lacked FINDINGS/IMPRESSION headers", len(result.missing_sections))


def cmd_compile_dict(args, run: Run) -> None:
    from importlib import resources

    from .semdict import OntologyExport, compile_domain_dictionary

    onto = Path(args.ontology) if args.ontology else Path(str(resources.files("radembed") / "data" / "hemorrhage_ontology.tsv"))
    run.use(onto)
    export = OntologyExport.from_tsv(onto)
    roots = args.roots.split(",") if args.roots else [t for t, term in export.terms.items() if not term.parent_id]
    run.config = {"ontology": str(onto), "roots": roots, "inflect": not args.no_inflect}
    d = compile_domain_dictionary(export, roots, inflect=not args.no_inflect)
    d.to_tsv(run.produce(_path(args, "out", "domain_dict")))
    log.info("compiled %d entries under %d root(s)", len(d), len(roots))


def cmd_map(args, run: Run) -> None:
    from .corpus import load_condensed, save_condensed
    from .pipeline import map_corpus
    from .semdict import load_common_dictionary, load_compiled_dictionary, load_default_domain_dictionary

    src = _path(args, "input", "condensed")
    run.use(src)
    dicts = []
    if args.common:
        run.use(args.common)
    dicts.append(load_common_dictionary(args.common))
    if not args.no_domain:
        if args.domain:
            run.use(args.domain)
            dicts.append(load_compiled_dictionary(args.domain, "domain"))
        else:
            dicts.append(load_default_domain_dictionary())
    run.config = {"common": str(args.common) if args.common else "bundled",
                  "domain": None if args.no_domain else (str(args.domain) if args.domain else "bundled")}
    t0 = time.perf_counter()
    mapped = map_corpus(load_condensed(src), dicts)
    run.time("map", t0)
    save_condensed(mapped, run.produce(_path(args, "out", "mapped")))


def _train_config(args):
    from .embedding import TrainConfig

    return TrainConfig(
        architecture=args.architecture, objective=args.objective, window=args.window, dim=args.dim,
        negatives=args.negatives, epochs=args.epochs, initial_learning_rate=args.initial_learning_rate,
        min_count=args.min_count, sample=args.sample, seed=args.seed, threads=args.threads,
    )


def cmd_train(args, run: Run) -> None:
    from .corpus import load_condensed
    from .embedding import build_vocabulary, save_model, train

    src = _path(args, "input", "mapped")
    run.use(src)
    cfg = _train_config(args)
    run.config = {**cfg.to_dict(), "binary": args.binary}
    corpus = [list(r.tokens) for r in load_condensed(src)]
    vocab = build_vocabulary(corpus, cfg.min_count)
    t0 = time.perf_counter()
    model = train(corpus, vocab, cfg)
    run.time("train", t0)
    run.config["epoch_losses"] = model.epoch_losses
    save_model(model, run.produce(_path(args, "out", "model")), binary=args.binary)
    log.info("trained %d x %d vectors", len(vocab), cfg.dim)


def cmd_similar(args, run: Run) -> None:
    from .embedding import load_model, most_similar

    src = _path(args, "model", "model")
    run.use(src)
    run.config = {"word": args.word, "k": args.k}
    model = load_model(src)
    rows = [{"word": w, "score": s} for w, s in most_similar(model, args.word, args.k)]
    _emit(rows, args.format, ("word", "score"))


def write_docvecs(path, ids, labels, X) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for i, lab, v in zip(ids, labels, X):
            fh.write(f"{i}\t{'' if lab is None else lab}\t" + " ".join(f"{x:.6f}" for x in v) + "\n")


def read_docvecs(path) -> tuple:
    ids, labels, rows = [], [], []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            cols = line.split("\t")
            if len(cols) != 3:
                raise ValidationError(f"{path}:{lineno}: expected id<TAB>label<TAB>vector")
            ids.append(cols[0])
            labels.append(int(cols[1]) if cols[1] else None)
            rows.append([float(x) for x in cols[2].split()])
    if not rows:
        raise ValidationError(f"{path}: no document vectors")
    return ids, labels, np.asarray(rows, dtype=np.float64)


def cmd_embed_docs(args, run: Run) -> None:
    from .corpus import load_condensed
    from .embedding import embed_documents, load_model

    model_path = _path(args, "model", "model")
    src = _path(args, "input", "mapped")
    run.use(model_path, src)
    docs = load_condensed(src)
    model = load_model(model_path)
    X, ok = embed_documents(model, [r.tokens for r in docs])
    skipped = [d.id for d, good in zip(docs, ok) if not good]
    if skipped:
        log.warning("skipped %d document(s) with no in-vocabulary tokens", len(skipped))
    run.config = {"skipped": skipped}
    keep = np.flatnonzero(ok)
    write_docvecs(run.produce(_path(args, "out", "docvecs")), [docs[i].id for i in keep],
                  [docs[i].label for i in keep], X[keep])


def cmd_tsne(args, run: Run) -> None:
    from .tsne import ProjectionConfig, run_tsne, write_svg, write_tsv

    src = _path(args, "input", "docvecs")
    run.use(src)
    cfg = ProjectionConfig(
        perplexity=args.perplexity, iterations=args.iterations, learning_rate=args.learning_rate,
        initial_momentum=args.initial_momentum, final_momentum=args.final_momentum,
        momentum_switch=args.momentum_switch, early_exaggeration=args.early_exaggeration,
        exaggeration_iters=args.exaggeration_iters, seed=args.seed, pca_dims=args.pca_dims,
    )
    ids, labels, X = read_docvecs(src)
    try:
        cfg.validate(len(ids))
    except ValueError as exc:
        raise ValidationError(str(exc)) from None
    run.config = asdict(cfg)
    t0 = time.perf_counter()
    res = run_tsne(X, cfg)
    run.time("tsne", t0)
    run.config["final_kl"] = res.kl_trace[-1]
    write_tsv(run.produce(_path(args, "out", "tsne")), ids, res.coords, labels)
    if args.svg:
        write_svg(run.produce(args.svg), res.coords, labels)


def _labeled(ids, labels, X) -> tuple:
    from .classify import regroup_labels

    keep = [k for k, lab in enumerate(labels) if lab is not None]
    if not keep:
        raise ValidationError("no labelled documents")
    y = np.asarray([int(regroup_labels(labels[k])) for k in keep], dtype=np.int64)
    return [ids[k] for k in keep], X[keep], y


def cmd_classify(args, run: Run) -> None:
    from .classify import N_CLASSES, RiskClass, evaluate, make_classifier, train_test_split

    src = _path(args, "input", "docvecs")
    run.use(src)
    ids, X, y = _labeled(*read_docvecs(src))
    run.config = {"classifier": args.classifier, "fraction": args.fraction, "seed": args.seed}
    tr, te = train_test_split(list(range(len(ids))), args.fraction, args.seed, labels=y.tolist())
    tr, te = np.asarray(tr), np.asarray(te)
    try:
        clf = make_classifier(args.classifier, args.seed)
    except ValueError as exc:
        raise ValidationError(str(exc)) from None
    t0 = time.perf_counter()
    pred = clf.fit(X[tr], y[tr], n_classes=N_CLASSES).predict(X[te])
    run.time("classify", t0)
    out = run.produce(_path(args, "out", "predictions"))
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("id\ttruth\tprediction\n")
        for i, t, p in zip(te, y[te], pred):
            fh.write(f"{ids[i]}\t{RiskClass(int(t)).name}\t{RiskClass(int(p)).name}\n")
    m = evaluate(pred, y[te])
    run.config["weighted_f1"] = m.weighted_f1
    _emit(_metric_rows(m), args.format, ("class", "precision", "recall", "f1", "support"))


def _metric_rows(m) -> list:
    d = m.to_dict()
    rows = [{"class": k, **v} for k, v in d["per_class"].items()]
    rows.append({"class": "weighted", **d["weighted"], "support": int(m.support.sum())})
    return rows


def cmd_evaluate(args, run: Run) -> None:
    from .classify import RiskClass, evaluate

    src = _path(args, "predictions", "predictions")
    run.use(src)
    names = {c.name: int(c) for c in RiskClass}
    truth, pred = [], []
    with open(src, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n").split("\t")
        if header[:3] != ["id", "truth", "prediction"]:
            raise ValidationError(f"{src}: expected header id<TAB>truth<TAB>prediction")
        for lineno, line in enumerate(fh, 2):
            cols = line.rstrip("\n").split("\t")
            if len(cols) < 3 or cols[1] not in names or cols[2] not in names:
                raise ValidationError(f"{src}:{lineno}: bad prediction row")
            truth.append(names[cols[1]])
            pred.append(names[cols[2]])
    m = evaluate(pred, truth)
    run.config = {"n": len(truth)}
    if args.out:
        with open(run.produce(args.out), "w", encoding="utf-8", newline="\n") as fh:
            fh.write(m.to_json() + "\n")
    if args.format == "json":
        sys.stdout.write(m.to_json() + "\n")
    else:
        _emit(_metric_rows(m), "tsv", ("class", "precision", "recall", "f1", "support"))


def cmd_grid_search(args, run: Run) -> None:
    from .classify import GridSearchSpec, grid_search, regroup_labels
    from .corpus import load_condensed

    src = _path(args, "input", "mapped")
    run.use(src)
    base = _train_config(args)
    spec = GridSearchSpec(windows=args.windows, dims=args.dims, folds=args.folds,
                          classifier=args.classifier, seed=args.grid_seed, mode=args.mode,
                          base_window=args.base_window, base_dim=args.base_dim,
                          train_config=base, threads=args.threads)
    run.config = {k: v for k, v in asdict(spec).items() if k != "train_config"}
    run.config["train_config"] = base.to_dict()
    reports = load_condensed(src)
    corpus = [list(r.tokens) for r in reports]
    lab = [r for r in reports if r.label is not None]
    if not lab:
        raise ValidationError("no labelled documents")
    y = [int(regroup_labels(r.label)) for r in lab]
    t0 = time.perf_counter()
    result = grid_search(corpus, [list(r.tokens) for r in lab], y, spec)
    run.time("grid_search", t0)
    out = run.produce(_path(args, "out", "grid"))
    out.write_text(result.to_tsv(), encoding="utf-8")
    run.config["best"] = [result.best_window, result.best_dim]
    rows = [{"window": c.window, "dim": c.dim, "mean_f1": c.mean_f1, "std_f1": c.std_f1,
             "error": c.error} for c in result.cells]
    _emit(rows, args.format, ("window", "dim", "mean_f1", "std_f1", "error"))
    if result.best_window is None:
        raise RuntimeError("every grid cell failed")


def cmd_stats(args, run: Run) -> None:
    from .corpus import corpus_stats, load_condensed, load_reports

    raw_p = _path(args, "raw", "reports")
    cond_p = _path(args, "condensed", "condensed")
    run.use(raw_p, cond_p)
    stats = corpus_stats(load_reports(raw_p), load_condensed(cond_p))
    run.config = stats.to_dict()
    _emit([stats.to_dict()], args.format)


# ---------------------------------------------------------------------------
# parser

def _add_train_flags(p) -> None:
    p.add_argument("--architecture", "--arch", default="cbow", choices=("cbow", "skipgram"))
    p.add_argument("--objective", default="ns", choices=("ns", "hs"))
    p.add_argument("--window", type=int, default=5)
    p.add_argument("--dim", type=int, default=100)
    p.add_argument("--negatives", type=int, default=5)
    p.add_argument("--epochs", type=int, default=5)
    p.add_argument("--initial-learning-rate", type=float, default=0.025)
    p.add_argument("--min-count", type=int, default=5)
    p.add_argument("--sample", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--data-dir", help=f"artifact directory (default ${DATA_DIR_ENV} or .)")
    common.add_argument("--strict", action="store_true", help="treat checksum mismatches as errors")
    common.add_argument("--format", choices=("tsv", "json"), default="tsv", help="tabular output format")
    common.add_argument("-v", "--verbose", action="count", default=0)

    parser = _Parser(prog="radembed", description="Radiology report embedding pipeline.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_text):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(func=func)
        return p

    p = add("gen-corpus", cmd_gen_corpus, "generate a labelled synthetic corpus")
    p.add_argument("--n", type=int, default=2000)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--n-labeled", type=int)
    p.add_argument("--synonym-swap-prob", type=float, default=0.8)
    p.add_argument("--negation-prob", type=float, default=0.95)
    p.add_argument("--boilerplate-count", type=int, default=3)
    p.add_argument("--out")
    p.add_argument("--groundtruth")

    p = add("condense", cmd_condense, "clean, negation-encode, prune and merge collocations")
    p.add_argument("--input")
    p.add_argument("--config", help="YAML/JSON condenser config")
    p.add_argument("--min-term-frequency", type=int)
    p.add_argument("--collocation-min-count", type=int)
    p.add_argument("--collocations-in", help="reuse a mined collocation table")
    p.add_argument("--collocations", help="where to write the mined table")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out")

    p = add("compile-dict", cmd_compile_dict, "compile a domain dictionary from an ontology export")
    p.add_argument("--ontology")
    p.add_argument("--roots", help="comma-separated root term ids (default: all roots)")
    p.add_argument("--no-inflect", action="store_true")
    p.add_argument("--out")

    p = add("map", cmd_map, "apply the common and domain dictionaries")
    p.add_argument("--input")
    p.add_argument("--common", help="common-term TSV (default: bundled)")
    p.add_argument("--domain", help="compiled domain dictionary TSV (default: bundled ontology)")
    p.add_argument("--no-domain", action="store_true")
    p.add_argument("--out")

    p = add("train", cmd_train, "train word vectors")
    p.add_argument("--input")
    _add_train_flags(p)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--binary", action="store_true")
    p.add_argument("--out")

    p = add("similar", cmd_similar, "nearest words by cosine similarity")
    p.add_argument("--model")
    p.add_argument("--word", required=True)
    p.add_argument("--k", type=int, default=10)

    p = add("embed-docs", cmd_embed_docs, "average word vectors per document")
    p.add_argument("--model")
    p.add_argument("--input")
    p.add_argument("--out")

    p = add("tsne", cmd_tsne, "2-D t-SNE projection of document vectors")
    p.add_argument("--input")
    p.add_argument("--perplexity", type=float, default=30.0)
    p.add_argument("--iterations", type=int, default=1000)
    p.add_argument("--learning-rate", type=float, default=200.0)
    p.add_argument("--initial-momentum", type=float, default=0.5)
    p.add_argument("--final-momentum", type=float, default=0.8)
    p.add_argument("--momentum-switch", type=int, default=250)
    p.add_argument("--early-exaggeration", type=float, default=12.0)
    p.add_argument("--exaggeration-iters", type=int, default=250)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--pca-dims", type=int)
    p.add_argument("--svg")
    p.add_argument("--out")

    p = add("classify", cmd_classify, "train/test a classifier on document vectors")
    p.add_argument("--input")
    p.add_argument("--classifier", default="rf", help="rf, rf:<trees>, knn<k>, knn:<k>[:cosine]")
    p.add_argument("--fraction", type=float, default=0.8)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--out")

    p = add("evaluate", cmd_evaluate, "weighted metrics of a predictions file")
    p.add_argument("--predictions")
    p.add_argument("--out", help="also write the metrics JSON here")

    p = add("grid-search", cmd_grid_search, "cross-validated window/dimension search")
    p.add_argument("--input")
    _add_train_flags(p)
    p.add_argument("--windows", type=_csv_ints, default=[3, 5, 8])
    p.add_argument("--dims", type=_csv_ints, default=[50, 100])
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--classifier", default="rf")
    p.add_argument("--grid-seed", type=int, default=7, help="fold and classifier seed")
    p.add_argument("--mode", choices=("grid", "independent"), default="grid")
    p.add_argument("--base-window", type=int)
    p.add_argument("--base-dim", type=int)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out")

    p = add("stats", cmd_stats, "token counts and reduction ratio")
    p.add_argument("--raw")
    p.add_argument("--condensed")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    args.argv = argv
    logging.basicConfig(level=logging.DEBUG if args.verbose > 1 else logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    from .corpus import CorpusError
    from .embedding import OutOfVocabularyError
    from .semdict import DictionaryError

    try:
        run = Run(args, args.command)
        args.func(args, run)
        run.finish()
    except (ValidationError, CorpusError, DictionaryError, OutOfVocabularyError, ValueError,
            FileNotFoundError) as exc:
        msg = f"word not in vocabulary: {exc.args[0]}" if isinstance(exc, OutOfVocabularyError) else exc
        print(f"radembed {args.command}: error: {msg}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - reported as a runtime failure
        log.debug("traceback", exc_info=True)
        print(f"radembed {args.command}: failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
