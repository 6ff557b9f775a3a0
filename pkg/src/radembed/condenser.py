"""Report condensing: section extraction, cleaning, negation encoding,
rare-term pruning and collocation fusing.

Stage order used by :func:`condense_corpus`::

    extract -> clean -> encode negation -> prune rare -> mine/apply collocations

Sentence boundaries are carried through pruning and collocation mining so
that no collocation spans two sentences, then dropped.

Dictionary mapping (``radembed.semdict``) runs after this.
"""

from __future__ import annotations

import logging
import re
import warnings
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, NamedTuple, Optional, Sequence

import yaml

from .corpus import CondensedReport, Report

log = logging.getLogger(__name__)

COMMA = ","
BOUNDARY = "."
SEPARATORS = frozenset({COMMA, "or", "and"})
DEFAULT_CUES = ("no", "without", "negative for", "absent")


class MissingSectionsWarning(UserWarning):
    pass


def _data_path(name: str) -> Path:
    return Path(str(resources.files("radembed") / "data" / name))


def read_stopwords(path) -> frozenset:
    words = set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line and not line.startswith("#"):
                words.add(line.lower())
    return frozenset(words)


def read_boilerplate(path) -> list:
    """Parse a boilerplate file into ``("phrase"|"regex", text)`` pairs."""
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            kind, sep, body = line.partition(":")
            kind = kind.strip().lower()
            if not sep or kind not in ("phrase", "regex"):
                raise ValueError(f"{path}:{lineno}: expected 'phrase: ...' or 'regex: ...'")
            out.append((kind, body.strip()))
    return out


def _compile_boilerplate(patterns) -> list:
    compiled = []
    for kind, body in patterns:
        if kind == "phrase":
            words = [re.escape(w) for w in body.split()]
            compiled.append(re.compile(r"\s+".join(words), re.IGNORECASE))
        else:
            compiled.append(re.compile(body))
    return compiled


class _ConfigLoader(yaml.SafeLoader):
    """SafeLoader that leaves yes/no/on/off as strings; "no" is a negation cue."""


_ConfigLoader.yaml_implicit_resolvers = {
    k: [(tag, rx) for tag, rx in v if tag != "tag:yaml.org,2002:bool"]
    for k, v in yaml.SafeLoader.yaml_implicit_resolvers.items()
}
_ConfigLoader.add_implicit_resolver(
    "tag:yaml.org,2002:bool", re.compile(r"^(?:true|True|TRUE|false|False|FALSE)$"), list("tTfF"))


@dataclass
class CondenserConfig:
    stopword_list: frozenset = field(default_factory=frozenset)
    boilerplate_patterns: list = field(default_factory=list)
    min_term_frequency: int = 50
    collocation_min_count: int = 500
    negation_cues: tuple = DEFAULT_CUES

    def __post_init__(self):
        if self.min_term_frequency < 1:
            raise ValueError("min_term_frequency must be >= 1")
        if self.collocation_min_count < 1:
            raise ValueError("collocation_min_count must be >= 1")
        self.negation_cues = tuple(self.negation_cues)
        for cue in self.negation_cues:
            if cue != cue.lower() or not cue.strip():
                raise ValueError(f"negation cue {cue!r} must be non-empty lowercase")
        self.stopword_list = frozenset(self.stopword_list)
        self._compiled = _compile_boilerplate(self.boilerplate_patterns)
        self._cue_seqs = sorted((tuple(c.split()) for c in self.negation_cues), key=len, reverse=True)

    @classmethod
    def default(cls, **overrides) -> "CondenserConfig":
        kw = dict(
            stopword_list=read_stopwords(_data_path("stopwords_en.txt")),
            boilerplate_patterns=read_boilerplate(_data_path("boilerplate.txt")),
        )
        kw.update(overrides)
        return cls(**kw)

    @classmethod
    def from_file(cls, path) -> "CondenserConfig":
        """Load a YAML/JSON config with keys ``stopwords_path``,
        ``min_term_frequency``, ``collocation_min_count``, ``negation_cues``
        and ``boilerplate_path``. Relative paths resolve against the file."""
        path = Path(path)
        with open(path, encoding="utf-8") as fh:
            raw = yaml.load(fh, Loader=_ConfigLoader) or {}
        known = {"stopwords_path", "min_term_frequency", "collocation_min_count",
                 "negation_cues", "boilerplate_path"}
        unknown = set(raw) - known
        if unknown:
            raise ValueError(f"{path}: unknown condenser config keys {sorted(unknown)}")

        def resolve(p):
            p = Path(p)
            return p if p.is_absolute() else path.parent / p

        kw = {}
        if "stopwords_path" in raw:
            kw["stopword_list"] = read_stopwords(resolve(raw["stopwords_path"]))
        if "boilerplate_path" in raw:
            kw["boilerplate_patterns"] = read_boilerplate(resolve(raw["boilerplate_path"]))
        for key in ("min_term_frequency", "collocation_min_count"):
            if key in raw:
                kw[key] = int(raw[key])
        if "negation_cues" in raw:
            kw["negation_cues"] = tuple(raw["negation_cues"])
        return cls.default(**kw)

    def to_dict(self) -> dict:
        return {
            "stopwords": len(self.stopword_list),
            "boilerplate_patterns": [list(p) for p in self.boilerplate_patterns],
            "min_term_frequency": self.min_term_frequency,
            "collocation_min_count": self.collocation_min_count,
            "negation_cues": list(self.negation_cues),
        }


# ---------------------------------------------------------------------------
# per-report transforms

_HEADER_RE = re.compile(r"(?<![A-Za-z])([A-Z][A-Z]*(?: [A-Z]+)*|Additional comments?)\s*:")
_KEEP = ("FINDING", "IMPRESSION")


class SectionExtract(NamedTuple):
    text: str
    found: bool


def split_sections(raw_text: str) -> SectionExtract:
    """Return the FINDINGS and IMPRESSION bodies joined by a space.

    A section runs from the end of its header to the start of the next
    header. Without either header the full text comes back with
    ``found=False``.
    """
    headers = list(_HEADER_RE.finditer(raw_text))
    parts = []
    found = False
    for k, m in enumerate(headers):
        name = m.group(1).upper()
        if not name.startswith(_KEEP):
            continue
        found = True
        end = headers[k + 1].start() if k + 1 < len(headers) else len(raw_text)
        body = raw_text[m.end():end].strip()
        if body:
            parts.append(body)
    if not found:
        return SectionExtract(raw_text, False)
    return SectionExtract(" ".join(parts), True)


def extract_sections(raw_text: str) -> str:
    res = split_sections(raw_text)
    if not res.found:
        warnings.warn("no FINDINGS/IMPRESSION header; using full text", MissingSectionsWarning, stacklevel=2)
    return res.text


_BOUNDARY_PUNCT = re.compile(r"[.;:!?]+")
_WORD_RE = re.compile(r"[^\W]+|,|\.", re.UNICODE)


def _protected_positions(words: Sequence[str], cue_seqs) -> set:
    keep = set()
    i = 0
    while i < len(words):
        for seq in cue_seqs:
            if tuple(words[i:i + len(seq)]) == seq:
                keep.update(range(i, i + len(seq)))
                i += len(seq) - 1
                break
        i += 1
    return keep


def clean_text(section_text: str, config: CondenserConfig, keep_separators: bool = False) -> list:
    """Lowercase, strip boilerplate/dates/times/names, tokenize and drop stop words.

    With ``keep_separators`` the output also carries ``","`` tokens,
    ``"."`` sentence boundaries and the words ``or``/``and`` so that
    :func:`encode_negation` can find scope limits. Negation cue words are
    never treated as stop words.
    """
    text = section_text
    for pat in config._compiled:
        text = pat.sub(" ", text)
    text = text.lower()
    text = _BOUNDARY_PUNCT.sub(" . ", text)
    text = text.replace(",", " , ")
    # underscores survive as word characters; everything else splits tokens
    words = _WORD_RE.findall(text)
    protected = _protected_positions(words, config._cue_seqs)
    out = []
    for i, w in enumerate(words):
        if w == COMMA or w == BOUNDARY:
            if keep_separators:
                # collapse runs and leading boundaries
                if out and out[-1] not in (COMMA, BOUNDARY):
                    out.append(w)
                elif out and w == BOUNDARY:
                    out[-1] = BOUNDARY
            continue
        if i in protected:
            out.append(w)
        elif keep_separators and w in SEPARATORS:
            out.append(w)
        elif w not in config.stopword_list:
            out.append(w)
    return out


def _match_cue(tokens, i, cue_seqs) -> int:
    for seq in cue_seqs:
        if tuple(tokens[i:i + len(seq)]) == seq:
            return len(seq)
    return 0


def encode_negation(tokens: Sequence[str], cues: Iterable[str], keep_boundaries: bool = False) -> list:
    """Fuse negation cues onto each phrase in their scope.

    A cue opens a scope that runs to the next sentence boundary. Inside it,
    phrases are separated by commas, ``or`` and ``and``; each phrase is
    emitted as ``<cue>_<phrase words joined by _>``. Separators and
    boundaries are dropped from the output unless ``keep_boundaries`` is
    set, in which case each sentence boundary survives as a single ``.``.

    >>> encode_negation("no acute hemorrhage , infarction , or mass .".split(), ["no"])
    ['no_acute_hemorrhage', 'no_infarction', 'no_mass']
    """
    cue_seqs = sorted((tuple(c.split()) for c in cues), key=len, reverse=True)
    out = []
    n = len(tokens)
    i = 0
    while i < n:
        tok = tokens[i]
        m = _match_cue(tokens, i, cue_seqs)
        if not m:
            if tok == BOUNDARY:
                if keep_boundaries and out and out[-1] != BOUNDARY:
                    out.append(tok)
            elif tok not in SEPARATORS:
                out.append(tok)
            i += 1
            continue
        prefix = "_".join(tokens[i:i + m])
        j = i + m
        phrases = []
        cur = []
        while j < n and tokens[j] != BOUNDARY:
            if tokens[j] in SEPARATORS:
                if cur:
                    phrases.append(cur)
                cur = []
            elif _match_cue(tokens, j, cue_seqs):
                # a second cue opens its own scope
                break
            else:
                cur.append(tokens[j])
            j += 1
        if cur:
            phrases.append(cur)
        if phrases:
            out.extend(prefix + "_" + "_".join(p) for p in phrases)
        else:
            out.append(prefix)
        i = j
    return out


# ---------------------------------------------------------------------------
# corpus-level passes

def term_counts(corpus: Iterable[Sequence[str]]) -> Counter:
    counts = Counter()
    for toks in corpus:
        counts.update(toks)
    return counts


def prune_rare_terms(corpus: Sequence[Sequence[str]], min_freq: int) -> list:
    if min_freq < 1:
        raise ValueError("min_freq must be >= 1")
    counts = term_counts(corpus)
    return [[t for t in toks if t == BOUNDARY or counts[t] >= min_freq] for toks in corpus]


@dataclass(frozen=True)
class CollocationTable:
    pairs: dict
    min_count: int

    def __post_init__(self):
        for pair, c in self.pairs.items():
            if c < self.min_count:
                raise ValueError(f"collocation {pair} has count {c} < {self.min_count}")

    def __contains__(self, pair) -> bool:
        return pair in self.pairs

    def __len__(self) -> int:
        return len(self.pairs)

    def to_tsv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(f"# min_count\t{self.min_count}\n")
            for (a, b), c in sorted(self.pairs.items()):
                fh.write(f"{a}\t{b}\t{c}\n")

    @classmethod
    def from_tsv(cls, path) -> "CollocationTable":
        pairs = {}
        min_count = 1
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.rstrip("\n")
                if line.startswith("# min_count"):
                    min_count = int(line.split("\t")[1])
                elif line and not line.startswith("#"):
                    a, b, c = line.split("\t")
                    pairs[(a, b)] = int(c)
        return cls(pairs, min_count)


def mine_collocations(corpus: Iterable[Sequence[str]], min_count: int) -> CollocationTable:
    """Adjacent ordered pairs seen strictly more than ``min_count`` times.

    Pairs touching a sentence boundary token are never counted.
    """
    if min_count < 1:
        raise ValueError("min_count must be >= 1")
    counts = Counter()
    for toks in corpus:
        counts.update(p for p in zip(toks, toks[1:]) if BOUNDARY not in p)
    return CollocationTable({p: c for p, c in counts.items() if c > min_count}, min_count)


def apply_collocations(tokens: Sequence[str], table: CollocationTable) -> list:
    if not table.pairs:
        return list(tokens)
    pairs = table.pairs
    out = []
    i = 0
    n = len(tokens)
    while i < n:
        if i + 1 < n and (tokens[i], tokens[i + 1]) in pairs:
            out.append(tokens[i] + "_" + tokens[i + 1])
            i += 2
        else:
            out.append(tokens[i])
            i += 1
    return out


# ---------------------------------------------------------------------------
# pipeline

@dataclass
class CondenseResult:
    reports: list
    collocations: CollocationTable
    missing_sections: list = field(default_factory=list)


def condense_report_tokens(text: str, config: CondenserConfig) -> tuple:
    """Per-report part of the pipeline (extract, clean, negation). Pure.

    Sentence boundaries are kept as ``.`` tokens for the corpus passes.
    """
    sec = split_sections(text)
    toks = clean_text(sec.text, config, keep_separators=True)
    return encode_negation(toks, config.negation_cues, keep_boundaries=True), sec.found


def condense_corpus(reports: Sequence[Report], config: Optional[CondenserConfig] = None,
                    threads: int = 1, collocations: Optional[CollocationTable] = None) -> CondenseResult:
    """Run the full condenser over a corpus.

    Pass a previously mined ``collocations`` table to reuse it instead of
    mining a new one.
    """
    config = config or CondenserConfig.default()
    texts = [r.text for r in reports]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            per_report = list(pool.map(lambda t: condense_report_tokens(t, config), texts))
    else:
        per_report = [condense_report_tokens(t, config) for t in texts]
    missing = [r.id for r, (_, found) in zip(reports, per_report) if not found]
    if missing:
        log.warning("%d report(s) without FINDINGS/IMPRESSION headers; full text used", len(missing))
    corpus = prune_rare_terms([toks for toks, _ in per_report], config.min_term_frequency)
    if collocations is None:
        collocations = mine_collocations(corpus, config.collocation_min_count)
    condensed = [
        CondensedReport.build(r.id, [t for t in apply_collocations(toks, collocations) if t != BOUNDARY],
                              r.label)
        for r, toks in zip(reports, corpus)
    ]
    return CondenseResult(condensed, collocations, missing)
