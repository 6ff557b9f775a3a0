"""Dictionary-based term normalization.

Two dictionary kinds share one representation: a common-term table read
from TSV (family/progress/risk/negation/qualifier words) and a domain table
compiled from an ontology export by subclass closure. Rewriting is a
single left-to-right pass per dictionary over token n-grams (n <= 4),
longest match first. Compound tokens such as ``no_hematoma`` are rewritten
part by part, so a negated variant becomes ``NEGEX_hemorrhage``.
"""

from __future__ import annotations

import logging
import re
import time
from collections import defaultdict, deque
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

log = logging.getLogger(__name__)

TAGS = ("FAMILY", "PROGRESS", "NEGEX", "RISK", "QUAL", "DOMAIN")
MAX_NGRAM = 4
_END = ""  # trie terminal key; never a token


class DictionaryError(ValueError):
    pass


def normalize_phrase(text: str, stopwords: Iterable[str] = ()) -> tuple:
    """Lowercase and split a phrase into word tokens.

    Stop words are dropped from multi-word phrases (a single-word phrase is
    kept as is) so that variants live in the same token space as condensed
    text.
    """
    words = [w for w in re.split(r"[^\w]+|_", text.lower()) if w]
    if len(words) > 1 and stopwords:
        kept = [w for w in words if w not in stopwords]
        if kept:
            words = kept
    return tuple(words)


def inflections(word: str) -> list:
    """Regular inflectional variants (plural, -ing, -ed) of a word."""
    if len(word) < 4 or not word.isalpha():
        return []
    out = []
    if word.endswith("y") and word[-2] not in "aeiou":
        out.append(word[:-1] + "ies")
        out.append(word[:-1] + "ied")
        out.append(word + "ing")
    elif word.endswith(("s", "x", "z", "ch", "sh")):
        out.append(word + "es")
        out.append(word + "ing")
        out.append(word + "ed")
    elif word.endswith("e"):
        out.append(word + "s")
        out.append(word[:-1] + "ing")
        out.append(word + "d")
    else:
        out.append(word + "s")
        out.append(word + "ing")
        out.append(word + "ed")
    return out


class SemanticDictionary:
    """Immutable variant -> canonical rewrite table with entry tags."""

    def __init__(self, entries: Mapping[tuple, tuple], name: str = ""):
        # entries: variant tuple -> (canonical, tag)
        self.name = name
        self.entries = dict(entries)
        self.max_ngram = 0
        canon = set()
        for variant, (canonical, tag) in self.entries.items():
            if not variant or len(variant) > MAX_NGRAM:
                raise DictionaryError(f"variant {' '.join(variant)!r}: length must be 1..{MAX_NGRAM}")
            if any(w != w.lower() or not w or "_" in w or " " in w for w in variant):
                raise DictionaryError(f"variant {variant!r} must be lowercase word tokens")
            if tag not in TAGS:
                raise DictionaryError(f"unknown tag {tag!r} for variant {' '.join(variant)!r}")
            if not canonical or any(c.isspace() for c in canonical):
                raise DictionaryError(f"canonical {canonical!r} must be a single token")
            canon.add(canonical)
            self.max_ngram = max(self.max_ngram, len(variant))
        for variant in self.entries:
            if len(variant) == 1 and variant[0] in canon:
                raise DictionaryError(f"canonical {variant[0]!r} also appears as a variant")
        self._trie = {}
        for variant, (canonical, _) in self.entries.items():
            node = self._trie
            for w in variant:
                node = node.setdefault(w, {})
            node[_END] = canonical
        self._compound_cache = {}

    def __len__(self) -> int:
        return len(self.entries)

    def __repr__(self) -> str:
        return f"SemanticDictionary({self.name!r}, {len(self)} entries)"

    @property
    def canonicals(self) -> set:
        return {c for c, _ in self.entries.values()}

    def get(self, phrase: str) -> Optional[str]:
        hit = self.entries.get(tuple(phrase.split()))
        return hit[0] if hit else None

    def with_inflections(self) -> "SemanticDictionary":
        """Add plural/-ing/-ed forms of each variant's last word and of each
        single-word lowercase canonical.

        Explicit entries win; a generated form claimed by two different
        canonicals, or equal to a canonical, is dropped.
        """
        generated = {}
        ambiguous = set()
        canon = self.canonicals
        for variant, (canonical, tag) in self.entries.items():
            for form in inflections(variant[-1]):
                v = variant[:-1] + (form,)
                if v in self.entries or (len(v) == 1 and form in canon):
                    continue
                prev = generated.get(v)
                if prev is not None and prev[0] != canonical:
                    ambiguous.add(v)
                generated[v] = (canonical, tag)
        # inflected forms of a lowercase canonical word map back to it
        tags = {c: t for c, t in self.entries.values()}
        for canonical, tag in tags.items():
            if not canonical.islower() or "_" in canonical:
                continue
            for form in inflections(canonical):
                v = (form,)
                if v in self.entries or form in canon:
                    continue
                prev = generated.get(v)
                if prev is not None and prev[0] != canonical:
                    ambiguous.add(v)
                generated[v] = (canonical, tag)
        merged = dict(self.entries)
        for v, hit in generated.items():
            if v not in ambiguous:
                merged[v] = hit
        return SemanticDictionary(merged, self.name)

    def merged(self, other: "SemanticDictionary", name: str = "") -> "SemanticDictionary":
        entries = dict(self.entries)
        for v, hit in other.entries.items():
            if v in entries and entries[v][0] != hit[0]:
                raise DictionaryError(f"variant {' '.join(v)!r} maps to {entries[v][0]!r} and {hit[0]!r}")
            entries[v] = hit
        return SemanticDictionary(entries, name or self.name)

    # -- rewriting ---------------------------------------------------------

    def _rewrite(self, tokens: Sequence[str]) -> list:
        trie = self._trie
        out = []
        n = len(tokens)
        i = 0
        while i < n:
            tok = tokens[i]
            if "_" in tok:
                out.append(self._rewrite_compound(tok))
                i += 1
                continue
            node = trie.get(tok)
            if node is None:
                out.append(tok)
                i += 1
                continue
            best_end = i + 1 if _END in node else -1
            best = node.get(_END)
            j = i + 1
            while j < n:
                node = node.get(tokens[j])
                if node is None:
                    break
                j += 1
                if _END in node:
                    best_end, best = j, node[_END]
            if best_end < 0:
                out.append(tok)
                i += 1
            else:
                out.append(best)
                i = best_end
        return out

    def _rewrite_compound(self, tok: str) -> str:
        hit = self._compound_cache.get(tok)
        if hit is None:
            parts = [p for p in tok.split("_") if p]
            hit = "_".join(self._rewrite(parts))
            self._compound_cache[tok] = hit
        return hit

    def to_tsv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("# variant\tcanonical\ttag\n")
            for variant, (canonical, tag) in sorted(self.entries.items()):
                fh.write(f"{' '.join(variant)}\t{canonical}\t{tag}\n")


def _add_entry(entries: dict, variant: tuple, canonical: str, tag: str, where: str) -> None:
    prev = entries.get(variant)
    if prev is not None and prev[0] != canonical:
        raise DictionaryError(
            f"{where}: conflicting variant {' '.join(variant)!r} maps to {prev[0]!r} and {canonical!r}")
    entries[variant] = (canonical, tag)


def read_dictionary_tsv(path, stopwords: Iterable[str] = ()) -> dict:
    entries = {}
    stopwords = frozenset(stopwords)
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            cols = line.split("\t")
            if len(cols) != 3:
                raise DictionaryError(f"{path}:{lineno}: expected variant<TAB>canonical<TAB>tag")
            variant = normalize_phrase(cols[0], stopwords)
            canonical, tag = cols[1].strip(), cols[2].strip().upper()
            if not variant:
                raise DictionaryError(f"{path}:{lineno}: empty variant")
            if tuple(canonical.lower().split()) == variant:
                continue
            _add_entry(entries, variant, canonical, tag, f"{path}:{lineno}")
    return entries


def dictionary_stopwords(config=None) -> frozenset:
    """Stop words to strip from multi-word variants: the condenser's list
    minus the words of its negation cues (which the condenser keeps)."""
    from .condenser import CondenserConfig

    config = config or CondenserConfig.default()
    cue_words = {w for cue in config.negation_cues for w in cue.split()}
    return frozenset(config.stopword_list - cue_words)


def load_common_dictionary(path=None, stopwords: Optional[Iterable[str]] = None,
                           inflect: bool = True) -> SemanticDictionary:
    """Load a ``variant<TAB>canonical<TAB>tag`` file (``#`` comments allowed).

    Without ``path`` the bundled seed dictionary is used. A variant listed
    twice with different canonicals raises ``DictionaryError`` naming it.
    ``stopwords`` defaults to :func:`dictionary_stopwords`.
    """
    if stopwords is None:
        stopwords = dictionary_stopwords()
    if path is None:
        path = Path(str(resources.files("radembed") / "data" / "common_terms.tsv"))
    d = SemanticDictionary(read_dictionary_tsv(path, stopwords), name="common")
    return d.with_inflections() if inflect else d


# ---------------------------------------------------------------------------
# ontology export -> domain dictionary

@dataclass(frozen=True)
class OntologyTerm:
    term_id: str
    label: str
    parent_id: str
    synonyms: tuple


class OntologyExport:
    def __init__(self, terms: Iterable[OntologyTerm]):
        self.terms = {}
        for t in terms:
            if not t.label.strip():
                raise DictionaryError(f"term {t.term_id}: empty label")
            if t.term_id in self.terms:
                raise DictionaryError(f"duplicate term id {t.term_id}")
            self.terms[t.term_id] = t
        self.children = defaultdict(list)
        for t in self.terms.values():
            if t.parent_id:
                self.children[t.parent_id].append(t.term_id)
        self._check_acyclic()

    def _check_acyclic(self) -> None:
        # a term is on a cycle iff following parent links from it returns to it
        state = {}
        for start in self.terms:
            path = []
            node = start
            while node and node in self.terms and state.get(node) != "done":
                if state.get(node) == "active":
                    raise DictionaryError(f"cycle in ontology export through {node}")
                state[node] = "active"
                path.append(node)
                node = self.terms[node].parent_id
            for p in path:
                state[p] = "done"

    def descendants(self, root: str) -> list:
        """Breadth-first subclass closure below ``root`` (root excluded)."""
        out = []
        seen = {root}
        queue = deque(self.children.get(root, ()))
        while queue:
            tid = queue.popleft()
            if tid in seen:
                continue
            seen.add(tid)
            out.append(tid)
            queue.extend(self.children.get(tid, ()))
        return out

    @classmethod
    def from_tsv(cls, path) -> "OntologyExport":
        terms = []
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.rstrip("\n")
                if not line.strip() or line.startswith("#"):
                    continue
                cols = line.split("\t")
                if len(cols) < 3 or len(cols) > 4:
                    raise DictionaryError(f"{path}:{lineno}: expected term_id<TAB>label<TAB>parent_id<TAB>synonyms")
                syns = tuple(s.strip() for s in cols[3].split("|") if s.strip()) if len(cols) == 4 else ()
                terms.append(OntologyTerm(cols[0].strip(), cols[1].strip(), cols[2].strip(), syns))
        return cls(terms)


def canonical_token(label: str) -> str:
    return "_".join(normalize_phrase(label))


def _close_over_canonicals(entries: dict) -> dict:
    """Add multi-word variants with a canonical word replaced by one of its
    single-word variants, so one rewriting pass is already a fixpoint
    (``subdural bleed`` -> ``hemorrhage`` directly, not via
    ``subdural hemorrhage``)."""
    singles = defaultdict(list)
    for v, (c, _) in entries.items():
        if len(v) == 1:
            singles[c].append(v[0])
    extra = {}
    for v, (c, tag) in entries.items():
        if len(v) < 2:
            continue
        for k, w in enumerate(v):
            for alt in singles.get(w, ()):
                nv = v[:k] + (alt,) + v[k + 1:]
                if nv not in entries:
                    extra.setdefault(nv, (c, tag))
    out = dict(entries)
    out.update(extra)
    return out


def compile_domain_dictionary(export: OntologyExport, roots: Sequence[str],
                              stopwords: Optional[Iterable[str]] = None,
                              inflect: bool = True) -> SemanticDictionary:
    """Map every label and synonym below each root to the root's label token.

    Raises ``DictionaryError`` for unknown roots or a variant claimed by
    two roots. ``stopwords`` defaults to :func:`dictionary_stopwords`.
    """
    stopwords = dictionary_stopwords() if stopwords is None else frozenset(stopwords)
    entries = {}
    canonicals = {}
    for root in roots:
        if root not in export.terms:
            raise DictionaryError(f"unknown root term id {root!r}")
        canonicals[root] = canonical_token(export.terms[root].label)
    for root in roots:
        canonical = canonicals[root]
        for tid in [root] + export.descendants(root):
            term = export.terms[tid]
            for phrase in (term.label,) + term.synonyms:
                variant = normalize_phrase(phrase, stopwords)
                if not variant or variant == (canonical,) or "_".join(variant) == canonical:
                    continue
                if len(variant) > MAX_NGRAM:
                    log.warning("skipping %r under %s: longer than %d tokens", phrase, root, MAX_NGRAM)
                    continue
                _add_entry(entries, variant, canonical, "DOMAIN", f"root {root}")
    d = SemanticDictionary(entries, name="domain")
    if inflect:
        d = d.with_inflections()
    return SemanticDictionary(_close_over_canonicals(d.entries), name="domain")


def load_default_domain_dictionary(stopwords: Optional[Iterable[str]] = None, inflect: bool = True) -> SemanticDictionary:
    path = Path(str(resources.files("radembed") / "data" / "hemorrhage_ontology.tsv"))
    export = OntologyExport.from_tsv(path)
    roots = [tid for tid, t in export.terms.items() if not t.parent_id]
    return compile_domain_dictionary(export, roots, stopwords, inflect)


# ---------------------------------------------------------------------------

def map_tokens(tokens: Sequence[str], dictionaries: Sequence[SemanticDictionary]) -> list:
    """Rewrite ``tokens`` with each dictionary in turn (one pass each)."""
    out = list(tokens)
    for d in dictionaries:
        if d.entries:
            out = d._rewrite(out)
    return out


def naive_map_tokens(tokens: Sequence[str], dictionaries: Sequence[SemanticDictionary]) -> list:
    """Reference rewriter: tries every entry at every position.

    Quadratic and slow; used to check :func:`map_tokens`.
    """
    def rewrite(seq, entries):
        out = []
        i = 0
        while i < len(seq):
            if "_" in seq[i]:
                parts = [p for p in seq[i].split("_") if p]
                out.append("_".join(rewrite(parts, entries)))
                i += 1
                continue
            best_len, best = 0, None
            for variant, canonical in entries:
                k = len(variant)
                if k > best_len and list(seq[i:i + k]) == list(variant):
                    best_len, best = k, canonical
            if best_len:
                out.append(best)
                i += best_len
            else:
                out.append(seq[i])
                i += 1
        return out

    out = list(tokens)
    for d in dictionaries:
        entries = [(v, c) for v, (c, _) in d.entries.items()]
        out = rewrite(out, entries)
    return out


def corpus_bytes(corpus: Sequence[Sequence[str]]) -> int:
    return sum(len(" ".join(toks).encode("utf-8")) + 1 for toks in corpus)


def scan_throughput(corpus: Sequence[Sequence[str]], dictionaries: Sequence[SemanticDictionary],
                    repeats: int = 3) -> float:
    """Steady-state rewriting speed in bytes per millisecond.

    One warm-up pass, then the median of ``repeats`` timed passes.
    """
    nbytes = corpus_bytes(corpus)
    for toks in corpus:
        map_tokens(toks, dictionaries)
    times = []
    for _ in range(max(1, repeats)):
        t0 = time.perf_counter()
        for toks in corpus:
            map_tokens(toks, dictionaries)
        times.append(time.perf_counter() - t0)
    times.sort()
    elapsed_ms = max(times[len(times) // 2] * 1000.0, 1e-9)
    return nbytes / elapsed_ms


def load_compiled_dictionary(path, name: str = "") -> SemanticDictionary:
    """Read a dictionary written by :meth:`SemanticDictionary.to_tsv` verbatim
    (no stop-word stripping, no inflection)."""
    return SemanticDictionary(read_dictionary_tsv(path, ()), name=name or Path(path).stem)
