"""Synthetic head-CT report generator with planted ground truth.

Reports carry HISTORY / FINDINGS / IMPRESSION sections, boilerplate, dates
and clinician names. The risk class is expressed through discriminative
token groups:

* no risk: hemorrhage terms appear only inside negation scopes;
* medium risk: a hedge word qualifies a hemorrhage term;
* high risk: a hemorrhage term is asserted outright.

Everything the generator plants (synonym groups, negated phrases, hapaxes,
collocation pairs, section spans) is recorded in :class:`GroundTruth` so
tests can check the pipeline against it.
"""

from __future__ import annotations

import json
import math
import random
import re
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

from .classify.labels import RiskClass
from .condenser import split_sections
from .corpus import Report, save_reports

MEDICOLEGAL = ("I have personally reviewed the images for this examination "
               "and agreed with the report transcribed above.")

# hemorrhage surface forms; every form contains one HEMORRHAGE_WORDS member
HEMORRHAGE_VARIANTS = (
    "hemorrhage", "hematoma", "subdural hematoma", "subdural hemorrhage",
    "subarachnoid hemorrhage", "intraparenchymal hemorrhage", "epidural hematoma",
    "intraventricular hemorrhage", "contusion", "hemorrhagic contusion", "bleed",
    "sdh", "sah", "ivh", "intracerebral hemorrhage", "parenchymal hematoma",
    "extradural hematoma", "haemorrhage", "haematoma", "microhemorrhage",
    "subarachnoid blood", "intraventricular blood", "epidural hemorrhage",
    "intracranial hemorrhage", "bleeding", "microbleed", "hemorrhages", "hematomas",
)
HEMORRHAGE_WORDS = frozenset({
    "hemorrhage", "hemorrhages", "hematoma", "hematomas", "haemorrhage", "haematoma",
    "contusion", "bleed", "bleeding", "sdh", "sah", "ivh", "microhemorrhage",
    "microbleed", "blood",
})

# interchangeable words; each group fills one slot of the templates
SYNONYM_GROUPS = {
    "normal": ("normal", "unremarkable"),
    "clear": ("clear", "aerated"),
    "chronic": ("chronic", "old", "remote"),
    "mild": ("mild", "slight"),
    "small": ("small", "tiny"),
    "large": ("large", "sizable"),
    "new": ("new", "recent"),
    "scan": ("study", "scan"),
    "hypodensity": ("hypodensity", "hypoattenuation", "lucency"),
    "hyperdensity": ("hyperdensity", "hyperattenuation"),
}

# hedge templates per 1..5 label of the medium class
HEDGES = {
    2: ("{V} is unlikely but cannot be excluded", "{V} cannot be entirely excluded",
        "questionable trace {V}"),
    3: ("possible {small} {V}", "suspicion for {small} {V}", "equivocal {side} {V}"),
    4: ("probable {small} {side} {V}", "likely {V} along the {anat}",
        "findings suggestive of {small} {V}"),
}
HEDGE_WORDS = frozenset({"unlikely", "excluded", "questionable", "possible", "suspicion",
                         "equivocal", "probable", "likely", "suggestive"})

NEGATION_CUES = (("No", 0.7), ("Negative for", 0.15), ("Without", 0.15))
NEGATABLE = ("mass effect", "midline shift", "infarction", "mass", "hydrocephalus",
             "edema", "fracture", "herniation")
# terms that also occur un-negated somewhere in the templates
POSITIVE_TERMS = ("hemorrhage", "infarction", "hydrocephalus", "edema", "fracture",
                  "mass", "mass effect", "midline shift")
# planted antonyms: asserted only as acute findings, negated elsewhere; the
# other positive terms are incidental and share contexts with their negations
ANTONYM_TERMS = ("hemorrhage", "edema", "mass effect", "midline shift")

FIRST_NAMES = ("Jane", "John", "Maria", "David", "Susan", "Robert", "Linda", "James",
               "Karen", "Michael", "Patricia", "William", "Nancy", "Richard", "Laura")
LAST_NAMES = ("Smith", "Johnson", "Lee", "Garcia", "Brown", "Miller", "Davis", "Wilson",
              "Moore", "Taylor", "Anderson", "Thomas", "Martin", "Clark", "Lewis")
MONTHS = ("Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec")
FAMILY_WORDS = ("mother", "father", "brother", "sister")
INDICATION_WORDS = ("headache", "fall", "dizziness", "syncope", "trauma", "confusion",
                    "weakness", "seizure", "hypertension", "nausea")

BOILERPLATE_SENTENCES = (
    "Electronically signed by Dr. {name} on {date} at {time}.",
    "Dictated by Dr. {name} on {date}.",
    "Transcribed by Dr. {name} on {date} at {time}.",
    "Results were called to Dr. {name} at pager {pager}.",
    "Report finalized {mdate}.",
)

# word pools for template slots
POOLS = {
    "side": ("right", "left", "bilateral"),
    "lobe": ("frontal", "parietal", "temporal", "occipital"),
    "anat": ("convexity", "falx", "tentorium", "sylvian fissure", "basal ganglia",
             "thalamus", "cerebellum", "pons", "occipital horn", "frontal lobe",
             "parietal lobe", "temporal lobe"),
    "bone": ("frontal", "parietal", "temporal", "occipital", "nasal"),
    "organ": ("ventricles", "sulci", "basal cisterns", "brainstem", "cerebellum",
              "pituitary fossa", "orbits", "globes", "sella", "craniocervical junction",
              "extra axial spaces", "fourth ventricle", "corpus callosum", "vasculature",
              "skull base", "soft tissues", "internal auditory canals",
              "cerebellopontine angles", "hippocampi", "optic nerves"),
    "sinus": ("paranasal sinuses", "mastoid air cells", "middle ear cavities", "sphenoid sinus",
              "ethmoid labyrinth", "maxillary antra", "frontal recesses", "mastoid tips"),
    "old_lesion": ("infarction", "lacunar infarct", "cortical infarct", "encephalomalacia",
                   "gliosis", "ischemic changes"),
    "wm": ("periventricular", "subcortical", "deep"),
    "ischemic": ("microvascular ischemic disease", "microangiopathic change", "leukoaraiosis",
                 "ischemic demyelination"),
    "bones": ("calvarium", "skull", "cranial vault", "osseous structures", "bony structures",
              "visualized bones"),
    "hapax_lead": ("punctate", "scattered", "isolated", "faint", "minute", "stippled"),
    "edema_adj": ("vasogenic", "perilesional", "surrounding", "cytotoxic"),
    "atrophy": ("generalized volume loss", "cerebral atrophy", "cerebellar atrophy",
                "prominence of the sulci", "ventricular prominence", "parenchymal volume loss"),
    "shift": ("rightward", "leftward"),
    "hapax_noun": ("focus", "calcification", "density", "artifact"),
    "around": ("surrounding", "around", "encircling", "adjacent to"),
    # varied enough that no "{new} X" bigram reaches the collocation threshold
    "postop": ("craniotomy defect", "burr hole", "surgical clip", "shunt catheter",
               "postoperative change", "ventricular drain"),
}

# class-neutral findings; (template, probability of inclusion)
NEUTRAL_FINDINGS = (
    ("The {organ} are {normal}.", 0.8),
    ("The {organ} are {normal}.", 0.5),
    ("The {sinus} are {clear}.", 0.7),
    ("The {bones} are intact.", 0.5),
    ("{hypodensity} in the {wm} white matter.", 0.25),
    ("There is {chronic} {ischemic}.", 0.25),
    ("There is {mild} {atrophy}.", 0.3),
    ("There is {chronic} {old_lesion} in the {side} {lobe} lobe.", 0.4),
    ("There is {mild} mucosal thickening of the {side} {sinus}.", 0.3),
    ("There is {mild} communicating hydrocephalus.", 0.05),
    ("There is a {small} calcified mass along the falx compatible with meningioma.", 0.04),
    ("Nondisplaced fracture of the {side} {bone} bone.", 0.04),
    ("{small} {filler} {filler} in the {anat}.", 0.6),
    ("There is a {large} cisterna magna.", 0.3),
    ("Unchanged compared with the prior {scan}.", 0.25),
    ("There is a {new} {postop} in the {side} {lobe} lobe.", 0.25),
)

SYLLABLE_ONSETS = "bdfgklmnprstvz"
SYLLABLE_VOWELS = "aeiou"
FILLER_ENDINGS = ("ine", "osis", "itis", "al", "ic", "ia", "ous", "ar", "ent")


class GenerationError(ValueError):
    pass


def _pseudo_words(n: int, exclude: set, seed: int = 0) -> tuple:
    rng = random.Random(seed)
    out, seen = [], set(exclude)
    while len(out) < n:
        k = rng.choice((2, 2, 3))
        w = "".join(rng.choice(SYLLABLE_ONSETS) + rng.choice(SYLLABLE_VOWELS) for _ in range(k))
        w += rng.choice(FILLER_ENDINGS)
        if w not in seen:
            seen.add(w)
            out.append(w)
    return tuple(out)


@dataclass
class TemplateSet:
    """Word pools and sentence templates used by :func:`generate_corpus`."""

    hemorrhage_variants: tuple = HEMORRHAGE_VARIANTS
    hemorrhage_words: frozenset = HEMORRHAGE_WORDS
    synonym_groups: dict = field(default_factory=lambda: dict(SYNONYM_GROUPS))
    hedges: dict = field(default_factory=lambda: dict(HEDGES))
    hedge_words: frozenset = HEDGE_WORDS
    negation_cues: tuple = NEGATION_CUES
    negatable: tuple = NEGATABLE
    neutral_findings: tuple = NEUTRAL_FINDINGS
    boilerplate: tuple = BOILERPLATE_SENTENCES
    filler: tuple = ()

    def __post_init__(self):
        seen = {}
        for name, group in self.synonym_groups.items():
            if not group:
                raise GenerationError(f"synonym group {name!r} is empty")
            for w in group:
                if w in seen:
                    raise GenerationError(f"synonym groups {seen[w]!r} and {name!r} share {w!r}")
                seen[w] = name
        for v in self.hemorrhage_variants:
            if not set(v.split()) & self.hemorrhage_words:
                raise GenerationError(f"variant {v!r} has no hemorrhage word")
        for label in (2, 3, 4):
            for h in self.hedges.get(label, ()):
                if not set(re.findall(r"[a-z]+", h)) & self.hedge_words:
                    raise GenerationError(f"hedge {h!r} has no hedge word")
            if not self.hedges.get(label):
                raise GenerationError(f"no hedge templates for label {label}")

    @classmethod
    def default(cls, n_filler: int = 3200) -> "TemplateSet":
        known = set(HEMORRHAGE_WORDS) | set(HEDGE_WORDS)
        for group in SYNONYM_GROUPS.values():
            known.update(group)
        return cls(filler=_pseudo_words(n_filler, known))

    def synonym_pairs(self) -> list:
        return [[a, b] for g in self.synonym_groups.values()
                for i, a in enumerate(g) for b in g[i + 1:]]

    def negation_pairs(self) -> list:
        """``[term, negated token]`` pairs for the planted antonyms, in the
        mapped token space (every negation cue becomes ``NEGEX``)."""
        return [[t.replace(" ", "_"), "NEGEX_" + t.replace(" ", "_")] for t in ANTONYM_TERMS]


@dataclass
class GenerationConfig:
    n_reports: int = 2000
    proportions: tuple = (0.80, 0.04, 0.16)
    seed: int = 7
    synonym_swap_prob: float = 0.8
    negation_prob: float = 0.95
    boilerplate_count: int = 3
    n_labeled: Optional[int] = None
    collocations: tuple = (("gray white", 600), ("focal abnormality", 450))
    filler_zipf: float = 1.0

    def __post_init__(self):
        self.proportions = tuple(float(p) for p in self.proportions)
        if len(self.proportions) != len(RiskClass):
            raise GenerationError(f"need {len(RiskClass)} class proportions")
        if any(p < 0 for p in self.proportions) or not math.isclose(sum(self.proportions), 1.0, abs_tol=1e-9):
            raise GenerationError("proportions must be non-negative and sum to 1")
        for name in ("synonym_swap_prob", "negation_prob"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise GenerationError(f"{name} must be in [0, 1], got {v}")
        if self.n_reports < 1:
            raise GenerationError("n_reports must be >= 1")
        if self.boilerplate_count < 0:
            raise GenerationError("boilerplate_count must be >= 0")
        if self.n_labeled is not None and not 0 <= self.n_labeled <= self.n_reports:
            raise GenerationError("n_labeled must be in 0..n_reports")
        self.collocations = tuple((str(p), int(c)) for p, c in self.collocations)
        for phrase, count in self.collocations:
            if len(phrase.split()) != 2 or count < 0:
                raise GenerationError(f"bad collocation entry {phrase!r}: {count}")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["proportions"] = list(self.proportions)
        d["collocations"] = [list(c) for c in self.collocations]
        return d


@dataclass
class GroundTruth:
    seed: int
    classes: dict               # report id -> RiskClass value (also unlabeled reports)
    synonym_pairs: list
    hemorrhage_variants: list
    negation_pairs: list
    hapaxes: dict               # report id -> planted hapax
    collocations: dict          # "w1 w2" -> planted count
    negation_scopes: dict       # report id -> [[cue, [phrase, ...]], ...]
    sections: dict              # report id -> {"FINDINGS": [start, end], "IMPRESSION": [...]}, each
                                # running to the next header or the end of the text

    def to_dict(self) -> dict:
        return asdict(self)

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(self.to_dict(), fh, indent=1, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "GroundTruth":
        with open(path, encoding="utf-8") as fh:
            return cls(**json.load(fh))


def apportion(n: int, proportions: Sequence[float]) -> list:
    """Largest-remainder apportionment of ``n`` items.

    Every class with positive share gets at least one item (taken from the
    largest class); this is impossible when ``n`` is below the number of
    such classes.
    """
    quotas = [n * p for p in proportions]
    counts = [math.floor(q) for q in quotas]
    order = sorted(range(len(quotas)), key=lambda i: (-(quotas[i] - counts[i]), i))
    for i in order[: n - sum(counts)]:
        counts[i] += 1
    needed = [i for i, p in enumerate(proportions) if p > 0]
    if n < len(needed):
        raise GenerationError(f"cannot place {len(needed)} classes in {n} report(s)")
    for i in needed:
        if counts[i] == 0:
            donor = max(range(len(counts)), key=lambda j: counts[j])
            counts[donor] -= 1
            counts[i] = 1
    return counts


def _hapax(i: int) -> str:
    # letters only and always containing "q" so it never meets a filler word
    s = ""
    i += 26 * 26
    while i:
        i, r = divmod(i, 26)
        s = chr(97 + r) + s
    return "qz" + s


class _Writer:
    """Draws slot fillers for one report."""

    def __init__(self, rng: random.Random, templates: TemplateSet, config: GenerationConfig, filler_cum):
        self.rng = rng
        self.t = templates
        self.cfg = config
        self.filler_cum = filler_cum

    def syn(self, group: str) -> str:
        g = self.t.synonym_groups[group]
        if len(g) > 1 and self.rng.random() < self.cfg.synonym_swap_prob:
            return self.rng.choice(g[1:])
        return g[0]

    def variant(self) -> str:
        v = self.t.hemorrhage_variants
        if self.rng.random() < self.cfg.synonym_swap_prob:
            return self.rng.choice(v[1:])
        return v[0]

    def filler(self) -> str:
        return self.rng.choices(self.t.filler, cum_weights=self.filler_cum)[0]

    def fill(self, template: str) -> str:
        def sub(m):
            key = m.group(1)
            if key == "V":
                return self.variant()
            if key in POOLS:
                return self.rng.choice(POOLS[key])
            if key == "filler":
                return self.filler()
            if key in self.t.synonym_groups:
                return self.syn(key)
            raise GenerationError(f"unknown slot {key!r}")
        return re.sub(r"\{(\w+)\}", sub, template)

    def name(self) -> str:
        return f"{self.rng.choice(FIRST_NAMES)} {self.rng.choice(LAST_NAMES)}"

    def date(self) -> str:
        return f"{self.rng.randint(1, 12):02d}/{self.rng.randint(1, 28):02d}/2015"

    def time(self) -> str:
        return f"{self.rng.randint(0, 23):02d}:{self.rng.randint(0, 59):02d}"

    def boiler(self) -> str:
        tpl = self.rng.choice(self.t.boilerplate)
        return tpl.format(
            name=self.name(), first=self.rng.choice(FIRST_NAMES), date=self.date(),
            time=self.time(), pager=self.rng.randint(1000, 9999),
            mdate=f"{self.rng.choice(MONTHS)} {self.rng.randint(1, 28)}, 2015",
        )


def _cap(s: str) -> str:
    return s[:1].upper() + s[1:]


def _negation_sentence(w: _Writer, items: list, cue: str) -> tuple:
    """``cue a, b, or c.`` plus the recorded scope."""
    if len(items) == 1:
        body = items[0]
    elif len(items) == 2:
        body = f"{items[0]} or {items[1]}"
    else:
        body = ", ".join(items[:-1]) + f", or {items[-1]}"
    return f"{cue} {body}.", [cue.lower(), list(items)]


def _qualify(w: "_Writer", term: str) -> str:
    # negated terms sometimes carry the same modifiers as their positive uses
    if w.rng.random() < 0.5:
        if term == "midline shift":
            return w.fill("{shift} midline shift")
        if term == "edema":
            return w.fill("{edema_adj} edema")
    return term


def _findings(w: _Writer, cls: RiskClass, label: int, planted: list) -> tuple:
    rng = w.rng
    sents, scopes = [], []
    for tpl, p in w.t.neutral_findings:
        if rng.random() < p:
            sents.append(_cap(w.fill(tpl)))
    for phrase in planted:
        if phrase == "gray white":
            sents.append("Gray white differentiation is preserved.")
        elif phrase == "focal abnormality":
            sents.append("There is a focal abnormality of the scalp soft tissues.")
        else:
            sents.append(f"{_cap(phrase)} is noted.")
    rng.shuffle(sents)
    # negations open the section and positive findings close it, so the two
    # never share a context window
    neg, pos = [], []
    cue = rng.choices([c for c, _ in w.t.negation_cues], weights=[p for _, p in w.t.negation_cues])[0]
    if cls == RiskClass.NoRisk:
        if rng.random() < w.cfg.negation_prob:
            head = w.variant()
            if rng.random() < 0.5:
                head = "acute " + head
            items = [head] + [_qualify(w, t) for t in rng.sample(w.t.negatable, rng.randint(1, 3))]
            s, scope = _negation_sentence(w, items, cue)
            neg.append(s)
            scopes.append(scope)
    elif cls == RiskClass.MediumRisk:
        pos.append(w.fill("There is {mild} {hyperdensity} along the {side} {anat}."))
        items = rng.sample(("infarction", "hydrocephalus", "fracture", "herniation"), rng.randint(1, 2))
        if rng.random() < 0.5:
            s, scope = _negation_sentence(w, items, cue)
            neg.append(s)
            scopes.append(scope)
    else:
        if rng.random() < 0.5:
            pos.append(w.fill("There is an acute {V} in the {side} {lobe} lobe."))
        else:
            pos.append(w.fill("There is a {large} {side} {lobe} {V}."))
        shifted = rng.random() < 0.4
        if shifted:
            pos.append(w.fill("There is mass effect with {shift} midline shift."))
        if rng.random() < 0.3:
            pos.append(w.fill("There is {edema_adj} edema {around} the {V}."))
        if rng.random() < 0.2:
            pos.append(w.fill("This is {new} compared with the prior {scan}."))
        negatable = ["fracture", "hydrocephalus", "infarction", "herniation"]
        if not shifted:
            negatable.append("midline shift")
        if rng.random() < 0.7:
            s, scope = _negation_sentence(w, rng.sample(negatable, rng.randint(1, 2)), cue)
            neg.append(s)
            scopes.append(scope)
    return neg + sents + pos, scopes


def _impression(w: _Writer, cls: RiskClass, label: int) -> tuple:
    rng = w.rng
    scopes = []
    if cls == RiskClass.NoRisk:
        choice = rng.choices((0, 1, 2), weights=(0.3, 0.2, 0.5))[0]
        if choice == 0:
            s = "No acute intracranial abnormality."
            scopes.append(["no", ["acute intracranial abnormality"]])
        elif choice == 1:
            s = "Stable appearance of the brain."
        else:
            v = w.variant()
            s = f"No acute {v}."
            scopes.append(["no", [f"acute {v}"]])
        return [s], scopes
    if cls == RiskClass.MediumRisk:
        hedge = w.fill(rng.choice(w.t.hedges[label]))
        return [_cap(hedge) + ".", w.fill("Recommend follow up {scan}.")], scopes
    r = rng.random()
    if r < 0.4:
        out = [w.fill("Acute {V}.")]
    elif r < 0.7:
        out = [w.fill("{large} {side} {V}.")]
    else:
        out = ["Acute intracranial abnormality as above."]
    out[0] = _cap(out[0])
    if rng.random() < 0.5:
        out.append(f"Critical result discussed with Dr. {w.name()} at {w.time()} on {w.date()}.")
    return out, scopes


def generate_corpus(templates: Optional[TemplateSet] = None,
                    config: Optional[GenerationConfig] = None) -> tuple:
    """Return ``(reports, ground_truth)``; deterministic for a given seed."""
    templates = templates or TemplateSet.default()
    config = config or GenerationConfig()
    n = config.n_reports
    rng = random.Random(config.seed)

    n_lab = n if config.n_labeled is None else config.n_labeled
    lab_counts = apportion(n_lab, config.proportions) if n_lab else [0] * len(RiskClass)
    rest_counts = apportion(n - n_lab, config.proportions) if n - n_lab else [0] * len(RiskClass)
    classes = []
    for counts, labeled in ((lab_counts, True), (rest_counts, False)):
        block = [RiskClass(c) for c, k in enumerate(counts) for _ in range(k)]
        rng.shuffle(block)
        classes.extend((c, labeled) for c in block)
    rng.shuffle(classes)

    # collocation pairs go round-robin over a random permutation of reports
    planted = [[] for _ in range(n)]
    colloc_counts = {}
    for phrase, count in config.collocations:
        perm = list(range(n))
        rng.shuffle(perm)
        for k in range(count):
            planted[perm[k % n]].append(phrase)
        colloc_counts[phrase] = count

    weights = [1.0 / (i + 1) ** config.filler_zipf for i in range(len(templates.filler))]
    cum, acc = [], 0.0
    for x in weights:
        acc += x
        cum.append(acc)
    w = _Writer(rng, templates, config, cum)

    width = len(str(n))
    reports, gt_classes, hapaxes, scopes_gt, sections = [], {}, {}, {}, {}
    for i, (cls, labeled) in enumerate(classes):
        rid = f"r{i:0{width}d}"
        label = {RiskClass.NoRisk: 1, RiskClass.HighRisk: 5}.get(cls) or rng.choice((2, 3, 4))
        hapax = _hapax(i)
        f_sents, f_scopes = _findings(w, cls, label, planted[i])
        f_sents.insert(rng.randrange(len(f_sents) + 1), w.fill(f"There is a {{hapax_lead}} {hapax} {{hapax_noun}}."))
        i_sents, i_scopes = _impression(w, cls, label)
        boiler = [w.boiler() for _ in range(config.boilerplate_count)]
        if boiler and rng.random() < 0.5:
            # some boilerplate lands inside the impression
            i_sents.append(boiler.pop())
        elif rng.random() < 0.3:
            i_sents.append(MEDICOLEGAL)

        history = w.fill(f"{rng.randint(18, 95)}-year-old {rng.choice(('male', 'female'))} with "
                         f"{rng.choice(INDICATION_WORDS)} and {{filler}} {{filler}}.")
        if rng.random() < 0.1:
            history += f" Family history of aneurysm in {rng.choice(FAMILY_WORDS)}."
        comparison = f"CT head dated {w.date()}." if rng.random() < 0.4 else "None."
        head = (f"EXAM: CT HEAD WITHOUT CONTRAST\nHISTORY: {history}\nCOMPARISON: {comparison}\n"
                f"TECHNIQUE: Axial images of the head were obtained without intravenous contrast.\n")
        findings = " ".join(f_sents)
        impression = " ".join(i_sents)
        text = head + "FINDINGS: "
        f_span = [len(text), len(text) + len(findings)]
        text += findings + "\nIMPRESSION: "
        i_start = len(text)
        text += impression + "\n"
        comment = None
        if rng.random() < 0.3:
            comment = f"Additional comment: Findings reviewed with Dr. {w.name()} on {w.date()}.\n"
        footer = boiler + [MEDICOLEGAL]
        rng.shuffle(footer)
        footer = " ".join(footer) + "\n"
        # a section runs to the next header, so an unheaded footer belongs
        # to the impression
        if comment is None:
            text += footer
            i_span = [i_start, len(text)]
        else:
            i_span = [i_start, len(text)]
            text += comment + footer

        reports.append(Report(rid, text, label if labeled else None))
        gt_classes[rid] = int(cls)
        hapaxes[rid] = hapax
        scopes_gt[rid] = f_scopes + i_scopes
        sections[rid] = {"FINDINGS": f_span, "IMPRESSION": i_span}

    gt = GroundTruth(
        seed=config.seed,
        classes=gt_classes,
        synonym_pairs=templates.synonym_pairs(),
        hemorrhage_variants=list(templates.hemorrhage_variants),
        negation_pairs=templates.negation_pairs(),
        hapaxes=hapaxes,
        collocations=colloc_counts,
        negation_scopes=scopes_gt,
        sections=sections,
    )
    return reports, gt


def write_corpus(reports, gt: GroundTruth, reports_path, groundtruth_path) -> None:
    save_reports(reports, reports_path)
    gt.save(groundtruth_path)


_WORDS = re.compile(r"[a-z]+")


def rule_oracle(text: str, templates: Optional[TemplateSet] = None) -> RiskClass:
    """Recover the class from the discriminative token groups.

    Medium if any hedge word occurs in FINDINGS/IMPRESSION; otherwise high
    if a hemorrhage word occurs in a sentence without a negation cue before
    it; otherwise no risk.
    """
    t = templates or TemplateSet()
    body = split_sections(text).text.lower()
    cues = [c.lower().split() for c, _ in t.negation_cues]
    high = False
    for sent in re.split(r"[.;:!?]", body):
        words = _WORDS.findall(sent)
        if set(words) & t.hedge_words:
            return RiskClass.MediumRisk
        negated = False
        for k, word in enumerate(words):
            if any(words[k:k + len(c)] == c for c in cues):
                negated = True
            if word in t.hemorrhage_words and not negated:
                high = True
    return RiskClass.HighRisk if high else RiskClass.NoRisk
