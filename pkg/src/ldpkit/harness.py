"""Experiment configuration, end-to-end evaluation runs and reports."""
from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import yaml

from .backend import DEFAULT_SUM_MAX_TOKENS, Backend, load_backend
from .corpus import filter_corpus, read_corpus, sample_lines
from .exceptions import ConfigError, EmptyText, NoTargetSegment
from .jsonl import dumps, read_jsonl, write_jsonl
from .lang import Registry, default_registry, load_registry
from .metrics import OTHER, confusion_matrix, rouge_l
from .metrics.bleu import bleu, sentence_bleu
from .metrics.chrf import chrf_pp, sentence_chrf_pp
from .prompt import (DEFAULT_BASIC_TEMPLATE, DEFAULT_LDP_LANGS, DEFAULT_XLT_TEMPLATE, PIVOT,
                     XLT_MARKER, DocSumExemplar, Exemplar, TagStyle, build_basic_sum_prompt,
                     build_e2x_prompt, build_judge_prompt, build_pair_prompt, build_pivot_prompt,
                     build_sum_prompt, build_x2e_prompt, build_xlt_sum_prompt,
                     parse_pivot_completion, parse_summary, parse_translation)
from .synthesis import (build_intra_exemplars, synthesize_sum_exemplars, synthesize_triplets,
                        synthesize_x2e)

log = logging.getLogger(__name__)

TASKS = ("x2e", "e2x", "x2y", "summarize")
TRANSLATION_METHODS = ("zero_shot", "supervised", "ldp", "ldp_bt")
SUMMARIZATION_METHODS = ("zero_shot", "xlt", "ldp_sum", "ldp_sum_unlabeled")
MAX_DOC_CHARS = 1500

METRIC_NAMES = {"chrf++": "chrF++", "chrf": "chrF++", "bleu": "BLEU", "rouge_l": "ROUGE-L",
                "rouge-l": "ROUGE-L"}


@dataclass
class ExperimentConfig:
    task: str
    languages: list
    method: str
    pivot: str = PIVOT
    tag_style: str | None = None
    ldp_set: list = field(default_factory=lambda: list(DEFAULT_LDP_LANGS))
    shots: int | None = None
    sample_size: int | None = None
    seed: int = 0
    backend_id: str = "mock"
    metrics: list | None = None
    test_sets: dict = field(default_factory=dict)
    exemplar_pools: dict = field(default_factory=dict)
    ldp_exemplars: str | None = None
    unlabeled: dict = field(default_factory=dict)
    sum_exemplars: str | None = None
    groups: dict = field(default_factory=dict)
    backends: list = field(default_factory=list)
    lid_seed: dict = field(default_factory=dict)
    cache_dir: str | None = None
    registry_file: str | None = None
    xlt_template: str | None = None
    max_doc_chars: int = MAX_DOC_CHARS
    emit_judge_prompts: bool = False
    parallelism: int | None = None

    def __post_init__(self):
        if self.shots is None:
            self.shots = 1 if self.task == "summarize" else 8
        if self.sample_size is None:
            self.sample_size = 100 if self.task == "summarize" else 200
        if self.metrics is None:
            self.metrics = ["rouge_l"] if self.task == "summarize" else ["chrf++", "bleu"]

    @property
    def style(self) -> TagStyle:
        if self.tag_style is not None:
            return TagStyle(self.tag_style)
        return TagStyle.NONE if self.method in ("ldp", "ldp_bt") else TagStyle.ENGLISH

    def validate(self):
        if self.task not in TASKS:
            raise ConfigError(f"task must be one of {TASKS}")
        methods = SUMMARIZATION_METHODS if self.task == "summarize" else TRANSLATION_METHODS
        if self.method not in methods:
            raise ConfigError(f"method {self.method!r} is not available for task {self.task!r}")
        if not self.languages:
            raise ConfigError("no languages configured")
        if self.shots < 0 or self.sample_size < 1:
            raise ConfigError("shots must be >= 0 and sample_size >= 1")
        for m in self.metrics:
            if m.lower() not in METRIC_NAMES:
                raise ConfigError(f"unknown metric {m!r}")
        for lang in self.languages:
            if lang not in self.test_sets:
                raise ConfigError(f"no test set for {lang!r}")
            if self.task == "x2y" and "-" not in lang:
                raise ConfigError(f"x2y languages are 'src-tgt' pairs, got {lang!r}")
        if self.method == "supervised":
            missing = [l for l in self.languages if l not in self.exemplar_pools]
            if missing:
                raise ConfigError(f"supervised needs exemplar_pools for {missing}")
        if self.method in ("ldp", "ldp_bt") and not self.ldp_exemplars:
            raise ConfigError(f"{self.method} needs ldp_exemplars")
        if self.method == "ldp" and self.task == "x2y":
            raise ConfigError("x2y supports zero_shot, supervised and ldp_bt")
        if self.method in ("ldp_bt", "ldp_sum_unlabeled"):
            needed = set()
            for lang in self.languages:
                needed.update(lang.split("-") if self.task == "x2y" else [lang])
            missing = sorted(needed - set(self.unlabeled))
            if missing:
                raise ConfigError(f"{self.method} needs unlabeled corpora for {missing}")
        if self.method == "ldp_sum" and not self.sum_exemplars:
            raise ConfigError("ldp_sum needs sum_exemplars")
        return self

    def to_dict(self):
        return asdict(self)

    def digest(self) -> str:
        return hashlib.sha256(dumps(self.to_dict()).encode("utf-8")).hexdigest()

    def backend_config(self, backend_id: str | None = None) -> dict:
        wanted = backend_id or self.backend_id
        for b in self.backends:
            if b.get("backend_id") == wanted:
                return dict(b)
        if wanted == "mock":
            return {"backend_id": "mock", "kind": "mock"}
        raise ConfigError(f"backend {wanted!r} not configured")


def _resolve(base: Path, value):
    if value is None:
        return None
    if isinstance(value, dict):
        return {k: _resolve(base, v) for k, v in value.items()}
    p = Path(value)
    return str(p if p.is_absolute() else base / p)


def load_config(path, **overrides) -> ExperimentConfig:
    """Read a YAML (or JSON) experiment file; relative paths resolve against its folder."""
    path = Path(path)
    with open(path, encoding="utf-8") as f:
        raw = yaml.safe_load(f) or {}
    raw.update({k: v for k, v in overrides.items() if v is not None})
    base = path.parent
    for key in ("test_sets", "exemplar_pools", "unlabeled", "lid_seed"):
        if key in raw:
            raw[key] = {k: _resolve(base, v) for k, v in raw[key].items()}
    for key in ("ldp_exemplars", "sum_exemplars", "cache_dir", "registry_file"):
        if raw.get(key):
            raw[key] = _resolve(base, raw[key])
    known = set(ExperimentConfig.__dataclass_fields__)
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown config keys {sorted(unknown)}")
    try:
        return ExperimentConfig(**raw)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


@dataclass
class EvalRecord:
    key: str
    index: int
    source: str
    reference: str
    hypothesis: str
    intended_lang: str
    method: str
    prompt_digest: str = ""
    intermediate_en: str | None = None
    predicted_lang: str | None = None
    scores: dict = field(default_factory=dict)
    error: str | None = None
    judge_prompt: str | None = None

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


def load_test_set(spec, task="x2e") -> list[tuple[str, str]]:
    """``(source, reference)`` pairs from JSONL or a ``{source, reference}`` pair of text files."""
    if isinstance(spec, dict):
        with open(spec["source"], encoding="utf-8") as f:
            src = [l.rstrip("\r\n") for l in f]
        with open(spec["reference"], encoding="utf-8") as f:
            ref = [l.rstrip("\r\n") for l in f]
        if len(src) != len(ref):
            raise ConfigError(f"{spec['source']} and {spec['reference']} differ in length")
        return list(zip(src, ref))
    out = []
    for rec in read_jsonl(spec):
        if task == "summarize":
            out.append((rec.get("document", rec.get("source")), rec.get("summary", rec.get("reference"))))
        else:
            out.append((rec["source"], rec["reference"]))
    return out


def load_exemplars(path) -> list[Exemplar]:
    return [Exemplar(r["src_text"], r["tgt_text"], r["src_lang"], r["tgt_lang"],
                     r.get("provenance", "supervised")) for r in read_jsonl(path)]


def load_sum_exemplars(path) -> list[DocSumExemplar]:
    return [DocSumExemplar(r["doc"], r["summary"], r["lang"]) for r in read_jsonl(path)]


def load_documents(path) -> list[str]:
    docs = []
    for r in read_jsonl(path):
        docs.append(r.get("document", r.get("text")))
    return docs


def _ldp_seeds(config: ExperimentConfig) -> list[Exemplar]:
    seeds = [e.swapped() if e.src_lang == config.pivot else e for e in load_exemplars(config.ldp_exemplars)]
    by_lang = {e.src_lang: e for e in seeds}
    missing = [l for l in config.ldp_set if l not in by_lang]
    if missing:
        raise ConfigError(f"ldp_exemplars has no pair for {missing}")
    return [by_lang[l] for l in config.ldp_set]


def _unlabeled(config, lang, registry):
    lines = read_corpus(config.unlabeled[lang], lang, source_id=f"unlabeled:{lang}")
    kept, report = filter_corpus(lines, registry[lang])
    log.info("unlabeled %s: kept %d of %d", lang, report.accepted, report.total)
    return kept


def _oriented_pool(config, key, src, tgt):
    pool = []
    for e in load_exemplars(config.exemplar_pools[key]):
        if (e.src_lang, e.tgt_lang) == (tgt, src):
            e = e.swapped()
        if (e.src_lang, e.tgt_lang) == (src, tgt):
            pool.append(e)
    if len(pool) < config.shots:
        raise ConfigError(f"exemplar pool for {key} has {len(pool)} {src}->{tgt} pairs, "
                          f"need {config.shots}")
    return sample_lines(pool, config.shots, config.seed)


def _direction(config, key):
    if config.task == "x2e":
        return key, config.pivot
    if config.task == "e2x":
        return config.pivot, key
    src, tgt = key.split("-", 1)
    return src, tgt


def translation_prompter(config: ExperimentConfig, key: str, backend: Backend | None,
                         registry: Registry):
    """Return ``(make_prompt, pivot_style)`` for one language key of a translation run.

    ``pivot_style`` is None unless the prompts are X-En-Y pivot prompts.
    """
    src, tgt = _direction(config, key)
    style = config.style
    method = config.method
    if method == "zero_shot":
        return (lambda s: build_pair_prompt([], s, src, tgt, style, registry)), None
    if method == "supervised":
        shots = _oriented_pool(config, key, src, tgt)
        return (lambda s: build_pair_prompt(shots, s, src, tgt, style, registry)), None
    seeds = _ldp_seeds(config)
    if method == "ldp":
        if config.task == "x2e":
            return (lambda s: build_x2e_prompt(seeds, s, src, style, registry, config.pivot)), None
        swapped = [e.swapped() for e in seeds]
        return (lambda s: build_pair_prompt(swapped, s, src, tgt, style, registry)), None
    # ldp_bt
    if backend is None:
        raise ConfigError("ldp_bt needs a backend to synthesize exemplars")
    if config.task == "x2y":
        triplets, dropped = synthesize_triplets(
            _unlabeled(config, src, registry), seeds, backend, tgt, m_bt=config.shots,
            seed=config.seed, corpus_y=_unlabeled(config, tgt, registry), n=config.shots,
            style=style, registry=registry, parallelism=config.parallelism)
        if not triplets:
            raise ConfigError(f"no pivot triplets could be built for {key} ({len(dropped)} dropped)")
        pivot_style = TagStyle.ENGLISH if style is TagStyle.NONE else style
        return (lambda s: build_pivot_prompt(triplets, s, src, tgt, registry, pivot_style,
                                             config.pivot)), pivot_style
    x = key
    pairs = synthesize_x2e(_unlabeled(config, x, registry), seeds, backend, style, registry,
                           parallelism=config.parallelism)
    if config.task == "x2e":
        intra = build_intra_exemplars(pairs, "x2e", config.shots, config.seed)
        return (lambda s: build_x2e_prompt(intra, s, src, style, registry, config.pivot)), None
    intra = build_intra_exemplars(pairs, "e2x", config.shots, config.seed)
    return (lambda s: build_e2x_prompt(intra, s, tgt, style, registry, config.pivot)), None


def score_names(config):
    return [METRIC_NAMES[m.lower()] for m in config.metrics]


def _segment_scores(names, hyp, ref):
    out = {}
    for name in names:
        if name == "chrF++":
            out[name] = sentence_chrf_pp(hyp, ref)
        elif name == "BLEU":
            out[name] = sentence_bleu(hyp, ref)
        elif name == "ROUGE-L":
            out[name] = rouge_l(hyp, ref).f
    return out


def corpus_scores(names, hyps, refs):
    out = {"segments": len(hyps)}
    if not hyps:
        return out
    for name in names:
        if name == "chrF++":
            out[name] = chrf_pp(hyps, refs).value
        elif name == "BLEU":
            out[name] = bleu(hyps, refs).value
        elif name == "ROUGE-L":
            out[name] = sum(rouge_l(h, r).f for h, r in zip(hyps, refs)) / len(hyps)
    return out


def _sample(config, items):
    return sample_lines(items, min(config.sample_size, len(items)), config.seed)


def render_translation_prompts(config: ExperimentConfig, backend: Backend | None = None,
                               registry: Registry | None = None) -> list[dict]:
    """Prompts a run would send, without generating test completions (``--dry-run``).

    ``ldp_bt`` still needs ``backend`` to synthesize its exemplars.
    """
    registry = registry or config_registry(config)
    out = []
    for key in config.languages:
        make, _ = translation_prompter(config, key, backend, registry)
        for i, (src, _) in enumerate(_sample(config, load_test_set(config.test_sets[key]))):
            p = make(src)
            out.append({"key": key, "index": i, "prompt": p.text, "stop": list(p.stop)})
    return out


def config_registry(config):
    return load_registry(config.registry_file) if config.registry_file else default_registry()


def run_translation_eval(config: ExperimentConfig, backend: Backend,
                         registry: Registry | None = None):
    """Evaluate ``config.method`` on every configured language.

    Returns ``(records, scores)`` with ``scores[key] = {metric: value, 'segments': n}``.
    The evaluation subset depends only on the test file and seed, so runs of
    different methods are paired item by item.
    """
    config.validate()
    registry = registry or config_registry(config)
    names = score_names(config)
    records, scores = [], {}
    for key in config.languages:
        src_lang, tgt_lang = _direction(config, key)
        items = _sample(config, load_test_set(config.test_sets[key]))
        make, pivot_style = translation_prompter(config, key, backend, registry)
        prompts = [make(src) for src, _ in items]
        reqs = [backend.request(p) for p in prompts]
        results = backend.generate_batch(reqs, config.parallelism)
        for i, ((src, ref), p, req, res) in enumerate(zip(items, prompts, reqs, results)):
            rec = EvalRecord(key, i, src, ref, "", tgt_lang, config.method, req.cache_key())
            if not res.ok:
                rec.error = res.error or "generation failed"
            elif pivot_style is not None:
                try:
                    rec.intermediate_en, rec.hypothesis = parse_pivot_completion(
                        res.text, tgt_lang, registry, pivot_style)
                except NoTargetSegment as exc:
                    rec.error = str(exc)
                    rec.intermediate_en = parse_translation(res.text, ("\n",))
            else:
                rec.hypothesis = parse_translation(res.text, p.stop)
            if not rec.hypothesis and rec.error is None:
                rec.error = "empty completion"
            rec.scores = _segment_scores(names, rec.hypothesis, ref)
            records.append(rec)
        mine = [r for r in records if r.key == key]
        scores[key] = corpus_scores(names, [r.hypothesis for r in mine], [r.reference for r in mine])
    return records, scores


def summarization_items(config, key):
    items = [(d, s) for d, s in load_test_set(config.test_sets[key], "summarize")
             if len(d) < config.max_doc_chars]
    return _sample(config, items)


def summarization_prompter(config: ExperimentConfig, key: str, backend: Backend | None,
                           registry: Registry):
    """Return ``(make_prompt, marker)`` for one language of a summarization run."""
    method = config.method
    if method == "zero_shot":
        return (lambda d: build_basic_sum_prompt(d, key, DEFAULT_BASIC_TEMPLATE, registry)), None
    if method == "xlt":
        template = config.xlt_template or DEFAULT_XLT_TEMPLATE
        return (lambda d: build_xlt_sum_prompt(d, key, template, registry)), XLT_MARKER
    cross = []
    if config.sum_exemplars:
        pool = [e for e in load_sum_exemplars(config.sum_exemplars)
                if e.lang != key and len(e.doc) < config.max_doc_chars]
        cross = sample_lines(pool, min(config.shots, len(pool)), config.seed)
    if method == "ldp_sum":
        return (lambda d: build_sum_prompt(cross, d, key, registry)), None
    if backend is None:
        raise ConfigError("ldp_sum_unlabeled needs a backend to synthesize exemplars")
    docs = [d for d in load_documents(config.unlabeled[key]) if len(d) < config.max_doc_chars]
    intra = synthesize_sum_exemplars(docs, cross, backend, key, m=config.shots, seed=config.seed,
                                     xlt_template=config.xlt_template or DEFAULT_XLT_TEMPLATE,
                                     registry=registry, parallelism=config.parallelism)
    if len(intra) < config.shots:
        raise ConfigError(f"only {len(intra)} intra-lingual summary exemplars for {key}")
    return (lambda d: build_sum_prompt(intra, d, key, registry)), None


def run_summarization_eval(config: ExperimentConfig, backend: Backend,
                           registry: Registry | None = None):
    config.validate()
    registry = registry or config_registry(config)
    names = score_names(config)
    records, scores = [], {}
    for key in config.languages:
        items = summarization_items(config, key)
        make, marker = summarization_prompter(config, key, backend, registry)
        prompts = [make(d) for d, _ in items]
        reqs = [backend.request(p, max_tokens=DEFAULT_SUM_MAX_TOKENS) for p in prompts]
        results = backend.generate_batch(reqs, config.parallelism)
        for i, ((doc, ref), p, req, res) in enumerate(zip(items, prompts, reqs, results)):
            rec = EvalRecord(key, i, doc, ref, "", key, config.method, req.cache_key())
            if res.ok:
                rec.hypothesis = parse_summary(res.text, p.stop, marker)
                if not rec.hypothesis:
                    rec.error = "empty completion"
            else:
                rec.error = res.error or "generation failed"
            rec.scores = _segment_scores(names, rec.hypothesis, ref)
            if config.emit_judge_prompts:
                rec.judge_prompt = build_judge_prompt(doc, rec.hypothesis, key, registry).text
            records.append(rec)
        mine = [r for r in records if r.key == key]
        scores[key] = corpus_scores(names, [r.hypothesis for r in mine], [r.reference for r in mine])
    return records, scores


def language_confusion_analysis(records: Sequence[EvalRecord], lid_model):
    """Classify every hypothesis and count (intended, predicted) pairs.

    Empty hypotheses count as ``"##"``. ``predicted_lang`` is filled in on the records.
    """
    pairs = []
    for rec in records:
        try:
            pred = lid_model.predict_one(rec.hypothesis)
        except EmptyText:
            pred = OTHER
        rec.predicted_lang = pred
        pairs.append((rec.intended_lang, pred))
    return confusion_matrix(pairs, lid_model.classes_)


def report(records: Sequence[EvalRecord], scores: dict, config: ExperimentConfig) -> dict:
    """Per-language and group-averaged scores plus run metadata.

    Group averages are unweighted means over per-language corpus scores.
    """
    names = score_names(config)
    groups = config.groups or {"all": list(config.languages)}
    group_scores = {}
    for gname, members in groups.items():
        present = [scores[m] for m in members if m in scores and scores[m].get("segments")]
        group_scores[gname] = {
            n: (sum(s[n] for s in present) / len(present) if present else None) for n in names
        }
        group_scores[gname]["languages"] = len(present)
    errors = {}
    for r in records:
        if r.error:
            errors[r.key] = errors.get(r.key, 0) + 1
    total = len(records)
    return {
        "task": config.task,
        "method": config.method,
        "backend_id": config.backend_id,
        "seed": config.seed,
        "config_digest": config.digest(),
        "metrics": names,
        "segments": total,
        "no_segments": total == 0,
        "languages": {k: {**scores[k], "errors": errors.get(k, 0)} for k in config.languages
                      if k in scores},
        "groups": group_scores,
    }


def _fmt(v):
    return "-" if v is None else f"{v:.2f}" if isinstance(v, float) else str(v)


def report_text(rep: dict) -> str:
    names = rep["metrics"]
    header = ["lang"] + names + ["n", "errors"]
    rows = [[k] + [_fmt(v.get(n)) for n in names] + [str(v.get("segments", 0)), str(v["errors"])]
            for k, v in rep["languages"].items()]
    rows += [[f"avg:{g}"] + [_fmt(v.get(n)) for n in names] + [str(v["languages"]), ""]
             for g, v in rep["groups"].items()]
    widths = [max(len(r[i]) for r in [header] + rows) for i in range(len(header))]
    lines = [f"# task={rep['task']} method={rep['method']} backend={rep['backend_id']} "
             f"seed={rep['seed']} config={rep['config_digest'][:12]}"]
    if rep["no_segments"]:
        lines.append("# WARNING: no segments were evaluated")
    for r in [header] + rows:
        lines.append("  ".join(c.ljust(w) if i == 0 else c.rjust(w)
                               for i, (c, w) in enumerate(zip(r, widths))).rstrip())
    return "\n".join(lines) + "\n"


def write_run(out_dir, records, rep) -> dict:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {"records": out / "records.jsonl", "report": out / "report.json",
             "table": out / "report.txt"}
    write_jsonl(records, paths["records"])
    paths["report"].write_text(json.dumps(rep, ensure_ascii=False, sort_keys=True, indent=2) + "\n",
                               encoding="utf-8")
    paths["table"].write_text(report_text(rep), encoding="utf-8")
    return paths


def run_experiment(config: ExperimentConfig, out_dir, backend: Backend | None = None,
                   registry: Registry | None = None) -> dict:
    """Run, score and write ``records.jsonl``, ``report.json`` and ``report.txt``."""
    config.validate()
    registry = registry or config_registry(config)
    if backend is None:
        backend = load_backend(config.backend_config(), cache_dir=config.cache_dir,
                               registry=registry)
    if config.task == "summarize":
        records, scores = run_summarization_eval(config, backend, registry)
    else:
        records, scores = run_translation_eval(config, backend, registry)
    rep = report(records, scores, config)
    return write_run(out_dir, records, rep)


def load_records(path) -> list[EvalRecord]:
    return [EvalRecord.from_dict(r) for r in read_jsonl(path)]
