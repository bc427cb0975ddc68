"""Command line entry point: ``ldpkit <subcommand> ...``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .backend import load_backend
from .corpus import filter_corpus, mixture_weights, read_corpus, write_corpus
from .harness import (METRIC_NAMES, EvalRecord, ExperimentConfig, corpus_scores, config_registry,
                      score_names, summarization_items, language_confusion_analysis, load_config,
                      load_documents, load_exemplars, load_records, load_sum_exemplars, report,
                      report_text, render_translation_prompts, run_experiment,
                      summarization_prompter, write_run)
from .jsonl import read_jsonl, write_jsonl
from .lang import load_registry
from .metrics import fragmentation_ratio, lid_train
from .prompt import TagStyle
from .synthesis import (SyntheticPair, build_intra_exemplars, export_finetune,
                        synthesize_sum_exemplars, synthesize_triplets, synthesize_x2e)

log = logging.getLogger("ldpkit")


def _config(args, required=True) -> ExperimentConfig | None:
    if not args.config:
        if required:
            raise SystemExit("error: --config is required for this command")
        return None
    overrides = {"seed": args.seed, "backend_id": args.backend}
    return load_config(args.config, **overrides)


def _backend(args, cfg, registry):
    if cfg is not None:
        bcfg = cfg.backend_config(args.backend)
        cache_dir = args.cache_dir or cfg.cache_dir
    else:
        bcfg = {"backend_id": args.backend or "mock", "kind": "mock"}
        cache_dir = args.cache_dir
    if args.backend_file:
        with open(args.backend_file, encoding="utf-8") as f:
            bcfg = json.load(f)
    return load_backend(bcfg, cache_dir=cache_dir, registry=registry)


def _registry_for(args, cfg):
    if args.registry:
        return load_registry(args.registry)
    return config_registry(cfg) if cfg is not None else load_registry()


def _seed(args, cfg):
    if args.seed is not None:
        return args.seed
    return cfg.seed if cfg is not None else 0


def cmd_filter(args):
    registry = _registry_for(args, None)
    spec = registry[args.lang]
    lines = read_corpus(args.input, args.lang)
    kept, rep = filter_corpus(lines, spec)
    write_corpus(kept, args.out)
    payload = {"lang": args.lang, **rep.to_dict()}
    if args.report:
        Path(args.report).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    print(json.dumps(payload))


def _read_sizes(path):
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError:
        data = [line.split() for line in text.splitlines() if line.strip()]
        return [(lang, int(n)) for lang, n in data]
    return list(data.items()) if isinstance(data, dict) else [tuple(x) for x in data]


def cmd_weights(args):
    w = mixture_weights(_read_sizes(args.sizes), args.temperature)
    print(json.dumps(w.to_dict(), indent=2))


def cmd_synth_x2e(args):
    cfg = _config(args, required=False)
    registry = _registry_for(args, cfg)
    backend = _backend(args, cfg, registry)
    seeds = load_exemplars(args.seeds) if args.seeds else []
    lines = read_corpus(args.input, args.lang)
    pairs = synthesize_x2e(lines, seeds, backend, TagStyle(args.style), registry)
    n = write_jsonl(pairs, args.out)
    usable = sum(p.usable for p in pairs)
    print(json.dumps({"written": n, "usable": usable, "flagged": n - usable}))
    if args.m:
        ex = build_intra_exemplars(pairs, args.direction, args.m, _seed(args, cfg))
        write_jsonl(ex, Path(args.out).with_suffix(".exemplars.jsonl"))


def cmd_synth_pivot(args):
    cfg = _config(args, required=False)
    registry = _registry_for(args, cfg)
    backend = _backend(args, cfg, registry)
    seeds = load_exemplars(args.seeds) if args.seeds else []
    corpus_x = read_corpus(args.input, args.lang)
    corpus_y = read_corpus(args.tgt_input, args.tgt) if args.tgt_input else None
    triplets, dropped = synthesize_triplets(corpus_x, seeds, backend, args.tgt, m_bt=args.m,
                                            seed=_seed(args, cfg), corpus_y=corpus_y, n=args.n,
                                            style=TagStyle(args.style), registry=registry)
    write_jsonl(triplets, args.out)
    print(json.dumps({"triplets": len(triplets), "dropped": len(dropped)}))


def cmd_synth_sum(args):
    cfg = _config(args, required=False)
    registry = _registry_for(args, cfg)
    backend = _backend(args, cfg, registry)
    cross = load_sum_exemplars(args.exemplars) if args.exemplars else []
    docs = load_documents(args.input)
    out = synthesize_sum_exemplars(docs, cross, backend, args.lang, m=args.m,
                                   seed=_seed(args, cfg), registry=registry)
    write_jsonl(out, args.out)
    print(json.dumps({"exemplars": len(out)}))


def cmd_export_finetune(args):
    registry = _registry_for(args, None)
    pairs = [SyntheticPair.from_dict(r) for r in read_jsonl(args.input)]
    directions = [d.strip() for d in args.directions.split(",") if d.strip()]
    recs = export_finetune(pairs, directions, registry)
    write_jsonl(recs, args.out)
    print(json.dumps({"records": len(recs)}))


def _run(args, task_filter):
    cfg = _config(args)
    if task_filter == "summarize" and cfg.task != "summarize":
        raise SystemExit("error: config task is not 'summarize'")
    if task_filter == "translate" and cfg.task == "summarize":
        raise SystemExit("error: config task is 'summarize'; use the summarize command")
    registry = _registry_for(args, cfg)
    if args.dry_run:
        cfg.validate()
        backend = _backend(args, cfg, registry) if cfg.method in ("ldp_bt", "ldp_sum_unlabeled") else None
        if cfg.task == "summarize":
            prompts = _summarize_dry_run(cfg, backend, registry)
        else:
            prompts = render_translation_prompts(cfg, backend, registry)
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        write_jsonl(prompts, out / "prompts.jsonl")
        print(json.dumps({"prompts": len(prompts), "path": str(out / "prompts.jsonl")}))
        return
    backend = _backend(args, cfg, registry)
    paths = run_experiment(cfg, args.out_dir, backend, registry)
    print(Path(paths["table"]).read_text(encoding="utf-8"), end="")


def _summarize_dry_run(cfg, backend, registry):
    out = []
    for key in cfg.languages:
        make, _ = summarization_prompter(cfg, key, backend, registry)
        for i, (doc, _) in enumerate(summarization_items(cfg, key)):
            p = make(doc)
            out.append({"key": key, "index": i, "prompt": p.text, "stop": list(p.stop)})
    return out


def cmd_translate(args):
    _run(args, "translate")


def cmd_summarize(args):
    _run(args, "summarize")


def cmd_evaluate(args):
    """Score a predictions file of ``{hypothesis, reference, lang}`` records."""
    rows = read_jsonl(args.input)
    names = [METRIC_NAMES[m.strip().lower()] for m in args.metrics.split(",")]
    by_lang = {}
    for r in rows:
        by_lang.setdefault(r.get("lang", "all"), []).append(r)
    out = {}
    for lang in sorted(by_lang):
        rs = by_lang[lang]
        out[lang] = corpus_scores(names, [r["hypothesis"] for r in rs], [r["reference"] for r in rs])
    print(json.dumps(out, indent=2, sort_keys=True))


def cmd_report(args):
    cfg = _config(args)
    records = load_records(args.records)
    names = score_names(cfg)
    scores = {}
    for key in cfg.languages:
        mine = [r for r in records if r.key == key]
        scores[key] = corpus_scores(names, [r.hypothesis for r in mine], [r.reference for r in mine])
    rep = report(records, scores, cfg)
    if args.out_dir:
        write_run(args.out_dir, records, rep)
    print(report_text(rep), end="")


def cmd_lid_report(args):
    cfg = _config(args)
    if not cfg.lid_seed:
        raise SystemExit("error: config has no lid_seed corpora")
    seeds = {}
    for lang, path in cfg.lid_seed.items():
        with open(path, encoding="utf-8") as f:
            seeds[lang] = [l.strip() for l in f if l.strip()]
    params = {} if args.floor is None else {"floor": None if args.floor < 0 else args.floor}
    model = lid_train(seeds, registry=_registry_for(args, cfg), **params)
    records: list[EvalRecord] = load_records(args.records)
    matrix = language_confusion_analysis(records, model)
    if args.out:
        Path(args.out).write_text(json.dumps(matrix.to_dict(), indent=2) + "\n", encoding="utf-8")
    print(matrix.to_text(), end="")


def cmd_frag_report(args):
    rows = read_jsonl(args.input)
    by_lang = {}
    for r in rows:
        x = r.get("x_text", r.get("x"))
        en = r.get("en_text", r.get("en"))
        by_lang.setdefault(r.get("x_lang", r.get("lang", "all")), []).append((x, en))
    out = {lang: fragmentation_ratio(pairs, args.tokenizer_x, args.tokenizer_en)
           for lang, pairs in sorted(by_lang.items())}
    print(json.dumps(out, indent=2))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="experiment config (YAML or JSON)")
    common.add_argument("--backend", help="backend_id to use from the config")
    common.add_argument("--backend-file", help="JSON file with a single backend config")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--dry-run", action="store_true", help="render prompts only")
    common.add_argument("--cache-dir", help="response cache directory")
    common.add_argument("--registry", help="JSONL registry extension/override file")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="ldpkit", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("filter", parents=[common], help="filter an unlabeled corpus")
    s.add_argument("--lang", required=True)
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--report")
    s.set_defaults(func=cmd_filter)

    s = sub.add_parser("weights", parents=[common], help="temperature mixture weights")
    s.add_argument("--temperature", type=float, default=25.0)
    s.add_argument("--sizes", required=True, help="JSON {lang: n} or 'lang n' lines")
    s.set_defaults(func=cmd_weights)

    style_choices = [t.value for t in TagStyle]
    s = sub.add_parser("synth-x2e", parents=[common], help="back-translate a corpus into English")
    s.add_argument("--lang", required=True)
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--seeds", help="LDP exemplar JSONL")
    s.add_argument("--out", required=True)
    s.add_argument("--style", choices=style_choices, default="none")
    s.add_argument("--m", type=int, default=0, help="also write m intra-lingual exemplars")
    s.add_argument("--direction", choices=["x2e", "e2x"], default="e2x")
    s.set_defaults(func=cmd_synth_x2e)

    s = sub.add_parser("synth-pivot", parents=[common], help="build X-En-Y triplets")
    s.add_argument("--lang", required=True)
    s.add_argument("--tgt", required=True)
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--tgt-in", dest="tgt_input")
    s.add_argument("--seeds")
    s.add_argument("--m", type=int, default=8, help="BT exemplars behind the inner prompts")
    s.add_argument("--n", type=int, default=None, help="number of source lines to use")
    s.add_argument("--style", choices=style_choices, default="none")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_synth_pivot)

    s = sub.add_parser("synth-sum", parents=[common], help="intra-lingual summary exemplars")
    s.add_argument("--lang", required=True)
    s.add_argument("--in", dest="input", required=True, help="JSONL {document}")
    s.add_argument("--exemplars", help="cross-lingual DocSumExemplar JSONL")
    s.add_argument("--m", type=int, default=1)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_synth_sum)

    s = sub.add_parser("export-finetune", parents=[common], help="fine-tuning JSONL from pairs")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--directions", default="x2e,e2x")
    s.add_argument("--lang", help="unused; accepted for symmetry")
    s.set_defaults(func=cmd_export_finetune)

    for name, func in (("translate", cmd_translate), ("summarize", cmd_summarize)):
        s = sub.add_parser(name, parents=[common], help=f"run a {name} experiment")
        s.add_argument("--out-dir", default="runs/latest")
        s.set_defaults(func=func)

    s = sub.add_parser("evaluate", parents=[common], help="score a predictions JSONL")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--metrics", default="chrf++,bleu")
    s.set_defaults(func=cmd_evaluate)

    s = sub.add_parser("report", parents=[common], help="rebuild a report from records")
    s.add_argument("--records", required=True)
    s.add_argument("--out-dir")
    s.set_defaults(func=cmd_report)

    s = sub.add_parser("lid-report", parents=[common], help="language confusion matrix")
    s.add_argument("--records", required=True)
    s.add_argument("--floor", type=float, default=None, help="negative disables the floor")
    s.add_argument("--out")
    s.set_defaults(func=cmd_lid_report)

    s = sub.add_parser("frag-report", parents=[common], help="token fragmentation ratios")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--tokenizer-x", default="whitespace")
    s.add_argument("--tokenizer-en", default="whitespace")
    s.set_defaults(func=cmd_frag_report)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except Exception as exc:
        from .exceptions import LdpError
        if isinstance(exc, (LdpError, FileNotFoundError)):
            print(f"error: {exc}", file=sys.stderr)
            return 2
        raise
    return 0


if __name__ == "__main__":
    sys.exit(main())
