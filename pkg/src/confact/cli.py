"""``confact`` command-line entry point."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from collections import defaultdict
from pathlib import Path

from confact import annotation, corpus
from confact.chunking import DEFAULT_MAX_WORDS, Granularity, Passage, chunk_document
from confact.credibility import (CannedSearchClient, CredibilityTable, GTProvider, HybridProvider,
                                 load_queries)
from confact.evaluation import read_verdicts, score, write_report
from confact.experiment import (EXIT_CONFIG, ConfigError,
                                ExperimentConfig, collect_cards, load_config, run_experiment,
                                write_run_report)
from confact.generation import Strategy, TiePolicy
from confact.llm import LLMError, backend_from_spec
from confact.ranking import RankingConfig, RankingMode, fuse_and_rank

log = logging.getLogger("confact")


def _emit(records, out: str | None) -> None:
    fh = open(out, "w", encoding="utf-8") if out else sys.stdout
    try:
        for rec in records:
            fh.write(json.dumps(rec, ensure_ascii=False, sort_keys=True) + "\n")
    finally:
        if out:
            fh.close()


def cmd_validate(args) -> int:
    try:
        records = corpus.load_dataset(args.path)
    except (corpus.DatasetError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    report = corpus.validate_dataset(records, require_questions=args.require_questions)
    for v in report:
        print(v)
    if not report:
        print(f"ok: {len(records)} records")
    return 1 if report else 0


def cmd_stats(args) -> int:
    records = corpus.load_dataset(args.path)
    stats = corpus.split_stats(records, args.split)
    print(json.dumps({"split": args.split, "n_claims": stats.n_claims, "n_yes": stats.n_yes,
                      "n_no": stats.n_no, "n_sources": stats.n_sources}))
    return 0


def cmd_chunk(args) -> int:
    records = corpus.load_dataset(args.dataset)

    def rows():
        for rec in records:
            for doc in rec.documents:
                for p in chunk_document(doc, args.granularity, args.max_words):
                    yield {"claim_id": rec.claim_id, "question": rec.question_text,
                           "passage_id": p.passage_id, "parent_doc_id": p.parent_doc_id,
                           "source_domain": p.source_domain, "text": p.text,
                           "word_count": p.word_count, "granularity": p.granularity.value,
                           "char_span": list(p.char_span)}
    _emit(rows(), args.out)
    return 0


def cmd_rank(args) -> int:
    mode = RankingMode(args.mode)
    config = RankingConfig(args.top_k, args.beta, args.gamma, mode)
    backgrounds = {}
    table = CredibilityTable.load(args.table) if args.table else None
    if mode is not RankingMode.RELEVANCE and table is None:
        print("error: --table is required for sf/cw modes", file=sys.stderr)
        return EXIT_CONFIG
    groups: dict[str, list] = defaultdict(list)
    questions: dict[str, str] = {}
    with open(args.passages, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            row = json.loads(line)
            questions[row["claim_id"]] = row.get("question", "")
            groups[row["claim_id"]].append(Passage(
                row["passage_id"], row["parent_doc_id"], row["text"], row["word_count"],
                Granularity(row["granularity"]), tuple(row["char_span"]), row.get("source_domain", "")))
    if table is not None:
        provider = GTProvider(table)
        domains = {p.source_domain for ps in groups.values() for p in ps}
        backgrounds = {d: provider(d) for d in sorted(domains) if d}

    def rows():
        for claim_id, passages in groups.items():
            ranked = fuse_and_rank(questions[claim_id], passages, backgrounds, config)
            if not ranked:
                log.warning("claim %s: no admissible evidence", claim_id)
            for rp in ranked:
                yield {"claim_id": claim_id, "mode": mode.value, **rp.to_dict()}
    _emit(rows(), args.out)
    return 0


def cmd_background(args) -> int:
    table = CredibilityTable.load(args.table) if args.table else CredibilityTable()
    if args.provider == "gt":
        bg = GTProvider(table)(args.domain)
    else:
        if not args.backend or not args.search:
            print("error: hybrid provider needs --backend and --search", file=sys.stderr)
            return EXIT_CONFIG
        backend = backend_from_spec(args.backend, args.model)
        provider = HybridProvider(table, backend, CannedSearchClient.load(args.search),
                                  queries=load_queries(args.queries))
        bg = provider(args.domain)
    print(json.dumps(bg.to_dict(), ensure_ascii=False, indent=2))
    return 0


def cmd_annotate(args) -> int:
    records = corpus.load_dataset(args.dataset)
    backend = backend_from_spec(args.backend, args.model, args.max_parallel)
    annotated = []
    for rec in records:
        new, anns = annotation.annotate_claim(rec, backend, args.max_parallel)
        annotated.append(new)
        for a in anns:
            if a.failures:
                log.warning("claim %s doc %s: variants %s failed", rec.claim_id, a.doc_id,
                            sorted(v.value for v in a.failures))
    corpus.dump_dataset(annotated, args.out or args.dataset)
    return 0


def cmd_conflicts(args) -> int:
    records = corpus.load_dataset(args.dataset)
    for claim_id in annotation.conflicting_claims(records):
        print(claim_id)
    return 0


def cmd_run(args) -> int:
    try:
        if args.config:
            cfg = load_config(args.config)
            if args.out:
                cfg.output_dir = Path(args.out)
        else:
            if not args.dataset:
                raise ConfigError("give a dataset path or --config")
            if not args.backend:
                raise ConfigError("--backend is required without --config")
            cfg = ExperimentConfig(
                dataset_path=Path(args.dataset),
                output_dir=Path(args.out or "runs/latest"),
                backend=args.backend,
                splits=[corpus.Split(s) for s in args.split],
                strategies=[Strategy(s) for s in args.strategy],
                provider=args.provider,
                modes=[RankingMode(m) for m in args.mode],
                top_k=args.top_k, beta=args.beta, gamma=args.gamma,
                granularity=Granularity(args.granularity), max_words=args.max_words,
                curated_table=Path(args.table) if args.table else None,
                search_seeds=Path(args.search) if args.search else None,
                model=args.model or "default",
                tie=TiePolicy(args.tie),
                max_parallel=args.max_parallel,
            )
        cfg.validate()
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        result = run_experiment(cfg)
    except (ConfigError, corpus.DatasetError, LLMError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for name in result.failed:
        print(f"failed: {name}", file=sys.stderr)
    print(f"report: {cfg.output_dir / 'report.md'}")
    return result.exit_code


def cmd_eval(args) -> int:
    verdicts = read_verdicts(args.verdicts)
    gold = corpus.load_dataset(args.dataset)
    card = score(verdicts, gold)
    strategies = sorted({v.strategy.value for v in verdicts})
    key = ("+".join(strategies), args.provider, args.mode)
    companion = write_report({key: card}, args.out, title=f"Results ({Path(args.dataset).name})")
    print(f"accuracy={card.accuracy:.4f} macro_f1={card.macro_f1:.4f} n={card.n} "
          f"unparseable={card.n_unparseable}")
    print(f"wrote {args.out} and {companion}")
    return 0


def cmd_report(args) -> int:
    cards = collect_cards(Path(args.run_dir))
    if not cards:
        print(f"error: no scorecards under {args.run_dir}", file=sys.stderr)
        return 1
    write_run_report(cards, Path(args.run_dir))
    print((Path(args.run_dir) / "report.md").read_text("utf-8"), end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="confact", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a dataset file")
    p.add_argument("path")
    p.add_argument("--require-questions", action="store_true")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("stats", help="split statistics")
    p.add_argument("path")
    p.add_argument("--split", choices=["modc", "humc", "unassigned"], required=True)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("chunk", help="split documents into passages")
    p.add_argument("dataset")
    p.add_argument("--granularity", choices=["para", "sent"], default="para")
    p.add_argument("--max-words", type=int, default=DEFAULT_MAX_WORDS)
    p.add_argument("--out")
    p.set_defaults(func=cmd_chunk)

    p = sub.add_parser("rank", help="rank a passage file per claim")
    p.add_argument("passages")
    p.add_argument("--mode", choices=[m.value for m in RankingMode], default="rel")
    p.add_argument("--top-k", type=int, default=5)
    p.add_argument("--beta", type=float, default=0.8)
    p.add_argument("--gamma", type=float, default=0.3)
    p.add_argument("--table", help="curated credibility table (JSONL)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("background", help="resolve one source background")
    p.add_argument("domain")
    p.add_argument("--provider", choices=["gt", "hybrid"], default="gt")
    p.add_argument("--table")
    p.add_argument("--backend")
    p.add_argument("--search", help="canned search seeds (JSON)")
    p.add_argument("--queries", help="query template file")
    p.add_argument("--model")
    p.set_defaults(func=cmd_background)

    p = sub.add_parser("annotate", help="stance-annotate documents with the LLM")
    p.add_argument("dataset")
    p.add_argument("--backend", required=True)
    p.add_argument("--model")
    p.add_argument("--out", help="write here instead of overwriting the dataset")
    p.add_argument("--max-parallel", type=int, default=4)
    p.set_defaults(func=cmd_annotate)

    p = sub.add_parser("conflicts", help="list claims with conflicting evidence")
    p.add_argument("dataset")
    p.set_defaults(func=cmd_conflicts)

    p = sub.add_parser("run", help="run a grid of experiments")
    p.add_argument("dataset", nargs="?")
    p.add_argument("--config")
    p.add_argument("--strategy", nargs="+", default=["dira"], choices=[s.value for s in Strategy])
    p.add_argument("--provider", choices=["none", "gt", "hybrid"], default="none")
    p.add_argument("--mode", nargs="+", default=["rel"], choices=[m.value for m in RankingMode])
    p.add_argument("--split", nargs="+", default=["modc", "humc"], choices=["modc", "humc", "unassigned"])
    p.add_argument("--top-k", type=int, default=5)
    p.add_argument("--beta", type=float, default=0.8)
    p.add_argument("--gamma", type=float, default=0.3)
    p.add_argument("--granularity", choices=["para", "sent"], default="para")
    p.add_argument("--max-words", type=int, default=DEFAULT_MAX_WORDS)
    p.add_argument("--table")
    p.add_argument("--search")
    p.add_argument("--backend")
    p.add_argument("--model")
    p.add_argument("--tie", choices=["yes", "no", "error"], default="no")
    p.add_argument("--max-parallel", type=int, default=4)
    p.add_argument("--out", help="output directory (default: config value or runs/latest)")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("eval", help="score a verdict file")
    p.add_argument("verdicts")
    p.add_argument("dataset")
    p.add_argument("--out", default="report.md")
    p.add_argument("--provider", default="-")
    p.add_argument("--mode", default="-")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("report", help="re-render the report of a run directory")
    p.add_argument("run_dir")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except BrokenPipeError:
        # downstream reader (e.g. head) closed early; silence the flush at exit
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return 0


if __name__ == "__main__":
    sys.exit(main())
