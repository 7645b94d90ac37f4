"""Command-line entry point that rewrites a query against a graph and reports the results.

    kgreform --data graph.nt --query q.rq --mode both --k 3 --output json

Exit status is 0 on success, 1 for unreadable or malformed input and 2 for
usage errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from .generation import MODES, Execution, GenerationConfig, execute_all, generate
from .query import QuerySyntaxError, SolutionSet, parse_query
from .rdf import NTriplesError, load_graph
from .summary import SelectionConfig, read_iri_list

SAMPLE_SIZE = 5

TSV_COLUMNS = ("id", "level", "round", "rules_applied", "query", "answer_count",
               "new_answer_count", "time_ms", "answers")


def _rows(sols: SolutionSet, rows) -> list[dict[str, str]]:
    return [{v: str(t) for v, t in zip(sols.head, row)} for row in rows]


def build_report(executions: list[Execution], sample_size: int = SAMPLE_SIZE) -> dict:
    """Report dict with the original query first and its rewrites after.

    Candidate ids follow generation order, so identical inputs give
    identical ids.
    """
    original, rest = executions[0], executions[1:]
    report = {
        "original": {
            "query": original.candidate.query.to_sparql(),
            "answer_count": original.answer_count,
            "time_ms": int(round(original.solutions.time_ms)),
            "answers": _rows(original.solutions, original.solutions.rows),
        },
        "candidates": [],
    }
    for i, ex in enumerate(rest, start=1):
        report["candidates"].append({
            "id": f"c{i}",
            "level": ex.candidate.level,
            "round": ex.candidate.round,
            "rules_applied": [str(s) for s in ex.candidate.steps],
            "query": ex.candidate.query.to_sparql(),
            "answer_count": ex.answer_count,
            "new_answer_count": ex.new_answer_count,
            "time_ms": int(round(ex.solutions.time_ms)),
            "sample_answers": _rows(ex.solutions, ex.solutions.rows[:sample_size]),
        })
    return report


def report_to_json(report: dict) -> str:
    return json.dumps(report, indent=2, ensure_ascii=False) + "\n"


def report_to_tsv(report: dict) -> str:
    """One row per query; list-valued cells hold JSON arrays."""
    buf = io.StringIO()
    writer = csv.writer(buf, delimiter="\t", lineterminator="\n", quoting=csv.QUOTE_NONE,
                        escapechar="\\")
    writer.writerow(TSV_COLUMNS)
    o = report["original"]
    writer.writerow(["original", 0, "", "[]", o["query"], o["answer_count"], "", o["time_ms"],
                     json.dumps(o["answers"], ensure_ascii=False)])
    for c in report["candidates"]:
        writer.writerow([c["id"], c["level"], c["round"],
                         json.dumps(c["rules_applied"], ensure_ascii=False), c["query"],
                         c["answer_count"], c["new_answer_count"], c["time_ms"],
                         json.dumps(c["sample_answers"], ensure_ascii=False)])
    return buf.getvalue()


def report_from_tsv(text: str) -> dict:
    """Inverse of :func:`report_to_tsv`."""
    reader = csv.reader(io.StringIO(text), delimiter="\t", quoting=csv.QUOTE_NONE, escapechar="\\")
    header = next(reader)
    report: dict = {"original": None, "candidates": []}
    for cells in reader:
        row = dict(zip(header, cells))
        if row["id"] == "original":
            report["original"] = {
                "query": row["query"],
                "answer_count": int(row["answer_count"]),
                "time_ms": int(row["time_ms"]),
                "answers": json.loads(row["answers"]),
            }
        else:
            report["candidates"].append({
                "id": row["id"],
                "level": int(row["level"]),
                "round": int(row["round"]),
                "rules_applied": json.loads(row["rules_applied"]),
                "query": row["query"],
                "answer_count": int(row["answer_count"]),
                "new_answer_count": int(row["new_answer_count"]),
                "time_ms": int(row["time_ms"]),
                "sample_answers": json.loads(row["answers"]),
            })
    return report


def report_to_text(report: dict) -> str:
    o = report["original"]
    lines = [f"original  {o['answer_count']} answers  {o['time_ms']} ms",
             f"  {o['query']}"]
    for row in o["answers"][:SAMPLE_SIZE]:
        lines.append("    " + "  ".join(f"?{k}={v}" for k, v in row.items()))
    for c in report["candidates"]:
        lines.append("")
        lines.append(f"{c['id']}  level {c['level']}  {c['answer_count']} answers "
                     f"({c['new_answer_count']} new)  {c['time_ms']} ms")
        for step in c["rules_applied"]:
            lines.append(f"  - {step}")
        lines.append(f"  {c['query']}")
        for row in c["sample_answers"]:
            lines.append("    " + "  ".join(f"?{k}={v}" for k, v in row.items()))
    return "\n".join(lines) + "\n"


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="kgreform",
                                description="Relax and reformulate a basic graph pattern query.")
    p.add_argument("--data", action="append", required=True, metavar="FILE.nt",
                   help="N-Triples file; repeat to merge several")
    p.add_argument("--query", required=True, metavar="FILE.rq")
    p.add_argument("--mode", choices=sorted(MODES), default="both")
    p.add_argument("--k", type=int, default=3, help="summary size (default 3)")
    p.add_argument("--max-level", type=int, default=2)
    p.add_argument("--max-candidates", type=int, default=50)
    p.add_argument("--answer-threshold", type=int, default=None, metavar="K",
                   help="stop once the candidates together return K distinct answers")
    p.add_argument("--blacklist", metavar="FILE", help="property IRIs never used as features")
    p.add_argument("--namespace-priority", metavar="FILE",
                   help="IRI prefixes, preferred first, for property de-duplication")
    p.add_argument("--per-feature", action="store_true",
                   help="append one feature per reformulation instead of a k-summary")
    p.add_argument("--include-type-facts", action="store_true",
                   help="allow rdf:type facts in summaries")
    p.add_argument("--no-closure", action="store_true", help="evaluate on the graph as loaded")
    p.add_argument("--output", choices=("text", "json", "tsv"), default="text")
    return p


def run(args: argparse.Namespace, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    for name in ("k", "max_level", "max_candidates"):
        if getattr(args, name) < 1:
            print(f"kgreform: error: --{name.replace('_', '-')} must be at least 1", file=err)
            return 2
    try:
        with open(args.query, encoding="utf-8") as fh:
            query_text = fh.read()
    except OSError as exc:
        print(f"kgreform: cannot read query file: {exc}", file=err)
        return 1
    try:
        q = parse_query(query_text)
    except QuerySyntaxError as exc:
        print(f"kgreform: query parse error in {args.query}: {exc}", file=err)
        return 1
    try:
        g = load_graph(args.data, closure=not args.no_closure)
    except NTriplesError as exc:
        print(f"kgreform: data parse error: {exc}", file=err)
        return 1
    except OSError as exc:
        print(f"kgreform: cannot read data file: {exc}", file=err)
        return 1
    try:
        blacklist = read_iri_list(args.blacklist) if args.blacklist else ()
        priority = read_iri_list(args.namespace_priority) if args.namespace_priority else ()
    except OSError as exc:
        print(f"kgreform: cannot read list file: {exc}", file=err)
        return 1

    selection = SelectionConfig(k=args.k, blacklist=frozenset(blacklist), namespace_priority=tuple(priority),
                                include_type_facts=args.include_type_facts)
    cfg = GenerationConfig.for_mode(args.mode, max_level=args.max_level,
                                    max_candidates=args.max_candidates,
                                    answer_threshold=args.answer_threshold,
                                    selection=selection, per_feature=args.per_feature)
    report = build_report(execute_all(generate(q, g, cfg), g))
    if args.output == "json":
        out.write(report_to_json(report))
    elif args.output == "tsv":
        out.write(report_to_tsv(report))
    else:
        out.write(report_to_text(report))
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    return run(args)


if __name__ == "__main__":
    sys.exit(main())
