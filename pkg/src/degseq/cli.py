"""Command-line interface.

Exit codes: 0 success, 1 infeasible input, 2 usage error, 3 budget exceeded,
4 I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import secrets
import sys
from typing import Sequence

from .core import Kind, parse_sequence
from .errors import BudgetExceeded, EmptyInput, Infeasible, MemoryBudgetExceeded

EXIT_OK = 0
EXIT_INFEASIBLE = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3
EXIT_IO = 4

KINDS = [k.value for k in Kind]


class UsageError(Exception):
    pass


def _seq(text: str) -> list[int]:
    try:
        return parse_sequence(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _add_instance(p: argparse.ArgumentParser) -> None:
    p.add_argument("--kind", choices=KINDS, help="graph kind (default: undirected with -d, bipartite otherwise)")
    p.add_argument("-a", type=_seq, help="left or out-degree sequence, e.g. 2,1,1")
    p.add_argument("-b", type=_seq, help="right or in-degree sequence")
    p.add_argument("-d", type=_seq, help="undirected degree sequence")
    p.add_argument("--input", metavar="FILE", help='JSON file with "kind", "a", "b" or "d"')


def _add_json(p: argparse.ArgumentParser) -> None:
    p.add_argument("--json", action="store_true", help="machine-readable output")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="degseq", description="Count, enumerate and sample graphs with prescribed degrees.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("check", help="realizability verdict per graph kind")
    _add_instance(p)
    _add_json(p)
    p.add_argument("--explain", action="store_true", help="report the first failing inequality index")

    p = sub.add_parser("count", help="exact number of realizations")
    _add_instance(p)
    _add_json(p)
    p.add_argument("--table-out", metavar="FILE", help="save the count table")
    p.add_argument("--method", choices=["table", "enumerate", "brute"], default="table")
    p.add_argument("--budget", type=int, default=None, help="partial-configuration cap for --method brute")

    p = sub.add_parser("enumerate", help="list every realization as JSON lines")
    _add_instance(p)
    _add_json(p)
    p.add_argument("--out", metavar="FILE", help="write graphs here instead of stdout")
    p.add_argument("--count-only", action="store_true")
    p.add_argument("--dfs", action="store_true", help="depth-first order, low memory")

    p = sub.add_parser("sample", help="draw random realizations")
    _add_instance(p)
    _add_json(p)
    p.add_argument("--algo", choices=["uniform", "efficient"], default="uniform")
    p.add_argument("-n", type=int, default=1, help="number of draws")
    p.add_argument("--seed", default="0", help='integer seed or "random" (default 0)')
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--table", metavar="FILE", help="count table saved by count --table-out")
    p.add_argument("--weights-out", metavar="FILE", help="CSV of per-draw log probabilities and log weights")
    p.add_argument("--out", metavar="FILE", help="write samples here instead of stdout")

    p = sub.add_parser("estimate", help="importance-sampling estimate from sample lines")
    _add_json(p)
    p.add_argument("--samples", metavar="FILE", required=True, help="JSON lines written by sample")
    p.add_argument("--f", metavar="FILE", required=True, help='CSV with one f value per sample (column "f" or the first)')
    p.add_argument("--total", type=int, default=None, help="size of the graph space, enables the unbiased estimate")

    p = sub.add_parser("metrics", help="CV, KL divergence and coverage of sample lines")
    _add_instance(p)
    _add_json(p)
    p.add_argument("--samples", metavar="FILE", required=True)
    p.add_argument("--support-from", choices=["count", "enumerate"], default="count")

    p = sub.add_parser("bench", help="per-draw sampler runtimes over a degree-sequence family")
    _add_json(p)
    p.add_argument("--family", choices=["bip", "dir", "undir", "custom"], required=True)
    p.add_argument("--n-range", default=None, help="A..B or A..B..STEP")
    p.add_argument("--reps", type=int, default=5)
    p.add_argument("--draws", type=int, default=1, help="draws timed per replication")
    p.add_argument("--algos", default="uniform,efficient")
    p.add_argument("--seed", default="0")
    p.add_argument("--include-setup", action="store_true", help="fold table construction into each figure")
    p.add_argument("--custom", metavar="FILE", help='JSON list of {"n", "kind", "a", "b"} for --family custom')
    p.add_argument("--csv", metavar="FILE", help="write the report here")
    return parser


def resolve_instance(args) -> tuple[Kind, list[int], list[int] | None]:
    inline = any(getattr(args, x) is not None for x in ("a", "b", "d"))
    if args.input and inline:
        raise UsageError("give sequences inline or with --input, not both")
    if args.input:
        with open(args.input) as fh:
            data = json.load(fh)
        if not isinstance(data, dict):
            raise UsageError("--input must hold a JSON object")
        kind = args.kind or data.get("kind")
        a, b, d = data.get("a"), data.get("b"), data.get("d")
    else:
        kind, a, b, d = args.kind, args.a, args.b, args.d
    if d is not None:
        if a is not None or b is not None:
            raise UsageError("-d cannot be combined with -a or -b")
        if kind not in (None, Kind.UNDIRECTED.value):
            raise UsageError("-d is for undirected graphs")
        return Kind.UNDIRECTED, list(d), None
    if kind is None:
        kind = Kind.BIPARTITE.value
    kind = Kind.parse(kind)
    if a is None:
        raise UsageError("a degree sequence is required (-a/-b, -d or --input)")
    if kind is Kind.UNDIRECTED:
        if b is not None and list(b) != list(a):
            raise UsageError("undirected graphs take a single sequence")
        return kind, list(a), None
    if b is None:
        raise UsageError(f"{kind.value} graphs need both -a and -b")
    if kind is Kind.DIRECTED and len(a) != len(b):
        raise UsageError("directed sequences must have equal length")
    return kind, list(a), list(b)


def _seed(text: str) -> int:
    if text == "random":
        return secrets.randbits(64)
    try:
        value = int(text)
    except ValueError:
        raise UsageError(f"seed must be an integer or 'random', got {text!r}") from None
    if not 0 <= value < 2**64:
        raise UsageError("seed must fit in 64 unsigned bits")
    return value


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, separators=(",", ":")) + "\n")


def _infeasible() -> int:
    _emit({"feasible": False})
    return EXIT_INFEASIBLE


def _feasible(kind: Kind, a, b) -> bool:
    from .feasibility import digraph_feasible, erdos_gallai, gale_ryser

    if kind is Kind.BIPARTITE:
        return gale_ryser(a, b)
    if kind is Kind.DIRECTED:
        return digraph_feasible(a, b)
    return erdos_gallai(a)


def cmd_check(args) -> int:
    from .feasibility import digraph_violation, erdos_gallai_violation, gale_ryser_violation

    kind, a, b = resolve_instance(args)
    kinds = [kind]
    if args.kind is None and b is not None:
        kinds = [Kind.BIPARTITE] + ([Kind.DIRECTED] if len(a) == len(b) else [])
    verdict = {}
    for k in kinds:
        if k is Kind.BIPARTITE:
            where = gale_ryser_violation(a, b)
        elif k is Kind.DIRECTED:
            where = digraph_violation(a, b)
        else:
            where = erdos_gallai_violation(a)
        entry = {"feasible": where is None}
        if args.explain:
            entry["violation"] = where
        verdict[k.value] = entry
    ok = any(v["feasible"] for v in verdict.values())
    if args.json:
        _emit({"feasible": ok, "kinds": verdict})
    else:
        for k, v in verdict.items():
            line = f"{k}: {'feasible' if v['feasible'] else 'infeasible'}"
            if args.explain and v["violation"] is not None:
                line += " (sum or sign mismatch)" if v["violation"] == 0 else f" (first failing index {v['violation']})"
            print(line)
    return EXIT_OK if ok else EXIT_INFEASIBLE


def cmd_count(args) -> int:
    from .count import build_table
    from .enumerate import DEFAULT_BUDGET, brute_force, enumerate_graphs

    kind, a, b = resolve_instance(args)
    if args.table_out and args.method != "table":
        raise UsageError("--table-out needs --method table")
    if not _feasible(kind, a, b):
        return _infeasible()
    states = None
    if args.method == "table":
        table = build_table(a, b, kind)
        n = table.total
        states = len(table)
        if args.table_out:
            table.save(args.table_out)
    elif args.method == "enumerate":
        n = enumerate_graphs(kind, a, b, None, dfs=True)
    else:
        n = brute_force(a, b, kind, budget=DEFAULT_BUDGET if args.budget is None else args.budget)
    if args.json:
        out = {"kind": kind.value, "feasible": True, "count": n, "method": args.method}
        if states is not None:
            out["states"] = states
        _emit(out)
    else:
        print(n)
    return EXIT_OK


def cmd_enumerate(args) -> int:
    from .enumerate import enumerate_graphs

    kind, a, b = resolve_instance(args)
    if args.count_only and args.out:
        raise UsageError("--count-only writes no graphs; drop --out")
    if not _feasible(kind, a, b):
        return _infeasible()
    if args.count_only:
        n = enumerate_graphs(kind, a, b, None, dfs=args.dfs)
        if args.json:
            _emit({"kind": kind.value, "count": n})
        else:
            print(n)
        return EXIT_OK
    fh = open(args.out, "w") if args.out else sys.stdout
    try:
        def sink(g):
            fh.write(json.dumps({"edges": g.to_json_edges()}, separators=(",", ":")) + "\n")

        n = enumerate_graphs(kind, a, b, sink, dfs=args.dfs)
    finally:
        if args.out:
            fh.close()
    if args.out:
        if args.json:
            _emit({"kind": kind.value, "count": n, "out": args.out})
        else:
            print(n)
    return EXIT_OK


def cmd_sample(args) -> int:
    from .count import CountTable
    from .sample import sample_many

    kind, a, b = resolve_instance(args)
    if args.n < 0:
        raise UsageError("-n must be nonnegative")
    if args.workers < 1:
        raise UsageError("--workers must be positive")
    if args.table and args.algo != "uniform":
        raise UsageError("--table only applies to --algo uniform")
    seed = _seed(args.seed)
    print(f"seed: {seed}", file=sys.stderr)
    if not _feasible(kind, a, b):
        return _infeasible()
    table = None
    if args.table:
        table = CountTable.load(args.table)
        if not table.matches(kind, a, b):
            raise UsageError("--table was built for a different instance")
    traces = sample_many(kind, args.algo, a, b, n=args.n, seed=seed, workers=args.workers, table=table)
    fh = open(args.out, "w") if args.out else sys.stdout
    try:
        for t in traces:
            line = {"edges": t.graph.to_json_edges(), "log_prob": t.log_prob, "resamples": t.resample_count}
            fh.write(json.dumps(line, separators=(",", ":")) + "\n")
    finally:
        if args.out:
            fh.close()
    if args.weights_out:
        with open(args.weights_out, "w", newline="") as wf:
            w = csv.writer(wf)
            w.writerow(["index", "log_prob", "log_weight", "resamples"])
            for i, t in enumerate(traces):
                w.writerow([i, repr(t.log_prob), repr(-t.log_prob), t.resample_count])
    return EXIT_OK


def _read_samples(path) -> list[dict]:
    out = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise UsageError(f"{path}:{lineno}: not a JSON line ({exc.msg})") from None
            if "feasible" in rec and "edges" not in rec:
                continue
            out.append(rec)
    return out


def _read_f(path) -> list[float]:
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if not rows:
        return []
    col = 0
    start = 0
    try:
        float(rows[0][0])
    except ValueError:
        header = [h.strip() for h in rows[0]]
        col = header.index("f") if "f" in header else 0
        start = 1
    try:
        return [float(r[col]) for r in rows[start:]]
    except (ValueError, IndexError):
        raise UsageError(f"{path}: f values must be numeric") from None


def cmd_estimate(args) -> int:
    from .sample import importance_estimate

    recs = _read_samples(args.samples)
    f = _read_f(args.f)
    if len(f) != len(recs):
        raise UsageError(f"{len(recs)} samples but {len(f)} f values")
    res = importance_estimate([float(r["log_prob"]) for r in recs], f, args.total)
    out = {
        "theta_hat": res.theta_hat,
        "se_hat": res.se_hat,
        "n_samples": res.n_samples,
        "effective_sample_size": res.effective_sample_size,
    }
    if res.theta_tilde is not None:
        out["theta_tilde"] = res.theta_tilde
        out["se_tilde"] = res.se_tilde
    if args.json:
        _emit(out)
    else:
        for k, v in out.items():
            print(f"{k}: {v}")
    return EXIT_OK


def cmd_metrics(args) -> int:
    from .count import count
    from .enumerate import enumerate_graphs
    from .metrics import Histogram, report

    kind, a, b = resolve_instance(args)
    if not _feasible(kind, a, b):
        return _infeasible()
    if args.support_from == "count":
        support = count(kind, a, b)
    else:
        support = enumerate_graphs(kind, a, b, None, dfs=True)
    recs = _read_samples(args.samples)
    h = Histogram.of((tuple(sorted(tuple(e) for e in r["edges"])) for r in recs), support)
    rep = report(h)
    _emit(rep.to_dict())
    return EXIT_OK


def _n_range(text: str | None) -> list[int]:
    if text is None:
        raise UsageError("--n-range is required for built-in families")
    parts = text.split("..")
    try:
        nums = [int(p) for p in parts]
    except ValueError:
        raise UsageError(f"malformed --n-range {text!r}") from None
    if len(nums) == 1:
        return nums
    if len(nums) not in (2, 3) or nums[0] > nums[1]:
        raise UsageError(f"malformed --n-range {text!r}")
    step = nums[2] if len(nums) == 3 else 1
    if step < 1:
        raise UsageError("--n-range step must be positive")
    return list(range(nums[0], nums[1] + 1, step))


def cmd_bench(args) -> int:
    from .metrics import BenchRow, bench, load_custom, write_csv

    algos = [x.strip() for x in args.algos.split(",") if x.strip()]
    if not algos or any(x not in ("uniform", "efficient") for x in algos):
        raise UsageError("--algos takes uniform and/or efficient")
    if args.reps < 1 or args.draws < 1:
        raise UsageError("--reps and --draws must be positive")
    seed = _seed(args.seed)
    print(f"seed: {seed}", file=sys.stderr)
    custom = None
    if args.family == "custom":
        if not args.custom:
            raise UsageError("--family custom needs --custom FILE")
        custom = load_custom(args.custom)
        ns: list[int] = []
    else:
        if args.custom:
            raise UsageError("--custom only applies to --family custom")
        ns = _n_range(args.n_range)
    try:
        rows = bench(args.family, ns, algos, args.reps, seed, args.include_setup, custom, args.draws)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.csv:
        write_csv(rows, args.csv)
    if args.json:
        _emit([{k: getattr(r, k) for k in BenchRow.__dataclass_fields__} for r in rows])
    elif not args.csv:
        write_csv(rows, sys.stdout)
    return EXIT_OK


COMMANDS = {
    "check": cmd_check,
    "count": cmd_count,
    "enumerate": cmd_enumerate,
    "sample": cmd_sample,
    "estimate": cmd_estimate,
    "metrics": cmd_metrics,
    "bench": cmd_bench,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args)
    except SystemExit as exc:
        # --help exits through argparse with code 0
        return int(exc.code or 0)
    except UsageError as exc:
        print(f"degseq: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Infeasible:
        return _infeasible()
    except (BudgetExceeded, MemoryBudgetExceeded) as exc:
        print(f"degseq: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except EmptyInput as exc:
        print(f"degseq: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"degseq: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"degseq: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
