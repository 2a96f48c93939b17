"""Command-line interface: counts, entropy, distribution, transducer,
sample, compare, verify.

Exit codes: 0 success, 1 audit/equivalence failure, 2 input error,
3 resource limit.  Every command is deterministic given its flags (and
seed); pass --no-timestamp for byte-identical reruns.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from datetime import datetime, timezone
from fractions import Fraction
from math import log2

from .errors import (
    InsufficientData,
    NonUniqueStationary,
    ParseError,
    QsicError,
    ResourceLimit,
    Truncated,
    TruncationExceeded,
    ValidationError,
)
from .evolve import (
    DEFAULT_SUPPORT_CAP,
    StateDistribution,
    entropy_curve,
    entropy_of,
    iter_distributions,
    noncontextual_baseline,
    reachable_counts,
)
from .exact import CanonicalRay, canonicalize
from .measurements import RankOneProjector
from .sampling import (
    compare_statistics,
    read_trace,
    sample_classical,
    sample_quantum,
    write_trace,
)
from .sets import QsicSet, load_set, parse_entry, peres_mermin, pm_eigenstates, yu_oh
from .transducer import (
    DEFAULT_PAIR_CAP,
    Transducer,
    build_transducer,
    export_dot,
    past_sufficiency,
    stationary_distribution,
    verify_distinguishability,
    verify_unifilar,
)


def _fmt(x: float) -> str:
    # alternate form keeps trailing zeros: 2.0 -> "2.00000"
    return f"{x:#.6g}"


def _resolve_set(spec: str) -> QsicSet:
    if spec == "peres-mermin":
        return peres_mermin()
    if spec == "yu-oh":
        return yu_oh()
    return load_set(spec)


def _resolve_init(spec: str, qset: QsicSet) -> StateDistribution:
    if spec == "canonical":
        if qset.name == "peres-mermin":
            return StateDistribution.uniform(pm_eigenstates())
        rays = [
            m.target for m in qset.measurements if isinstance(m, RankOneProjector)
        ]
        if len(rays) == qset.size:
            return StateDistribution.uniform(rays)
        raise ValidationError(
            f"no canonical initial ensemble for observable set {qset.name!r}; "
            "pass --init <file>"
        )
    try:
        with open(spec, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {spec}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"{spec}: malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    states = []
    for si, vec in enumerate(doc["states"]):
        entries = [
            parse_entry(e, f"{spec}: states[{si}]") if isinstance(e, str) else e
            for e in vec
        ]
        states.append(canonicalize(entries, dim=qset.dim))
    if "probs" in doc:
        probs = [Fraction(p) for p in doc["probs"]]
        return StateDistribution(qset.dim, dict(zip(states, probs)))
    return StateDistribution.uniform(states)


def _out_path(args, default_name: str) -> str:
    if args.out:
        return args.out
    out_dir = os.environ.get("QSICSIM_OUT_DIR", ".")
    os.makedirs(out_dir, exist_ok=True)
    return os.path.join(out_dir, default_name)


def _header(fh, schema: str, qset: QsicSet, args, extra: "dict | None" = None) -> None:
    fh.write(f"# schema: {schema}\n")
    fh.write(f"# set: {qset.name}\n")
    for key, value in (extra or {}).items():
        fh.write(f"# {key}: {value}\n")
    if not args.no_timestamp:
        fh.write(f"# generated: {datetime.now(timezone.utc).isoformat()}\n")


def cmd_counts(args) -> int:
    qset = _resolve_set(args.set)
    init = _resolve_init(args.init, qset)
    counts = reachable_counts(
        qset, init, args.steps, max_support=args.max_support, workers=args.workers
    )
    path = _out_path(args, f"{qset.name}_counts.csv")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        _header(fh, "qsicsim.counts.v1", qset, args)
        writer = csv.writer(fh)
        writer.writerow(["step", "reachable_count"])
        for step, count in enumerate(counts):
            writer.writerow([step, count])
    print(f"wrote {path}")
    if qset.name == "yu-oh" and args.steps >= 7:
        picks = [counts[i] for i in (1, 3, 5, 7)]
        print("fingerprint (steps 1,3,5,7):", ", ".join(str(c) for c in picks))
    return 0


def cmd_entropy(args) -> int:
    qset = _resolve_set(args.set)
    init = _resolve_init(args.init, qset)
    curve = entropy_curve(
        qset, init, args.steps, max_support=args.max_support, workers=args.workers
    )
    baseline = noncontextual_baseline(qset)
    path = _out_path(args, f"{qset.name}_entropy.csv")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        _header(
            fh,
            "qsicsim.entropy.v1",
            qset,
            args,
            {"noncontextual_baseline_bits": _fmt(baseline)},
        )
        writer = csv.writer(fh)
        writer.writerow(["step", "reachable_count", "entropy_bits"])
        for p in curve.points:
            writer.writerow([p.step, p.reachable_count, _fmt(p.entropy_bits)])
    print(f"wrote {path}")
    last = curve.points[-1]
    print(
        f"step-{last.step} entropy: {_fmt(last.entropy_bits)} bits "
        f"over {last.reachable_count} states "
        f"(noncontextual baseline {_fmt(baseline)} bits)"
    )
    return 0


def cmd_distribution(args) -> int:
    qset = _resolve_set(args.set)
    init = _resolve_init(args.init, qset)
    path = _out_path(args, f"{qset.name}_distribution.csv")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        _header(fh, "qsicsim.distribution.v1", qset, args)
        writer = csv.writer(fh)
        writer.writerow(["step", "state", "prob_numerator", "prob_denominator"])
        for step, dist in enumerate(
            iter_distributions(
                qset, init, args.steps, max_support=args.max_support,
                workers=args.workers,
            )
        ):
            for ray, p in dist.sorted_items():
                writer.writerow([step, ray.serialize(), p.numerator, p.denominator])
    print(f"wrote {path}")
    return 0


def _transducer_json(t: Transducer, audits: dict, stationary) -> dict:
    doc = {
        "schema": "qsicsim.transducer.v1",
        "set": t.qset.name,
        "dim": t.qset.dim,
        "truncated": t.truncated,
        "depth": t.depth,
        "measurements": [m.label for m in t.qset.measurements],
        "states": [s.serialize() for s in t.states],
        "initial": [[si, str(p)] for si, p in t.initial],
        "transitions": [
            [si, mi, [[o, str(q), sj] for o, q, sj in row]]
            for (si, mi), row in sorted(t.transitions.items())
        ],
        "audits": audits,
    }
    if stationary is not None:
        doc["stationary"] = {
            "entropy_bits": entropy_of(stationary),
            "probs": [
                [ray.serialize(), str(p)] for ray, p in stationary.sorted_items()
            ],
        }
    return doc


def cmd_transducer(args) -> int:
    qset = _resolve_set(args.set)
    init = _resolve_init(args.init, qset)
    t = build_transducer(
        qset, init, max_depth=args.depth, max_states=args.max_states
    )
    unifilar = verify_unifilar(t)
    expanded = sorted({si for si, _ in t.transitions})
    audit_states = [t.states[i] for i in expanded] if t.truncated else list(t.states)
    report = verify_distinguishability(audit_states, qset, pair_cap=args.pair_cap)
    audits = {
        "unifilar": unifilar,
        "pairs_checked": report.pairs_checked,
        "distinguishability_failures": len(report.failures),
    }
    stationary = None
    if not t.truncated:
        try:
            stationary = stationary_distribution(t)
        except NonUniqueStationary as exc:
            print(f"warning: {exc}", file=sys.stderr)
    path = _out_path(args, f"{qset.name}_transducer.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_transducer_json(t, audits, stationary), fh, indent=2)
        fh.write("\n")
    print(f"wrote {path}")
    print(
        f"states: {len(t.states)}  truncated: {t.truncated}  "
        f"unifilar: {unifilar}  "
        f"indistinguishable pairs: {len(report.failures)}/{report.pairs_checked}"
    )
    if stationary is not None:
        bits = entropy_of(stationary)
        print(f"stationary entropy: {_fmt(bits)} bits over {stationary.support_size()} states")
        if args.exact:
            for ray, p in stationary.sorted_items():
                print(f"  {ray.serialize()}  {p}")
    if args.dot:
        with open(args.dot, "w", encoding="utf-8") as fh:
            fh.write(export_dot(t, args.max_dot_states))
        print(f"wrote {args.dot}")
    if not unifilar or report.failures:
        print("audit FAILED", file=sys.stderr)
        return 1
    return 0


def cmd_sample(args) -> int:
    qset = _resolve_set(args.set)
    init = _resolve_init(args.init, qset)
    if args.source == "quantum":
        trace = sample_quantum(qset, init, args.len, args.seed)
    else:
        t = build_transducer(qset, init, max_depth=args.depth)
        trace = sample_classical(t, args.len, args.seed)
    path = _out_path(args, f"{qset.name}_{args.source}_trace.csv")
    write_trace(trace, path, include_timestamp=not args.no_timestamp)
    print(f"wrote {path} ({len(trace)} steps)")
    return 0


def cmd_compare(args) -> int:
    trace_a = read_trace(args.a)
    trace_b = read_trace(args.b)
    report = compare_statistics(
        trace_a, trace_b, args.window, n_min=args.n_min, threshold=args.threshold
    )
    doc = {
        "schema": "qsicsim.compare.v1",
        "window": report.window_length,
        "n_min": report.n_min,
        "threshold": report.threshold,
        "contexts_compared": report.contexts_compared,
        "max_total_variation": report.max_total_variation,
        "pass": report.passed,
        "worst_context": report.worst_context,
    }
    path = _out_path(args, "compare_report.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
    print(f"wrote {path}")
    print(
        f"max TV {_fmt(report.max_total_variation)} over "
        f"{report.contexts_compared} contexts; threshold {report.threshold}: "
        + ("PASS" if report.passed else "FAIL")
    )
    return 0 if report.passed else 1


def cmd_verify(args) -> int:
    qset = _resolve_set(args.set)
    init = _resolve_init(args.init, qset)
    depth = args.depth
    results: "list[tuple[str, bool, str]]" = []

    one_step = None
    try:
        from .evolve import evolve_step

        one_step = evolve_step(init, qset)
        total = sum(one_step.entries.values())
        results.append(("mass-conservation", total == 1, f"sum={total}"))
    except QsicError as exc:
        results.append(("mass-conservation", False, str(exc)))

    counts = reachable_counts(qset, init, depth, max_support=args.max_support)
    closed = len(set(counts[-2:])) == 1 if depth >= 1 else False
    results.append(
        (
            "reachable-growth",
            True,
            f"counts={counts}" + (" (stabilized)" if closed else " (still growing)"),
        )
    )

    rays = [m.target for m in qset.measurements if isinstance(m, RankOneProjector)]
    if len(rays) == qset.size:
        ok = True
        detail = ""
        for step, dist in enumerate(
            iter_distributions(qset, init, min(depth, 7), max_support=args.max_support)
        ):
            if step == 0:
                continue
            for ray in dist.entries:
                if not _orthogonal_to_any(ray, rays):
                    ok = False
                    detail = f"step {step}: {ray.serialize()} orthogonal to no set ray"
                    break
            if not ok:
                break
        results.append(
            ("orthogonality-witness", ok, detail or "every reached state is orthogonal to a set ray")
        )

    t = build_transducer(qset, init, max_depth=depth, max_states=args.max_states)
    results.append(
        ("unifilarity", verify_unifilar(t), f"{len(t.states)} states, truncated={t.truncated}")
    )
    expanded = sorted({si for si, _ in t.transitions})
    audit_states = [t.states[i] for i in expanded] if t.truncated else list(t.states)
    try:
        report = verify_distinguishability(audit_states, qset, pair_cap=args.pair_cap)
        results.append(
            (
                "distinguishability",
                not report.failures,
                f"{len(report.failures)} failures / {report.pairs_checked} pairs",
            )
        )
    except ResourceLimit as exc:
        results.append(("distinguishability", False, str(exc)))

    horizon = min(3, depth)
    suff = past_sufficiency(qset, init, horizon)
    nonincreasing = all(suff[i + 1] <= suff[i] for i in range(len(suff) - 1))
    results.append(
        (
            "past-sufficiency-decay",
            nonincreasing,
            "insufficiency " + ", ".join(_fmt(float(x)) for x in suff),
        )
    )

    width = max(len(name) for name, _, _ in results)
    failed = False
    for name, ok, detail in results:
        status = "PASS" if ok else "FAIL"
        print(f"{name:<{width}}  {status}  {detail}")
        failed = failed or not ok
    return 1 if failed else 0


def _orthogonal_to_any(ray: CanonicalRay, rays) -> bool:
    for other in rays:
        re = im = 0
        for (ar, ai), (br, bi) in zip(other.entries, ray.entries):
            re += ar * br + ai * bi
            im += ar * bi - ai * br
        if re == 0 and im == 0:
            return True
    return False


def _add_common(p, steps_default=None) -> None:
    p.add_argument("--set", required=True, help="peres-mermin, yu-oh, or a set file")
    p.add_argument("--init", default="canonical", help="'canonical' or a distribution file")
    p.add_argument("--out", default=None, help="output file (default: under $QSICSIM_OUT_DIR)")
    p.add_argument("--max-support", type=int, default=DEFAULT_SUPPORT_CAP)
    p.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    p.add_argument("--no-timestamp", action="store_true", help="omit timestamp metadata lines")
    if steps_default is not None:
        p.add_argument("--steps", type=int, default=steps_default)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qsicsim",
        description="Exact simulation and memory analysis of sequential "
        "contextuality measurements",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("counts", help="reachable-state counts per step")
    _add_common(p, steps_default=7)
    p.set_defaults(func=cmd_counts)

    p = sub.add_parser("entropy", help="entropy curve per step")
    _add_common(p, steps_default=10)
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("distribution", help="export exact per-step distributions")
    _add_common(p, steps_default=3)
    p.set_defaults(func=cmd_distribution)

    p = sub.add_parser("transducer", help="build, audit, and serialize the machine")
    _add_common(p)
    p.add_argument("--depth", type=int, default=None, help="truncation depth for open sets")
    p.add_argument("--max-states", type=int, default=2_000_000)
    p.add_argument("--pair-cap", type=int, default=DEFAULT_PAIR_CAP)
    p.add_argument("--dot", default=None, help="also write a DOT graph here")
    p.add_argument("--max-dot-states", type=int, default=100)
    p.add_argument("--exact", action="store_true", help="print stationary probabilities as a/b")
    p.set_defaults(func=cmd_transducer)

    p = sub.add_parser("sample", help="generate a quantum or classical trace")
    _add_common(p)
    p.add_argument("--len", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--source", choices=("quantum", "classical"), default="quantum")
    p.add_argument("--depth", type=int, default=None, help="machine depth for classical runs on open sets")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("compare", help="statistically compare two traces")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--window", type=int, default=3)
    p.add_argument("--n-min", type=int, default=1000)
    p.add_argument("--threshold", type=float, default=0.02)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("verify", help="run the invariant suite")
    _add_common(p)
    p.add_argument("--depth", type=int, default=5)
    p.add_argument("--max-states", type=int, default=2_000_000)
    p.add_argument("--pair-cap", type=int, default=DEFAULT_PAIR_CAP)
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ResourceLimit as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ParseError, ValidationError, InsufficientData, Truncated,
            TruncationExceeded, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
