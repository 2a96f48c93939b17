"""Monte Carlo trace generation and statistical trace comparison.

Two generators for the same process: a quantum trajectory sampler (exact
Born probabilities, projection updates) and a finite-memory runner that
executes a built machine, whose only carried information between steps is
the current state index.  Both are deterministic given their seed.

Outcome draws compare 128 random bits, read as a binary fraction, against
exact rational cumulative thresholds; the residual bias is below 2**-128.
The generator algorithm is recorded in every trace so files are
self-describing.
"""

from __future__ import annotations

import csv
import random
from dataclasses import dataclass
from datetime import datetime, timezone
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import InsufficientData, TruncationExceeded
from .evolve import StateDistribution
from .measurements import outcome_probability, post_measurement_state
from .sets import QsicSet
from .transducer import Transducer

GENERATOR_ID = "python-random-mt19937"
_BITS = 128
_SCALE = 1 << _BITS


@dataclass(frozen=True)
class Trace:
    """A recorded run: (measurement label, outcome) per step."""

    set_name: str
    source: str  # "quantum" | "classical" | free-form for controls
    seed: int
    generator: str
    steps: "tuple[tuple[str, int], ...]"

    def __len__(self) -> int:
        return len(self.steps)


def _draw_index(rng: random.Random, probs: "Sequence[Fraction]") -> int:
    """Pick an index with the given exact probabilities from one 128-bit draw."""
    u = rng.getrandbits(_BITS)
    acc = Fraction(0)
    for i, p in enumerate(probs):
        acc += p
        # u / 2^128 < acc, compared exactly
        if u * acc.denominator < acc.numerator * _SCALE:
            return i
    return len(probs) - 1


def sample_quantum(
    qset: QsicSet, init: StateDistribution, length: int, seed: int
) -> Trace:
    """Quantum trajectory: uniform input choice, exact-probability outcome
    draw, projection update, system recycled into the next step."""
    rng = random.Random(seed)
    items = init.sorted_items()
    state = items[_draw_index(rng, [p for _, p in items])][0]
    steps = []
    for _ in range(length):
        m = qset.measurements[rng.randrange(qset.size)]
        outcomes = m.outcomes()
        p_first = outcome_probability(state, m, outcomes[0])
        o = outcomes[_draw_index(rng, (p_first, 1 - p_first))]
        state = post_measurement_state(state, m, o)
        steps.append((m.label, o))
    return Trace(qset.name, "quantum", seed, GENERATOR_ID, tuple(steps))


def _machine_step(t: Transducer, si: int, mi: int, rng: random.Random) -> "tuple[int, int]":
    """One machine step from (state index, input index, randomness) alone.

    That restricted signature is the memory accounting: nothing about the
    past is readable here except the current state index.
    """
    row = t.transitions.get((si, mi))
    if row is None:
        raise TruncationExceeded(
            "the run reached a state beyond the machine's built depth"
        )
    branch = _draw_index(rng, [p for _, p, _ in row])
    outcome, _, nxt = row[branch]
    return outcome, nxt


def _draw_initial(t: Transducer, rng: random.Random) -> int:
    return t.initial[_draw_index(rng, [p for _, p in t.initial])][0]


def run_classical(t: Transducer, inputs: "Iterable[str]", seed: int) -> Trace:
    """Execute the machine on the given input labels."""
    rng = random.Random(seed)
    label_to_mi = {m.label: i for i, m in enumerate(t.qset.measurements)}
    si = _draw_initial(t, rng)
    steps = []
    for label in inputs:
        outcome, si = _machine_step(t, si, label_to_mi[label], rng)
        steps.append((label, outcome))
    return Trace(t.qset.name, "classical", seed, GENERATOR_ID, tuple(steps))


def sample_classical(t: Transducer, length: int, seed: int) -> Trace:
    """Machine run with uniformly random inputs, one RNG stream for both the
    input choices and the outcome draws."""
    rng = random.Random(seed)
    labels = [m.label for m in t.qset.measurements]
    si = _draw_initial(t, rng)
    steps = []
    for _ in range(length):
        mi = rng.randrange(len(labels))
        outcome, si = _machine_step(t, si, mi, rng)
        steps.append((labels[mi], outcome))
    return Trace(t.qset.name, "classical", seed, GENERATOR_ID, tuple(steps))


@dataclass(frozen=True)
class EquivalenceReport:
    window_length: int
    contexts_compared: int
    max_total_variation: float
    threshold: float
    passed: bool
    n_min: int
    worst_context: str


def _context_counts(trace: Trace, window: int):
    """Count next-outcome occurrences per context.

    Two context families are tallied for every window position t:

    * exact: the (window-1) preceding (input, outcome) pairs plus the next
      input, all by label;
    * pattern: the equality pattern of the window's inputs (which positions
      repeat which) plus the preceding outcomes.

    The exact family is the sharper test but needs very long traces before
    any single context recurs often enough; the pattern family pools
    measurement labels while keeping repetition structure (e.g. "the same
    input twice in a row"), which is what distinguishes memoryless fakes at
    realistic trace lengths.
    """
    counts: "dict[tuple, dict[int, int]]" = {}
    steps = trace.steps
    for t in range(window - 1, len(steps)):
        hist = steps[t - window + 1 : t]
        nxt_in, nxt_out = steps[t]
        xs = tuple(x for x, _ in hist) + (nxt_in,)
        ys = tuple(y for _, y in hist)
        first_seen: "dict[str, int]" = {}
        pattern = tuple(first_seen.setdefault(x, len(first_seen)) for x in xs)
        for key in (("exact", hist, nxt_in), ("pattern", pattern, ys)):
            bucket = counts.setdefault(key, {})
            bucket[nxt_out] = bucket.get(nxt_out, 0) + 1
    return counts


def compare_statistics(
    a: Trace,
    b: Trace,
    window: int,
    n_min: int = 1000,
    threshold: float = 0.02,
) -> EquivalenceReport:
    """Compare empirical next-outcome distributions between two traces.

    For every context observed at least ``n_min`` times in both traces, the
    total-variation distance between the two empirical next-outcome
    distributions is computed; the report carries the maximum.  Raises
    InsufficientData when no context qualifies.
    """
    ca = _context_counts(a, window)
    cb = _context_counts(b, window)
    max_tv = -1.0
    worst = ""
    compared = 0
    for key, da in ca.items():
        db = cb.get(key)
        if db is None:
            continue
        na, nb = sum(da.values()), sum(db.values())
        if na < n_min or nb < n_min:
            continue
        outcomes = set(da) | set(db)
        tv = 0.5 * sum(
            abs(da.get(o, 0) / na - db.get(o, 0) / nb) for o in outcomes
        )
        compared += 1
        if tv > max_tv:
            max_tv = tv
            worst = repr(key)
    if compared == 0:
        raise InsufficientData(
            f"no context appears at least {n_min} times in both traces; "
            "raise the trace length or lower n_min"
        )
    return EquivalenceReport(
        window_length=window,
        contexts_compared=compared,
        max_total_variation=max_tv,
        threshold=threshold,
        passed=max_tv <= threshold,
        n_min=n_min,
        worst_context=worst,
    )


# --- trace files ---------------------------------------------------------------

def write_trace(trace: Trace, path, include_timestamp: bool = True) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("# schema: qsicsim.trace.v1\n")
        fh.write(f"# set: {trace.set_name}\n")
        fh.write(f"# source: {trace.source}\n")
        fh.write(f"# seed: {trace.seed}\n")
        fh.write(f"# generator: {trace.generator}\n")
        if include_timestamp:
            fh.write(f"# generated: {datetime.now(timezone.utc).isoformat()}\n")
        writer = csv.writer(fh)
        writer.writerow(["index", "measurement_label", "outcome"])
        for i, (label, outcome) in enumerate(trace.steps):
            writer.writerow([i, label, outcome])


def read_trace(path) -> Trace:
    meta = {}
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        header_done = False
        for line in fh:
            if line.startswith("#"):
                if ":" in line:
                    key, value = line[1:].split(":", 1)
                    meta[key.strip()] = value.strip()
                continue
            if not line.strip():
                continue
            if not header_done:
                header_done = True  # column header row
                continue
            rows.append(next(csv.reader([line])))
    steps = tuple((label, int(outcome)) for _, label, outcome in rows)
    return Trace(
        set_name=meta.get("set", ""),
        source=meta.get("source", ""),
        seed=int(meta.get("seed", 0)),
        generator=meta.get("generator", ""),
        steps=steps,
    )
