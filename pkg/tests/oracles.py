"""Independent brute-force oracles.

These deliberately avoid the production enumeration/DP/audit code paths:
everything is computed by direct enumeration over measurement words and
outcome strings using only the primitive quantum operations, so they can
serve as ground truth for the faster implementations.
"""

from fractions import Fraction
from itertools import combinations, product

from qsicsim import outcome_probability, post_measurement_state


def brute_force_distribution(qset, init, n):
    """Distribution after n steps by enumerating every measurement word and
    outcome string, weighted by uniform input choice."""
    out = {}
    n_meas = qset.size
    for word in product(qset.measurements, repeat=n):
        outcome_sets = [m.outcomes() for m in word]
        for ostring in product(*outcome_sets):
            for s0, p0 in init.entries.items():
                p = p0
                state = s0
                alive = True
                for m, o in zip(word, ostring):
                    q = outcome_probability(state, m, o)
                    if q == 0:
                        alive = False
                        break
                    p *= q
                    state = post_measurement_state(state, m, o)
                if alive:
                    key = state
                    out[key] = out.get(key, Fraction(0)) + p / n_meas**n
    return out


def brute_force_insufficiency(qset, prior, length):
    """Probability that a length-``length`` input-output past is compatible
    with two or more distinct current states (direct enumeration)."""
    total = Fraction(0)
    n_meas = qset.size
    for word in product(qset.measurements, repeat=length):
        outcome_sets = [m.outcomes() for m in word]
        for ostring in product(*outcome_sets):
            finals = set()
            mass = Fraction(0)
            for s0, p0 in prior.entries.items():
                p = p0
                state = s0
                alive = True
                for m, o in zip(word, ostring):
                    q = outcome_probability(state, m, o)
                    if q == 0:
                        alive = False
                        break
                    p *= q
                    state = post_measurement_state(state, m, o)
                if alive:
                    finals.add(state)
                    mass += p
            if len(finals) >= 2:
                total += mass / n_meas**length
    return total


def pairwise_distinguishability_failures(states, qset):
    """Literal pairwise search for a separating measurement."""
    failures = []
    for a, b in combinations(states, 2):
        separated = False
        for m in qset.measurements:
            o = m.outcomes()[0]
            if outcome_probability(a, m, o) != outcome_probability(b, m, o):
                separated = True
                break
        if not separated:
            failures.append((a, b))
    return failures
