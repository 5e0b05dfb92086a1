"""Jitted training kernels.

Every kernel that draws randomness takes the caller's np.random.Generator and
advances it in a fixed, documented order; the pure-python reference functions
in tm.py replay the identical draw sequence, so both paths produce the same
bank bytes from the same generator state.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def clause_outputs(states, x, n_states, train):
    """Evaluate all clauses of one class against literal vector x.

    states: (clauses, literals) int16, x: (literals,) uint8.
    A literal is included iff its state exceeds n_states.  Clauses with no
    includes output 1 in train mode and 0 in infer mode.
    """
    n_clauses, n_literals = states.shape
    out = np.empty(n_clauses, dtype=np.uint8)
    for j in range(n_clauses):
        value = 1
        nonempty = False
        for k in range(n_literals):
            if states[j, k] > n_states:
                nonempty = True
                if x[k] == 0:
                    value = 0
                    break
        if value == 1 and not (train or nonempty):
            value = 0
        out[j] = value
    return out


@njit(cache=True)
def class_sum_from_outputs(outputs):
    """Polarity-weighted vote: first half of the clauses count +1, rest -1."""
    half = outputs.shape[0] // 2
    total = 0
    for j in range(outputs.shape[0]):
        if outputs[j] == 1:
            total += 1 if j < half else -1
    return total


@njit(cache=True)
def update_class(states, x, is_target, n_states, threshold, specificity, rng):
    """Apply one feedback round to a single class bank.

    Draw order: one uniform per clause (feedback gate, clause order), then one
    uniform per literal for each gated Type I clause (clause order, literal
    order).  Type II consumes no randomness.  Clause outputs and the class sum
    come from the pre-update states.
    """
    n_clauses, n_literals = states.shape
    half = n_clauses // 2
    outputs = clause_outputs(states, x, n_states, True)
    total = class_sum_from_outputs(outputs)
    clipped = total
    if clipped > threshold:
        clipped = threshold
    if clipped < -threshold:
        clipped = -threshold
    if is_target:
        prob = (threshold - clipped) / (2.0 * threshold)
    else:
        prob = (threshold + clipped) / (2.0 * threshold)

    selected = np.empty(n_clauses, dtype=np.uint8)
    for j in range(n_clauses):
        selected[j] = 1 if rng.random() < prob else 0

    ceiling = 2 * n_states
    demote = 1.0 / specificity
    promote = (specificity - 1.0) / specificity
    for j in range(n_clauses):
        if selected[j] == 0:
            continue
        positive = j < half
        if is_target == positive:
            # Type I: reinforce the clause toward matching x.
            if outputs[j] == 1:
                for k in range(n_literals):
                    u = rng.random()
                    if x[k] == 1:
                        if u < promote and states[j, k] < ceiling:
                            states[j, k] += 1
                    else:
                        if u < demote and states[j, k] > 1:
                            states[j, k] -= 1
            else:
                for k in range(n_literals):
                    if rng.random() < demote and states[j, k] > 1:
                        states[j, k] -= 1
        else:
            # Type II: push zero-valued literals toward inclusion.
            if outputs[j] == 1:
                for k in range(n_literals):
                    if x[k] == 0 and states[j, k] < ceiling:
                        states[j, k] += 1
    return total


@njit(cache=True)
def train_datapoint(states, x, label, n_states, threshold, specificity, rng):
    """Update the target class (y=1) and one sampled other class (y=0).

    Draw order: one integers(0, n_classes-1) draw for the sampled class (even
    when n_classes == 2 and the outcome is forced), then the target-class
    round, then the sampled-class round.
    """
    n_classes = states.shape[0]
    other = 0
    if n_classes > 1:
        other = rng.integers(0, n_classes - 1)
        if other >= label:
            other += 1
    update_class(states[label], x, True, n_states, threshold, specificity, rng)
    if n_classes > 1:
        update_class(states[other], x, False, n_states, threshold, specificity, rng)


@njit(cache=True)
def train_pass(states, bits, labels, order, n_states, threshold, specificity, rng):
    """Run train_datapoint over the samples in the given order."""
    for i in range(order.shape[0]):
        idx = order[i]
        train_datapoint(states, bits[idx], labels[idx], n_states, threshold, specificity, rng)
