"""Compiled inner loops for skip-gram negative-sampling training.

One pair update exists in exactly one place (`pair_update`); the epoch
kernel (`run_chunk`) replays it over the corpus, so single-pair calls and
full training apply identical arithmetic. All intermediates are float64
regardless of matrix dtype.

`run_chunk` doubles as the schedule counter: with ``do_train=False`` it
consumes the same decision-RNG draws (subsampling, window radii) and
returns how many pairs the chunk schedules, which lets the trainer price
the linear learning-rate decay over the exact total before updating.
Negative draws come from a separate multiplicative-congruential stream so
counting does not perturb them.
"""
import numpy as np
from numba import njit

SIGMOID_CLAMP = 8.0
LR_FLOOR_FRAC = 1e-4

_LCG_MULT = np.uint64(25214903917)
_LCG_ADD = np.uint64(11)
_LCG_SHIFT = np.uint64(16)
_NEG_ATTEMPTS = 10


@njit(cache=True, nogil=True)
def compose(inp, rows, v):
    """Mean of the composition rows of one token, written into v (float64)."""
    dim = inp.shape[1]
    for d in range(dim):
        v[d] = 0.0
    for j in range(rows.shape[0]):
        r = rows[j]
        for d in range(dim):
            v[d] += inp[r, d]
    inv = 1.0 / rows.shape[0]
    for d in range(dim):
        v[d] *= inv


@njit(cache=True, nogil=True)
def pair_update(inp, out, rows, ctx, label, lr, v, neu):
    """One SGD step on (center composition, context) and its loss.

    The gradient is evaluated at the pre-update parameters: the old output
    row is saved into ``neu`` before either side moves, and the mean's
    gradient is split evenly over the composition rows.
    """
    dim = inp.shape[1]
    compose(inp, rows, v)
    dot = 0.0
    for d in range(dim):
        dot += v[d] * out[ctx, d]
    if dot > SIGMOID_CLAMP:
        dot = SIGMOID_CLAMP
    elif dot < -SIGMOID_CLAMP:
        dot = -SIGMOID_CLAMP
    s = 1.0 / (1.0 + np.exp(-dot))
    g = label - s
    coef_out = lr * g
    coef_in = coef_out / rows.shape[0]
    for d in range(dim):
        neu[d] = coef_in * out[ctx, d]
        out[ctx, d] = out[ctx, d] + coef_out * v[d]
    for j in range(rows.shape[0]):
        r = rows[j]
        for d in range(dim):
            inp[r, d] += neu[d]
    if label == 1:
        return -np.log(s)
    return -np.log(1.0 - s)


@njit(cache=True, nogil=True)
def run_chunk(inp, out, comp_indptr, comp_rows, sent_tokens, sent_offsets,
              lo, hi, discard, neg_table, window, neg, lr0,
              sched_start, sched_total, decision_seed, neg_seed, do_train):
    """Process sentences [lo, hi) for one epoch chunk.

    Returns (scheduled_pairs, loss_sum, loss_count). Scheduled counts
    include negatives skipped after repeated collisions with the true
    context; loss_count covers only pairs actually trained.
    """
    np.random.seed(decision_seed)
    state = np.uint64(neg_seed)
    dim = inp.shape[1]
    v = np.empty(dim, dtype=np.float64)
    neu = np.empty(dim, dtype=np.float64)

    maxlen = 1
    for si in range(lo, hi):
        ln = sent_offsets[si + 1] - sent_offsets[si]
        if ln > maxlen:
            maxlen = ln
    surv = np.empty(maxlen, dtype=np.int64)

    table_n = np.uint64(neg_table.shape[0])
    lr_span = lr0 * (1.0 - LR_FLOOR_FRAC)
    lr_min = lr0 * LR_FLOOR_FRAC
    sched = 0
    loss_sum = 0.0
    loss_cnt = 0

    for si in range(lo, hi):
        start = sent_offsets[si]
        end = sent_offsets[si + 1]
        n = 0
        for p in range(start, end):
            tid = sent_tokens[p]
            dp = discard[tid]
            if dp > 0.0 and np.random.random() < dp:
                continue
            surv[n] = tid
            n += 1
        for i in range(n):
            b = np.random.randint(1, window + 1)
            jlo = i - b
            if jlo < 0:
                jlo = 0
            jhi = i + b
            if jhi > n - 1:
                jhi = n - 1
            center = surv[i]
            rows = comp_rows[comp_indptr[center]:comp_indptr[center + 1]]
            for j in range(jlo, jhi + 1):
                if j == i:
                    continue
                ctx = surv[j]
                if do_train:
                    lr = lr0 - lr_span * ((sched_start + sched) / sched_total)
                    if lr < lr_min:
                        lr = lr_min
                    loss_sum += pair_update(inp, out, rows, ctx, 1, lr, v, neu)
                    loss_cnt += 1
                sched += 1
                for _ in range(neg):
                    if do_train:
                        cand = -1
                        for _attempt in range(_NEG_ATTEMPTS):
                            state = state * _LCG_MULT + _LCG_ADD
                            c = neg_table[(state >> _LCG_SHIFT) % table_n]
                            if c != ctx:
                                cand = c
                                break
                        if cand >= 0:
                            lr = lr0 - lr_span * ((sched_start + sched) / sched_total)
                            if lr < lr_min:
                                lr = lr_min
                            loss_sum += pair_update(inp, out, rows, cand, 0, lr, v, neu)
                            loss_cnt += 1
                    sched += 1
    return sched, loss_sum, loss_cnt
