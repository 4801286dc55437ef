"""Hill-climbing inner loop over integer arrays.

Two interchangeable backends share one move enumeration order, so they
return identical mappings:

* ``numba``: scalar loops compiled with ``@njit``;
* ``numpy``: each step scores every legal move at once with array ops.

``DOCAMR_NO_NUMBA=1`` (or a missing numba install) selects ``numpy``.

Moves, in enumeration order: for source var ``i`` ascending, candidate ``j``
in ``[-1] + pool[i]`` ascending. ``j == -1`` unmaps ``i``; a free ``j`` maps
``i`` to it; a ``j`` held by ``k`` swaps ``i`` and ``k`` when ``m[i]`` is in
``k``'s pool (or ``i`` was unmapped, leaving ``k`` unmapped). The step takes
the first move with the largest positive gain.
"""
from __future__ import annotations

import os
from typing import NamedTuple

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

NUMBA_AVAILABLE = numba is not None

if NUMBA_AVAILABLE:
    _jit = numba.njit(cache=True, nogil=True)
else:  # pragma: no cover
    def _jit(fn):
        return fn


def backend_name() -> str:
    if os.environ.get("DOCAMR_NO_NUMBA", "").strip() not in ("", "0") or not NUMBA_AVAILABLE:
        return "numpy"
    return "numba"


class Problem(NamedTuple):
    n_s: int
    n_t: int
    n_labels: int
    unary: np.ndarray  # int32 [n_s, n_t]
    pool_ptr: np.ndarray  # int64 [n_s + 1]
    pool_idx: np.ndarray  # int64, sorted within each row
    rel_a: np.ndarray  # int64 source relation endpoints and labels
    rel_b: np.ndarray
    rel_lab: np.ndarray
    inc_ptr: np.ndarray  # relations incident to each source var
    inc_rel: np.ndarray
    tkeys: np.ndarray  # sorted int64 keys of target relations
    pool_codes: np.ndarray  # sorted i * n_t + j for every pool pair


def make_problem(unary, pool, src_rels, tgt_rels, n_t) -> Problem:
    """Pack a scoring problem; relations are ``(a, label_id, b)`` int triples."""
    n_s = len(pool)
    labels = {lab for _, lab, _ in src_rels} | {lab for _, lab, _ in tgt_rels}
    n_labels = max(labels, default=0) + 1
    pool_ptr = np.zeros(n_s + 1, dtype=np.int64)
    pool_ptr[1:] = np.cumsum([len(p) for p in pool])
    pool_idx = np.fromiter((j for p in pool for j in p), dtype=np.int64, count=int(pool_ptr[-1]))
    pool_codes = np.repeat(np.arange(n_s, dtype=np.int64), np.diff(pool_ptr)) * max(n_t, 1) + pool_idx
    rel_a = np.array([a for a, _, _ in src_rels], dtype=np.int64)
    rel_lab = np.array([lab for _, lab, _ in src_rels], dtype=np.int64)
    rel_b = np.array([b for _, _, b in src_rels], dtype=np.int64)
    incident: list[list[int]] = [[] for _ in range(n_s)]
    for r, (a, _, b) in enumerate(src_rels):
        incident[a].append(r)
        if b != a:
            incident[b].append(r)
    inc_ptr = np.zeros(n_s + 1, dtype=np.int64)
    inc_ptr[1:] = np.cumsum([len(x) for x in incident])
    inc_rel = np.fromiter((r for x in incident for r in x), dtype=np.int64, count=int(inc_ptr[-1]))
    tkeys = np.unique(np.array([(c * n_t + d) * n_labels + lab for c, lab, d in tgt_rels], dtype=np.int64))
    return Problem(n_s, n_t, n_labels, np.ascontiguousarray(unary, dtype=np.int32), pool_ptr, pool_idx,
                   rel_a, rel_b, rel_lab, inc_ptr, inc_rel, tkeys, np.sort(pool_codes))


# ---------------------------------------------------------------------------
# scalar kernels (compiled by numba)


@_jit
def _rel_hit(r, m, rel_a, rel_b, rel_lab, tkeys, n_t, n_labels):
    x = m[rel_a[r]]
    y = m[rel_b[r]]
    if x < 0 or y < 0:
        return 0
    key = (x * n_t + y) * n_labels + rel_lab[r]
    pos = np.searchsorted(tkeys, key)
    if pos < tkeys.shape[0] and tkeys[pos] == key:
        return 1
    return 0


@_jit
def _total(m, unary, rel_a, rel_b, rel_lab, tkeys, n_t, n_labels):
    s = 0
    for i in range(m.shape[0]):
        if m[i] >= 0:
            s += unary[i, m[i]]
    for r in range(rel_a.shape[0]):
        s += _rel_hit(r, m, rel_a, rel_b, rel_lab, tkeys, n_t, n_labels)
    return s


@_jit
def _local(i, k, m, inc_ptr, inc_rel, rel_a, rel_b, rel_lab, tkeys, n_t, n_labels):
    s = 0
    for p in range(inc_ptr[i], inc_ptr[i + 1]):
        s += _rel_hit(inc_rel[p], m, rel_a, rel_b, rel_lab, tkeys, n_t, n_labels)
    if k >= 0:
        for p in range(inc_ptr[k], inc_ptr[k + 1]):
            r = inc_rel[p]
            if rel_a[r] != i and rel_b[r] != i:
                s += _rel_hit(r, m, rel_a, rel_b, rel_lab, tkeys, n_t, n_labels)
    return s


@_jit
def _in_pool(k, v, pool_ptr, pool_idx):
    lo = pool_ptr[k]
    hi = pool_ptr[k + 1]
    pos = lo + np.searchsorted(pool_idx[lo:hi], v)
    return pos < hi and pool_idx[pos] == v


@_jit
def _climb(m, inv, unary, pool_ptr, pool_idx, rel_a, rel_b, rel_lab, inc_ptr, inc_rel, tkeys, n_t, n_labels):
    score = _total(m, unary, rel_a, rel_b, rel_lab, tkeys, n_t, n_labels)
    n_s = m.shape[0]
    while True:
        best_gain = 0
        best_i = -1
        best_j = -1
        for i in range(n_s):
            mi = m[i]
            for q in range(pool_ptr[i] - 1, pool_ptr[i + 1]):
                j = -1
                if q >= pool_ptr[i]:
                    j = pool_idx[q]
                if j == mi:
                    continue
                k = -1
                if j >= 0:
                    k = inv[j]
                if k >= 0 and mi >= 0 and not _in_pool(k, mi, pool_ptr, pool_idx):
                    continue
                old = _local(i, k, m, inc_ptr, inc_rel, rel_a, rel_b, rel_lab, tkeys, n_t, n_labels)
                u_old = 0
                if mi >= 0:
                    u_old += unary[i, mi]
                if k >= 0:
                    u_old += unary[k, j]
                m[i] = j
                if k >= 0:
                    m[k] = mi
                new = _local(i, k, m, inc_ptr, inc_rel, rel_a, rel_b, rel_lab, tkeys, n_t, n_labels)
                m[i] = mi
                if k >= 0:
                    m[k] = j
                u_new = 0
                if j >= 0:
                    u_new += unary[i, j]
                if k >= 0 and mi >= 0:
                    u_new += unary[k, mi]
                gain = new - old + u_new - u_old
                if gain > best_gain:
                    best_gain = gain
                    best_i = i
                    best_j = j
        if best_gain <= 0:
            break
        i = best_i
        j = best_j
        mi = m[i]
        k = -1
        if j >= 0:
            k = inv[j]
        if mi >= 0:
            inv[mi] = k
        if k >= 0:
            m[k] = mi
        m[i] = j
        if j >= 0:
            inv[j] = i
        score += best_gain
    return score


def total_numba(p: Problem, m: np.ndarray) -> int:
    return int(_total(m, p.unary, p.rel_a, p.rel_b, p.rel_lab, p.tkeys, p.n_t, p.n_labels))


def climb_numba(p: Problem, m: np.ndarray) -> int:
    """Run steepest ascent in place on ``m``; return the final match count."""
    inv = np.full(p.n_t, -1, dtype=np.int64)
    for i, j in enumerate(m):
        if j >= 0:
            inv[j] = i
    return int(_climb(m, inv, p.unary, p.pool_ptr, p.pool_idx, p.rel_a, p.rel_b, p.rel_lab,
                         p.inc_ptr, p.inc_rel, p.tkeys, p.n_t, p.n_labels))


# ---------------------------------------------------------------------------
# numpy backend


def _hits(p: Problem, x: np.ndarray, y: np.ndarray, lab: np.ndarray) -> np.ndarray:
    ok = (x >= 0) & (y >= 0)
    keys = (x * p.n_t + y) * p.n_labels + lab
    if p.tkeys.size == 0:
        return np.zeros(keys.shape, dtype=np.int64)
    pos = np.searchsorted(p.tkeys, keys)
    pos = np.minimum(pos, p.tkeys.size - 1)
    return (ok & (p.tkeys[pos] == keys)).astype(np.int64)


def total_numpy(p: Problem, m: np.ndarray) -> int:
    mapped = m >= 0
    s = int(p.unary[np.nonzero(mapped)[0], m[mapped]].sum())
    if p.rel_a.size:
        s += int(_hits(p, m[p.rel_a], m[p.rel_b], p.rel_lab).sum())
    return s


def _expand(ptr: np.ndarray, rows: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """CSR gather: (owner position, flat index) for every entry of ``rows``."""
    counts = ptr[rows + 1] - ptr[rows]
    owner = np.repeat(np.arange(rows.size), counts)
    starts = np.repeat(ptr[rows] - np.concatenate(([0], np.cumsum(counts)[:-1])), counts)
    flat = starts + np.arange(owner.size)
    return owner, flat


def climb_numpy(p: Problem, m: np.ndarray) -> int:
    n_s = p.n_s
    sizes = np.diff(p.pool_ptr)
    # static move list: per source var, the unmap move then its pool
    mv_i = np.repeat(np.arange(n_s, dtype=np.int64), sizes + 1)
    mv_j = np.full(mv_i.size, -1, dtype=np.int64)
    slots = np.ones(mv_i.size, dtype=bool)
    slots[np.cumsum(np.concatenate(([0], sizes[:-1] + 1)))] = False
    mv_j[slots] = p.pool_idx
    score = total_numpy(p, m)
    inv = np.full(p.n_t, -1, dtype=np.int64)
    mapped = np.nonzero(m >= 0)[0]
    inv[m[mapped]] = mapped
    n_t = max(p.n_t, 1)
    while True:
        mi = m[mv_i]
        valid = mv_j != mi
        k = np.where(mv_j >= 0, inv[np.maximum(mv_j, 0)], -1)
        need = valid & (k >= 0) & (mi >= 0)
        if need.any():
            codes = k[need] * n_t + mi[need]
            pos = np.minimum(np.searchsorted(p.pool_codes, codes), p.pool_codes.size - 1)
            ok = p.pool_codes[pos] == codes
            idx = np.nonzero(need)[0]
            valid[idx[~ok]] = False
        q = np.nonzero(valid)[0]
        if q.size == 0:
            break
        qi, qj, qk, qm = mv_i[q], mv_j[q], k[q], mi[q]
        gain = np.where(qj >= 0, p.unary[qi, np.maximum(qj, 0)], 0).astype(np.int64)
        gain -= np.where(qm >= 0, p.unary[qi, np.maximum(qm, 0)], 0)
        has_k = qk >= 0
        gain -= np.where(has_k, p.unary[np.maximum(qk, 0), np.maximum(qj, 0)], 0)
        gain += np.where(has_k & (qm >= 0), p.unary[np.maximum(qk, 0), np.maximum(qm, 0)], 0)

        if p.rel_a.size:
            own_i, flat_i = _expand(p.inc_ptr, qi)
            rel_i = p.inc_rel[flat_i]
            kq = np.nonzero(has_k)[0]
            own_k, flat_k = _expand(p.inc_ptr, qk[kq])
            own_k = kq[own_k]
            rel_k = p.inc_rel[flat_k]
            keep = (p.rel_a[rel_k] != qi[own_k]) & (p.rel_b[rel_k] != qi[own_k])
            owner = np.concatenate((own_i, own_k[keep]))
            rels = np.concatenate((rel_i, rel_k[keep]))
            a, b, lab = p.rel_a[rels], p.rel_b[rels], p.rel_lab[rels]
            oi, oj, ok_, om = qi[owner], qj[owner], qk[owner], qm[owner]
            old = _hits(p, m[a], m[b], lab)
            na = np.where(a == oi, oj, np.where(a == ok_, om, m[a]))
            nb = np.where(b == oi, oj, np.where(b == ok_, om, m[b]))
            new = _hits(p, na, nb, lab)
            gain += np.bincount(owner, weights=new - old, minlength=q.size).astype(np.int64)

        best = int(np.argmax(gain))
        if gain[best] <= 0:
            break
        i, j, kk, mi_ = int(qi[best]), int(qj[best]), int(qk[best]), int(qm[best])
        if mi_ >= 0:
            inv[mi_] = kk
        if kk >= 0:
            m[kk] = mi_
        m[i] = j
        if j >= 0:
            inv[j] = i
        score += int(gain[best])
    return score


def climb(p: Problem, m: np.ndarray, backend: str | None = None) -> int:
    backend = backend or backend_name()
    if backend == "numba":
        return climb_numba(p, m)
    if backend == "numpy":
        return climb_numpy(p, m)
    raise ValueError(f"unknown backend {backend!r}")


def total(p: Problem, m: np.ndarray, backend: str | None = None) -> int:
    backend = backend or backend_name()
    return total_numba(p, m) if backend == "numba" else total_numpy(p, m)
