"""Numpy implementation of the batch query kernel (no compiled code).

Blocks whose base fits in one 64-bit word are handled in vectorized chunks;
wider blocks fall back to Python-int bit arithmetic.
"""

from __future__ import annotations

import numpy as np

_CHUNK_PAIRS = 1 << 22


def _dense(adj: np.ndarray) -> np.ndarray:
    n = adj.shape[0]
    raw = np.ascontiguousarray(adj).view(np.uint8).reshape(n, -1)
    return np.unpackbits(raw, axis=1, bitorder="little")[:, :n].astype(bool)


def _narrow_chunk(dense, bases, base_off, masks, mask_off, blocks, qstart, out):
    starts = base_off[blocks]
    sizes = base_off[blocks + 1] - starts
    # every ordered position pair (i, j) inside each block
    sq = sizes * sizes
    pair_block = np.repeat(np.arange(blocks.size), sq)
    first = np.zeros(blocks.size + 1, dtype=np.int64)
    np.cumsum(sq, out=first[1:])
    local = np.arange(first[-1]) - first[pair_block]
    s_rep = sizes[pair_block]
    pi = local // s_rep
    pj = local % s_rep
    ui = bases[starts[pair_block] + pi]
    uj = bases[starts[pair_block] + pj]
    bit = dense[ui, uj].astype(np.uint64) << pj.astype(np.uint64)
    # rows of the position adjacency, one per (block, i); groups have length s
    group_start = first[:-1, None] + np.arange(64)[None, :] * sizes[:, None]
    valid = np.arange(64)[None, :] < sizes[:, None]
    pos_adj = np.zeros((blocks.size, 64), dtype=np.uint64)
    if bit.size:
        red = np.bitwise_or.reduceat(bit, group_start[valid])
        pos_adj[valid] = red
    live = np.flatnonzero(pos_adj.any(axis=1))
    nq = mask_off[blocks + 1] - mask_off[blocks]
    if live.size == 0:
        return
    q_first = mask_off[blocks[live]]
    q_count = nq[live]
    q_block = np.repeat(live, q_count)
    q_local = np.arange(q_count.sum()) - np.repeat(np.cumsum(q_count) - q_count, q_count)
    m = masks[np.repeat(q_first, q_count) + q_local]
    hit = np.zeros(m.size, dtype=bool)
    rows = pos_adj[q_block]
    for i in range(int(sizes[live].max())):
        sel = (m >> np.uint64(i)) & np.uint64(1)
        hit |= (sel != 0) & ((rows[:, i] & m) != 0)
    # queries of a block are contiguous and mask words equal query rows here
    dest = qstart[blocks[live]]
    out[np.repeat(dest, q_count) + q_local] = hit


def _wide_block(adj_bits, base, rows):
    pos_adj = []
    base_bits = 0
    for v in base:
        base_bits |= 1 << int(v)
    for i, u in enumerate(base):
        nb = adj_bits[int(u)] & base_bits
        row = 0
        if nb:
            for j, v in enumerate(base):
                if nb >> int(v) & 1:
                    row |= 1 << j
        pos_adj.append(row)
    res = []
    for m in rows:
        ans = False
        mm = m
        while mm:
            low = mm & -mm
            i = low.bit_length() - 1
            if pos_adj[i] & m:
                ans = True
                break
            mm ^= low
        res.append(ans)
    return res


def evaluate(adj, bases, base_off, masks, mask_off, out):
    """Same contract as the compiled kernel; returns the number of answers written."""
    adj = np.asarray(adj, dtype=np.uint64)
    bases = np.asarray(bases, dtype=np.int64)
    base_off = np.asarray(base_off, dtype=np.int64)
    masks = np.asarray(masks, dtype=np.uint64)
    mask_off = np.asarray(mask_off, dtype=np.int64)
    sizes = np.diff(base_off)
    ws = (sizes + 63) // 64
    nq = np.diff(mask_off) // np.maximum(ws, 1)
    qstart = np.zeros(sizes.size + 1, dtype=np.int64)
    np.cumsum(nq, out=qstart[1:])
    total = int(qstart[-1])
    out[:total] = 0
    if total == 0:
        return 0
    dense = _dense(adj)
    narrow = np.flatnonzero((ws == 1) & (nq > 0))
    if narrow.size:
        cum = np.cumsum(sizes[narrow] ** 2)
        lo = 0
        while lo < narrow.size:
            limit = (int(cum[lo - 1]) if lo else 0) + _CHUNK_PAIRS
            hi = max(lo + 1, int(np.searchsorted(cum, limit, side="right")))
            _narrow_chunk(dense, bases, base_off, masks, mask_off, narrow[lo:hi], qstart, out)
            lo = hi
    wide = np.flatnonzero((ws > 1) & (nq > 0))
    if wide.size:
        n = adj.shape[0]
        adj_bits = []
        for u in range(n):
            row = 0
            for j, w in enumerate(adj[u]):
                row |= int(w) << (64 * j)
            adj_bits.append(row)
        for b in wide:
            w = int(ws[b])
            words = masks[mask_off[b] : mask_off[b + 1]].reshape(-1, w)
            rows = [sum(int(x) << (64 * j) for j, x in enumerate(r)) for r in words]
            res = _wide_block(adj_bits, bases[base_off[b] : base_off[b + 1]], rows)
            out[qstart[b] : qstart[b + 1]] = res
    return total
