# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled batch evaluation of independent-set queries."""

from libc.stdint cimport uint64_t, int64_t, int32_t, uint8_t
from libc.stdlib cimport calloc, free
from libc.string cimport memset

cdef extern from *:
    int __builtin_ctzll(unsigned long long) nogil


def evaluate(const uint64_t[:, ::1] adj, const int32_t[::1] bases, const int64_t[::1] base_off,
             const uint64_t[::1] masks, const int64_t[::1] mask_off, uint8_t[::1] out):
    """Answer every row of every block; ``out`` receives one byte per query."""
    cdef Py_ssize_t nb = base_off.shape[0] - 1
    cdef Py_ssize_t W = adj.shape[1]
    cdef Py_ssize_t smax = 0, b, s, i, j, w, w2, ws, nq, q, bo, mo, qpos = 0
    cdef int64_t u, v
    cdef int hit, found_any, res
    cdef uint64_t bits
    cdef uint64_t* row
    cdef const uint64_t* m
    for b in range(nb):
        s = base_off[b + 1] - base_off[b]
        if s > smax:
            smax = s
    cdef Py_ssize_t wsmax = (smax + 63) >> 6
    cdef uint64_t* sbits = <uint64_t*> calloc(W + 1, sizeof(uint64_t))
    cdef uint64_t* active = <uint64_t*> calloc(wsmax + 1, sizeof(uint64_t))
    cdef uint64_t* pos_adj = <uint64_t*> calloc(smax * wsmax + 1, sizeof(uint64_t))
    if sbits == NULL or active == NULL or pos_adj == NULL:
        free(sbits)
        free(active)
        free(pos_adj)
        raise MemoryError()
    try:
        with nogil:
            for b in range(nb):
                bo = base_off[b]
                s = base_off[b + 1] - bo
                if s == 0:
                    continue
                mo = mask_off[b]
                ws = (s + 63) >> 6
                nq = (mask_off[b + 1] - mo) // ws
                if nq == 0:
                    continue
                for i in range(s):
                    u = bases[bo + i]
                    sbits[u >> 6] |= (<uint64_t> 1) << (u & 63)
                for w in range(ws):
                    active[w] = 0
                found_any = 0
                for i in range(s):
                    u = bases[bo + i]
                    hit = 0
                    for w in range(W):
                        if adj[u, w] & sbits[w]:
                            hit = 1
                            break
                    if hit:
                        found_any = 1
                        active[i >> 6] |= (<uint64_t> 1) << (i & 63)
                        row = pos_adj + i * ws
                        for w in range(ws):
                            row[w] = 0
                        for j in range(s):
                            v = bases[bo + j]
                            if (adj[u, v >> 6] >> (v & 63)) & 1:
                                row[j >> 6] |= (<uint64_t> 1) << (j & 63)
                for i in range(s):
                    u = bases[bo + i]
                    sbits[u >> 6] = 0
                if not found_any:
                    memset(&out[qpos], 0, nq)
                    qpos += nq
                    continue
                for q in range(nq):
                    m = &masks[mo + q * ws]
                    res = 0
                    for w in range(ws):
                        bits = m[w] & active[w]
                        while bits != 0 and res == 0:
                            i = (w << 6) + __builtin_ctzll(bits)
                            row = pos_adj + i * ws
                            for w2 in range(ws):
                                if row[w2] & m[w2]:
                                    res = 1
                                    break
                            bits &= bits - 1
                        if res:
                            break
                    out[qpos + q] = res
                qpos += nq
    finally:
        free(sbits)
        free(active)
        free(pos_adj)
    return qpos
