# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled search kernel.  Same algorithm and calling convention as _pysearch."""

from libc.stdlib cimport malloc, calloc, free, qsort
from libc.stdint cimport uint64_t, int64_t

import numpy as np
from time import monotonic

cdef long CHECK_EVERY = 1024


cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil
    int __builtin_ctzll(unsigned long long) nogil


cdef int _cmp_i64(const void* a, const void* b) noexcept nogil:
    cdef int64_t x = (<int64_t*>a)[0]
    cdef int64_t y = (<int64_t*>b)[0]
    return (x > y) - (x < y)


cdef inline int _popcount(uint64_t x) noexcept nogil:
    return __builtin_popcountll(x)



cdef struct Solver:
    int n
    int nclauses
    int nx
    int* clen
    int* cptr
    int* clits
    int* nsat
    int* nfalse
    int* xptr
    int* xvars
    int* xpar
    int* xun
    int* xacc
    int* pptr
    int* pocc
    int* nptr
    int* nocc
    int* xoptr
    int* xocc
    signed char* value
    int* trail
    int ntrail
    int qhead


cdef inline void _assign(Solver* S, int v, int val) noexcept nogil:
    S.value[v] = <signed char>val
    S.trail[S.ntrail] = v
    S.ntrail += 1


cdef int _propagate(Solver* S) noexcept nogil:
    cdef int conflict = 0
    cdef int v, val, k, c, x, l, a, unit, satisfied, acc, free_v, u, i
    cdef int *tp
    cdef int *tocc
    cdef int *fp
    cdef int *focc
    while S.qhead < S.ntrail and not conflict:
        v = S.trail[S.qhead]
        S.qhead += 1
        val = S.value[v]
        if val == 1:
            tp = S.pptr; tocc = S.pocc; fp = S.nptr; focc = S.nocc
        else:
            tp = S.nptr; tocc = S.nocc; fp = S.pptr; focc = S.pocc
        for k in range(tp[v], tp[v + 1]):
            S.nsat[tocc[k]] += 1
        for k in range(fp[v], fp[v + 1]):
            c = focc[k]
            S.nfalse[c] += 1
            if conflict or S.nsat[c] or S.nfalse[c] < S.clen[c] - 1:
                continue
            unit = 0
            satisfied = 0
            for i in range(S.cptr[c], S.cptr[c + 1]):
                l = S.clits[i]
                a = S.value[l if l > 0 else -l]
                if a == -1:
                    unit = l
                elif (a == 1) == (l > 0):
                    satisfied = 1
                    break
            if satisfied:
                continue
            if unit:
                if unit > 0:
                    _assign(S, unit, 1)
                else:
                    _assign(S, -unit, 0)
            else:
                conflict = 1
        for k in range(S.xoptr[v], S.xoptr[v + 1]):
            x = S.xocc[k]
            S.xun[x] -= 1
            S.xacc[x] ^= val
            if conflict or S.xun[x] > 1:
                continue
            acc = 0
            free_v = 0
            for i in range(S.xptr[x], S.xptr[x + 1]):
                u = S.xvars[i]
                a = S.value[u]
                if a == -1:
                    free_v = u
                else:
                    acc ^= a
            if free_v:
                _assign(S, free_v, S.xpar[x] ^ acc)
            elif acc != S.xpar[x]:
                conflict = 1
    return conflict


cdef void _undo(Solver* S, int tpos) noexcept nogil:
    cdef int i, v, val, k
    cdef int *tp
    cdef int *tocc
    cdef int *fp
    cdef int *focc
    i = S.ntrail - 1
    while i >= tpos:
        v = S.trail[i]
        if i < S.qhead:
            val = S.value[v]
            if val == 1:
                tp = S.pptr; tocc = S.pocc; fp = S.nptr; focc = S.nocc
            else:
                tp = S.nptr; tocc = S.nocc; fp = S.pptr; focc = S.pocc
            for k in range(tp[v], tp[v + 1]):
                S.nsat[tocc[k]] -= 1
            for k in range(fp[v], fp[v + 1]):
                S.nfalse[focc[k]] -= 1
            for k in range(S.xoptr[v], S.xoptr[v + 1]):
                S.xun[S.xocc[k]] += 1
                S.xacc[S.xocc[k]] ^= val
        S.value[v] = -1
        i -= 1
    S.ntrail = tpos
    S.qhead = tpos


cdef int* _csr_counts(int n) noexcept nogil:
    return <int*>calloc(n + 2, sizeof(int))


def search(int nvars, const int[::1] clause_lits, const int[::1] clause_ptr,
           const unsigned char[:, ::1] xor_rows, const unsigned char[::1] xor_par,
           double deadline=0.0):
    cdef int n = nvars
    cdef int R = xor_rows.shape[0]
    cdef int W = (n + 63) // 64
    cdef int nclauses = clause_ptr.shape[0] - 1
    cdef int r, col, piv, rank, w, i, j, k, c, v, x, l, consistent
    cdef uint64_t bit, tmp
    cdef int tmpi
    cdef int status = 0
    cdef long nodes = 0

    cdef uint64_t* rows = <uint64_t*>calloc(R * W + 1, sizeof(uint64_t))
    cdef int* pars = <int*>calloc(R + 1, sizeof(int))
    for r in range(R):
        pars[r] = xor_par[r] & 1
        for j in range(n):
            if xor_rows[r, j]:
                rows[r * W + (j >> 6)] |= (<uint64_t>1) << (j & 63)

    # reduced row echelon form
    rank = 0
    for col in range(n):
        if rank == R:
            break
        w = col >> 6
        bit = (<uint64_t>1) << (col & 63)
        piv = -1
        for r in range(rank, R):
            if rows[r * W + w] & bit:
                piv = r
                break
        if piv < 0:
            continue
        if piv != rank:
            for k in range(W):
                tmp = rows[rank * W + k]
                rows[rank * W + k] = rows[piv * W + k]
                rows[piv * W + k] = tmp
            tmpi = pars[rank]; pars[rank] = pars[piv]; pars[piv] = tmpi
        for r in range(R):
            if r != rank and rows[r * W + w] & bit:
                for k in range(W):
                    rows[r * W + k] ^= rows[rank * W + k]
                pars[r] ^= pars[rank]
        rank += 1
    consistent = 1
    for r in range(rank, R):
        if pars[r]:
            consistent = 0
    if not consistent:
        free(rows); free(pars)
        return 0, None, 0

    cdef Solver S
    S.n = n
    S.nclauses = nclauses
    S.nx = rank

    # xor CSR
    S.xptr = <int*>calloc(rank + 1, sizeof(int))
    for r in range(rank):
        c = 0
        for k in range(W):
            c += _popcount(rows[r * W + k])
        S.xptr[r + 1] = S.xptr[r] + c
    S.xvars = <int*>malloc((S.xptr[rank] + 1) * sizeof(int))
    S.xpar = <int*>malloc((rank + 1) * sizeof(int))
    S.xun = <int*>malloc((rank + 1) * sizeof(int))
    S.xacc = <int*>calloc(rank + 1, sizeof(int))
    for r in range(rank):
        S.xpar[r] = pars[r]
        S.xun[r] = S.xptr[r + 1] - S.xptr[r]
        i = S.xptr[r]
        for k in range(W):
            tmp = rows[r * W + k]
            while tmp:
                S.xvars[i] = k * 64 + __builtin_ctzll(tmp) + 1
                i += 1
                tmp &= tmp - 1
    free(rows); free(pars)

    # clauses
    S.cptr = <int*>malloc((nclauses + 1) * sizeof(int))
    S.clen = <int*>malloc((nclauses + 1) * sizeof(int))
    S.nsat = <int*>calloc(nclauses + 1, sizeof(int))
    S.nfalse = <int*>calloc(nclauses + 1, sizeof(int))
    S.clits = <int*>malloc((clause_lits.shape[0] + 1) * sizeof(int))
    for i in range(clause_lits.shape[0]):
        S.clits[i] = clause_lits[i]
    for c in range(nclauses + 1):
        S.cptr[c] = clause_ptr[c]
    for c in range(nclauses):
        S.clen[c] = S.cptr[c + 1] - S.cptr[c]

    # occurrence lists, clause/xor ids ascending
    S.pptr = _csr_counts(n)
    S.nptr = _csr_counts(n)
    S.xoptr = _csr_counts(n)
    for i in range(S.cptr[nclauses]):
        l = S.clits[i]
        if l > 0:
            S.pptr[l + 1] += 1
        else:
            S.nptr[-l + 1] += 1
    for i in range(S.xptr[rank]):
        S.xoptr[S.xvars[i] + 1] += 1
    for v in range(1, n + 1):
        S.pptr[v + 1] += S.pptr[v]
        S.nptr[v + 1] += S.nptr[v]
        S.xoptr[v + 1] += S.xoptr[v]
    S.pocc = <int*>malloc((S.pptr[n + 1] + 1) * sizeof(int))
    S.nocc = <int*>malloc((S.nptr[n + 1] + 1) * sizeof(int))
    S.xocc = <int*>malloc((S.xoptr[n + 1] + 1) * sizeof(int))
    cdef int* fillp = <int*>calloc(n + 2, sizeof(int))
    cdef int* filln = <int*>calloc(n + 2, sizeof(int))
    cdef int* fillx = <int*>calloc(n + 2, sizeof(int))
    for c in range(nclauses):
        for i in range(S.cptr[c], S.cptr[c + 1]):
            l = S.clits[i]
            if l > 0:
                S.pocc[S.pptr[l] + fillp[l]] = c
                fillp[l] += 1
            else:
                S.nocc[S.nptr[-l] + filln[-l]] = c
                filln[-l] += 1
    for x in range(rank):
        for i in range(S.xptr[x], S.xptr[x + 1]):
            v = S.xvars[i]
            S.xocc[S.xoptr[v] + fillx[v]] = x
            fillx[v] += 1
    free(fillp); free(filln); free(fillx)

    # static branching order: occurrence count descending, index ascending
    cdef int64_t* keys = <int64_t*>malloc((n + 1) * sizeof(int64_t))
    cdef int64_t occ
    for v in range(1, n + 1):
        occ = (S.pptr[v + 1] - S.pptr[v]) + (S.nptr[v + 1] - S.nptr[v]) + (S.xoptr[v + 1] - S.xoptr[v])
        keys[v - 1] = -occ * (n + 1) + v
    qsort(keys, n, sizeof(int64_t), _cmp_i64)
    cdef int* order = <int*>malloc((n + 1) * sizeof(int))
    for i in range(n):
        order[i] = <int>(((keys[i] % (n + 1)) + (n + 1)) % (n + 1))
    free(keys)

    S.value = <signed char*>malloc((n + 1) * sizeof(signed char))
    for v in range(n + 1):
        S.value[v] = -1
    S.trail = <int*>malloc((n + 1) * sizeof(int))
    S.ntrail = 0
    S.qhead = 0

    # levels: (trail_pos, var, value, order_pos)
    cdef int* lv_tpos = <int*>malloc((n + 1) * sizeof(int))
    cdef int* lv_var = <int*>malloc((n + 1) * sizeof(int))
    cdef int* lv_val = <int*>malloc((n + 1) * sizeof(int))
    cdef int* lv_op = <int*>malloc((n + 1) * sizeof(int))
    cdef int nlv = 0
    cdef int opos = 0
    cdef int conflict = 0
    cdef int want, tpos, var, val, op
    witness = None
    cdef unsigned char[::1] wv

    # top-level units
    status = -1
    for c in range(nclauses):
        if S.clen[c] == 1:
            l = S.clits[S.cptr[c]]
            v = l if l > 0 else -l
            want = 1 if l > 0 else 0
            if S.value[v] == -1:
                _assign(&S, v, want)
            elif S.value[v] != want:
                status = 0
                break
    if status == -1:
        for x in range(rank):
            if S.xun[x] == 1:
                v = S.xvars[S.xptr[x]]
                if S.value[v] == -1:
                    _assign(&S, v, S.xpar[x])
                elif S.value[v] != S.xpar[x]:
                    status = 0
                    break

    if status == -1:
        conflict = _propagate(&S)
        while True:
            if conflict:
                while True:
                    if nlv == 0:
                        status = 0
                        break
                    nlv -= 1
                    tpos = lv_tpos[nlv]; var = lv_var[nlv]; val = lv_val[nlv]; op = lv_op[nlv]
                    _undo(&S, tpos)
                    if val == 0:
                        lv_tpos[nlv] = tpos; lv_var[nlv] = var; lv_val[nlv] = 1; lv_op[nlv] = op
                        nlv += 1
                        _assign(&S, var, 1)
                        opos = op
                        break
                if status == 0:
                    break
                conflict = _propagate(&S)
                continue
            while opos < n and S.value[order[opos]] != -1:
                opos += 1
            if opos == n:
                status = 1
                break
            nodes += 1
            if deadline > 0 and nodes % CHECK_EVERY == 0 and monotonic() > deadline:
                status = 2
                break
            var = order[opos]
            lv_tpos[nlv] = S.ntrail; lv_var[nlv] = var; lv_val[nlv] = 0; lv_op[nlv] = opos
            nlv += 1
            _assign(&S, var, 0)
            conflict = _propagate(&S)

    if status == 1:
        witness = np.empty(n, dtype=np.uint8)
        wv = witness
        for v in range(1, n + 1):
            wv[v - 1] = <unsigned char>S.value[v]

    free(lv_tpos); free(lv_var); free(lv_val); free(lv_op)
    free(order); free(S.value); free(S.trail)
    free(S.pptr); free(S.nptr); free(S.xoptr); free(S.pocc); free(S.nocc); free(S.xocc)
    free(S.cptr); free(S.clen); free(S.nsat); free(S.nfalse); free(S.clits)
    free(S.xptr); free(S.xvars); free(S.xpar); free(S.xun); free(S.xacc)
    return status, witness, nodes
