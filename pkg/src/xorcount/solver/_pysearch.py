"""Pure-Python search kernel; the compiled ``_csearch`` mirrors it step for step.

Inputs are flat arrays so both kernels share one calling convention:

* ``clause_lits`` / ``clause_ptr``: clauses in CSR form (signed literals);
* ``xor_rows``: ``(r, nvars)`` 0/1 matrix, column ``i`` is variable ``i+1``;
* ``xor_par``: ``(r,)`` parity bits.

Returns ``(status, witness, nodes)`` with status 1 = SAT, 0 = UNSAT,
2 = deadline passed.
"""

from __future__ import annotations

import time

import numpy as np

SAT, UNSAT, TIMEOUT = 1, 0, 2
CHECK_EVERY = 1024


def rref(rows: list[int], pars: list[int], ncols: int) -> tuple[int, bool]:
    """In-place reduced row echelon form over GF(2) on int bitsets.

    Returns ``(rank, consistent)``; rows past ``rank`` are zero afterwards.
    """
    R = len(rows)
    rank = 0
    for col in range(ncols):
        if rank == R:
            break
        bit = 1 << col
        piv = -1
        for r in range(rank, R):
            if rows[r] & bit:
                piv = r
                break
        if piv < 0:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        pars[rank], pars[piv] = pars[piv], pars[rank]
        prow, ppar = rows[rank], pars[rank]
        for r in range(R):
            if r != rank and rows[r] & bit:
                rows[r] ^= prow
                pars[r] ^= ppar
        rank += 1
    consistent = all(pars[r] == 0 for r in range(rank, R))
    return rank, consistent


def _bits(x: int) -> list[int]:
    out = []
    while x:
        low = x & -x
        out.append(low.bit_length())
        x ^= low
    return out


def search(nvars, clause_lits, clause_ptr, xor_rows, xor_par, deadline=0.0):
    n = int(nvars)
    xor_rows = np.asarray(xor_rows, dtype=np.uint8).reshape(-1, n) if n else xor_rows
    rows = [
        int.from_bytes(np.packbits(row, bitorder="little").tobytes(), "little")
        for row in xor_rows
    ]
    pars = [int(p) & 1 for p in xor_par]
    rank, ok = rref(rows, pars, n)
    if not ok:
        return UNSAT, None, 0
    xvars = [_bits(rows[r]) for r in range(rank)]
    xpar = pars[:rank]

    lits_all = [int(l) for l in clause_lits]
    ptr = [int(p) for p in clause_ptr]
    nclauses = len(ptr) - 1
    clits = [lits_all[ptr[c] : ptr[c + 1]] for c in range(nclauses)]
    clen = [len(c) for c in clits]

    pos_occ = [[] for _ in range(n + 1)]
    neg_occ = [[] for _ in range(n + 1)]
    xocc = [[] for _ in range(n + 1)]
    for c, lits in enumerate(clits):
        for l in lits:
            (pos_occ if l > 0 else neg_occ)[abs(l)].append(c)
    for x, vs in enumerate(xvars):
        for v in vs:
            xocc[v].append(x)

    occ = [len(pos_occ[v]) + len(neg_occ[v]) + len(xocc[v]) for v in range(n + 1)]
    order = sorted(range(1, n + 1), key=lambda v: (-occ[v], v))

    value = [-1] * (n + 1)
    nsat = [0] * nclauses
    nfalse = [0] * nclauses
    xun = [len(vs) for vs in xvars]
    xacc = [0] * rank
    trail: list[int] = []
    qhead = 0

    def assign(v, val):
        value[v] = val
        trail.append(v)

    # top-level units
    for c in range(nclauses):
        if clen[c] == 1:
            l = clits[c][0]
            v, want = abs(l), 1 if l > 0 else 0
            if value[v] == -1:
                assign(v, want)
            elif value[v] != want:
                return UNSAT, None, 0
    for x in range(rank):
        if xun[x] == 1:
            v = xvars[x][0]
            if value[v] == -1:
                assign(v, xpar[x])
            elif value[v] != xpar[x]:
                return UNSAT, None, 0

    def propagate():
        nonlocal qhead
        conflict = False
        while qhead < len(trail) and not conflict:
            v = trail[qhead]
            qhead += 1
            val = value[v]
            if val == 1:
                tl, fl = pos_occ[v], neg_occ[v]
            else:
                tl, fl = neg_occ[v], pos_occ[v]
            for c in tl:
                nsat[c] += 1
            for c in fl:
                nfalse[c] += 1
                if conflict or nsat[c] or nfalse[c] < clen[c] - 1:
                    continue
                unit = 0
                satisfied = False
                for l in clits[c]:
                    a = value[abs(l)]
                    if a == -1:
                        unit = l
                    elif (a == 1) == (l > 0):
                        satisfied = True
                        break
                if satisfied:
                    continue
                if unit:
                    assign(abs(unit), 1 if unit > 0 else 0)
                else:
                    conflict = True
            for x in xocc[v]:
                xun[x] -= 1
                xacc[x] ^= val
                if conflict or xun[x] > 1:
                    continue
                acc = 0
                free = 0
                for u in xvars[x]:
                    a = value[u]
                    if a == -1:
                        free = u
                    else:
                        acc ^= a
                if free:
                    assign(free, xpar[x] ^ acc)
                elif acc != xpar[x]:
                    conflict = True
        return conflict

    def undo(tpos):
        nonlocal qhead
        for i in range(len(trail) - 1, tpos - 1, -1):
            v = trail[i]
            if i < qhead:
                val = value[v]
                if val == 1:
                    tl, fl = pos_occ[v], neg_occ[v]
                else:
                    tl, fl = neg_occ[v], pos_occ[v]
                for c in tl:
                    nsat[c] -= 1
                for c in fl:
                    nfalse[c] -= 1
                for x in xocc[v]:
                    xun[x] += 1
                    xacc[x] ^= val
            value[v] = -1
        del trail[tpos:]
        qhead = tpos

    levels: list[tuple[int, int, int, int]] = []
    opos = 0
    nodes = 0
    conflict = propagate()
    while True:
        if conflict:
            while True:
                if not levels:
                    return UNSAT, None, nodes
                tpos, var, val, op = levels.pop()
                undo(tpos)
                if val == 0:
                    levels.append((tpos, var, 1, op))
                    assign(var, 1)
                    opos = op
                    break
            conflict = propagate()
            continue
        while opos < n and value[order[opos]] != -1:
            opos += 1
        if opos == n:
            return SAT, np.array(value[1:], dtype=np.uint8), nodes
        nodes += 1
        if deadline and nodes % CHECK_EVERY == 0 and time.monotonic() > deadline:
            return TIMEOUT, None, nodes
        var = order[opos]
        levels.append((len(trail), var, 0, opos))
        assign(var, 0)
        conflict = propagate()
