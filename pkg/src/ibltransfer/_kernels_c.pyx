# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled versions of the hot tensor kernels (same contracts as _kernels_py).

Coefficients stay Python objects (mpq); the gain is in the index
bookkeeping: typed loops, tuple building and sign tracking.
"""


cdef dict _clean(dict res):
    return {k: v for k, v in res.items() if v}


cdef inline int _reorder_parity(tuple key, tuple order, par):
    cdef int s = 0
    cdef Py_ssize_t a, b, n
    cdef list odd = [i for i in order if par[key[i]]]
    n = len(odd)
    for a in range(n):
        oa = <Py_ssize_t>odd[a]
        for b in range(a + 1, n):
            if <Py_ssize_t>odd[b] < oa:
                s ^= 1
    return s


def reorder_sign(key, order, par):
    return -1 if _reorder_parity(tuple(key), tuple(order), par) else 1


def apply_at(dict vec, positions, dict cols, par):
    cdef tuple pos = tuple(positions)
    cdef Py_ssize_t m = len(pos), n = -1, i
    cdef dict res = {}
    cdef dict col
    cdef tuple key, tail, head, nk, rest = (), order = ()
    if pos == tuple(range(m)):
        for key, c in vec.items():
            col = cols.get(key[:m])
            if not col:
                continue
            tail = key[m:]
            for out, v in col.items():
                nk = out + tail
                res[nk] = res.get(nk, 0) + c * v
        return _clean(res)
    cdef set pos_set = set(pos)
    for key, c in vec.items():
        if n != len(key):
            n = len(key)
            rest = tuple([i for i in range(n) if i not in pos_set])
            order = pos + rest
        head = tuple([key[p] for p in pos])
        col = cols.get(head)
        if not col:
            continue
        if _reorder_parity(key, order, par):
            c = -c
        tail = tuple([key[i] for i in rest])
        for out, v in col.items():
            nk = out + tail
            res[nk] = res.get(nk, 0) + c * v
    return _clean(res)


def permute(dict vec, images, par):
    cdef Py_ssize_t n = len(images), i
    cdef list order_l = [0] * n
    for i in range(n):
        order_l[images[i]] = i
    cdef tuple order = tuple(order_l)
    cdef dict res = {}
    cdef tuple key, nk
    for key, c in vec.items():
        nk = tuple([key[i] for i in order])
        if _reorder_parity(key, order, par):
            c = -c
        res[nk] = res.get(nk, 0) + c
    return _clean(res)


def tensor_apply(dict vec, maps):
    cdef dict res = {}
    cdef bint single = isinstance(maps, dict)
    cdef list partial, col
    cdef tuple key
    cdef Py_ssize_t i
    for key, c in vec.items():
        partial = [((), c)]
        for i in range(len(key)):
            col = (maps if single else maps[i]).get(key[i])
            if not col:
                partial = []
                break
            partial = [(k + (b,), x * v) for k, x in partial for b, v in col]
        for k, x in partial:
            res[k] = res.get(k, 0) + x
    return _clean(res)


def sym_homotopy(dict vec, dict hcols, Py_ssize_t r, par, inv):
    cdef dict res = {}
    cdef tuple key, pre, post, nk
    cdef list ks
    cdef Py_ssize_t j, i
    cdef int s
    for key, c in vec.items():
        ks = [j for j in range(len(key)) if <Py_ssize_t>key[j] >= r]
        if not ks:
            continue
        cc = c * inv[len(ks)]
        for j in ks:
            s = 0
            for i in range(j):
                s ^= <int>par[key[i]]
            x = -cc if s else cc
            pre = key[:j]
            post = key[j + 1:]
            for b, v in hcols[key[j]]:
                nk = pre + (b,) + post
                res[nk] = res.get(nk, 0) + x * v
    return _clean(res)


def project_below(dict vec, Py_ssize_t r):
    cdef dict out = {}
    cdef tuple k
    cdef bint ok
    for k, v in vec.items():
        ok = True
        for a in k:
            if <Py_ssize_t>a >= r:
                ok = False
                break
        if ok:
            out[k] = v
    return out


def sym_homotopy_t(dict covec, dict hrows, Py_ssize_t r, par, inv):
    cdef dict res = {}
    cdef tuple key, pre, post, nk
    cdef Py_ssize_t ks, j, b
    cdef int s
    for key, c in covec.items():
        ks = 0
        for a in key:
            if <Py_ssize_t>a >= r:
                ks += 1
        if not ks:
            continue
        cc = c * inv[ks]
        s = 0
        for j in range(len(key)):
            b = key[j]
            rows = hrows.get(b) if b >= r else None
            if rows:
                x = -cc if s else cc
                pre = key[:j]
                post = key[j + 1:]
                for a, v in rows:
                    nk = pre + (a,) + post
                    res[nk] = res.get(nk, 0) + x * v
            s ^= <int>par[b]
    return _clean(res)
