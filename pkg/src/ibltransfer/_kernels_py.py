"""Pure-Python versions of the hot tensor kernels.

A sparse tensor vector is a dict mapping a tuple of basis indices to a
nonzero rational.  ``par`` is a sequence giving the parity of each basis index.
"""


def _clean(res):
    return {k: v for k, v in res.items() if v}


def reorder_sign(key, order, par):
    """Koszul sign of rearranging the factors of key into key[order[0]], key[order[1]], ..."""
    s = 0
    odd = [i for i in order if par[key[i]]]
    n = len(odd)
    for a in range(n):
        oa = odd[a]
        for b in range(a + 1, n):
            if odd[b] < oa:
                s ^= 1
    return -1 if s else 1


def apply_at(vec, positions, cols, par):
    """Apply a local operator to the factors at ``positions`` (in that order).

    The picked factors are moved to the front with their Koszul sign, the
    operator is applied there and its outputs stay in front of the untouched
    factors.
    """
    positions = tuple(positions)
    m = len(positions)
    res = {}
    if positions == tuple(range(m)):
        for key, c in vec.items():
            col = cols.get(key[:m])
            if not col:
                continue
            tail = key[m:]
            for out, v in col.items():
                nk = out + tail
                res[nk] = res.get(nk, 0) + c * v
        return _clean(res)
    pos_set = set(positions)
    n = None
    rest = None
    order = None
    for key, c in vec.items():
        if n != len(key):
            n = len(key)
            rest = tuple(i for i in range(n) if i not in pos_set)
            order = positions + rest
        head = tuple(key[p] for p in positions)
        col = cols.get(head)
        if not col:
            continue
        if reorder_sign(key, order, par) < 0:
            c = -c
        tail = tuple(key[i] for i in rest)
        for out, v in col.items():
            nk = out + tail
            res[nk] = res.get(nk, 0) + c * v
    return _clean(res)


def permute(vec, images, par):
    """Move factor i to position images[i], with Koszul sign."""
    n = len(images)
    order = [0] * n
    for i, j in enumerate(images):
        order[j] = i
    order = tuple(order)
    res = {}
    for key, c in vec.items():
        nk = tuple(key[i] for i in order)
        if reorder_sign(key, order, par) < 0:
            c = -c
        res[nk] = res.get(nk, 0) + c
    return _clean(res)


def tensor_apply(vec, maps):
    """Apply even 1->1 maps factorwise; maps[i] is a dict index -> list of (index, coef).

    ``maps`` may also be a single dict used for every factor.
    """
    res = {}
    single = isinstance(maps, dict)
    for key, c in vec.items():
        partial = [((), c)]
        for i, a in enumerate(key):
            col = (maps if single else maps[i]).get(a)
            if not col:
                partial = []
                break
            partial = [(k + (b,), x * v) for k, x in partial for b, v in col]
        for k, x in partial:
            res[k] = res.get(k, 0) + x
    return _clean(res)


def sym_homotopy(vec, hcols, r, par, inv):
    """Symmetrized homotopy in a basis adapted to im(pi) + ker(pi).

    Indices below r span im(pi); hcols maps the other indices to lists of
    (index, coef).  inv[m] is 1/m.
    """
    res = {}
    for key, c in vec.items():
        ks = [j for j, a in enumerate(key) if a >= r]
        if not ks:
            continue
        cc = c * inv[len(ks)]
        for j in ks:
            s = 0
            for i in range(j):
                s ^= par[key[i]]
            x = -cc if s else cc
            pre = key[:j]
            post = key[j + 1:]
            for b, v in hcols[key[j]]:
                nk = pre + (b,) + post
                res[nk] = res.get(nk, 0) + x * v
    return _clean(res)


def project_below(vec, r):
    """Keep only terms whose indices all lie below r."""
    return {k: v for k, v in vec.items() if all(a < r for a in k)}


def sym_homotopy_t(covec, hrows, r, par, inv):
    """Transpose of sym_homotopy acting on a covector; hrows maps b to [(a, coef)] with h(a) ∋ b."""
    res = {}
    for key, c in covec.items():
        ks = 0
        for a in key:
            if a >= r:
                ks += 1
        if not ks:
            continue
        cc = c * inv[ks]
        s = 0
        for j, b in enumerate(key):
            pre_rows = hrows.get(b) if b >= r else None
            if pre_rows:
                x = -cc if s else cc
                pre = key[:j]
                post = key[j + 1:]
                for a, v in pre_rows:
                    nk = pre + (a,) + post
                    res[nk] = res.get(nk, 0) + x * v
            s ^= par[b]
    return _clean(res)
