"""Independent brute-force oracles used to cross-check certificates.

Everything here is deliberately written from scratch (plain Gaussian
elimination over prime fields and over the rationals, straightforward
Hom-space solving) so that agreement with the certified results is
meaningful.
"""

from fractions import Fraction


def rank_gf(rows, ncols, p):
    """Rank over GF(p) by textbook elimination."""
    m = [[x % p for x in r] for r in rows]
    rank, col = 0, 0
    nrows = len(m)
    while rank < nrows and col < ncols:
        piv = next((r for r in range(rank, nrows) if m[r][col] % p), None)
        if piv is None:
            col += 1
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = pow(m[rank][col], p - 2, p) if p > 2 else m[rank][col]
        for r in range(rank + 1, nrows):
            if m[r][col] % p:
                f = (m[r][col] * inv) % p
                for k in range(col, ncols):
                    m[r][k] = (m[r][k] - f * m[rank][k]) % p
        rank += 1
        col += 1
    return rank


def rank_q(rows, ncols):
    """Rank over the rationals by fraction-free-ish elimination."""
    m = [[Fraction(x) for x in r] for r in rows]
    rank, col = 0, 0
    nrows = len(m)
    while rank < nrows and col < ncols:
        piv = next((r for r in range(rank, nrows) if m[r][col] != 0), None)
        if piv is None:
            col += 1
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for r in range(rank + 1, nrows):
            if m[r][col] != 0:
                f = m[r][col] / m[rank][col]
                for k in range(col, ncols):
                    m[r][k] -= f * m[rank][k]
        rank += 1
        col += 1
    return rank


def replay_ops(rows, ops, reduce=None):
    """Apply logged elementary ops to a copy of ``rows``.

    ``ops`` are dicts like the JSON trace's: kind, i, j, c.  ``reduce``
    maps every entry after each step (e.g. lambda x: x % 2).
    """
    state = [list(r) for r in rows]
    if reduce is not None:
        state = [[reduce(x) for x in r] for r in state]
    for op in ops:
        kind = op["kind"]
        if kind == "swap_rows":
            state[op["i"]], state[op["j"]] = state[op["j"]], state[op["i"]]
        elif kind == "swap_cols":
            for r in state:
                r[op["i"]], r[op["j"]] = r[op["j"]], r[op["i"]]
        elif kind == "add_row":
            for k in range(len(state[op["i"]])):
                state[op["i"]][k] += op["c"] * state[op["j"]][k]
        elif kind == "add_col":
            for r in state:
                r[op["i"]] += op["c"] * r[op["j"]]
        else:
            raise AssertionError("unknown op kind %r" % kind)
        if reduce is not None:
            state = [[reduce(x) for x in r] for r in state]
    return state


def hom_dim_gf(quiver, dims_m, maps_m, dims_n, maps_n, p):
    """dim Hom(M, N) over GF(p) by solving the commutation system.

    Unknowns are the entries of per-vertex matrices h_v (dims_n[v] x
    dims_m[v]); one equation per entry of h_t M_a - N_a h_s = 0.
    """
    vl = list(quiver.vertices)
    idx = {v: k for k, v in enumerate(vl)}
    offsets = {}
    off = 0
    for v in vl:
        offsets[v] = off
        off += dims_n[idx[v]] * dims_m[idx[v]]
    ncols = off
    rows = []
    for a, s, t in quiver.arrows:
        ma = maps_m[a]
        na = maps_n[a]
        dm_s, dm_t = dims_m[idx[s]], dims_m[idx[t]]
        dn_s, dn_t = dims_n[idx[s]], dims_n[idx[t]]
        for pp in range(dn_t):
            for qq in range(dm_s):
                row = [0] * ncols
                # (h_t M_a)_{p,q} = sum_k (h_t)_{p,k} (M_a)_{k,q}
                for k in range(dm_t):
                    c = ma.rows[k][qq]
                    if c:
                        row[offsets[t] + pp * dm_t + k] += c
                # -(N_a h_s)_{p,q} = -sum_l (N_a)_{p,l} (h_s)_{l,q}
                for l in range(dn_s):
                    c = na.rows[pp][l]
                    if c:
                        row[offsets[s] + l * dm_s + qq] -= c
                rows.append(row)
    return ncols - rank_gf(rows, ncols, p)


def endo_dim_gf(rep, p):
    dims = tuple(rep.dims)
    return hom_dim_gf(rep.quiver, dims, rep.maps, dims, rep.maps, p)


def ext_dim_gf(quiver, rep_x, rep_y, p, euler):
    """dim Ext^1(X, Y) over GF(p) via hom - euler (hereditary algebra)."""
    hom = hom_dim_gf(quiver, tuple(rep_x.dims), rep_x.maps,
                     tuple(rep_y.dims), rep_y.maps, p)
    return hom - euler


def validate_latex(text):
    """Structural well-formedness of an emitted LaTeX document.

    Brace balance and a consistent environment stack; a stand-in for
    actually compiling when no TeX toolchain is installed.
    """
    assert text.startswith("\\documentclass"), "missing preamble"
    assert text.rstrip().endswith("\\end{document}"), "missing closing"
    depth = 0
    prev = ""
    for ch in text:
        if ch == "{" and prev != "\\":
            depth += 1
        elif ch == "}" and prev != "\\":
            depth -= 1
            assert depth >= 0, "unbalanced braces"
        prev = ch
    assert depth == 0, "unbalanced braces at end"
    stack = []
    pos = 0
    while True:
        b = text.find("\\begin{", pos)
        e = text.find("\\end{", pos)
        if b == -1 and e == -1:
            break
        if e == -1 or (b != -1 and b < e):
            name = text[b + 7:text.index("}", b)]
            stack.append(name)
            pos = b + 7
        else:
            name = text[e + 5:text.index("}", e)]
            assert stack and stack[-1] == name, \
                "environment mismatch: %r vs %r" % (stack[-1:], name)
            stack.pop()
            pos = e + 5
    assert not stack, "unclosed environments: %s" % stack
    return True
