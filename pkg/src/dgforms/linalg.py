"""Exact kernels of matrices over K = F_p(θ).

Rows are first cleared of denominators, then reduced by fraction-free
(Bareiss) elimination over A = F_p[θ]: every intermediate entry stays a
polynomial and each division is exact.  Pivots are chosen canonically: the
first column with a nonzero entry among the remaining rows, and the topmost
such row.  The kernel is read off the echelon form by back substitution in K.
"""

from .ring_core import PolyA, RatK, as_rat, poly_lcm


def _clear_row(row, p):
    dens = [c.den for c in row if not c.is_zero()]
    if not dens:
        return [PolyA.zero(p)] * len(row)
    D = poly_lcm(dens, p)
    return [c.num * D.exquo(c.den) for c in row]


def fraction_free_echelon(rows, p):
    """Row echelon form over A; returns (rows, pivot_columns)."""
    M = [_clear_row([as_rat(c, p) for c in r], p) for r in rows]
    M = [r for r in M if any(r)]
    ncols = len(M[0]) if M else 0
    pivots = []
    prev = PolyA.one(p)
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(M)) if M[i][col]), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        a = M[r][col]
        for i in range(r + 1, len(M)):
            b = M[i][col]
            M[i] = [(a * x - b * y).exquo(prev) for x, y in zip(M[i], M[r])]
        pivots.append(col)
        prev = a
        r += 1
        if r == len(M):
            break
    return M[:r], pivots


def kernel(rows, ncols, p):
    """Basis of {v in K^ncols : M v = 0}, one vector per free column.

    The vector for free column f has v_f = 1 and zero in the other free columns.
    """
    E, pivots = fraction_free_echelon(rows, p) if rows else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [RatK.zero(p) for _ in range(ncols)]
        v[f] = RatK.one(p)
        for row, pc in reversed(list(zip(E, pivots))):
            s = RatK.zero(p)
            for c in range(pc + 1, ncols):
                if row[c] and not v[c].is_zero():
                    s = s + v[c] * RatK.from_poly(row[c])
            v[pc] = -s / RatK.from_poly(row[pc])
        basis.append(v)
    return basis


def rank(rows, p):
    return len(fraction_free_echelon(rows, p)[1]) if rows else 0
