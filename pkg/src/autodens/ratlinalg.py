"""Exact linear algebra over the rationals.

Matrices are lists of rows of Fractions (or ints). Elimination works on
sparse rows and picks pivots deterministically: the first row, in index
order, with a nonzero entry in the pivot column.
"""

from fractions import Fraction


def identity(n):
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def transpose(a):
    return [list(col) for col in zip(*a)] if a else []


def matmul(a, b):
    bt = transpose(b)
    sparse_b = [{i: v for i, v in enumerate(col) if v} for col in bt]
    out = []
    for row in a:
        nz = [(i, v) for i, v in enumerate(row) if v]
        out.append([sum((v * col[i] for i, v in nz if i in col), Fraction(0)) for col in sparse_b])
    return out


def matvec(a, x):
    return [sum((v * x[j] for j, v in enumerate(row) if v), Fraction(0)) for row in a]


def vecmat(x, a):
    n = len(a[0]) if a else 0
    out = [Fraction(0)] * n
    for i, xi in enumerate(x):
        if xi:
            for j, v in enumerate(a[i]):
                if v:
                    out[j] += xi * v
    return out


def scale(a, c):
    return [[c * v for v in row] for row in a]


def add(a, b):
    return [[x + y for x, y in zip(r, s)] for r, s in zip(a, b)]


def sub(a, b):
    return [[x - y for x, y in zip(r, s)] for r, s in zip(a, b)]


def rref(a, ncols=None):
    """Reduced row echelon form. Returns (rows as dicts, pivot columns)."""
    rows = [{j: Fraction(v) for j, v in enumerate(r) if v} for r in a]
    if ncols is None:
        ncols = len(a[0]) if a else 0
    pivots = []
    done = []
    for col in range(ncols):
        pick = None
        for i, r in enumerate(rows):
            if r.get(col):
                pick = i
                break
        if pick is None:
            continue
        prow = rows.pop(pick)
        inv = 1 / prow[col]
        prow = {j: v * inv for j, v in prow.items()}
        for r in rows + done:
            f = r.get(col)
            if f:
                for j, v in prow.items():
                    nv = r.get(j, 0) - f * v
                    if nv:
                        r[j] = nv
                    else:
                        r.pop(j, None)
        done.append(prow)
        pivots.append(col)
    return done, pivots


def nullspace(a, ncols=None):
    """Basis of {x : a x = 0}, one vector per free column."""
    if ncols is None:
        ncols = len(a[0]) if a else 0
    rows, pivots = rref(a, ncols)
    pivset = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivset:
            continue
        x = [Fraction(0)] * ncols
        x[free] = Fraction(1)
        for r, p in zip(rows, pivots):
            v = r.get(free)
            if v:
                x[p] = -v
        basis.append(x)
    return basis


def solve(a, b):
    """Unique solution of a x = b for square nonsingular a, else None."""
    n = len(a)
    aug = [list(row) + [bi] for row, bi in zip(a, b)]
    rows, pivots = rref(aug, n)
    if pivots != list(range(n)):
        return None
    return [r.get(n, Fraction(0)) for r in rows]


def inverse(a):
    n = len(a)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    rows, pivots = rref(aug, n)
    if pivots != list(range(n)):
        return None
    return [[r.get(n + j, Fraction(0)) for j in range(n)] for r in rows]


def fixed_projection(b):
    """Projection onto ker(B - I) along im(B - I).

    Requires the eigenvalue 1 of B to be semisimple, which holds for column
    stochastic matrices. Built as R (L^T R)^-1 L^T from right and left
    kernel bases.
    """
    n = len(b)
    shifted = [[b[i][j] - (1 if i == j else 0) for j in range(n)] for i in range(n)]
    right = nullspace(shifted, n)
    left = nullspace(transpose(shifted), n)
    if len(right) != len(left):
        raise ArithmeticError("kernel dimensions of B - I and its transpose differ")
    if not right:
        return [[Fraction(0)] * n for _ in range(n)]
    gram = [[sum((l[i] * r[i] for i in range(n) if l[i] and r[i]), Fraction(0))
             for r in right] for l in left]
    ginv = inverse(gram)
    if ginv is None:
        raise ArithmeticError("ker(B - I) and im(B - I) are not complementary")
    # P = R * ginv * L^T
    rmat = transpose(right)
    mid = matmul(rmat, ginv)
    return matmul(mid, left)
