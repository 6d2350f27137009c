"""Exact integer matrix algebra: Smith and Hermite forms, solves, kernels.

Matrices are lists of lists of Python ints, so every computation is exact at
arbitrary precision.  Pivots are chosen by minimal absolute value to limit
coefficient growth.
"""

from __future__ import annotations


def shape(a):
    return len(a), len(a[0]) if a else 0


def zeros(m, n):
    return [[0] * n for _ in range(m)]


def eye(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def copy_matrix(a):
    return [list(row) for row in a]


def transpose(a):
    m, n = shape(a)
    return [[a[i][j] for i in range(m)] for j in range(n)]


def matmul(a, b):
    m, n = shape(a)
    n2, p = shape(b)
    if n != n2:
        raise ValueError(f"shape mismatch {m}x{n} times {n2}x{p}")
    out = zeros(m, p)
    for i in range(m):
        ai = a[i]
        oi = out[i]
        for k in range(n):
            v = ai[k]
            if v:
                bk = b[k]
                for j in range(p):
                    oi[j] += v * bk[j]
    return out


def matvec(a, x):
    m, n = shape(a)
    if len(x) != n:
        raise ValueError("vector length mismatch")
    return [sum(a[i][j] * x[j] for j in range(n)) for i in range(m)]


def smith_normal_form(a):
    """Return (U, S, V) with S = U @ a @ V in Smith normal form.

    U and V are unimodular; the diagonal of S is nonnegative and each entry
    divides the next.
    """
    u, s, v, _ = smith_normal_form_vinv(a)
    return u, s, v


def smith_normal_form_vinv(a):
    """Smith form together with the exact inverse of V, tracked in place."""
    m, n = shape(a)
    s = copy_matrix(a)
    u = eye(m)
    v = eye(n)
    vinv = eye(n)

    def swap_rows(i, j):
        s[i], s[j] = s[j], s[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in s:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]
        vinv[i], vinv[j] = vinv[j], vinv[i]

    def add_row(i, j, q):
        # row_i += q * row_j
        si, sj = s[i], s[j]
        for c in range(n):
            si[c] += q * sj[c]
        ui, uj = u[i], u[j]
        for c in range(m):
            ui[c] += q * uj[c]

    def add_col(i, j, q):
        # col_i += q * col_j of S and V; row_j -= q * row_i of V's inverse
        for row in s:
            row[i] += q * row[j]
        for row in v:
            row[i] += q * row[j]
        vi, vj = vinv[i], vinv[j]
        for c in range(n):
            vj[c] -= q * vi[c]

    t = 0
    limit = min(m, n)
    while t < limit:
        # minimal absolute nonzero pivot in the trailing block
        best = None
        for i in range(t, m):
            for j in range(t, n):
                val = s[i][j]
                if val and (best is None or abs(val) < abs(s[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        if best[0] != t:
            swap_rows(t, best[0])
        if best[1] != t:
            swap_cols(t, best[1])
        dirty = False
        for i in range(t + 1, m):
            if s[i][t]:
                q = s[i][t] // s[t][t]
                if q:
                    add_row(i, t, -q)
                if s[i][t]:
                    dirty = True
        for j in range(t + 1, n):
            if s[t][j]:
                q = s[t][j] // s[t][t]
                if q:
                    add_col(j, t, -q)
                if s[t][j]:
                    dirty = True
        if dirty:
            continue
        pivot = s[t][t]
        bad = None
        for i in range(t + 1, m):
            for j in range(t + 1, n):
                if s[i][j] % pivot:
                    bad = i
                    break
            if bad is not None:
                break
        if bad is not None:
            add_row(t, bad, 1)
            continue
        t += 1
    for i in range(limit):
        if s[i][i] < 0:
            for c in range(n):
                s[i][c] = -s[i][c]
            for c in range(m):
                u[i][c] = -u[i][c]
    return u, s, v, vinv


class SmithSolver:
    """Reusable exact solver for a fixed coefficient matrix."""

    def __init__(self, a):
        self.shape = shape(a)
        self.u, self.s, self.v = smith_normal_form(a)
        self.diag = diagonal_of(self.s)
        self.rank = sum(1 for d in self.diag if d)

    def solve(self, b):
        m, n = self.shape
        if len(b) != m:
            raise ValueError("right-hand side length mismatch")
        c = matvec(self.u, b)
        y = [0] * n
        for i in range(m):
            d = self.diag[i] if i < len(self.diag) else 0
            if d:
                if c[i] % d:
                    return None
                y[i] = c[i] // d
            elif c[i]:
                return None
        return matvec(self.v, y)


def diagonal_of(s):
    m, n = shape(s)
    return [s[i][i] for i in range(min(m, n))]


def invariant_factors(a):
    """Nonzero diagonal entries of the Smith form, in divisibility order."""
    _, s, _ = smith_normal_form(a)
    return [d for d in diagonal_of(s) if d]


def smith_rank(a):
    return len(invariant_factors(a))


def solve_integer(a, b):
    """One integer solution x of a @ x = b, or None when none exists."""
    return SmithSolver(a).solve(b)


def kernel_basis(a):
    """Columns forming a lattice basis of the integer kernel of a."""
    m, n = shape(a)
    _, s, v = smith_normal_form(a)
    rank = sum(1 for d in diagonal_of(s) if d)
    return [[v[i][j] for j in range(rank, n)] for i in range(n)]


def kernel_with_coords(a):
    """Kernel basis B plus the functional F with F @ z = coords for cycles z.

    For any z in the kernel lattice, B @ (F @ z) = z; the functional rows are
    the trailing rows of the tracked inverse of V.
    """
    m, n = shape(a)
    _, s, v, vinv = smith_normal_form_vinv(a)
    rank = sum(1 for d in diagonal_of(s) if d)
    basis = [[v[i][j] for j in range(rank, n)] for i in range(n)]
    functional = [list(vinv[i]) for i in range(rank, n)]
    return basis, functional


def unimodular_inverse(u):
    """Exact inverse of a unimodular integer matrix."""
    m, n = shape(u)
    if m != n:
        raise ValueError("not square")
    solver = SmithSolver(u)
    cols = []
    for j in range(n):
        e = [1 if i == j else 0 for i in range(n)]
        x = solver.solve(e)
        if x is None:
            raise ValueError("matrix is not unimodular")
        cols.append(x)
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def hermite_row_form(a):
    """Canonical row-style Hermite normal form of the row lattice of a.

    Zero rows are dropped, pivots are positive and entries above each pivot
    are reduced into [0, pivot), so two matrices span the same row lattice
    exactly when their forms are equal.
    """
    h = copy_matrix(a)
    m, n = shape(h)
    r = 0
    for col in range(n):
        if r == m:
            break
        while True:
            best = None
            for i in range(r, m):
                val = h[i][col]
                if val and (best is None or abs(val) < abs(h[best][col])):
                    best = i
            if best is None:
                break
            if best != r:
                h[r], h[best] = h[best], h[r]
            finished = True
            for i in range(r + 1, m):
                if h[i][col]:
                    q = h[i][col] // h[r][col]
                    h[i] = [x - q * y for x, y in zip(h[i], h[r])]
                    if h[i][col]:
                        finished = False
            if finished:
                break
        if r < m and h[r][col]:
            if h[r][col] < 0:
                h[r] = [-x for x in h[r]]
            for i in range(r):
                q = h[i][col] // h[r][col]
                if q:
                    h[i] = [x - q * y for x, y in zip(h[i], h[r])]
            r += 1
    return [row for row in h[:r]]


def column_lattice_form(a):
    """Canonical form of the lattice spanned by the columns of a."""
    return hermite_row_form(transpose(a))


def lattices_equal(a, b):
    """Whether the columns of a and of b span the same integer lattice."""
    return column_lattice_form(a) == column_lattice_form(b)


def is_surjective_onto(a, relation_diag):
    """Whether the columns of a generate Z^m modulo diag relations.

    ``relation_diag`` lists one modulus per row; 0 means a free row.  The map
    is onto exactly when [a | diag] has full row rank with all invariant
    factors 1.
    """
    m, n = shape(a)
    if len(relation_diag) != m:
        raise ValueError("relation length mismatch")
    aug = [list(row) for row in a]
    for i in range(m):
        for j in range(m):
            aug[i].append(relation_diag[j] if i == j else 0)
    facts = invariant_factors(aug)
    return len(facts) == m and all(d == 1 for d in facts)
