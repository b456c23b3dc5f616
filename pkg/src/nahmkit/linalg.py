"""Exact linear algebra over the session field (Scalar matrices).

Matrices are plain lists of lists of Scalars.  Everything is classical
fraction-field Gaussian elimination; sizes in this package are small (block
splitting, residue matrices, torus-side endomorphisms), so clarity wins.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import FieldExtensionRequired, InputError
from .field import scalar_sqrt


def identity(ctx, n):
    return [[ctx.one if i == j else ctx.zero for j in range(n)] for i in range(n)]


def zero_matrix(ctx, rows, cols):
    return [[ctx.zero for _ in range(cols)] for _ in range(rows)]


def mat_mul(a, b):
    rows, inner, cols = len(a), len(b), len(b[0])
    out = []
    for i in range(rows):
        row = []
        for j in range(cols):
            s = None
            for t in range(inner):
                x = a[i][t]
                if x.is_zero():
                    continue
                term = x * b[t][j]
                s = term if s is None else s + term
            row.append(s if s is not None else a[0][0].ctx.zero)
        out.append(row)
    return out


def mat_add(a, b):
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_scale(a, c):
    return [[x * c for x in row] for row in a]


def mat_sub(a, b):
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def transpose(a):
    return [list(col) for col in zip(*a)]


def rref(mat):
    """Reduced row echelon form; returns (rref, pivot columns, rank)."""
    m = [row[:] for row in mat]
    rows = len(m)
    cols = len(m[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        pr = next((i for i in range(r, rows) if not m[i][c].is_zero()), None)
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        inv = m[r][c].inverse()
        m[r] = [x * inv for x in m[r]]
        for i in range(rows):
            if i != r and not m[i][c].is_zero():
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return m, pivots, r


def rank(mat):
    return rref(mat)[2]


def kernel(mat):
    """Basis of the right kernel as column vectors (lists)."""
    if not mat:
        return []
    ctx = mat[0][0].ctx
    red, pivots, r = rref(mat)
    cols = len(mat[0])
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for fc in free:
        v = [ctx.zero] * cols
        v[fc] = ctx.one
        for i, pc in enumerate(pivots):
            v[pc] = -red[i][fc]
        basis.append(v)
    return basis


def solve(mat, rhs):
    """One solution of mat*x = rhs, or None."""
    ctx = mat[0][0].ctx
    aug = [row[:] + [b] for row, b in zip(mat, rhs)]
    red, pivots, r = rref(aug)
    cols = len(mat[0])
    if any(pc == cols for pc in pivots):
        return None
    x = [ctx.zero] * cols
    for i, pc in enumerate(pivots):
        x[pc] = red[i][cols]
    return x


def det(mat):
    n = len(mat)
    if n == 0:
        raise InputError("determinant of empty matrix")
    ctx = mat[0][0].ctx
    m = [row[:] for row in mat]
    out = ctx.one
    for c in range(n):
        pr = next((i for i in range(c, n) if not m[i][c].is_zero()), None)
        if pr is None:
            return ctx.zero
        if pr != c:
            m[c], m[pr] = m[pr], m[c]
            out = -out
        out = out * m[c][c]
        inv = m[c][c].inverse()
        for i in range(c + 1, n):
            if not m[i][c].is_zero():
                f = m[i][c] * inv
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return out


def inverse(mat):
    n = len(mat)
    ctx = mat[0][0].ctx
    aug = [row[:] + ident_row for row, ident_row in zip(mat, identity(ctx, n))]
    red, pivots, r = rref(aug)
    if pivots[:n] != list(range(n)):
        raise InputError("matrix not invertible")
    return [row[n:] for row in red]


def charpoly(mat):
    """Characteristic polynomial det(T I - mat) by Faddeev-LeVerrier.

    Returns coefficients [1, c1, ..., cn] with c_k the coefficient of
    T^(n-k).
    """
    n = len(mat)
    ctx = mat[0][0].ctx
    coeffs = [ctx.one]
    M = None
    for k in range(1, n + 1):
        M = mat if M is None else mat_mul(mat, mat_add(M, _diag_const(ctx, n, coeffs[-1])))
        tr = M[0][0]
        for i in range(1, n):
            tr = tr + M[i][i]
        coeffs.append(-(tr / k))
    return coeffs


def _diag_const(ctx, n, c):
    return [[c if i == j else ctx.zero for j in range(n)] for i in range(n)]


# ----------------------------------------------------------------------
# univariate polynomials over Scalar (descending-power coefficient lists)
# ----------------------------------------------------------------------


def poly_eval(coeffs, x):
    ctx = x.ctx
    out = ctx.zero
    for c in coeffs:
        out = out * x + c
    return out


def poly_deflate(coeffs, root):
    """Divide by (T - root); assumes root is exact."""
    out = [coeffs[0]]
    for c in coeffs[1:-1]:
        out.append(c + out[-1] * root)
    return out


def scalar_poly_roots(ctx, coeffs, candidates=()):
    """All roots (with multiplicity) of a monic Scalar polynomial, or raise.

    Deflates verified candidate roots, then handles a quadratic remainder
    through a perfect-square discriminant.  Raises FieldExtensionRequired
    when the polynomial does not split over the session field.
    """
    deg = len(coeffs) - 1
    cand = [ctx.zero]
    for c in candidates:
        if c not in cand:
            cand.append(c)
    if deg >= 1:
        # -c1/j are the natural guesses for roots of multiplicity j
        for j in range(1, deg + 1):
            c = -(coeffs[1] / ctx.rational(j))
            if c not in cand:
                cand.append(c)
        if not coeffs[-1].is_zero() and not coeffs[-2].is_zero():
            c = -(coeffs[-1] / coeffs[-2])
            if c not in cand:
                cand.append(c)
    roots = []
    cur = list(coeffs)
    progress = True
    while len(cur) > 1 and progress:
        progress = False
        for c in cand:
            while len(cur) > 1 and poly_eval(cur, c).is_zero():
                roots.append(c)
                cur = poly_deflate(cur, c)
                progress = True
        if len(cur) == 3 and not progress:
            b, c0 = cur[1], cur[2]
            disc = b * b - 4 * c0
            s = scalar_sqrt(disc)
            if s is not None:
                half = ctx.rational(Fraction(1, 2))
                roots.extend([(-b + s) * half, (-b - s) * half])
                cur = cur[:1]
                progress = True
    if len(cur) > 1:
        raise FieldExtensionRequired(
            "polynomial does not split over the session field"
        )
    mult = {}
    order = []
    for r in roots:
        if r in mult:
            mult[r] += 1
        else:
            mult[r] = 1
            order.append(r)
    return [(r, mult[r]) for r in order]


def eigenvalues_in_field(mat, candidates=()):
    """Eigenvalues with multiplicities, certified over the session field.

    Candidate roots default to the diagonal entries; raises
    FieldExtensionRequired when the spectrum does not live in the field.
    """
    n = len(mat)
    ctx = mat[0][0].ctx
    cp = charpoly(mat)
    cand = list(candidates) + [mat[i][i] for i in range(n)]
    return scalar_poly_roots(ctx, cp, candidates=cand)


def generalized_eigenspace(mat, eigval, multiplicity):
    """Basis of ker((mat - eigval)^multiplicity)."""
    n = len(mat)
    ctx = mat[0][0].ctx
    shifted = [[mat[i][j] - (eigval if i == j else ctx.zero) for j in range(n)] for i in range(n)]
    power = shifted
    for _ in range(multiplicity - 1):
        power = mat_mul(power, shifted)
    return kernel(power)


def solve_sylvester(a, b, c):
    """X with a X - X b = c (spectra of a and b must be disjoint)."""
    na, nb = len(a), len(b)
    ctx = c[0][0].ctx
    # unknowns X[i][j] flattened row-major
    rows = []
    rhs = []
    for i in range(na):
        for j in range(nb):
            row = [ctx.zero] * (na * nb)
            for t in range(na):
                row[t * nb + j] = row[t * nb + j] + a[i][t]
            for t in range(nb):
                row[i * nb + t] = row[i * nb + t] - b[t][j]
            rows.append(row)
            rhs.append(c[i][j])
    x = solve(rows, rhs)
    if x is None:
        raise InputError("Sylvester system not solvable (overlapping spectra?)")
    return [[x[i * nb + j] for j in range(nb)] for i in range(na)]
