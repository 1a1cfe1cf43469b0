"""Exact linear algebra over the rationals (sparse rows of Fractions).

Used wherever a dimension or rank decision must be exact rather than
numerically zero: divergence-free nullspaces, angular Gram solves,
polynomial interpolation of probed mode systems.
"""

from __future__ import annotations

from fractions import Fraction

ZERO = Fraction(0)


def _clean(row: dict) -> dict:
    return {c: v for c, v in row.items() if v != 0}


def sparse_rref(rows):
    """Reduced row echelon form of sparse rational rows.

    rows: iterable of dict[int, Fraction].  Returns dict pivot_col -> row,
    where each row is a dict normalized to pivot value 1 and reduced
    against every other pivot row.
    """
    pivots: dict[int, dict] = {}
    for row in rows:
        row = _clean(dict(row))
        while row:
            c = min(row)
            if c in pivots:
                f = row[c]
                for pc, pv in pivots[c].items():
                    row[pc] = row.get(pc, ZERO) - f * pv
                row = _clean(row)
                continue
            inv = Fraction(1) / row[c]
            row = {cc: vv * inv for cc, vv in row.items()}
            # back-substitute into existing pivot rows
            for pc, prow in pivots.items():
                if c in prow:
                    f = prow[c]
                    for cc, vv in row.items():
                        prow[cc] = prow.get(cc, ZERO) - f * vv
                    pivots[pc] = _clean(prow)
            pivots[c] = row
            break
    return pivots


def sparse_rank(rows) -> int:
    return len(sparse_rref(rows))


def sparse_nullspace(rows, ncols: int):
    """Basis of the rational nullspace of a sparse matrix.

    Returns a list of dense Fraction vectors of length ncols.
    """
    pivots = sparse_rref(rows)
    free_cols = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free_cols:
        v = [ZERO] * ncols
        v[fc] = Fraction(1)
        for pc, prow in pivots.items():
            v[pc] = -prow.get(fc, ZERO)
        basis.append(v)
    return basis


def row_in_rowspace(rows, candidate, ncols: int) -> bool:
    """Whether candidate (dict col->Fraction) lies in the row space."""
    base = sparse_rank(list(rows))
    return sparse_rank(list(rows) + [candidate]) == base


def solve_dense(a, b):
    """Solve a square rational system a x = b exactly.

    a: list of list of Fraction, b: list of Fraction.  Raises ValueError
    on a singular matrix.
    """
    m = [list(map(Fraction, row)) + [Fraction(x)] for row, x in zip(a, b)]
    n = len(m)
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            raise ValueError("singular system")
        m[col], m[piv] = m[piv], m[col]
        inv = Fraction(1) / m[col][col]
        m[col] = [x * inv for x in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return [m[r][n] for r in range(n)]


def det_dense(a) -> Fraction:
    """Determinant of a square rational matrix (fraction Gaussian)."""
    m = [list(map(Fraction, row)) for row in a]
    n = len(m)
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            return ZERO
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        det *= m[col][col]
        inv = Fraction(1) / m[col][col]
        for r in range(col + 1, n):
            if m[r][col] != 0:
                f = m[r][col] * inv
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return det


def lagrange_coefficients(points):
    """Coefficients (low degree first) of the interpolating polynomial.

    points: list of (x, y) Fraction pairs with distinct x.
    """
    n = len(points)
    coeffs = [ZERO] * n
    for i, (xi, yi) in enumerate(points):
        basis = [Fraction(1)]
        denom = Fraction(1)
        for j, (xj, _) in enumerate(points):
            if j == i:
                continue
            basis = poly_mul(basis, [-xj, Fraction(1)])
            denom *= xi - xj
        scale = yi / denom
        for k, c in enumerate(basis):
            coeffs[k] += scale * c
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return coeffs


def poly_mul(p, q):
    out = [ZERO] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a == 0:
            continue
        for j, b in enumerate(q):
            out[i + j] += a * b
    return out


def poly_eval(p, x):
    acc = ZERO
    for c in reversed(p):
        acc = acc * x + c
    return acc


def poly_shift(p, c):
    """Coefficients of p(z + c)."""
    out = [ZERO] * len(p)
    for k in range(len(p) - 1, -1, -1):
        # multiply accumulated polynomial by (z + c) and add p[k]
        for i in range(len(out) - 1, 0, -1):
            out[i] = out[i - 1] + c * out[i]
        out[0] = c * out[0] + p[k]
    return out


def poly_derivative(p):
    return [c * (i + 1) for i, c in enumerate(p[1:])] or [ZERO]


def poly_trim(p):
    p = list(p)
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return p


def poly_divmod(p, q):
    """Exact rational polynomial division: p = quo * q + rem."""
    p = poly_trim(p)
    q = poly_trim(q)
    if q == [ZERO]:
        raise ZeroDivisionError("polynomial division by zero")
    quo = [ZERO] * max(len(p) - len(q) + 1, 1)
    rem = list(p)
    dq = len(q) - 1
    lead = q[-1]
    for i in range(len(rem) - 1 - dq, -1, -1):
        c = rem[i + dq] / lead
        if c == 0:
            continue
        quo[i] = c
        for jj, qc in enumerate(q):
            rem[i + jj] -= c * qc
    return poly_trim(quo), poly_trim(rem)


def poly_monic(p):
    p = poly_trim(p)
    lead = p[-1]
    if lead == 0:
        return p
    return [c / lead for c in p]


def poly_gcd(p, q):
    """Monic gcd of rational polynomials."""
    a, b = poly_trim(p), poly_trim(q)
    while b != [ZERO]:
        _, r = poly_divmod(a, b)
        a, b = b, r
    return poly_monic(a)


def poly_squarefree_factors(p):
    """List of (monic factor, multiplicity) with distinct-root factors."""
    p = poly_monic(p)
    if len(p) <= 1:
        return []
    dp = poly_derivative(p)
    g = poly_gcd(p, dp)
    c, _ = poly_divmod(p, g)
    c = poly_monic(c)
    factors = []
    i = 1
    while len(c) > 1:
        d = poly_gcd(c, g)
        fi, _ = poly_divmod(c, d)
        fi = poly_monic(fi)
        if len(fi) > 1:
            factors.append((fi, i))
        c = d
        g, _ = poly_divmod(g, d)
        i += 1
    return factors
