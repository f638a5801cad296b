"""Exact matrix kernels over the integers and over GF(2).

Matrices are plain lists of lists of Python ints, so every computation is
exact and unbounded.  The inputs that arise in practice are tiny (rarely
more than ten rows), which keeps the quadratic bookkeeping cheap and lets
the GF(2) canonical form afford an honest cyclic-decomposition pass
instead of heuristics.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

# ---------------------------------------------------------------------------
# shared helpers


def identity(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def copy_matrix(a):
    return [row[:] for row in a]


def mat_mul(a, b):
    """Exact integer matrix product a @ b."""
    if a and b and len(a[0]) != len(b):
        raise ValueError("inner dimensions disagree")
    inner = len(b)
    cols = len(b[0]) if b else 0
    out = []
    for row in a:
        acc = [0] * cols
        for k in range(inner):
            x = row[k]
            if x:
                bk = b[k]
                for j in range(cols):
                    acc[j] += x * bk[j]
        out.append(acc)
    return out


def transpose(a):
    if not a:
        return []
    return [list(col) for col in zip(*a)]


def det_bareiss(a):
    """Integer determinant by fraction-free (Bareiss) elimination.

    Every intermediate division is exact, so the result is exact for any
    integer matrix.
    """
    n = len(a)
    if n == 0:
        return 1
    m = [row[:] for row in a]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            pivot = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if pivot is None:
                return 0
            m[k], m[pivot] = m[pivot], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


# ---------------------------------------------------------------------------
# Smith normal form over Z


@dataclass
class SmithDecomposition:
    """Unimodular u, v and diagonal d with d == u @ a @ v.

    The diagonal of d is nonnegative, each entry divides the next, and
    zero entries come last.
    """

    u: list
    d: list
    v: list

    def diagonal(self):
        return [self.d[i][i] for i in range(min(len(self.d), len(self.d[0]) if self.d else 0))]

    def invariant_factors(self):
        return [x for x in self.diagonal() if x != 0]


def _row_swap(b, u, i, j):
    b[i], b[j] = b[j], b[i]
    u[i], u[j] = u[j], u[i]


def _row_neg(b, u, i):
    b[i] = [-x for x in b[i]]
    u[i] = [-x for x in u[i]]


def _row_add(b, u, i, j, k):
    # row_i += k * row_j
    bi, bj = b[i], b[j]
    for c in range(len(bi)):
        bi[c] += k * bj[c]
    ui, uj = u[i], u[j]
    for c in range(len(ui)):
        ui[c] += k * uj[c]


def _col_swap(b, v, i, j):
    for row in b:
        row[i], row[j] = row[j], row[i]
    for row in v:
        row[i], row[j] = row[j], row[i]


def _col_add(b, v, i, j, k):
    # col_i += k * col_j
    for row in b:
        row[i] += k * row[j]
    for row in v:
        row[i] += k * row[j]


def _pick_pivot(b, t, m, n):
    """Smallest-magnitude nonzero entry of the trailing block.

    Ties break to the leftmost column, then the topmost row, which makes
    the whole reduction deterministic.
    """
    best = None
    for i in range(t, m):
        for j in range(t, n):
            x = b[i][j]
            if x != 0:
                key = (abs(x), j, i)
                if best is None or key < best[0]:
                    best = (key, i, j)
    return best


def smith_normal_form(a):
    """Diagonalize an integer matrix by unimodular row and column moves.

    Returns a SmithDecomposition carrying the full transforms, not just
    the diagonal, so callers can replay the same moves on companion data.
    """
    m = len(a)
    n = len(a[0]) if a else 0
    b = [list(map(int, row)) for row in a]
    u = identity(m)
    v = identity(n)
    t = 0
    while t < min(m, n):
        found = _pick_pivot(b, t, m, n)
        if found is None:
            break
        _, pi, pj = found
        if pi != t:
            _row_swap(b, u, pi, t)
        if pj != t:
            _col_swap(b, v, pj, t)
        if b[t][t] < 0:
            _row_neg(b, u, t)
        # clear row and column t; any nonzero remainder is strictly
        # smaller than the pivot, so the loop terminates
        dirty = False
        for i in range(t + 1, m):
            if b[i][t] != 0:
                q = b[i][t] // b[t][t]
                if q:
                    _row_add(b, u, i, t, -q)
                if b[i][t] != 0:
                    dirty = True
        for j in range(t + 1, n):
            if b[t][j] != 0:
                q = b[t][j] // b[t][t]
                if q:
                    _col_add(b, v, j, t, -q)
                if b[t][j] != 0:
                    dirty = True
        if dirty:
            continue
        # divisibility: fold any bad entry into row t and keep reducing
        bad = None
        for i in range(t + 1, m):
            for j in range(t + 1, n):
                if b[i][j] % b[t][t] != 0:
                    bad = i
                    break
            if bad is not None:
                break
        if bad is not None:
            _row_add(b, u, t, bad, 1)
            continue
        t += 1
    return SmithDecomposition(u=u, d=b, v=v)


def invariant_factors(a):
    return smith_normal_form(a).invariant_factors()


def prime_power_refine(d):
    """Split d >= 1 into its prime-power components, sorted ascending.

    prime_power_refine(12) == [3, 4]; units contribute nothing.
    """
    d = abs(d)
    if d in (0, 1):
        return []
    out = []
    p = 2
    while p * p <= d:
        if d % p == 0:
            q = 1
            while d % p == 0:
                q *= p
                d //= p
            out.append(q)
        p += 1
    if d > 1:
        out.append(d)
    return sorted(out)


# ---------------------------------------------------------------------------
# GF(2): basic linear algebra

def f2_mul(a, b):
    out = mat_mul(a, b)
    return [[x & 1 for x in row] for row in out]


def f2_add(a, b):
    return [[(x ^ y) & 1 for x, y in zip(r, s)] for r, s in zip(a, b)]


def f2_mat_vec(a, v):
    return [sum(r * w for r, w in zip(row, v)) & 1 for row in a]


def f2_rank(a):
    if not a:
        return 0
    m = [row[:] for row in a]
    rows = len(m)
    cols = len(m[0])
    rank = 0
    for j in range(cols):
        pivot = next((i for i in range(rank, rows) if m[i][j]), None)
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        for i in range(rows):
            if i != rank and m[i][j]:
                m[i] = [(x ^ y) & 1 for x, y in zip(m[i], m[rank])]
        rank += 1
    return rank


def f2_is_invertible(a):
    return len(a) == (len(a[0]) if a else 0) and f2_rank(a) == len(a)


def f2_solve(a, rhs_cols):
    """Solve a @ X = R over GF(2) for each column of R.

    a has shape (m, n); rhs_cols is a list of m-vectors.  Returns a list
    of n-vector solutions, or None if any column is unsolvable.
    """
    m = len(a)
    n = len(a[0]) if a else 0
    k = len(rhs_cols)
    aug = [[a[i][j] for j in range(n)] + [rhs_cols[c][i] for c in range(k)] for i in range(m)]
    pivots = []
    rank = 0
    for j in range(n):
        pivot = next((i for i in range(rank, m) if aug[i][j]), None)
        if pivot is None:
            continue
        aug[rank], aug[pivot] = aug[pivot], aug[rank]
        for i in range(m):
            if i != rank and aug[i][j]:
                aug[i] = [(x ^ y) & 1 for x, y in zip(aug[i], aug[rank])]
        pivots.append(j)
        rank += 1
    for i in range(rank, m):
        if any(aug[i][n:]):
            return None
    sols = []
    for c in range(k):
        x = [0] * n
        for r, j in enumerate(pivots):
            x[j] = aug[r][n + c]
        sols.append(x)
    return sols


def f2_kernel_basis(a):
    """Basis of the right kernel of a over GF(2)."""
    m = len(a)
    n = len(a[0]) if a else 0
    red = [row[:] for row in a]
    pivots = []
    rank = 0
    for j in range(n):
        pivot = next((i for i in range(rank, m) if red[i][j]), None)
        if pivot is None:
            continue
        red[rank], red[pivot] = red[pivot], red[rank]
        for i in range(m):
            if i != rank and red[i][j]:
                red[i] = [(x ^ y) & 1 for x, y in zip(red[i], red[rank])]
        pivots.append(j)
        rank += 1
    free = [j for j in range(n) if j not in pivots]
    basis = []
    for j in free:
        vec = [0] * n
        vec[j] = 1
        for r, pj in enumerate(pivots):
            vec[pj] = red[r][j]
        basis.append(vec)
    return basis


# ---------------------------------------------------------------------------
# GF(2) polynomials as bitmasks (bit i = coefficient of x^i)

def poly_degree(p):
    return p.bit_length() - 1


def poly_mul(p, q):
    out = 0
    while q:
        low = q & -q
        out ^= p << (low.bit_length() - 1)
        q ^= low
    return out


def poly_divmod(p, q):
    if q == 0:
        raise ZeroDivisionError
    quo = 0
    dq = poly_degree(q)
    while poly_degree(p) >= dq and p:
        shift = poly_degree(p) - dq
        quo ^= 1 << shift
        p ^= q << shift
    return quo, p


def poly_pow(p, k):
    out = 1
    for _ in range(k):
        out = poly_mul(out, p)
    return out


def _irreducibles_up_to(deg):
    sieve = []
    for d in range(1, deg + 1):
        for mask in range(1 << d, 1 << (d + 1)):
            if d > 1 and not (mask & 1):
                continue  # divisible by x
            if all(poly_divmod(mask, p)[1] != 0 for p in sieve if poly_degree(p) <= d // 2):
                sieve.append(mask)
    return sieve


def poly_factor(p):
    """Irreducible factorization over GF(2), as {irreducible: exponent}."""
    out = {}
    d = poly_degree(p)
    for irr in _irreducibles_up_to(max(d, 1)):
        while True:
            quo, rem = poly_divmod(p, irr)
            if rem != 0:
                break
            out[irr] = out.get(irr, 0) + 1
            p = quo
        if p == 1:
            break
    if p != 1:
        out[p] = out.get(p, 0) + 1
    return out


def poly_eval_matrix(p, a):
    """p(a) over GF(2) for a square matrix a."""
    n = len(a)
    out = None
    power = identity(n)
    while p:
        if p & 1:
            out = power if out is None else f2_add(out, power)
        p >>= 1
        if p:
            power = f2_mul(power, a)
    return out if out is not None else [[0] * n for _ in range(n)]


def f2_min_poly(a):
    """Minimal polynomial of a over GF(2), as a bitmask."""
    n = len(a)
    powers = [identity(n)]
    for _ in range(n):
        powers.append(f2_mul(powers[-1], a))
    # find the shortest monic dependency among I, a, a^2, ...
    for deg in range(1, n + 1):
        cols = [[powers[k][i][j] for k in range(deg)] for i in range(n) for j in range(n)]
        rhs = [[powers[deg][i][j]] for i in range(n) for j in range(n)]
        flat_rhs = [row[0] for row in rhs]
        sol = f2_solve(cols, [flat_rhs])
        if sol is not None:
            mask = 1 << deg
            for k, bit in enumerate(sol[0]):
                if bit:
                    mask ^= 1 << k
            return mask
    raise AssertionError("minimal polynomial of degree <= n must exist")


# ---------------------------------------------------------------------------
# GF(2) canonical form under similarity


@dataclass(frozen=True)
class F2Block:
    """One indecomposable similarity block.

    column holds the first-column bits; the rest of the block is the
    superdiagonal of ones.  column[-1] == 1 marks an invertible block,
    an all-zero column is a nilpotent Jordan block.
    """

    size: int
    column: tuple

    @property
    def invertible(self):
        return bool(self.column and self.column[-1])

    def matrix(self):
        out = [[0] * self.size for _ in range(self.size)]
        for i, bit in enumerate(self.column):
            out[i][0] = bit
        for j in range(1, self.size):
            out[j - 1][j] = 1
        return out


@dataclass
class F2CanonicalForm:
    blocks: tuple
    basis: list

    def matrix(self):
        n = sum(b.size for b in self.blocks)
        out = [[0] * n for _ in range(n)]
        at = 0
        for b in self.blocks:
            sub = b.matrix()
            for i in range(b.size):
                for j in range(b.size):
                    out[at + i][at + j] = sub[i][j]
            at += b.size
        return out


def _poly_to_column(p, size):
    """First-column bits (c_1 .. c_size) of the companion-style block of p."""
    # p = x^size + c_1 x^(size-1) + ... + c_size
    return tuple((p >> (size - i)) & 1 for i in range(1, size + 1))


def _cyclic_order(vectors):
    # basis (B^(m-1) v, ..., B v, v) realizes the block shape directly
    return list(reversed(vectors))


def f2_canonical_form(a):
    """Similarity canonical form over GF(2).

    Blocks are the companion-style blocks of the elementary divisors
    p(x)^k of a, sorted by (size, first-column bits); basis columns give
    the change of basis, with a @ basis == basis @ canonical.
    """
    n = len(a)
    if n == 0:
        return F2CanonicalForm(blocks=(), basis=[])
    minp = f2_min_poly(a)
    factors = poly_factor(minp)
    pieces = []  # (sort_key, block, list of global basis column-vectors)
    for p in sorted(factors):
        dp = poly_degree(p)
        # kernel staircase of p(a)^k fixes the multiset of exponents
        dims = [0]
        k = 1
        while True:
            pk = poly_eval_matrix(poly_pow(p, k), a)
            dims.append(n - f2_rank(pk))
            if dims[-1] == dims[-2]:
                dims.pop()
                break
            k += 1
        top = len(dims) - 1
        counts = {}
        for k in range(1, top + 1):
            at_least_k = (dims[k] - dims[k - 1]) // dp
            counts[k] = at_least_k
        mult = {k: counts[k] - counts.get(k + 1, 0) for k in range(1, top + 1)}
        # primary component and the restriction of a to it
        w_basis = f2_kernel_basis(poly_eval_matrix(poly_pow(p, top), a))
        w_cols = transpose(w_basis) if w_basis else []
        dim_w = len(w_basis)
        images = [f2_mat_vec(a, v) for v in w_basis]
        coords = f2_solve(w_cols, images)
        b_rest = transpose(coords)  # restriction of a in W coordinates
        gens = _cyclic_generators(b_rest, p, dim_w)
        expected = sorted((h for h, mul in mult.items() for _ in range(mul)), reverse=True)
        got = sorted((h for h, _ in gens), reverse=True)
        assert got == expected, "cyclic decomposition disagrees with kernel staircase"
        for height, vec in gens:
            size = height * dp
            chain = []
            cur = vec
            for _ in range(size):
                chain.append(cur)
                cur = f2_mat_vec(b_rest, cur)
            ordered = _cyclic_order(chain)
            # lift W coordinates back to the ambient space
            lifted = []
            for wv in ordered:
                amb = [0] * n
                for idx, bit in enumerate(wv):
                    if bit:
                        amb = [(x ^ y) & 1 for x, y in zip(amb, w_basis[idx])]
                lifted.append(amb)
            block = F2Block(size=size, column=_poly_to_column(poly_pow(p, height), size))
            pieces.append(((block.size, block.column), block, lifted))
    pieces.sort(key=lambda t: t[0])
    blocks = tuple(t[1] for t in pieces)
    cols = []
    for _, _, lifted in pieces:
        cols.extend(lifted)
    basis = transpose(cols) if cols else []
    return F2CanonicalForm(blocks=blocks, basis=basis)


def _p_height(b, p, v, span_cols):
    """Least j with p(b)^j v inside the span (or zero)."""
    n = len(v)
    j = 0
    cur = v
    pb = poly_eval_matrix(p, b)
    while True:
        if not any(cur):
            return j
        if span_cols and f2_solve(span_cols, [cur]) is not None:
            return j
        j += 1
        cur = f2_mat_vec(pb, cur)
        if j > n + 1:
            raise AssertionError("height computation ran away")


def _cyclic_generators(b, p, dim):
    """Cyclic decomposition of a p-primary operator b on GF(2)^dim.

    Returns [(height, generator vector)] with heights nonincreasing.
    Standard construction: take a vector of maximal height modulo the
    span already produced, then correct it inside that span so its
    honest height matches, which forces a direct-sum split.
    """
    if dim == 0:
        return []
    pb = poly_eval_matrix(p, b)
    basis_vecs = [[1 if i == j else 0 for j in range(dim)] for i in range(dim)]
    gens = []
    span = []  # all cyclic chain vectors produced so far
    covered = 0
    while covered < dim:
        span_cols = transpose(span) if span else []
        best = None
        for v in basis_vecs:
            if span_cols and f2_solve(span_cols, [v]) is not None:
                continue
            if not span_cols and not any(v):
                continue
            h = _p_height(b, p, v, span_cols)
            if h and (best is None or h > best[0]):
                best = (h, v)
        assert best is not None, "no generator found outside current span"
        h, v = best
        if span:
            # align the representative: solve p(b)^h v = p(b)^h z over the spanatoms
            target = v
            cur = v
            for _ in range(h):
                cur = f2_mat_vec(pb, cur)
            if any(cur):
                images = [None] * len(span)
                for i, z in enumerate(span):
                    w = z
                    for _ in range(h):
                        w = f2_mat_vec(pb, w)
                    images[i] = w
                sol = f2_solve(transpose(images), [cur])
                assert sol is not None, "span is not pure in its primary component"
                for i, bit in enumerate(sol[0]):
                    if bit:
                        target = [(x ^ y) & 1 for x, y in zip(target, span[i])]
                v = target
        dp = poly_degree(p)
        chain = []
        cur = v
        for _ in range(h * dp):
            chain.append(cur)
            cur = f2_mat_vec(b, cur)
        gens.append((h, v))
        span.extend(chain)
        covered += h * dp
    gens.sort(key=lambda t: -t[0])
    return gens


def f2_similar(a, b):
    """Whether two GF(2) matrices are conjugate under some invertible matrix."""
    if len(a) != len(b):
        return False
    return f2_canonical_form(a).blocks == f2_canonical_form(b).blocks


def gl2_enumerate(n):
    """All invertible n x n matrices over GF(2).  Only sane for n <= 4."""
    out = []
    for bits in range(1 << (n * n)):
        m = [[(bits >> (i * n + j)) & 1 for j in range(n)] for i in range(n)]
        if f2_rank(m) == n:
            out.append(m)
    return out
