"""Exact sparse linear algebra over the rationals and over prime fields.

Scalars are plain Python values: ``int``/``Fraction`` over the rationals,
``int`` in ``[0, p)`` over a prime field.  A ``Field`` object supplies the
arithmetic so the same elimination code runs over either field.  Vectors are
sparse dicts ``{index: value}`` with no stored zero; matrices are row-major
lists of such dicts.  Everything is exact: no floating point anywhere.

Subspaces are stored as reduced-row-echelon bases, which are unique, so two
equal subspaces always have identical representations and equality is a
plain comparison.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import InputError, InternalInvariantError


# ---------------------------------------------------------------------------
# fields


class Field:
    """Arithmetic for one exact field; instances are stateless and shared."""

    char = 0

    def of(self, v):
        raise NotImplementedError

    def add(self, a, b):
        raise NotImplementedError

    def sub(self, a, b):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def neg(self, a):
        raise NotImplementedError

    def inv(self, a):
        raise NotImplementedError

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def row_addmul(self, dst, src, c):
        """dst += c * src, in place, dropping entries that become zero."""
        raise NotImplementedError


class RationalField(Field):
    """The rationals; elements are ints or Fractions, mixed freely."""

    char = 0
    zero = 0
    one = 1

    def of(self, v):
        if isinstance(v, (int, Fraction)):
            return v
        if isinstance(v, str):
            return Fraction(v)
        raise InputError(f"cannot coerce {v!r} into the rationals")

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return Fraction(1, 1) / a

    def div(self, a, b):
        return Fraction(a, 1) / b if isinstance(a, int) and isinstance(b, int) else a / b

    def row_addmul(self, dst, src, c):
        if c == 0:
            return
        get = dst.get
        for k, v in src.items():
            nv = get(k, 0) + c * v
            if nv == 0:
                dst.pop(k, None)
            else:
                dst[k] = nv

    def __repr__(self):
        return "QQ"


class PrimeField(Field):
    """Integers modulo a prime p < 2**31; elements are ints in [0, p)."""

    def __init__(self, p):
        if p < 2 or p >= 2**31:
            raise InputError(f"prime field order {p} out of the supported range")
        if not _is_prime(p):
            raise InputError(f"{p} is not prime")
        self.p = p
        self.char = p
        self.zero = 0
        self.one = 1 % p

    def of(self, v):
        p = self.p
        if isinstance(v, int):
            return v % p
        if isinstance(v, Fraction):
            den = v.denominator % p
            if den == 0:
                raise InputError(f"denominator of {v} vanishes modulo {p}")
            return (v.numerator % p) * pow(den, -1, p) % p
        if isinstance(v, str):
            return self.of(Fraction(v))
        raise InputError(f"cannot coerce {v!r} into GF({p})")

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return a * b % self.p

    def neg(self, a):
        return -a % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, -1, self.p)

    def row_addmul(self, dst, src, c):
        p = self.p
        c %= p
        if c == 0:
            return
        get = dst.get
        for k, v in src.items():
            nv = (get(k, 0) + c * v) % p
            if nv:
                dst[k] = nv
            else:
                dst.pop(k, None)

    def __repr__(self):
        return f"GF({self.p})"


def _is_prime(n):
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


QQ = RationalField()

_gf_cache = {}


def GF(p):
    """The prime field of order p (cached per order)."""
    f = _gf_cache.get(p)
    if f is None:
        f = _gf_cache[p] = PrimeField(p)
    return f


# ---------------------------------------------------------------------------
# sparse vectors (plain dicts index -> nonzero value)


def vec_add(field, u, v):
    out = dict(u)
    field.row_addmul(out, v, field.one)
    return out


def vec_sub(field, u, v):
    out = dict(u)
    field.row_addmul(out, v, field.neg(field.one))
    return out


def vec_scale(field, u, c):
    if c == field.zero:
        return {}
    return {k: field.mul(v, c) for k, v in u.items()}


# ---------------------------------------------------------------------------
# matrices


class Matrix:
    """Sparse exact matrix; ``rows[r]`` maps column index to nonzero entry."""

    __slots__ = ("field", "nrows", "ncols", "rows")

    def __init__(self, field, nrows, ncols, rows=None):
        self.field = field
        self.nrows = nrows
        self.ncols = ncols
        if rows is None:
            rows = [{} for _ in range(nrows)]
        if len(rows) != nrows:
            raise InputError("row count mismatch")
        self.rows = rows

    @classmethod
    def from_entries(cls, field, nrows, ncols, entries):
        """Build from an iterable of (row, col, value); repeats accumulate."""
        rows = [{} for _ in range(nrows)]
        for r, c, v in entries:
            if not (0 <= r < nrows and 0 <= c < ncols):
                raise InputError(f"matrix index ({r},{c}) out of range")
            v = field.of(v)
            row = rows[r]
            nv = field.add(row.get(c, field.zero), v)
            if nv == field.zero:
                row.pop(c, None)
            else:
                row[c] = nv
        return cls(field, nrows, ncols, rows)

    @classmethod
    def from_dense(cls, field, dense):
        nrows = len(dense)
        ncols = len(dense[0]) if nrows else 0
        rows = []
        for dr in dense:
            if len(dr) != ncols:
                raise InputError("ragged dense matrix")
            row = {}
            for c, v in enumerate(dr):
                v = field.of(v)
                if v != field.zero:
                    row[c] = v
            rows.append(row)
        return cls(field, nrows, ncols, rows)

    @classmethod
    def identity(cls, field, n):
        return cls(field, n, n, [{i: field.one} for i in range(n)])

    def entry(self, r, c):
        return self.rows[r].get(c, self.field.zero)

    def nnz(self):
        return sum(len(r) for r in self.rows)

    def copy(self):
        return Matrix(self.field, self.nrows, self.ncols, [dict(r) for r in self.rows])

    def transpose(self):
        rows = [{} for _ in range(self.ncols)]
        for r, row in enumerate(self.rows):
            for c, v in row.items():
                rows[c][r] = v
        return Matrix(self.field, self.ncols, self.nrows, rows)

    def apply(self, vec):
        """Matrix times sparse column vector (dict over columns)."""
        f = self.field
        out = {}
        for r, row in enumerate(self.rows):
            if len(row) > len(vec):
                acc = f.zero
                for c, x in vec.items():
                    m = row.get(c)
                    if m is not None:
                        acc = f.add(acc, f.mul(m, x))
            else:
                acc = f.zero
                for c, m in row.items():
                    x = vec.get(c)
                    if x is not None:
                        acc = f.add(acc, f.mul(m, x))
            if acc != f.zero:
                out[r] = acc
        return out

    def matmul(self, other):
        if self.ncols != other.nrows:
            raise InputError("matmul shape mismatch")
        f = self.field
        rows = []
        for row in self.rows:
            acc = {}
            for c, v in row.items():
                f.row_addmul(acc, other.rows[c], v)
            rows.append(acc)
        return Matrix(f, self.nrows, other.ncols, rows)

    def row_select(self, indices):
        """Submatrix keeping the given rows, reindexed to 0..len-1."""
        return Matrix(self.field, len(indices), self.ncols,
                      [dict(self.rows[i]) for i in indices])

    def col_select(self, indices):
        """Submatrix keeping the given columns, reindexed to 0..len-1."""
        pos = {c: k for k, c in enumerate(indices)}
        rows = []
        for row in self.rows:
            rows.append({pos[c]: v for c, v in row.items() if c in pos})
        return Matrix(self.field, self.nrows, len(indices), rows)

    def to_dense(self):
        z = self.field.zero
        return [[row.get(c, z) for c in range(self.ncols)] for row in self.rows]

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return (self.field is other.field and self.nrows == other.nrows
                and self.ncols == other.ncols and self.rows == other.rows)

    def __repr__(self):
        return f"Matrix({self.field}, {self.nrows}x{self.ncols}, nnz={self.nnz()})"


# ---------------------------------------------------------------------------
# elimination cores


def _echelon(field, rowdicts):
    """Destructive forward elimination; returns {lead_col: row} unnormalized.

    Rows are processed sparsest first; the span of the result equals the span
    of the input, and leading columns are pairwise distinct.
    """
    pivots = {}
    neg = field.neg
    div = field.div
    addmul = field.row_addmul
    for r in sorted(rowdicts, key=len):
        while r:
            c = min(r)
            p = pivots.get(c)
            if p is None:
                pivots[c] = r
                break
            addmul(r, p, neg(div(r[c], p[c])))
    return pivots


def matrix_rank(m):
    """Rank, by sparse forward elimination only (no canonical form built)."""
    return len(_echelon(m.field, [dict(r) for r in m.rows if r]))


def graded_rank(m, row_keys):
    """Rank of a matrix whose every row touches columns of a single grade.

    ``row_keys[r]`` is the grade of row r; rows of different grades use
    disjoint column sets (the caller guarantees this), so the rank is the
    sum of the per-grade ranks and each elimination stays small.
    """
    groups = {}
    for r, row in enumerate(m.rows):
        if row:
            groups.setdefault(row_keys[r], []).append(dict(row))
    return sum(len(_echelon(m.field, rows)) for rows in groups.values())


def _canonical_rows(field, rowdicts):
    """Full RREF of the given span: normalized, back-substituted, sorted.

    Returns (rows, pivots) with rows sorted by strictly increasing leading
    column and pivot entries equal to one.
    """
    pivots = _echelon(field, rowdicts)
    cols = sorted(pivots)
    neg = field.neg
    addmul = field.row_addmul
    for c in reversed(cols):
        row = pivots[c]
        lead = row[c]
        if lead != field.one:
            inv = field.inv(lead)
            for k in list(row):
                row[k] = field.mul(row[k], inv)
        for c2 in sorted(k for k in row if k != c and k in pivots):
            addmul(row, pivots[c2], neg(row[c2]))
    return [pivots[c] for c in cols], cols


def rref(m):
    """Reduced row-echelon form of ``m`` (same shape) and its pivot columns."""
    rows, pivots = _canonical_rows(m.field, [dict(r) for r in m.rows if r])
    rows = rows + [{} for _ in range(m.nrows - len(rows))]
    return Matrix(m.field, m.nrows, m.ncols, rows), pivots


# ---------------------------------------------------------------------------
# subspaces


class Subspace:
    """A subspace of k^ambient_dim held as its unique RREF basis.

    ``rows`` are the basis vectors (sparse dicts) with strictly increasing
    pivot columns and pivot entries one; the representation is canonical, so
    ``==`` decides subspace equality.
    """

    __slots__ = ("field", "ambient_dim", "rows", "pivots")

    def __init__(self, field, ambient_dim, rows, pivots):
        self.field = field
        self.ambient_dim = ambient_dim
        self.rows = rows
        self.pivots = pivots

    @classmethod
    def from_vectors(cls, field, ambient_dim, vectors):
        work = []
        for v in vectors:
            if v and max(v) >= ambient_dim:
                raise InputError("vector index out of ambient range")
            if v:
                work.append(dict(v))
        rows, pivots = _canonical_rows(field, work)
        return cls(field, ambient_dim, rows, pivots)

    @classmethod
    def zero(cls, field, ambient_dim):
        return cls(field, ambient_dim, [], [])

    @classmethod
    def full(cls, field, ambient_dim):
        rows = [{i: field.one} for i in range(ambient_dim)]
        return cls(field, ambient_dim, rows, list(range(ambient_dim)))

    @property
    def dim(self):
        return len(self.rows)

    def basis_matrix(self):
        """Matrix whose columns are the basis vectors (ambient_dim x dim)."""
        rows = [{} for _ in range(self.ambient_dim)]
        for j, v in enumerate(self.rows):
            for i, val in v.items():
                rows[i][j] = val
        return Matrix(self.field, self.ambient_dim, self.dim, rows)

    def reduce(self, vec):
        """Residual of ``vec`` after subtracting its pivot components."""
        f = self.field
        out = dict(vec)
        for pc, row in zip(self.pivots, self.rows):
            x = out.get(pc)
            if x is not None:
                f.row_addmul(out, row, f.neg(x))
        return out

    def contains_vector(self, vec):
        return not self.reduce(vec)

    def contains(self, other):
        if other.ambient_dim != self.ambient_dim:
            raise InputError("ambient dimension mismatch")
        return all(self.contains_vector(v) for v in other.rows)

    def check_matrix(self):
        """Matrix K with kernel exactly this subspace ((ambient-dim) rows).

        Row for each non-pivot coordinate c: x[c] - sum_i basis_i[c]*x[pivot_i].
        """
        f = self.field
        pivset = set(self.pivots)
        rows = []
        for c in range(self.ambient_dim):
            if c in pivset:
                continue
            row = {c: f.one}
            for pc, b in zip(self.pivots, self.rows):
                v = b.get(c)
                if v is not None:
                    row[pc] = f.neg(v)
            rows.append(row)
        return Matrix(f, len(rows), self.ambient_dim, rows)

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return (self.field is other.field and self.ambient_dim == other.ambient_dim
                and self.rows == other.rows)

    def __repr__(self):
        return f"Subspace(dim {self.dim} of {self.ambient_dim} over {self.field})"


def kernel(m):
    """Kernel of ``m`` as a canonical Subspace of the column space."""
    f = m.field
    red, pivots = _canonical_rows(f, [dict(r) for r in m.rows if r])
    pivset = set(pivots)
    vectors = []
    for c in range(m.ncols):
        if c in pivset:
            continue
        v = {c: f.one}
        for pc, row in zip(pivots, red):
            val = row.get(c)
            if val is not None:
                v[pc] = f.neg(val)
        vectors.append(v)
    return Subspace.from_vectors(f, m.ncols, vectors)


def image(m):
    """Column space of ``m`` as a canonical Subspace of the row space."""
    cols = [{} for _ in range(m.ncols)]
    for r, row in enumerate(m.rows):
        for c, v in row.items():
            cols[c][r] = v
    return Subspace.from_vectors(m.field, m.nrows, cols)


def subspace_sum(u, v):
    if u.ambient_dim != v.ambient_dim:
        raise InputError("ambient dimension mismatch in subspace sum")
    return Subspace.from_vectors(u.field, u.ambient_dim, list(u.rows) + list(v.rows))


def subspace_intersect(u, v):
    if u.ambient_dim != v.ambient_dim:
        raise InputError("ambient dimension mismatch in subspace intersection")
    ku = u.check_matrix()
    kv = v.check_matrix()
    stacked = Matrix(u.field, ku.nrows + kv.nrows, u.ambient_dim,
                     [dict(r) for r in ku.rows] + [dict(r) for r in kv.rows])
    return kernel(stacked)


def preimage(m, v):
    """{x : m x in v} as a canonical Subspace of the domain of ``m``."""
    if v.ambient_dim != m.nrows:
        raise InputError("preimage: subspace does not live in the codomain")
    k = v.check_matrix()
    return kernel(k.matmul(m))


def quotient_dim(u, v):
    """dim(u/v); requires v to be contained in u."""
    if v.ambient_dim != u.ambient_dim:
        raise InputError("ambient dimension mismatch in quotient")
    if not u.contains(v):
        raise InternalInvariantError(
            "quotient_dim called with a subspace that is not contained in the "
            "ambient one (caller logic error)")
    return u.dim - v.dim


# ---------------------------------------------------------------------------
# incremental solver


class EchelonSolver:
    """Incremental elimination that remembers how each pivot was formed.

    Vectors are fed with tags; ``express`` then writes any vector of the
    accumulated span as a tagged linear combination of the fed vectors.
    Used for representative lifting and class-coordinate solving.
    """

    def __init__(self, field):
        self.field = field
        self.pivots = {}  # lead col -> (rowdict, combodict)

    def _reduce(self, vec, combo):
        f = self.field
        v = dict(vec)
        while v:
            c = min(v)
            hit = self.pivots.get(c)
            if hit is None:
                return v, combo, c
            p, pcombo = hit
            factor = f.neg(f.div(v[c], p[c]))
            f.row_addmul(v, p, factor)
            f.row_addmul(combo, pcombo, factor)
        return v, combo, None

    def add(self, vec, tag):
        """Feed a vector; returns True if it enlarged the span."""
        v, combo, lead = self._reduce(vec, {tag: self.field.one})
        if lead is None:
            return False
        self.pivots[lead] = (v, combo)
        return True

    def express(self, vec):
        """Coefficients {tag: coeff} with vec = sum coeff * fed[tag], or None."""
        f = self.field
        residual, combo, lead = self._reduce(vec, {})
        if lead is not None:
            return None
        return {t: f.neg(c) for t, c in combo.items()}

    @property
    def rank(self):
        return len(self.pivots)
