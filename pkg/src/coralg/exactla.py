"""Exact sparse linear algebra over Q and F_p.

Conventions, binding for the whole package:

* Scalars over Q are ``gmpy2.mpq`` values (``fractions.Fraction`` when gmpy2
  is unavailable); scalars over F_p are plain ints in ``[0, p)``.  All three
  are falsy exactly when zero, which the sparse kernels rely on.
* A matrix represents a linear map; column ``j`` is the image of the j-th
  basis vector.  Vectors are dense python lists.
* Matrices store only nonzero entries, one dict per row.
* Subspaces are always presented by their unique reduced row echelon basis
  (pivot columns ascending), so subspace equality is basis equality and
  canonical coordinates are plain lists of scalars.
* Quotients use the non-pivot ("free") coordinates of the rref of the
  relation span; the section picks the representative with zero pivot
  coordinates.
* Scalars serialize as strings: ``"a/b"`` for reduced rationals with b > 1,
  ``"n"`` for integers (reduced mod p over a prime field).

Everything here is immutable after construction and all operations are pure.
"""

from .errors import DimensionMismatch, MemoryGuard

try:
    from gmpy2 import mpq as _QQ_SCALAR
except ImportError:  # pragma: no cover - gmpy2 is a soft dependency
    from fractions import Fraction as _QQ_SCALAR

#: Hard guard on any ambient dimension this module is asked to materialize.
DIMENSION_GUARD = 2_000_000


def _is_prime(p):
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


class Field:
    """A FieldSpec: the rationals, or a prime field F_p with 2 <= p < 2**31.

    Provides the scalar operations used by every kernel in the package.
    """

    def __init__(self, kind, p=None):
        if kind not in ("rationals", "prime-field"):
            raise ValueError(f"unknown field kind {kind!r}")
        if kind == "prime-field":
            if p is None or not (2 <= p < 2**31) or not _is_prime(p):
                raise ValueError(f"modulus {p!r} is not a prime in [2, 2^31)")
        elif p is not None:
            raise ValueError("rationals take no modulus")
        self.kind = kind
        self.p = p
        if kind == "rationals":
            self.zero = _QQ_SCALAR(0)
            self.one = _QQ_SCALAR(1)
        else:
            self.zero = 0
            self.one = 1 % p

    # -- scalar ops ---------------------------------------------------
    def add(self, a, b):
        return a + b if self.p is None else (a + b) % self.p

    def sub(self, a, b):
        return a - b if self.p is None else (a - b) % self.p

    def mul(self, a, b):
        return a * b if self.p is None else (a * b) % self.p

    def neg(self, a):
        return -a if self.p is None else (-a) % self.p

    def inv(self, a):
        if not a:
            raise ZeroDivisionError("inverse of zero")
        if self.p is None:
            return 1 / a
        return pow(a, self.p - 2, self.p)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def from_int(self, n):
        return _QQ_SCALAR(n) if self.p is None else n % self.p

    def parse(self, s):
        """Parse ``"a/b"`` or ``"n"`` (ints also accepted directly)."""
        if isinstance(s, int):
            return self.from_int(s)
        s = s.strip()
        if self.p is None:
            return _QQ_SCALAR(s)
        if "/" in s:
            a, b = s.split("/")
            return self.div(self.from_int(int(a)), self.from_int(int(b)))
        return self.from_int(int(s))

    def fmt(self, a):
        return str(a)

    def __eq__(self, other):
        return isinstance(other, Field) and self.kind == other.kind and self.p == other.p

    def __hash__(self):
        return hash((self.kind, self.p))

    def __repr__(self):
        return "QQ" if self.p is None else f"GF({self.p})"


QQ = Field("rationals")


def GF(p):
    return Field("prime-field", p)


def guard_dim(n, what="space"):
    if n > DIMENSION_GUARD:
        raise MemoryGuard(f"{what} would have dimension {n} > {DIMENSION_GUARD}")
    return n


class Mat:
    """Sparse exact matrix; row dicts hold only nonzero entries."""

    __slots__ = ("field", "nrows", "ncols", "rows")

    def __init__(self, field, nrows, ncols, rows=None):
        self.field = field
        self.nrows = nrows
        self.ncols = ncols
        self.rows = rows if rows is not None else [{} for _ in range(nrows)]

    # -- constructors ---------------------------------------------------
    @classmethod
    def zeros(cls, field, nrows, ncols):
        return cls(field, nrows, ncols)

    @classmethod
    def identity(cls, field, n):
        one = field.one
        return cls(field, n, n, [{i: one} for i in range(n)])

    @classmethod
    def from_rows(cls, field, data, ncols=None):
        """Dense list-of-lists (or list of dicts) -> Mat."""
        nrows = len(data)
        if ncols is None:
            if nrows == 0:
                raise DimensionMismatch("cannot infer ncols from empty data")
            ncols = len(data[0])
        rows = []
        for r in data:
            if isinstance(r, dict):
                rows.append({j: v for j, v in r.items() if v})
            else:
                if len(r) != ncols:
                    raise DimensionMismatch("ragged rows")
                rows.append({j: v for j, v in enumerate(r) if v})
        return cls(field, nrows, ncols, rows)

    @classmethod
    def from_cols(cls, field, cols, nrows):
        m = cls(field, nrows, len(cols))
        for j, c in enumerate(cols):
            for i, v in enumerate(c):
                if v:
                    m.rows[i][j] = v
        return m

    @classmethod
    def col_vector(cls, field, vec):
        return cls.from_cols(field, [vec], len(vec))

    # -- access ---------------------------------------------------------
    def get(self, i, j):
        return self.rows[i].get(j, self.field.zero)

    def col(self, j):
        """Column j as a dense list."""
        z = self.field.zero
        return [r.get(j, z) for r in self.rows]

    def row_list(self, i):
        z = self.field.zero
        r = self.rows[i]
        return [r.get(j, z) for j in range(self.ncols)]

    def to_lists(self):
        return [self.row_list(i) for i in range(self.nrows)]

    def nnz(self):
        return sum(len(r) for r in self.rows)

    def is_zero(self):
        return all(not r for r in self.rows)

    # -- algebra ----------------------------------------------------------
    def _check_same_shape(self, other):
        if self.nrows != other.nrows or self.ncols != other.ncols:
            raise DimensionMismatch(f"{self.shape} vs {other.shape}")

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def __add__(self, other):
        self._check_same_shape(other)
        add = self.field.add
        rows = []
        for ra, rb in zip(self.rows, other.rows):
            r = dict(ra)
            for j, v in rb.items():
                w = add(r.get(j, self.field.zero), v)
                if w:
                    r[j] = w
                elif j in r:
                    del r[j]
            rows.append(r)
        return Mat(self.field, self.nrows, self.ncols, rows)

    def __sub__(self, other):
        return self + other.scale(self.field.neg(self.field.one))

    def __neg__(self):
        return self.scale(self.field.neg(self.field.one))

    def scale(self, c):
        if not c:
            return Mat(self.field, self.nrows, self.ncols)
        mul = self.field.mul
        rows = [{j: mul(c, v) for j, v in r.items()} for r in self.rows]
        if self.field.p is not None:
            rows = [{j: v for j, v in r.items() if v} for r in rows]
        return Mat(self.field, self.nrows, self.ncols, rows)

    def __matmul__(self, other):
        if self.ncols != other.nrows:
            raise DimensionMismatch(f"{self.shape} @ {other.shape}")
        add, mul = self.field.add, self.field.mul
        zero = self.field.zero
        orows = other.rows
        rows = []
        for ra in self.rows:
            acc = {}
            for k, a in ra.items():
                for j, b in orows[k].items():
                    w = add(acc.get(j, zero), mul(a, b))
                    if w:
                        acc[j] = w
                    elif j in acc:
                        del acc[j]
            rows.append(acc)
        return Mat(self.field, self.nrows, other.ncols, rows)

    def apply(self, vec):
        """Matrix times dense column vector -> dense list."""
        if len(vec) != self.ncols:
            raise DimensionMismatch(f"{self.shape} applied to length {len(vec)}")
        add, mul = self.field.add, self.field.mul
        zero = self.field.zero
        out = []
        for r in self.rows:
            s = zero
            for j, v in r.items():
                x = vec[j]
                if x:
                    s = add(s, mul(v, x))
            out.append(s)
        return out

    def transpose(self):
        rows = [{} for _ in range(self.ncols)]
        for i, r in enumerate(self.rows):
            for j, v in r.items():
                rows[j][i] = v
        return Mat(self.field, self.ncols, self.nrows, rows)

    def kron(self, other):
        """Kronecker product; index (i1,i2) -> i1*other.nrows + i2, same for columns."""
        guard_dim(self.nrows * other.nrows, "kron")
        mul = self.field.mul
        rows = [{} for _ in range(self.nrows * other.nrows)]
        on = other.ncols
        for i1, r1 in enumerate(self.rows):
            if not r1:
                continue
            base_i = i1 * other.nrows
            for i2, r2 in enumerate(other.rows):
                if not r2:
                    continue
                tgt = rows[base_i + i2]
                for j1, v1 in r1.items():
                    bj = j1 * on
                    for j2, v2 in r2.items():
                        w = mul(v1, v2)
                        if w:
                            tgt[bj + j2] = w
        return Mat(self.field, self.nrows * other.nrows, self.ncols * other.ncols, rows)

    def hstack(self, other):
        if self.nrows != other.nrows:
            raise DimensionMismatch("hstack row mismatch")
        off = self.ncols
        rows = []
        for ra, rb in zip(self.rows, other.rows):
            r = dict(ra)
            for j, v in rb.items():
                r[j + off] = v
            rows.append(r)
        return Mat(self.field, self.nrows, self.ncols + other.ncols, rows)

    def vstack(self, other):
        if self.ncols != other.ncols:
            raise DimensionMismatch("vstack col mismatch")
        return Mat(self.field, self.nrows + other.nrows, self.ncols,
                   [dict(r) for r in self.rows] + [dict(r) for r in other.rows])

    def __eq__(self, other):
        return (isinstance(other, Mat) and self.shape == other.shape
                and self.field == other.field and self.rows == other.rows)

    def __hash__(self):
        return id(self)

    def __repr__(self):
        if self.nrows * self.ncols <= 64:
            body = "; ".join(" ".join(self.field.fmt(v) for v in self.row_list(i))
                             for i in range(self.nrows))
            return f"Mat({self.nrows}x{self.ncols}: {body})"
        return f"Mat({self.nrows}x{self.ncols}, nnz={self.nnz()})"


def kron_vec(field, u, v):
    """Kronecker product of dense vectors, leftmost factor slowest."""
    mul = field.mul
    zero = field.zero
    out = [zero] * (len(u) * len(v))
    n = len(v)
    for i, a in enumerate(u):
        if not a:
            continue
        base = i * n
        for j, b in enumerate(v):
            if b:
                out[base + j] = mul(a, b)
    return out


class _Echelon:
    """Incremental row echelon form; ``close()`` yields the canonical rref.

    Rows are dicts; every inserted row is first reduced against the current
    pivots.  Optionally tracks an augmented part (same reduction applied),
    used for particular solutions and inverses.
    """

    def __init__(self, field, ncols, aug_cols=0):
        self.field = field
        self.ncols = ncols
        self.aug_cols = aug_cols
        self.rows = []          # echelon rows, pivot normalized to 1
        self.augs = []
        self.pivot_of_row = []  # pivot column per row
        self.pivot_rows = {}    # pivot column -> row index
        self.dead_augs = []     # aug parts of rows that reduced to zero

    def _reduce(self, row, aug):
        field = self.field
        sub, mul = field.sub, field.mul
        zero = field.zero
        while True:
            hit = None
            for j in row:
                if j in self.pivot_rows:
                    hit = j
                    break
            if hit is None:
                return row, aug
            ri = self.pivot_rows[hit]
            c = row[hit]
            prow = self.rows[ri]
            for j, v in prow.items():
                w = sub(row.get(j, zero), mul(c, v))
                if w:
                    row[j] = w
                elif j in row:
                    del row[j]
            if aug is not None:
                paug = self.augs[ri]
                for j, v in paug.items():
                    w = sub(aug.get(j, zero), mul(c, v))
                    if w:
                        aug[j] = w
                    elif j in aug:
                        del aug[j]

    def add(self, row, aug=None):
        """Insert a row (dict, consumed); returns True if the rank grew."""
        row = {j: v for j, v in row.items() if v}
        if aug is None and self.aug_cols:
            aug = {}
        self._reduce(row, aug)
        if not row:
            if self.aug_cols:
                self.dead_augs.append(aug)
            return False
        piv = min(row)
        c = self.field.inv(row[piv])
        mul = self.field.mul
        row = {j: mul(c, v) for j, v in row.items()}
        row[piv] = self.field.one
        if aug is not None:
            aug = {j: mul(c, v) for j, v in aug.items()}
        self.rows.append(row)
        self.augs.append(aug if aug is not None else {})
        self.pivot_of_row.append(piv)
        self.pivot_rows[piv] = len(self.rows) - 1
        return True

    @property
    def rank(self):
        return len(self.rows)

    def close(self):
        """Back-eliminate to the unique rref; sort rows by pivot column."""
        order = sorted(range(len(self.rows)), key=lambda i: self.pivot_of_row[i])
        rows = [self.rows[i] for i in order]
        augs = [self.augs[i] for i in order]
        pivots = [self.pivot_of_row[i] for i in order]
        field = self.field
        sub, mul = field.sub, field.mul
        zero = field.zero
        for i in range(len(rows) - 1, -1, -1):
            row, aug = rows[i], augs[i]
            for k in range(i + 1, len(rows)):
                pk = pivots[k]
                c = row.get(pk)
                if not c:
                    continue
                for j, v in rows[k].items():
                    w = sub(row.get(j, zero), mul(c, v))
                    if w:
                        row[j] = w
                    elif j in row:
                        del row[j]
                for j, v in augs[k].items():
                    w = sub(aug.get(j, zero), mul(c, v))
                    if w:
                        aug[j] = w
                    elif j in aug:
                        del aug[j]
        self.rows, self.augs, self.pivot_of_row = rows, augs, pivots
        self.pivot_rows = {p: i for i, p in enumerate(pivots)}
        return self


class SubspaceBasis:
    """A subspace given by its canonical rref basis (rows of ``mat``)."""

    def __init__(self, field, ambient_dim, mat, pivot_cols):
        self.field = field
        self.ambient_dim = ambient_dim
        self.mat = mat
        self.pivot_cols = list(pivot_cols)

    @classmethod
    def from_vectors(cls, field, ambient_dim, vectors):
        ech = _Echelon(field, ambient_dim)
        for v in vectors:
            if isinstance(v, dict):
                row = dict(v)
            else:
                if len(v) != ambient_dim:
                    raise DimensionMismatch("vector length != ambient dim")
                row = {j: x for j, x in enumerate(v) if x}
            ech.add(row)
        ech.close()
        mat = Mat(field, ech.rank, ambient_dim, [dict(r) for r in ech.rows])
        return cls(field, ambient_dim, mat, ech.pivot_of_row)

    @classmethod
    def zero(cls, field, ambient_dim):
        return cls(field, ambient_dim, Mat(field, 0, ambient_dim), [])

    @classmethod
    def full(cls, field, ambient_dim):
        return cls(field, ambient_dim, Mat.identity(field, ambient_dim),
                   list(range(ambient_dim)))

    @property
    def dim(self):
        return self.mat.nrows

    def membership(self, v):
        """Coordinates of v in this basis, or None if v is outside."""
        if len(v) != self.ambient_dim:
            raise DimensionMismatch("vector length != ambient dim")
        field = self.field
        sub, mul = field.sub, field.mul
        residue = {j: x for j, x in enumerate(v) if x}
        coords = [field.zero] * self.dim
        for i, piv in enumerate(self.pivot_cols):
            c = residue.get(piv)
            if not c:
                continue
            coords[i] = c
            for j, w in self.mat.rows[i].items():
                x = sub(residue.get(j, field.zero), mul(c, w))
                if x:
                    residue[j] = x
                elif j in residue:
                    del residue[j]
        if residue:
            return None
        return coords

    def contains_vector(self, v):
        return self.membership(v) is not None

    def contains(self, other):
        if other.ambient_dim != self.ambient_dim:
            raise DimensionMismatch("ambient dims differ")
        return all(self.membership(other.mat.row_list(i)) is not None
                   for i in range(other.dim))

    def sum_with(self, other):
        if other.ambient_dim != self.ambient_dim:
            raise DimensionMismatch("ambient dims differ")
        vecs = [dict(r) for r in self.mat.rows] + [dict(r) for r in other.mat.rows]
        return SubspaceBasis.from_vectors(self.field, self.ambient_dim, vecs)

    def intersect(self, other):
        """Zassenhaus: rref of [[A A],[B 0]]; zero-left rows span A cap B."""
        if other.ambient_dim != self.ambient_dim:
            raise DimensionMismatch("ambient dims differ")
        n = self.ambient_dim
        ech = _Echelon(self.field, 2 * n)
        for r in self.mat.rows:
            row = dict(r)
            row.update({j + n: v for j, v in r.items()})
            ech.add(row)
        for r in other.mat.rows:
            ech.add(dict(r))
        ech.close()
        vecs = []
        for row in ech.rows:
            if min(row) >= n:
                vecs.append({j - n: v for j, v in row.items()})
        return SubspaceBasis.from_vectors(self.field, n, vecs)

    def __eq__(self, other):
        return (isinstance(other, SubspaceBasis)
                and self.ambient_dim == other.ambient_dim and self.mat == other.mat)

    def __repr__(self):
        return f"SubspaceBasis(dim {self.dim} in k^{self.ambient_dim})"


def subspace_ops(a, b, which, v=None):
    """Dispatcher for the subspace operations; ``which`` in
    {"membership", "intersect", "sum", "contains"}."""
    if which == "membership":
        return a.membership(v)
    if which == "intersect":
        return a.intersect(b)
    if which == "sum":
        return a.sum_with(b)
    if which == "contains":
        return a.contains(b)
    raise ValueError(f"unknown subspace op {which!r}")


def rref_solve(m, b=None):
    """Unique rref of m, rank, pivots, kernel basis, and (if b is given)
    one particular solution per column of b, with free variables set to 0.

    ``particular`` is None when some column is inconsistent, else a Mat whose
    columns solve m @ x = b columnwise.
    """
    if b is not None and b.nrows != m.nrows:
        raise DimensionMismatch("rhs row count differs from matrix")
    aug_cols = b.ncols if b is not None else 0
    ech = _Echelon(m.field, m.ncols, aug_cols)
    for i in range(m.nrows):
        aug = dict(b.rows[i]) if b is not None else None
        ech.add(dict(m.rows[i]), aug)
    ech.close()
    rref = Mat(m.field, ech.rank, m.ncols, [dict(r) for r in ech.rows])
    kernel = _kernel_from_rref(m.field, m.ncols, ech)
    particular = None
    if b is not None:
        consistent = all(not aug for aug in ech.dead_augs)
        if consistent:
            particular = Mat(m.field, m.ncols, b.ncols)
            for i, piv in enumerate(ech.pivot_of_row):
                for j, v in ech.augs[i].items():
                    particular.rows[piv][j] = v
    return {
        "rref": rref,
        "rank": ech.rank,
        "pivot_cols": list(ech.pivot_of_row),
        "kernel": kernel,
        "particular": particular,
    }


def _kernel_from_rref(field, ncols, ech):
    pivset = set(ech.pivot_of_row)
    neg = field.neg
    vecs = []
    for f in range(ncols):
        if f in pivset:
            continue
        v = {f: field.one}
        for i, piv in enumerate(ech.pivot_of_row):
            c = ech.rows[i].get(f)
            if c:
                v[piv] = neg(c)
        vecs.append(v)
    return SubspaceBasis.from_vectors(field, ncols, vecs)


def kernel(m):
    return rref_solve(m)["kernel"]


def rank(m):
    ech = _Echelon(m.field, m.ncols)
    for r in m.rows:
        ech.add(dict(r))
    return ech.rank


def solve_right(m, b):
    """X with m @ X = b (free variables zero), or None if inconsistent."""
    return rref_solve(m, b)["particular"]


def inverse(m):
    """Two-sided inverse of a square matrix, or None."""
    if m.nrows != m.ncols:
        return None
    res = rref_solve(m, Mat.identity(m.field, m.nrows))
    if res["rank"] != m.nrows:
        return None
    return res["particular"]


class QuotientSpace:
    """Canonical quotient of k^ambient by the span of relation vectors.

    Coordinates are the non-pivot coordinates of the rref of the relation
    span; ``proj @ sect = identity`` and ``ker proj = span(relations)``.
    """

    def __init__(self, field, ambient_dim, relations):
        self.field = field
        self.ambient_dim = ambient_dim
        self.relations = relations
        pivset = set(relations.pivot_cols)
        free = [j for j in range(ambient_dim) if j not in pivset]
        self.free_cols = free
        self.dim = len(free)
        neg = field.neg
        one = field.one
        proj = Mat(field, self.dim, ambient_dim)
        for i, f in enumerate(free):
            proj.rows[i][f] = one
            for r, piv in enumerate(relations.pivot_cols):
                c = relations.mat.rows[r].get(f)
                if c:
                    proj.rows[i][piv] = neg(c)
        sect = Mat(field, ambient_dim, self.dim)
        for i, f in enumerate(free):
            sect.rows[f][i] = one
        self.proj = proj
        self.sect = sect

    def project(self, v):
        return self.proj.apply(v)

    def represent(self, coords):
        return self.sect.apply(coords)

    def __repr__(self):
        return f"QuotientSpace({self.ambient_dim} -> {self.dim})"


def quotient_space(field, ambient_dim, relations):
    """Relations may be dense lists or sparse dicts."""
    guard_dim(ambient_dim, "quotient ambient")
    basis = SubspaceBasis.from_vectors(field, ambient_dim, relations)
    return QuotientSpace(field, ambient_dim, basis)


def identity_quotient(field, ambient_dim):
    guard_dim(ambient_dim, "quotient ambient")
    return QuotientSpace(field, ambient_dim, SubspaceBasis.zero(field, ambient_dim))
