"""Finite-dimensional algebras by structure constants, bimodules, balanced
tensor products over a (noncommutative) ring, and an equivariant-map solver.

Conventions:

* An algebra element is a dense coordinate vector over the algebra's basis;
  ``mult[i][j]`` is the vector of ``e_i * e_j``.
* A module carries any number of declared left/right actions, keyed by the
  acting Algebra object.  ``left[s]`` matrices form a unital representation,
  ``right[t]`` matrices the matching anti-representation pattern, and every
  declared left action commutes with every declared right action.
* ``TensorSpace([M1,...,Mk], [T1,...,T_{k-1}], circular=T)`` is the balanced
  tensor product M1 (x)_{T1} ... (x)_{T_{k-1}} Mk, optionally factored by the
  circular relation  m * t ~ t * m.  The quotient is built left-nested, one
  junction at a time, each step in rref-canonical coordinates; the composite
  is the binding coordinate convention for serialized data.  Pure-tensor
  basis order is lexicographic with the leftmost factor slowest.
* The ground field is realized as the one-dimensional algebra; a junction
  algebra of ``None`` means "over k" (no balancing relations).
"""

from math import prod

from .errors import ActionMismatch, DimensionMismatch
from .exactla import Mat, SubspaceBasis, _Echelon, guard_dim, kron_vec


class Report:
    """Accumulates located axiom failures; empty failures == valid."""

    def __init__(self, subject):
        self.subject = subject
        self.failures = []

    def fail(self, axiom, location=None):
        self.failures.append((axiom, location))

    def merge(self, other, prefix=None):
        for axiom, loc in other.failures:
            self.fail(axiom if prefix is None else f"{prefix}:{axiom}", loc)
        return self

    @property
    def ok(self):
        return not self.failures

    def __repr__(self):
        if self.ok:
            return f"Report({self.subject}: ok)"
        return f"Report({self.subject}: {len(self.failures)} failures: {self.failures[:4]}...)"


def _fail_cols(report, axiom, residual, labels=None):
    """Record one failure per nonzero column of a residual matrix."""
    for j in range(residual.ncols):
        if any(r.get(j) for r in residual.rows):
            report.fail(axiom, labels[j] if labels else j)


class Algebra:
    """Unital associative algebra over a field, given by structure constants."""

    def __init__(self, field, name, dim, mult, unit):
        self.field = field
        self.name = name
        self.dim = dim
        self.mult = mult
        self.unit = list(unit)
        self._left_mats = None
        self._right_mats = None
        self._mult_mat = None

    def __repr__(self):
        return f"Algebra({self.name}, dim {self.dim})"

    def basis_vector(self, i):
        v = [self.field.zero] * self.dim
        v[i] = self.field.one
        return v

    def mul_vec(self, a, b):
        f = self.field
        out = [f.zero] * self.dim
        for i, ai in enumerate(a):
            if not ai:
                continue
            row = self.mult[i]
            for j, bj in enumerate(b):
                if not bj:
                    continue
                c = f.mul(ai, bj)
                for k, m in enumerate(row[j]):
                    if m:
                        out[k] = f.add(out[k], f.mul(c, m))
        return out

    def left_mult_mats(self):
        """L[i] = matrix of left multiplication by e_i."""
        if self._left_mats is None:
            self._left_mats = [
                Mat.from_cols(self.field, [self.mult[i][j] for j in range(self.dim)], self.dim)
                for i in range(self.dim)
            ]
        return self._left_mats

    def right_mult_mats(self):
        """R[j] = matrix of right multiplication by e_j."""
        if self._right_mats is None:
            self._right_mats = [
                Mat.from_cols(self.field, [self.mult[i][j] for i in range(self.dim)], self.dim)
                for j in range(self.dim)
            ]
        return self._right_mats

    def mult_mat(self):
        """dim x dim^2 matrix of the multiplication; column i*dim+j = e_i e_j."""
        if self._mult_mat is None:
            cols = [self.mult[i][j] for i in range(self.dim) for j in range(self.dim)]
            self._mult_mat = Mat.from_cols(self.field, cols, self.dim)
        return self._mult_mat

    def unit_col(self):
        return Mat.from_cols(self.field, [self.unit], self.dim)

    def left_mult_by(self, vec):
        f = self.field
        m = Mat.zeros(f, self.dim, self.dim)
        for i, c in enumerate(vec):
            if c:
                m = m + self.left_mult_mats()[i].scale(c)
        return m

    def right_mult_by(self, vec):
        f = self.field
        m = Mat.zeros(f, self.dim, self.dim)
        for j, c in enumerate(vec):
            if c:
                m = m + self.right_mult_mats()[j].scale(c)
        return m


def scalar_algebra(field, name="k"):
    return Algebra(field, name, 1, [[[field.one]]], [field.one])


def validate_algebra(a):
    """Associativity on all basis triples and both unit laws, located."""
    rep = Report(a.name)
    f = a.field
    for i in range(a.dim):
        for j in range(a.dim):
            eij = a.mult[i][j]
            for k in range(a.dim):
                left = a.mul_vec(eij, a.basis_vector(k))
                right = a.mul_vec(a.basis_vector(i), a.mult[j][k])
                if left != right:
                    rep.fail("associativity", (i, j, k))
    for i in range(a.dim):
        e = a.basis_vector(i)
        if a.mul_vec(a.unit, e) != e:
            rep.fail("left-unit", i)
        if a.mul_vec(e, a.unit) != e:
            rep.fail("right-unit", i)
    return rep


class AlgebraMorphism:
    """Unital algebra map source -> target as a matrix on coordinates."""

    def __init__(self, source, target, matrix):
        if matrix.shape != (target.dim, source.dim):
            raise DimensionMismatch("morphism matrix shape")
        self.source = source
        self.target = target
        self.matrix = matrix

    def apply(self, vec):
        return self.matrix.apply(vec)

    def then(self, other):
        if other.source is not self.target:
            raise ActionMismatch("morphism composition mismatch")
        return AlgebraMorphism(self.source, other.target, other.matrix @ self.matrix)

    @classmethod
    def identity(cls, a):
        return cls(a, a, Mat.identity(a.field, a.dim))


def validate_morphism(m):
    rep = Report(f"{m.source.name}->{m.target.name}")
    src, tgt = m.source, m.target
    for i in range(src.dim):
        for j in range(src.dim):
            lhs = m.apply(src.mult[i][j])
            rhs = tgt.mul_vec(m.apply(src.basis_vector(i)), m.apply(src.basis_vector(j)))
            if lhs != rhs:
                rep.fail("multiplicative", (i, j))
    if m.apply(src.unit) != tgt.unit:
        rep.fail("unit", None)
    return rep


class Module:
    """A k-module with declared left/right algebra actions.

    Module elements are dense coordinate vectors.  ``left[alg][i]`` is the
    matrix of the action of the i-th basis element of ``alg``.
    """

    def __init__(self, field, name, dim):
        self.field = field
        self.name = name
        self.dim = dim
        self.left = {}
        self.right = {}

    def __repr__(self):
        return f"Module({self.name}, dim {self.dim})"

    def add_left(self, alg, mats):
        self.left[alg] = mats
        return self

    def add_right(self, alg, mats):
        self.right[alg] = mats
        return self

    def restrict_left(self, sub, morphism):
        """Declare the action of ``sub`` through an existing action of
        ``morphism.target``."""
        mats = self.left[morphism.target]
        self.left[sub] = [_combine(mats, morphism.apply(sub.basis_vector(i)), self.field)
                          for i in range(sub.dim)]
        return self

    def restrict_right(self, sub, morphism):
        mats = self.right[morphism.target]
        self.right[sub] = [_combine(mats, morphism.apply(sub.basis_vector(i)), self.field)
                           for i in range(sub.dim)]
        return self

    def left_action_of(self, alg, vec):
        return _combine(self.left[alg], vec, self.field)

    def right_action_of(self, alg, vec):
        return _combine(self.right[alg], vec, self.field)

    def act_left(self, alg, avec, v):
        return self.left_action_of(alg, avec).apply(v)

    def act_right(self, alg, v, avec):
        return self.right_action_of(alg, avec).apply(v)

    def left_collapse_mat(self, alg):
        """[S, M] -> M collapse: column (s*dim + m) = e_s acting on e_m."""
        mats = self.left[alg]
        cols = [mats[s].col(m) for s in range(alg.dim) for m in range(self.dim)]
        return Mat.from_cols(self.field, cols, self.dim)

    def right_collapse_mat(self, alg):
        """[M, S] -> M collapse: column (m*dimS + s) = e_m acted by e_s."""
        mats = self.right[alg]
        cols = [mats[s].col(m) for m in range(self.dim) for s in range(alg.dim)]
        return Mat.from_cols(self.field, cols, self.dim)

    def basis_vector(self, i):
        v = [self.field.zero] * self.dim
        v[i] = self.field.one
        return v


def _combine(mats, vec, field):
    out = Mat.zeros(field, mats[0].nrows, mats[0].ncols)
    for i, c in enumerate(vec):
        if c:
            out = out + mats[i].scale(c)
    return out


def regular_bimodule(a, name=None):
    """The algebra as a bimodule over itself."""
    m = Module(a.field, name or a.name, a.dim)
    m.add_left(a, a.left_mult_mats())
    m.add_right(a, a.right_mult_mats())
    return m


def validate_module(m, left_alg=None, right_alg=None):
    """Unital (anti-)representation and commutation checks for a bimodule."""
    rep = Report(m.name)
    f = m.field
    if left_alg is not None:
        mats = m.left[left_alg]
        if m.left_action_of(left_alg, left_alg.unit) != Mat.identity(f, m.dim):
            rep.fail("left-unital", None)
        for i in range(left_alg.dim):
            for j in range(left_alg.dim):
                if mats[i] @ mats[j] != m.left_action_of(left_alg, left_alg.mult[i][j]):
                    rep.fail("left-representation", (i, j))
    if right_alg is not None:
        mats = m.right[right_alg]
        if m.right_action_of(right_alg, right_alg.unit) != Mat.identity(f, m.dim):
            rep.fail("right-unital", None)
        for i in range(right_alg.dim):
            for j in range(right_alg.dim):
                if mats[j] @ mats[i] != m.right_action_of(right_alg, right_alg.mult[i][j]):
                    rep.fail("right-antirepresentation", (i, j))
    if left_alg is not None and right_alg is not None:
        for i in range(left_alg.dim):
            for j in range(right_alg.dim):
                if m.left[left_alg][i] @ m.right[right_alg][j] != \
                        m.right[right_alg][j] @ m.left[left_alg][i]:
                    rep.fail("bimodule-commute", (i, j))
    return rep


def generated_subalgebra(a, generators):
    """Smallest unital subalgebra containing the generators.

    Returns (Algebra in rref-canonical basis, inclusion AlgebraMorphism);
    the basis is the fixed point of span-closure under multiplication.
    """
    f = a.field
    ech = _Echelon(f, a.dim)
    vectors = [list(a.unit)] + [list(g) for g in generators]
    for v in vectors:
        ech.add({j: x for j, x in enumerate(v) if x})
    while True:
        basis = [_dense(f, r, a.dim) for r in ech.rows]
        grew = False
        for u in basis:
            for v in basis:
                w = a.mul_vec(u, v)
                if ech.add({j: x for j, x in enumerate(w) if x}):
                    grew = True
        if not grew:
            break
    ech.close()
    basis = [_dense(f, r, a.dim) for r in ech.rows]
    sub_basis = SubspaceBasis(f, a.dim,
                              Mat.from_rows(f, basis, a.dim) if basis else Mat(f, 0, a.dim),
                              ech.pivot_of_row)
    dim = len(basis)
    mult = []
    for i in range(dim):
        row = []
        for j in range(dim):
            coords = sub_basis.membership(a.mul_vec(basis[i], basis[j]))
            assert coords is not None, "closure invariant violated"
            row.append(coords)
        mult.append(row)
    unit = sub_basis.membership(a.unit)
    sub = Algebra(f, f"{a.name}-sub", dim, mult, unit)
    incl = AlgebraMorphism(sub, a, Mat.from_cols(f, basis, a.dim))
    return sub, incl


def trivial_subalgebra(a):
    """span{1_A} with its inclusion; the default T."""
    return generated_subalgebra(a, [])


def _dense(field, rowdict, n):
    v = [field.zero] * n
    for j, x in rowdict.items():
        v[j] = x
    return v


# ---------------------------------------------------------------------------
# Balanced tensor spaces
# ---------------------------------------------------------------------------

class TensorSpace:
    """Left-nested balanced tensor product with canonical quotient data.

    Attributes:
      dims        factor dimensions
      full_dim    product of dims (ambient k-tensor dimension)
      dim         quotient dimension
      Q           projection full -> quotient (canonical coordinates)
      S           section quotient -> full (zero on pivot coordinates)
      outer_left  pushed left actions of the first factor {alg: [Mat]}
      outer_right pushed right actions of the last factor (dropped after a
                  circular quotient, where they are no longer well defined)
      trivial     True when there are no relations (Q = S = identity)
    """

    def __init__(self, factors, junctions, circular=None, name=""):
        if len(junctions) != len(factors) - 1:
            raise DimensionMismatch("need one junction per adjacent factor pair")
        field = factors[0].field
        for m in factors:
            if m.field != field:
                raise ActionMismatch("mixed fields in tensor space")
        self.field = field
        self.factors = factors
        self.junctions = junctions
        self.circular = circular
        self.dims = [m.dim for m in factors]
        self.full_dim = guard_dim(prod(self.dims), f"tensor space {name or '?'}")
        self.name = name or "(x)".join(m.name for m in factors)

        first = factors[0]
        cur_dim = first.dim
        Q = Mat.identity(field, cur_dim)
        S = Mat.identity(field, cur_dim)
        trivial = True
        outer_left = {alg: list(mats) for alg, mats in first.left.items()}
        outer_right = {alg: list(mats) for alg, mats in first.right.items()}

        for t, nxt in zip(junctions, factors[1:]):
            dN = nxt.dim
            amb = cur_dim * dN
            guard_dim(amb, f"tensor step of {self.name}")
            rel_vectors = []
            if t is not None:
                if t not in outer_right:
                    raise ActionMismatch(
                        f"{self.name}: left side lacks a right {t.name}-action")
                if t not in nxt.left:
                    raise ActionMismatch(
                        f"{self.name}: {nxt.name} lacks a left {t.name}-action")
                rmats = outer_right[t]
                lmats = nxt.left[t]
                for ti in range(t.dim):
                    rt = rmats[ti]
                    lt = lmats[ti]
                    if _is_identity(rt) and _is_identity(lt):
                        continue
                    rt_cols = rt.transpose().rows
                    lt_cols = lt.transpose().rows
                    for u in range(cur_dim):
                        ucol = rt_cols[u]
                        for n in range(dN):
                            ncol = lt_cols[n]
                            vec = {i * dN + n: x for i, x in ucol.items()}
                            fld = field
                            for j, x in ncol.items():
                                k = u * dN + j
                                w = fld.sub(vec.get(k, fld.zero), x)
                                if w:
                                    vec[k] = w
                                elif k in vec:
                                    del vec[k]
                            if vec:
                                rel_vectors.append(vec)
            if rel_vectors:
                rels = SubspaceBasis.from_vectors(field, amb, rel_vectors)
                from .exactla import QuotientSpace
                qs = QuotientSpace(field, amb, rels)
                P, S2 = qs.proj, qs.sect
                trivial = False
            else:
                P = Mat.identity(field, amb)
                S2 = P
            QkI = _kron_id_right(Q, dN)
            SkI = _kron_id_right(S, dN)
            Q = P @ QkI if not _is_identity(P) else QkI
            S = SkI @ S2 if not _is_identity(S2) else SkI
            new_dim = P.nrows
            outer_left = {
                alg: [P @ _kron_id_right(L, dN) @ S2 for L in mats]
                for alg, mats in outer_left.items()
            }
            outer_right = {
                alg: [P @ _kron_id_left(cur_dim, R) @ S2 for R in mats]
                for alg, mats in nxt.right.items()
            }
            cur_dim = new_dim

        if circular is not None:
            if circular not in outer_right or circular not in outer_left:
                raise ActionMismatch(
                    f"{self.name}: circular algebra {circular.name} must act on both ends")
            rel_vectors = []
            for ti in range(circular.dim):
                diff = outer_right[circular][ti] - outer_left[circular][ti]
                diff_cols = diff.transpose().rows
                for u in range(cur_dim):
                    if diff_cols[u]:
                        rel_vectors.append(dict(diff_cols[u]))
            if rel_vectors:
                rels = SubspaceBasis.from_vectors(field, cur_dim, rel_vectors)
                from .exactla import QuotientSpace
                qs = QuotientSpace(field, cur_dim, rels)
                Q = qs.proj @ Q
                S = S @ qs.sect
                cur_dim = qs.dim
            outer_left = {}
            outer_right = {}

        self.dim = cur_dim
        self.Q = Q
        self.S = S
        self.trivial = self.dim == self.full_dim
        self.outer_left = outer_left
        self.outer_right = outer_right

    def __repr__(self):
        return f"TensorSpace({self.name}, {self.full_dim} -> {self.dim})"

    def embed_pure(self, vecs):
        """Coordinates of v1 (x) ... (x) vk."""
        if len(vecs) != len(self.factors):
            raise DimensionMismatch("wrong number of tensor legs")
        full = vecs[0]
        for v in vecs[1:]:
            full = kron_vec(self.field, full, v)
        return self.Q.apply(full)

    def flat_index(self, idxs):
        flat = 0
        for i, d in zip(idxs, self.dims):
            flat = flat * d + i
        return flat

    def pure_basis(self, idxs):
        return self.Q.col(self.flat_index(idxs))

    def represent(self, coords):
        """A full-ambient representative of a quotient element."""
        return self.S.apply(coords)


def _is_identity(m):
    if m.nrows != m.ncols:
        return False
    one = m.field.one
    return all(len(r) == 1 and r.get(i) == one for i, r in enumerate(m.rows))


def _kron_id_right(m, d):
    """kron(m, I_d) built directly."""
    if d == 1:
        return m
    rows = [None] * (m.nrows * d)
    for i, r in enumerate(m.rows):
        base = i * d
        for a in range(d):
            rows[base + a] = {j * d + a: v for j, v in r.items()}
    return Mat(m.field, m.nrows * d, m.ncols * d, rows)


def _kron_id_left(d, m):
    """kron(I_d, m) built directly."""
    if d == 1:
        return m
    rows = []
    for a in range(d):
        roff = a * m.nrows
        coff = a * m.ncols
        for r in m.rows:
            rows.append({coff + j: v for j, v in r.items()})
    return Mat(m.field, m.nrows * d, m.ncols * d, rows)


def kron_id(pre, f, post):
    """kron(I_pre, f, I_post) built directly, sparse."""
    return _kron_id_left(pre, _kron_id_right(f, post))


_TS_CACHE = {}


def tensor_space(factors, junctions, circular=None, name=""):
    """Memoized TensorSpace factory.  The key includes each factor's set of
    declared actions: adding an action to a Module later yields a fresh
    space with identical coordinates but complete outer-action data."""
    key = (tuple(id(f) for f in factors),
           tuple(id(j) if j is not None else None for j in junctions),
           id(circular) if circular is not None else None,
           tuple((tuple(sorted(map(id, f.left))), tuple(sorted(map(id, f.right))))
                 for f in factors))
    sp = _TS_CACHE.get(key)
    if sp is None:
        sp = TensorSpace(list(factors), list(junctions), circular, name)
        _TS_CACHE[key] = sp
    return sp


def tensor_over(m, n, t, name=""):
    """The balanced tensor M (x)_T N; pass t=None for the ground field."""
    return tensor_space([m, n], [t], name=name)


def space_dim(sp):
    return sp.dim


def space_Q(sp):
    if isinstance(sp, TensorSpace):
        return sp.Q
    return Mat.identity(sp.field, sp.dim)


def space_S(sp):
    if isinstance(sp, TensorSpace):
        return sp.S
    return Mat.identity(sp.field, sp.dim)


def leg_apply(src, tgt, pos, span, fmat, check="auto"):
    """Induced map src -> tgt from ``fmat`` acting on the full k-tensor of
    factors [pos, pos+span) of src.  ``span = 0`` inserts a new leg (fmat
    must be a column).  Raises ActionMismatch when the map does not descend
    to the quotient (checked unless src has no relations or check="skip")."""
    src_dims = src.dims if isinstance(src, TensorSpace) else [src.dim]
    pre = prod(src_dims[:pos]) if pos > 0 else 1
    post = prod(src_dims[pos + span:]) if pos + span < len(src_dims) else 1
    expect = prod(src_dims[pos:pos + span]) if span > 0 else 1
    if fmat.ncols != expect:
        raise DimensionMismatch(
            f"leg map consumes {fmat.ncols}, factors give {expect}")
    amb = kron_id(pre, fmat, post)
    Qt = space_Q(tgt)
    St = space_S(src)
    W = Qt @ amb
    M = W @ St
    has_relations = isinstance(src, TensorSpace) and not src.trivial
    do_check = check == "force" or (check == "auto" and has_relations)
    if do_check:
        Qs = space_Q(src)
        if (M @ Qs) != W:
            raise ActionMismatch(
                f"leg map at position {pos} does not descend to {getattr(src, 'name', src)}")
    return M


def lift_to_full(f, src_sp, tgt_sp):
    """Lift a quotient-coordinates map to full ambient coordinates."""
    return space_S(tgt_sp) @ f @ space_Q(src_sp)


# ---------------------------------------------------------------------------
# Equivariant map solving
# ---------------------------------------------------------------------------

class Equation:
    """sum of signed terms applied to the unknown X equals rhs.

    Terms:
      ("LXR", L, R)          L @ X @ R
      ("QXU_right", J, U, d) J @ (X kron I_d) @ U
      ("QXU_left", J, U, d)  J @ (I_d kron X) @ U
    """

    def __init__(self, terms, rhs=None, label=""):
        self.terms = terms
        self.rhs = rhs
        self.label = label


def evaluate_equation(field, X, eq):
    """The residual matrix of one Equation at a concrete X (zero = holds)."""
    total = None
    for term in eq.terms:
        kind = term[0]
        if kind == "LXR":
            _, L, R, sgn = term
            val = L @ X @ R
        elif kind == "QXU_right":
            _, J, U, d, sgn = term
            val = J @ _kron_id_right(X, d) @ U
        elif kind == "QXU_left":
            _, J, U, d, sgn = term
            val = J @ _kron_id_left(d, X) @ U
        else:
            raise ValueError(f"unknown term kind {kind}")
        if sgn < 0:
            val = -val
        total = val if total is None else total + val
    if eq.rhs is not None:
        total = total - eq.rhs
    return total


class EquivariantMap:
    """A linear map with declared equivariance constraints; the matrix maps
    source coordinates to target coordinates and ``verify`` re-checks every
    declared constraint as an exact matrix identity."""

    def __init__(self, source, target, matrix, constraints=(), tags=()):
        self.source = source
        self.target = target
        self.matrix = matrix
        self.constraints = list(constraints)
        self.tags = tuple(tags)

    def apply(self, vec):
        return self.matrix.apply(vec)

    def verify(self):
        rep = Report(f"map{self.tags}")
        for eq in self.constraints:
            res = evaluate_equation(self.matrix.field, self.matrix, eq)
            _fail_cols(rep, eq.label or "constraint", res)
        return rep

    def __repr__(self):
        return f"EquivariantMap({getattr(self.source, 'name', '?')} -> " \
               f"{getattr(self.target, 'name', '?')}, tags={self.tags})"


class AffineSolutionSet:
    """All solutions X = particular + span(homogeneous) of a linear system
    in an unknown (tgt_dim x src_dim)-matrix; particular has free variables
    set to zero (deterministic)."""

    def __init__(self, field, tgt_dim, src_dim, particular, homogeneous):
        self.field = field
        self.tgt_dim = tgt_dim
        self.src_dim = src_dim
        self.particular = particular
        self.homogeneous = homogeneous

    @property
    def is_empty(self):
        return self.particular is None

    @property
    def freedom(self):
        return self.homogeneous.dim

    def _unflatten(self, flat):
        m = Mat.zeros(self.field, self.tgt_dim, self.src_dim)
        for j, v in enumerate(flat):
            if v:
                m.rows[j // self.src_dim][j % self.src_dim] = v
        return m

    def point(self, coeffs=()):
        """particular + sum coeffs[i] * homogeneous[i]."""
        if self.particular is None:
            return None
        m = self.particular
        for i, c in enumerate(coeffs):
            if c:
                m = m + self._unflatten(self.homogeneous.mat.row_list(i)).scale(c)
        return m

    def __repr__(self):
        st = "empty" if self.is_empty else f"dim {self.freedom}"
        return f"AffineSolutionSet({self.tgt_dim}x{self.src_dim}, {st})"


def equivariant_hom_space(source, target, constraints):
    """Solve for all maps source -> target satisfying the given Equation
    constraints; source/target may be Modules or TensorSpaces."""
    return hom_solve(source.field, source.dim, target.dim, constraints)


def hom_solve(field, src_dim, tgt_dim, equations):
    """Solve the joint linear system for the unknown matrix X."""
    nunk = tgt_dim * src_dim
    ech = _Echelon(field, nunk, aug_cols=1)
    zero = field.zero
    for eq in equations:
        rows = {}

        def bump(r, c, v):
            if not v:
                return
            d = rows.setdefault(r, {})
            w = field.add(d.get(c, zero), v)
            if w:
                d[c] = w
            elif c in d:
                del d[c]

        out_dim = None
        dom_dim = None
        for term in eq.terms:
            kind = term[0]
            if kind == "LXR":
                _, L, R, sgn = term
                out_dim, dom_dim = L.nrows, R.ncols
                for o, lr in enumerate(L.rows):
                    for n, lv in lr.items():
                        base_r = o * dom_dim
                        base_c = n * src_dim
                        for i, rr in enumerate(R.rows):
                            for dd, rv in rr.items():
                                v = field.mul(lv, rv)
                                if sgn < 0:
                                    v = field.neg(v)
                                bump(base_r + dd, base_c + i, v)
            elif kind == "QXU_right":
                _, J, U, d, sgn = term
                out_dim = J.nrows
                dom_dim = U.ncols
                urows_by_c = {}
                for ic in range(U.nrows):
                    i, c = divmod(ic, d)
                    if U.rows[ic]:
                        urows_by_c.setdefault(c, []).append((i, U.rows[ic]))
                for o, jr in enumerate(J.rows):
                    for nc, jv in jr.items():
                        n, c = divmod(nc, d)
                        for i, urow in urows_by_c.get(c, ()):
                            for dd, uv in urow.items():
                                v = field.mul(jv, uv)
                                if sgn < 0:
                                    v = field.neg(v)
                                bump(o * dom_dim + dd, n * src_dim + i, v)
            elif kind == "QXU_left":
                _, J, U, d, sgn = term
                out_dim = J.nrows
                dom_dim = U.ncols
                urows_by_c = {}
                for ci in range(U.nrows):
                    c, i = divmod(ci, src_dim)
                    if U.rows[ci]:
                        urows_by_c.setdefault(c, []).append((i, U.rows[ci]))
                for o, jr in enumerate(J.rows):
                    for cn, jv in jr.items():
                        c, n = divmod(cn, tgt_dim)
                        for i, urow in urows_by_c.get(c, ()):
                            for dd, uv in urow.items():
                                v = field.mul(jv, uv)
                                if sgn < 0:
                                    v = field.neg(v)
                                bump(o * dom_dim + dd, n * src_dim + i, v)
            else:
                raise ValueError(f"unknown term kind {kind}")
        nrows_eq = out_dim * dom_dim if out_dim is not None else 0
        for r in range(nrows_eq):
            rhs = zero
            if eq.rhs is not None:
                o, dd = divmod(r, dom_dim)
                rhs = eq.rhs.get(o, dd)
            ech.add(rows.get(r, {}), {0: rhs} if rhs else {})
    ech.close()
    inconsistent = any(aug for aug in ech.dead_augs)
    particular = None
    if not inconsistent:
        flat = {}
        for i, piv in enumerate(ech.pivot_of_row):
            v = ech.augs[i].get(0)
            if v:
                flat[piv] = v
        particular = Mat.zeros(field, tgt_dim, src_dim)
        for j, v in flat.items():
            particular.rows[j // src_dim][j % src_dim] = v
    from .exactla import _kernel_from_rref
    hom = _kernel_from_rref(field, nunk, ech)
    return AffineSolutionSet(field, tgt_dim, src_dim, particular, hom)


# -- equation constructors -------------------------------------------------

def _left_mats(sp, alg):
    if isinstance(sp, TensorSpace):
        return sp.outer_left[alg]
    return sp.left[alg]


def _right_mats(sp, alg):
    if isinstance(sp, TensorSpace):
        return sp.outer_right[alg]
    return sp.right[alg]


def eqs_linear(alg, src, tgt, side):
    """Left or right alg-linearity of X: src -> tgt (TensorSpace or Module)."""
    field = src.field
    I_t = Mat.identity(field, tgt.dim)
    I_s = Mat.identity(field, src.dim)
    eqs = []
    for i in range(alg.dim):
        sm = (_left_mats if side == "left" else _right_mats)(src, alg)[i]
        tm = (_left_mats if side == "left" else _right_mats)(tgt, alg)[i]
        eqs.append(Equation([("LXR", I_t, sm, 1), ("LXR", tm, I_s, -1)],
                            label=f"{side}-linear[{alg.name}:{i}]"))
    return eqs


def eq_value(src_vec, tgt_vec, field, tgt_dim):
    """X(src_vec) = tgt_vec."""
    R = Mat.from_cols(field, [src_vec], len(src_vec))
    return Equation([("LXR", Mat.identity(field, tgt_dim), R, 1)],
                    rhs=Mat.from_cols(field, [tgt_vec], tgt_dim),
                    label="value")


def eq_right_colinear(rho_src, rho_tgt, src, tgt, src_C_space, tgt_C_space, c_dim):
    """rho_tgt . X = (X tensor C) . rho_src, both sides into tgt_C_space."""
    U = _kron_id_right(space_Q(src), c_dim) @ space_S(src_C_space) @ rho_src
    J = space_Q(tgt_C_space) @ _kron_id_right(space_S(tgt), c_dim)
    return Equation([("LXR", rho_tgt, Mat.identity(src.field, src.dim), 1),
                     ("QXU_right", J, U, c_dim, -1)],
                    label="right-colinear")


def eq_left_colinear(lrho_src, lrho_tgt, src, tgt, C_src_space, C_tgt_space, c_dim):
    """lrho_tgt . X = (C tensor X) . lrho_src."""
    U = _kron_id_left(c_dim, space_Q(src)) @ space_S(C_src_space) @ lrho_src
    J = space_Q(C_tgt_space) @ _kron_id_left(c_dim, space_S(tgt))
    return Equation([("LXR", lrho_tgt, Mat.identity(src.field, src.dim), 1),
                     ("QXU_left", J, U, c_dim, -1)],
                    label="left-colinear")


# ---------------------------------------------------------------------------
# Projectivity via dual bases
# ---------------------------------------------------------------------------

class DualBasis:
    """{w_i, chi_i} with x = sum chi_i(x) . w_i (left) or
    x = sum w_i . chi_i(x) (right)."""

    def __init__(self, side, ws, chis, projective, generator):
        self.side = side
        self.ws = ws
        self.chis = chis
        self.projective = projective
        self.generator = generator
        self.faithfully_flat = projective and generator

    def __len__(self):
        return len(self.ws)


def projective_dual_basis(module, alg, side="left", generators=None):
    """Dual-basis data for a finitely generated one-sided module.

    Solves for a one-sided-linear section of the free cover built on
    ``generators`` (default: the full basis, so absence of a solution is a
    certificate of non-projectivity).  Flags: projective; generator (trace
    ideal equals the algebra); faithfully flat = projective and generator.
    """
    field = module.field
    if generators is None:
        generators = [module.basis_vector(i) for i in range(module.dim)]
    g = len(generators)
    dS = alg.dim
    cover_dim = g * dS
    cols = []
    for i in range(g):
        for s in range(dS):
            if side == "left":
                cols.append(module.act_left(alg, alg.basis_vector(s), generators[i]))
            else:
                cols.append(module.act_right(alg, generators[i], alg.basis_vector(s)))
    pi = Mat.from_cols(field, cols, module.dim)
    free = Module(field, f"{alg.name}^{g}", cover_dim)
    if side == "left":
        free.add_left(alg, [kron_id(g, m, 1) for m in alg.left_mult_mats()])
    else:
        free.add_right(alg, [kron_id(g, m, 1) for m in alg.right_mult_mats()])
    eqs = eqs_linear(alg, module, free, side)
    eqs.append(Equation([("LXR", pi, Mat.identity(field, module.dim), 1)],
                        rhs=Mat.identity(field, module.dim), label="section"))
    sol = hom_solve(field, module.dim, cover_dim, eqs)
    projective = not sol.is_empty
    ws, chis = [], []
    if projective:
        sigma = sol.particular
        for i in range(g):
            chi = Mat(field, dS, module.dim,
                      [dict(sigma.rows[i * dS + s]) for s in range(dS)])
            chis.append(chi)
            ws.append(list(generators[i]))
    hom_alg = hom_solve(field, module.dim, dS, eqs_linear(alg, module, _alg_as_module(alg, side), side))
    trace = _trace_ideal(alg, hom_alg, module)
    generator = trace.dim == dS
    return DualBasis(side, ws, chis, projective, generator)


def _alg_as_module(alg, side):
    m = Module(alg.field, alg.name, alg.dim)
    m.add_left(alg, alg.left_mult_mats())
    m.add_right(alg, alg.right_mult_mats())
    return m


def _trace_ideal(alg, hom_set, module):
    """Two-sided ideal spanned by values of all one-sided-linear maps M -> S."""
    field = alg.field
    vals = []
    if hom_set.particular is not None:
        pts = [hom_set.particular]
    else:
        pts = []
    for i in range(hom_set.homogeneous.dim):
        pts.append(hom_set._unflatten(hom_set.homogeneous.mat.row_list(i)))
    for f in pts:
        for x in range(module.dim):
            vals.append(f.col(x))
    ech = _Echelon(field, alg.dim)
    for v in vals:
        ech.add({j: x for j, x in enumerate(v) if x})
    changed = True
    while changed:
        changed = False
        basis = [_dense(field, r, alg.dim) for r in ech.rows]
        for v in basis:
            for s in range(alg.dim):
                for w in (alg.mul_vec(v, alg.basis_vector(s)),
                          alg.mul_vec(alg.basis_vector(s), v)):
                    if ech.add({j: x for j, x in enumerate(w) if x}):
                        changed = True
    ech.close()
    return SubspaceBasis(field, alg.dim,
                         Mat(field, ech.rank, alg.dim, [dict(r) for r in ech.rows]),
                         ech.pivot_of_row)


def verify_dual_basis(module, alg, db):
    """x = sum chi_i(x) w_i (left) / sum w_i chi_i(x) (right), exactly."""
    field = module.field
    for b in range(module.dim):
        x = module.basis_vector(b)
        acc = [field.zero] * module.dim
        for w, chi in zip(db.ws, db.chis):
            c = chi.apply(x)
            if db.side == "left":
                y = module.act_left(alg, c, w)
            else:
                y = module.act_right(alg, w, c)
            acc = [field.add(a, z) for a, z in zip(acc, y)]
        if acc != x:
            return False
    return True
