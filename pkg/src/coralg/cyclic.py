"""Circular tensor products, cyclic operators, the relative cyclic
bicomplex of a T-ring B, truncated total complexes, homology, class
arithmetic and the lambda projection HC_*(B) -> HC_*(B|T).

Conventions for the bicomplex (binding):

* entry C_{p,q} = B^{(*)T(q+1)} for p, q >= 0 and p + q <= D + 1
* vertical maps: column p carries the Hochschild boundary d (p even) or
  -d' (p odd), going down one row
* horizontal maps: tau~ = id - tau out of odd columns, N = sum tau^i out of
  positive even columns, going one column left
* total spaces Tot_n = direct sum of C_{p, n-p}, blocks ordered by p
  ascending; the total differential is the plain sum of the vertical and
  horizontal components (squares anticommute as drawn, so d.d = 0; this is
  verified, not assumed)
* cyclic operator: tau_n(b_0 (*) ... (*) b_n) = (-1)^n b_n (*) b_0 ... (*)
  b_{n-1}; d'_n contracts adjacent factors with alternating signs; d_n adds
  (-1)^n (b_n b_0) (*) b_1 ... (*) b_{n-1}
"""

from .errors import DegreeMismatch, DegreeOutOfRange, NotACycle
from .exactla import (
    Mat, SubspaceBasis, guard_dim, rref_solve, solve_right,
)
from .ncalg import Report, tensor_space, trivial_subalgebra


_CC_CACHE = {}


def cyclic_complex(b, t_pair=None, name=""):
    """Memoized CyclicComplex factory (coordinates must be shared between
    the chg pipeline and the total complexes it feeds)."""
    key = (id(b), id(t_pair[0]) if t_pair else None)
    cc = _CC_CACHE.get(key)
    if cc is None:
        cc = CyclicComplex(b, t_pair, name)
        _CC_CACHE[key] = cc
    return cc


class CyclicComplex:
    """Shared builder for the circular spaces and operators of one (B, T)."""

    def __init__(self, b, t_pair=None, name=""):
        self.b = b
        self.field = b.field
        if t_pair is None:
            t_pair = trivial_subalgebra(b)
        self.t, self.t_incl = t_pair
        from .ncalg import regular_bimodule
        self.b_mod = regular_bimodule(b)
        if self.t is not b:
            self.b_mod.restrict_left(self.t, self.t_incl)
            self.b_mod.restrict_right(self.t, self.t_incl)
        self.name = name or f"{b.name}|{self.t.name}"
        self._spaces = {}
        self._ops = {}
        self._d = {}

    def space(self, n):
        """B^{(*)T(n+1)}: the (n+1)-fold circular tensor power."""
        if n not in self._spaces:
            guard_dim(self.b.dim ** (n + 1), f"circular space level {n}")
            self._spaces[n] = tensor_space(
                [self.b_mod] * (n + 1), [self.t] * n, circular=self.t,
                name=f"{self.b.name}^(*){n + 1}")
        return self._spaces[n]

    # -- ambient operator constructions --------------------------------

    def _perm_apply(self, n, flat):
        """Rotate the flat index of a pure tensor: last factor to the front."""
        d = self.b.dim
        last = flat % d
        rest = flat // d
        return last * d ** n + rest

    def _tau_ambient(self, n):
        d = self.b.dim
        total = d ** (n + 1)
        sign = self.field.one if n % 2 == 0 else self.field.neg(self.field.one)
        rows = [{} for _ in range(total)]
        for j in range(total):
            rows[self._perm_apply(n, j)][j] = sign
        return Mat(self.field, total, total, rows)

    def _contract_ambient(self, n, positions_signs, drop_to):
        """Sum over (i, sign, mode) of the maps contracting factor pairs.

        mode "adjacent i": multiply factors i, i+1; mode "wrap": multiply
        (last, first) and place the product first.  Output level drop_to.
        """
        f = self.field
        b = self.b
        d = b.dim
        total_in = d ** (n + 1)
        total_out = d ** (drop_to + 1)
        rows = [{} for _ in range(total_out)]
        pow_cache = [d ** k for k in range(n + 2)]
        for j in range(total_in):
            digits = []
            rem = j
            for _ in range(n + 1):
                digits.append(rem % d)
                rem //= d
            digits.reverse()
            for pos, sgn, mode in positions_signs:
                if mode == "adj":
                    prod = b.mult[digits[pos]][digits[pos + 1]]
                    rest = digits[:pos] + [None] + digits[pos + 2:]
                    slot = pos
                else:  # wrap: b_n b_0 first
                    prod = b.mult[digits[-1]][digits[0]]
                    rest = [None] + digits[1:-1]
                    slot = 0
                base = 0
                for t, dig in enumerate(rest):
                    if dig is not None:
                        base += dig * pow_cache[drop_to - t]
                for k, c in enumerate(prod):
                    if not c:
                        continue
                    out = base + k * pow_cache[drop_to - slot]
                    row = rows[out]
                    w = f.add(row.get(j, f.zero), f.mul(sgn, c))
                    if w:
                        row[j] = w
                    elif j in row:
                        del row[j]
        return Mat(self.field, total_out, total_in, rows)

    def operators(self, n):
        """tau, tautilde, N at level n; dprime, d: level n -> n-1 (n >= 1).

        All matrices act on canonical circular coordinates; the descent to
        the quotient is verified (relation vectors map to relation vectors).
        """
        if n in self._ops:
            return self._ops[n]
        f = self.field
        sp = self.space(n)
        tau_amb = self._tau_ambient(n)
        ops = {}
        ops["tau"] = self._descend(tau_amb, sp, sp)
        ident = Mat.identity(f, sp.dim)
        ops["tautilde"] = ident - ops["tau"]
        # N = sum of tau^i on the quotient (tau descends, so powers agree)
        acc = Mat.identity(f, sp.dim)
        nmat = Mat.identity(f, sp.dim)
        for _ in range(n):
            nmat = ops["tau"] @ nmat
            acc = acc + nmat
        ops["N"] = acc
        if n >= 1:
            one = f.one
            neg = f.neg
            adj = [(i, one if i % 2 == 0 else neg(one), "adj") for i in range(n)]
            dprime_amb = self._contract_ambient(n, adj, n - 1)
            sp1 = self.space(n - 1)
            ops["dprime"] = self._descend(dprime_amb, sp, sp1)
            wrap_sign = one if n % 2 == 0 else neg(one)
            d_amb = dprime_amb + self._contract_ambient(
                n, [(None, wrap_sign, "wrap")], n - 1)
            ops["d"] = self._descend(d_amb, sp, sp1)
        self._ops[n] = ops
        return ops

    def _descend(self, amb, src, tgt):
        m = tgt.Q @ amb @ src.S
        if not src.trivial:
            if (m @ src.Q) != tgt.Q @ amb:
                from .errors import ActionMismatch
                raise ActionMismatch(f"operator does not descend to {src.name}")
        return m

    # -- total complex ---------------------------------------------------

    def total(self, D):
        key = D
        if key not in self._d:
            self._d[key] = TotalComplex(self, D)
        return self._d[key]


class TotalComplex:
    """Truncated total complex: entries C_{p,q}, p+q <= D+1, with total
    differentials d_n for 1 <= n <= D+1 and the d.d = 0 certificate."""

    def __init__(self, cc, D):
        self.cc = cc
        self.D = D
        self.blocks = {}
        self.tot_dim = {}
        for n in range(D + 2):
            off = 0
            blocks = []
            for p in range(n + 1):
                q = n - p
                dim = cc.space(q).dim
                blocks.append((p, q, off, dim))
                off += dim
            guard_dim(off, f"Tot_{n}")
            self.blocks[n] = blocks
            self.tot_dim[n] = off
        self.d = {}
        for n in range(1, D + 2):
            self.d[n] = self._build_d(n)
        self.d_squared = Report(f"d.d=0 on {cc.name}")
        for n in range(2, D + 2):
            if not (self.d[n - 1] @ self.d[n]).is_zero():
                self.d_squared.fail("d-squared", n)

    def _offset(self, n, p):
        for (pp, q, off, dim) in self.blocks[n]:
            if pp == p:
                return off, dim
        return None

    def _build_d(self, n):
        cc = self.cc
        f = cc.field
        out = Mat.zeros(f, self.tot_dim[n - 1], self.tot_dim[n])
        for (p, q, coff, cdim) in self.blocks[n]:
            ops = cc.operators(q)
            if q >= 1:
                block = ops["d"] if p % 2 == 0 else -ops["dprime"]
                roff, _ = self._offset(n - 1, p)
                _add_block(out, block, roff, coff)
            if p >= 1:
                block = ops["tautilde"] if p % 2 == 1 else ops["N"]
                roff, _ = self._offset(n - 1, p - 1)
                _add_block(out, block, roff, coff)
        return out

    def chain_block(self, n, p, coords):
        """Place coordinates of C_{p, n-p} into a Tot_n chain vector."""
        off, dim = self._offset(n, p)
        if len(coords) != dim:
            raise DegreeMismatch("component has the wrong block dimension")
        f = self.cc.field
        v = [f.zero] * self.tot_dim[n]
        v[off:off + dim] = coords
        return v

    def is_cycle(self, n, chain):
        if n == 0:
            return True
        return not any(self.d[n].apply(chain))

    def is_boundary(self, n, chain):
        if n + 1 not in self.d:
            raise DegreeOutOfRange(f"need d_{n + 1}: increase D")
        rhs = Mat.from_cols(self.cc.field, [chain], self.tot_dim[n])
        return solve_right(self.d[n + 1], rhs) is not None

    def classes_equal(self, n, x, y):
        f = self.cc.field
        return self.is_boundary(n, [f.sub(a, b) for a, b in zip(x, y)])


def _add_block(big, block, roff, coff):
    for i, r in enumerate(block.rows):
        tgt = big.rows[roff + i]
        for j, v in r.items():
            tgt[coff + j] = v


class HomologyClass:
    def __init__(self, degree, representative, class_coords):
        self.degree = degree
        self.representative = representative
        self.class_coords = class_coords

    def __repr__(self):
        return f"HomologyClass(deg {self.degree}, coords {self.class_coords})"


class HomologySpace:
    """ker(d_n)/im(d_{n+1}) with canonical class coordinates."""

    def __init__(self, tc, n):
        if n > tc.D - 1:
            raise DegreeOutOfRange(f"homology at {n} needs max degree >= {n + 1}")
        self.tc = tc
        self.n = n
        f = tc.cc.field
        if n == 0:
            ker = SubspaceBasis.full(f, tc.tot_dim[0])
        else:
            ker = rref_solve(tc.d[n])["kernel"]
        self.kernel = ker
        dnext = tc.d[n + 1]
        # columns of d_{n+1} in kernel coordinates
        rels = []
        cols = dnext.transpose()
        for i in range(cols.nrows):
            col = cols.rows[i]
            dense = [f.zero] * tc.tot_dim[n]
            for r, v in col.items():
                dense[r] = v
            if not any(dense):
                continue
            coords = ker.membership(dense)
            assert coords is not None, "boundaries must be cycles"
            rels.append(coords)
        from .exactla import QuotientSpace
        self.class_space = QuotientSpace(
            f, ker.dim, SubspaceBasis.from_vectors(f, ker.dim, rels))
        self.dim = self.class_space.dim

    def class_of(self, chain):
        """Canonical class coordinates of a cycle."""
        coords = self.kernel.membership(chain)
        if coords is None:
            raise NotACycle(f"chain is not a cycle in degree {self.n}")
        cls = self.class_space.project(coords)
        rep_k = self.class_space.represent(cls)
        f = self.tc.cc.field
        rep = [f.zero] * self.tc.tot_dim[self.n]
        for i, c in enumerate(rep_k):
            if c:
                row = self.kernel.mat.row_list(i)
                rep = [f.add(a, f.mul(c, b)) for a, b in zip(rep, row)]
        return HomologyClass(self.n, rep, cls)

    def basis_classes(self):
        out = []
        f = self.tc.cc.field
        for i in range(self.dim):
            cls = [f.one if j == i else f.zero for j in range(self.dim)]
            rep_k = self.class_space.represent(cls)
            rep = [f.zero] * self.tc.tot_dim[self.n]
            for k, c in enumerate(rep_k):
                if c:
                    row = self.kernel.mat.row_list(k)
                    rep = [f.add(a, f.mul(c, b)) for a, b in zip(rep, row)]
            out.append(HomologyClass(self.n, rep, cls))
        return out


def homology(tc, n):
    return HomologySpace(tc, n)


def circular_space(b, t_pair, n):
    """B^{(*)T(n+1)} through the shared builder."""
    return cyclic_complex(b, t_pair).space(n)


def cyclic_operators(b, t_pair, n):
    """{tau, tautilde, N, dprime, d} at circular level n."""
    return cyclic_complex(b, t_pair).operators(n)


def build_total_complex(b, t_pair, D):
    return cyclic_complex(b, t_pair).total(D)


def lambda_projection(tc_k, tc_t, verify_degrees=None):
    """The canonical chain surjections lambda_n: Tot_n(B|k) -> Tot_n(B|T),
    verified to commute with the differentials.

    Returns the per-degree block matrices; raises DegreeMismatch when the
    complexes do not share B or the truncation degree."""
    if tc_k.cc.b is not tc_t.cc.b or tc_k.D != tc_t.D:
        raise DegreeMismatch("lambda needs the same algebra and truncation")
    lam = {}
    f = tc_k.cc.field
    for n in range(tc_k.D + 2):
        big = Mat.zeros(f, tc_t.tot_dim[n], tc_k.tot_dim[n])
        for (p, q, coff, cdim) in tc_k.blocks[n]:
            src = tc_k.cc.space(q)
            tgt = tc_t.cc.space(q)
            block = tgt.Q @ src.S
            roff, _ = tc_t._offset(n, p)
            _add_block(big, block, roff, coff)
        lam[n] = big
    degrees = verify_degrees if verify_degrees is not None else range(1, tc_k.D + 2)
    for n in degrees:
        if tc_t.d[n] @ lam[n] != lam[n - 1] @ tc_k.d[n]:
            raise DegreeMismatch(f"lambda is not a chain map at degree {n}")
    return lam


def lambda_project_class(tc_k, tc_t, n, chain, lam=None):
    if lam is None:
        lam = lambda_projection(tc_k, tc_t)
    return lam[n].apply(chain)
