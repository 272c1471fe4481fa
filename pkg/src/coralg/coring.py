"""R-corings, comodules, grouplikes, dual rings, (co)separability data,
coidempotent matrices and cotensor products.

A coring is a comonoid in R-bimodules: carrier C with a coproduct
Delta: C -> C (x)_R C and counit eps: C -> R, both R-R bilinear, satisfying
coassociativity and the counit laws.  Sweedler components are only ever
manipulated through canonical quotient coordinates.
"""

from .errors import InvalidCoidempotent, NotProjective
from .exactla import Mat, SubspaceBasis
from .ncalg import (
    Algebra, Equation, Module, Report, _fail_cols, _kron_id_left,
    _kron_id_right, eqs_linear, hom_solve, kron_id, leg_apply,
    regular_bimodule, tensor_space, validate_module,
)


class Coring:
    """An R-coring; ``delta`` and ``eps`` are matrices in canonical
    coordinates (delta: C -> C (x)_R C, eps: C -> R)."""

    def __init__(self, base, carrier, delta, eps, name="C"):
        self.base = base
        self.carrier = carrier
        self.delta = delta
        self.eps = eps
        self.name = name
        self.CC = tensor_space([carrier, carrier], [base], name=f"{name}(x){name}")

    def __repr__(self):
        return f"Coring({self.name} over {self.base.name}, dim {self.carrier.dim})"

    @property
    def dim(self):
        return self.carrier.dim

    def delta_full(self):
        """Delta with target lifted to the full C (x)_k C ambient."""
        return self.CC.S @ self.delta

    def triple_space(self):
        c = self.carrier
        return tensor_space([c, c, c], [self.base, self.base],
                            name=f"{self.name}^(x)3")


def trivial_coring(base, name=None):
    """C = R with Delta the canonical iso R -> R (x)_R R and eps = id."""
    carrier = regular_bimodule(base, name=name or f"{base.name}-triv")
    cc = tensor_space([carrier, carrier], [base])
    delta = Mat.from_cols(base.field,
                          [cc.embed_pure([base.basis_vector(i), base.unit])
                           for i in range(base.dim)],
                          cc.dim)
    eps = Mat.identity(base.field, base.dim)
    return Coring(base, carrier, delta, eps, name=name or f"triv({base.name})")


def validate_coring(c):
    """Bimodule linearity of Delta and eps, coassociativity, both counit
    identities; every violation is located at the offending basis column."""
    rep = Report(c.name)
    rep.merge(validate_module(c.carrier, c.base, c.base), prefix="carrier")
    base, car = c.base, c.carrier
    f = base.field
    rreg = regular_bimodule(base)
    for i in range(base.dim):
        lhs = c.delta @ car.left[base][i]
        rhs = c.CC.outer_left[base][i] @ c.delta
        _fail_cols(rep, f"delta-left-linear[{i}]", lhs - rhs)
        lhs = c.delta @ car.right[base][i]
        rhs = c.CC.outer_right[base][i] @ c.delta
        _fail_cols(rep, f"delta-right-linear[{i}]", lhs - rhs)
        lhs = c.eps @ car.left[base][i]
        rhs = rreg.left[base][i] @ c.eps
        _fail_cols(rep, f"eps-left-linear[{i}]", lhs - rhs)
        lhs = c.eps @ car.right[base][i]
        rhs = rreg.right[base][i] @ c.eps
        _fail_cols(rep, f"eps-right-linear[{i}]", lhs - rhs)
    ccc = c.triple_space()
    d_full = c.delta_full()
    d1 = leg_apply(c.CC, ccc, 0, 1, d_full, check="skip") @ c.delta
    d2 = leg_apply(c.CC, ccc, 1, 1, d_full, check="skip") @ c.delta
    _fail_cols(rep, "coassociativity", d1 - d2)
    left_cu = car.left_collapse_mat(base) @ kron_id(1, c.eps, car.dim) @ c.CC.S @ c.delta
    right_cu = car.right_collapse_mat(base) @ kron_id(car.dim, c.eps, 1) @ c.CC.S @ c.delta
    ident = Mat.identity(f, car.dim)
    _fail_cols(rep, "counit-left", left_cu - ident)
    _fail_cols(rep, "counit-right", right_cu - ident)
    return rep


class Comodule:
    """A right or left C-comodule; ``coaction`` maps carrier coordinates to
    the canonical coordinates of M (x)_R C (right) or C (x)_R M (left)."""

    def __init__(self, coring, carrier, coaction, side, name="M"):
        self.coring = coring
        self.carrier = carrier
        self.coaction = coaction
        self.side = side
        self.name = name
        if side == "right":
            self.space = tensor_space([carrier, coring.carrier], [coring.base],
                                      name=f"{name}(x){coring.name}")
        else:
            self.space = tensor_space([coring.carrier, carrier], [coring.base],
                                      name=f"{coring.name}(x){name}")

    def __repr__(self):
        return f"Comodule({self.name}, {self.side} over {self.coring.name})"

    def coaction_full(self):
        return self.space.S @ self.coaction


def regular_comodule(c, side="right"):
    return Comodule(c, c.carrier, c.delta, side, name=c.name)


def validate_comodule(m):
    """R-linearity, coassociativity and counitality of the coaction."""
    rep = Report(m.name)
    c = m.coring
    base = c.base
    car = m.carrier
    rho = m.coaction
    if m.side == "right":
        for i in range(base.dim):
            lhs = rho @ car.right[base][i]
            rhs = m.space.outer_right[base][i] @ rho
            _fail_cols(rep, f"coaction-right-linear[{i}]", lhs - rhs)
        mcc = tensor_space([car, c.carrier, c.carrier], [base, base])
        t1 = leg_apply(m.space, mcc, 0, 1, m.coaction_full(), check="skip") @ rho
        t2 = leg_apply(m.space, mcc, 1, 1, c.delta_full(), check="skip") @ rho
        _fail_cols(rep, "coassociativity", t1 - t2)
        cu = car.right_collapse_mat(base) @ kron_id(car.dim, c.eps, 1) @ m.space.S @ rho
        _fail_cols(rep, "counit", cu - Mat.identity(base.field, car.dim))
    else:
        for i in range(base.dim):
            lhs = rho @ car.left[base][i]
            rhs = m.space.outer_left[base][i] @ rho
            _fail_cols(rep, f"coaction-left-linear[{i}]", lhs - rhs)
        ccm = tensor_space([c.carrier, c.carrier, car], [base, base])
        t1 = leg_apply(m.space, ccm, 1, 1, m.coaction_full(), check="skip") @ rho
        t2 = leg_apply(m.space, ccm, 0, 1, c.delta_full(), check="skip") @ rho
        _fail_cols(rep, "coassociativity", t1 - t2)
        cu = car.left_collapse_mat(base) @ kron_id(1, c.eps, car.dim) @ m.space.S @ rho
        _fail_cols(rep, "counit", cu - Mat.identity(base.field, car.dim))
    return rep


def verify_grouplike(c, e):
    """Delta(e) = e (x) e and eps(e) = 1_R, exactly; returns (bool, residuals)."""
    d_res = [a - b for a, b in zip(c.delta.apply(e), c.CC.embed_pure([e, e]))]
    e_res = [a - b for a, b in zip(c.eps.apply(e), c.base.unit)]
    ok = not any(d_res) and not any(e_res)
    return ok, {"delta": d_res, "eps": e_res}


def coinvariants(m, e):
    """Canonical basis of {x : coaction(x) = x (x) e} (resp. e (x) x)."""
    car = m.carrier
    cols = []
    for i in range(car.dim):
        b = car.basis_vector(i)
        legs = [b, e] if m.side == "right" else [e, b]
        cols.append(m.space.embed_pure(legs))
    em = Mat.from_cols(car.field, cols, m.space.dim)
    from .exactla import rref_solve
    return rref_solve(m.coaction - em)["kernel"]


# ---------------------------------------------------------------------------
# Left dual ring
# ---------------------------------------------------------------------------

def dual_ring(c):
    """The left R-dual *C = Hom_{R-}(C, R) with (ff')(c) = f'(c_(1) f(c_(2))).

    Returns (Algebra, data) where data has the basis maps, the unit map
    matrix eta: R -> *C, and ``module_of_comodule`` installing the induced
    right *C-action on a right comodule.
    """
    base, car = c.base, c.carrier
    f = base.field
    rreg = regular_bimodule(base)
    sol = hom_solve(f, car.dim, base.dim, eqs_linear(base, car, rreg, "left"))
    basis_flat = sol.homogeneous
    fs = [sol._unflatten(basis_flat.mat.row_list(i)) for i in range(basis_flat.dim)]
    dim = len(fs)
    rc = car.right_collapse_mat(base)

    def contract(fa):
        # c -> c_(1) f(c_(2)) as a matrix C -> C
        return rc @ kron_id(car.dim, fa, 1) @ c.CC.S @ c.delta

    mult = []
    for fa in fs:
        row = []
        ga = contract(fa)
        for fb in fs:
            prod = fb @ ga
            flat = [prod.get(i, j) for i in range(base.dim) for j in range(car.dim)]
            coords = basis_flat.membership(flat)
            assert coords is not None, "dual ring product left the hom space"
            row.append(coords)
        mult.append(row)
    unit = basis_flat.membership(
        [c.eps.get(i, j) for i in range(base.dim) for j in range(car.dim)])
    assert unit is not None
    star = Algebra(f, f"*{c.name}", dim, mult, unit)
    eta_cols = []
    for i in range(base.dim):
        mi = c.eps @ car.right[base][i]
        eta_cols.append(basis_flat.membership(
            [mi.get(a, b) for a in range(base.dim) for b in range(car.dim)]))
    eta = Mat.from_cols(f, eta_cols, dim)

    def module_of_comodule(m):
        """Install m . f = m_(0) f(m_(1)) as a right *C-action."""
        assert m.side == "right"
        mats = []
        mc_s = m.space.S
        rcol = m.carrier.right_collapse_mat(base)
        for fa in fs:
            mats.append(rcol @ kron_id(m.carrier.dim, fa, 1) @ mc_s @ m.coaction)
        m.carrier.add_right(star, mats)
        return m.carrier

    return star, {"maps": fs, "eta": eta, "module_of_comodule": module_of_comodule}


# ---------------------------------------------------------------------------
# (Co)separability
# ---------------------------------------------------------------------------

def separability_idempotent(a, base, a_mod):
    """Solve for a separability idempotent z in A (x)_base A:
    a . z = z . a for all a, and mu(z) = 1_A.  base=None works over k.

    Returns None or a dict with ``z`` (canonical coordinates), the space,
    and ``retraction`` turning a left B-linear map into a B-R bilinear one
    (only meaningful for base=None, i.e. a separable k-algebra)."""
    f = a.field
    aa = tensor_space([a_mod, a_mod], [base], name=f"{a.name}(x){a.name}")
    eqs = []
    one_col = Mat.identity(f, 1)
    for i in range(a.dim):
        eqs.append(Equation([("LXR", aa.outer_left[a][i], one_col, 1),
                             ("LXR", aa.outer_right[a][i], one_col, -1)]))
    mu_bar = leg_apply(aa, a_mod, 0, 2, a.mult_mat(), check="skip")
    eqs.append(Equation([("LXR", mu_bar, one_col, 1)],
                        rhs=Mat.from_cols(f, [a.unit], a.dim)))
    sol = hom_solve(f, 1, aa.dim, eqs)
    if sol.is_empty:
        return None
    z = sol.particular.col(0)

    def retraction(fmap, m_mod, n_mod):
        """For z = sum e_l (x) f_l over k: f -> sum R_N[f_l] f R_M[e_l]."""
        assert base is None, "functorial retraction needs a separability over k"
        out = Mat.zeros(f, fmap.nrows, fmap.ncols)
        for flat, v in enumerate(z):
            if not v:
                continue
            i, j = divmod(flat, a.dim)
            term = n_mod.right[a][j] @ fmap @ m_mod.right[a][i]
            out = out + term.scale(v)
        return out

    return {"z": z, "space": aa, "retraction": retraction, "solutions": sol}


def separability_solve(kind, *args, **kwargs):
    """Dispatcher: kind "cointegral" solves for a cointegral of a coring;
    kind "separability" for a separability idempotent of an algebra."""
    if kind == "cointegral":
        return cointegral(*args, **kwargs)
    if kind == "separability":
        return separability_idempotent(*args, **kwargs)
    raise ValueError(f"unknown separability kind {kind!r}")


def search_grouplikes(c, max_bits=16):
    """Exhaustive grouplike search, prime fields only; guarded by
    dim(C) * log2(p) <= max_bits.  Grouplike verification is quadratic, so
    the core API only verifies; this is a convenience for tiny cases."""
    field = c.base.field
    if field.p is None:
        raise ValueError("exhaustive search needs a prime field")
    import math
    if c.carrier.dim * math.log2(field.p) > max_bits:
        raise ValueError("search space exceeds the configured bound")
    found = []
    dim = c.carrier.dim
    total = field.p ** dim
    for code in range(total):
        v = []
        rem = code
        for _ in range(dim):
            v.append(rem % field.p)
            rem //= field.p
        if verify_grouplike(c, v)[0]:
            found.append(v)
    return found


def cointegral(c):
    """Solve for a cointegral delta: C (x)_R C -> R.

    Returns None or a dict with the matrix and a ``retraction`` factory
    turning a right R-linear map of right comodules into a colinear one."""
    base, car = c.base, c.carrier
    f = base.field
    rreg = regular_bimodule(base)
    from .ncalg import Equation
    eqs = eqs_linear(base, c.CC, rreg, "left") + eqs_linear(base, c.CC, rreg, "right")
    ccc = c.triple_space()
    d1 = leg_apply(c.CC, ccc, 0, 1, c.delta_full(), check="skip")
    d2 = leg_apply(c.CC, ccc, 1, 1, c.delta_full(), check="skip")
    rc = car.right_collapse_mat(base)
    lc = car.left_collapse_mat(base)
    u_left = _kron_id_left(car.dim, c.CC.Q) @ ccc.S @ d1
    u_right = _kron_id_right(c.CC.Q, car.dim) @ ccc.S @ d2
    eqs.append(Equation([("QXU_left", rc, u_left, car.dim, 1),
                         ("QXU_right", lc, u_right, car.dim, -1)],
                        label="cointegral-coassoc"))
    eqs.append(Equation([("LXR", Mat.identity(f, base.dim), c.delta, 1)],
                        rhs=c.eps, label="cointegral-counit"))
    sol = hom_solve(f, c.CC.dim, base.dim, eqs)
    if sol.is_empty:
        return None
    delta = sol.particular

    def retraction(fmap, m, n):
        """(N (x) delta)(rho_N (x) C)(f (x) C) rho_M for right comodules m, n."""
        nc = n.space
        ncc = tensor_space([n.carrier, c.carrier, c.carrier], [base, base])
        f1 = leg_apply(m.space, nc, 0, 1, fmap, check="skip")
        f2 = leg_apply(nc, ncc, 0, 1, n.coaction_full(), check="skip")
        dfull = delta @ c.CC.Q
        f3 = n.carrier.right_collapse_mat(base) @ kron_id(n.carrier.dim, dfull, 1) @ ncc.S
        return f3 @ f2 @ f1 @ m.coaction

    return {"delta": delta, "retraction": retraction, "solutions": sol}


# ---------------------------------------------------------------------------
# Coidempotents
# ---------------------------------------------------------------------------

class Coidempotent:
    """A finite matrix (e_ij) in C with Delta(e_ij) = sum_k e_ik (x) e_kj."""

    def __init__(self, coring, entries):
        self.coring = coring
        self.entries = entries
        self.size = len(entries)

    def counit_matrix(self):
        return [[self.coring.eps.apply(e) for e in row] for row in self.entries]

    def __repr__(self):
        return f"Coidempotent({self.size}x{self.size} in {self.coring.name})"


def validate_coidempotent(e):
    """Coidempotency of the matrix and idempotency of its counit matrix."""
    rep = Report(f"coidempotent({e.coring.name})")
    c = e.coring
    f = c.base.field
    n = e.size
    for i in range(n):
        for j in range(n):
            lhs = c.delta.apply(e.entries[i][j])
            rhs = [f.zero] * c.CC.dim
            for k in range(n):
                t = c.CC.embed_pure([e.entries[i][k], e.entries[k][j]])
                rhs = [f.add(a, b) for a, b in zip(rhs, t)]
            if lhs != rhs:
                rep.fail("coidempotency", (i, j))
    p = e.counit_matrix()
    base = c.base
    for i in range(n):
        for j in range(n):
            acc = [f.zero] * base.dim
            for k in range(n):
                w = base.mul_vec(p[i][k], p[k][j])
                acc = [f.add(a, b) for a, b in zip(acc, w)]
            if acc != p[i][j]:
                rep.fail("counit-idempotency", (i, j))
    return rep


def coidempotent_from_comodule(w, db):
    """e_ij = (C (x) chi_j)[coaction(w_i)] for a finite dual basis of a left
    comodule that is f.g. projective as a left R-module.

    All three defining properties are verified before returning.
    """
    if not db.projective:
        raise NotProjective(f"{w.name} has no dual basis")
    c = w.coring
    base, car = c.base, c.carrier
    f = base.field
    n = len(db.ws)
    rc = car.right_collapse_mat(base)
    ks = [rc @ kron_id(car.dim, chi, 1) @ w.space.S for chi in db.chis]
    entries = []
    for i in range(n):
        li = w.coaction.apply(db.ws[i])
        entries.append([k.apply(li) for k in ks])
    e = Coidempotent(c, entries)
    # property (1): coaction(w_i) = sum_j e_ij (x) w_j
    for i in range(n):
        acc = [f.zero] * w.space.dim
        for j in range(n):
            t = w.space.embed_pure([entries[i][j], db.ws[j]])
            acc = [f.add(a, b) for a, b in zip(acc, t)]
        if acc != w.coaction.apply(db.ws[i]):
            raise InvalidCoidempotent(f"property (1) fails at row {i}")
    # property (2): e_ij = sum_k chi_k(w_i) e_kj = sum_k e_ik chi_j(w_k)
    for i in range(n):
        for j in range(n):
            acc1 = [f.zero] * car.dim
            acc2 = [f.zero] * car.dim
            for k in range(n):
                r = db.chis[k].apply(db.ws[i])
                acc1 = [f.add(a, b) for a, b in
                        zip(acc1, car.act_left(base, r, entries[k][j]))]
                r2 = db.chis[j].apply(db.ws[k])
                acc2 = [f.add(a, b) for a, b in
                        zip(acc2, car.act_right(base, entries[i][k], r2))]
            if acc1 != entries[i][j] or acc2 != entries[i][j]:
                raise InvalidCoidempotent(f"property (2) fails at {(i, j)}")
    rep = validate_coidempotent(e)
    if not rep.ok:
        raise InvalidCoidempotent(str(rep.failures[:3]))
    return e


def comodule_from_coidempotent(c, e, side="left", name=None):
    """Reconstruct the comodule W = R^(I) p from a coidempotent matrix.

    Left side: W = row space of p with coaction
    (sum_i r_i p_ij)_j -> sum_{i,k} r_i e_ik (x) (p_kj)_j.
    """
    rep = validate_coidempotent(e)
    if not rep.ok:
        raise InvalidCoidempotent(str(rep.failures[:3]))
    base = c.base
    f = base.field
    n = e.size
    p = e.counit_matrix()
    dim_amb = n * base.dim
    vecs = []
    if side == "left":
        # images of the unit rows u_k: row_k(p) laid out block-by-block
        for k in range(n):
            v = [f.zero] * dim_amb
            for j in range(n):
                for t, x in enumerate(p[k][j]):
                    v[j * base.dim + t] = x
            vecs.append(v)
    else:
        for k in range(n):
            v = [f.zero] * dim_amb
            for i in range(n):
                for t, x in enumerate(p[i][k]):
                    v[i * base.dim + t] = x
            vecs.append(v)
    basis = SubspaceBasis.from_vectors(f, dim_amb, vecs)
    wdim = basis.dim
    carrier = Module(f, name or f"W({c.name})", wdim)
    blocks = {
        "left": [base.left_mult_mats(), base.right_mult_mats()],
        "right": [base.left_mult_mats(), base.right_mult_mats()],
    }[side]

    def induced(mats):
        out = []
        for m in mats:
            big = kron_id(n, m, 1)
            cols = []
            for b in range(wdim):
                img = big.apply(basis.mat.row_list(b))
                coords = basis.membership(img)
                assert coords is not None, "W not closed under the action"
                cols.append(coords)
            out.append(Mat.from_cols(f, cols, wdim))
        return out

    carrier.add_left(base, induced(blocks[0]))
    carrier.add_right(base, induced(blocks[1]))
    if side == "left":
        space = tensor_space([c.carrier, carrier], [base])
    else:
        space = tensor_space([carrier, c.carrier], [base])
    cols = []
    for b in range(wdim):
        wv = basis.mat.row_list(b)
        acc = [f.zero] * space.dim
        for k in range(n):
            if side == "left":
                # c-leg: sum_i w_i . e_ik ; w-leg: row_k(p)
                cleg = [f.zero] * c.carrier.dim
                for i in range(n):
                    ri = wv[i * base.dim:(i + 1) * base.dim]
                    if any(ri):
                        cleg = [f.add(a, x) for a, x in
                                zip(cleg, c.carrier.act_left(base, ri, e.entries[i][k]))]
                wk = [f.zero] * dim_amb
                for j in range(n):
                    for t, x in enumerate(p[k][j]):
                        wk[j * base.dim + t] = x
                wcoords = basis.membership(wk)
                term = space.embed_pure([cleg, wcoords])
            else:
                # w-leg: col_k(p); c-leg: sum_i e_ki . w_i
                cleg = [f.zero] * c.carrier.dim
                for i in range(n):
                    ri = wv[i * base.dim:(i + 1) * base.dim]
                    if any(ri):
                        cleg = [f.add(a, x) for a, x in
                                zip(cleg, c.carrier.act_right(base, e.entries[k][i], ri))]
                wk = [f.zero] * dim_amb
                for i in range(n):
                    for t, x in enumerate(p[i][k]):
                        wk[i * base.dim + t] = x
                wcoords = basis.membership(wk)
                term = space.embed_pure([wcoords, cleg])
            acc = [f.add(a, x) for a, x in zip(acc, term)]
        cols.append(acc)
    coaction = Mat.from_cols(f, cols, space.dim)
    w = Comodule(c, carrier, coaction, side, name=carrier.name)
    rep = validate_comodule(w)
    if not rep.ok:
        raise InvalidCoidempotent(f"reconstructed comodule invalid: {rep.failures[:3]}")
    return w


def direct_sum_coidempotents(e1, e2):
    """Block-diagonal coidempotent over the disjoint union of index sets."""
    assert e1.coring is e2.coring
    c = e1.coring
    f = c.base.field
    zero = [f.zero] * c.carrier.dim
    n1, n2 = e1.size, e2.size
    entries = []
    for i in range(n1):
        entries.append([list(v) for v in e1.entries[i]] + [list(zero)] * n2)
    for i in range(n2):
        entries.append([list(zero)] * n1 + [list(v) for v in e2.entries[i]])
    e = Coidempotent(c, entries)
    rep = validate_coidempotent(e)
    if not rep.ok:
        raise InvalidCoidempotent(str(rep.failures[:3]))
    return e


# ---------------------------------------------------------------------------
# Cotensor product
# ---------------------------------------------------------------------------

def cotensor(m, w):
    """The equalizer M box_C W inside M (x)_R W for a right comodule m and a
    left comodule w; returns (SubspaceBasis, the M (x)_R W TensorSpace)."""
    assert m.coring is w.coring and m.side == "right" and w.side == "left"
    c = m.coring
    base = c.base
    mw = tensor_space([m.carrier, w.carrier], [base],
                      name=f"{m.name}box{w.name}")
    mcw = tensor_space([m.carrier, c.carrier, w.carrier], [base, base])
    t1 = leg_apply(mw, mcw, 0, 1, m.coaction_full(), check="skip")
    t2 = leg_apply(mw, mcw, 1, 1, w.coaction_full(), check="skip")
    from .exactla import rref_solve
    ker = rref_solve(t1 - t2)["kernel"]
    return ker, mw
