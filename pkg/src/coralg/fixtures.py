"""Built-in example structures: small algebras and the named workspace
fixtures used by the CLI and the test suite.

Basis conventions:
  * quadratic algebra k[x]/(x^2 - a - b x): basis {1, x}
  * M_2: basis (E11, E12, E21, E22), row-major
  * upper triangular 2x2: basis (E11, E12, E22)
  * k x k: basis (e1, e2) of orthogonal idempotents
  * group coalgebra of Z_2: basis (g0, g1), Delta(gi) = gi (x) gi, eps = 1
"""

from .exactla import GF, QQ, Mat
from .ncalg import Algebra, Module, generated_subalgebra, scalar_algebra, tensor_space


def quadratic_algebra(field, a, b, name=None):
    """k[x]/(x^2 = a + b x), basis {1, x}."""
    one, zero = field.one, field.zero
    fa, fb = field.from_int(a), field.from_int(b)
    mult = [
        [[one, zero], [zero, one]],
        [[zero, one], [fa, fb]],
    ]
    return Algebra(field, name or f"k[x]/(x^2-{a}-{b}x)", 2, mult, [one, zero])


def matrix_algebra(field, n=2, name=None):
    """Full matrix algebra, basis E_ij row-major: index i*n + j."""
    dim = n * n
    zero, one = field.zero, field.one

    def unit_vec(k):
        v = [zero] * dim
        v[k] = one
        return v

    mult = []
    for i in range(n):
        for j in range(n):
            row = []
            for k in range(n):
                for l in range(n):
                    row.append(unit_vec(i * n + l) if j == k else [zero] * dim)
            mult.append(row)
    unit = [zero] * dim
    for i in range(n):
        unit[i * n + i] = one
    return Algebra(field, name or f"M{n}", dim, mult, unit)


def upper_triangular_algebra(field, name="ut2"):
    """Upper triangular 2x2 matrices, basis (E11, E12, E22)."""
    zero, one = field.zero, field.one
    z3 = [zero] * 3

    def v(k):
        w = list(z3)
        w[k] = one
        return w

    # E11*E11=E11, E11*E12=E12, E12*E22=E12, E22*E22=E22, rest zero
    mult = [
        [v(0), v(1), z3],
        [z3, z3, v(1)],
        [z3, z3, v(2)],
    ]
    return Algebra(field, name, 3, mult, [one, zero, one])


def product_field_algebra(field, name="kxk"):
    """k x k with orthogonal idempotent basis (e1, e2)."""
    zero, one = field.zero, field.one
    mult = [
        [[one, zero], [zero, zero]],
        [[zero, zero], [zero, one]],
    ]
    return Algebra(field, name, 2, mult, [one, one])


def diagonal_subalgebra(m2):
    """The diagonal subalgebra of M2, canonical rref basis, with inclusion."""
    f = m2.field
    e11 = [f.one, f.zero, f.zero, f.zero]
    e22 = [f.zero, f.zero, f.zero, f.one]
    return generated_subalgebra(m2, [e11, e22])


def upper_triangular_subalgebra(m2):
    f = m2.field
    vecs = []
    for k in (0, 1, 3):
        v = [f.zero] * 4
        v[k] = f.one
        vecs.append(v)
    return generated_subalgebra(m2, vecs)


def module_over_scalars(field, base, dim, name):
    """A k-module viewed as a bimodule over the one-dimensional algebra."""
    assert base.dim == 1
    m = Module(field, name, dim)
    m.add_left(base, [Mat.identity(field, dim)])
    m.add_right(base, [Mat.identity(field, dim)])
    return m


def group_z2_coring(field, base=None):
    """The group coalgebra of Z_2 over k: basis (g0, g1), Delta(gi)=gi(x)gi."""
    from .coring import Coring
    if base is None:
        base = scalar_algebra(field)
    carrier = module_over_scalars(field, base, 2, "kZ2")
    cc = tensor_space([carrier, carrier], [base])
    one, zero = field.one, field.zero
    delta = Mat.from_cols(field, [cc.embed_pure([[one, zero], [one, zero]]),
                                  cc.embed_pure([[zero, one], [zero, one]])],
                          cc.dim)
    eps = Mat.from_rows(field, [[one, one]])
    return Coring(base, carrier, delta, eps, name="kZ2")


def z2_graded_entwining(field, square=1):
    """The Z_2-graded quadratic algebra A = k[x]/(x^2 - square) entwined with
    the group coalgebra of Z_2: psi(g_i (x) x^j) = x^j (x) g_{i+j}."""
    from .entwine import Entwining, invert_entwining
    from .ncalg import AlgebraMorphism
    a = quadratic_algebra(field, square, 0, name=f"k[x]/(x^2-{square})")
    base = scalar_algebra(field)
    eta = AlgebraMorphism(base, a, Mat.from_cols(field, [a.unit], 2))
    cor = group_z2_coring(field, base=base)
    ent = Entwining(base, a, eta, cor, None, name="Z2-graded")
    psi = Mat.zeros(field, ent.AC.dim, ent.CA.dim)
    for i in range(2):          # g_i
        for j in range(2):      # x^j
            psi.rows[j * 2 + (i + j) % 2][i * 2 + j] = field.one
    ent.psi = psi
    return invert_entwining(ent)


def z2_fixture(field):
    """The graded fixture: extension, the one-dimensional comodules k.g0 and
    k.g1 with their coidempotents, packaged for tests and the CLI."""
    from .coring import Comodule, coidempotent_from_comodule
    from .entwine import extension_from_grouplike
    from .ncalg import projective_dual_basis
    ent = z2_graded_entwining(field)
    x = extension_from_grouplike(ent, [field.one, field.zero])
    base = ent.base
    out = {"entwining": ent, "extension": x, "comodules": {}, "coidempotents": {}}
    for idx, name in ((0, "e0"), (1, "e1")):
        carrier = module_over_scalars(field, base, 1, f"k.g{idx}")
        cw = tensor_space([ent.coring.carrier, carrier], [base])
        g = [field.one if i == idx else field.zero for i in range(2)]
        rho = Mat.from_cols(field, [cw.embed_pure([g, [field.one]])], cw.dim)
        w = Comodule(ent.coring, carrier, rho, "left", name=f"k.g{idx}")
        db = projective_dual_basis(carrier, base, side="left")
        e = coidempotent_from_comodule(w, db)
        out["comodules"][name] = (w, db)
        out["coidempotents"][name] = e
    return out


def nc_fixture(field):
    """M2 with the Sweedler coring of the upper triangulars: extension (the
    coinvariants come out as all of M2), the column comodule W = A.E11 and
    its coidempotent."""
    from .coring import Comodule, coidempotent_from_comodule
    from .entwine import extension_from_grouplike
    from .ncalg import Module, projective_dual_basis
    m2 = matrix_algebra(field, 2, name="M2")
    sub_pair = upper_triangular_subalgebra(m2)
    ent = sweedler_entwining(field, m2, sub_pair, name="NC")
    cor = ent.coring
    aa = cor.aa_space
    g = aa.embed_pure([m2.unit, m2.unit])
    x = extension_from_grouplike(ent, g)
    # W = A . E11 = span{E11, E21}, a left A-module and left C-comodule with
    # coaction a E11 -> (a (x)_B 1) (x)_A E11
    w_mod = Module(field, "A.E11", 2)
    wbasis = [[field.one, field.zero, field.zero, field.zero],
              [field.zero, field.zero, field.one, field.zero]]
    from .exactla import SubspaceBasis
    wspan = SubspaceBasis.from_vectors(field, 4, wbasis)
    lmats = []
    for k in range(4):
        cols = []
        for bvec in wbasis:
            img = m2.mul_vec(m2.basis_vector(k), bvec)
            cols.append(wspan.membership(img))
        lmats.append(Mat.from_cols(field, cols, 2))
    w_mod.add_left(m2, lmats)
    cw = tensor_space([cor.carrier, w_mod], [m2])
    cols = []
    for bvec in wbasis:
        cleg = aa.embed_pure([bvec, m2.unit])
        cols.append(cw.embed_pure([cleg, [field.one, field.zero]]))
    rho = Mat.from_cols(field, cols, cw.dim)
    w = Comodule(cor, w_mod, rho, "left", name="A.E11")
    db = projective_dual_basis(w_mod, m2, side="left")
    e = coidempotent_from_comodule(w, db)
    return {"entwining": ent, "extension": x, "comodule": (w, db),
            "coidempotent": e, "grouplike": g}


def sweedler_entwining(field, ring, sub_pair, name="Sweedler"):
    """Entwining over R = A obtained from the Sweedler coring A (x)_B A via
    the converse construction; the right action on A (x)_A C ~ C is the
    second-leg multiplication, transported along the collapse isomorphism."""
    from .entwine import Entwining, entwining_from_coring, invert_entwining, sweedler_coring
    from .exactla import inverse
    from .ncalg import AlgebraMorphism, leg_apply
    sub, incl = sub_pair
    cor, _aa = sweedler_coring(ring, sub, incl)
    eta = AlgebraMorphism.identity(ring)
    stub = Entwining(ring, ring, eta, cor, None, name=name)
    phi = leg_apply(stub.AC, cor.carrier, 0, 2,
                    cor.carrier.left_collapse_mat(ring), check="skip")
    phi_inv = inverse(phi)
    assert phi_inv is not None, "A (x)_A C -> C collapse must be invertible"
    rmats = [phi_inv @ cor.carrier.right[ring][j] @ phi for j in range(ring.dim)]
    ent = entwining_from_coring(stub, rmats)
    return invert_entwining(ent)


# ---------------------------------------------------------------------------
# Named workspace fixtures
# ---------------------------------------------------------------------------

FIXTURE_NAMES = ("FIX-TRIV", "FIX-Z2", "FIX-SW", "FIX-NC", "FIX-SEP", "FIX-FP")


def fixture_workspace(name):
    """Build the named fixture as a fully populated Workspace."""
    from .errors import UnknownFixture
    from .workspace import Workspace
    from .coring import Coidempotent, trivial_coring
    from .entwine import Entwining, extension_from_grouplike, invert_entwining
    from .ncalg import AlgebraMorphism
    if name == "FIX-FP":
        return _z2_workspace(GF(5))
    if name == "FIX-TRIV":
        field = QQ
        a = scalar_algebra(field, name="A")
        ws = Workspace(field)
        ws.algebras["A"] = a
        cor = trivial_coring(a, name="C")
        cor.carrier.name = "C"
        ws.bimodules["C"] = cor.carrier
        ws.corings["C"] = cor
        eta = AlgebraMorphism.identity(a)
        ent = Entwining(a, a, eta, cor, Mat.identity(field, 1), name="psi")
        ent = invert_entwining(ent)
        ws.entwinings["psi"] = ent
        x = extension_from_grouplike(ent, [field.one])
        ws.coactions["rho"] = ("A", "C", x.rho)
        ws.coidempotents["e"] = Coidempotent(cor, [[[field.one]]])
        ws.subalgebras["T"] = (x.T, x.incl_T_A)
        ws.subalgebras["T"][0].name = "T"
        return ws
    if name == "FIX-Z2":
        return _z2_workspace(QQ)
    if name == "FIX-SW":
        field = QQ
        a = quadratic_algebra(field, 1, 0, name="A")
        ws = Workspace(field)
        ws.algebras["A"] = a
        ent = sweedler_entwining(field, a, generated_subalgebra(a, []), name="psi")
        cor = ent.coring
        cor.name = "C"
        cor.carrier.name = "C"
        ws.bimodules["C"] = cor.carrier
        ws.corings["C"] = cor
        ws.entwinings["psi"] = ent
        g = cor.aa_space.embed_pure([a.unit, a.unit])
        x = extension_from_grouplike(ent, g)
        ws.coactions["rho"] = ("A", "C", x.rho)
        ws.coidempotents["e"] = Coidempotent(cor, [[g]])
        ws.subalgebras["T"] = (x.T, x.incl_T_A)
        ws.subalgebras["T"][0].name = "T"
        return ws
    if name == "FIX-NC":
        field = QQ
        fix = nc_fixture(field)
        x = fix["extension"]
        ent = fix["entwining"]
        m2 = ent.ring
        m2.name = "A"
        ws = Workspace(field)
        ws.algebras["A"] = m2
        cor = ent.coring
        cor.name = "C"
        cor.carrier.name = "C"
        ws.bimodules["C"] = cor.carrier
        ws.corings["C"] = cor
        ws.entwinings["psi"] = ent
        ws.coactions["rho"] = ("A", "C", x.rho)
        ws.coidempotents["e"] = fix["coidempotent"]
        ws.coidempotents["eg"] = Coidempotent(cor, [[fix["grouplike"]]])
        ws.subalgebras["T"] = (x.T, x.incl_T_A)
        ws.subalgebras["T"][0].name = "T"
        diag, diag_incl = diagonal_subalgebra(m2)
        diag.name = "diag"
        ws.subalgebras["diag"] = (diag, diag_incl)
        return ws
    if name == "FIX-SEP":
        field = QQ
        r = product_field_algebra(field, name="A")
        ws = Workspace(field)
        ws.algebras["A"] = r
        from .coring import trivial_coring
        cor = trivial_coring(r, name="C")
        cor.carrier.name = "C"
        ws.bimodules["C"] = cor.carrier
        ws.corings["C"] = cor
        eta = AlgebraMorphism.identity(r)
        ent = Entwining(r, r, eta, cor, Mat.identity(field, 2), name="psi")
        ent = invert_entwining(ent)
        ws.entwinings["psi"] = ent
        x = extension_from_grouplike(ent, list(r.unit))
        ws.coactions["rho"] = ("A", "C", x.rho)
        ws.coidempotents["e"] = Coidempotent(cor, [[list(r.unit)]])
        ws.subalgebras["Tprime"] = (x.T, x.incl_T_A)
        ws.subalgebras["Tprime"][0].name = "Tprime"
        return ws
    from .errors import UnknownFixture
    raise UnknownFixture(name)


def _z2_workspace(field):
    from .workspace import Workspace
    from .coring import Coidempotent
    from .entwine import extension_from_grouplike
    ent = z2_graded_entwining(field)
    ent.ring.name = "A"
    ent.base.name = "R"
    ent.coring.name = "C"
    ent.coring.carrier.name = "C"
    x = extension_from_grouplike(ent, [field.one, field.zero])
    ws = Workspace(field)
    ws.algebras["A"] = ent.ring
    ws.algebras["R"] = ent.base
    ws.bimodules["C"] = ent.coring.carrier
    ws.corings["C"] = ent.coring
    ws.entwinings["psi"] = ent
    ws.coactions["rho"] = ("A", "C", x.rho)
    one, zero = field.one, field.zero
    ws.coidempotents["e0"] = Coidempotent(ent.coring, [[[one, zero]]])
    ws.coidempotents["e1"] = Coidempotent(ent.coring, [[[zero, one]]])
    ws.subalgebras["T"] = (x.T, x.incl_T_A)
    ws.subalgebras["T"][0].name = "T"
    from .connect import solve_strong_connection
    sc, _ = solve_strong_connection(x)
    from .workspace import _fmt_mat
    ws.connections["ell"] = ("rho", "T", _fmt_mat(field, sc.ell))
    return ws


def fixture_document(name):
    from .workspace import serialize_workspace
    return serialize_workspace(fixture_workspace(name))
