"""Command line interface: workspace commands and machine-readable reports.

Exit codes: 0 = all verdicts pass, 1 = a mathematical verdict is negative,
2 = input error (schema violation, failed structure validator, unknown
command/fixture).  Reports are deterministic for identical inputs; timing
goes to stderr only.
"""

import argparse
import json
import sys
import time

from .errors import CoralgError, SchemaError, UnknownFixture, ValidationError
from .exactla import Mat
from .fixtures import FIXTURE_NAMES, fixture_document
from .workspace import parse_workspace, _fmt_mat, _fmt_vec


def _load(path):
    with open(path) as fh:
        return json.load(fh)


def _emit(report, out):
    text = json.dumps(report, indent=2, sort_keys=False)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _extension(ws, t_name=None):
    from .entwine import make_extension
    ent = ws.single_entwining()
    _, _, rho = ws.single_coaction()
    t_basis = None
    if t_name:
        sub, incl = ws.subalgebras[t_name]
        t_basis = [incl.apply(sub.basis_vector(i)) for i in range(sub.dim)]
    g = _detect_grouplike(ent, rho)
    return make_extension(ent, rho, t_basis=t_basis, grouplike=g)


def _detect_grouplike(ent, rho):
    """Recover g with rho = psi(g (x) -) when the coaction is grouplike
    induced; None otherwise."""
    from .coring import verify_grouplike
    from .exactla import solve_right
    z = ent.psi_inv.apply(rho.apply(ent.ring.unit)) if ent.psi_inv else None
    if z is None:
        return None
    cols = [ent.CA.embed_pure([ent.coring.carrier.basis_vector(i), ent.ring.unit])
            for i in range(ent.coring.dim)]
    m = Mat.from_cols(ent.ring.field, cols, ent.CA.dim)
    g = solve_right(m, Mat.from_cols(ent.ring.field, [z], len(z)))
    if g is None:
        return None
    g = g.col(0)
    if not verify_grouplike(ent.coring, g)[0]:
        return None
    from .ncalg import leg_apply
    gcol = Mat.from_cols(ent.ring.field, [g], ent.coring.dim)
    rho2 = ent.psi @ leg_apply(ent.a_mod, ent.CA, 0, 0, gcol, check="skip")
    return g if rho2 == rho else None


def _fail_list(failures):
    return [{"axiom": ax, "location": list(loc) if isinstance(loc, tuple) else loc}
            for ax, loc in failures]


def cmd_validate(ws, args):
    residuals = [{"structure": e.structure, "axiom": e.axiom,
                  "location": list(e.location) if isinstance(e.location, tuple)
                  else e.location}
                 for e in ws.validation_errors]
    return {"verdicts": {"valid": not residuals}, "residuals": residuals}, \
        0 if not residuals else 1


def cmd_coinvariants(ws, args):
    x = _extension(ws, args.T)
    basis = [_fmt_vec(ws.field, x.incl_B.apply(x.B.basis_vector(i)))
             for i in range(x.B.dim)]
    return {"verdicts": {}, "payload": {"dim": x.B.dim, "basis": basis}}, 0


def cmd_galois(ws, args):
    from .entwine import canonical_maps
    x = _extension(ws, args.T)
    res = canonical_maps(x)
    rep = {"verdicts": {"galois": res["galois"]},
           "payload": {"can": _fmt_mat(ws.field, res["can"])}}
    if res["can_inv"] is not None:
        rep["payload"]["can_inv"] = _fmt_mat(ws.field, res["can_inv"])
    return rep, 0 if res["galois"] else 1


def _connection_from_args(ws, x, args):
    from .connect import StrongConnection
    name = args.connection
    if name:
        if name not in ws.connections:
            raise SchemaError(f"connections.{name}", "unknown connection")
        ext, tname, raw = ws.connections[name]
        t_alg = x.T
        from .ncalg import tensor_space
        from .workspace import _parse_matrix
        aat = tensor_space([x.a_mod, x.a_mod], [t_alg])
        mat = _parse_matrix(ws.field, raw, aat.dim, x.entwining.coring.dim,
                            f"connections.{name}.matrix")
        return StrongConnection(x, mat, t_alg=t_alg)
    from .connect import solve_strong_connection
    sc, _ = solve_strong_connection(x)
    if sc is None:
        raise CoralgError("no strong connection exists")
    return sc


def cmd_connection(ws, args):
    from .connect import solve_strong_connection, verify_strong_connection
    x = _extension(ws, args.T)
    if args.mode == "solve":
        sc, sol = solve_strong_connection(x)
        if sc is None:
            return {"verdicts": {"exists": False}}, 1
        return {"verdicts": {"exists": True},
                "payload": {"matrix": _fmt_mat(ws.field, sc.ell),
                            "freedom": sol.freedom}}, 0
    sc = _connection_from_args(ws, x, args)
    rep = verify_strong_connection(sc)
    return {"verdicts": {"strong_connection": rep.ok},
            "residuals": _fail_list(rep.failures)}, 0 if rep.ok else 1


def cmd_integral(ws, args):
    from .connect import total_integral
    x = _extension(ws, args.T)
    res = total_integral(x)
    rep = {"verdicts": {"relative_injective": res["relative_injective"],
                        "split_condition": res["split_condition"]}}
    if res["j"] is not None:
        rep["payload"] = {"j": _fmt_mat(ws.field, res["j"]),
                          "h": _fmt_mat(ws.field, res["h"])}
    return rep, 0 if res["relative_injective"] else 1


def cmd_tflat(ws, args):
    from .connect import tflatness_check
    x = _extension(ws, args.T)
    res = tflatness_check(x)
    return {"verdicts": {"t_flat": res["verdict"], "iso": res["iso"],
                         **res["flags"]}}, 0 if res["verdict"] else 1


def cmd_hc(ws, args):
    from .cyclic import cyclic_complex, homology
    x = _extension(ws, args.T)
    n = args.degree
    D = max(ws.options["max_degree"], n + 1)
    cc = cyclic_complex(x.B, (x.T, x.incl_T_B))
    tc = cc.total(D)
    dims = [homology(tc, k).dim for k in range(n + 1)]
    return {"verdicts": {"d_squared_zero": tc.d_squared.ok},
            "payload": {"dims": dims}}, 0 if tc.d_squared.ok else 1


def cmd_chg(ws, args):
    from .cherngalois import assemble_and_class, chg_components
    x = _extension(ws, args.T)
    if args.coidempotent not in ws.coidempotents:
        raise SchemaError(f"coidempotents.{args.coidempotent}", "unknown")
    e = ws.coidempotents[args.coidempotent]
    sc = _connection_from_args(ws, x, args)
    n = args.degree
    chg = chg_components(e, sc, 2 * n)
    tc = chg.cc_b.total(max(ws.options["max_degree"], 2 * n + 1))
    res = assemble_and_class(chg, n, tc)
    return {"verdicts": {"cycle": True},
            "payload": {
                "components": [_fmt_vec(ws.field, c) for c in chg.comps],
                "class": _fmt_vec(ws.field, res["class"].class_coords),
                "hc_dim": res["homology"].dim,
            }}, 0


def cmd_idempotent(ws, args):
    from .cherngalois import idempotent_e, local_dual_system
    x = _extension(ws, args.T)
    e = ws.coidempotents[args.coidempotent]
    sc = _connection_from_args(ws, x, args)
    dual = local_dual_system(x, sc, e)
    phi = _default_phi(x)
    em = idempotent_e(x, sc, e, dual, phi)
    entries = {f"{a},{c}": _fmt_vec(ws.field, em.entries[(a, c)])
               for a in range(em.size) for c in range(em.size)}
    return {"verdicts": {"idempotent": True},
            "payload": {"size": em.size, "entries": entries}}, 0


def _default_phi(x):
    """A B-T bilinear retraction of B in A found by the solver."""
    from .ncalg import Equation, eqs_linear, hom_solve
    f = x.B.field
    ring = x.entwining.ring
    eqs = eqs_linear(x.B, x.a_mod, x.b_mod, "left")
    eqs += eqs_linear(x.T, x.a_mod, x.b_mod, "right")
    eqs.append(Equation([("LXR", Mat.identity(f, x.B.dim), x.incl_B.matrix, 1)],
                        rhs=Mat.identity(f, x.B.dim)))
    sol = hom_solve(f, ring.dim, x.B.dim, eqs)
    if sol.is_empty:
        raise CoralgError("no B-T bilinear retraction of the inclusion exists")
    return sol.particular


def cmd_compare(ws, args):
    from .cherngalois import chg_components, compare_chg_ch, idempotent_e, \
        local_dual_system
    x = _extension(ws, args.T)
    e = ws.coidempotents[args.coidempotent]
    sc = _connection_from_args(ws, x, args)
    dual = local_dual_system(x, sc, e)
    phi = _default_phi(x)
    em = idempotent_e(x, sc, e, dual, phi)
    L = 4
    chg = chg_components(e, sc, L)
    rep = compare_chg_ch(chg, em, L)
    return {"verdicts": {"chain_equality": rep.ok},
            "residuals": _fail_list(rep.failures)}, 0 if rep.ok else 1


COMMANDS = {
    "validate": cmd_validate,
    "coinvariants": cmd_coinvariants,
    "galois": cmd_galois,
    "connection": cmd_connection,
    "integral": cmd_integral,
    "tflat": cmd_tflat,
    "hc": cmd_hc,
    "chg": cmd_chg,
    "idempotent": cmd_idempotent,
    "compare": cmd_compare,
}


def build_parser():
    p = argparse.ArgumentParser(
        prog="coralg",
        description="exact computations with corings, entwining structures, "
                    "strong connections and Chern-Galois characters")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        if name == "connection":
            sp.add_argument("mode", choices=["solve", "verify"])
        sp.add_argument("--workspace", required=True)
        sp.add_argument("--out", default=None)
        sp.add_argument("--degree", type=int, default=0)
        sp.add_argument("--coidempotent", default=None)
        sp.add_argument("--connection", default=None)
        sp.add_argument("--T", default=None)
    fx = sub.add_parser("fixture")
    fx.add_argument("name")
    fx.add_argument("--out", default=None)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    t0 = time.monotonic()
    try:
        if args.command == "fixture":
            if args.name not in FIXTURE_NAMES:
                raise UnknownFixture(args.name)
            _emit(fixture_document(args.name), args.out)
            return 0
        doc = _load(args.workspace)
        ws = parse_workspace(doc)
        if args.command != "validate" and ws.validation_errors:
            sys.stderr.write("workspace fails validation; run `validate`\n")
            return 2
        body, code = COMMANDS[args.command](ws, args)
        report = {"command": args.command}
        report.update(body)
        _emit(report, args.out)
        return code
    except (SchemaError, ValidationError, UnknownFixture) as exc:
        sys.stderr.write(f"input error: {exc}\n")
        return 2
    except FileNotFoundError as exc:
        sys.stderr.write(f"input error: {exc}\n")
        return 2
    except CoralgError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    finally:
        sys.stderr.write(f"elapsed: {time.monotonic() - t0:.3f}s\n")


if __name__ == "__main__":
    sys.exit(main())
