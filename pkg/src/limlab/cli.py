"""Command-line front end.

Every subcommand prints one JSON report ``{"command", "status", "ledger"}``
on stdout and a one-line summary on stderr.  Exit code 0 means PASS/SAT,
1 means FAIL/UNSAT, 2 means the input was rejected.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
import time
from typing import Optional, Sequence

from . import exprcalc as ex
from . import families as fam
from . import forcing, formats, ordcomb
from .formats import InputError

EXIT = {"PASS": 0, "SAT": 0, "FAIL": 1, "UNSAT": 1}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError("argv", message)


def _point(x) -> list:
    return [int(x[0]), int(x[1])]


def _failure_detail(bad) -> Optional[dict]:
    if bad is None:
        return None
    t, points = bad
    return {"tuple": list(t), "points": [_point(x) for x in points[:10]]}


def _load_family(path: str, kstar: Optional[int]) -> fam.Family:
    phi = formats.family_from_json(formats.load_json(path))
    if kstar is not None:
        if not 0 <= kstar <= phi.N:
            raise InputError("--kstar", f"must lie in 0..{phi.N}")
        phi = phi.with_kstar(kstar)
    return phi


def _ordset(text: str, flag: str) -> tuple:
    try:
        return ordcomb.parse_ordset(text)
    except ValueError as exc:
        raise InputError(flag, str(exc)) from None


# -- subcommands --------------------------------------------------------------

def cmd_check_coherence(a):
    phi = _load_family(a.input, a.kstar)
    bad = fam.coherence_failure(phi)
    ledger = {"n": phi.n, "kstar": phi.kstar, "tuples_checked": sum(1 for _ in phi.tuples(phi.n + 1))}
    if bad:
        ledger["failure"] = _failure_detail(bad)
        return "FAIL", ledger
    return "PASS", ledger


def cmd_trivialize(a):
    phi = _load_family(a.input, a.kstar)
    res = fam.solve_finsup(phi, check=not a.no_check)
    if not res.sat:
        return "UNSAT", {"certificate": res.certificate}
    T = fam.finsup_to_trivialization(phi, res.psi)
    ok = fam.is_trivialization(phi, T)
    ledger = {"kstar": phi.kstar, "psi_support": sum(len(f.entries) for f in res.psi.entries.values()),
              "verified": ok}
    doc = {"finsup": formats.family_to_json(res.psi), "trivialization": formats.trivialization_to_json(T, phi)}
    if a.out:
        with open(a.out, "w", encoding="utf-8") as fh:
            fh.write(formats.dumps(doc["trivialization"]))
        ledger["written"] = a.out
    else:
        ledger.update(doc)
    if not ok:  # pragma: no cover - solver invariant
        ledger["failure"] = _failure_detail(fam.trivialization_failure(phi, T))
        return "FAIL", ledger
    return "SAT", ledger


def cmd_verify_finsup(a):
    phi = _load_family(a.input, a.kstar)
    ledger = {"kstar": phi.kstar}
    if a.trivialization:
        T = formats.trivialization_from_json(formats.load_json(a.trivialization), phi)
    else:
        res = fam.solve_finsup(phi)
        if not res.sat:
            return "FAIL", {"certificate": res.certificate, "failure": "no finitely supported solution"}
        T = fam.finsup_to_trivialization(phi, res.psi)
        ledger["trivialization"] = "solved"
    bad = fam.trivialization_failure(phi, T)
    if bad:
        ledger["failure"] = {"stage": "input trivialization", **_failure_detail(bad)}
        return "FAIL", ledger
    psi = fam.trivialization_to_finsup(phi, T)
    ledger["psi_max_column"] = psi.max_column()
    if psi.max_column() >= phi.kstar:
        ledger["failure"] = {"stage": "finite support", "max_column": psi.max_column()}
        return "FAIL", ledger
    T2 = fam.finsup_to_trivialization(phi, psi)
    bad = fam.trivialization_failure(phi, T2)
    if bad:
        ledger["failure"] = {"stage": "round trip", **_failure_detail(bad)}
        return "FAIL", ledger
    return "PASS", ledger


def cmd_extend_cofinal(a):
    phi = _load_family(a.input, a.kstar)
    F = _ordset(a.F, "--F")
    for x in F:
        if x not in phi.indices:
            raise InputError("--F", f"index {x} not in the family")
    sub = phi.restrict(F)
    if a.upsilon:
        ups = formats.trivialization_from_json(formats.load_json(a.upsilon), sub)
    else:
        res = fam.solve_finsup(sub)
        if not res.sat:
            return "FAIL", {"failure": "phi restricted to F has no trivialization", "certificate": res.certificate}
        ups = fam.finsup_to_trivialization(sub, res.psi)
    try:
        psi, k = fam.extend_from_cofinal(phi, F, ups)
    except ValueError as exc:
        return "FAIL", {"failure": str(exc)}
    ledger = {"kstar": phi.kstar, "k_prime": k, "extension": formats.trivialization_to_json(psi, phi)}
    return "PASS", ledger


def cmd_verify_symbolic(a):
    n = a.n
    if n < 2:
        raise InputError("--n", "must be >= 2")
    tau = _ordset(a.tau, "--tau") if a.tau else tuple(range(n + 1))
    if len(tau) != n + 1:
        raise InputError("--tau", f"needs {n + 1} elements for n = {n}")
    t0 = time.perf_counter()
    S, C = ex.build_S(n, tau), ex.build_C(n, tau)
    if a.inject_fault:
        top = frozenset(tau)
        S = S + ex.FormalSum(blocks={tuple(tau) + (top,): -2})
    shapes = {"S": ex.shape_failure(S, tau, n), "C": ex.shape_failure(C, tau, n)}
    for i in range(n + 1):
        rho = fam.face(tau, i)
        shapes[f"A{list(rho)}"] = ex.shape_failure(ex.build_A(n, rho), rho, n)
    residual = ex.expand_full(S)
    report = ex.reduce_S_to_C(n, tau, S)
    ledger = {
        "n": n, "tau": list(tau),
        "shape_failures": {k: v for k, v in shapes.items() if v},
        "S_raw_terms": len(S.raw_terms()),
        "S_phi_residual": {ex.fmt_seq(s): c for s, c in residual.items()},
        "reduction": report.to_json(),
        "seconds": round(time.perf_counter() - t0, 4),
    }
    ok = not ledger["shape_failures"] and not residual and report.ok
    return ("PASS" if ok else "FAIL"), ledger


def cmd_type_cycle(a):
    t = a.type
    try:
        aligned = ordcomb.is_aligned_type(t)
    except ValueError as exc:
        raise InputError("--type", str(exc)) from None
    if not aligned:
        return "FAIL", {"type": t, "failure": "type is not aligned"}
    c = ordcomb.build_type_cycle(t)
    problem = ordcomb.check_type_cycle(t, c)
    ledger = {"type": t, "cycle": c.to_json()}
    if problem:  # pragma: no cover - construction invariant
        ledger["failure"] = problem
        return "FAIL", ledger
    return "PASS", ledger


def cmd_check_u(a):
    inst = formats.u_instance_from_json(formats.load_json(a.input))
    why = ex.u_failure(inst)
    ledger = {"n": inst.n, "tau": list(inst.tau)}
    if why:
        ledger["failure"] = why
        return "FAIL", ledger
    return "PASS", ledger


def cmd_eval_C(a):
    inst = formats.u_instance_from_json(formats.load_json(a.input))
    if len(inst.tau) != inst.n + 1:
        raise InputError("tau", f"needs {inst.n + 1} elements for a family of arity {inst.n}")
    val = ex.evaluate(ex.build_C(inst.n, inst.tau), inst)
    ledger = {"n": inst.n, "tau": list(inst.tau), "u_holds": ex.check_u(inst),
              "nonzero": [[i, j, v] for (i, j), v in sorted(val.entries.items())]}
    if not val.is_zero():
        ledger["failure"] = "C_n(tau) evaluates to a nonzero function"
        return "FAIL", ledger
    return "PASS", ledger


def cmd_hechler_lower_bound(a):
    A, r = formats.premise_from_json(formats.load_json(a.input))
    why = forcing.lower_bound_premise_failure(A, r)
    if why:
        raise InputError("premise", why)
    q = forcing.iter_lower_bound(A, r)
    fails = {}
    for name, p in [(f"A[{x}]", p) for x, p in enumerate(A)] + [("r", r)]:
        bad = forcing.iter_extension_failure(q, p)
        if bad:
            fails[name] = bad
    ledger = {"lower_bound": q.to_json()}
    if fails:  # pragma: no cover - construction invariant
        ledger["failure"] = fails
        return "FAIL", ledger
    return "PASS", ledger


def cmd_gen(a):
    if a.n < 1 or a.F < 1 or a.N < 1:
        raise InputError("argv", "--n, --F and --N must be positive")
    kstar = a.N // 2 if a.kstar is None else a.kstar
    if not 0 <= kstar <= a.N:
        raise InputError("--kstar", f"must lie in 0..{a.N}")
    if a.mode == "u_instance":
        if a.n < 2:
            raise InputError("--n", "U-instances need n >= 2")
        try:
            inst = ex.gen_u_instance(a.n, a.seed, N=a.N, max_registry=a.F, kstar=kstar, mode=a.u_mode)
        except ValueError as exc:
            raise InputError("argv", str(exc)) from None
        doc = formats.u_instance_to_json(inst)
    else:
        rng = random.Random(a.seed)
        registry = fam.random_registry(a.F, a.N, rng)
        if a.n > a.F:
            raise InputError("--n", f"arity {a.n} exceeds the registry size {a.F}")
        doc = formats.family_to_json(fam.gen_family(a.mode, a.n, registry, kstar, a.seed))
    text = formats.dumps(doc)
    if a.out:
        with open(a.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        return "PASS", {"written": a.out, "mode": a.mode, "seed": a.seed}
    return "PASS", {"instance": doc}


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="limlab", description="Finite checks for coherent families and the symbolic identities.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def family_cmd(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--input", required=True)
        sp.add_argument("--kstar", type=int)
        sp.set_defaults(fn=fn)
        return sp

    family_cmd("check-coherence", cmd_check_coherence, "check that every defect vanishes above k*")
    sp = family_cmd("trivialize", cmd_trivialize, "solve for a finitely supported Psi and rebuild a trivialization")
    sp.add_argument("--out")
    sp.add_argument("--no-check", action="store_true", help="skip the coherence precondition")
    sp = family_cmd("verify-finsup", cmd_verify_finsup, "round trip between trivializations and finitely supported Psi")
    sp.add_argument("--trivialization")
    sp = family_cmd("extend-cofinal", cmd_extend_cofinal, "extend a trivialization from a dominating subfamily")
    sp.add_argument("--F", required=True, help="comma-separated registry indices")
    sp.add_argument("--upsilon", help="trivialization of the subfamily (solved if omitted)")

    sp = sub.add_parser("verify-symbolic", help="shape, cancellation and reduction checks for S_n, C_n")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--tau")
    sp.add_argument("--inject-fault", action="store_true")
    sp.set_defaults(fn=cmd_verify_symbolic)

    sp = sub.add_parser("type-cycle", help="build and verify a cycle for an aligned type")
    sp.add_argument("--type", required=True)
    sp.set_defaults(fn=cmd_type_cycle)

    for name, fn in (("check-u", cmd_check_u), ("eval-C", cmd_eval_C)):
        sp = sub.add_parser(name)
        sp.add_argument("--input", required=True)
        sp.set_defaults(fn=fn)

    sp = sub.add_parser("hechler-lower-bound", help="common lower bound of iteration conditions")
    sp.add_argument("--input", required=True)
    sp.set_defaults(fn=cmd_hechler_lower_bound)

    sp = sub.add_parser("gen", help="write a seeded instance")
    sp.add_argument("--mode", required=True, choices=fam.MODES + ("u_instance",))
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--F", type=int, default=5, help="registry size (upper bound for u_instance)")
    sp.add_argument("--N", type=int, default=8)
    sp.add_argument("--kstar", type=int)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--u-mode", default="coboundary", choices=ex.U_MODES)
    sp.add_argument("--out")
    sp.set_defaults(fn=cmd_gen)
    return p


def run(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    argv = list(sys.argv[1:] if argv is None else argv)
    command = argv[0] if argv else None
    try:
        args = build_parser().parse_args(argv)
        status, ledger = args.fn(args)
    except InputError as exc:
        report = {"command": argv, "status": "ERROR", "ledger": {"where": exc.where, "error": exc.message}}
        out.write(json.dumps(report) + "\n")
        err.write(f"{command}: input error at {exc.where}: {exc.message}\n")
        return 2
    report = {"command": argv, "status": status, "ledger": ledger}
    out.write(json.dumps(report) + "\n")
    detail = ledger.get("failure")
    err.write(f"{command}: {status}" + (f" ({detail})" if detail else "") + "\n")
    return EXIT[status]


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
