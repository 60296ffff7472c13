"""JSON instance files: families, trivializations, U-instances and conditions.

Loading errors are raised as :class:`InputError` carrying either a
``line:col`` position (syntax) or a field path such as
``entries[2].values[0]`` (structure).
"""
from __future__ import annotations

import json
from typing import Any

from .families import Family, Trivialization
from .forcing import IterCond
from .grid import GridFn


class InputError(Exception):
    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}")
        self.where = where
        self.message = message


def parse_json(text: str, source: str = "<input>") -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{source}:{exc.lineno}:{exc.colno}", exc.msg) from None


def load_json(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(path, exc.strerror or str(exc)) from None
    return parse_json(text, path)


def dumps(doc: Any) -> str:
    return json.dumps(doc, separators=(",", ":")) + "\n"


def _need(doc: dict, key: str, kind, where: str):
    if not isinstance(doc, dict):
        raise InputError(where or "$", "expected an object")
    if key not in doc:
        raise InputError(f"{where}.{key}" if where else key, "missing field")
    val = doc[key]
    if kind is int and (isinstance(val, bool) or not isinstance(val, int)):
        raise InputError(f"{where}.{key}" if where else key, f"expected an integer, got {val!r}")
    if kind in (list, dict) and not isinstance(val, kind):
        raise InputError(f"{where}.{key}" if where else key,
                         f"expected a{'n object' if kind is dict else ' list'}, got {type(val).__name__}")
    return val


def _int_list(val, where: str) -> list:
    if not isinstance(val, list) or any(isinstance(v, bool) or not isinstance(v, int) for v in val):
        raise InputError(where, f"expected a list of integers, got {val!r}")
    return val


# -- families -----------------------------------------------------------------

def family_to_json(phi: Family) -> dict:
    doc = {"N": phi.N, "kstar": phi.kstar, "n": phi.n,
           "registry": [list(g) for g in phi.registry]}
    if phi.indices != tuple(range(len(phi.registry))):
        doc["indices"] = list(phi.indices)
    doc["entries"] = [{"tuple": list(t),
                       "values": [[i, j, v] for (i, j), v in sorted(fn.entries.items())]}
                      for t, fn in sorted(phi.entries.items())]
    return doc


def family_from_json(doc: Any, where: str = "") -> Family:
    N = _need(doc, "N", int, where)
    kstar = _need(doc, "kstar", int, where)
    n = _need(doc, "n", int, where)
    reg = _need(doc, "registry", list, where)
    p = (where + ".") if where else ""
    registry = []
    for a, g in enumerate(reg):
        g = _int_list(g, f"{p}registry[{a}]")
        if len(g) != N:
            raise InputError(f"{p}registry[{a}]", f"has {len(g)} columns, N = {N}")
        if any(v < 0 for v in g):
            raise InputError(f"{p}registry[{a}]", "values must be >= 0")
        registry.append(tuple(g))
    if not registry:
        raise InputError(f"{p}registry", "must be nonempty")
    if n < 1:
        raise InputError(f"{p}n", f"arity must be >= 1, got {n}")
    if not 0 <= kstar <= N:
        raise InputError(f"{p}kstar", f"must lie in 0..{N}, got {kstar}")
    indices = None
    if "indices" in doc:
        indices = _int_list(doc["indices"], f"{p}indices")
        for a in indices:
            if not 0 <= a < len(registry):
                raise InputError(f"{p}indices", f"index {a} outside the registry")
    entries = {}
    for e, item in enumerate(_need(doc, "entries", list, where)):
        w = f"{p}entries[{e}]"
        t = tuple(_int_list(_need(item, "tuple", list, w), f"{w}.tuple"))
        if len(t) != n:
            raise InputError(f"{w}.tuple", f"length {len(t)}, arity is {n}")
        if len(set(t)) != n:
            raise InputError(f"{w}.tuple", "repeated index")
        if any(not 0 <= a < len(registry) for a in t):
            raise InputError(f"{w}.tuple", "index outside the registry")
        key = tuple(sorted(t))
        if key in entries:
            raise InputError(f"{w}.tuple", f"duplicate entry for {list(key)}")
        bound = tuple(min(registry[a][i] for a in t) for i in range(N))
        vals = {}
        for q, triple in enumerate(_need(item, "values", list, w)):
            triple = _int_list(triple, f"{w}.values[{q}]")
            if len(triple) != 3:
                raise InputError(f"{w}.values[{q}]", "expected [i, j, v]")
            i, j, v = triple
            if not (0 <= i < N and 0 <= j <= bound[i]):
                raise InputError(f"{w}.values[{q}]", f"point ({i},{j}) outside I({list(bound)})")
            vals[(i, j)] = v
        # unsorted tuples pick up the alternating sign inside Family
        entries[t] = GridFn(bound, vals)
    try:
        return Family(registry, n, entries, kstar, indices)
    except ValueError as exc:
        raise InputError(where or "$", str(exc)) from None


def trivialization_to_json(T: Trivialization, phi: Family) -> dict:
    if isinstance(T, GridFn):
        cols = [[T((i, j)) for j in range(h + 1)] for i, h in enumerate(T.bound)]
        return {"N": T.N, "kstar": phi.kstar, "n": 0, "psi": cols}
    return family_to_json(T)


def trivialization_from_json(doc: Any, phi: Family, where: str = "") -> Trivialization:
    if isinstance(doc, dict) and "psi" in doc:
        if phi.n != 1:
            raise InputError(where or "psi", f"a dense psi trivializes arity-1 families; this one has arity {phi.n}")
        cols = _need(doc, "psi", list, where)
        if len(cols) != phi.N:
            raise InputError("psi", f"has {len(cols)} columns, N = {phi.N}")
        vals, bound = {}, []
        for i, col in enumerate(cols):
            col = _int_list(col, f"psi[{i}]")
            if not col:
                raise InputError(f"psi[{i}]", "column must be nonempty")
            bound.append(len(col) - 1)
            vals.update({(i, j): v for j, v in enumerate(col)})
        return GridFn(bound, vals)
    T = family_from_json(doc, where)
    if T.n != phi.n - 1:
        raise InputError(f"{where}.n" if where else "n", f"expected arity {phi.n - 1}, got {T.n}")
    if T.registry != phi.registry:
        raise InputError(f"{where}.registry" if where else "registry", "differs from the family's registry")
    return T


# -- U-instances --------------------------------------------------------------

def u_instance_to_json(inst) -> dict:
    doc = family_to_json(inst.family)
    doc["tau"] = list(inst.tau)
    doc["assignment"] = [{"set": sorted(s), "ordinal": a}
                         for s, a in sorted(inst.assignment.items(), key=lambda kv: (len(kv[0]), sorted(kv[0])))
                         if len(s) > 1]
    return doc


def u_instance_from_json(doc: Any):
    from .exprcalc import UInstance
    phi = family_from_json(doc)
    tau = _int_list(_need(doc, "tau", list, ""), "tau")
    assignment = {}
    for q, item in enumerate(_need(doc, "assignment", list, "")):
        w = f"assignment[{q}]"
        s = _int_list(_need(item, "set", list, w), f"{w}.set")
        assignment[frozenset(s)] = _need(item, "ordinal", int, w)
    try:
        return UInstance(tuple(tau), assignment, phi)
    except ValueError as exc:
        raise InputError("assignment", str(exc)) from None


# -- conditions ---------------------------------------------------------------

def condition_from_json(doc: Any, where: str) -> IterCond:
    coords = _need(doc, "coords", dict, where)
    for a, c in coords.items():
        w = f"{where}.coords.{a}"
        try:
            int(a)
        except ValueError:
            raise InputError(w, "coordinate keys must be integers") from None
        stem = _int_list(_need(c, "stem", list, w), f"{w}.stem")
        head = _int_list(c.get("head", []), f"{w}.head")
        tail = _need(c, "tail", int, w)
        if any(v < 0 for v in stem + head) or tail < 0:
            raise InputError(w, "stem and bound values must be >= 0")
    try:
        return IterCond.from_json(doc)
    except ValueError as exc:
        raise InputError(where, str(exc)) from None


def premise_from_json(doc: Any) -> tuple[list, IterCond]:
    A = [condition_from_json(c, f"A[{q}]") for q, c in enumerate(_need(doc, "A", list, ""))]
    return A, condition_from_json(_need(doc, "r", dict, ""), "r")
