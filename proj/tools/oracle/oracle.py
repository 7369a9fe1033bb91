#!/usr/bin/env python3
"""Independent brute-force oracle.

Evaluates formulas on every small Kripke model by direct recursion on the
forcing clauses and writes the results consumed by the C++ tests.
Nothing here shares code with the library.

    python3 tools/oracle/oracle.py > tests/data/oracle.json
"""
import itertools
import json
import random
import re
import sys

TOKEN = re.compile(r"\s*(<->|<~>|->|~>|[~#&|()*]|[a-z][a-zA-Z0-9_]*)")


def tokenize(s):
    out, pos = [], 0
    s = s.strip()
    while pos < len(s):
        m = TOKEN.match(s, pos)
        if not m:
            raise ValueError(f"bad input at {pos}: {s!r}")
        out.append(m.group(1))
        pos = m.end()
        while pos < len(s) and s[pos].isspace():
            pos += 1
    return out


class Parser:
    def __init__(self, s):
        self.t = tokenize(s)
        self.i = 0

    def peek(self):
        return self.t[self.i] if self.i < len(self.t) else None

    def eat(self, tok=None):
        x = self.peek()
        if tok is not None and x != tok:
            raise ValueError(f"expected {tok}, got {x}")
        self.i += 1
        return x

    def parse(self):
        f = self.iff()
        if self.peek() is not None:
            raise ValueError("trailing input")
        return f

    def iff(self):
        a = self.imp()
        if self.peek() == "<->":
            self.eat()
            b = self.imp()
            return ("and", ("imp", a, b), ("imp", b, a))
        if self.peek() == "<~>":
            self.eat()
            b = self.imp()
            return ("and", ("arr", a, b), ("arr", b, a))
        return a

    def imp(self):
        a = self.disj()
        if self.peek() in ("->", "~>"):
            op = "imp" if self.eat() == "->" else "arr"
            return (op, a, self.imp())
        return a

    def disj(self):
        a = self.conj()
        while self.peek() == "|":
            self.eat()
            a = ("or", a, self.conj())
        return a

    def conj(self):
        a = self.prefix()
        while self.peek() == "&":
            self.eat()
            a = ("and", a, self.prefix())
        return a

    def prefix(self):
        x = self.peek()
        if x == "~":
            self.eat()
            return ("imp", self.prefix(), ("bot",))
        if x == "#":
            self.eat()
            return ("arr", ("top",), self.prefix())
        if x == "(":
            self.eat()
            f = self.iff()
            self.eat(")")
            return f
        self.eat()
        if x == "top":
            return ("top",)
        if x == "bot":
            return ("bot",)
        return ("var", x)


def parse(s):
    return Parser(s).parse()


def variables(f, acc=None):
    acc = set() if acc is None else acc
    if f[0] == "var":
        acc.add(f[1])
    for g in f[1:]:
        if isinstance(g, tuple):
            variables(g, acc)
    return acc


# ---------------------------------------------------------------- models

def partial_orders(n, topo=False):
    """All partial orders on n labelled nodes; with topo, only those where
    i below j implies i < j."""
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j and (not topo or i < j)]
    for bits in range(1 << len(pairs)):
        le = [[i == j for j in range(n)] for i in range(n)]
        for k, (i, j) in enumerate(pairs):
            if bits >> k & 1:
                le[i][j] = True
        ok = True
        for i in range(n):
            for j in range(n):
                if i != j and le[i][j] and le[j][i]:
                    ok = False
                for k in range(n):
                    if le[i][j] and le[j][k] and not le[i][k]:
                        ok = False
        if ok:
            yield le


def frames(n, brilliant, topo=False):
    for le in partial_orders(n, topo):
        strict = [(i, j) for i in range(n) for j in range(n) if i != j and le[i][j]]
        for bits in range(1 << len(strict)):
            sub = [[False] * n for _ in range(n)]
            for k, (i, j) in enumerate(strict):
                if bits >> k & 1:
                    sub[i][j] = True
            ok = True
            for x in range(n):
                for y in range(n):
                    for z in range(n):
                        if le[x][y] and sub[y][z] and not sub[x][z]:
                            ok = False
                        if brilliant and sub[x][y] and le[y][z] and not sub[x][z]:
                            ok = False
            if ok:
                yield le, sub


def upsets(le):
    n = len(le)
    for bits in range(1 << n):
        s = {i for i in range(n) if bits >> i & 1}
        if all(j in s for i in s for j in range(n) if le[i][j]):
            yield frozenset(s)


def models(vars_, max_nodes, brilliant, topo=False):
    vars_ = sorted(vars_)
    for n in range(1, max_nodes + 1):
        for le, sub in frames(n, brilliant, topo):
            ups = list(upsets(le))
            for choice in itertools.product(ups, repeat=len(vars_)):
                yield {"n": n, "le": le, "sub": sub, "val": dict(zip(vars_, choice))}


def ext(m, f, memo=None):
    """Set of nodes forcing f."""
    memo = {} if memo is None else memo
    if f in memo:
        return memo[f]
    n, le, sub = m["n"], m["le"], m["sub"]
    k = f[0]
    if k == "top":
        r = frozenset(range(n))
    elif k == "bot":
        r = frozenset()
    elif k == "var":
        r = m["val"].get(f[1], frozenset())
    elif k == "and":
        r = ext(m, f[1], memo) & ext(m, f[2], memo)
    elif k == "or":
        r = ext(m, f[1], memo) | ext(m, f[2], memo)
    elif k == "imp":
        a, b = ext(m, f[1], memo), ext(m, f[2], memo)
        r = frozenset(x for x in range(n) if all(y in b for y in range(n) if le[x][y] and y in a))
    elif k == "arr":
        a, b = ext(m, f[1], memo), ext(m, f[2], memo)
        r = frozenset(x for x in range(n) if all(y in b for y in range(n) if sub[x][y] and y in a))
    else:
        raise ValueError(k)
    memo[f] = r
    return r


def smallest_countermodel(f, max_nodes, brilliant):
    for m in models(variables(f), max_nodes, brilliant):
        if len(ext(m, f)) < m["n"]:
            return m["n"]
    return None


def fingerprint(f, universe):
    return tuple(ext(m, f) for m in universe)


# ---------------------------------------------------------------- sections

def box(f):
    return ("arr", ("top",), f)


def closed_degree(f):
    """Degree of a closed formula read off a strict chain of 7 nodes.

    Node h (counting from the top) forces #^a bot iff h < a."""
    n = 7
    le = [[i <= j for j in range(n)] for i in range(n)]
    sub = [[i < j for j in range(n)] for i in range(n)]
    m = {"n": n, "le": le, "sub": sub, "val": {}}
    e = ext(m, f)
    heights = {n - 1 - x for x in e}
    if heights == set(range(n)):
        return "inf"
    a = len(heights)
    assert heights == set(range(a)), heights
    return a


def degree_formula(a):
    if a == "inf":
        return ("top",)
    f = ("bot",)
    for _ in range(a):
        f = box(f)
    return f


VERDICT_CORPUS = [
    ("(#p -> p) -> p", "isl-box"),
    ("#p -> p", "isl-box"),
    ("p -> #p", "isl-a"),
    ("p -> #p", "isl-box"),
    ("((p & #q) ~> q) -> (p ~> q)", "isl-a"),
    ("((r & p) ~> q) -> (r ~> (p -> q))", "isl-a"),
    ("((r & p) ~> q) -> (r ~> (p -> q))", "isl-a+"),
    ("~~#bot", "isl-box"),
    ("~#bot", "isl-box"),
    ("p | ~p", "isl-a"),
    ("(p -> q) -> (p ~> q)", "isl-a"),
    ("(#p -> p) ~> p", "isl-a"),
    ("#(#p -> p) -> #p", "isl-box"),
    ("#p -> ##p", "isl-box"),
    ("p ~> #p", "isl-a"),
    ("(p ~> q) -> #(p ~> q)", "isl-a"),
    ("(p ~> q) -> ((#r -> p) ~> (#r -> q))", "isl-a"),
    ("#(p | q) -> #p | #q", "isl-box"),
    ("((p -> q) -> p) -> p", "isl-a"),
    ("#bot | ~#bot", "isl-box"),
    ("(p ~> q) -> (p -> q)", "isl-a"),
    ("(p ~> q) -> (p -> q)", "isl-a+"),
    ("top", "isl-a"),
    ("#top", "isl-box"),
    ("(p <-> #q) & (s <-> #q) -> (p <-> s)", "isl-box"),
]


def section_verdicts():
    out = []
    for text, logic in VERDICT_CORPUS:
        f = parse(text)
        cm = smallest_countermodel(f, 3, logic == "isl-a+")
        out.append({"formula": text, "logic": logic, "countermodel_nodes": cm})
    return out


def section_closed():
    levels = [0, 1, 2, 3, "inf"]
    out = []
    for a in levels:
        for b in levels:
            fa, fb = degree_formula(a), degree_formula(b)
            for op in ("and", "or", "imp", "arr"):
                out.append({"alpha": a, "beta": b, "op": op, "degree": closed_degree((op, fa, fb))})
    return out


def section_enum_counts():
    """Lower bounds on class counts: distinct extensions on all <=3-node models."""
    res = {}
    for name, vars_, brilliant in (("isl", ["p"], False), ("isl_empty", [], False)):
        universe = list(models(vars_, 3, brilliant))
        atoms = [("bot",), ("top",)] + [("var", v) for v in vars_]
        layer = {fingerprint(a, universe): a for a in atoms}
        res[name + "_0"] = len(_lattice(layer, universe))
        one = dict(_lattice(layer, universe))
        reps = list(one.values())
        for a in reps:
            for b in reps:
                for op in ("imp", "arr"):
                    g = (op, a, b)
                    one.setdefault(fingerprint(g, universe), g)
        res[name + "_1"] = len(_lattice(one, universe))
    universe = list(models(["p"], 3, False))
    zero = _lattice({fingerprint(a, universe): a for a in [("bot",), ("top",), ("var", "p")]}, universe)
    one = dict(zero)
    reps = list(zero.values())
    for a in reps:
        one.setdefault(fingerprint(box(a), universe), box(a))
        for b in reps:
            one.setdefault(fingerprint(("imp", a, b), universe), ("imp", a, b))
    res["box_1"] = len(_lattice(one, universe))
    return res


def _lattice(layer, universe):
    cur = dict(layer)
    changed = True
    while changed:
        changed = False
        items = list(cur.values())
        for a in items:
            for b in items:
                for op in ("and", "or"):
                    g = (op, a, b)
                    fp = fingerprint(g, universe)
                    if fp not in cur:
                        cur[fp] = g
                        changed = True
    return cur


def bisim_layers(K, M, pvars, n):
    """Z_0..Z_n by the layer definition."""
    def agree(k, m):
        return all((k in K["val"].get(p, ())) == (m in M["val"].get(p, ())) for p in pvars)

    Z = [{(k, m) for k in range(K["n"]) for m in range(M["n"]) if agree(k, m)}]
    for _ in range(n):
        prev = Z[-1]
        nxt = set()
        for (k, m) in prev:
            ok = True
            for rel in ("le", "sub"):
                for k2 in range(K["n"]):
                    if K[rel][k][k2] and not any(M[rel][m][m2] and (k2, m2) in prev for m2 in range(M["n"])):
                        ok = False
                for m2 in range(M["n"]):
                    if M[rel][m][m2] and not any(K[rel][k][k2] and (k2, m2) in prev for k2 in range(K["n"])):
                        ok = False
            if ok:
                nxt.add((k, m))
        Z.append(nxt)
    return Z


def model_json(m):
    names = [f"w{i}" for i in range(m["n"])]
    return {
        "vars": sorted(m["val"]),
        "nodes": names,
        "pre": [[names[i], names[j]] for i in range(m["n"]) for j in range(m["n"]) if m["le"][i][j]],
        "sub": [[names[i], names[j]] for i in range(m["n"]) for j in range(m["n"]) if m["sub"][i][j]],
        "val": {names[i]: sorted(v for v, s in m["val"].items() if i in s) for i in range(m["n"])},
        "root": names[0],
    }


def section_bisim(rng):
    pool = [m for m in models(["p"], 3, False)]
    out = []
    for _ in range(40):
        K, M = rng.choice(pool), rng.choice(pool)
        Z = bisim_layers(K, M, ["p"], 3)
        out.append({"K": model_json(K), "M": model_json(M),
                    "layers": [sorted([f"w{k}", f"w{m}"] for k, m in z) for z in Z]})
    return out


def section_local_types():
    """Local types of small sets, straight from the definition."""
    cases = {
        "bot,top,p": ["bot", "top", "p"],
        "bot,top,#bot,#bot->bot": ["bot", "top", "#bot", "#bot -> bot"],
        "bot,top": ["bot", "top"],
    }
    out = {}
    for name, members in cases.items():
        fs = [parse(s) for s in members]
        idx = {f: i for i, f in enumerate(fs)}
        types = []
        for bits in range(1 << len(fs)):
            T = {fs[i] for i in range(len(fs)) if bits >> i & 1}
            if ("top",) not in T or ("bot",) in T:
                continue
            ok = True
            for f in fs:
                if f[0] == "and" and (f in T) != (f[1] in T and f[2] in T):
                    ok = False
                if f[0] == "or" and (f in T) != (f[1] in T or f[2] in T):
                    ok = False
                if f[0] == "imp" and f in T and f[1] in T and f[2] not in T:
                    ok = False
            if ok:
                types.append(sorted(members[idx[f]] for f in T))
        out[name] = sorted(types)
    return out


def section_interp():
    """Semantic agreement of expected interpolants with the formulas they replace."""
    universe = list(models(["p"], 3, False))
    pairs = {"p": "p", "top": "top", "bot": "bot", "#bot": "#bot", "p ~> bot": "p ~> bot"}
    return {k: fingerprint(parse(v), universe) == fingerprint(parse(k), universe) for k, v in pairs.items()}


def main():
    rng = random.Random(0)
    data = {
        "verdicts": section_verdicts(),
        "closed": section_closed(),
        "enum_counts": section_enum_counts(),
        "bisim": section_bisim(rng),
        "local_types": section_local_types(),
        "model_counts": {
            "empty_1": sum(1 for _ in models([], 1, False)),
            "p_1": sum(1 for _ in models(["p"], 1, False)),
            "p_2": sum(1 for _ in models(["p"], 2, False)),
            "p_3": sum(1 for _ in models(["p"], 3, False)),
            "p_3_brilliant": sum(1 for _ in models(["p"], 3, True)),
            "pq_2": sum(1 for _ in models(["p", "q"], 2, False)),
        },
        "model_counts_topological": {
            "p_2": sum(1 for _ in models(["p"], 2, False, True)),
            "p_3": sum(1 for _ in models(["p"], 3, False, True)),
            "p_3_brilliant": sum(1 for _ in models(["p"], 3, True, True)),
            "pq_2": sum(1 for _ in models(["p", "q"], 2, False, True)),
            "empty_4": sum(1 for _ in models([], 4, False, True)),
        },
    }
    json.dump(data, sys.stdout, indent=1, sort_keys=True)
    sys.stdout.write("\n")


if __name__ == "__main__":
    main()
