"""Command line front end.

Every command prints one JSON object with the keys ``result``,
``certificates``, ``consumed_prefixes`` and ``warnings`` (or the same values
as ``key: value`` lines with ``--format text``).  Exit status is 0 on
success, 2 when an input violates a precondition and 3 when a budget or
size limit is hit.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import averages, estimators, families, normspaces, ordinals, suites, trees
from .lp import LPError
from .streams import BudgetExceeded, fast_growing, identity, parse_stream

PREFIX_SHOWN = 32  # stream elements echoed in consumed_prefixes

EXIT_OK, EXIT_PRECONDITION, EXIT_BUDGET = 0, 2, 3


class Payload(dict):
    def __init__(self, result, certificates=None, consumed=None, warnings=None):
        super().__init__(result=result, certificates=certificates or [],
                         consumed_prefixes=consumed or {}, warnings=warnings or [])


def _q(v) -> str:
    return str(Fraction(v))


def _ord(text):
    return ordinals.parse_ordinal(text)


# ---------------------------------------------------------------------------
# ord

def cmd_ord(args) -> Payload:
    op = args.op
    a = _ord(args.a)
    if op == "parse":
        return Payload(str(a))
    if op == "pow":
        return Payload(str(ordinals.omega_pow(a)))
    if op == "decomp":
        pairs = sorted(ordinals.hessenberg_decompositions(a), key=lambda p: (p[0], p[1]))
        return Payload([[str(x), str(y)] for x, y in pairs])
    if args.b is None:
        raise ValueError(f"ord {op} needs two arguments")
    if op == "fund":
        return Payload(str(ordinals.fundamental_seq(a, int(args.b))))
    b = _ord(args.b)
    if op == "cmp":
        return Payload({-1: "less", 0: "equal", 1: "greater"}[ordinals.ord_cmp(a, b)])
    fn = {"add": ordinals.ord_add, "mul": ordinals.ord_mul, "hsum": ordinals.hessenberg_sum}[op]
    return Payload(str(fn(a, b)))


# ---------------------------------------------------------------------------
# family

def cmd_family(args) -> Payload:
    F = families.parse_family(args.family)
    op = args.op
    if op == "iota":
        return Payload(str(families.iota(F)))
    if op == "admissible":
        blocks = [families.parse_set("{" + b + "}") for b in args.blocks.strip("{} ").split("},{")]
        return Payload(families.is_admissible(F, blocks))
    if args.set is None:
        raise ValueError(f"family {op} needs --set")
    E = families.parse_set(args.set)
    if op == "member":
        return Payload(families.member(F, E))
    if op == "maximal":
        return Payload(families.is_maximal(F, E))
    if op == "derivative":
        return Payload(families.in_derivative(F, E, args.k))
    if op == "relabel":
        M = parse_stream(args.stream)
        out = families.relabel(M, E)
        return Payload(families.format_set(out), consumed={"M": M.prefix(M.consumed)})
    raise ValueError(f"unknown family operation {op}")


# ---------------------------------------------------------------------------
# tree

def _tree_from_json(text: str) -> trees.FinTree:
    return trees.FinTree(tuple(n) for n in json.loads(text))


def _map_json(mapping) -> list:
    return [[list(k), list(v)] for k, v in sorted(mapping.items(), key=lambda kv: len(kv[0]))]


def cmd_tree(args) -> Payload:
    op = args.op
    if op == "min":
        T = trees.MinTree(args.xi).finite_part(args.width, args.depth)
        nodes = sorted(([str(x) for x in n] for n in T.nodes), key=lambda n: (len(n), n))
        return Payload(nodes)
    T = _tree_from_json(args.tree)
    if op == "order":
        return Payload(trees.tree_order(T))
    if op == "derive":
        D = trees.derive(T, args.k)
        return Payload(sorted((list(n) for n in D.nodes), key=lambda n: (len(n), n)))
    if op == "embed":
        m = trees.order_embed(args.xi_int, T)
        return Payload(None if m is None else _map_json(m))
    if op == "color":
        colors = {tuple(node): int(c) for node, c in json.loads(args.coloring)}
        col = trees.TreeColoring.from_leaf_colors(T, colors)
        split = trees.coloring_sums(T, col)
        certs = [{"color": j, "length": em.length, "i": _map_json(em.i), "e": _map_json(em.e),
                  "monochromatic": trees.is_monochromatic(col, em, j),
                  "extended_map": trees.check_extended_map(T, em)}
                 for j, em in enumerate(split.maps)]
        return Payload(list(split.lengths), certs)
    raise ValueError(f"unknown tree operation {op}")


# ---------------------------------------------------------------------------
# norm

def cmd_norm(args) -> Payload:
    x = normspaces.parse_vector(args.vec)
    space = args.space
    if space == "schreier":
        F = families.parse_family(args.family)
        value, cert = normspaces.schreier_norm(x, F)
        return Payload(_q(value), [cert.to_json()])
    if space == "tsirelson":
        F = families.parse_family(args.family)
        value, cert = normspaces.tsirelson_norm(x, Fraction(args.theta), F, route=args.route)
        return Payload(_q(value), [cert.to_json()])
    if space == "schlumprecht":
        v = normspaces.schlumprecht_norm(x, args.precision)
        return Payload([_q(v.interval.lo), _q(v.interval.hi)], [v.certificate.to_json()])
    if space == "lp":
        v = normspaces.lp_norm(x, args.p, args.precision)
        if v.exact is not None:
            return Payload(_q(v.exact))
        return Payload([_q(v.interval.lo), _q(v.interval.hi)])
    if space == "mazur":
        out = normspaces.mazur_map(x, Fraction(args.p), args.precision)
        return Payload({str(k): [_q(iv.lo), _q(iv.hi)] for k, iv in out.items()})
    raise ValueError(f"unknown space {space}")


# ---------------------------------------------------------------------------
# avg

def cmd_avg(args) -> Payload:
    L = parse_stream(args.L)
    avg = averages.repeated_average(L, _ord(args.xi), args.n)
    previous = [averages.repeated_average(L, avg.xi, k) for k in range(1, args.n)]
    flags = averages.check_repavg(avg, previous)
    shown = L.prefix(min(avg.consumed, PREFIX_SHOWN))
    return Payload(avg.to_json(), [flags], {"L": [str(v) for v in shown], "L_length": avg.consumed})


# ---------------------------------------------------------------------------
# verify

def cmd_verify(args) -> Payload:
    kind = args.kind
    if kind == "schreier-sharp":
        cert = estimators.schreier_sharpness_check(_ord(args.xi), args.n, Fraction(args.eps))
        return Payload(cert.certified, [cert.to_json()],
                       {"L": [str(v) for v in cert.L_prefix]})
    if kind == "tsirelson-upper":
        u = estimators.tsirelson_upper_check(Fraction(args.theta), args.N, Fraction(args.eps))
        return Payload(u.holds, [u.to_json()])
    if kind == "lemma":
        M = parse_stream(args.M) if args.M else identity()
        eps = Fraction(args.eps)
        L = parse_stream(args.L) if args.L else fast_growing(M, eps)
        check = averages.lemma_repeated_averages_check(M, eps, L, _ord(args.xi), args.k)
        return Payload(check.bound_holds,
                       [{"value": _q(check.value), "bound": _q(check.bound),
                         "detail": {k: str(v) for k, v in check.detail.items()}}],
                       {"L": [str(v) for v in L.prefix(min(L.consumed, PREFIX_SHOWN))]})
    if kind == "counterexample":
        ce = averages.non_fast_growing_counterexample(args.n, args.m, build_vectors=args.m <= 2000)
        return Payload(_q(ce.value), [{"E_size": len(ce.E) if ce.E else None}])
    raise ValueError(f"unknown verification {kind}")


# ---------------------------------------------------------------------------
# lp

def parse_space(text: str) -> estimators.NormOracle:
    head, _, rest = text.partition(":")
    if head == "l1":
        return estimators.l1_oracle()
    if head == "linf":
        return estimators.linf_oracle()
    if head == "schreier":
        return estimators.schreier_oracle(families.parse_family(rest or "S[1]"))
    if head == "tsirelson":
        theta, _, fam = rest.partition(":")
        return estimators.tsirelson_oracle(Fraction(theta), families.parse_family(fam or "S[1]"))
    raise ValueError(f"unknown space {text!r}; use l1, linf, schreier:F or tsirelson:theta:F")


def _vectors(text: str) -> list:
    return [normspaces.parse_vector(v) for v in text.split(";") if v.strip()]


def cmd_lp(args) -> Payload:
    oracle = parse_space(args.space)
    op = args.op
    if op == "dominate":
        if args.vecs:
            dom = estimators.l1_domination_constant(_vectors(args.vecs), oracle)
            return Payload(_q(dom.constant), [dom.to_json()])
        F = families.parse_family(args.family)
        K, E = estimators.spreading_model_constant(F, oracle, args.window)
        dom = estimators.basis_domination_on(E, oracle)
        return Payload(_q(K), [{"worst_set": families.format_set(E), **dom.to_json()}])
    vecs = _vectors(args.vecs or "")
    if not vecs:
        raise ValueError(f"lp {op} needs --vecs")
    if op == "t1":
        r = estimators.t1_membership(vecs, Fraction(args.K), oracle)
    elif op == "w":
        r = estimators.w_membership(vecs, Fraction(args.K), oracle)
    else:
        raise ValueError(f"unknown lp operation {op}")
    warnings = [] if r.exact else ["sampled verdict, not certified"]
    return Payload(r.member, [r.to_json()], warnings=warnings)


# ---------------------------------------------------------------------------
# suite

def cmd_suite(args) -> Payload:
    reports = suites.run_suite(args.name, args.seed)
    rows = []
    for r in reports:
        row = r.to_json()
        if not args.timings:
            # wall-clock times would break byte-identical output
            row.pop("elapsed")
        rows.append(row)
    summary = {"suite": args.name, "seed": args.seed, "criteria": len(reports),
               "passed": sum(r.passed for r in reports)}
    return Payload(summary, rows)


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="schreierlab", description=__doc__.splitlines()[0])
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--out", help="also write the output to this file")
    sub = p.add_subparsers(dest="command", required=True)

    o = sub.add_parser("ord", help="ordinal arithmetic")
    o.add_argument("op", choices=("parse", "cmp", "add", "mul", "hsum", "pow", "fund", "decomp"))
    o.add_argument("a")
    o.add_argument("b", nargs="?")
    o.set_defaults(fn=cmd_ord)

    f = sub.add_parser("family", help="regular families")
    f.add_argument("op", choices=("member", "maximal", "derivative", "iota", "admissible", "relabel"))
    f.add_argument("--family", required=True)
    f.add_argument("--set")
    f.add_argument("--k", type=int, default=1)
    f.add_argument("--blocks", help='e.g. "{2,3},{5}"')
    f.add_argument("--stream", default="id")
    f.set_defaults(fn=cmd_family)

    t = sub.add_parser("tree", help="finite B-trees")
    t.add_argument("op", choices=("order", "derive", "embed", "color", "min"))
    t.add_argument("--tree", help="JSON list of nodes, each a list of labels")
    t.add_argument("--coloring", help="JSON list of [leaf, color] pairs")
    t.add_argument("--k", type=int, default=1)
    t.add_argument("--xi", default="2", help="ordinal for min; chain length for embed")
    t.add_argument("--width", type=int, default=3)
    t.add_argument("--depth", type=int, default=3)
    t.set_defaults(fn=cmd_tree)

    n = sub.add_parser("norm", help="exact norms with certificates")
    n.add_argument("space", choices=("schreier", "tsirelson", "schlumprecht", "lp", "mazur"))
    n.add_argument("--vec", required=True)
    n.add_argument("--family", default="S[1]")
    n.add_argument("--theta", default="1/2")
    n.add_argument("--route", choices=("auto", "capped", "generic"), default="auto")
    n.add_argument("--p", default="2")
    n.add_argument("--precision", type=int)
    n.set_defaults(fn=cmd_norm)

    a = sub.add_parser("avg", help="repeated averages")
    a.add_argument("--L", required=True)
    a.add_argument("--xi", required=True)
    a.add_argument("--n", type=int, default=1)
    a.set_defaults(fn=cmd_avg)

    v = sub.add_parser("verify", help="quantitative checks")
    v.add_argument("kind", choices=("schreier-sharp", "tsirelson-upper", "lemma", "counterexample"))
    v.add_argument("--xi", default="1")
    v.add_argument("--n", type=int, default=2)
    v.add_argument("--m", type=int, default=1000)
    v.add_argument("--k", type=int, default=2)
    v.add_argument("--eps", default="1/4")
    v.add_argument("--theta", default="1/2")
    v.add_argument("--N", type=int, default=2)
    v.add_argument("--M")
    v.add_argument("--L")
    v.set_defaults(fn=cmd_verify)

    lp = sub.add_parser("lp", help="l_1 domination constants")
    lp.add_argument("op", choices=("dominate", "t1", "w"))
    lp.add_argument("--space", default="schreier:S[1]")
    lp.add_argument("--family", default="S[1]")
    lp.add_argument("--window", type=int, default=8)
    lp.add_argument("--vecs", help='vectors separated by ";", e.g. "e1+e2; e1-e2"')
    lp.add_argument("--K", default="2")
    lp.set_defaults(fn=cmd_lp)

    s = sub.add_parser("suite", help="acceptance batteries")
    s.add_argument("name", choices=sorted(suites.SUITES))
    s.add_argument("--seed", type=int, default=suites.DEFAULT_SEED)
    s.add_argument("--timings", action="store_true", help="include wall-clock times")
    s.set_defaults(fn=cmd_suite)
    return p


def _text_lines(value, prefix: str = "") -> list[str]:
    if isinstance(value, dict):
        out = []
        for k, v in value.items():
            out.extend(_text_lines(v, f"{prefix}{k}."))
        return out or [f"{prefix.rstrip('.')}: {{}}"]
    if isinstance(value, list) and any(isinstance(v, (dict, list)) for v in value):
        out = []
        for i, v in enumerate(value):
            out.extend(_text_lines(v, f"{prefix}{i}."))
        return out or [f"{prefix.rstrip('.')}: []"]
    return [f"{prefix.rstrip('.')}: {json.dumps(value)}"]


def render(payload: Payload, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(payload, sort_keys=True)
    return "\n".join(_text_lines(dict(payload)))


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "tree" and args.op == "embed":
        args.xi_int = int(args.xi)
    if args.command == "tree" and args.op != "min" and not args.tree:
        parser.error("tree operations need --tree")
    try:
        payload = args.fn(args)
        code = EXIT_OK
    except BudgetExceeded as exc:
        payload, code = Payload(None, warnings=[f"budget exceeded: {exc}"]), EXIT_BUDGET
    except (ValueError, ordinals.OrdinalError, trees.TreeError, LPError, KeyError,
            json.JSONDecodeError) as exc:
        payload, code = Payload(None, warnings=[f"precondition failed: {exc}"]), EXIT_PRECONDITION
    text = render(payload, args.format)
    print(text)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
