"""Command-line front end.

Artifacts stream to stdout and stats to stderr so pipelines compose; exit
codes: 0 verified/ok, 1 refuted, 2 input error, 3 contract violation.
Epsilons are exact rationals ("p/q") everywhere except the spectral mode.
"""

from __future__ import annotations

import argparse
import sys
import time
from fractions import Fraction

from . import cographreg, cotree, cover, encodings, generators, gf2, graph, regularity, spectral, treepart
from .errors import ContractViolation, InputError, RegpartError
from .jsonio import dumps, format_rational, loads, parse_rational
from .prng import SplitMix64

EXIT_OK = 0
EXIT_REFUTED = 1
EXIT_INPUT = 2
EXIT_CONTRACT = 3


def _read(path: str, where: str):
    if path == "-":
        return loads(sys.stdin.read(), where)
    try:
        with open(path) as fh:
            return loads(fh.read(), where)
    except OSError as exc:
        raise InputError(f"{where}: cannot read {path}: {exc}") from None


def _emit(obj):
    sys.stdout.write(dumps(obj))


def _stats(obj):
    sys.stderr.write(dumps(obj))


# -- generate -----------------------------------------------------------------


def _cmd_generate(args) -> int:
    family = args.family
    seed = args.seed
    if family == "half-graph":
        g = generators.half_graph(args.n)
        _emit(graph.graph_to_json(g))
    elif family == "shift-graph":
        g, _ = generators.shift_graph(args.n, args.k)
        _emit(graph.graph_to_json(g))
    elif family == "es":
        g, _, _ = generators.es_graph(args.n)
        _emit(graph.graph_to_json(g))
    elif family == "cotree":
        c = generators.random_cotree(args.n, args.m, args.max_child, seed)
        _emit(cotree.cotree_to_json(c))
    elif family == "plane-tree":
        t = generators.random_plane_tree(args.n, args.max_child, seed)
        if args.measure == "uniform":
            m = generators.leaf_uniform_tree_measure(t)
        else:
            m = generators.random_tree_measure(t, seed ^ 0x5EED)
        _emit({"tree": cotree.plane_tree_to_json(t), "measure": treepart.measure_to_json(m)})
    elif family == "degenerate":
        g = generators.random_degenerate(args.n, args.d, seed)
        _emit(graph.graph_to_json(g))
    elif family == "sc":
        dec = generators.random_sc(args.n, args.depth, seed)
        _emit(encodings.sc_to_json(dec))
    elif family == "regular":
        g = generators.random_regular(args.n, args.d, seed)
        _emit(graph.graph_to_json(g))
    elif family == "two-covered":
        g, blocks, pair_cotrees = generators.random_two_covered(args.n, args.m, args.p, seed)
        bundle = {
            "graph": graph.graph_to_json(g),
            "cover": {"parts": [list(b) for b in blocks]},
            "pair_cotrees": [
                {"i": i, "j": j, "vertices": verts, "cotree": cotree.cotree_to_json(c)}
                for (i, j), (c, verts) in sorted(pair_cotrees.items())
            ],
        }
        _emit(bundle)
    elif family == "rank-instance":
        g, dec = generators.random_rank_instance(args.n, args.r, seed)
        _emit({"graph": graph.graph_to_json(g), "decomposition": gf2.decomposition_to_json(dec)})
    else:
        raise InputError(f"unknown family {family!r}")
    return EXIT_OK


# -- partition ------------------------------------------------------------------


def _cmd_partition(args) -> int:
    eps = parse_rational(args.eps, "--eps")
    t0 = time.monotonic()
    if args.mode == "tree":
        bundle = _read(args.inputs[0], "tree bundle")
        t = cotree.plane_tree_from_json(bundle.get("tree", bundle), "tree")
        m = treepart.measure_from_json(bundle["measure"], "measure")
        partition = treepart.build_eps_partition(t, m, eps)
        _emit(treepart.partition_to_json(partition))
        _stats({"parts": len(partition.parts), "eps": format_rational(eps)})
    elif args.mode == "cograph":
        c = cotree.cotree_from_json(_read(args.inputs[0], "cotree"))
        partition, stats = cographreg.cograph_regular_partition(c, eps)
        g = c.materialize()
        report = regularity.nice_defect(g, partition)
        _emit(regularity.partition_to_json(partition))
        _stats(
            {
                "n": stats["n"],
                "m": stats["m"],
                "eps": format_rational(eps),
                "ell": stats["ell"],
                "bound": format_rational(stats["bound"]),
                "defect": format_rational(report.defect),
            }
        )
    elif args.mode == "cover":
        bundle = _read(args.inputs[0], "two-covered bundle")
        g = graph.graph_from_json(bundle["graph"])
        cov = cover.cover_from_json(bundle["cover"], g.n)
        pair_cotrees = {}
        for item in bundle.get("pair_cotrees", []):
            c = cotree.cotree_from_json(item["cotree"], "pair_cotrees/cotree")
            pair_cotrees[(item["i"], item["j"])] = (c, item["vertices"])
        eps_pair = eps / (cov.p - 1)

        def partitioner(i, j, sub):
            if (i, j) not in pair_cotrees:
                raise InputError(f"bundle lacks a cotree for pair ({i},{j})")
            c, verts = pair_cotrees[(i, j)]
            if len(verts) != sub.n:
                raise InputError(f"pair ({i},{j}): cotree leaf count mismatch")
            part, _ = cographreg.cograph_regular_partition(c, eps_pair)
            return part

        combined = cover.cover_regular_partition(g, cov, eps, partitioner)
        report = regularity.nice_defect(g, combined)
        _emit(regularity.partition_to_json(combined))
        _stats(
            {
                "n": g.n,
                "p": cov.p,
                "eps": format_rational(eps),
                "ell": len(combined.blocks),
                "defect": format_rational(report.defect),
            }
        )
    elif args.mode == "equi":
        g = graph.graph_from_json(_read(args.inputs[0], "graph"))
        partition = regularity.partition_from_json(_read(args.inputs[1], "partition"), g.n)
        refined = cover.equipartition_refine(g, partition, eps)
        frac = cover.ordered_bad_fraction(g, refined)
        _emit(regularity.partition_to_json(refined))
        _stats(
            {
                "n": g.n,
                "K": len(refined.blocks),
                "eps": format_rational(eps),
                "bad_fraction": format_rational(frac),
            }
        )
    else:
        raise InputError(f"unknown partition mode {args.mode!r}")
    _stats({"millis": round(1000 * (time.monotonic() - t0), 3)})
    return EXIT_OK


# -- verify ----------------------------------------------------------------------


def _cmd_verify(args) -> int:
    if args.mode == "nice":
        eps = parse_rational(args.eps, "--eps")
        g = graph.graph_from_json(_read(args.inputs[0], "graph"))
        partition = regularity.partition_from_json(_read(args.inputs[1], "partition"), g.n)
        report = regularity.nice_defect(g, partition)
        verdict = report.defect < eps
        _emit(
            {
                "verdict": verdict,
                "defect": format_rational(report.defect),
                "bad_pairs": [list(p) for p in report.bad_pairs],
            }
        )
        return EXIT_OK if verdict else EXIT_REFUTED
    if args.mode == "eps-partition":
        eps = parse_rational(args.eps, "--eps")
        bundle = _read(args.inputs[0], "tree bundle")
        t = cotree.plane_tree_from_json(bundle.get("tree", bundle), "tree")
        m = treepart.measure_from_json(bundle["measure"], "measure")
        partition = treepart.partition_from_json(_read(args.inputs[1], "tree partition"))
        report = treepart.verify_eps_partition(t, m, eps, partition)
        _emit({"verdict": report.ok, "violations": report.violations})
        return EXIT_OK if report.ok else EXIT_REFUTED
    if args.mode == "embedding":
        g = graph.graph_from_json(_read(args.inputs[0], "graph"))
        emb, universe = encodings.embedding_from_json(_read(args.inputs[1], "embedding"))
        violations = encodings.embedding_violations(g, emb, universe)
        _emit({"verdict": not violations, "violations": violations[:50]})
        return EXIT_OK if not violations else EXIT_REFUTED
    if args.mode == "nd":
        eps = parse_rational(args.eps, "--eps")
        g = graph.graph_from_json(_read(args.inputs[0], "graph"))
        spec = _read(args.inputs[1], "nd partition")
        s = spec.get("s", [])
        blocks = spec["blocks"]
        verdict = regularity.verify_nd_partition(g, s, blocks, args.d, eps, args.nd_mode)
        _emit({"verdict": verdict})
        return EXIT_OK if verdict else EXIT_REFUTED
    if args.mode == "regular":
        eps = parse_rational(args.eps, "--eps")
        g = graph.graph_from_json(_read(args.inputs[0], "graph"))
        spec = _read(args.inputs[1], "pair")
        a, b = spec["a"], spec["b"]
        if max(len(a), len(b)) <= args.cap:
            verdict = regularity.eps_regular_exact(g, a, b, eps, cap=args.cap)
            _emit({"verdict": verdict, "certified": True})
            return EXIT_OK if verdict else EXIT_REFUTED
        witness = regularity.eps_regular_sampled(g, a, b, eps, samples=args.samples, seed=args.seed)
        if witness is not None:
            _emit({"verdict": False, "certified": True, "counterexample": [witness[0], witness[1]]})
            return EXIT_REFUTED
        _emit({"verdict": True, "certified": False, "note": "sampling found no counterexample"})
        return EXIT_OK
    raise InputError(f"unknown verify mode {args.mode!r}")


# -- embed -----------------------------------------------------------------------


def _cmd_embed(args) -> int:
    if args.mode == "degenerate":
        g = graph.graph_from_json(_read(args.inputs[0], "graph"))
        d, emb, universe = encodings.embed_degenerate(g)
        _emit(encodings.embedding_to_json(emb, universe))
        _stats({"d": d})
        return EXIT_OK
    if args.mode == "sc":
        dec = encodings.sc_from_json(_read(args.inputs[0], "sc decomposition"))
        emb, universe = encodings.embed_sc(dec)
        _emit(encodings.embedding_to_json(emb, universe))
        _stats({"depth": dec.depth, "graph": graph.graph_to_json(encodings.sc_graph(dec))})
        return EXIT_OK
    if args.mode == "two-cover":
        bundle = _read(args.inputs[0], "cover bundle")
        g = graph.graph_from_json(bundle["graph"])
        cov = cover.cover_from_json(bundle["cover"], g.n)
        pair_embeddings = {}
        max_d = 0
        pair_graphs = {}
        for i in range(cov.p):
            for j in range(i + 1, cov.p):
                sub, verts = g.induced(cov.blocks[i] + cov.blocks[j])
                d, _, _ = encodings.embed_degenerate(sub)
                max_d = max(max_d, d)
                pair_graphs[(i, j)] = (sub, verts)
        base = encodings.degenerate_universe(max_d)
        for (i, j), (sub, verts) in sorted(pair_graphs.items()):
            _, emb, _ = encodings.embed_degenerate_into(sub, max_d)
            pair_embeddings[(i, j)] = encodings.Embedding(
                emb.arity, {verts[v]: emb.mapping[v] for v in range(sub.n)}
            )
        emb, universe = encodings.embed_two_cover(g, cov.blocks, pair_embeddings, base)
        _emit(encodings.embedding_to_json(emb, universe))
        _stats({"p": cov.p, "base_d": max_d})
        return EXIT_OK
    raise InputError(f"unknown embed mode {args.mode!r}")


# -- rankdec / spectral ------------------------------------------------------------


def _cmd_rankdec(args) -> int:
    g = graph.graph_from_json(_read(args.inputs[0], "graph"))
    dec = gf2.decomposition_from_json(_read(args.inputs[1], "decomposition"))
    width = gf2.decomposition_width(g, dec)
    layers = gf2.xor_rw1_decompose(g, dec)
    ok, violations = gf2.layer_certificate(g, dec, layers)
    _emit(
        {
            "width": width,
            "layers": [[list(e) for e in layer] for layer in layers],
            "certificate": {"ok": ok, "violations": violations},
        }
    )
    return EXIT_OK if ok else EXIT_REFUTED


def _cmd_spectral(args) -> int:
    g = graph.graph_from_json(_read(args.inputs[0], "graph"))
    summary = spectral.symmetric_eigenvalues(g, args.tol)
    violations = 0
    samples = 0
    if args.mixing_samples and summary.lam is not None:
        rng = SplitMix64(args.seed)
        for _ in range(args.mixing_samples):
            s = [v for v in range(g.n) if rng.chance(1, 2)]
            t = [v for v in range(g.n) if rng.chance(1, 2)]
            if not s or not t:
                continue
            samples += 1
            if not spectral.mixing_check(g, s, t, summary.lam).holds:
                violations += 1
    _emit(
        {
            "n": g.n,
            "d": spectral.regular_degree(g),
            "lambda": summary.lam,
            "samples": samples,
            "violations": violations,
            "residual": summary.residual,
        }
    )
    return EXIT_OK if violations == 0 else EXIT_REFUTED


# -- bench --------------------------------------------------------------------------


def _cmd_bench(args) -> int:
    eps_list = [parse_rational(e, "--eps") for e in args.eps.split(",")]
    sizes = [int(s) for s in args.sizes.split(",")]
    sys.stdout.write("family,n,m,eps,parts,bound,defect,millis\n")
    rng = SplitMix64(args.seed)
    for n in sizes:
        for eps in eps_list:
            seed = rng.next64()
            if args.family == "cograph":
                c = generators.random_cotree(n, args.m, 4, seed)
                g = c.materialize()
                t0 = time.monotonic()
                partition, stats = cographreg.cograph_regular_partition(c, eps)
                millis = 1000 * (time.monotonic() - t0)
                report = regularity.nice_defect(g, partition)
                if report.defect >= eps:
                    raise ContractViolation("bench row violated the defect bound")
                sys.stdout.write(
                    f"cograph,{n},{args.m},{format_rational(eps)},{stats['ell']},"
                    f"{format_rational(stats['bound'])},{format_rational(report.defect)},"
                    f"{millis:.3f}\n"
                )
            else:
                raise InputError(f"unknown bench family {args.family!r}")
    return EXIT_OK


# -- parser ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="regpart")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="emit instance JSON")
    p.add_argument("--family", required=True)
    p.add_argument("--n", type=int, default=16)
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--p", type=int, default=2)
    p.add_argument("--r", type=int, default=2)
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--max-child", type=int, default=4, dest="max_child")
    p.add_argument("--measure", choices=["uniform", "random"], default="uniform")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("partition", help="construct a partition")
    p.add_argument("--mode", required=True, choices=["tree", "cograph", "cover", "equi"])
    p.add_argument("--eps", required=True)
    p.add_argument("inputs", nargs="*", default=["-"])
    p.set_defaults(func=_cmd_partition)

    p = sub.add_parser("verify", help="verify an artifact")
    p.add_argument("--mode", required=True, choices=["nice", "eps-partition", "embedding", "nd", "regular"])
    p.add_argument("--eps", default="1/2")
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--nd-mode", choices=["strong", "weak"], default="strong", dest="nd_mode")
    p.add_argument("--cap", type=int, default=12)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("inputs", nargs="+")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("embed", help="compute a set-defined embedding")
    p.add_argument("--mode", required=True, choices=["degenerate", "sc", "two-cover"])
    p.add_argument("inputs", nargs="+")
    p.set_defaults(func=_cmd_embed)

    p = sub.add_parser("rankdec", help="decompose into cut-rank-1 layers")
    p.add_argument("inputs", nargs=2)
    p.set_defaults(func=_cmd_rankdec)

    p = sub.add_parser("spectral", help="eigenvalues and mixing checks")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--mixing-samples", type=int, default=0, dest="mixing_samples")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("inputs", nargs=1)
    p.set_defaults(func=_cmd_spectral)

    p = sub.add_parser("bench", help="CSV benchmark rows")
    p.add_argument("--family", default="cograph")
    p.add_argument("--eps", required=True)
    p.add_argument("--sizes", required=True)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        sys.stderr.write(f"input error: {exc}\n")
        return EXIT_INPUT
    except ContractViolation as exc:
        sys.stderr.write(f"contract violation: {exc}\n")
        return EXIT_CONTRACT
    except RegpartError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
