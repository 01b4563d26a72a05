"""Command line entry point: ``hostcolor <command> ...``."""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .generators import MODELS, gen_gnp, gen_random_regular, make_instance, read_bundle, write_bundle
from .graph import Coloring, Graph
from .io import ParseError, read_coloring, read_graph, write_coloring, write_graph

SEED_ENV = "HOSTCOLOR_SEED"


def _master_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV)
    if env:
        try:
            return int(env)
        except ValueError:
            raise SystemExit(f"{SEED_ENV} must be a decimal integer, got {env!r}")
    return 0


def _params(args) -> dict:
    if not args.params:
        return {}
    p = Path(args.params)
    return json.loads(p.read_text() if p.exists() else args.params)


def _out(args, default: str) -> Path:
    return Path(args.out or default)


def _dump(obj, path: Path | None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)


def _json_default(x):
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, tuple):
        return list(x)
    return str(x)


def _read_set(path) -> list[int]:
    return [int(tok) for tok in Path(path).read_text().split()]


def cmd_gen(args) -> int:
    seed = _master_seed(args)
    if args.kind == "regular":
        G = gen_random_regular(args.n, int(args.d), seed)
    else:
        G = gen_gnp(args.n, args.d, seed)
    out = _out(args, "host.graph")
    write_graph(G, out)
    print(f"wrote {out}: n={G.n} m={G.m}")
    return 0


def cmd_plant(args) -> int:
    from .harness import adversary_menu
    seed = _master_seed(args)
    host = read_graph(args.host) if args.host else None
    model = args.model
    plant = None
    if model[1] == "A":
        if args.planting:
            n = host.n if host else args.n
            plant = read_coloring(args.planting, n=n)
        else:
            if host is None:
                raise SystemExit("adversarial planting by strategy needs --host")
            plant = adversary_menu(args.adversary, host, args.k, seed)
    if model[0] == "R" and host is not None:
        raise SystemExit(f"model {model} samples the host; drop --host")
    if model[0] == "A" and host is None:
        raise SystemExit(f"model {model} needs --host")
    inst = make_instance(model, n=None if host else args.n, k=args.k, d=args.d, host_input=host,
                         plant_input=plant, seed=seed, host_kind=args.kind)
    out = write_bundle(inst, _out(args, "instance"), {"seed": seed})
    print(f"wrote bundle {out}")
    return 0


def _trace_json(res, inst=None, eps=0.01) -> dict:
    from .pipeline import compute_SB
    out = {"complete": res.complete, "legal": res.legal, "failure": res.failure, "b": res.b, "d": res.d,
           "timings_ms": res.trace.timings_ms, "notes": res.trace.notes,
           "disagreement": res.trace.disagreement}
    if inst is not None:
        out["sb_size"] = len(compute_SB(inst, eps))
    return out


def cmd_color(args) -> int:
    from .generators import PlantedInstance
    from .graph import is_legal_coloring
    from .pipeline import (ClusteringFailed, NotThreeColorable, PipelineParams, color_AR, color_RA,
                           sparse_3_color, spectral_k_clustering)
    params = PipelineParams.from_dict(_params(args))
    seed = _master_seed(args)
    if args.bundle:
        inst = read_bundle(args.bundle)
        G = inst.result
    else:
        G = read_graph(args.graph)
        inst = None
        if args.planted and args.host:
            H = read_graph(args.host)
            inst = PlantedInstance(H, read_coloring(args.planted, n=H.n), G, {})
    out = _out(args, "coloring")
    out.mkdir(parents=True, exist_ok=True)
    trace: dict = {"algo": args.algo}
    C = None
    if args.algo in ("ar", "ra"):
        fn = color_AR if args.algo == "ar" else color_RA
        res = fn(inst if inst is not None else G, d=args.d, params=params, seed=seed)
        C = res.coloring
        trace.update(_trace_json(res, inst, params.eps))
    elif args.algo == "k-cluster":
        try:
            C = spectral_k_clustering(G, args.k, params, d=args.d, seed=seed)
        except ClusteringFailed as exc:
            trace["failure"] = f"cluster: {exc}"
    else:
        try:
            C = sparse_3_color(G)
        except (NotThreeColorable, ValueError) as exc:
            trace["failure"] = f"sparse3: {exc}"
    if C is not None:
        write_coloring(C, out / "result.coloring")
        trace["complete"] = C.is_total
        trace["legal"] = bool(is_legal_coloring(G, C)[0]) and C.is_total
    _dump(trace, out / "trace.json")
    print(f"wrote {out}: legal={trace.get('legal')} complete={trace.get('complete')}")
    return 0 if trace.get("legal") else 1


def cmd_verify(args) -> int:
    from .harness import verify
    try:
        code, viol = verify(args.graph, args.coloring)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    if code == 0:
        print("legal")
    else:
        for u, v in viol:
            print(f"monochromatic edge {u} {v}")
        print(f"illegal: {len(viol)} monochromatic edge(s)" if viol else "illegal: coloring is partial")
    return code


def cmd_spectrum(args) -> int:
    from .spectral import DENSE_CAP, extreme_eigenpairs, full_spectrum_dense, lambda_expansion, mixing_discrepancy
    G = read_graph(args.graph)
    seed = _master_seed(args)
    report: dict = {"n": G.n, "m": G.m}
    if args.dense or (G.n <= DENSE_CAP and not args.iterative):
        sd = full_spectrum_dense(G)
        w = sd.eigenvalues
        report["method"] = "dense"
        report["eigenvalues"] = (w[:args.high].tolist() + w[G.n - args.low:].tolist()
                                 if (args.high or args.low) else w.tolist())
        report["lambda_hat"] = float(max(w[1], -w[-1])) if G.n > 1 else 0.0
        sel = list(range(args.high)) + list(range(G.n - args.low, G.n))
        res = sd.residuals(G)
        report["residuals"] = [float(res[i]) for i in sel] if sel else float(res.max())
    else:
        sd = extreme_eigenpairs(G, num_low=args.low or 2, num_high=args.high or 2, seed=seed)
        report["method"] = "iterative"
        report["eigenvalues"] = sd.eigenvalues.tolist()
        report["residuals"] = sd.residuals(G).tolist()
        report["lambda_hat"] = lambda_expansion(G, seed=seed)
    if args.S and args.T:
        d = args.d if args.d is not None else int(round(G.average_degree()))
        report["mixing"] = mixing_discrepancy(G, _read_set(args.S), _read_set(args.T), d,
                                              lam=report["lambda_hat"])
    _dump(report, Path(args.out) if args.out else None)
    return 0


def cmd_forge(args) -> int:
    from . import forge as fg
    from .generators import PlantedInstance
    seed = _master_seed(args)
    out = _out(args, f"forge-{args.mode}")
    out.mkdir(parents=True, exist_ok=True)
    cert: dict = {"mode": args.mode, "seed": seed}
    try:
        if args.mode == "reduce":
            H4 = read_graph(args.input)
            r = fg.reduce_4regular_to_balanced(H4)
            write_graph(r.graph, out / "result.graph")
            cert.update(n=r.graph.n, m=r.graph.m, average_degree=str(r.average_degree),
                        max_density=str(r.max_density), balanced=r.balanced, colorability=r.colorability)
        elif args.mode == "aa":
            Q = read_graph(args.input)
            chi = read_coloring(args.chi, n=Q.n) if args.chi else None
            a = fg.forge_AA(Q, args.n, int(args.d), seed, chi)
            inst = PlantedInstance(a.H, a.planted, a.G, {"model": "AA", "n": a.n, "k": 3, "d": args.d})
            write_bundle(inst, out, {"seed": seed})
            cert.update(a.certificate, connectors=len(a.connectors))
        elif args.mode in ("ra", "k4"):
            H = read_graph(args.host)
            Q = read_graph(args.input)
            fn = fg.forge_RA_adversary if args.mode == "ra" else fg.forge_k4_planting
            r = fn(H, Q, seed)
            from .generators import apply_planting
            inst = apply_planting(H, r.planted, {"model": "RA", "seed": seed})
            write_bundle(inst, out)
            cert.update(copy=list(r.copy))
        else:
            Q = read_graph(args.input)
            Hp = read_graph(args.host)
            r = fg.embed_Q_via_independent_blocks(Q, Hp, args.block_size, seed)
            write_bundle(r.instance, out, {"seed": seed})
            cert.update(copy=list(r.copy), blocks=[list(b) for b in r.blocks])
        cert["status"] = "ok"
        code = 0
    except fg.ForgeFail as exc:
        cert.update(status="fail", step=str(exc.step), detail=exc.detail)
        code = 1
    _dump(cert, out / "certificate.json")
    print(f"forge {args.mode}: {cert['status']} ({out})")
    return code


def cmd_experiment(args) -> int:
    from .harness import ExperimentConfig, run_experiment
    data = json.loads(Path(args.config).read_text())
    if args.seed is not None or os.environ.get(SEED_ENV):
        data["master_seed"] = _master_seed(args)
    if args.workers is not None:
        data["workers"] = args.workers
    if args.params:
        data["params"] = {**data.get("params", {}), **_params(args)}
    if args.out:
        data["out_dir"] = args.out
    cfg = ExperimentConfig.from_dict(data)
    res = run_experiment(cfg)
    for key, pt in sorted(res["summary"]["points"].items()):
        print(f"{key}: {pt['successes']}/{pt['cells']}")
    print(f"wrote {res['results']}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help=f"master seed (else ${SEED_ENV}, else 0)")
    common.add_argument("--out", default=None, help="output file or directory")
    common.add_argument("--workers", type=int, default=None)
    common.add_argument("--params", default=None, help="pipeline parameters: JSON file or inline JSON")

    ap = argparse.ArgumentParser(prog="hostcolor", description=__doc__)
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", parents=[common], help="sample a host graph")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=float, required=True)
    p.add_argument("--kind", choices=("gnp", "regular"), default="gnp")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("plant", parents=[common], help="build a planted instance bundle")
    p.add_argument("--model", choices=MODELS, default="RR")
    p.add_argument("--host", help="host graph file (models AA, AR)")
    p.add_argument("--planting", help="planted coloring file (models AA, RA)")
    p.add_argument("--adversary", default="id-blocks", help="strategy when no planting file is given")
    p.add_argument("--n", type=int)
    p.add_argument("--d", type=float)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--kind", choices=("gnp", "regular"), default="gnp")
    p.set_defaults(func=cmd_plant)

    p = sub.add_parser("color", parents=[common], help="color a graph")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--graph")
    src.add_argument("--bundle", help="instance directory written by 'plant'")
    p.add_argument("--host", help="host graph, for diagnostics")
    p.add_argument("--planted", help="planted coloring, for diagnostics")
    p.add_argument("--algo", choices=("ar", "ra", "k-cluster", "sparse3"), default="ar")
    p.add_argument("--d", type=float, default=None)
    p.add_argument("--k", type=int, default=3)
    p.set_defaults(func=cmd_color)

    p = sub.add_parser("verify", parents=[common], help="check a coloring")
    p.add_argument("graph")
    p.add_argument("coloring")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("spectrum", parents=[common], help="eigenvalue report as JSON")
    p.add_argument("graph")
    p.add_argument("--high", type=int, default=0)
    p.add_argument("--low", type=int, default=0)
    p.add_argument("--dense", action="store_true")
    p.add_argument("--iterative", action="store_true")
    p.add_argument("--S")
    p.add_argument("--T")
    p.add_argument("--d", type=int, default=None)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("forge", parents=[common], help="hardness constructions")
    p.add_argument("mode", choices=("reduce", "aa", "ra", "k4", "embed"))
    p.add_argument("--input", required=True, help="H4 for reduce, Q otherwise")
    p.add_argument("--host", help="host graph (ra, k4, embed)")
    p.add_argument("--chi", help="coloring of Q (aa)")
    p.add_argument("--n", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--block-size", type=int, default=12)
    p.set_defaults(func=cmd_forge)

    p = sub.add_parser("experiment", parents=[common], help="run a JSON experiment config")
    p.add_argument("config")
    p.set_defaults(func=cmd_experiment)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc.strerror or exc}: {exc.filename}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
