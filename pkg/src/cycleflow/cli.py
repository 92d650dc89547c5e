"""Command-line front end: generate, decompose, spectrum, cluster, modularity, export-graph.

Every output JSON embeds the full run configuration and a SHA-256 hash of the
input file, and all serialization is key-sorted, so identical inputs and
configurations produce byte-identical outputs.

Exit codes: 0 success, 2 validation error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import generators
from .clustering import committors, estimate_num_modules, find_cores, fuzzy_partition
from .commgraph import communication_graph, cycle_graph, export_graph
from .cycles import (decomposition_to_json, iterative_decomposition,
                     sample_decomposition, verify_flow_decomposition)
from .graph import (edge_flow, read_edge_list, read_trajectory, simulate,
                    stationary_distribution, transition_matrix, write_edge_list)
from .lifted import (cycle_to_node_matrix, lifted_node_chain,
                     node_to_cycle_matrix, spectrum, spectrum_reversible)
from .modularity import maximize, modules_from_labels, score_q_directed, score_qbar

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3


@dataclass(frozen=True)
class RunConfig:
    """Echo of every parameter that influenced a run."""

    command: str
    input: str | None = None
    trajectory: str | None = None
    decomposer: str = "sample"
    T: int = 1_000_000
    seed: int = 0
    start: str | None = None
    tol: float = 1e-12
    m: str = "auto"
    m_max: int = 8
    theta: float = 0.9
    method: str | None = None
    k: int | None = None
    which: str | None = None
    format: str | None = None
    self_loops: bool = True
    partition: str | None = None
    generator: str | None = None
    n: int | None = None
    eps: float | None = None
    p: float | None = None


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(65536), b""):
            h.update(block)
    return h.hexdigest()


def _dump_json(path: Path, obj: dict) -> None:
    path.write_text(json.dumps(obj, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def _tag(config: RunConfig, input_path=None) -> dict:
    tag = {"config": asdict(config)}
    if input_path is not None:
        tag["input_sha256"] = _sha256(input_path)
    return tag


def _load_pipeline(config: RunConfig):
    """Graph file -> (G, P, pi, decomposition) per the configured decomposer."""
    G = read_edge_list(config.input)
    P = transition_matrix(G)
    pi = stationary_distribution(P, tol=config.tol)
    if config.decomposer == "iterative":
        dec = iterative_decomposition(edge_flow(P, pi), nodes=G.nodes)
    elif config.decomposer == "sample":
        if config.T < 2:
            raise ValueError("trajectory length T must be >= 2")
        if config.start is None:
            start = 0
        else:
            try:
                start = G.index(config.start)
            except KeyError:
                raise ValueError(f"unknown start node {config.start!r}") from None
        traj = simulate(P, start, config.T, seed=config.seed)
        traj = dataclasses.replace(traj, nodes=G.nodes)
        dec = sample_decomposition(traj, n_nodes=G.n)
    else:
        raise ValueError(f"unknown decomposer {config.decomposer!r}")
    return G, P, pi, dec


def cmd_generate(config: RunConfig, output: Path) -> int:
    if config.generator == "barbell":
        if config.n is None or config.eps is None:
            raise ValueError("barbell needs --n and --eps")
        G = generators.barbell(config.n, config.eps)
    elif config.generator == "wheel-switch":
        if config.n is None or config.p is None:
            raise ValueError("wheel-switch needs --n and --p")
        G = generators.wheel_switch(config.n, config.p)
    elif config.generator == "ring":
        if config.n is None:
            raise ValueError("ring needs --n")
        G = generators.ring(config.n)
    else:
        raise ValueError(f"unknown generator {config.generator!r}")
    write_edge_list(G, output)
    print(f"wrote {G.n} nodes, {len(G.edges)} edges to {output}")
    return EXIT_OK


def cmd_decompose(config: RunConfig, outdir: Path) -> int:
    if config.trajectory is not None:
        traj = read_trajectory(config.trajectory)
        dec = sample_decomposition(traj)
        extra = _tag(config, config.trajectory)
        extra["flow_residual"] = None  # no reference flow in timeseries mode
    else:
        G, P, pi, dec = _load_pipeline(config)
        F = edge_flow(P, pi)
        extra = _tag(config, config.input)
        extra["flow_residual"] = verify_flow_decomposition(dec, F)
        extra["max_flow"] = float(F.max())
    out = outdir / "decomposition.json"
    out.write_text(decomposition_to_json(dec, extra), encoding="utf-8")
    resid = extra.get("flow_residual")
    print(f"{len(dec.weights)} cycles -> {out}"
          + (f" (flow residual {resid:.3e})" if resid is not None else ""))
    return EXIT_OK


def cmd_spectrum(config: RunConfig, outdir: Path) -> int:
    G, P, pi, dec = _load_pipeline(config)
    B = node_to_cycle_matrix(dec, pi)
    Pn = lifted_node_chain(B, cycle_to_node_matrix(dec))
    rep_walk = spectrum(P, k=config.k)
    rep_lift = spectrum_reversible(Pn, pi, k=config.k)
    (outdir / "spectrum_walk.csv").write_text(rep_walk.csv_text(), encoding="utf-8")
    (outdir / "spectrum_lifted.csv").write_text(rep_lift.csv_text(), encoding="utf-8")
    _dump_json(outdir / "spectrum.json", {
        **_tag(config, config.input),
        "walk_top": [[lam.real, lam.imag] for lam in rep_walk.eigenvalues[:10]],
        "lifted_top": [lam.real for lam in rep_lift.eigenvalues[:10]],
        "lifted_max_imag": rep_lift.max_imag,
    })
    print(f"spectra -> {outdir}/spectrum_walk.csv, {outdir}/spectrum_lifted.csv")
    return EXIT_OK


def _cluster_cmsm(config: RunConfig, G, pi, dec, K):
    if config.m == "auto":
        B = node_to_cycle_matrix(dec, pi)
        rep = spectrum_reversible(lifted_node_chain(B, cycle_to_node_matrix(dec)), pi)
        m = estimate_num_modules(rep, config.m_max)
    else:
        m = int(config.m)
    cores = find_cores(K, m, config.theta)
    q = committors(K, cores)
    part = fuzzy_partition(cores, q)
    return {
        "m": part.m,
        "cores": [[G.nodes[v] for v in core] for core in cores.cores],
        "transition_region": [G.nodes[v] for v in cores.transition],
        "committors": {G.nodes[v]: [float(x) for x in q[v]] for v in range(G.n)},
        "labels": {G.nodes[v]: int(part.labels[v]) for v in range(G.n)},
        "ties": [G.nodes[v] for v in np.flatnonzero(part.ties)],
        "theta_used": cores.theta,
    }


def cmd_cluster(config: RunConfig, outdir: Path) -> int:
    G, P, pi, dec = _load_pipeline(config)
    K = communication_graph(dec, pi)
    if config.method == "cmsm":
        result = _cluster_cmsm(config, G, pi, dec, K)
        lines = ["node,label,tie," + ",".join(f"q{j}" for j in range(result["m"]))]
        tie_set = set(result["ties"])
        for v in G.nodes:
            qs = ",".join(repr(x) for x in result["committors"][v])
            lines.append(f"{v},{result['labels'][v]},{int(v in tie_set)},{qs}")
        (outdir / "partition.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    elif config.method in ("qbar-max", "q-max"):
        if config.method == "qbar-max":
            labels, score, history = maximize("qbar", pi=pi, I=K.intensity, mode="greedy")
        else:
            labels, score, history = maximize("q", pi=pi, P=P, mode="greedy")
        result = {
            "objective": "qbar" if config.method == "qbar-max" else "q",
            "value": score,
            "partition": [[G.nodes[v] for v in mod] for mod in modules_from_labels(labels)],
            "merge_history": history,
        }
    else:
        raise ValueError(f"unknown clustering method {config.method!r}")
    result.update(_tag(config, config.input))
    _dump_json(outdir / "partition.json", result)
    print(f"{config.method} -> {outdir}/partition.json")
    return EXIT_OK


def _read_partition_file(path, G):
    labels = np.full(G.n, -1, dtype=int)
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected node<TAB>module_index")
            node, mod = parts
            try:
                labels[G.index(node)] = int(mod)
            except KeyError as exc:
                raise ValueError(f"{path}:{lineno}: unknown node {node!r}") from exc
    if np.any(labels < 0):
        missing = G.nodes[int(np.flatnonzero(labels < 0)[0])]
        raise ValueError(f"partition is not full: node {missing!r} unassigned")
    return labels


def cmd_modularity(config: RunConfig, outdir: Path) -> int:
    G, P, pi, dec = _load_pipeline(config)
    K = communication_graph(dec, pi)
    labels = _read_partition_file(config.partition, G)
    result = {
        "q_directed": score_q_directed(P, pi, labels),
        "qbar": score_qbar(K.intensity, pi, labels),
        "modules": [[G.nodes[v] for v in mod] for mod in modules_from_labels(labels)],
        **_tag(config, config.input),
        "partition_sha256": _sha256(config.partition),
    }
    _dump_json(outdir / "modularity.json", result)
    print(f"Q={result['q_directed']:.6f} Qbar={result['qbar']:.6f} -> {outdir}/modularity.json")
    return EXIT_OK


def cmd_export_graph(config: RunConfig, output: Path) -> int:
    G, P, pi, dec = _load_pipeline(config)
    if config.which == "communication":
        graph = communication_graph(dec, pi)
    elif config.which == "cycle":
        B = node_to_cycle_matrix(dec, pi)
        graph = cycle_graph(dec, B)
    else:
        raise ValueError(f"unknown graph kind {config.which!r}")
    text = export_graph(graph, config.format, include_self_loops=config.self_loops)
    output.write_text(text, encoding="utf-8")
    print(f"{config.which} graph ({config.format}) -> {output}")
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="cycleflow",
        description="Cycle-flow decomposition and fuzzy module detection "
                    "for directed weighted networks.")
    sub = ap.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a benchmark graph as edge-list TSV")
    gen.add_argument("generator", choices=["barbell", "wheel-switch", "ring"])
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--eps", type=float)
    gen.add_argument("--p", type=float)
    gen.add_argument("--output", required=True)

    def add_pipeline_args(p, trajectory=False):
        p.add_argument("--input", help="edge-list TSV (src<TAB>dst<TAB>weight)")
        if trajectory:
            p.add_argument("--trajectory", help="timeseries file, one node id per line")
        p.add_argument("--decomposer", choices=["sample", "iterative"], default="sample")
        p.add_argument("--T", type=int, default=1_000_000)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--start", help="start node for sampling (default: first node)")
        p.add_argument("--tol", type=float, default=1e-12)

    dec = sub.add_parser("decompose", help="cycle decomposition plus flow residual")
    add_pipeline_args(dec, trajectory=True)
    dec.add_argument("--output-dir", required=True)

    spec = sub.add_parser("spectrum", help="eigenvalues of the walk and its lifted chain")
    add_pipeline_args(spec)
    spec.add_argument("--k", type=int, help="keep top-k by modulus")
    spec.add_argument("--output-dir", required=True)

    clu = sub.add_parser("cluster", help="fuzzy modules or modularity maximization")
    add_pipeline_args(clu)
    clu.add_argument("--method", choices=["cmsm", "qbar-max", "q-max"], default="cmsm")
    clu.add_argument("--m", default="auto", help="module count or 'auto'")
    clu.add_argument("--m-max", type=int, default=8)
    clu.add_argument("--theta", type=float, default=0.9)
    clu.add_argument("--output-dir", required=True)

    mod = sub.add_parser("modularity", help="score a given full partition")
    add_pipeline_args(mod)
    mod.add_argument("--partition", required=True,
                     help="TSV node<TAB>module_index, every node assigned")
    mod.add_argument("--output-dir", required=True)

    exp = sub.add_parser("export-graph", help="emit the communication or cycle graph")
    add_pipeline_args(exp)
    exp.add_argument("--which", choices=["communication", "cycle"], default="communication")
    exp.add_argument("--format", choices=["dot", "tsv", "json"], default="tsv")
    exp.add_argument("--no-self-loops", action="store_true")
    exp.add_argument("--output", required=True)

    return ap


def _config_from_args(args) -> RunConfig:
    get = lambda name, default=None: getattr(args, name, default)
    if args.command != "generate" and get("trajectory") is None and get("input") is None:
        raise ValueError("--input is required")
    return RunConfig(
        command=args.command,
        input=get("input"),
        trajectory=get("trajectory"),
        decomposer=get("decomposer", "sample"),
        T=get("T", 1_000_000),
        seed=get("seed", 0),
        start=get("start"),
        tol=get("tol", 1e-12),
        m=str(get("m", "auto")),
        m_max=get("m_max", 8),
        theta=get("theta", 0.9),
        method=get("method"),
        k=get("k"),
        which=get("which"),
        format=get("format"),
        self_loops=not get("no_self_loops", False),
        partition=get("partition"),
        generator=get("generator"),
        n=get("n"),
        eps=get("eps"),
        p=get("p"),
    )


def _validate_numbers(config: RunConfig) -> None:
    if config.T < 1:
        raise ValueError("T must be positive")
    if not 0 < config.tol < 1:
        raise ValueError("tol must lie in (0, 1)")
    if not 0.5 < config.theta < 1:
        raise ValueError("theta must lie in (0.5, 1)")
    if config.m != "auto":
        if not config.m.lstrip("-").isdigit() or int(config.m) < 2:
            raise ValueError("m must be 'auto' or an integer >= 2")
    if config.m_max < 2:
        raise ValueError("m-max must be >= 2")


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = _config_from_args(args)
        _validate_numbers(config)
        if args.command == "generate":
            return cmd_generate(config, Path(args.output))
        if args.command == "export-graph":
            return cmd_export_graph(config, Path(args.output))
        outdir = Path(args.output_dir)
        outdir.mkdir(parents=True, exist_ok=True)
        if args.command == "decompose":
            return cmd_decompose(config, outdir)
        if args.command == "spectrum":
            return cmd_spectrum(config, outdir)
        if args.command == "cluster":
            return cmd_cluster(config, outdir)
        if args.command == "modularity":
            return cmd_modularity(config, outdir)
        raise ValueError(f"unknown command {args.command!r}")
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (RuntimeError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
