"""Command-line driver.

Exit codes: 0 success, 2 bad input, 3 not converged, 4 solvers disagree,
5 non-unique steady state, 6 superoperator size cap exceeded, 7 lattice
boundary contamination.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import classical, lattice, output, quantum, spectral
from .config import FORMATS, MODES, SOLVERS, RunConfig, load_config
from .errors import (
    BoundaryContaminationError,
    NonUniquenessError,
    QRankError,
    SizeCapError,
    ValidationError,
)
from .graph import WebGraph, google_from_graph, parse_edge_list, random_graph, serialize_edge_list

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NOT_CONVERGED = 3
EXIT_DISAGREE = 4
EXIT_NON_UNIQUE = 5
EXIT_SIZE_CAP = 6
EXIT_BOUNDARY = 7

SOLVER_AGREEMENT_TOL = 1e-5
DEFAULT_QUANTUM_EPSILON = 0.5
DEFAULT_DISSIPATIVE_EPSILON = 1.0

# Config keys each command depends on; these go into output headers.
CLASSICAL_KEYS = ("alpha", "tol", "max_iter", "format")
QUANTUM_KEYS = ("alpha", "epsilon", "hamiltonian", "solver", "dt", "tol", "t_max",
                "snapshot_time", "snapshot_every", "format")
SPECTRUM_KEYS = ("alpha", "epsilon", "hamiltonian", "format")
LATTICE_KEYS = ("sites", "beta", "coupling", "boundary", "z", "input_site", "site_a",
                "site_b", "times", "mode", "epsilon", "dt", "format")


def _read_graph(path: str) -> WebGraph:
    try:
        with open(path) as fh:
            return parse_edge_list(fh)
    except OSError as exc:
        raise ValidationError(f"cannot read graph file {path}: {exc.strerror}") from None


def read_matrix_file(path: str) -> np.ndarray:
    """Square matrix from CSV; entries may be complex in Python syntax (``1-2j``)."""
    rows = []
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read matrix file {path}: {exc.strerror}") from None
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            rows.append([complex(x.strip().replace(" ", "")) for x in line.split(",")])
        except ValueError:
            raise ValidationError(f"{path}: line {lineno}: bad matrix entry") from None
    m = np.array(rows, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValidationError(f"{path}: matrix is not square")
    return m


def _hamiltonian_args(cfg: RunConfig):
    if cfg.hamiltonian.startswith("custom:"):
        return quantum.HamiltonianSource.CUSTOM, read_matrix_file(cfg.hamiltonian[7:])
    return quantum.HamiltonianSource(cfg.hamiltonian), None


def _eps_dirname(i: int, eps: float) -> str:
    return f"eps_{i:02d}_{eps!r}"


def cmd_rank_classical(graph_file: str, cfg: RunConfig) -> int:
    g = google_from_graph(_read_graph(graph_file), cfg.alpha)
    tol = 1e-12 if cfg.tol is None else cfg.tol
    trace = classical.power_iterate(g, tol=tol, max_iter=cfg.max_iter)
    header = {"graph": graph_file, **cfg.as_header(CLASSICAL_KEYS), "tol": tol}
    out = Path(cfg.output_dir)
    output.write_ranks(out, "rank-classical", header, trace.final, cfg.format)
    output.write_csv(out / "trace.csv", "rank-classical", header, ("step", "residual"), trace.iterates)
    if not trace.converged:
        print(f"power iteration did not converge in {cfg.max_iter} iterations", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def _quantum_entry(g, cfg: RunConfig, eps: float, header: dict, out: Path) -> tuple[int, dict]:
    source, hmat = _hamiltonian_args(cfg)
    l = quantum.build_liouvillian(source, g, eps, hmat)
    tol = quantum.DEFAULT_TOL if cfg.tol is None else cfg.tol
    summary: dict = {"epsilon": eps, "solver": cfg.solver}
    status = EXIT_OK

    report = None
    if g.dim <= spectral.size_cap():
        report = spectral.spectrum(spectral.vectorize(l))
    elif cfg.solver != "integrate":
        spectral.check_size(g.dim)
    summary["kernel_dimension"] = None if report is None else report.kernel_dimension
    summary["spectral_gap"] = None if report is None else report.spectral_gap
    summary["max_real_part"] = None if report is None else report.max_real_part

    rho_int = rho_ker = None
    if cfg.solver in ("integrate", "both"):
        ss = quantum.steady_state_by_integration(l, tol=tol, t_max=cfg.t_max, dt=cfg.dt)
        rho_int = ss.rho
        summary.update(integration_converged=ss.converged, integration_time=ss.time)
        if not ss.converged:
            status = EXIT_NOT_CONVERGED
    if cfg.solver in ("kernel", "both"):
        rho_ker = spectral.steady_state_by_kernel(l)
    rho = rho_ker if rho_ker is not None else rho_int
    summary["generator_residual"] = quantum.residual(l, rho)
    if rho_int is not None and rho_ker is not None:
        gap = float(np.max(np.abs(rho_int - rho_ker)))
        summary["solver_disagreement"] = gap
        if gap > SOLVER_AGREEMENT_TOL:
            status = EXIT_DISAGREE

    p = quantum.quantum_pagerank(rho)
    summary["rank_file"] = output.write_ranks(out, "rank-quantum", header, p, cfg.format).name
    if cfg.snapshot_time > 0:
        snaps = quantum.integrate(
            l, quantum.initial_state(g.dim), cfg.snapshot_time, cfg.dt, cfg.snapshot_every
        )
        output.write_snapshots(out, "rank-quantum", header, snaps, cfg.format)
    output.write_json(out / "summary.json", "rank-quantum", header, {"summary": summary})
    return status, summary


def cmd_rank_quantum(graph_file: str, cfg: RunConfig) -> int:
    g = google_from_graph(_read_graph(graph_file), cfg.alpha)
    eps_list = cfg.epsilon or [DEFAULT_QUANTUM_EPSILON]
    base = Path(cfg.output_dir)
    tol = quantum.DEFAULT_TOL if cfg.tol is None else cfg.tol
    header = {"graph": graph_file, **cfg.as_header(QUANTUM_KEYS), "epsilon": eps_list, "tol": tol}
    entries = []
    status = EXIT_OK
    for i, eps in enumerate(eps_list):
        sub = _eps_dirname(i, eps)
        entry = {"epsilon": eps, "dir": sub}
        try:
            code, summary = _quantum_entry(g, cfg, eps, {**header, "entry_epsilon": eps}, base / sub)
        except NonUniquenessError as exc:
            print(f"epsilon={eps}: {exc}", file=sys.stderr)
            code, summary = EXIT_NON_UNIQUE, {"kernel_dimension": exc.kernel_dimension}
        entry.update(exit_code=code, summary=summary)
        entries.append(entry)
        if code == EXIT_DISAGREE:
            print(f"epsilon={eps}: solvers disagree by {summary['solver_disagreement']:.3g}",
                  file=sys.stderr)
        if status == EXIT_OK and code != EXIT_OK:
            status = code
    output.write_json(base / "sweep.json", "rank-quantum", header, {"entries": entries})
    return status


def cmd_spectrum(graph_file: str, cfg: RunConfig) -> int:
    g = google_from_graph(_read_graph(graph_file), cfg.alpha)
    eps_list = cfg.epsilon or [DEFAULT_QUANTUM_EPSILON]
    if len(eps_list) != 1:
        raise ValidationError("spectrum takes a single --epsilon")
    spectral.check_size(g.dim)
    source, hmat = _hamiltonian_args(cfg)
    l = quantum.build_liouvillian(source, g, eps_list[0], hmat)
    rep = spectral.spectrum(spectral.vectorize(l))
    header = {"graph": graph_file, **cfg.as_header(SPECTRUM_KEYS), "epsilon": eps_list}
    out = Path(cfg.output_dir)
    payload = rep.to_dict()
    payload["left_half_plane"] = rep.max_real_part <= 1e-10
    output.write_json(out / "spectrum.json", "spectrum", header, payload)
    if cfg.format == "csv":
        output.write_csv(out / "eigenvalues.csv", "spectrum", header, ("re", "im"),
                         ((z.real, z.imag) for z in rep.eigenvalues))
    return EXIT_OK


def _lattice_from(cfg: RunConfig) -> lattice.LatticeHamiltonian:
    n = cfg.sites
    beta = cfg.beta * n if len(cfg.beta) == 1 else cfg.beta
    ncoup = n - 1 if cfg.boundary == "open" else n
    coupling = cfg.coupling * ncoup if len(cfg.coupling) == 1 else cfg.coupling
    return lattice.tight_binding(beta, coupling, cfg.boundary)


def cmd_lattice(action: str, cfg: RunConfig) -> int:
    h = _lattice_from(cfg)
    header = {**cfg.as_header(LATTICE_KEYS), "action": action}
    out = Path(cfg.output_dir)
    if action == "dist":
        site = cfg.input_site if cfg.input_site is not None else h.site_count // 2
        p = lattice.single_photon_distribution(lattice.propagator(h, cfg.z), site)
        if cfg.format == "json":
            output.write_json(out / "dist.json", "lattice dist", header, {"p": p})
        else:
            output.write_csv(out / "dist.csv", "lattice dist", header, ("site", "p"), enumerate(p))
    elif action == "corr":
        gamma = lattice.two_photon_correlation(lattice.propagator(h, cfg.z), cfg.site_a, cfg.site_b)
        if cfg.format == "json":
            output.write_json(out / "corr.json", "lattice corr", header, {"gamma": gamma})
        else:
            n = h.site_count
            rows = ((q, r, gamma[q, r]) for q in range(n) for r in range(n))
            output.write_csv(out / "corr.csv", "lattice corr", header, ("q", "r", "gamma"), rows)
    else:
        site = cfg.input_site if cfg.input_site is not None else h.site_count // 2
        if cfg.mode == "unitary":
            target = h
        else:
            eps = (cfg.epsilon or [DEFAULT_DISSIPATIVE_EPSILON])[0]
            target = lattice.lattice_liouvillian(h, eps)
        res = lattice.spread_profile(target, site, cfg.times, cfg.dt)
        output.write_csv(out / "spread.csv", "lattice spread", header, ("t", "variance"),
                         zip(res.times, res.variances))
        output.write_json(out / "spread.json", "lattice spread", header,
                          {"exponent": res.exponent, "times": res.times, "variances": res.variances})
    return EXIT_OK


FIXTURE_4NODE = WebGraph.from_edges([(0, 1), (1, 2), (2, 0), (3, 0)])
FIXTURE_CYCLE3 = WebGraph.from_edges([(0, 1), (1, 2), (2, 0)])


def cmd_fixtures(cfg: RunConfig) -> int:
    rng = np.random.default_rng(cfg.seed)
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "fixture4.txt").write_text("# 4-node fixture\n" + serialize_edge_list(FIXTURE_4NODE))
    (out / "cycle3.txt").write_text("# 3-cycle\n" + serialize_edge_list(FIXTURE_CYCLE3))
    for k in range(cfg.count):
        n = int(rng.integers(cfg.min_nodes, cfg.max_nodes + 1))
        g = random_graph(n, rng, cfg.edge_prob)
        (out / f"random_{k:03d}.txt").write_text(
            f"# seed={cfg.seed} index={k}\n" + serialize_edge_list(g)
        )
    return EXIT_OK


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key = value config file; flags override it")
    p.add_argument("--out", dest="output_dir", help="output directory")
    p.add_argument("--format", choices=FORMATS)
    p.add_argument("--seed", type=int)
    p.add_argument("--dt", type=float)
    p.add_argument("--tol", type=float)
    p.add_argument("--t-max", dest="t_max", type=float)
    p.add_argument("--epsilon", type=float, action="append",
                   help="mixing parameter in [0, 1]; repeat for a sweep")


def _graph_cmd(p: argparse.ArgumentParser) -> None:
    p.add_argument("graph", help="edge-list file")
    p.add_argument("--alpha", type=float)
    p.add_argument("--hamiltonian", help="symmetrized | lattice | custom:<file>")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qrank", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rank-classical", help="classical PageRank by power iteration")
    _graph_cmd(p)
    _common(p)
    p.add_argument("--max-iter", dest="max_iter", type=int)

    p = sub.add_parser("rank-quantum", help="quantum PageRank from the walk steady state")
    _graph_cmd(p)
    _common(p)
    p.add_argument("--solver", choices=SOLVERS)
    p.add_argument("--snapshot-time", dest="snapshot_time", type=float,
                   help="also export snapshots of rho(t) up to this time")
    p.add_argument("--snapshot-every", dest="snapshot_every", type=int)

    p = sub.add_parser("spectrum", help="spectrum of the vectorized generator")
    _graph_cmd(p)
    _common(p)

    p = sub.add_parser("lattice", help="waveguide lattice experiments")
    p.add_argument("action", choices=("dist", "corr", "spread"))
    _common(p)
    p.add_argument("--sites", type=int)
    p.add_argument("--beta", help="one value or a comma list per site")
    p.add_argument("--coupling", help="one value or a comma list per bond")
    p.add_argument("--boundary", choices=lattice.BOUNDARIES)
    p.add_argument("--z", type=float)
    p.add_argument("--input-site", dest="input_site", type=int)
    p.add_argument("--site-a", dest="site_a", type=int)
    p.add_argument("--site-b", dest="site_b", type=int)
    p.add_argument("--times", help="comma list of times for spread")
    p.add_argument("--mode", choices=MODES)

    p = sub.add_parser("fixtures", help="fixture graph generation")
    p.add_argument("action", choices=("generate",))
    p.add_argument("--config")
    p.add_argument("--out", dest="output_dir")
    p.add_argument("--seed", type=int)
    p.add_argument("--count", type=int)
    p.add_argument("--min-nodes", dest="min_nodes", type=int)
    p.add_argument("--max-nodes", dest="max_nodes", type=int)
    p.add_argument("--edge-prob", dest="edge_prob", type=float)
    return parser


_NOT_CONFIG = {"command", "config", "graph", "action"}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {k: v for k, v in vars(args).items() if k not in _NOT_CONFIG}
    try:
        cfg = load_config(args.config, **overrides)
        if args.command == "rank-classical":
            return cmd_rank_classical(args.graph, cfg)
        if args.command == "rank-quantum":
            return cmd_rank_quantum(args.graph, cfg)
        if args.command == "spectrum":
            return cmd_spectrum(args.graph, cfg)
        if args.command == "lattice":
            return cmd_lattice(args.action, cfg)
        return cmd_fixtures(cfg)
    except SizeCapError as exc:
        print(f"qrank: {exc}", file=sys.stderr)
        return EXIT_SIZE_CAP
    except BoundaryContaminationError as exc:
        print(f"qrank: {exc}", file=sys.stderr)
        return EXIT_BOUNDARY
    except NonUniquenessError as exc:
        print(f"qrank: {exc}", file=sys.stderr)
        return EXIT_NON_UNIQUE
    except (ValidationError, OSError) as exc:
        print(f"qrank: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except QRankError as exc:
        print(f"qrank: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
