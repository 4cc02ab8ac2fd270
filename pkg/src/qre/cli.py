"""Command-line front end: ``qre <group> <command> [flags]``.

Usage errors exit with status 2 and computational failures with status 1;
in both cases a JSON object ``{"error": ..., "message": ...}`` goes to stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import adapt, circuit, grouping, hamlib, krylov, qpe, report, sim
from .pauli import DimensionError


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _int_list(text: str) -> list[int]:
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if any(v < 1 for v in values):
        raise argparse.ArgumentTypeError("Trotter step counts must be positive")
    return values


def _threshold(text: str) -> krylov.Threshold:
    if text.lower() in ("none", "off"):
        return krylov.Threshold()
    try:
        return krylov.Threshold(float(text))
    except ValueError:
        raise argparse.ArgumentTypeError(f"threshold must be a number or 'none', got {text!r}")


def _load(path: str):
    if not Path(path).is_file():
        raise UsageError(f"input file not found: {path}")
    return hamlib.load_pauli_file(path)


def _emit(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        hamlib.write_atomic(path, text)


def _info(obj, a=None) -> None:
    """Summary JSON; goes to stderr when the main output already uses stdout."""
    to_stdout = a is None or getattr(a, "output", None) not in (None, "-")
    stream = sys.stdout if to_stdout else sys.stderr
    stream.write(json.dumps(obj, sort_keys=True) + "\n")


def _ground_sector(h) -> int:
    """Hamming weight carrying most of the ground state's weight."""
    _, vec = hamlib.ground_state(h)
    idx = np.arange(vec.shape[0])
    weights = np.array([bin(i).count("1") for i in idx])
    probs = np.bincount(weights, weights=np.abs(vec) ** 2, minlength=h.n + 1)
    return int(np.argmax(probs))


# ---------------------------------------------------------------- commands


def cmd_ham_hubbard(a):
    h = hamlib.hubbard(a.nx, a.ny, a.t, a.u, a.mu)
    _emit(a.output, hamlib.format_pauli_sum(h))
    _info({"n": h.n, "N_terms": len(h.terms), "identity_offset": h.identity_offset}, a)


def cmd_ham_info(a):
    h = _load(a.input)
    out = {"n": h.n, "N_terms": len(h.terms), "identity_offset": h.identity_offset,
           "norm_upper_bound": hamlib.norm_upper_bound(h)}
    if h.n <= hamlib.dense_cap():
        s = hamlib.dense_spectrum(h)
        out.update(E0=s.E0, E1=s.E1, Emax=s.Emax, norm2=s.norm2)
    _info(out)


def _state_for(h, kind: str, particles: int | None):
    if kind == "ground":
        return sim.StateVector(h.n, hamlib.ground_state(h)[1])
    if kind == "reference":
        k = _ground_sector(h) if particles is None else particles
        return adapt.reference_state(h.n, k)
    return None


def cmd_group_shots(a):
    h = _load(a.input)
    groups = grouping.sorted_insertion_group(h, a.relation)
    state = _state_for(h, a.state, a.particles)
    if state is None:
        est = grouping.maximally_mixed_shot_bound(h, groups, a.epsilon)
    else:
        est = grouping.estimate_shots(h, groups, state, a.epsilon)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["group", "n_terms", "sigma"])
    for i, (g, s) in enumerate(zip(groups.groups, est.per_group_sigma)):
        w.writerow([i, len(g), repr(s)])
    _emit(a.output, buf.getvalue())
    _info({"relation": a.relation, "N_terms": len(h.terms), "N_groups": groups.n_groups,
           "epsilon": a.epsilon, "state": a.state, "total_shots": est.total_shots}, a)


def cmd_trotter_synth(a):
    h = _load(a.input)
    c = circuit.synth_trotter_step(h, a.time, a.steps, a.strategy)
    _emit(a.output, circuit.format_circuit(c))
    gc = circuit.count_gates(c)
    _info({"strategy": a.strategy, "steps": a.steps, "n_1Q": gc.n_1Q, "n_2Q": gc.n_2Q, "depth": gc.depth}, a)


def cmd_circuit_route(a):
    if not Path(a.input).is_file():
        raise UsageError(f"input file not found: {a.input}")
    c = circuit.parse_circuit(Path(a.input).read_text(encoding="utf-8"))
    if a.topology == "line":
        g = circuit.CouplingGraph.line(c.n)
    else:
        g = circuit.heavy_hex_for(c.n)
    routed = circuit.route_with_layout(c, g)
    _emit(a.output, circuit.format_circuit(routed.circuit))
    before, after = circuit.count_gates(c).n_2Q, circuit.count_gates(routed.circuit).n_2Q
    _info({"topology": a.topology, "graph_qubits": g.n, "n_2Q_before": before, "n_2Q_after": after,
           "overhead": after / before if before else 1.0, "final_layout": list(routed.layout)}, a)


def cmd_krylov_scan(a):
    h = _load(a.input)
    if a.dmax < 1:
        raise UsageError("--dmax must be >= 1")
    scan = krylov.convergence_scan(
        h, a.overlap, a.dmax, a.trotter, t=a.time, thr=a.threshold, seed=a.seed,
        strategy=a.strategy, jobs=a.jobs,
    )
    _emit(a.output, scan.to_csv())
    settings = list(a.trotter) + [None]
    _info({"E0": scan.E0, "t": scan.t,
           "min_d": {("exact" if r is None else str(r)): scan.min_d(r) for r in settings},
           "max_solved_d": {("exact" if r is None else str(r)): scan.max_solved_d(r) for r in settings}}, a)


def cmd_krylov_epperly(a):
    h = _load(a.input)
    gaps = hamlib.dense_spectrum(h).gaps
    d = krylov.epperly_dimension(gaps, a.overlap, a.epsilon)
    _info({"gap1": gaps[0], "gap_max": gaps[1], "overlap_sq": a.overlap, "epsilon": a.epsilon, "d": d})


def cmd_qpe_plan(a):
    h = _load(a.input)
    base = circuit.count_gates(circuit.synth_trotter_step(h, 1.0, 1, a.strategy))
    e1_exact = None
    if a.e1 == "bound":
        e1 = None
    elif a.e1 == "exact":
        _, g = hamlib.ground_state(h)
        e1_exact = qpe.v2_exact(h, g)
        e1 = abs(e1_exact)
    else:
        try:
            e1 = float(a.e1)
        except ValueError:
            raise UsageError(f"--e1 must be 'bound', 'exact' or a number, got {a.e1!r}")
    rep = qpe.qpe_plan(h, a.epsilon, e1, base, e1_exact)
    _emit(a.output, rep.to_json() + "\n")


def cmd_adapt_run(a):
    h = _load(a.input)
    e0 = hamlib.ground_state(h)[0] if h.n <= hamlib.dense_cap() else None
    k = _ground_sector(h) if a.particles is None else a.particles
    ref = adapt.reference_state(h.n, k)
    st = adapt.adapt_run(h, ref, adapt.build_qe_pool(h.n), a.grad_tol, a.eps, e0, a.max_iters)
    _emit(a.output, st.trace_csv())
    _info({"status": st.status, "iterations": st.iterations, "energy": st.energy,
           "E0": e0, "particles": k, "n_2Q": adapt.ansatz_gate_count(st).n_2Q}, a)
    if st.status == "optimizer-nonconvergence":
        raise RuntimeError("optimizer did not converge; trace holds the best state so far")


def cmd_report_table(a):
    h = _load(a.input)
    groups = grouping.sorted_insertion_group(h, a.relation)
    info = report.SystemInfo(a.system or Path(a.input).stem, h.n, len(h.terms), groups.n_groups)
    base = circuit.count_gates(circuit.synth_trotter_step(h, 1.0, 1, a.strategy))
    reports = []
    if a.adapt:
        rows = adapt.read_trace_csv(_read(a.adapt))
        n2q = rows[-1]["n_2q_cumulative"] if rows else 0
        reports.append(adapt.adapt_resources(h.n, len(h.terms), n2q))
    if a.krylov:
        rows = krylov.read_scan_csv(_read(a.krylov))
        reports.append(_krylov_row(rows, groups.n_groups, base, h.n))
    if a.qpe:
        rep = qpe.QpeBoundReport.from_json(_read(a.qpe))
        n2q = rep.n_2Q if rep.n_2Q is not None else circuit.controlled_trotter_cost(rep.n_T, base)
        reports.append(report.ResourceReport("qpe", rep.n_Q, rep.n_C, n2q, provenance={"n_2Q": "estimated-upper"}))
    if not reports:
        raise UsageError("give at least one of --adapt, --krylov, --qpe")
    _emit(a.output, report.format_table(info, reports))


def _read(path: str) -> str:
    if not Path(path).is_file():
        raise UsageError(f"input file not found: {path}")
    return Path(path).read_text(encoding="utf-8")


def _krylov_row(rows, n_groups, base, n):
    """Smallest chemically accurate d (exact column) and smallest sufficient Trotter count."""
    def first_d(nt):
        for r in rows:
            if r.n_trotter == nt and r.status == "ok" and abs(r.error) <= krylov.CHEMICAL_ACCURACY:
                return r.d
        return None

    d = first_d(None)
    trotter = sorted({r.n_trotter for r in rows if r.n_trotter is not None})
    n_T = next((nt for nt in trotter if first_d(nt) is not None), None)
    if d is None:
        d = min((x for x in (first_d(nt) for nt in trotter) if x is not None), default=None)
    if d is None:
        raise RuntimeError("no scan column reaches chemical accuracy")
    n_2q = circuit.controlled_trotter_cost(n_T, base) if n_T is not None else None
    return report.ResourceReport(
        "krylov", n + 1, d * d * n_groups, n_2q,
        provenance={"n_C": "estimated-lower", **({"n_2Q": "estimated-lower"} if n_2q is not None else {})},
    )


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qre", description="Resource estimation for ADAPT-VQE, quantum Krylov and QPE.")
    top = p.add_subparsers(dest="group", required=True, parser_class=_Parser)

    ham = top.add_parser("ham", help="build or inspect Hamiltonians").add_subparsers(dest="cmd", required=True)
    s = ham.add_parser("hubbard", help="spinless Hubbard model, open boundary")
    s.add_argument("--nx", type=int, required=True)
    s.add_argument("--ny", type=int, required=True)
    s.add_argument("--t", type=float, default=1.0)
    s.add_argument("--u", type=float, default=4.0)
    s.add_argument("--mu", type=float, default=0.0)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_ham_hubbard)
    s = ham.add_parser("info", help="term count and spectrum summary")
    s.add_argument("-i", "--input", required=True)
    s.set_defaults(func=cmd_ham_info)

    grp = top.add_parser("group", help="measurement grouping").add_subparsers(dest="cmd", required=True)
    s = grp.add_parser("shots", help="sorted-insertion groups and shot count")
    s.add_argument("-i", "--input", required=True)
    s.add_argument("--relation", choices=("qubit-wise", "full"), default="qubit-wise")
    s.add_argument("--epsilon", type=float, default=3e-3)
    s.add_argument("--state", choices=("mm", "ground", "reference"), default="mm")
    s.add_argument("--particles", type=int)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_group_shots)

    tro = top.add_parser("trotter", help="Trotter circuit synthesis").add_subparsers(dest="cmd", required=True)
    s = tro.add_parser("synth")
    s.add_argument("-i", "--input", required=True)
    s.add_argument("--time", type=float, default=1.0)
    s.add_argument("--steps", type=int, default=1)
    s.add_argument("--strategy", choices=circuit.STRATEGIES, default="naive")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_trotter_synth)

    cir = top.add_parser("circuit", help="circuit transformations").add_subparsers(dest="cmd", required=True)
    s = cir.add_parser("route", help="route to a restricted coupling graph")
    s.add_argument("-i", "--input", required=True)
    s.add_argument("--topology", choices=("heavy-hex", "line"), default="heavy-hex")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_circuit_route)

    kry = top.add_parser("krylov", help="quantum Krylov studies").add_subparsers(dest="cmd", required=True)
    s = kry.add_parser("scan", help="energy error versus subspace dimension")
    s.add_argument("-i", "--input", required=True)
    s.add_argument("--overlap", type=float, default=0.85)
    s.add_argument("--dmax", type=int, default=16)
    s.add_argument("--trotter", type=_int_list, default=[])
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--threshold", type=_threshold, default=krylov.Threshold())
    s.add_argument("--time", type=float)
    s.add_argument("--strategy", choices=circuit.STRATEGIES, default="naive")
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_krylov_scan)
    s = kry.add_parser("epperly", help="subspace dimension from the convergence bound")
    s.add_argument("-i", "--input", required=True)
    s.add_argument("--overlap", type=float, required=True)
    s.add_argument("--epsilon", type=float, default=1e-3)
    s.set_defaults(func=cmd_krylov_epperly)

    q = top.add_parser("qpe", help="QPE Trotter bound").add_subparsers(dest="cmd", required=True)
    s = q.add_parser("plan")
    s.add_argument("-i", "--input", required=True)
    s.add_argument("--epsilon", type=float, default=1e-3)
    s.add_argument("--e1", default="bound", help="'bound', 'exact' or a number")
    s.add_argument("--strategy", choices=circuit.STRATEGIES, default="naive")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_qpe_plan)

    ad = top.add_parser("adapt", help="ADAPT-VQE").add_subparsers(dest="cmd", required=True)
    s = ad.add_parser("run")
    s.add_argument("-i", "--input", required=True)
    s.add_argument("--particles", type=int)
    s.add_argument("--grad-tol", type=float, default=1e-6)
    s.add_argument("--eps", type=float, default=1e-3)
    s.add_argument("--max-iters", type=int, default=50)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_adapt_run)

    rep = top.add_parser("report", help="resource tables").add_subparsers(dest="cmd", required=True)
    s = rep.add_parser("table")
    s.add_argument("-i", "--input", required=True, help="Hamiltonian file")
    s.add_argument("--adapt")
    s.add_argument("--krylov")
    s.add_argument("--qpe")
    s.add_argument("--system")
    s.add_argument("--relation", choices=("qubit-wise", "full"), default="qubit-wise")
    s.add_argument("--strategy", choices=circuit.STRATEGIES, default="naive")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_report_table)
    return p


def _fail(code: int, kind: str, message: str, **extra) -> int:
    sys.stderr.write(json.dumps({"error": kind, "message": message, **extra}) + "\n")
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        args.func(args)
    except UsageError as e:
        return _fail(2, "usage", str(e))
    except hamlib.ParseError as e:
        return _fail(1, "parse", str(e), line=e.line)
    except (hamlib.CapabilityError, DimensionError, ValueError, RuntimeError, OSError) as e:
        return _fail(1, type(e).__name__, str(e))
    return 0


if __name__ == "__main__":
    sys.exit(main())
