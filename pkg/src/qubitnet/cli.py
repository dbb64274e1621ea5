"""Command-line entry point: ``qubitnet {simulate,attractors,verify,analyze}``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import linalg as la
from .analysis import (
    OverlapParameters,
    bloch_single_qubit_asymptote,
    correlation_sweep,
    entropy_pair,
    hs_distance,
    parity_populations,
)
from .attractors import (
    NotBaseGraphError,
    asymptotic_state,
    closed_form_attractor_space,
    closed_form_mixture,
    format_lambda,
    peripheral_spectrum,
    pi_half_asymptote,
    solve_attractors,
    space_subset,
)
from .netspec import NetworkSpec, SpecError, parse_angle, parse_spec
from .ruo import apply
from .topology import DirectedGraph, base_failure, is_base, star_f1, star_f2
from .verify import SUITES, run_suite

NUMERIC_MAX_QUBITS = 5
CLOSED_FORM_MAX_QUBITS = 12


class CommandError(Exception):
    """Refusal with a message and exit code, reported as JSON."""

    def __init__(self, message: str, code: int = 2):
        super().__init__(message)
        self.code = code


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, complex):
        return [o.real, o.imag]
    raise TypeError(f"cannot serialize {type(o).__name__}")


def _emit_json(obj, out: str | None) -> None:
    text = json.dumps(obj, indent=2, default=_json_default) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _emit_csv(header: list[str], rows, out: str | None) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in r])
    if out:
        Path(out).write_text(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())


def _load_spec(path: str | None) -> NetworkSpec:
    if not path:
        raise CommandError("--spec is required for this command")
    return parse_spec(path)


def _guard_numeric(n: int, force: bool) -> None:
    if n > NUMERIC_MAX_QUBITS and not force:
        raise CommandError(f"numeric attractor solve on {n} qubits exceeds the n <= {NUMERIC_MAX_QUBITS} guard; use --force")


def _matrix_json(m: np.ndarray) -> dict:
    return {"real": np.real(m).tolist(), "imag": np.imag(m).tolist()}


def load_rho0(source: str, n: int) -> tuple[np.ndarray, str]:
    """``random:<seed>``, ``basis:<bits>`` or ``file:<path>`` (JSON real/imag or .npy)."""
    kind, _, arg = source.partition(":")
    if kind == "random":
        return la.random_density(n, int(arg)), source
    if kind == "basis":
        if len(arg) != n:
            raise CommandError(f"basis state {arg!r} does not have {n} bits")
        v = la.basis_state(arg)
        return la.dyad(v, v), source
    if kind == "file":
        p = Path(arg)
        if p.suffix == ".npy":
            rho = np.load(p)
        else:
            data = json.loads(p.read_text())
            rho = np.asarray(data["real"], dtype=float) + 1j * np.asarray(data.get("imag", 0.0), dtype=float)
        if rho.shape != (1 << n, 1 << n):
            raise CommandError(f"initial state in {arg} has shape {rho.shape}, expected {(1 << n, 1 << n)}")
        try:
            return la.check_density(rho), source
        except ValueError as exc:
            raise CommandError(f"{arg}: {exc}") from None
    raise CommandError(f"unknown initial-state source {source!r}")


# -- simulate -----------------------------------------------------------------------

def _fixed_reference(spec: NetworkSpec, force: bool):
    _guard_numeric(spec.qubits, force)
    space = solve_attractors(spec.ruo())

    def ref(rho0, step):
        return asymptotic_state(space, rho0, step)
    return ref


def _simulate_one(ruo, ref_ruo, ref_fixed, rho0, steps):
    rho = rho0.copy()
    co = rho0.copy() if ref_ruo is not None else None
    dists = []
    for k in range(steps + 1):
        if k:
            rho = apply(ruo, rho)
            if co is not None:
                co = apply(ref_ruo, co)
        target = co if co is not None else ref_fixed(rho0, k)
        dists.append(hs_distance(rho, target))
    return rho, dists


def cmd_simulate(args) -> int:
    spec = _load_spec(args.spec)
    ruo = spec.ruo()
    ref_spec = parse_spec(args.reference_spec) if args.reference_spec else spec
    if ref_spec.qubits != spec.qubits:
        raise CommandError("reference spec has a different qubit count")
    ref_ruo = ref_spec.ruo() if args.reference == "trajectory" else None
    ref_fixed = _fixed_reference(ref_spec, args.force) if args.reference == "asymptote" else None

    sources = [args.rho0]
    if args.ensemble > 1:
        kind, _, arg = args.rho0.partition(":")
        if kind != "random":
            raise CommandError("--ensemble needs a random:<seed> initial state")
        base = int(arg) if arg else args.seed
        sources = [f"random:{base + k}" for k in range(args.ensemble)]
    states = [load_rho0(s, spec.qubits) for s in sources]

    def run(item):
        rho0, _ = item
        return _simulate_one(ruo, ref_ruo, ref_fixed, rho0, args.steps)

    if args.threads > 1:
        with ThreadPoolExecutor(args.threads) as ex:
            results = list(ex.map(run, states))
    else:
        results = [run(s) for s in states]

    rows = [
        (k, label, step, d)
        for k, ((_, label), (_, dists)) in enumerate(zip(states, results))
        for step, d in enumerate(dists)
    ]
    _emit_csv(["state", "source", "step", "distance"], rows, args.out)

    final_path = args.final_json or (str(Path(args.out).with_suffix(".final.json")) if args.out else None)
    if final_path:
        summary = {
            "qubits": spec.qubits,
            "phi": spec.phi,
            "steps": args.steps,
            "reference": args.reference,
            "states": [
                {
                    "source": label,
                    "final_distance": dists[-1],
                    "final_state": _matrix_json(rho) if args.ensemble <= 1 else None,
                }
                for (_, label), (rho, dists) in zip(states, results)
            ],
        }
        _emit_json(summary, final_path)
    return 0


# -- attractors ----------------------------------------------------------------------

def closed_form_for_spec(spec: NetworkSpec):
    if spec.qubits > CLOSED_FORM_MAX_QUBITS:
        raise CommandError(f"closed-form construction limited to n <= {CLOSED_FORM_MAX_QUBITS}")
    try:
        return closed_form_mixture(list(spec.topologies().values()), spec.phi)
    except NotBaseGraphError as exc:
        raise CommandError(f"closed-form attractors refused: {exc}") from None


def cmd_attractors(args) -> int:
    spec = _load_spec(args.spec)
    ruo = spec.ruo()
    report: dict = {"qubits": spec.qubits, "phi": spec.phi, "mode": args.mode, "branches": len(ruo)}
    numeric = closed = None
    if args.mode in ("closed-form", "both"):
        closed = closed_form_for_spec(spec)
        report["closed_form"] = closed.report(ruo, include_basis=args.include_basis)
    if args.mode in ("numeric", "both"):
        _guard_numeric(spec.qubits, args.force)
        numeric = solve_attractors(ruo, tol=args.tol)
        report["numeric"] = numeric.report(ruo, include_basis=args.include_basis)
    if args.full_spectrum:
        if spec.qubits > NUMERIC_MAX_QUBITS:
            raise CommandError(f"full superoperator eigensolve limited to n <= {NUMERIC_MAX_QUBITS}")
        spectrum = peripheral_spectrum(ruo)
        report["full_spectrum"] = [
            {"lambda": format_lambda(lam), "multiplicity": m} for lam, m in spectrum.items()
        ]
        unexpected = [format_lambda(lam) for lam in spectrum if abs(lam - 1) > 1e-9 and abs(lam + 1) > 1e-9]
        if unexpected:
            report["unexpected_eigenvalues"] = unexpected
    status = 0
    if numeric is not None and closed is not None:
        a_in_b = space_subset(numeric, closed)
        b_in_a = space_subset(closed, numeric)
        same_dims = numeric.dims() == closed.dims()
        report["comparison"] = {
            "dimensions_equal": same_dims,
            "numeric_subset_closed_form": a_in_b,
            "closed_form_subset_numeric": b_in_a,
        }
        if not (a_in_b and b_in_a and same_dims):
            status = 1
            report["failures"] = ["numeric and closed-form attractor spaces differ"]
    _emit_json(report, args.out)
    return status


# -- verify ---------------------------------------------------------------------------

def cmd_verify(args) -> int:
    ns = args.n or [3, 4]
    numeric_suites = {"twoqubit", "theorem1", "theorem2", "simultaneous"}
    if args.suite in numeric_suites:
        for n in ns:
            _guard_numeric(n, args.force)
    phis = [parse_angle(p) for p in (args.phi or ["pi/3", "pi/2"])]
    checks = run_suite(args.suite, ns, phis, seed=args.seed, tol=args.tol, samples=args.samples)
    failures = [c["name"] for c in checks if not c["passed"]]
    _emit_json({"suite": args.suite, "passed": not failures, "checks": checks, "failures": failures}, args.out)
    return 0 if not failures else 1


# -- analyze --------------------------------------------------------------------------

def _family_topology(family: str, n: int):
    if family == "two_qubit":
        return DirectedGraph(n, tuple((i, i % n + 1) for i in range(1, n + 1)))
    if family == "f1":
        return star_f1(n)
    if family == "f2":
        return star_f2(n)
    raise CommandError(f"unknown family {family!r}")


def cmd_analyze(args) -> int:
    phi = parse_angle(args.phi_value)
    if not 0 < phi < math.pi:
        raise CommandError("phi must lie strictly inside (0, pi)")
    if args.task == "bloch":
        for v in (args.p0, args.p_plus, args.p_minus):
            if not 0 <= v <= 1:
                raise CommandError("overlap parameters must lie in [0, 1]")
        a = bloch_single_qubit_asymptote(OverlapParameters(args.p0, args.p_plus, args.p_minus), phi)
        lo, hi = a.eigenvalues()
        _emit_json({"bloch": [a.x, a.y, a.z], "norm": a.norm, "eigenvalues": [lo, hi]}, args.out)
        return 0
    if args.task == "correlation":
        if args.spec:
            spec = _load_spec(args.spec)
            topos = spec.topologies()
            if len(topos) != 1:
                raise CommandError("correlation sweep needs a spec with a single gate family")
            (topology,) = topos.values()
            n, phi = spec.qubits, spec.phi
        else:
            n = args.qubits
            topology = None
        if n < 3 or n > CLOSED_FORM_MAX_QUBITS:
            raise CommandError(f"correlation sweep needs 3 <= n <= {CLOSED_FORM_MAX_QUBITS}")
        if topology is None:
            topology = _family_topology(args.family, n)
        if not is_base(topology):
            raise CommandError(f"correlation sweep refused: {base_failure(topology)}")
        if not 0 < args.p_step <= 1:
            raise CommandError("--p-step must lie in (0, 1]")
        count = int(round(1 / args.p_step))
        ps = [round(k * args.p_step, 10) for k in range(count + 1)]
        rows = correlation_sweep(n, phi, topology, args.mode, ps)
        keys = ["p", "p0", "p_plus", "p_minus", "index_of_correlation_bits"]
        _emit_csv(keys, ([r[k] for k in keys] for r in rows), args.out)
        return 0
    if args.task == "entropy":
        n = args.qubits
        g2, g31, g32 = (_family_topology(f, n) for f in ("two_qubit", "f1", "f2"))
        rows, bad = [], 0
        for s in range(args.samples):
            rho0 = la.random_density(n, args.seed + s)
            s2, s31 = entropy_pair(rho0, n, phi, g2, g31)
            _, s32 = entropy_pair(rho0, n, phi, g2, g32)
            ok = s2 >= s31 - 1e-9 and s2 >= s32 - 1e-9
            bad += not ok
            rows.append((args.seed + s, s2, s31, s32, int(ok)))
        _emit_csv(["seed", "S_two_qubit", "S_f1", "S_f2", "inequality_holds"], rows, args.out)
        return 0 if not bad else 1
    if args.task == "pihalf":
        n = args.qubits
        if n <= 3:
            raise CommandError("pihalf needs n > 3")
        rho0 = la.random_density(n, args.seed)
        state = pi_half_asymptote(n, rho0)
        space = closed_form_attractor_space("f1", n, math.pi / 2, star_f1(n))
        via_attractors = asymptotic_state(space, rho0)
        gap = hs_distance(state, via_attractors)
        even, odd = parity_populations(state, n)
        even0, odd0 = parity_populations(rho0, n)
        _emit_json({
            "qubits": n,
            "seed": args.seed,
            "distance_to_attractor_asymptote": gap,
            "trace": float(np.trace(state).real),
            "entropy_nats": la.von_neumann_entropy(state),
            "parity_populations": {"initial": [even0, odd0], "asymptotic": [even, odd]},
            "passed": gap <= 1e-10,
        }, args.out)
        return 0 if gap <= 1e-10 else 1
    raise CommandError(f"unknown analyze task {args.task!r}")


# -- parser ---------------------------------------------------------------------------

def _global_options() -> argparse.ArgumentParser:
    g = argparse.ArgumentParser(add_help=False)
    g.add_argument("--spec", default=argparse.SUPPRESS, help="network spec JSON file")
    g.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="base random seed")
    g.add_argument("--tol", type=float, default=argparse.SUPPRESS, help="relative rank cutoff")
    g.add_argument("--out", default=argparse.SUPPRESS, help="output file (stdout if omitted)")
    g.add_argument("--threads", type=int, default=argparse.SUPPRESS, help="worker threads for ensembles")
    g.add_argument("--force", action="store_true", default=argparse.SUPPRESS, help="lift size guards")
    return g


GLOBAL_DEFAULTS = {"spec": None, "seed": 0, "tol": la.RANK_RTOL, "out": None, "threads": 1, "force": False}


def build_parser() -> argparse.ArgumentParser:
    g = _global_options()
    parser = argparse.ArgumentParser(prog="qubitnet", parents=[g],
                                     description="Asymptotics of qubit networks with controlled-unitary interactions.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[g], help="iterate a network and record distances to a reference")
    p.add_argument("--rho0", default="random:0", help="random:<seed> | basis:<bits> | file:<path>")
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--ensemble", type=int, default=1, help="number of random initial states")
    p.add_argument("--reference", choices=["asymptote", "trajectory"], default="asymptote")
    p.add_argument("--reference-spec", help="spec defining the reference dynamics (default: --spec)")
    p.add_argument("--final-json", help="where to write the final-state summary")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("attractors", parents=[g], help="attractor space of a network")
    p.add_argument("--mode", choices=["numeric", "closed-form", "both"], default="numeric")
    p.add_argument("--include-basis", action="store_true")
    p.add_argument("--full-spectrum", action="store_true",
                   help="also eigensolve the dense superoperator for all unit-circle eigenvalues")
    p.set_defaults(func=cmd_attractors)

    p = sub.add_parser("verify", parents=[g], help="run a check battery")
    p.add_argument("suite", choices=sorted(SUITES))
    p.add_argument("--n", type=int, nargs="+")
    p.add_argument("--phi", nargs="+", help="angles, e.g. pi/3 pi/2 2.0")
    p.add_argument("--samples", type=int)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("analyze", parents=[g], help="closed-form diagnostics")
    p.add_argument("task", choices=["bloch", "correlation", "entropy", "pihalf"])
    p.add_argument("--phi", dest="phi_value", default="pi/3")
    p.add_argument("--p0", type=float, default=0.0)
    p.add_argument("--p-plus", type=float, default=0.5)
    p.add_argument("--p-minus", type=float, default=0.5)
    p.add_argument("--qubits", type=int, default=10)
    p.add_argument("--family", choices=["two_qubit", "f1", "f2"], default="f1")
    p.add_argument("--mode", choices=["p0_zero", "p0_one_minus_p"], default="p0_zero")
    p.add_argument("--p-step", type=float, default=0.01)
    p.add_argument("--samples", type=int, default=100)
    p.set_defaults(func=cmd_analyze)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for k, v in GLOBAL_DEFAULTS.items():
        if not hasattr(args, k):
            setattr(args, k, v)
    try:
        return args.func(args)
    except (CommandError, SpecError) as exc:
        code = exc.code if isinstance(exc, CommandError) else 2
        _emit_json({"passed": False, "failures": [str(exc)]}, None)
        print(f"qubitnet: {exc}", file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(main())
