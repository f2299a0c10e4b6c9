"""Command-line front end: ``bddqsp <subcommand> ...``.

Exit codes: 0 success, 1 validation / verification failure or bad input,
2 usage error. Diagnostics go to stderr, data to stdout or ``--out``.
``-`` reads standard input.
"""
from __future__ import annotations

import argparse
import csv
import os
import random
import sys
import time

import numpy as np

from . import circuit as circ
from . import fileformat
from .blockenc import ControlledFamily, gram_encoding, projector_encoding
from .circuit import CircuitFormatError, SynthesisError, synth_phase, synth_state
from .diagram import DiagramError, evaluate, reduce, validate
from .families import (
    DeltaFamilySpec,
    SymmetricSpec,
    amplification_ratio,
    binomial_wobdd,
    h_family_fbdd,
    symmetric_obdd,
)
from .fileformat import FormatError
from .generate import random_wfbdd
from .simulator import brute_force_state, compare, simulate, simulate_dense
from .weighting import model_count, uniform_weights

SEED_ENV = "BDDQSP_SEED"


class Failure(Exception):
    """Reported on stderr, exit code 1."""


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise Failure(f"cannot read {path}: {exc.strerror}") from None


def _write(text: str, out: str | None) -> None:
    if out and out != "-":
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _diagram(path: str):
    try:
        return fileformat.loads(_read(path))
    except FormatError as exc:
        raise Failure(f"{path}: {exc}") from None


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    return int(os.environ.get(SEED_ENV, "0"))


# -- subcommands -------------------------------------------------------------


def cmd_validate(args) -> int:
    report = validate(_diagram(args.file))
    if report.ok:
        print("valid")
        return 0
    for v in report.violations:
        print(v, file=sys.stderr)
    print("invalid")
    return 1


def cmd_reduce(args) -> int:
    d = _diagram(args.file)
    log: list = []
    out = reduce(d, log)
    for step in log:
        print(f"{step[0]} {step[1]} -> {step[2]}", file=sys.stderr)
    _write(fileformat.dumps(out), args.out)
    return 0


def cmd_eval(args) -> int:
    d = _diagram(args.file)
    print(evaluate(d, args.x))
    return 0


def cmd_count(args) -> int:
    print(model_count(_diagram(args.file)))
    return 0


def cmd_uniform(args) -> int:
    res = uniform_weights(_diagram(args.file))
    print(f"model count {res.model_count}, queries {res.query_count}", file=sys.stderr)
    _write(fileformat.dumps(res.diagram), args.out)
    return 0


def cmd_synth(args) -> int:
    text = _read(args.file)
    try:
        d = fileformat.loads(text)
    except FormatError as exc:
        raise Failure(f"{args.file}: {exc}") from None
    c = synth_state(d)
    c = circ.Circuit(c.layout, c.prep, c.gates, c.blocks, source=fileformat.dumps(d))
    _report_counts(c)
    _write(circ.dumps(c), args.out)
    return 0


def cmd_synth_phase(args) -> int:
    d = _diagram(args.file)
    c = synth_phase(d, args.theta)
    c = circ.Circuit(c.layout, c.prep, c.gates, c.blocks, source=fileformat.dumps(d))
    _report_counts(c)
    _write(circ.dumps(c), args.out)
    return 0


def _report_counts(c) -> None:
    counts = " ".join(f"{k}={v}" for k, v in c.counts.items())
    print(f"qubits={c.num_qubits} ancillas={len(c.layout.ancillas)} {counts}", file=sys.stderr)


def cmd_sim(args) -> int:
    try:
        c = circ.loads(_read(args.file))
    except CircuitFormatError as exc:
        raise Failure(f"{args.file}: {exc}") from None
    state = simulate(c, args.input)
    _write(state.dumps(), args.out)
    status = 0
    if args.dense_check:
        dense = simulate_dense(c, args.input)
        err = float(np.abs(dense - state.to_dense()).max())
        print(f"dense-check max error {err:.3e}", file=sys.stderr)
        if err > 1e-12:
            status = 1
    if args.compare_oracle:
        if not c.source:
            raise Failure("circuit carries no source diagram; cannot build the oracle")
        d = fileformat.loads(c.source)
        root_q = c.layout.node_qubits.get(d.root)
        report = compare(state, brute_force_state(d), {q: int(q == root_q) for q in c.layout.ancillas})
        print(
            f"fidelity {report.fidelity:.15f} max-error {report.max_abs_error:.3e} "
            f"ancillas-clean {report.factorizes}",
            file=sys.stderr,
        )
        if not report.ok(args.tol):
            status = 1
    return status


def cmd_family(args) -> int:
    if args.name == "symmetric":
        if args.i is None:
            raise Failure("family symmetric needs --i")
        d = symmetric_obdd(SymmetricSpec(args.n, args.i))
    elif args.name == "h":
        d = h_family_fbdd(args.n)
    else:
        if args.delta is None:
            raise Failure("family binomial needs --delta")
        d = binomial_wobdd(DeltaFamilySpec(args.n, args.delta))
    print(f"{args.name}: n={d.n} internal nodes={d.num_internal}", file=sys.stderr)
    _write(fileformat.dumps(d), args.out)
    return 0


def cmd_ratio(args) -> int:
    r = amplification_ratio(DeltaFamilySpec(args.n, args.delta))
    _write(
        f"direct {r.direct:.17g}\n"
        f"closed-form {r.closed_form:.17g}\n"
        f"corrected-form {r.corrected_form:.17g}\n"
        f"relative-deviation {r.relative_deviation:.17g}\n",
        args.out,
    )
    return 0


def cmd_blockenc(args) -> int:
    d = _diagram(args.file)
    if args.kind == "projector":
        spec = projector_encoding(d)
    else:
        fam = ControlledFamily.pauli_z(d.n) if args.family == "z" else ControlledFamily.identity(d.n)
        spec = gram_encoding(d, fam)
    if spec.block is None:
        raise Failure("block encoding too large to verify")
    print(f"ancillas {spec.num_ancillas} epsilon {spec.epsilon:.3e}", file=sys.stderr)
    lines = [
        f"{r} {c} {spec.block[r, c].real:.17g} {spec.block[r, c].imag:.17g}"
        for r in range(spec.block.shape[0])
        for c in range(spec.block.shape[1])
    ]
    _write("\n".join(lines) + "\n", args.out)
    return 0 if spec.epsilon <= args.tol else 1


BENCH_COLUMNS = [
    "diagram", "n", "V", "E", "gates_1q", "gates_2q", "toffolis", "ancillas", "fidelity", "wall_ms",
]


def _bench_suite(name: str, seed: int, count: int):
    if name == "random":
        rng = random.Random(seed)
        for k in range(count):
            yield f"random-{k}", random_wfbdd(rng, rng.randint(2, 6))
    elif name == "binomial":
        for n in range(2, 9):
            for delta in (0.25, 0.5, 0.9):
                yield f"binomial-n{n}-d{delta}", binomial_wobdd(DeltaFamilySpec(n, delta))
    elif name == "uniform":
        for n in range(2, 7):
            for i in range(n + 1):
                yield f"symmetric-n{n}-i{i}", uniform_weights(symmetric_obdd(SymmetricSpec(n, i))).diagram
        for n in (1, 2):
            yield f"h-n{n}", uniform_weights(h_family_fbdd(n)).diagram
    else:
        raise Failure(f"unknown suite {name!r}")


def cmd_bench(args) -> int:
    writer = csv.writer(sys.stdout, lineterminator="\n")
    if args.csv:
        writer.writerow(BENCH_COLUMNS)
    status = 0
    for name, d in _bench_suite(args.suite, _seed(args), args.count):
        start = time.perf_counter()
        c = synth_state(d)
        st = simulate(c)
        root_q = c.layout.node_qubits.get(d.root)
        rep = compare(st, brute_force_state(d), {q: int(q == root_q) for q in c.layout.ancillas})
        ms = (time.perf_counter() - start) * 1000
        k = c.counts
        one_q = k["X"] + k["H"] + k["PHASE"] + len(c.prep_gates())
        row = [name, d.n, d.num_nodes, d.num_edges, one_q, k["CH"] + k["CU"], k["CCX"],
               len(c.layout.ancillas), f"{rep.fidelity:.12f}", f"{ms:.2f}"]
        if args.csv:
            writer.writerow(row)
        else:
            print(" ".join(str(v) for v in row))
        if not rep.ok(args.tol):
            status = 1
    return status


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bddqsp", description=__doc__.splitlines()[0])
    p.add_argument("--seed", type=int, default=None, help=f"random seed (fallback: ${SEED_ENV})")
    p.add_argument("--tol", type=float, default=1e-9, help="verification tolerance")
    sub = p.add_subparsers(dest="command", required=True)

    def cmd(name, func, help, file=True, out=False):
        sp = sub.add_parser(name, help=help)
        if file:
            sp.add_argument("file", help="input file, '-' for stdin")
        if out:
            sp.add_argument("--out", "-o", default=None)
        sp.set_defaults(func=func)
        return sp

    cmd("validate", cmd_validate, "check diagram invariants")
    cmd("reduce", cmd_reduce, "apply the contraction rules", out=True)
    cmd("eval", cmd_eval, "evaluate f on one input").add_argument("--x", required=True)
    cmd("count", cmd_count, "model count |f|")
    cmd("uniform", cmd_uniform, "weights for the uniform superposition", out=True)
    cmd("synth", cmd_synth, "state-preparation circuit", out=True)
    cmd("synth-phase", cmd_synth_phase, "phase-oracle circuit", out=True).add_argument(
        "--theta", type=float, required=True
    )
    sim = cmd("sim", cmd_sim, "simulate a circuit file", out=True)
    sim.add_argument("--compare-oracle", action="store_true")
    sim.add_argument("--dense-check", action="store_true")
    sim.add_argument("--input", default=None, help="initial basis bit string")

    fam = cmd("family", cmd_family, "emit a family diagram", file=False, out=True)
    fam.add_argument("name", choices=["symmetric", "h", "binomial"])
    fam.add_argument("--n", type=int, required=True)
    fam.add_argument("--i", type=int)
    fam.add_argument("--delta", type=float)

    ratio = cmd("ratio", cmd_ratio, "amplitude-amplification ratio", file=False, out=True)
    ratio.add_argument("--n", type=int, required=True)
    ratio.add_argument("--delta", type=float, required=True)

    be = sub.add_parser("blockenc", help="block-encoding matrix dump")
    be.add_argument("kind", choices=["projector", "gram"])
    be.add_argument("file")
    be.add_argument("--family", choices=["identity", "z"], default="z")
    be.add_argument("--out", "-o", default=None)
    be.set_defaults(func=cmd_blockenc)

    bench = cmd("bench", cmd_bench, "synthesize and verify a suite", file=False)
    bench.add_argument("--suite", default="random", choices=["random", "binomial", "uniform"])
    bench.add_argument("--csv", action="store_true")
    bench.add_argument("--count", type=int, default=20)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (Failure, DiagramError, SynthesisError, ValueError) as exc:
        print(f"bddqsp {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
