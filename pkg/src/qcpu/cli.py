"""Command-line interface: ``qcpu <command> ...``.

Exit codes: 0 success, 1 validation error, 2 verification failure.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .applications import EvolutionSpec, PhaseRule, QftConvention, evolve, qft_matrix, qft_network
from .composer import drawer_postselect
from .elements import apply, evaluate, q_network
from .formats import (
    FormatError,
    check_register_dim,
    emit_matrix,
    emit_netlist,
    fmt_float,
    parse_matrix,
    parse_netlist,
    parse_state,
)
from .operators import DEFAULT_TOL, JointState, closed_form, dft_matrix, max_abs_diff
from .optimizer import analyze

EXIT_OK, EXIT_INVALID, EXIT_VERIFY = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _write(text: str, path: str | None, out) -> None:
    if path is None or path == "-":
        out.write(text)
    else:
        Path(path).write_text(text)


def _load_matrix(path: str) -> np.ndarray:
    u = parse_matrix(_read(path))
    check_register_dim(u.shape[0])
    return u


def _fmt_amp(z: complex) -> str:
    return f"{fmt_float(z.real)},{fmt_float(z.imag)}"


def cmd_compile(args, out) -> int:
    u = _load_matrix(args.matrix)
    _write(emit_netlist(q_network(u)), args.output, out)
    return EXIT_OK


def cmd_simulate(args, out) -> int:
    net = parse_netlist(_read(args.netlist))
    spec = net.spec
    if args.state.isdigit():
        psi = np.zeros(spec.N, dtype=complex)
        psi[spec.check_index(int(args.state), "state index")] = 1
    else:
        psi = parse_state(_read(args.state))
        if psi.shape[0] != spec.N:
            raise UsageError(f"state has dimension {psi.shape[0]}, netlist needs {spec.N}")
    result = apply(net, JointState.prepare(psi, spec))
    out.write(f"joint_state dim={spec.joint_dim}\n")
    for i, z in enumerate(result.amplitudes):
        out.write(f"{i >> 1} {i & 1} {_fmt_amp(z)}\n")
    if args.postselect is not None:
        if result.norm == 0:
            raise UsageError("cannot post-select the zero state")
        ps = drawer_postselect(result, args.postselect)
        out.write(f"postselect outcome={ps.outcome} probability={fmt_float(ps.probability)}\n")
        if ps.possible:
            for m, z in enumerate(ps.state):
                out.write(f"{m} {_fmt_amp(z)}\n")
        else:
            out.write("impossible outcome\n")
    return EXIT_OK


def _reference(spec_text: str, dim: int) -> np.ndarray:
    if spec_text in ("dft", "dft+", "dft-"):
        return dft_matrix(check_register_dim(dim), -1 if spec_text == "dft-" else 1)
    return _load_matrix(spec_text)


def cmd_verify(args, out) -> int:
    u = _load_matrix(args.matrix)
    net = parse_netlist(_read(args.netlist)) if args.netlist else q_network(u)
    if net.spec.N != u.shape[0]:
        raise UsageError(f"netlist register N={net.spec.N} does not match matrix dim {u.shape[0]}")
    dense = evaluate(net)
    dev = max_abs_diff(dense, closed_form(u))
    cols = np.column_stack([apply(net, e) for e in np.eye(net.dim, dtype=complex)])
    apply_dev = max_abs_diff(cols, dense)
    ok = dev < args.tol and apply_dev < args.tol
    out.write(f"max_abs_deviation: {dev:.3e}\n")
    out.write(f"apply_vs_evaluate: {apply_dev:.3e}\n")
    if args.reference:
        ref = _reference(args.reference, u.shape[0])
        if ref.shape != u.shape:
            raise UsageError(f"reference is {ref.shape[0]}×{ref.shape[1]}, matrix is {u.shape[0]}×{u.shape[1]}")
        ref_dev = max_abs_diff(u, ref)
        out.write(f"reference_deviation: {ref_dev:.3e}\n")
        ok = ok and ref_dev < args.tol
    out.write(f"tolerance: {args.tol:.1e}\n")
    out.write("PASS\n" if ok else "FAIL\n")
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_analyze(args, out) -> int:
    out.write(analyze(_load_matrix(args.matrix), tol=args.tol).render())
    return EXIT_OK


def cmd_qft(args, out) -> int:
    if args.k < 1 or args.k > 10:
        raise UsageError(f"--k must be between 1 and 10, got {args.k}")
    spec = check_register_dim(1 << args.k)
    conv = QftConvention(PhaseRule(args.convention), args.sign)
    f = qft_matrix(spec, conv)
    if args.netlist:
        Path(args.netlist).write_text(emit_netlist(qft_network(spec, conv)))
    if args.output is None:
        out.write(emit_matrix(f))
    else:
        _write(emit_matrix(f), args.output, out)
        out.write(f"convention: {conv.phase_rule.value} sign={conv.sign:+d}\n")
        out.write(f"dft_deviation: {max_abs_diff(f, dft_matrix(spec, conv.sign)):.3e}\n")
    return EXIT_OK


def cmd_evolve(args, out) -> int:
    t = _load_matrix(args.t_file)
    v = _load_matrix(args.v_file)
    try:
        es = EvolutionSpec(t, v, args.dt, args.steps)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.psi0:
        psi0 = parse_state(_read(args.psi0))
    else:
        psi0 = np.zeros(t.shape[0], dtype=complex)
        psi0[0] = 1
    try:
        result = evolve(psi0, es)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.csv:
        _write(result.to_csv(), args.csv, out)
    if args.csv != "-":
        out.write(f"steps: {es.steps}\n")
        out.write(f"time: {fmt_float(es.total_time)}\n")
        out.write(f"final_error_maxabs: {result.final_error:.6e}\n")
        out.write(f"final_norm: {np.linalg.norm(result.final_state):.12f}\n")
        out.write(f"final_postselect_prob: {result.final_probability:.12f}\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qcpu", description="Universal quantum network (QCPU) toolkit.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("compile", help="compile a matrix file to a netlist")
    c.add_argument("matrix")
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_compile)

    s = sub.add_parser("simulate", help="apply a netlist to a register state")
    s.add_argument("netlist")
    s.add_argument("--state", required=True, help="basis index or STATE file")
    s.add_argument("--postselect", type=int, choices=(0, 1))
    s.set_defaults(func=cmd_simulate)

    v = sub.add_parser("verify", help="check a network against I + U⊗c†")
    v.add_argument("matrix")
    v.add_argument("--netlist", help="verify this netlist instead of compiling the matrix")
    v.add_argument("--reference", help="matrix file, or dft / dft- to compare U against")
    v.add_argument("--tol", type=float, default=DEFAULT_TOL)
    v.set_defaults(func=cmd_verify)

    a = sub.add_parser("analyze", help="realization cost report")
    a.add_argument("matrix")
    a.add_argument("--tol", type=float, default=DEFAULT_TOL)
    a.set_defaults(func=cmd_analyze)

    q = sub.add_parser("qft", help="Fourier transform matrix and network")
    q.add_argument("--k", type=int, required=True)
    q.add_argument("--convention", choices=("paper", "standard"), default="standard")
    q.add_argument("--sign", type=int, choices=(1, -1), default=1)
    q.add_argument("-o", "--output", help="write the MATRIX file here")
    q.add_argument("--netlist", help="also write the network netlist here")
    q.set_defaults(func=cmd_qft)

    e = sub.add_parser("evolve", help="chained time-evolution network")
    e.add_argument("--t-file", required=True)
    e.add_argument("--v-file", required=True)
    e.add_argument("--dt", type=float, required=True)
    e.add_argument("--steps", type=int, required=True)
    e.add_argument("--psi0", help="STATE file (default |0⟩)")
    e.add_argument("--csv", help="trajectory CSV path, or - for stdout")
    e.set_defaults(func=cmd_evolve)
    return p


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        return args.func(args, out)
    except (UsageError, FormatError, ValueError, IndexError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
