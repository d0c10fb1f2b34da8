"""Command-line front end.

Commands::

    qcontract contraction CHANNEL STATE [--f gm --f am ...]
    qcontract mixing CHANNEL --delta 0.01 [--metric trace_distance] [--f-set gm,lm]
    qcontract correlation STATE --dims 2,2 [--f gm | --k 0.5] [--spectrum]
    qcontract verify SUITE [--seed 7] [--trials 50]

Inputs are JSON files in the formats of :mod:`qcontract.linalg`; a state
file for ``correlation`` may instead hold a classical table
``{"p": [[...]]}``.  Reports are JSON on stdout (or ``--out``); a short
human-readable table goes to stderr when it is a terminal.

Exit codes: 0 success, 1 unparsable input or unknown name, 2 failed
precondition, 3 numerical failure (including failed verification).
"""

import argparse
import contextlib
import dataclasses
import json
import math
import sys

import numpy as np

from qcontract import linalg, tolerances
from qcontract.contraction import (
    contraction_coefficient,
    in_relative_entropy_band,
    mixing_time_bound,
)
from qcontract.correlation import (
    classical_mu,
    classical_state,
    gm_schmidt_spectrum,
    mu_f,
    mu_lin_k,
)
from qcontract.errors import (
    BandViolation,
    DimensionMismatch,
    NoUniqueFixedPoint,
    ParseError,
    QContractError,
)
from qcontract.monotone import from_name
from qcontract.suites import SUITES, run_suite

EXIT_OK, EXIT_PARSE, EXIT_PRECONDITION, EXIT_NUMERIC = 0, 1, 2, 3
FIXED_POINT_GAP = 1e-7


class _Parser(argparse.ArgumentParser):
    """Argument parser that reports usage errors as :class:`ParseError`."""

    def error(self, message):
        raise ParseError(f"{self.prog}: {message}")


def _f_list(values, default):
    names = []
    for value in values or default:
        names.extend(v for v in value.split(",") if v.strip())
    return [from_name(n) for n in names]


def _tol_overrides(items):
    changes = {}
    for item in items or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise ParseError(f"--tol-override expects key=value, got {item!r}")
        try:
            changes[key.strip()] = float(value)
        except ValueError as exc:
            raise ParseError(f"tolerance value {value!r} is not a number") from exc
    names = {f.name for f in dataclasses.fields(tolerances.Tolerances)}
    for key, value in changes.items():
        if key not in names:
            raise ParseError(f"unknown tolerance {key!r}")
        if not value > 0:
            raise ParseError(f"tolerance {key} must be positive")
    return changes


def _load_state(path):
    obj = linalg.load_json(path)
    if isinstance(obj, dict) and "p" in obj:
        return None, np.asarray(obj["p"], dtype=float)
    if not isinstance(obj, dict):
        raise ParseError(f"{path}: expected a matrix object")
    return linalg.matrix_from_json(obj), None


def _load_channel(path):
    return linalg.channel_from_json(linalg.load_json(path))


def _number(x):
    return "inf" if isinstance(x, float) and math.isinf(x) else x


def fixed_point(channel):
    """Unique fixed point of a channel from its transfer matrix.

    The transfer matrix ``sum_k K_k (x) conj(K_k)`` acts on row-major
    vectorized operators; the fixed point is its eigenvalue-1 eigenvector
    normalized to unit trace.

    Args:
        channel: :class:`~qcontract.linalg.ChannelRep` with equal dimensions.

    Returns:
        numpy.ndarray: The fixed point.

    Raises:
        NoUniqueFixedPoint: If more than one eigenvalue lies within 1e-7 of 1.
    """
    if channel.dim_in != channel.dim_out:
        raise NoUniqueFixedPoint("channel must map a space to itself")
    d = channel.dim_in
    transfer = sum(np.kron(k, k.conj()) for k in channel.kraus)
    vals, vecs = np.linalg.eig(transfer)
    near = np.abs(vals - 1) <= FIXED_POINT_GAP
    if near.sum() != 1:
        raise NoUniqueFixedPoint(
            f"eigenvalue 1 of the transfer matrix has multiplicity {int(near.sum())}"
        )
    x = vecs[:, np.argmax(near)].reshape(d, d)
    x = x / np.trace(x)
    return 0.5 * (x + x.conj().T)


def _cmd_contraction(args):
    channel = _load_channel(args.channel)
    state, _ = _load_state(args.state)
    if state is None:
        raise ParseError(f"{args.state}: expected a matrix, got a classical table")
    reports = [contraction_coefficient(f, channel, state) for f in _f_list(args.f, ["gm"])]
    rows = [(r.f_id, f"{r.eta:.10f}", f"{r.lambda1:.10f}") for r in reports]
    return {"reports": [r.to_json() for r in reports]}, ("f", "eta", "lambda1"), rows


def _cmd_mixing(args):
    channel = _load_channel(args.channel)
    default = "gm,hm,lm" if args.metric == "relative_entropy" else "gm,hm,lm,am"
    fs = _f_list(args.f_set, [default])
    pi = linalg.as_density(fixed_point(channel))
    if args.metric == "relative_entropy":
        outside = [f.id for f in fs if not in_relative_entropy_band(f)]
        if outside:
            raise BandViolation(f"relative entropy bounds need HM <= f <= LM; got {outside}")
    reports = [mixing_time_bound(f, channel, pi, args.delta, args.metric) for f in fs]
    best = min(reports, key=lambda r: r.n)
    out = {
        "metric": args.metric,
        "delta": args.delta,
        "fixed_point": linalg.matrix_to_json(pi.matrix),
        "bounds": [r.to_json() for r in reports],
        "min": {"f": best.f_id, "n": _number(float(best.n)) if best.is_infinite else int(best.n)},
    }
    gm = [r for r in reports if r.f_id == "GM"]
    if gm and gm[0].is_infinite:
        out["note"] = "eta_GM = 1, so every chi2_f coefficient equals 1 and no finite bound exists"
    rows = [(r.f_id, str(r.to_json()["n"]), f"{r.eta:.10f}") for r in reports]
    return out, ("f", "n", "eta"), rows


def _parse_dims(text):
    try:
        d_a, d_b = (int(x) for x in text.split(","))
    except ValueError as exc:
        raise ParseError(f"--dims expects dA,dB, got {text!r}") from exc
    return d_a, d_b


def _cmd_correlation(args):
    state, table = _load_state(args.state)
    out = {}
    if table is not None:
        d_a, d_b = table.shape
        out["classical_mu"] = classical_mu(table)
        state = classical_state(table)
    elif args.dims is None:
        raise ParseError("--dims is required for matrix states")
    else:
        d_a, d_b = _parse_dims(args.dims)
    if args.dims is not None and _parse_dims(args.dims) != (d_a, d_b):
        raise DimensionMismatch(f"--dims {args.dims} does not match the table shape")
    if state.shape != (d_a * d_b, d_a * d_b):
        raise DimensionMismatch(f"state of size {state.shape[0]} does not factor as {d_a}x{d_b}")
    reports = []
    for k in args.k or []:
        reports.append(mu_lin_k(k, state, d_a, d_b))
    if args.f or not args.k:
        reports.extend(mu_f(f, state, d_a, d_b) for f in _f_list(args.f, ["gm"]))
    out["reports"] = [r.to_json() for r in reports]
    if args.spectrum:
        out["gm_schmidt_spectrum"] = [float(x) for x in gm_schmidt_spectrum(state, d_a, d_b)]
    rows = [(r.label, f"{r.mu:.10f}") for r in reports]
    return out, ("label", "mu"), rows


class _VerificationFailed(QContractError):
    exit_code = EXIT_NUMERIC


def _cmd_verify(args):
    result = run_suite(args.suite, seed=args.seed, trials=args.trials)
    out = result.to_json()
    rows = [(result.suite, str(result.checks), str(result.failures))]
    if not result.passed:
        out = {"result": out}
        raise _VerificationFailed(json.dumps(out, sort_keys=True))
    return out, ("suite", "checks", "failures"), rows


def build_parser():
    """Create the argument parser."""
    parser = _Parser(
        prog="qcontract",
        description="Contraction coefficients, maximal correlations and mixing bounds "
        "for finite-dimensional quantum channels.",
    )
    parser.add_argument("--tol-override", action="append", metavar="KEY=VALUE",
                        help="override a tolerance, e.g. rank_tol=1e-8")
    parser.add_argument("--out", help="write the JSON report to this file")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("contraction", help="chi2_f contraction coefficients")
    p.add_argument("channel", help="channel JSON file")
    p.add_argument("state", help="input state JSON file")
    p.add_argument("--f", action="append", help="am|gm|hm|lm|power:<k> (repeatable)")
    p.set_defaults(handler=_cmd_contraction)

    p = sub.add_parser("mixing", help="mixing-time bounds")
    p.add_argument("channel", help="channel JSON file")
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--metric", choices=("trace_distance", "relative_entropy"),
                   default="trace_distance")
    p.add_argument("--f-set", action="append", help="comma-separated monotone names")
    p.set_defaults(handler=_cmd_mixing)

    p = sub.add_parser("correlation", help="maximal correlation coefficients")
    p.add_argument("state", help="state JSON file or classical table {\"p\": ...}")
    p.add_argument("--dims", help="dA,dB")
    p.add_argument("--f", action="append", help="monotone function (repeatable)")
    p.add_argument("--k", action="append", type=float, help="power exponent (repeatable)")
    p.add_argument("--spectrum", action="store_true", help="include the GM Schmidt spectrum")
    p.set_defaults(handler=_cmd_correlation)

    p = sub.add_parser("verify", help="run a randomized property suite")
    p.add_argument("suite", help=f"one of {', '.join(sorted(SUITES))}")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=20)
    p.set_defaults(handler=_cmd_verify)
    return parser


def _emit(payload, out_path):
    text = json.dumps(payload, indent=2, sort_keys=True)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def _table(header, rows):
    if not sys.stderr.isatty():
        return
    widths = [max(len(str(c)) for c in col) for col in zip(header, *rows)]
    for row in (header, *rows):
        sys.stderr.write("  ".join(str(c).ljust(w) for c, w in zip(row, widths)) + "\n")


def main(argv=None):
    """Entry point; returns the process exit code."""
    try:
        args = build_parser().parse_args(argv)
        overrides = _tol_overrides(args.tol_override)
        with tolerances.override(**overrides) if overrides else contextlib.nullcontext():
            payload, header, rows = args.handler(args)
    except _VerificationFailed as exc:
        sys.stdout.write(str(exc) + "\n")
        return EXIT_NUMERIC
    except QContractError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return exc.exit_code
    except (np.linalg.LinAlgError, FloatingPointError) as exc:
        sys.stderr.write(f"numerical error: {exc}\n")
        return EXIT_NUMERIC
    _emit(payload, args.out)
    _table(header, rows)
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
