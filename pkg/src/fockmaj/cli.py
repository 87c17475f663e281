"""Command-line entry point.

Exit codes: 0 success, 1 usage or parameter error, 2 a verification check
failed, 3 truncation too coarse to decide.

JSON output carries ``"schema": 1``.  A run manifest (argv, seeds,
truncation and tolerance settings, version, timing) is written to stderr,
or to ``--manifest FILE``, so stdout stays byte-identical across reruns.
"""

import argparse
import csv
import io
import json
import math
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .channel import ChannelParams, decompose
from .errors import (
    DegenerateState,
    FockMajError,
    InconclusiveTruncation,
    InvalidDistribution,
    InvalidParameter,
    InvalidState,
    NotCompletelyPositive,
    PreconditionViolated,
    ProtocolInconsistent,
    TruncationError,
)
from .explore import ScanConfig, crossing_finder, fock_scan, minimize_entropy, random_majorization_scan
from .fock import DEFAULT_EPS, FockState, ProbabilityVector, normalize
from .locc import bs_attenuate, povm_reduce
from .majorization import DEFAULT_ETA, build_D, build_R, majorizes, verify_transfer
from .squeezer import auto_nmax, output_entanglement_bound, schmidt_vector

SCHEMA = 1
EXIT_OK, EXIT_USAGE, EXIT_VERIFY, EXIT_TRUNCATION = 0, 1, 2, 3


class UsageError(Exception):
    pass


class VerificationFailed(Exception):
    def __init__(self, payload):
        super().__init__("verification failed")
        self.payload = payload


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


# -- output -----------------------------------------------------------------

def _fmt_float(x, precision):
    if math.isnan(x) or math.isinf(x):
        return json.dumps(None)
    text = format(x, f".{precision}g")
    # keep floats recognisable as floats
    return text if any(ch in text for ch in ".en") else text + ".0"


def dump_json(obj, precision=17):
    """JSON with every float printed to ``precision`` significant digits."""
    if isinstance(obj, dict):
        items = (f"{json.dumps(str(k))}: {dump_json(v, precision)}" for k, v in obj.items())
        return "{" + ", ".join(items) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(dump_json(v, precision) for v in obj) + "]"
    if isinstance(obj, np.ndarray):
        return dump_json(obj.tolist(), precision)
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj), precision)
    if obj is None:
        return "null"
    return json.dumps(str(obj))


def dump_csv(header, rows, precision=17):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt_float(float(v), precision) if isinstance(v, (float, np.floating))
                    else v for v in row])
    return buf.getvalue()


# -- input mini-languages ---------------------------------------------------

def parse_state(spec):
    """``fock:k``, ``coeffs:[re,im;re,im;...]``, ``@file.json`` or a JSON pair list."""
    spec = spec.strip()
    if spec.startswith("fock:"):
        return FockState.fock(int(spec[5:]))
    if spec.startswith("coeffs:"):
        body = spec[7:].strip().strip("[]")
        coeffs = []
        for item in body.split(";"):
            parts = [float(v) for v in item.split(",")]
            coeffs.append(complex(parts[0], parts[1] if len(parts) > 1 else 0.0))
        return normalize(coeffs)
    if spec.startswith("@"):
        return FockState.from_json(Path(spec[1:]).read_text())
    return FockState.from_json(spec)


def parse_probs(spec, eps):
    """``schmidt:k:lambda``, ``@file.json`` or an inline JSON array/object."""
    spec = spec.strip()
    if spec.startswith("schmidt:"):
        _, k, lam = spec.split(":")
        return schmidt_vector(int(k), float(lam), eps=eps)
    text = Path(spec[1:]).read_text() if spec.startswith("@") else spec
    return ProbabilityVector.from_json(text)


def _lambda(args):
    if args.lam is not None and args.r is not None:
        raise UsageError("give either --lambda or --r, not both")
    if args.lam is not None:
        return args.lam
    if args.r is not None:
        return math.tanh(args.r)
    raise UsageError("one of --lambda or --r is required")


# -- subcommands ------------------------------------------------------------

def cmd_decompose(args):
    params = ChannelParams(args.tau, args.n)
    dec = decompose(params)
    return {"T": dec.T, "G": dec.G, "r": dec.r, "cp_margin": params.cp_margin}


def cmd_schmidt(args):
    lam = _lambda(args)
    p = schmidt_vector(args.k, lam, args.nmax, eps=args.eps)
    if args.format == "csv":
        return ("n", "p"), [(n, float(v)) for n, v in enumerate(p.probs)]
    return {"k": args.k, "lambda": lam, "probs": p.probs, "tail_mass": p.tail_mass}


def cmd_entropy(args):
    state = parse_state(args.state)
    b_dim = None if args.nmax is None else args.nmax + 1
    value, bound = output_entanglement_bound(state, args.r, b_dim, eps=args.eps)
    return {"value": value, "tail_bound": bound}


def cmd_majorize(args):
    p = parse_probs(args.p, args.eps)
    q = parse_probs(args.q, args.eps)
    v = majorizes(p, q, args.eta)
    return {"holds": v.holds, "margin": v.margin, "first_violation": v.first_violation}


def cmd_matrix(args):
    lam = args.lam
    k = args.k
    if args.family == "D":
        dk = 1
    elif args.family == "Dk":
        dk = args.dk
    else:
        dk = 0
    if args.family == "R":
        if args.lambda_prime is None:
            raise UsageError("--lambda-prime is required for family R")
        n_max = args.nmax if args.nmax is not None else auto_nmax(k, lam, args.eps)
        mat = build_R(k, lam, args.lambda_prime, n_max)
        p_in = schmidt_vector(k, args.lambda_prime, n_max)
        p_out = schmidt_vector(k, lam, n_max)
    else:
        n_max = args.nmax if args.nmax is not None else auto_nmax(k + dk, lam, args.eps)
        mat = build_D(dk, lam, n_max)
        p_in = schmidt_vector(k, lam, n_max)
        p_out = schmidt_vector(k + dk, lam, n_max)
    report = verify_transfer(mat, p_in, p_out).as_dict() if args.verify else None
    fmt = args.format or "csv"
    if fmt == "csv":
        if report is not None:
            args.stderr.write(dump_json({"schema": SCHEMA, "report": report}, args.precision) + "\n")
        out = dump_csv([f"c{j}" for j in range(mat.size)], mat.entries.tolist(), args.precision)
        return _Raw(out, report is None or report["passed"])
    payload = {"family": args.family, "entries": mat.entries,
               "column_tail": mat.column_tail}
    if report is not None:
        payload["report"] = report
        if not report["passed"]:
            raise VerificationFailed(payload)
    return payload


def cmd_locc(args):
    if args.protocol == "reduce":
        trace = povm_reduce(args.k, args.dk, args.lam, args.nmax, eps=args.eps)
    else:
        trace = bs_attenuate(args.k, args.lam, args.lambda_prime, args.nmax, eps=args.eps)
    payload = trace.as_dict()
    ok = (trace.deterministic and trace.probability_residual <= 1e-9
          and trace.final_entanglement <= trace.initial_entanglement + 1e-9)
    if not ok:
        raise VerificationFailed(payload)
    return payload


def cmd_scan(args):
    if args.kind == "fock":
        grid = np.linspace(args.rmin, args.rmax, args.steps)
        scan = fock_scan(args.kmax, grid, eps=args.eps)
        ok = scan.monotone_in_r() and scan.monotone_in_k()
        if (args.format or "csv") == "csv":
            out = dump_csv(("r", "k", "entanglement"), scan.rows(), args.precision)
            return _Raw(out, ok)
        payload = {"rows": [list(row) for row in scan.rows()],
                   "monotone_in_r": scan.monotone_in_r(), "monotone_in_k": scan.monotone_in_k()}
        if not ok:
            raise VerificationFailed(payload)
        return payload
    cfg = ScanConfig(dim=args.dim, count=args.count, r=args.r,
                     r_grid=tuple(args.r_grid or ()), seed=args.seed or 0,
                     eta=args.eta, eps=args.eps, zero_mean_mode=args.zero_mean,
                     threads=args.threads)
    return random_majorization_scan(cfg)


def cmd_crossing(args):
    a = parse_state(args.a)
    b = parse_state(args.b)
    r_star = crossing_finder(a, b, args.lo, args.hi, args.tol, eps=args.eps)
    return {"r_star": r_star, "found": r_star is not None}


def cmd_minimize(args):
    res = minimize_entropy(args.dim, args.r, args.restarts, args.seed or 0,
                           args.penalty, eps=args.eps, threads=args.threads)
    return res.as_dict()


class _Raw:
    def __init__(self, text, ok=True):
        self.text = text
        self.ok = ok


# -- parser -----------------------------------------------------------------

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("global options")
    g.add_argument("--nmax", type=int, default=None, help="truncation index (default: auto)")
    g.add_argument("--eps", type=float, default=DEFAULT_EPS, help="tail tolerance")
    g.add_argument("--eta", type=float, default=DEFAULT_ETA, help="majorization tolerance")
    g.add_argument("--seed", type=int, default=None)
    g.add_argument("--threads", type=int, default=1)
    g.add_argument("--format", choices=("json", "csv"), default=None)
    g.add_argument("--precision", type=int, default=17, help="significant digits")
    g.add_argument("--manifest", default=None, help="write the run manifest to this file")

    parser = _Parser(prog="fockmaj", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("decompose", parents=[common], help="split a channel into loss and gain")
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--n", type=float, required=True)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("schmidt", parents=[common], help="Schmidt vector of |Psi^(k)>")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--r", type=float)
    p.set_defaults(func=cmd_schmidt)

    p = sub.add_parser("entropy", parents=[common], help="output entanglement of a state")
    p.add_argument("--state", required=True)
    p.add_argument("--r", type=float, required=True)
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("majorize", parents=[common], help="decide p majorizes q")
    p.add_argument("--p", required=True)
    p.add_argument("--q", required=True)
    p.set_defaults(func=cmd_majorize)

    p = sub.add_parser("matrix", parents=[common], help="build a witness matrix")
    p.add_argument("--family", choices=("D", "Dk", "R"), required=True)
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--dk", type=int, default=1)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--lambda-prime", dest="lambda_prime", type=float)
    p.add_argument("--verify", action="store_true")
    p.set_defaults(func=cmd_matrix)

    p = sub.add_parser("locc", help="simulate an LOCC protocol")
    lsub = p.add_subparsers(dest="protocol", parser_class=_Parser)
    q = lsub.add_parser("reduce", parents=[common])
    q.add_argument("--k", type=int, required=True)
    q.add_argument("--dk", type=int, default=1)
    q.add_argument("--lambda", dest="lam", type=float, required=True)
    q.set_defaults(func=cmd_locc)
    q = lsub.add_parser("attenuate", parents=[common])
    q.add_argument("--k", type=int, required=True)
    q.add_argument("--lambda", dest="lam", type=float, required=True)
    q.add_argument("--lambda-prime", dest="lambda_prime", type=float, required=True)
    q.set_defaults(func=cmd_locc)

    p = sub.add_parser("scan", help="Fock-state table or random majorization scan")
    ssub = p.add_subparsers(dest="kind", parser_class=_Parser)
    q = ssub.add_parser("fock", parents=[common])
    q.add_argument("--kmax", type=int, default=5)
    q.add_argument("--rmin", type=float, default=0.0)
    q.add_argument("--rmax", type=float, default=1.5)
    q.add_argument("--steps", type=int, default=31)
    q.set_defaults(func=cmd_scan)
    q = ssub.add_parser("random", parents=[common])
    q.add_argument("--dim", type=int, default=21)
    q.add_argument("--count", type=int, default=1000)
    q.add_argument("--r", type=float, default=1.0)
    q.add_argument("--r-grid", dest="r_grid", type=float, nargs="+")
    q.add_argument("--zero-mean", dest="zero_mean", nargs="?", const="penalty", default="off",
                   choices=("off", "filter", "penalty"))
    q.set_defaults(func=cmd_scan)

    p = sub.add_parser("crossing", parents=[common], help="entanglement crossing point")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--lo", type=float, required=True)
    p.add_argument("--hi", type=float, required=True)
    p.add_argument("--tol", type=float, default=1e-6)
    p.set_defaults(func=cmd_crossing)

    p = sub.add_parser("minimize", parents=[common], help="multi-start entropy search")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--restarts", type=int, default=32)
    p.add_argument("--penalty", type=float, default=10.0)
    p.set_defaults(func=cmd_minimize)
    return parser


def _manifest(argv, args, started, duration):
    return {
        "schema": SCHEMA,
        "argv": list(argv),
        "seed": getattr(args, "seed", None),
        "nmax": getattr(args, "nmax", None),
        "eps": getattr(args, "eps", None),
        "eta": getattr(args, "eta", None),
        "version": __version__,
        "started": started,
        "duration_s": duration,
    }


def _render(result, args):
    if isinstance(result, _Raw):
        return result.text
    if isinstance(result, tuple):
        header, rows = result
        return dump_csv(header, rows, args.precision)
    if args.format == "csv":
        scalars = [(k, v) for k, v in result.items()
                   if v is None or isinstance(v, (int, float, bool, str))]
        return dump_csv(("key", "value"), scalars, args.precision)
    return dump_json({"schema": SCHEMA, **result}, args.precision) + "\n"


def main(argv=None, stdout=None, stderr=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    started = datetime.now(timezone.utc).isoformat()
    t0 = time.perf_counter()
    code = EXIT_OK
    args = None
    try:
        args = parser.parse_args(argv)
        args.stderr = stderr
        if not hasattr(args, "func"):
            raise UsageError(parser.format_usage() + "fockmaj: error: missing subcommand")
        result = args.func(args)
        stdout.write(_render(result, args))
        if isinstance(result, _Raw) and not result.ok:
            code = EXIT_VERIFY
    except UsageError as exc:
        stderr.write(f"{exc}\n")
        code = EXIT_USAGE
    except VerificationFailed as exc:
        stdout.write(dump_json({"schema": SCHEMA, **exc.payload}, args.precision) + "\n")
        stderr.write("fockmaj: verification failed\n")
        code = EXIT_VERIFY
    except (TruncationError, InconclusiveTruncation) as exc:
        stderr.write(f"fockmaj: truncation inconclusive: {exc}\n")
        code = EXIT_TRUNCATION
    except ProtocolInconsistent as exc:
        stderr.write(f"fockmaj: {exc}\n")
        code = EXIT_VERIFY
    except (NotCompletelyPositive, InvalidParameter, InvalidState, InvalidDistribution,
            DegenerateState, PreconditionViolated, FockMajError, ValueError,
            OSError) as exc:
        stderr.write(f"fockmaj: {exc}\n")
        code = EXIT_USAGE
    if args is not None and hasattr(args, "func"):
        manifest = _manifest(argv, args, started, time.perf_counter() - t0)
        text = dump_json(manifest, 17)
        if args.manifest:
            Path(args.manifest).write_text(text + "\n")
        else:
            stderr.write(f"manifest: {text}\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
