"""Command-line front end.

Exit codes: 0 on success, 1 for unreadable or invalid input, 2 when a
numerical routine fails or does not converge.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import io
from .capacity import OptimizerConfig, constrained_holevo_capacity, maximize_gap
from .channels import DEFAULT_TOL, QuantumChannel, apply, is_completely_depolarizing
from .entropic import entropy_exchange, mutual_information, vn_entropy
from .equality import equality_test, hat_equality_test, two_rank_separation
from .errors import NumericalError
from .gaussian import classify_complementary, classify_direct, comp_rel_subspace, one_mode_invariants, one_mode_type


class NonConvergence(Exception):
    def __init__(self, report):
        self.report = report
        super().__init__("optimizer did not converge")


def _config(args) -> OptimizerConfig:
    kwargs = {"seed": args.seed}
    if args.restarts is not None:
        kwargs["restarts"] = args.restarts
    return OptimizerConfig(**kwargs)


def _state(args, channel: QuantumChannel) -> np.ndarray:
    if args.state:
        return io.load_state(args.state)
    return np.eye(channel.dim_in, dtype=complex) / channel.dim_in


def _inputs(args, **extra) -> dict:
    out = {"command": args.command, "file": args.file, "seed": args.seed, "tol": args.tol}
    if args.restarts is not None:
        out["restarts"] = args.restarts
    if getattr(args, "state", None):
        out["state_file"] = args.state
    out.update(extra)
    return out


def _family(report):
    return None if report.certificate is None else report.certificate.vectors


def _equality_section(rep) -> dict:
    return {
        "verdict": rep.verdict,
        "method": rep.method,
        "reason": rep.reason,
        "numeric_gap": rep.numeric_gap,
        "certificate": _family(rep),
        "diagnostics": rep.diagnostics,
    }


def cmd_validate(args) -> dict:
    doc = io.load_json(args.file)
    kind = io.document_kind(doc)
    if kind == "channel":
        ch = io.channel_from_document(doc)
        gram = np.einsum("kba,kbc->ac", ch.kraus.conj(), ch.kraus)
        return {
            "inputs": _inputs(args, kind=kind),
            "valid": True,
            "quantities": {
                "dim_in": ch.dim_in,
                "dim_out": ch.dim_out,
                "n_kraus": ch.n_kraus,
                "completeness_error": float(np.linalg.norm(gram - np.eye(ch.dim_in))),
                "choi_min_eigenvalue": float(np.linalg.eigvalsh(ch.choi)[0]),
            },
        }
    if kind == "gaussian":
        params = io.gaussian_from_document(doc)
        return {"inputs": _inputs(args, kind=kind), "valid": True, "quantities": {"s_a": params.s_a, "s_b": params.s_b}}
    rho = io.state_from_document(doc)
    return {"inputs": _inputs(args, kind=kind), "valid": True, "quantities": {"dim": rho.shape[0]}}


def cmd_analyze(args) -> dict:
    ch = io.load_channel(args.file)
    rho = _state(args, ch)
    cfg = _config(args)
    cap = constrained_holevo_capacity(ch, rho, cfg)
    h = vn_entropy(rho)
    mi = mutual_information(ch, rho)
    report = {
        "inputs": _inputs(args),
        "quantities": {
            "entropy": h,
            "output_entropy": vn_entropy(apply(ch, rho)),
            "entropy_exchange": entropy_exchange(ch, rho),
            "mutual_information": mi,
            "capacity": {
                "value": cap.value,
                "converged": cap.converged,
                "restarts_used": cap.restarts_used,
                "slack": cap.slack,
                "ensemble_weights": cap.best_ensemble.weights,
            },
            "entropy_minus_capacity": h - cap.value,
            "mutual_information_minus_capacity": mi - cap.value,
        },
    }
    if not cap.converged:
        raise NonConvergence(report)
    return report


def cmd_equality(args) -> dict:
    ch = io.load_channel(args.file)
    rho = _state(args, ch)
    test = hat_equality_test if args.command == "hat-equality" else equality_test
    rep = test(ch, rho, args.tol, _config(args))
    return {"inputs": _inputs(args), "verdicts": {args.command: _equality_section(rep)}}


def cmd_gap(args) -> dict:
    ch = io.load_channel(args.file)
    res = maximize_gap(ch, _config(args), outer_restarts=args.outer_restarts)
    return {
        "inputs": _inputs(args, outer_restarts=args.outer_restarts),
        "quantities": {
            "gap": res.value,
            "state": res.state,
            "mutual_information": res.mutual_information,
            "capacity": res.capacity,
            "evaluations": res.evaluations,
        },
    }


def cmd_separate(args) -> dict:
    ch = io.load_channel(args.file)
    res = two_rank_separation(ch, args.tol, _config(args))
    if res is None:
        body = {"found": False, "completely_depolarizing": is_completely_depolarizing(ch, args.tol)}
    else:
        body = {"found": True, "state": res.state, "gap": res.gap, "coupling": res.coupling, "pair": list(res.pair)}
    return {"inputs": _inputs(args), "quantities": {"separation": body}}


def _classification(c) -> dict:
    return {
        "case": c.case,
        "limb": c.limb,
        "ran_dim": c.ran_k_dim,
        "complement_dim": c.complement_dim,
        "complement_symplectic_rank": c.complement_symplectic_rank,
        "complement_basis": c.complement_basis,
        "notes": c.notes,
    }


def cmd_gaussian(args) -> dict:
    params = io.load_gaussian(args.file)
    verdicts = {
        "direct": _classification(classify_direct(params)),
        "complementary": _classification(classify_complementary(params)),
        "comp_rel_subspace": comp_rel_subspace(params),
    }
    if params.s_a == 1 and params.s_b == 1:
        verdicts["one_mode_type"] = one_mode_type(params)
        verdicts["one_mode_invariants"] = one_mode_invariants(params)
    return {"inputs": _inputs(args, s_a=params.s_a, s_b=params.s_b), "verdicts": verdicts}


COMMANDS = {
    "validate": cmd_validate,
    "analyze": cmd_analyze,
    "equality": cmd_equality,
    "hat-equality": cmd_equality,
    "gap": cmd_gap,
    "separate": cmd_separate,
    "gaussian-classify": cmd_gaussian,
}


class _Parser(argparse.ArgumentParser):
    # usage errors are input errors (exit 1); 2 is reserved for numerical failures
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="chanineq", description="Entropic analysis of quantum channels.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("file", help="channel, state or Gaussian parameter JSON document")
        p.add_argument("--state", help="state document (default: maximally mixed)")
        p.add_argument("--tol", type=float, default=DEFAULT_TOL)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--restarts", type=int, default=None, help="capacity optimizer restarts")
        p.add_argument("--json", action="store_true", help="emit the JSON report")
        p.add_argument("--out", help="write the report to this file instead of stdout")
        if name == "gap":
            p.add_argument("--outer-restarts", type=int, default=16)
    return parser


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k in sorted(obj):
            yield from _flatten(obj[k], f"{prefix}.{k}" if prefix else k)
    else:
        yield prefix, obj


def render_text(report: dict) -> str:
    plain = io.to_jsonable(report)
    return "".join(f"{key}: {value}\n" for key, value in _flatten(plain))


def _emit(report: dict, args) -> None:
    report = {"schema_version": io.REPORT_VERSION, **report}
    text = io.dumps(report) if args.json else render_text(report)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        report = COMMANDS[args.command](args)
    except NonConvergence as exc:
        _emit(exc.report, args)
        print("error: capacity optimizer did not converge within its iteration limit", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (NumericalError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    _emit(report, args)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
