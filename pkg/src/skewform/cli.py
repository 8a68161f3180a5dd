"""Command-line interface.

Every invocation prints exactly one self-describing JSON report to stdout
and uses the exit-code contract 0 = success, 1 = invalid input,
2 = internal verification failure (including self-test failures).  Numeric
values are rounded to 12 significant digits; complex numbers serialize as
[re, im] pairs, reals as plain numbers.
"""

from __future__ import annotations

import argparse
import itertools
import json
import math
import os
import re as _re
import sys

from .correspond import form_to_matrix
from .invariants import SIGN_PAIRS, mu_det_2, mu_det_d7, mu_det_d8, mu_minors_3, sextic
from .oracle import selftest, verify_factorization
from .parse import _render_monomial, parse, render, to_quadratic_form
from .rank import (
    Factorization,
    decompose_3,
    factor_2,
    factor_3,
    mu_rank_2,
    mu_rank_3,
    mu_rank_general,
    square_2,
    square_3,
    square_general,
)
from .ring import (
    DEFAULT_TOL,
    InputError,
    MuMatrix,
    QuadraticForm,
    SkewformError,
    VerificationError,
    permute_form,
)


def _sig(x: float) -> float:
    if x == 0:
        return 0.0
    if not math.isfinite(x):
        return x
    return float(f"{x:.12g}")


def _num(z):
    z = complex(z)
    re_, im = _sig(z.real), _sig(z.imag)
    return re_ if im == 0 else [re_, im]


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        return _sig(obj)
    if isinstance(obj, complex):
        return _num(obj)
    return str(obj)


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):  # keep the exit-code contract: usage errors are input errors
        raise InputError(message)


def _infer_n(text: str) -> int:
    indices = [int(m) for m in _re.findall(r"z(\d+)", text)]
    return max(indices + [2])


def _entry_to_complex(x, what: str) -> complex:
    if isinstance(x, (int, float)):
        return complex(x)
    if isinstance(x, list) and len(x) == 2 and all(isinstance(v, (int, float)) for v in x):
        return complex(x[0], x[1])
    raise InputError(f"{what} must be a real number or an [re, im] pair, got {x!r}")


def _load_mu(mu_arg: str | None, tol_flag: float | None, form_text: str) -> MuMatrix:
    if mu_arg is None:
        return MuMatrix.commutative(_infer_n(form_text), tol=tol_flag or DEFAULT_TOL)
    text = mu_arg.strip()
    if not text.startswith("{"):
        if not os.path.exists(mu_arg):
            raise InputError(f"mu file not found: {mu_arg}")
        with open(mu_arg, "r", encoding="utf-8") as fh:
            text = fh.read()
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"mu config is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise InputError("mu config must be a JSON object")
    if "n" not in cfg or not isinstance(cfg["n"], int) or cfg["n"] < 1:
        raise InputError("mu config needs a positive integer field 'n'")
    n = cfg["n"]
    tol = DEFAULT_TOL
    if "tolerance" in cfg and cfg["tolerance"] is not None:
        if not isinstance(cfg["tolerance"], (int, float)) or cfg["tolerance"] <= 0:
            raise InputError("mu config 'tolerance' must be a positive number")
        tol = float(cfg["tolerance"])
    if tol_flag is not None:
        tol = tol_flag
    if "mu" not in cfg:
        return MuMatrix.commutative(n, tol=tol)
    rows = cfg["mu"]
    if not isinstance(rows, list) or len(rows) != n or any(
        not isinstance(r, list) or len(r) != n for r in rows
    ):
        raise InputError(f"mu config field 'mu' must be an {n} x {n} array")
    entries = [
        [_entry_to_complex(x, f"mu[{i + 1}][{j + 1}]") for j, x in enumerate(row)]
        for i, row in enumerate(rows)
    ]
    return MuMatrix(entries, tol=tol)


def _mu_report(mu: MuMatrix) -> dict:
    return {
        "n": mu.n,
        "entries": [[_num(x) for x in row] for row in mu.entries],
        "tolerance": _sig(mu.tol),
    }


def _read_form_text(args) -> str:
    if getattr(args, "form_file", None):
        if args.form is not None:
            raise InputError("give the form either inline or with --form-file, not both")
        with open(args.form_file, "r", encoding="utf-8") as fh:
            return fh.read().strip()
    if args.form is None:
        raise InputError("missing form; pass it inline or with --form-file")
    return args.form


def _witness_entry(Q: QuadraticForm, F: Factorization) -> dict:
    rep = verify_factorization(Q, F)
    if not rep.passed:
        raise VerificationError(
            f"witness {render(F)} failed re-expansion (residual {rep.max_residual:.3e})"
        )
    return {
        "kind": F.kind,
        "text": render(F),
        "factors": [[_num(c) for c in L.coeffs] for L in F.linear_forms()],
        "residual": _sig(rep.max_residual),
    }


def _rank_and_witnesses(Q: QuadraticForm) -> tuple[int | str, dict, list[dict]]:
    n = Q.n
    if Q.is_zero():
        return 0, {"n": n}, []
    if n == 2:
        res = mu_rank_2(Q)
        if res.value == 1:
            witnesses = [_witness_entry(Q, Factorization.square(square_2(Q)))]
        else:
            witnesses = [_witness_entry(Q, factor_2(Q)[0])]
        return res.value, res.diagnostics, witnesses
    if n == 3:
        res = mu_rank_3(Q)
        witnesses = []
        if res.value == 1:
            witnesses = [_witness_entry(Q, Factorization.square(square_3(Q)))]
        elif res.value == 2:
            F = factor_3(Q)
            if F is None:
                raise VerificationError("rank 2 reported but no product witness found")
            witnesses = [_witness_entry(Q, F)]
        return res.value, res.diagnostics, witnesses
    value = mu_rank_general(Q)
    witnesses = []
    if value == 1:
        witnesses = [_witness_entry(Q, Factorization.square(square_general(Q)))]
    return value, {"n": n}, witnesses


def _base_report(command: str, mu: MuMatrix, Q: QuadraticForm | None = None) -> dict:
    report = {"command": command, "mu": _mu_report(mu)}
    if Q is not None:
        report["form"] = render(Q)
    return report


def cmd_rank(args) -> tuple[dict, int]:
    text = _read_form_text(args)
    mu = _load_mu(args.mu, args.tol, text)
    Q = to_quadratic_form(parse(text, mu))
    value, diagnostics, witnesses = _rank_and_witnesses(Q)
    report = _base_report("rank", mu, Q)
    report["rank"] = value
    report["diagnostics"] = _jsonable(diagnostics)
    report["witnesses"] = witnesses
    report["residuals"] = [w["residual"] for w in witnesses]
    if args.permutations:
        perms = []
        for perm in itertools.permutations(range(1, mu.n + 1)):
            Qp = permute_form(Q, perm)
            rp = 0 if Qp.is_zero() else mu_rank_general(Qp)
            perms.append({"perm": list(perm), "rank": rp})
        report["permutations"] = perms
    return report, 0


def cmd_factor(args) -> tuple[dict, int]:
    text = _read_form_text(args)
    mu = _load_mu(args.mu, args.tol, text)
    Q = to_quadratic_form(parse(text, mu))
    report = _base_report("factor", mu, Q)
    if args.sum_of_products and mu.n != 3:
        raise InputError("--sum-of-products applies to n = 3 only")
    witnesses: list[dict] = []
    if Q.is_zero():
        report["rank"] = 0
    elif mu.n == 2:
        witnesses = [_witness_entry(Q, F) for F in factor_2(Q)]
        report["rank"] = mu_rank_2(Q).value
    elif mu.n == 3:
        report["rank"] = mu_rank_3(Q).value
        if args.sum_of_products:
            witnesses = [_witness_entry(Q, decompose_3(Q))]
        else:
            L = square_3(Q)
            if L is not None:
                witnesses = [_witness_entry(Q, Factorization.square(L))]
            else:
                F = factor_3(Q)
                witnesses = [_witness_entry(Q, F if F is not None else decompose_3(Q))]
    else:
        L = square_general(Q)
        report["rank"] = mu_rank_general(Q)
        if L is not None:
            witnesses = [_witness_entry(Q, Factorization.square(L))]
    report["witnesses"] = witnesses
    report["residuals"] = [w["residual"] for w in witnesses]
    return report, 0


def cmd_expand(args) -> tuple[dict, int]:
    text = _read_form_text(args)
    mu = _load_mu(args.mu, args.tol, text)
    p = parse(text, mu)
    report = _base_report("expand", mu)
    report["input"] = text
    report["normal_form"] = render(p)
    report["coefficients"] = [
        {
            "monomial": _render_monomial(e) or "1",
            "exponents": list(e),
            "value": _num(c),
        }
        for e, c in p.terms()
    ]
    return report, 0


def cmd_minors(args) -> tuple[dict, int]:
    text = _read_form_text(args)
    mu = _load_mu(args.mu, args.tol, text)
    Q = to_quadratic_form(parse(text, mu))
    report = _base_report("minors", mu, Q)
    M = form_to_matrix(Q)
    if mu.n == 2:
        report["diagnostics"] = {"D": _num(mu_det_2(M))}
    elif mu.n == 3:
        minors = mu_minors_3(M)
        d8 = []
        min_abs = math.inf
        for signs in SIGN_PAIRS:
            value, pair = mu_det_d8(M, signs)
            min_abs = min(min_abs, abs(value))
            d8.append(
                {
                    "signs": list(signs),
                    "X": _num(pair.x),
                    "Y": _num(pair.y),
                    "value": _num(value),
                }
            )
        report["diagnostics"] = {
            **{f"D{i}": _num(v) for i, v in enumerate(minors, start=1)},
            "D7": _num(mu_det_d7(M)),
            "D8": d8,
            "min_abs_D8": _sig(min_abs),
            "sextic": _num(sextic(M)),
        }
    else:
        raise InputError("minors requires n = 2 or n = 3")
    return report, 0


def cmd_selftest(args) -> tuple[dict, int]:
    tol = args.tol if args.tol is not None else DEFAULT_TOL
    summary = selftest(args.seed, args.cases, tol=tol)
    report = {"command": "selftest", **_jsonable(summary)}
    return report, 0 if summary["total_failures"] == 0 else 2


def _build_parser() -> _ArgumentParser:
    parser = _ArgumentParser(
        prog="skewform",
        description=(
            "mu-rank, factorization and normal-form arithmetic for quadratic "
            "forms over quantum affine space"
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, with_form=True):
        p.add_argument("--mu", help="mu config: path to a JSON file, or an inline JSON object")
        p.add_argument("--tol", type=float, default=None, help="comparison tolerance (default 1e-9)")
        if with_form:
            p.add_argument("--form-file", help="read the form from this file")
            p.add_argument("form", nargs="?", help="form text, e.g. 'z1^2 + 6 z1 z2 + 4 z2^2'")

    p_rank = sub.add_parser("rank", help="classify a quadratic form")
    add_common(p_rank)
    p_rank.add_argument(
        "--permutations",
        action="store_true",
        help="also report the rank under every generator permutation (diagnostic)",
    )

    p_factor = sub.add_parser("factor", help="produce verified factorization witnesses")
    add_common(p_factor)
    p_factor.add_argument(
        "--sum-of-products",
        action="store_true",
        help="emit the L1 L2 + L3^2 decomposition (n = 3)",
    )

    p_expand = sub.add_parser("expand", help="normal form of an arbitrary expression")
    add_common(p_expand)

    p_minors = sub.add_parser("minors", help="print the determinant/minor analogs")
    add_common(p_minors)

    p_self = sub.add_parser("selftest", help="run the randomized self-test suite")
    add_common(p_self, with_form=False)
    p_self.add_argument("--seed", type=int, default=42)
    p_self.add_argument("--cases", type=int, default=50, help="cases per property family")
    return parser


_DISPATCH = {
    "rank": cmd_rank,
    "factor": cmd_factor,
    "expand": cmd_expand,
    "minors": cmd_minors,
    "selftest": cmd_selftest,
}


def _emit(report: dict) -> None:
    sys.stdout.write(json.dumps(report, indent=2) + "\n")


def main(argv=None) -> int:
    command = None
    try:
        args = _build_parser().parse_args(argv)
        command = args.command
        report, code = _DISPATCH[args.command](args)
    except InputError as exc:
        _emit({"command": command, "error": {"kind": "input", "message": str(exc)}})
        return 1
    except VerificationError as exc:
        _emit({"command": command, "error": {"kind": "verification", "message": str(exc)}})
        return 2
    except SkewformError as exc:  # pragma: no cover - defensive
        _emit({"command": command, "error": {"kind": "internal", "message": str(exc)}})
        return 2
    _emit(report)
    return code


if __name__ == "__main__":
    sys.exit(main())
