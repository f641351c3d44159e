"""Command-line front end: ``heun eigs|verify|eval --spec FILE``.

Problem files are flat ``key = value`` lines with ``#`` comments::

    # Heun problem
    alpha = 1
    beta = riemann        # solved from the exponent relation
    gamma = 1.5
    delta = 1.5
    epsilon = 1
    a = 2
    class = I
    lambda_min = -25
    lambda_max = 5
    max_count = 4
    tol = 1e-12
    format = json

Exit codes: 0 success, 2 usage/parse error, 3 validation error, 4 solver
failure, 5 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from dataclasses import asdict, dataclass, field, replace

from . import __version__
from .core import EXPONENT_NAMES, HeunClass, complete_exponents, validate
from .errors import DomainError, HeunError, SolverError, ValidationError
from .oracle import verify_basis
from .spectral import SpectralBasis, orthonormal_basis

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_VALIDATION = 3
EXIT_SOLVER = 4
EXIT_VERIFY = 5

PARAM_KEYS = (*EXPONENT_NAMES, "a")
KNOWN_KEYS = {
    *PARAM_KEYS,
    "class",
    "lambda_min",
    "lambda_max",
    "max_count",
    "tol",
    "format",
}
FORMATS = ("json", "csv")


class SpecParseError(HeunError, ValueError):
    pass


@dataclass(frozen=True)
class ProblemSpec:
    parameters: dict
    class_id: str
    lambda_min: float
    lambda_max: float
    max_count: int | None = None
    tol: float = 1e-12
    format: str = "json"

    def resolved_parameters(self):
        """Validated :class:`HeunParameters`, solving for a ``riemann`` entry."""
        vals = dict(self.parameters)
        missing = [k for k, v in vals.items() if v == "riemann"]
        if missing:
            name = missing[0]
            known = {k: v for k, v in vals.items() if k in EXPONENT_NAMES and k != name}
            vals[name] = complete_exponents(name, **known)
        return validate(*(vals[k] for k in PARAM_KEYS))


def _float(key, text):
    try:
        val = float(text)
    except ValueError:
        raise SpecParseError(f"{key}: not a number: {text!r}") from None
    if not math.isfinite(val):
        raise SpecParseError(f"{key}: must be finite")
    return val


def parse_spec(text: str) -> ProblemSpec:
    raw = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise SpecParseError(f"line {lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.lower()
        if key not in KNOWN_KEYS:
            raise SpecParseError(f"line {lineno}: unknown key {key!r}")
        if key in raw:
            raise SpecParseError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = value

    absent = [k for k in (*PARAM_KEYS, "class", "lambda_min", "lambda_max") if k not in raw]
    if absent:
        raise SpecParseError(f"missing keys: {', '.join(absent)}")

    params = {}
    for key in PARAM_KEYS:
        if raw[key].lower() == "riemann":
            if key == "a":
                raise SpecParseError("a cannot be solved from the exponent relation")
            params[key] = "riemann"
        else:
            params[key] = _float(key, raw[key])
    if sum(v == "riemann" for v in params.values()) > 1:
        raise SpecParseError("at most one exponent may be 'riemann'")

    try:
        cls = HeunClass.parse(raw["class"]).value
    except ValidationError as exc:
        raise SpecParseError(str(exc)) from None
    lo = _float("lambda_min", raw["lambda_min"])
    hi = _float("lambda_max", raw["lambda_max"])
    if not lo < hi:
        raise SpecParseError("lambda_min must be below lambda_max")
    max_count = None
    if "max_count" in raw:
        try:
            max_count = int(raw["max_count"])
        except ValueError:
            raise SpecParseError("max_count: not an integer") from None
        if max_count < 0:
            raise SpecParseError("max_count must be non-negative")
    tol = _float("tol", raw["tol"]) if "tol" in raw else 1e-12
    if not tol > 0:
        raise SpecParseError("tol must be positive")
    fmt = raw.get("format", "json").lower()
    if fmt == "text":
        fmt = "json"
    if fmt not in FORMATS:
        raise SpecParseError(f"format must be one of {FORMATS}")
    return ProblemSpec(params, cls, lo, hi, max_count, tol, fmt)


@dataclass
class ResultDocument:
    command: str
    spec: dict
    records: list = field(default_factory=list)
    samples: list = field(default_factory=list)
    verification: dict | None = None
    version: str = __version__
    timing: float = 0.0

    def to_text(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True, allow_nan=True) + "\n"

    @classmethod
    def from_text(cls, text: str) -> ResultDocument:
        return cls(**json.loads(text))

    def same_content(self, other: ResultDocument) -> bool:
        return replace(self, timing=0.0) == replace(other, timing=0.0)


def _fmt(v):
    if isinstance(v, float):
        return format(v, ".17g")
    return "" if v is None else str(v)


def to_csv(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row.get(c)) for c in columns])
    return buf.getvalue()


def _spec_echo(spec: ProblemSpec) -> dict:
    d = asdict(spec)
    d["parameters"] = dict(spec.parameters)
    return d


def _basis(spec: ProblemSpec, corrupt_norm: float | None = None) -> SpectralBasis:
    params = spec.resolved_parameters()
    basis = orthonormal_basis(
        params, spec.class_id, spec.lambda_min, spec.lambda_max, spec.max_count, spec.tol
    )
    if corrupt_norm is not None and len(basis):
        # fault injection: scale the first closed-form norm
        bad = replace(basis.solutions[0], I_n=basis.solutions[0].I_n * corrupt_norm)
        basis = replace(basis, solutions=(bad, *basis.solutions[1:]))
    return basis


def _records(basis: SpectralBasis) -> list[dict]:
    return [
        {
            "n": s.n,
            "lambda_n": s.lambda_n,
            "A_n": s.A_n,
            "I_n": s.I_n,
            "residual": s.residual,
        }
        for s in basis.solutions
    ]


def _echo_with_resolved(spec):
    echo = _spec_echo(spec)
    p = spec.resolved_parameters()
    echo["resolved"] = dict(zip(PARAM_KEYS, p.as_tuple()))
    return echo


def cmd_eigs(spec: ProblemSpec) -> ResultDocument:
    basis = _basis(spec)
    return ResultDocument("eigs", _echo_with_resolved(spec), records=_records(basis))


def _threads() -> int:
    try:
        return max(0, int(os.environ.get("HEUN_THREADS", "0")))
    except ValueError:
        return 0


def cmd_verify(spec: ProblemSpec, *, corrupt_norm: float | None = None) -> ResultDocument:
    basis = _basis(spec, corrupt_norm)
    if len(basis):
        rep = verify_basis(basis, threads=_threads())
        verification = {
            "passed": rep.passed,
            "failures": rep.failures,
            "gram": rep.gram.tolist(),
            "norm_rel_errors": rep.norm_rel_errors,
            "quadrature_norms": rep.quadrature_norms,
            "shooting_mismatch": rep.shooting_mismatch,
            "thresholds": rep.thresholds,
        }
    else:
        verification = {"passed": True, "failures": [], "gram": []}
    return ResultDocument(
        "verify", _echo_with_resolved(spec), records=_records(basis), verification=verification
    )


def cmd_eval(spec: ProblemSpec, points) -> ResultDocument:
    basis = _basis(spec)
    samples = []
    for n in range(len(basis)):
        for x in points:
            row = {"n": n, "x": float(x), "h": None, "error": None}
            try:
                row["h"] = float(basis.h(n, float(x)))
            except DomainError as exc:
                row["error"] = f"DomainError: {exc}"
            samples.append(row)
    return ResultDocument(
        "eval", _echo_with_resolved(spec), records=_records(basis), samples=samples
    )


def render(doc: ResultDocument, fmt: str) -> str:
    if fmt == "csv":
        if doc.command == "eval":
            return to_csv(doc.samples, ["n", "x", "h", "error"])
        return to_csv(doc.records, ["n", "lambda_n", "A_n", "I_n", "residual"])
    return doc.to_text()


def _points(text: str) -> list[float]:
    try:
        return [float(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise SpecParseError(f"--points: cannot parse {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="heun", description="Orthonormal Heun-function bases on [0, 1]."
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (
        ("eigs", "eigenvalues with closed-form norms"),
        ("verify", "cross-check a basis against quadrature and shooting"),
        ("eval", "tabulate normalized eigenfunctions"),
    ):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--spec", required=True, help="problem file (key = value lines)")
        p.add_argument("--out", help="write the result here instead of stdout")
        p.add_argument("--format", choices=FORMATS, help="override the problem file's format")
        if name == "eval":
            p.add_argument("--points", required=True, help="comma-separated x values")
        if name == "verify":
            p.add_argument("--corrupt-norm", type=float, help=argparse.SUPPRESS)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    t0 = time.perf_counter()
    try:
        with open(args.spec, encoding="utf-8") as fh:
            spec = parse_spec(fh.read())
        if args.command == "eigs":
            doc = cmd_eigs(spec)
        elif args.command == "verify":
            doc = cmd_verify(spec, corrupt_norm=args.corrupt_norm)
        else:
            doc = cmd_eval(spec, _points(args.points))
    except (OSError, SpecParseError) as exc:
        print(f"heun: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValidationError as exc:
        print(f"heun: invalid problem: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except SolverError as exc:
        print(f"heun: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    doc.timing = time.perf_counter() - t0
    text = render(doc, args.format or spec.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if doc.verification is not None and not doc.verification["passed"]:
        for msg in doc.verification["failures"]:
            print(f"heun: verification failed: {msg}", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
