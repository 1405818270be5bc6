"""Command-line front end: ``sobolev-markov <command> --config cfg.json``.

Exit codes: 0 success, 1 a ``verify`` assertion failed, 2 unparsable
arguments or configuration, 3 domain or precondition errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import warnings
from dataclasses import dataclass
from fractions import Fraction
from importlib import metadata

import mpmath

from . import acceptance
from .assoc import assoc_Snk, christoffel, verify_long_recurrence, verify_strel
from .errors import DomainError, InternalConsistencyError, SobolevError
from .exactpoly import DEFAULT_PREC, Poly, check_prec, format_poly
from .markov import convergence_report
from .measures import MeasureSpec
from .sobolev import MassTerm, SobolevProduct, check_sequential_order, zero_report

COMMANDS = ("check-order", "orth", "zeros", "assoc", "quadrature", "markov", "verify")
EXIT_OK, EXIT_VERIFY, EXIT_PARSE, EXIT_DOMAIN = 0, 1, 2, 3

ZEROS_COLUMNS = ("n", "kind", "value_re", "value_im", "enclosure_lo", "enclosure_hi")
RATES_COLUMNS = ("k", "z_re", "z_im", "n", "error", "ratio", "root_test", "predicted")


class ConfigError(ValueError):
    """The configuration file or a flag value cannot be parsed."""


def rat(v) -> str:
    """Rational as ``"p/q"`` (``"p"`` when integral)."""
    v = Fraction(v)
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def parse_rat(s, what: str) -> Fraction:
    if isinstance(s, bool) or isinstance(s, float):
        raise ConfigError(f"{what}: give rationals as strings or integers, not {s!r}")
    try:
        return Fraction(s)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"{what}: cannot parse {s!r} as a rational") from exc


@dataclass
class Config:
    weight: tuple = (Fraction(1),)
    masses: tuple = ()
    precision_bits: int = DEFAULT_PREC
    nmax: int = 10
    k: int = 1
    points: tuple = ()
    out_format: str = "text"
    out_path: str | None = None

    @classmethod
    def from_dict(cls, data: dict) -> "Config":
        if not isinstance(data, dict):
            raise ConfigError("the configuration must be a JSON object")
        cfg = cls()
        measure = data.get("measure", {})
        coeffs = measure.get("weight_coeffs", ["1"])
        if not isinstance(coeffs, list) or not coeffs:
            raise ConfigError("measure.weight_coeffs must be a nonempty list")
        cfg.weight = tuple(parse_rat(c, "weight_coeffs") for c in coeffs)
        masses = []
        for i, m in enumerate(data.get("masses", [])):
            if not isinstance(m, dict) or "c" not in m:
                raise ConfigError(f"masses[{i}] needs at least a 'c' entry")
            order = m.get("order", 0)
            if not isinstance(order, int) or isinstance(order, bool):
                raise ConfigError(f"masses[{i}].order must be an integer")
            lower = tuple(parse_rat(v, f"masses[{i}].lower") for v in m.get("lower", []))
            masses.append((parse_rat(m["c"], f"masses[{i}].c"), order, parse_rat(m.get("eta", "1"), f"masses[{i}].eta"), lower))
        cfg.masses = tuple(masses)
        for key in ("precision_bits", "nmax", "k"):
            if key in data:
                val = data[key]
                if not isinstance(val, int) or isinstance(val, bool):
                    raise ConfigError(f"{key} must be an integer")
                setattr(cfg, key, val)
        pts = []
        for p in data.get("points", []):
            try:
                pts.append((str(p["re"]), str(p.get("im", "0"))))
                mpmath.mpf(pts[-1][0]), mpmath.mpf(pts[-1][1])
            except (KeyError, TypeError, ValueError) as exc:
                raise ConfigError(f"bad point {p!r}") from exc
        cfg.points = tuple(pts)
        out = data.get("output", {})
        cfg.out_format = out.get("format", cfg.out_format)
        cfg.out_path = out.get("path")
        return cfg

    def to_dict(self) -> dict:
        d = {
            "measure": {"weight_coeffs": [rat(c) for c in self.weight]},
            "masses": [
                {"c": rat(c), "order": o, "eta": rat(e), **({"lower": [rat(v) for v in lw]} if lw else {})}
                for c, o, e, lw in self.masses
            ],
            "precision_bits": self.precision_bits,
            "nmax": self.nmax,
            "k": self.k,
            "points": [{"re": re, "im": im} for re, im in self.points],
        }
        return d

    def product(self) -> SobolevProduct:
        base = MeasureSpec(Poly(self.weight))
        return SobolevProduct(base, tuple(MassTerm(c, o, e, lw) for c, o, e, lw in self.masses))

    def ordered_product(self) -> SobolevProduct:
        """The product, refusing mass points on [-1, 1] (needed by rho and mu_rho)."""
        for c, *_ in self.masses:
            if abs(c) <= 1:
                raise DomainError(f"mass point {rat(c)} lies in [-1, 1]")
        return self.product()

    def mp_points(self) -> list:
        return [mpmath.mpc(re, im) if mpmath.mpf(im) != 0 else mpmath.mpf(re) for re, im in self.points]


def load_config(path: str | None) -> Config:
    if path is None:
        return Config()
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc
    return Config.from_dict(data)


def decimal(v, prec: int) -> str:
    digits = max(15, int(prec * 0.30103) - 3)
    return mpmath.nstr(v, digits, strip_zeros=False) if v is not None else ""


def provenance(cfg: Config) -> dict:
    try:
        version = metadata.version("artifact")
    except metadata.PackageNotFoundError:
        version = "unknown"
    return {
        "package": "artifact",
        "version": version,
        "mpmath": mpmath.__version__,
        "precision_bits": cfg.precision_bits,
        "tolerance": f"2^-{cfg.precision_bits // 2}",
    }


# ---------------------------------------------------------------------------
# commands; each returns (table rows, columns, summary lines, passed)


def cmd_check_order(cfg: Config):
    sp = cfg.product()
    v = check_sequential_order(sp.pairs(), (-1, 1))
    if v.ordered:
        rows = [{"position": i + 1, "c": rat(r), "order": nu} for i, (r, nu) in enumerate(v.arrangement)]
        summary = ["ordered", "arrangement: " + ", ".join(f"({rat(r)}, {nu})" for r, nu in v.arrangement)]
    else:
        h = v.hull_at_witness
        hull = f"{'[' if h.lo_closed else '('}{rat(h.lo)}, {rat(h.hi)}{']' if h.hi_closed else ')'}"
        rows = [{"witness_c": rat(v.witness[0]), "witness_order": v.witness[1], "hull": hull}]
        summary = ["not ordered", f"witness ({rat(v.witness[0])}, {v.witness[1]}) lies in {hull}"]
    return rows, None, summary, True


def cmd_orth(cfg: Config):
    sp = cfg.product()
    rows, summary = [], []
    for n in range(cfg.nmax + 1):
        S = sp.S(n)
        rows.append({"n": n, "coeffs": [rat(c) for c in S.coeffs], "norm2": rat(sp.norm2(n))})
        summary.append(f"S_{n} = {format_poly(S)}")
    return rows, None, summary, True


def cmd_zeros(cfg: Config):
    sp = cfg.product()
    prec = cfg.precision_bits
    rows, summary = [], []
    for n in range(1, cfg.nmax + 1):
        zr = zero_report(sp, n, prec, with_complex=True)
        for e in zr.entries:
            for _ in range(e.multiplicity):
                rows.append({
                    "n": n, "kind": e.kind, "value_re": decimal(e.value, prec), "value_im": "0",
                    "enclosure_lo": rat(e.enclosure.lo), "enclosure_hi": rat(e.enclosure.hi),
                })
        for z in zr.complex_roots:
            rows.append({
                "n": n, "kind": "complex", "value_re": decimal(mpmath.re(z), prec),
                "value_im": decimal(mpmath.im(z), prec), "enclosure_lo": "", "enclosure_hi": "",
            })
        summary.append(
            f"n={n}: {len(zr.interior)} interior, {len(zr.attracted)} near mass points, "
            f"{len(zr.other_real)} other real, {zr.complex_count} complex, "
            f"{zr.sign_change_count} sign changes on (-1,1)"
        )
    return rows, ZEROS_COLUMNS, summary, True


def cmd_assoc(cfg: Config):
    sp = cfg.ordered_product()
    k = cfg.k
    rows, summary = [], []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        for n in range(cfg.nmax + 1):
            P = assoc_Snk(sp, n, k)
            long_res = verify_long_recurrence(sp, n, k).coeff_norm1()
            strel = verify_strel(sp, n, k).coeff_norm1() if k >= 2 else None
            rows.append({
                "n": n, "k": k, "coeffs": [rat(c) for c in P.coeffs],
                "long_recurrence_residual": rat(long_res),
                "structure_relation_residual": None if strel is None else rat(strel),
            })
            extra = "" if strel is None else f", structure relation residual {rat(strel)}"
            summary.append(f"S^[{k}]_{n} = {format_poly(P)}; long recurrence residual {rat(long_res)}{extra}")
    return rows, None, summary, True


def cmd_quadrature(cfg: Config):
    sp = cfg.ordered_product()
    prec = cfg.precision_bits
    rule = christoffel(sp, cfg.nmax, prec)
    rows = [
        {"i": i + 1, "node": decimal(x, prec), "lambda": decimal(lam, prec), "s2plus": decimal(s, prec)}
        for i, (x, lam, s) in enumerate(zip(rule.nodes, rule.lambdas, rule.s2plus_at_nodes))
    ]
    summary = [
        f"n={rule.n}: {len(rule.nodes)} nodes, {rule.positive_count} positive coefficients "
        f"(bound n-(d+N)/2 = {rat(Fraction(2 * rule.n - sp.d - sp.N, 2))})",
        f"exact through degree {2 * rule.n - sp.d - sp.N - 1}",
    ]
    return rows, None, summary, True


def cmd_markov(cfg: Config):
    sp = cfg.ordered_product()
    prec = cfg.precision_bits
    pts = cfg.mp_points() or [mpmath.mpc(2, 1)]
    rep = convergence_report(sp, cfg.k, pts, range(1, cfg.nmax + 1), prec)
    rows = []
    for k, zr, zi, n, err, ratio, root, pred in rep.rows():
        rows.append({
            "k": k, "z_re": decimal(zr, prec), "z_im": decimal(zi, prec), "n": n,
            "error": decimal(err, prec), "ratio": decimal(ratio, prec),
            "root_test": decimal(root, prec), "predicted": decimal(pred, prec),
        })
    summary = [
        f"sup over K of 1/|phi| = {mpmath.nstr(rep.phi_inv_sup, 12)}; 1/sup |phi| = {mpmath.nstr(rep.inv_phi_sup, 12)}",
        f"max root test at n={rep.n_values[-1]}: {mpmath.nstr(rep.max_root_test(), 12)}",
    ]
    return rows, RATES_COLUMNS, summary, True


def cmd_verify(cfg: Config):
    sp = cfg.product() if cfg.masses else None
    results = acceptance.run_battery(sp, cfg.precision_bits)
    rows = [r.as_dict() for r in results]
    summary = []
    for r in results:
        summary.append(r.line(timing=False))
        summary.extend(f"    {d}" for d in r.details)
    return rows, None, summary, all(r.passed for r in results)


HANDLERS = {
    "check-order": cmd_check_order,
    "orth": cmd_orth,
    "zeros": cmd_zeros,
    "assoc": cmd_assoc,
    "quadrature": cmd_quadrature,
    "markov": cmd_markov,
    "verify": cmd_verify,
}


def render(command: str, cfg: Config, rows, columns, summary, passed) -> str:
    fmt = cfg.out_format
    if fmt == "json":
        doc = {
            "command": command,
            "config": cfg.to_dict(),
            "provenance": provenance(cfg),
            "passed": passed,
            "summary": summary,
            "rows": rows,
        }
        return json.dumps(doc, indent=2, sort_keys=False) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        for key, val in provenance(cfg).items():
            buf.write(f"# {key}: {val}\n")
        cols = list(columns) if columns else (list(rows[0]) if rows else [])
        writer = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n", extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            writer.writerow({c: (";".join(v) if isinstance(v, list) else v) for c, v in row.items()})
        return buf.getvalue()
    lines = [f"# {command}"] + [f"# {k}: {v}" for k, v in provenance(cfg).items()] + summary
    return "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sobolev-markov",
        description="Sobolev orthogonal polynomials with mass points off [-1, 1] and Markov-type approximation.",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="JSON configuration file")
    parser.add_argument("--nmax", type=int, help="largest degree (or n for quadrature)")
    parser.add_argument("--k", type=int, help="index of the associated polynomials / Markov function")
    parser.add_argument("--prec", type=int, help="working precision in bits (>= 64)")
    parser.add_argument("--out", help="write the report to this file instead of stdout")
    parser.add_argument("--format", choices=("text", "csv", "json"), help="report format")
    return parser


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else EXIT_OK
    try:
        cfg = load_config(args.config)
        for flag, attr in (("nmax", "nmax"), ("k", "k"), ("prec", "precision_bits")):
            val = getattr(args, flag)
            if val is not None:
                setattr(cfg, attr, val)
        if args.format:
            cfg.out_format = args.format
        if args.out:
            cfg.out_path = args.out
        if cfg.out_format not in ("text", "csv", "json"):
            raise ConfigError(f"unknown output format {cfg.out_format!r}")
        if cfg.nmax < 0 or cfg.k < 0:
            raise ConfigError("nmax and k must be nonnegative")
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        check_prec(cfg.precision_bits)
        with mpmath.workprec(cfg.precision_bits):
            rows, columns, summary, passed = HANDLERS[args.command](cfg)
            text = render(args.command, cfg, rows, columns, summary, passed)
    except InternalConsistencyError as exc:
        print(f"internal consistency failure: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except (SobolevError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    if cfg.out_path:
        with open(cfg.out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return EXIT_OK if passed else EXIT_VERIFY


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
