"""Command-line interface: ``posgeom <command> input.json [options]``.

Exit status is 0 on success, 2 for unreadable input, 3 when the input is
outside the domain of the requested computation and 4 when a requested
verification fails.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field

from .algebra import format_rat, parse_rat
from .canonical import (adjoint_through_residual_points, canonical_form,
                        canonical_form_via_triangulation, dual_volume_at,
                        dual_volume_function, toric_amplitude, universal_adjoint,
                        verify_positive_geometry, warren_adjoint)
from .errors import DomainError, ParseError, PosGeomError, VerificationFailed
from .forms import residue_along_linear
from .polypol import (Polypol, adjoint_curve, canonical_form_polypol,
                      residual_arrangement, verify_polypol_geometry)
from .polytope import Polytope

COMMANDS = ("vertices", "canonical", "amplitude", "adjoint", "dualvol", "residue",
            "verify", "polypol-adjoint", "polypol-canonical")

EXIT_OK, EXIT_PARSE, EXIT_DOMAIN, EXIT_VERIFY = 0, 2, 3, 4


@dataclass
class RunConfig:
    command: str
    input_path: str
    output_format: str = "text"
    verify: bool = False
    triangulate: bool = False
    universal: bool = False
    interpolate: bool = False
    at_point: tuple | None = None
    names: tuple | None = None
    facet: int | None = None
    chart_matrix: tuple | None = None
    flip_orientation: bool = False


@dataclass
class Output:
    """A result in all three renderings plus the verification verdict."""
    text: list = field(default_factory=list)
    latex: list = field(default_factory=list)
    data: dict = field(default_factory=dict)
    verified: bool = True

    def add(self, key, text, latex=None, value=None):
        self.text.append(text)
        self.latex.append(latex if latex is not None else text)
        self.data[key] = value if value is not None else text


def _rat_list(text: str) -> tuple:
    try:
        return tuple(parse_rat(t.strip()) for t in text.split(",") if t.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad rational list {text!r}: {exc}") from None


def _load(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc.msg}, line {exc.lineno})") from None


def _point_text(p) -> str:
    return "(" + ", ".join(format_rat(c) for c in p) + ")"


def _point_json(p) -> list:
    return [format_rat(c) for c in p]


def _emit_verification(out: Output, report) -> None:
    out.text.append(report.to_text())
    out.latex.append(report.to_text())
    out.verified = report.passed
    if hasattr(report, "strata"):
        out.data["verification"] = {
            "passed": report.passed,
            "strata": [{"facets": list(s.facets), "dimension": s.dimension,
                        "passed": s.passed, "residue": s.residue, "sign": s.sign}
                       for s in report.strata],
        }
    else:
        out.data["verification"] = {
            "passed": report.passed,
            "checks": [{"stratum": c.stratum, "passed": c.passed, "detail": c.detail}
                       for c in report.checks],
        }


def _canonical_output(out: Output, res) -> None:
    out.add("form", res.to_text(), res.to_latex())
    out.data["numerator"] = res.numerator.to_text()
    out.data["denominator_factors"] = [f.to_text() for f in res.denominator_factors]


def _polytope(cfg: RunConfig) -> Polytope:
    return Polytope.from_json(_load(cfg.input_path))


def _polypol(cfg: RunConfig) -> Polypol:
    data = _load(cfg.input_path)
    if not isinstance(data, dict):
        raise ParseError("polypol JSON must be an object")
    return Polypol.from_json(data)


def _run_vertices(cfg, out):
    P = _polytope(cfg)
    out.text.extend(_point_text(v) for v in P.vertices)
    out.latex.extend(_point_text(v) for v in P.vertices)
    out.data.update(P.to_json())


def _run_canonical(cfg, out):
    P = _polytope(cfg)
    if cfg.triangulate:
        res = canonical_form_via_triangulation(P)
    else:
        res = canonical_form(P)
    _canonical_output(out, res)
    if cfg.verify:
        _emit_verification(out, verify_positive_geometry(
            P, res.form, flip_orientation=cfg.flip_orientation))


def _run_amplitude(cfg, out):
    P = _polytope(cfg)
    amp = toric_amplitude(P, cfg.names)
    out.add("amplitude", amp.to_text(), amp.to_latex())
    out.data["terms"] = len(amp)


def _run_adjoint(cfg, out):
    P = _polytope(cfg)
    if cfg.universal:
        ua = universal_adjoint(P, cfg.names)
        out.add("adjoint", ua.polynomial.to_text(), ua.polynomial.to_latex())
    elif cfg.interpolate:
        adj = adjoint_through_residual_points(P)
        out.add("adjoint", adj.to_text(), adj.to_latex())
    else:
        wa = warren_adjoint(P)
        out.add("adjoint", wa.polynomial.to_text(), wa.polynomial.to_latex())


def _run_dualvol(cfg, out):
    P = _polytope(cfg)
    if cfg.at_point is not None:
        v = dual_volume_at(P, cfg.at_point)
        out.add("dual_volume", format_rat(v))
    else:
        fn = dual_volume_function(P)
        out.add("dual_volume", fn.to_text(), fn.to_latex())


def _run_residue(cfg, out):
    P = _polytope(cfg)
    if cfg.facet is None or not 0 <= cfg.facet < P.n:
        raise DomainError(f"--facet must be an index in 0..{P.n - 1}")
    form = canonical_form(P).form
    eta, cmap = residue_along_linear(form, P.facet_form(cfg.facet),
                                     flip_orientation=cfg.flip_orientation)
    out.add("residue", eta.to_text(), eta.to_latex())
    out.data["chart"] = cmap.to_text()


def _run_verify(cfg, out):
    P = _polytope(cfg)
    _emit_verification(out, verify_positive_geometry(P, flip_orientation=cfg.flip_orientation))


def _run_polypol_adjoint(cfg, out):
    q = _polypol(cfg)
    ra = residual_arrangement(q)
    adj = adjoint_curve(q)
    for rp in ra.points:
        line = f"residual {rp.kind} {_point_text(rp.coords)}"
        out.text.append(line)
        out.latex.append(line)
    out.data["residual_points"] = [rp.to_json() for rp in ra.points]
    out.add("adjoint", adj.to_text(), adj.to_latex())


def _run_polypol_canonical(cfg, out):
    q = _polypol(cfg)
    M = None
    if cfg.chart_matrix is not None:
        M = [list(cfg.chart_matrix[3 * i:3 * i + 3]) for i in range(3)]
    res = canonical_form_polypol(q, chart_matrix=M, flip_orientation=cfg.flip_orientation)
    out.add("form", res.form.to_text(), res.form.to_latex())
    out.data["alpha"] = format_rat(res.alpha)
    out.data["adjoint"] = res.adjoint.to_text()
    out.text.append(f"alpha = {format_rat(res.alpha)}")
    out.latex.append(f"\\alpha = {format_rat(res.alpha)}")
    if cfg.verify:
        if M is not None:
            q = q.transform(M)
        _emit_verification(out, verify_polypol_geometry(q))


_RUNNERS = {
    "vertices": _run_vertices,
    "canonical": _run_canonical,
    "amplitude": _run_amplitude,
    "adjoint": _run_adjoint,
    "dualvol": _run_dualvol,
    "residue": _run_residue,
    "verify": _run_verify,
    "polypol-adjoint": _run_polypol_adjoint,
    "polypol-canonical": _run_polypol_canonical,
}


def emit(out: Output, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(out.data, indent=2, sort_keys=True)
    if fmt == "latex":
        return "\n".join(f"\\[ {line} \\]" if "\\" in line or "{" in line else line
                         for line in out.latex)
    return "\n".join(out.text)


def run(cfg: RunConfig) -> tuple:
    """Execute a command; returns ``(exit_status, stdout_text, stderr_text)``."""
    out = Output()
    try:
        _RUNNERS[cfg.command](cfg, out)
    except VerificationFailed as exc:
        return EXIT_VERIFY, "", f"verification failed: {exc}"
    except ParseError as exc:
        return EXIT_PARSE, "", f"parse error: {exc}"
    except DomainError as exc:
        return EXIT_DOMAIN, "", f"{type(exc).__name__}: {exc}"
    except PosGeomError as exc:
        return EXIT_DOMAIN, "", f"{type(exc).__name__}: {exc}"
    text = emit(out, cfg.output_format)
    status = EXIT_OK if out.verified else EXIT_VERIFY
    return status, text, "" if out.verified else "verification failed"


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="posgeom",
                                 description="Exact canonical forms of polytopes and polypols.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("input", help="JSON input file")
    fmt = ap.add_mutually_exclusive_group()
    fmt.add_argument("--format", choices=("text", "json", "latex"), default="text")
    fmt.add_argument("--json", dest="format", action="store_const", const="json")
    fmt.add_argument("--latex", dest="format", action="store_const", const="latex")
    ap.add_argument("--verify", action="store_true", help="append a residue verification report")
    ap.add_argument("--triangulate", action="store_true",
                    help="canonical form as a sum over a pulling triangulation")
    ap.add_argument("--universal", action="store_true", help="universal adjoint in facet variables")
    ap.add_argument("--interpolate", action="store_true",
                    help="adjoint by interpolation through the residual arrangement")
    ap.add_argument("--at", dest="at_point", metavar="Y1,...,YD",
                    help="evaluate the dual volume at an interior point")
    ap.add_argument("--names", help="comma-separated facet variable names")
    ap.add_argument("--facet", type=int, help="facet index for residue")
    ap.add_argument("--chart-matrix", metavar="M", help="9 rationals, row-major")
    ap.add_argument("--flip-orientation", action="store_true")
    return ap


def config_from_args(argv=None) -> RunConfig:
    ns = build_parser().parse_args(argv)
    cfg = RunConfig(ns.command, ns.input, ns.format, ns.verify, ns.triangulate,
                    ns.universal, ns.interpolate, facet=ns.facet,
                    flip_orientation=ns.flip_orientation)
    if ns.at_point is not None:
        cfg.at_point = _rat_list(ns.at_point)
    if ns.names is not None:
        cfg.names = tuple(n.strip() for n in ns.names.split(",") if n.strip())
    if ns.chart_matrix is not None:
        m = _rat_list(ns.chart_matrix.replace(" ", ","))
        if len(m) != 9:
            raise ParseError("--chart-matrix needs exactly 9 rationals")
        cfg.chart_matrix = m
    return cfg


def main(argv=None) -> int:
    try:
        cfg = config_from_args(argv)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    status, text, err = run(cfg)
    if text:
        print(text)
    if err:
        print(err, file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
