"""Command-line interface: ``tropdisc <command> --input map.json``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .classify import NotDominant, Unclassifiable, classify_all
from .curves import corner_locus
from .discriminant import CRITICAL, ESSENTIAL, NonGenericInput, analyze
from .io import DomainError, SchemaError, classification_table, emit_json, parse_map
from .newton import (
    NonIntegralLengths,
    ProbeSelectionFailed,
    dual_fan_from_rays,
    newton_solution,
)
from .oracle import proximity, sample_critical_valuations
from .overlay import overlay_of, validate_genericity
from .svg import Scene, Viewport, emit_figure, emit_svg

EXIT_OK, EXIT_SCHEMA, EXIT_NON_GENERIC, EXIT_NOT_DOMINANT, EXIT_ORACLE = 0, 2, 3, 4, 5
PROXIMITY_TARGET = 0.95


class OracleTolerance(RuntimeError):
    pass


def _t_values(text: str) -> tuple[float, ...]:
    try:
        ts = tuple(float(x) for x in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(
            f"not a comma-separated list of numbers: {text!r}"
        ) from exc
    if len(ts) < 2 or not all(0 < t < 1 for t in ts) or len(set(ts)) != len(ts):
        raise argparse.ArgumentTypeError("need at least two distinct values in (0, 1)")
    return ts


def _warn(message: str) -> None:
    print(f"tropdisc: {message}", file=sys.stderr)


def _check_generic(m, strict: bool) -> None:
    report = validate_genericity(m)
    if report.ok:
        return
    if strict:
        raise NonGenericInput(report.failures())
    for failure in report.failures():
        _warn(f"warning: {failure}")


def _analyze(m, args):
    result = analyze(m, args.lateral)
    if result.flagged:
        message = f"both half-line rules fire at cells {result.flagged}"
        if args.strict:
            raise NonGenericInput([message])
        _warn(f"warning: {message}")
    return result


def _relevant_regions(result) -> tuple:
    Xi = result.subdivision
    return tuple(
        c.geometry
        for c in Xi.of_dim(2)
        if result.classes[c.index].relevance in ("diagonal", "lateral")
    )


def _viewport(*groups) -> Viewport:
    pts = [p for group in groups for p in group]
    return Viewport.around(pts, pad=2)


def _discriminant_scene(result) -> tuple[Scene, Viewport]:
    S = result.plset
    return Scene(discriminant=S, title="Val(D(f))"), _viewport(S.vertices())


def _curves_scene(result) -> tuple[Scene, Viewport]:
    Xi = result.subdivision
    scene = Scene(curves=(Xi.T1, Xi.T2), shaded=_relevant_regions(result), title="T1, T2")
    return scene, _viewport(Xi.T1.vertices, Xi.T2.vertices)


def cmd_curve(m, args):
    _check_generic(m, args.strict)
    T1, T2 = corner_locus(m.f1)[0], corner_locus(m.f2)[0]
    if args.svg:
        return emit_svg(Scene(curves=(T1, T2)), _viewport(T1.vertices, T2.vertices))
    return emit_json({"f1": T1, "f2": T2})


def cmd_overlay(m, args):
    _check_generic(m, args.strict)
    return emit_json(overlay_of(m))


def cmd_classify(m, args):
    _check_generic(m, True)
    Xi = overlay_of(m)
    return emit_json(classification_table(Xi, classify_all(Xi)))


def cmd_phi(m, args):
    result = _analyze(m, args)
    return emit_json(classification_table(result.subdivision, result.classes, result.images))


def cmd_discriminant(m, args):
    result = _analyze(m, args)
    if args.svg:
        return emit_svg(*_discriminant_scene(result))
    return emit_json(result.plset)


def cmd_fan(m, args):
    result = _analyze(m, args)
    fan, families = dual_fan_from_rays(result.plset)
    return emit_json(
        {
            "fan": fan,
            "families": [
                {"direction": list(f.direction), "edge": list(f.u), "rays": len(f.rays)}
                for f in families
            ],
        }
    )


def cmd_newton(m, args):
    try:
        solution = newton_solution(m, m, lateral=args.lateral)
    except NonIntegralLengths as exc:
        if args.strict:
            raise NonGenericInput([str(exc)]) from exc
        _warn(f"warning: given valuations unusable ({exc}); resampling with seed {args.seed}")
        solution = newton_solution(m, seed=args.seed, lateral=args.lateral)
    return emit_json(solution)


def cmd_oracle(m, args):
    if not m.has_leads:
        raise DomainError("/", "the oracle needs a lead on every monomial")
    result = _analyze(m, args)
    cloud = sample_critical_valuations(m, args.t, seed=args.seed)
    fraction, count = proximity(cloud, result.plset) if not result.plset.is_empty else (1.0, 0)
    text = emit_json({"cloud": cloud, "proximity": fraction, "confident": count})
    if fraction < PROXIMITY_TARGET:
        raise OracleTolerance(
            f"only {fraction:.3f} of {count} confident points lie near the prediction", text
        )
    return text


def cmd_render(m, args):
    result = _analyze(m, args)
    return emit_figure([_curves_scene(result), _discriminant_scene(result)])


COMMANDS = {
    "curve": (cmd_curve, "tropical curves of both polynomials"),
    "overlay": (cmd_overlay, "cells of the overlay of the two curves"),
    "classify": (cmd_classify, "case label of every overlay cell"),
    "phi": (cmd_phi, "case labels together with the image of every cell"),
    "discriminant": (cmd_discriminant, "the tropical discriminant as points, segments and rays"),
    "fan": (cmd_fan, "dual fan read off the unbounded rays of the discriminant"),
    "newton": (cmd_newton, "Newton polygon of the discriminant polynomial"),
    "oracle": (cmd_oracle, "numerical valuations of critical values versus the prediction"),
    "render": (cmd_render, "two-panel SVG: curves with relevant cells, and the discriminant"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tropdisc", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text, description=help_text)
        p.add_argument("--input", required=True, type=Path, help="map document (JSON)")
        p.add_argument("--output", type=Path, help="write here instead of standard output")
        p.add_argument("--seed", type=int, default=0, help="random seed (oracle grid, resampling)")
        p.add_argument(
            "--t", type=_t_values, default=(1e-3, 1e-4), help='parameter values, e.g. "1e-3,1e-4"'
        )
        p.add_argument("--svg", action="store_true", help="SVG instead of JSON where supported")
        p.add_argument("--strict", action="store_true", help="fail on any genericity diagnostic")
        p.add_argument(
            "--lateral",
            choices=(ESSENTIAL, CRITICAL),
            default=ESSENTIAL,
            help="image rule for lateral 2-cells",
        )
    return parser


def _write(args, text: str) -> None:
    if args.output is None:
        sys.stdout.write(text)
    else:
        args.output.write_text(text, encoding="utf-8")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        m = parse_map(args.input.read_text(encoding="utf-8"))
        _write(args, COMMANDS[args.command][0](m, args))
    except OSError as exc:
        _warn(f"error: {exc}")
        return EXIT_SCHEMA
    except (SchemaError, DomainError) as exc:
        _warn(f"input error at {exc}")
        return EXIT_SCHEMA
    except (NonGenericInput, Unclassifiable, NonIntegralLengths, ProbeSelectionFailed) as exc:
        _warn(f"non-generic input: {exc}")
        return EXIT_NON_GENERIC
    except NotDominant as exc:
        _warn(f"map is not dominant: {exc}")
        return EXIT_NOT_DOMINANT
    except OracleTolerance as exc:
        message, text = exc.args
        _write(args, text)
        _warn(f"oracle tolerance: {message}")
        return EXIT_ORACLE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
