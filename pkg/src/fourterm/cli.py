"""Command line front end: table -> zeros -> locus checks -> reports and figures.

Exit codes: 0 pass, 1 a checked property failed, 2 usage or config error
(nothing written), 3 runtime failure such as the memory cap or roots that
did not converge.
"""

from __future__ import annotations

import argparse
import sys
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from . import analysis as an
from . import checks
from . import persist as ps
from .locus import BBox, LocusFunction, on_curve, three_term_curve_membership, trace_curve
from .rootfind import RootConfig, RootSet, find_roots
from .tablegen import (
    WORKED_EXAMPLE,
    ThreeTermEvaluator,
    TableTooLarge,
    build_H_table,
    build_R_table,
    build_table,
    collapse_sequences,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2, 3


@dataclass
class CommandOutcome:
    code: int
    summary: str
    artifacts: dict = field(default_factory=dict)
    paths: list = field(default_factory=list)


class RuntimeFailure(RuntimeError):
    """A numerical stage could not deliver (maps to exit 3)."""


def default_config() -> ps.RunConfig:
    return ps.RunConfig(triple=WORKED_EXAMPLE, M=50, N=30, sweep=(12, 12))


def _root_cfg(cfg: ps.RunConfig) -> RootConfig:
    return RootConfig(tol=cfg.root_tol, max_iters=cfg.max_iters, seed=cfg.seed)


def _need_triple(cfg: ps.RunConfig, what: str):
    if cfg.triple is None:
        raise ps.ConfigError(f"{what} needs a coefficient triple (A, B, C)")
    return cfg.triple


def _build(cfg: ps.RunConfig, M: int, N: int):
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        if cfg.numerator is not None:
            table = build_R_table(cfg.numerator, M, N)
        else:
            table = build_table(cfg.triple, M, N)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    return table


def _entry_roots(cfg: ps.RunConfig) -> tuple[int, int, RootSet]:
    m, n = cfg.entry
    if m > cfg.M or n > cfg.N:
        raise ps.ConfigError(f"entry ({m},{n}) is outside the table bounds M={cfg.M}, N={cfg.N}")
    table = _build(cfg, m, n)
    p = table[m, n]
    if p.is_zero():
        raise RuntimeFailure(f"entry ({m},{n}) is identically zero")
    return m, n, find_roots(p, _root_cfg(cfg), evaluator=table.evaluator(m, n))


def cmd_table(cfg: ps.RunConfig, args) -> CommandOutcome:
    table = _build(cfg, cfg.M, cfg.N)
    degs = [table[m, n].degree for m in range(cfg.M + 1) for n in range(cfg.N + 1)]
    finite = [d for d in degs if d >= 0]
    top = max(finite) if finite else "-inf"
    zeros = len(degs) - len(finite)
    summary = (f"table {table.kind.value} {cfg.M}x{cfg.N}: max degree {top}, "
               f"{table.total_coeffs()} coefficients, {zeros} zero entries")
    return CommandOutcome(EXIT_OK, summary, {"table.json": ps.table_to_json(table)})


def cmd_zeros(cfg: ps.RunConfig, args) -> CommandOutcome:
    m, n, rs = _entry_roots(cfg)
    name = f"zeros_{m}_{n}.csv"
    bad = int((~rs.converged).sum())
    summary = f"entry ({m},{n}): {len(rs)} zeros, max residual {rs.max_residual:.3g}"
    if bad:
        return CommandOutcome(EXIT_RUNTIME, summary + f", {bad} not converged", {name: ps.rootset_to_csv(rs)})
    return CommandOutcome(EXIT_OK, summary, {name: ps.rootset_to_csv(rs)})


VERIFY_HEADER = ["m", "n", "re", "im", "residual", "status"]


def cmd_verify(cfg: ps.RunConfig, args) -> CommandOutcome:
    lf = LocusFunction(_need_triple(cfg, "verify"))
    rows = []
    if getattr(args, "roots", None):
        try:
            with open(args.roots) as fh:
                rs = ps.rootset_from_csv(fh.read())
        except OSError as exc:
            raise ps.ConfigError(f"cannot read roots file: {exc}") from None
        except ValueError as exc:
            raise ps.ConfigError(f"roots file: {exc}") from None
        batches = [("", "", rs)]
    else:
        Ms, Ns = cfg.sweep_range
        table = _build(cfg, Ms, Ns)
        batches = []
        for m in range(Ms + 1):
            for n in range(Ns + 1):
                p = table[m, n]
                if p.is_zero() or p.degree < 1:
                    continue
                batches.append((m, n, find_roots(p, _root_cfg(cfg), evaluator=table.evaluator(m, n))))
    counts = {s: 0 for s in ("on", "off", "indeterminate", "unconverged")}
    for m, n, rs in batches:
        for z, res, ok in zip(rs.roots, rs.residuals, rs.converged):
            status = on_curve(lf, z, cfg.locus_tol).value if ok else "unconverged"
            counts[status] += 1
            rows.append((m, n, z.real, z.imag, res, status))
    checked = counts["on"] + counts["off"]
    summary = (f"verify: {checked} roots checked, {counts['off']} off the locus, "
               f"{counts['indeterminate']} indeterminate, {counts['unconverged']} unconverged")
    code = EXIT_FAIL if counts["off"] else EXIT_OK
    return CommandOutcome(code, summary, {"verify_report.csv": ps.rows_to_csv(VERIFY_HEADER, rows)})


def _auto_bbox(roots: np.ndarray) -> BBox:
    if roots.size == 0:
        return BBox(-1.0, 3.0, -2.0, 2.0)
    x0, x1 = roots.real.min(), roots.real.max()
    y0, y1 = roots.imag.min(), roots.imag.max()
    pad = 0.1 * max(x1 - x0, y1 - y0, 1.0)
    return BBox(x0 - pad, x1 + pad, y0 - pad, y1 + pad)


def figure_artifacts(cfg: ps.RunConfig) -> tuple[dict, str, bool]:
    lf = LocusFunction(_need_triple(cfg, "figure"))
    m, n, rs = _entry_roots(cfg)
    bbox = cfg.bbox or _auto_bbox(rs.roots)
    curve = trace_curve(lf, bbox, cfg.grid_step, cfg.trace_tol)
    if curve.is_empty():
        print("warning: no part of the locus inside the bounding box", file=sys.stderr)
    arts = {
        "figure.svg": ps.render_svg(curve, rs.roots, bbox, cfg.svg),
        "curve.csv": ps.curve_to_csv(curve),
        f"zeros_{m}_{n}.csv": ps.rootset_to_csv(rs),
    }
    summary = (f"figure: {len(curve.segments)} curve segments, {len(rs)} zeros of ({m},{n}), "
               f"max residual {rs.max_residual:.3g}")
    return arts, summary, rs.all_converged


def cmd_figure(cfg: ps.RunConfig, args) -> CommandOutcome:
    arts, summary, ok = figure_artifacts(cfg)
    return CommandOutcome(EXIT_OK if ok else EXIT_RUNTIME, summary, arts)


def cmd_run(cfg: ps.RunConfig, args) -> CommandOutcome:
    """Table, zeros of the selected entry, traced locus and figure in one go."""
    _need_triple(cfg, "run")
    table = _build(cfg, cfg.M, cfg.N)
    arts, summary, ok = figure_artifacts(cfg)
    arts["table.json"] = ps.table_to_json(table)
    return CommandOutcome(EXIT_OK if ok else EXIT_RUNTIME, summary, arts)


def cmd_checks(cfg: ps.RunConfig, args) -> CommandOutcome:
    triple = cfg.triple or WORKED_EXAMPLE
    sweep = min(cfg.sweep_range) if cfg.sweep is not None else 12
    results = checks.run_all(triple, seed=cfg.seed, sweep=sweep)
    failed = [r.name for r in results if not r.passed]
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.name} ({r.params}): max error {r.max_error:.3g}")
    summary = f"checks: {len(results) - len(failed)}/{len(results)} passed"
    if failed:
        summary += "; failed: " + ", ".join(failed)
    arts = {"checks.csv": ps.rows_to_csv(checks.HEADER, [r.row() for r in results])}
    return CommandOutcome(EXIT_FAIL if failed else EXIT_OK, summary, arts)


def cmd_density(cfg: ps.RunConfig, args) -> CommandOutcome:
    m = cfg.density_m
    if m < 1:
        raise ps.ConfigError("density_m must be at least 1")
    H = build_H_table(m, m)
    rs = find_roots(H[m, m], _root_cfg(cfg), evaluator=H.evaluator(m, m))
    if not rs.all_converged:
        raise RuntimeFailure(f"{int((~rs.converged).sum())} zeros of the diagonal entry did not converge")
    try:
        rows = an.density_report(rs.roots, an.MU, cfg.pairing_tol)
        ks = an.ks_distance(rs.roots, an.MU, cfg.pairing_tol)
    except an.NonRealZeroError as exc:
        return CommandOutcome(EXIT_FAIL, f"density: {exc}")
    gap = an.validate_mu_cdf()
    ok = ks <= cfg.ks_max and gap <= 1e-8
    summary = f"density: m={m}, KS distance {ks:.4f} (limit {cfg.ks_max}), closed-form CDF vs quadrature {gap:.2g}"
    arts = {"density.csv": ps.rows_to_csv(["x", "empirical_cdf", "model_cdf", "diff"], rows)}
    return CommandOutcome(EXIT_OK if ok else EXIT_FAIL, summary, arts)


SEQ_HEADER = ["N", "s_residual", "r_residual", "zeros", "on", "off", "indeterminate", "unconverged"]


def cmd_sequences(cfg: ps.RunConfig, args) -> CommandOutcome:
    triple = _need_triple(cfg, "sequences")
    N = cfg.sequences_N
    table = _build(cfg, N, N)
    _, R = collapse_sequences(table, N)
    D, C = triple.D, triple.C
    c_roots = find_roots(C).roots if not C.is_zero() and C.degree >= 1 else np.zeros(0, complex)
    residuals = {k: (s, r) for k, s, r, _ in checks.collapsed_residuals(triple, N, table)}
    rows, worst, off = [], 0.0, 0
    for k in range(N + 1):
        res = residuals.get(k, (0.0, 0.0))
        worst = max(worst, *res)
        tally = {s: 0 for s in ("on", "off", "indeterminate", "unconverged")}
        p = R[k]
        if not p.is_zero() and p.degree >= 1:
            rs = find_roots(p, _root_cfg(cfg), evaluator=ThreeTermEvaluator(D, C, k))
            for z, ok in zip(rs.roots, rs.converged):
                s = three_term_curve_membership(D, C, z, cfg.locus_tol, c_roots).value if ok else "unconverged"
                tally[s] += 1
            nz = len(rs)
        else:
            nz = 0
        off += tally["off"]
        rows.append((k, res[0], res[1], nz, tally["on"], tally["off"], tally["indeterminate"], tally["unconverged"]))
    ok = worst <= 1e-10 and off == 0
    summary = f"sequences: N<={N}, max recurrence residual {worst:.3g}, {off} zeros off the three-term curve"
    return CommandOutcome(EXIT_OK if ok else EXIT_FAIL, summary,
                          {"sequences.csv": ps.rows_to_csv(SEQ_HEADER, rows)})


COMMANDS = {
    "table": (cmd_table, "build the polynomial table and write table.json"),
    "zeros": (cmd_zeros, "all zeros of one entry"),
    "verify": (cmd_verify, "check zeros against the locus over a sweep"),
    "figure": (cmd_figure, "SVG and CSV of the traced locus with zeros"),
    "checks": (cmd_checks, "run the identity and property suite"),
    "density": (cmd_density, "KS distance of diagonal zeros against the limiting density"),
    "sequences": (cmd_sequences, "collapsed sequences: recurrences and three-term curve"),
    "run": (cmd_run, "table, zeros, traced locus and figure together"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--M", type=int, help="table rows")
    common.add_argument("--N", type=int, help="table columns")
    common.add_argument("--m", type=int, help="entry row")
    common.add_argument("--n", type=int, help="entry column")
    common.add_argument("--tol", type=float, dest="locus_tol", help="locus membership tolerance")
    common.add_argument("--root-tol", type=float, dest="root_tol", help="root residual tolerance")
    common.add_argument("--max-iters", type=int, dest="max_iters")
    common.add_argument("--pairing-tol", type=float, dest="pairing_tol")
    common.add_argument("--grid-step", type=float, dest="grid_step")
    common.add_argument("--sweep", type=int, nargs="+", metavar="K", help="sweep bound(s): K or M N")
    common.add_argument("--bbox", type=float, nargs=4, metavar=("XMIN", "XMAX", "YMIN", "YMAX"))
    common.add_argument("--density-m", type=int, dest="density_m")
    common.add_argument("--ks-max", type=float, dest="ks_max")
    common.add_argument("--sequences-N", type=int, dest="sequences_N")
    common.add_argument("--out", help="output directory")
    common.add_argument("--seed", type=int)
    common.add_argument("--svg-width", type=int, dest="width")
    common.add_argument("--svg-height", type=int, dest="height")
    common.add_argument("--stroke-width", type=float, dest="stroke_width")
    common.add_argument("--point-radius", type=float, dest="point_radius")

    parser = argparse.ArgumentParser(prog="fourterm", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, helptext) in COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=helptext)
        if name == "verify":
            p.add_argument("--roots", help="check the points in this roots CSV instead of sweeping")
    return parser


_SCALAR_FLAGS = ("M", "N", "m", "n", "locus_tol", "root_tol", "max_iters", "pairing_tol", "grid_step",
                 "density_m", "ks_max", "sequences_N", "out", "seed")


def resolve_config(args) -> ps.RunConfig:
    cfg = ps.load_config(args.config) if args.config else default_config()
    kw = {k: getattr(args, k) for k in _SCALAR_FLAGS}
    if args.sweep is not None:
        if len(args.sweep) not in (1, 2):
            raise ps.ConfigError("--sweep takes one or two integers")
        kw["sweep"] = tuple(args.sweep * 2)[:2] if len(args.sweep) == 1 else tuple(args.sweep)
    if args.bbox is not None:
        try:
            kw["bbox"] = BBox(*args.bbox)
        except ValueError as exc:
            raise ps.ConfigError(f"bbox: {exc}") from None
    style = {k: getattr(args, k) for k in ("width", "height", "stroke_width", "point_radius")
             if getattr(args, k) is not None}
    if style:
        kw["svg"] = replace(cfg.svg, **style)
    try:
        cfg = cfg.with_overrides(**kw)
    except TypeError as exc:
        raise ps.ConfigError(str(exc)) from None
    if cfg.triple is None and cfg.numerator is None:
        cfg = replace(cfg, triple=WORKED_EXAMPLE)
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    handler = COMMANDS[args.command][0]
    try:
        cfg = resolve_config(args)
        outcome = handler(cfg, args)
    except ps.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TableTooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except (RuntimeFailure, FloatingPointError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    if outcome.artifacts:
        try:
            ps.write_outputs(outcome.artifacts, cfg.out)
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_RUNTIME
        outcome.paths = [f"{cfg.out}/{name}" for name in sorted(outcome.artifacts)] + [f"{cfg.out}/manifest.json"]
    print(outcome.summary)
    for path in outcome.paths:
        print(f"wrote {path}")
    return outcome.code


if __name__ == "__main__":
    sys.exit(main())
