"""File formats, run configuration and hashed output manifests.

Every float is written so that parsing returns the identical double:
17 significant digits in CSV, shortest round-trip ``repr`` in JSON.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .locus import BBox, CurvePolyline
from .polycore import Poly, from_pairs, to_pairs
from .rootfind import RootSet
from .tablegen import CoefficientTriple, NumeratorSpec, PolyTable, TableKind

U64_MAX = 2**64 - 1


class ConfigError(ValueError):
    """Invalid run configuration; the message names the offending field."""


def fmt(x: float) -> str:
    return format(float(x), ".17g")


# ---------------------------------------------------------------- polynomials & tables

def poly_to_json(p: Poly) -> list:
    return to_pairs(p)


def poly_from_json(data) -> Poly:
    return from_pairs(data)


def _spec_to_json(spec) -> dict:
    if isinstance(spec, CoefficientTriple):
        return {"A": poly_to_json(spec.A), "B": poly_to_json(spec.B), "C": poly_to_json(spec.C)}
    I, J, K = spec.bounds
    return {"I": I, "J": J, "K": K, "a": spec.a.tolist()}


def _spec_from_json(kind: TableKind, data: dict):
    if kind is TableKind.GENERAL_R:
        return NumeratorSpec(np.array(data["a"], dtype=float))
    return CoefficientTriple(*(poly_from_json(data[k]) for k in "ABC"))


def table_to_dict(table: PolyTable) -> dict:
    return {
        "kind": table.kind.value,
        "M": table.M,
        "N": table.N,
        "spec": _spec_to_json(table.spec),
        "entries": [[poly_to_json(p) for p in row] for row in table.rows],
    }


def table_from_dict(data: dict) -> PolyTable:
    kind = TableKind(data["kind"])
    rows = tuple(tuple(poly_from_json(p) for p in row) for row in data["entries"])
    if len(rows) != data["M"] + 1 or any(len(r) != data["N"] + 1 for r in rows):
        raise ValueError("table entries do not match the declared M, N")
    return PolyTable(rows, kind, _spec_from_json(kind, data["spec"]))


def dumps_json(obj) -> str:
    return json.dumps(obj, separators=(",", ":"), allow_nan=False) + "\n"


def table_to_json(table: PolyTable) -> str:
    return dumps_json(table_to_dict(table))


def table_from_json(text: str) -> PolyTable:
    return table_from_dict(json.loads(text))


def poly_to_csv(p: Poly) -> str:
    buf = io.StringIO()
    buf.write("k,re,im\n")
    for k, c in enumerate(p.coeffs):
        buf.write(f"{k},{fmt(c.real)},{fmt(c.imag)}\n")
    return buf.getvalue()


# ---------------------------------------------------------------- root sets & curves

def rootset_to_csv(rs: RootSet) -> str:
    buf = io.StringIO()
    buf.write("re,im,residual,converged\n")
    for r, res, ok in zip(rs.roots, rs.residuals, rs.converged):
        buf.write(f"{fmt(r.real)},{fmt(r.imag)},{fmt(res)},{'true' if ok else 'false'}\n")
    return buf.getvalue()


def rootset_from_csv(text: str) -> RootSet:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames != ["re", "im", "residual", "converged"]:
        raise ValueError(f"unexpected root CSV header {reader.fieldnames}")
    roots, res, conv = [], [], []
    for row in reader:
        roots.append(complex(float(row["re"]), float(row["im"])))
        res.append(float(row["residual"]))
        if row["converged"] not in ("true", "false"):
            raise ValueError(f"bad converged flag {row['converged']!r}")
        conv.append(row["converged"] == "true")
    return RootSet(np.array(roots, dtype=complex), np.array(res), np.array(conv, dtype=bool), len(roots))


def curve_to_csv(curve: CurvePolyline) -> str:
    buf = io.StringIO()
    buf.write("segment_id,re,im\n")
    for sid, seg in enumerate(curve.segments):
        for z in seg:
            buf.write(f"{sid},{fmt(z.real)},{fmt(z.imag)}\n")
    return buf.getvalue()


def curve_from_csv(text: str) -> CurvePolyline:
    segs: dict[int, list] = {}
    for row in csv.DictReader(io.StringIO(text)):
        segs.setdefault(int(row["segment_id"]), []).append(complex(float(row["re"]), float(row["im"])))
    return CurvePolyline([segs[k] for k in sorted(segs)])


def rows_to_csv(header: list[str], rows) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        out = []
        for v in row:
            if isinstance(v, bool):
                out.append("true" if v else "false")
            elif isinstance(v, float):
                out.append(fmt(v))
            else:
                out.append(str(v))
        buf.write(",".join(out) + "\n")
    return buf.getvalue()


@dataclass(frozen=True)
class SvgStyle:
    width: int = 800
    height: int = 600
    stroke_width: float = 1.5
    point_radius: float = 2.5
    curve_color: str = "#1f77b4"
    point_color: str = "#d62728"


def render_svg(curve: CurvePolyline | None, points, bbox: BBox, style: SvgStyle = SvgStyle()) -> str:
    """Curve segments as paths and points as circles, y axis pointing up."""
    sx = style.width / (bbox.xmax - bbox.xmin)
    sy = style.height / (bbox.ymax - bbox.ymin)

    def xy(z):
        return f"{(z.real - bbox.xmin) * sx:.3f},{(bbox.ymax - z.imag) * sy:.3f}"

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{style.width}" height="{style.height}" '
        f'viewBox="0 0 {style.width} {style.height}">',
        f'<rect width="{style.width}" height="{style.height}" fill="white"/>',
    ]
    # axes through the origin when visible
    if bbox.ymin <= 0 <= bbox.ymax:
        y0 = bbox.ymax * sy
        out.append(f'<line x1="0" y1="{y0:.3f}" x2="{style.width}" y2="{y0:.3f}" stroke="#bbbbbb" stroke-width="0.5"/>')
    if bbox.xmin <= 0 <= bbox.xmax:
        x0 = -bbox.xmin * sx
        out.append(f'<line x1="{x0:.3f}" y1="0" x2="{x0:.3f}" y2="{style.height}" stroke="#bbbbbb" stroke-width="0.5"/>')
    if curve is not None:
        for seg in curve.segments:
            d = "M" + " L".join(xy(z) for z in seg)
            out.append(f'<path d="{d}" fill="none" stroke="{style.curve_color}" '
                       f'stroke-width="{style.stroke_width}"/>')
    for z in np.asarray(points, dtype=complex).ravel():
        if bbox.contains(z):
            cx, cy = xy(z).split(",")
            out.append(f'<circle cx="{cx}" cy="{cy}" r="{style.point_radius}" fill="{style.point_color}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------- run configuration

@dataclass(frozen=True)
class RunConfig:
    triple: CoefficientTriple | None = None
    numerator: NumeratorSpec | None = None
    M: int = 0
    N: int = 0
    m: int | None = None
    n: int | None = None
    root_tol: float = 1e-12
    max_iters: int = 500
    locus_tol: float = 1e-6
    pairing_tol: float = 1e-6
    trace_tol: float = 1e-10
    bbox: BBox | None = None
    grid_step: float = 0.01
    sweep: tuple[int, int] | None = None
    density_m: int = 150
    ks_max: float = 0.06
    sequences_N: int = 40
    out: str = "out"
    seed: int = 0
    svg: SvgStyle = field(default_factory=SvgStyle)

    @property
    def entry(self) -> tuple[int, int]:
        return (self.M if self.m is None else self.m, self.N if self.n is None else self.n)

    @property
    def sweep_range(self) -> tuple[int, int]:
        return self.sweep if self.sweep is not None else (self.M, self.N)

    def validate(self) -> "RunConfig":
        for name in ("root_tol", "locus_tol", "pairing_tol", "trace_tol", "grid_step", "ks_max"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise ConfigError(f"{name} must be a positive number, got {v!r}")
        for name in ("M", "N", "density_m", "sequences_N"):
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool) or v < 0:
                raise ConfigError(f"{name} must be a nonnegative integer, got {v!r}")
        if not isinstance(self.max_iters, int) or self.max_iters < 1:
            raise ConfigError(f"max_iters must be a positive integer, got {self.max_iters!r}")
        for name in ("m", "n"):
            v = getattr(self, name)
            if v is not None and (not isinstance(v, int) or isinstance(v, bool) or v < 0):
                raise ConfigError(f"{name} must be a nonnegative integer, got {v!r}")
        if self.sweep is not None and (len(self.sweep) != 2 or any(
                not isinstance(v, int) or isinstance(v, bool) or v < 0 for v in self.sweep)):
            raise ConfigError(f"sweep must be two nonnegative integers, got {self.sweep!r}")
        if not isinstance(self.seed, int) or isinstance(self.seed, bool) or not 0 <= self.seed <= U64_MAX:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        if self.triple is not None and self.numerator is not None:
            raise ConfigError("give either A/B/C or numerator, not both")
        return self

    def with_overrides(self, **kw) -> "RunConfig":
        kw = {k: v for k, v in kw.items() if v is not None}
        return replace(self, **kw).validate() if kw else self


_SCALAR_KEYS = {f.name for f in fields(RunConfig)} - {"triple", "numerator", "bbox", "svg", "sweep"}
_KNOWN_KEYS = _SCALAR_KEYS | {"A", "B", "C", "numerator", "bbox", "svg", "sweep"}


def _poly_field(name: str, data) -> Poly:
    if not isinstance(data, list):
        raise ConfigError(f"{name} must be a coefficient array")
    try:
        return from_pairs(data)
    except ValueError as exc:
        raise ConfigError(f"{name}: {exc}") from None


def config_from_dict(data: dict) -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    unknown = sorted(set(data) - _KNOWN_KEYS)
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")
    kw = {k: data[k] for k in _SCALAR_KEYS if k in data}
    has_abc = [k for k in "ABC" if k in data]
    if has_abc:
        if len(has_abc) != 3:
            raise ConfigError("A, B and C must be given together")
        kw["triple"] = CoefficientTriple(*(_poly_field(k, data[k]) for k in "ABC"))
    if "numerator" in data:
        try:
            kw["numerator"] = NumeratorSpec(np.array(data["numerator"], dtype=float))
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"numerator: {exc}") from None
    if "bbox" in data:
        b = data["bbox"]
        if not (isinstance(b, list) and len(b) == 4):
            raise ConfigError("bbox must be [xmin, xmax, ymin, ymax]")
        try:
            kw["bbox"] = BBox(*map(float, b))
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"bbox: {exc}") from None
    if "sweep" in data:
        s = data["sweep"]
        if isinstance(s, int) and not isinstance(s, bool):
            s = [s, s]
        if not isinstance(s, list):
            raise ConfigError("sweep must be an integer or [M, N]")
        kw["sweep"] = tuple(s)
    if "svg" in data:
        s = data["svg"]
        allowed = {f.name for f in fields(SvgStyle)}
        if not isinstance(s, dict) or set(s) - allowed:
            raise ConfigError(f"svg accepts only {sorted(allowed)}")
        kw["svg"] = SvgStyle(**s)
    if "out" in kw and not isinstance(kw["out"], str):
        raise ConfigError("out must be a path string")
    for k in ("root_tol", "locus_tol", "pairing_tol", "trace_tol", "grid_step", "ks_max"):
        if k in kw and isinstance(kw[k], int) and not isinstance(kw[k], bool):
            kw[k] = float(kw[k])
    return RunConfig(**kw).validate()


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return config_from_dict(data)


def config_to_dict(cfg: RunConfig) -> dict:
    out: dict = {}
    if cfg.triple is not None:
        out.update(_spec_to_json(cfg.triple))
    if cfg.numerator is not None:
        out["numerator"] = cfg.numerator.a.tolist()
    for name in sorted(_SCALAR_KEYS):
        v = getattr(cfg, name)
        if v is not None:
            out[name] = v
    if cfg.bbox is not None:
        out["bbox"] = list(cfg.bbox.as_tuple())
    if cfg.sweep is not None:
        out["sweep"] = list(cfg.sweep)
    out["svg"] = {f.name: getattr(cfg.svg, f.name) for f in fields(SvgStyle)}
    return out


# ---------------------------------------------------------------- outputs

def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def write_outputs(artifacts: dict[str, str | bytes], directory) -> dict:
    """Write ``artifacts`` (file name -> content) and a ``manifest.json`` listing their hashes."""
    directory = Path(directory)
    try:
        directory.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {directory}: {exc}") from exc
    entries = []
    for name in sorted(artifacts):
        content = artifacts[name]
        data = content.encode() if isinstance(content, str) else bytes(content)
        target = directory / name
        try:
            target.write_bytes(data)
        except OSError as exc:
            raise OSError(f"cannot write {target}: {exc}") from exc
        entries.append({"path": name, "sha256": sha256_hex(data), "bytes": len(data)})
    manifest = {"algorithm": "sha256", "files": entries}
    (directory / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return manifest
