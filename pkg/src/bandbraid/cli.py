"""Batch command-line front end.

Subcommands: spectrum | simulate | winding | braid | invariants |
phase-diagram | torus-export | plot. Every command writes a run manifest
(manifest.json) next to its outputs; rerunning with --config MANIFEST
reproduces them. Outputs are CSV tables, plain-text summaries, and
deterministic SVG plots.
"""
from __future__ import annotations

import argparse
import itertools
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__, braidtrace, circuit, knots, pipeline, reconstruct, twister
from .errors import BandbraidError, ConfigError, ProtocolError
from .twister import TwisterSpec


# -- helpers -------------------------------------------------------------------

def _fmt(x: float) -> str:
    return repr(float(x))


def write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) if isinstance(v, float) else str(v) for v in row) + "\n")


def read_csv(path) -> tuple[list[str], list[list[str]]]:
    with open(path) as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    if not lines:
        raise ConfigError(f"empty table: {path}")
    header = lines[0].split(",")
    return header, [ln.split(",") for ln in lines[1:]]


def write_manifest(out: Path, command: str, args: argparse.Namespace, outputs: list[str]) -> None:
    manifest = {
        "tool": "bandbraid",
        "version": __version__,
        "command": command,
        "args": {k: v for k, v in vars(args).items()
                 if k not in ("func", "command") and v is not None},
        "outputs": outputs,
    }
    with open(out / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def spec_from_args(args) -> TwisterSpec:
    model = args.model
    if model == "custom":
        if args.spec_json is None:
            raise ConfigError("--model custom requires --spec-json")
        return TwisterSpec.from_dict(json.loads(args.spec_json))
    n_bands = 2 if model == "2band" else 4
    if args.m0 is None or args.m1 is None:
        raise ConfigError("--m0 and --m1 are required")
    return TwisterSpec.concrete(n_bands, args.m0, args.m1)


def shot_config(args) -> circuit.ShotConfig:
    mode = "exact" if args.exact else "sampled"
    return circuit.ShotConfig(shots=args.shots, seed=args.seed, mode=mode)


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


# -- SVG plotting ---------------------------------------------------------------

SVG_W, SVG_H, SVG_PAD = 640, 420, 50
_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
            "#17becf", "#e377c2", "#7f7f7f", "#bcbd22")


def _svg_open(title: str) -> list[str]:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_W}" height="{SVG_H}" '
        f'viewBox="0 0 {SVG_W} {SVG_H}">',
        f'<title>{title}</title>',
        f'<rect width="{SVG_W}" height="{SVG_H}" fill="white"/>',
    ]


def _scale(vals, lo_pix, hi_pix):
    vmin, vmax = min(vals), max(vals)
    if vmax - vmin < 1e-12:
        vmin, vmax = vmin - 1.0, vmax + 1.0
    span = vmax - vmin

    def to_pix(v):
        return lo_pix + (v - vmin) / span * (hi_pix - lo_pix)

    return to_pix, vmin, vmax


def svg_winding(curves: dict, levels: list[float], markers: list[tuple[float, float]]) -> str:
    """Winding traces with dashed crossing levels and crossing markers."""
    parts = _svg_open("winding traces")
    all_y = [v for (_, ys) in curves.values() for v in ys] + list(levels)
    all_x = [x for (xs, _) in curves.values() for x in xs]
    to_x, *_ = _scale(all_x or [0, 1], SVG_PAD, SVG_W - SVG_PAD)
    to_y, *_ = _scale(all_y or [0, 1], SVG_H - SVG_PAD, SVG_PAD)
    for lev in levels:
        y = to_y(lev)
        parts.append(f'<line x1="{SVG_PAD}" y1="{y:.2f}" x2="{SVG_W - SVG_PAD}" '
                     f'y2="{y:.2f}" stroke="black" stroke-dasharray="6,4" stroke-width="1"/>')
    for ci, (name, (xs, ys)) in enumerate(sorted(curves.items())):
        pts = " ".join(f"{to_x(x):.2f},{to_y(y):.2f}" for x, y in zip(xs, ys))
        color = _PALETTE[ci % len(_PALETTE)]
        parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        parts.append(f'<text x="{SVG_W - SVG_PAD + 4}" y="{to_y(ys[-1]):.2f}" '
                     f'font-size="11" fill="{color}">{name}</text>')
    for (kx, wy) in markers:
        parts.append(f'<circle cx="{to_x(kx):.2f}" cy="{to_y(wy):.2f}" r="4" '
                     f'fill="none" stroke="black" stroke-width="1.2"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def svg_braid(word: braidtrace.BraidWord) -> str:
    """Schematic braid diagram: strands bottom to top, one generator per row."""
    parts = _svg_open("braid diagram")
    n = word.strand_count
    m = max(1, len(word.generators))
    xs = [SVG_PAD + i * (SVG_W - 2 * SVG_PAD) / max(1, n - 1) for i in range(n)]
    ys = [SVG_H - SVG_PAD - t * (SVG_H - 2 * SVG_PAD) / m for t in range(m + 1)]
    pos = list(range(n))
    segs = {s: [(xs[s], ys[0])] for s in range(n)}
    for t, (idx, sign) in enumerate(word.generators):
        p = idx - 1
        a, b = pos[p], pos[p + 1]
        for s in range(n):
            cur = segs[s][-1][0]
            if s == a:
                segs[s].append((xs[p + 1], ys[t + 1]))
            elif s == b:
                segs[s].append((xs[p], ys[t + 1]))
            else:
                segs[s].append((cur, ys[t + 1]))
        pos[p], pos[p + 1] = pos[p + 1], pos[p]
        label = f"s{idx}" + ("" if sign > 0 else "^-1")
        parts.append(f'<text x="{SVG_W - SVG_PAD + 6}" y="{(ys[t] + ys[t + 1]) / 2:.2f}" '
                     f'font-size="11">{label}</text>')
    for s in range(n):
        pts = " ".join(f"{x:.2f},{y:.2f}" for x, y in segs[s])
        color = _PALETTE[s % len(_PALETTE)]
        parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="2" points="{pts}"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def svg_torus(curves: list) -> str:
    """Isometric projection of torus-embedded band curves."""
    parts = _svg_open("torus embedding")
    proj = []
    for pts in curves:
        p2 = [(x - 0.5 * z, -(y * 0.6 + 0.8 * z)) for (x, y, z) in pts]
        proj.append(p2)
    allx = [p[0] for c in proj for p in c] or [0, 1]
    ally = [p[1] for c in proj for p in c] or [0, 1]
    to_x, *_ = _scale(allx, SVG_PAD, SVG_W - SVG_PAD)
    to_y, *_ = _scale(ally, SVG_H - SVG_PAD, SVG_PAD)
    for ci, c in enumerate(proj):
        pts = " ".join(f"{to_x(x):.2f},{to_y(y):.2f}" for x, y in c)
        parts.append(f'<polyline fill="none" stroke="{_PALETTE[ci % len(_PALETTE)]}" '
                     f'stroke-width="1.5" points="{pts}"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


# -- commands -------------------------------------------------------------------

def cmd_spectrum(args) -> int:
    out = _out_dir(args)
    spec = spec_from_args(args)
    grid = pipeline.k_grid(args.k_points)
    traj, _, _ = braidtrace.spectrum_trajectories(spec, grid)
    rows = []
    for ki, k in enumerate(grid):
        if spec.is_concrete():
            if spec.n_bands == 2:
                analytic = twister.analytic_spectrum_2band(spec.m0, spec.m1, k)
            else:
                analytic = twister.analytic_spectrum_4band(spec.m0, spec.m1, k)
            analytic = _match_sets(traj.lambdas[ki], np.asarray(analytic))
        else:
            analytic = traj.lambdas[ki]
        for b in range(spec.n_bands):
            e = traj.lambdas[ki][b]
            rows.append([float(k), b, float(e.real), float(e.imag),
                         float(analytic[b].real), float(analytic[b].imag)])
    path = out / "spectrum.csv"
    write_csv(path, ["k", "band", "re_e", "im_e", "re_e_analytic", "im_e_analytic"], rows)
    write_manifest(out, "spectrum", args, [path.name])
    print(f"wrote {path}")
    return 0


def _match_sets(reference: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Reorder `values` to minimize distance to `reference` entrywise."""
    out = np.empty_like(reference)
    remaining = list(range(len(values)))
    for i, r in enumerate(reference):
        j = min(remaining, key=lambda jj: abs(values[jj] - r))
        out[i] = values[j]
        remaining.remove(j)
    return out


def _result_summary(res: pipeline.SimulationResult) -> str:
    lines = [
        f"model: {res.spec.n_bands}-band twister  m0={res.spec.m0}  m1={res.spec.m1}",
        f"k-points: {len(res.k_grid)}  t: {res.t}  mode: {res.cfg.mode}"
        + (f"  shots: {res.cfg.shots}  seed: {res.cfg.seed}" if res.cfg.mode == "sampled" else ""),
        f"source: {res.source}",
        f"records: {len(res.records)}",
        f"permutation: {[i + 1 for i in res.permutation.mapping]} (order {res.permutation.order})",
        "winding matrix:",
    ]
    for row in np.atleast_2d(res.winding):
        lines.append("  " + "  ".join(f"{v:+.3f}" for v in row))
    if res.braid_word is not None:
        lines.append(f"braid word: {res.braid_word}")
        lines.append(f"writhe: {res.writhe}")
        lines.append(f"alexander: {res.alexander}")
        lines.append(f"jones: {res.jones}")
    else:
        lines.append(f"braid word: unavailable ({res.braid_error})")
    if res.knot_class is not None:
        lines.append(f"class: {res.knot_class.value}")
    return "\n".join(lines) + "\n"


def _winding_rows(res: pipeline.SimulationResult):
    rows = []
    for (i, j) in res.shifted.pairs:
        ws = res.shifted.w[(i, j)]
        for ki, k in enumerate(res.k_grid):
            rows.append([float(k), i + 1, j + 1, float(ws[ki])])
    return rows


def _run_from_args(args) -> pipeline.SimulationResult:
    spec = spec_from_args(args)
    return pipeline.run_simulation(
        spec, k_points=args.k_points, t=args.t, cfg=shot_config(args),
        source=args.source, workers=args.workers)


def cmd_simulate(args) -> int:
    out = _out_dir(args)
    res = _run_from_args(args)
    outputs = []
    rec_path = out / "records.jsonl"
    circuit.save_records(rec_path, res.records)
    outputs.append(rec_path.name)
    if res.states:
        st_path = out / "states.txt"
        reconstruct.save_states(st_path, itertools.chain.from_iterable(res.states))
        outputs.append(st_path.name)
    w_path = out / "winding.csv"
    write_csv(w_path, ["k", "band_i", "band_j", "w_shifted"], _winding_rows(res))
    outputs.append(w_path.name)
    c_path = out / "crossings.csv"
    write_csv(c_path, ["k", "band_i", "band_j", "r", "level"],
              [[e.k, e.pair[0] + 1, e.pair[1] + 1, e.r, e.level] for e in res.crossings.events])
    outputs.append(c_path.name)
    s_path = out / "summary.txt"
    s_path.write_text(_result_summary(res))
    outputs.append(s_path.name)
    write_manifest(out, "simulate", args, outputs)
    print(_result_summary(res), end="")
    return 0


def cmd_winding(args) -> int:
    out = _out_dir(args)
    res = _run_from_args(args)
    w_path = out / "winding.csv"
    write_csv(w_path, ["k", "band_i", "band_j", "w_shifted"], _winding_rows(res))
    m_path = out / "winding_matrix.csv"
    write_csv(m_path, [f"band_{j + 1}" for j in range(res.spec.n_bands)],
              [[float(v) for v in row] for row in res.winding])
    write_manifest(out, "winding", args, [w_path.name, m_path.name])
    print(f"wrote {w_path} and {m_path}")
    return 0


def cmd_braid(args) -> int:
    out = _out_dir(args)
    res = _run_from_args(args)
    b_path = out / "braid.txt"
    if res.braid_word is None:
        raise ProtocolError(res.braid_error or "braid extraction failed")
    b_path.write_text(str(res.braid_word) + "\n")
    write_manifest(out, "braid", args, [b_path.name])
    print(str(res.braid_word))
    return 0


def cmd_invariants(args) -> int:
    out = _out_dir(args)
    try:
        word = braidtrace.BraidWord.parse(args.word, args.strands)
    except (BandbraidError, ValueError) as exc:
        raise ConfigError(f"bad braid word {args.word!r}: {exc}") from None
    lines = [
        f"word: {word}",
        f"strands: {word.strand_count}",
        f"writhe: {knots.writhe(word)}",
        f"components: {knots.braid_permutation_cycles(word)}",
        f"alexander: {knots.alexander(word)}",
        f"kauffman bracket: {knots.kauffman_bracket(word).str_a()}",
        f"jones: {knots.jones(word)}",
    ]
    try:
        lines.append(f"class: {knots.classify_link(word).value}")
    except BandbraidError as exc:
        lines.append(f"class: unclassified ({exc})")
    text = "\n".join(lines) + "\n"
    path = out / "invariants.txt"
    path.write_text(text)
    write_manifest(out, "invariants", args, [path.name])
    print(text, end="")
    return 0


def cmd_phase_diagram(args) -> int:
    out = _out_dir(args)
    classify = (twister.phase_region_2band if args.model == "2band"
                else twister.phase_region_4band)
    m0s = np.linspace(args.m0_min, args.m0_max, args.resolution)
    m1s = np.linspace(args.m1_min, args.m1_max, args.resolution)
    rows = []
    for m0 in m0s:
        for m1 in m1s:
            try:
                region = classify(float(m0), float(m1))
                label = region.label.value
            except BandbraidError:
                label = "boundary"
            rows.append([float(m0), float(m1), label])
    path = out / "phase_diagram.csv"
    write_csv(path, ["m0", "m1", "label"], rows)
    write_manifest(out, "phase-diagram", args, [path.name])
    print(f"wrote {path} ({len(rows)} cells)")
    return 0


def cmd_torus_export(args) -> int:
    out = _out_dir(args)
    grid = pipeline.k_grid(args.k_points)
    rows = []
    for j in range(args.n):
        for k in grid:
            x, y, z = twister.torus_embedding(args.n, args.v, j, float(k))
            rows.append([float(k), j, float(x), float(y), float(z)])
    path = out / "torus.csv"
    write_csv(path, ["k", "band", "x", "y", "z"], rows)
    write_manifest(out, "torus-export", args, [path.name])
    print(f"wrote {path}")
    return 0


def cmd_plot(args) -> int:
    out = _out_dir(args)
    outputs = []
    if args.winding:
        header, rows = read_csv(args.winding)
        curves: dict[str, tuple[list, list]] = {}
        for row in rows:
            k, i, j, w = float(row[0]), row[1], row[2], float(row[3])
            name = f"W{i}{j}"
            curves.setdefault(name, ([], []))
            curves[name][0].append(k)
            curves[name][1].append(w)
        markers = []
        levels: list[float] = []
        if args.crossings:
            _, crows = read_csv(args.crossings)
            markers = [(float(r[0]), float(r[4])) for r in crows]
            levels = sorted({float(r[4]) for r in crows})
        if not levels:
            levels = [0.25, 0.75]
        path = out / "winding.svg"
        path.write_text(svg_winding(curves, levels, markers))
        outputs.append(path.name)
    if args.braid_word:
        word = braidtrace.BraidWord.parse(args.braid_word, args.strands)
        path = out / "braid.svg"
        path.write_text(svg_braid(word))
        outputs.append(path.name)
    if args.torus:
        _, rows = read_csv(args.torus)
        by_band: dict[int, list] = {}
        for r in rows:
            by_band.setdefault(int(r[1]), []).append((float(r[2]), float(r[3]), float(r[4])))
        path = out / "torus.svg"
        path.write_text(svg_torus([by_band[b] for b in sorted(by_band)]))
        outputs.append(path.name)
    if not outputs:
        raise ConfigError("nothing to plot: pass --winding, --braid-word, or --torus")
    write_manifest(out, "plot", args, outputs)
    print("wrote " + ", ".join(str(out / o) for o in outputs))
    return 0


# -- argument parsing -------------------------------------------------------------

def _add_model_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--model", choices=("2band", "4band", "custom"), default="2band")
    p.add_argument("--m0", type=float)
    p.add_argument("--m1", type=float)
    p.add_argument("--spec-json", help="TwisterSpec as JSON (with --model custom)")


def _add_run_args(p: argparse.ArgumentParser) -> None:
    _add_model_args(p)
    p.add_argument("--k-points", type=int, default=pipeline.DEFAULT_K_POINTS)
    p.add_argument("--t", type=float, default=pipeline.DEFAULT_T)
    p.add_argument("--shots", type=int, default=circuit.DEFAULT_SHOTS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--exact", action="store_true", help="exact mode (no shot sampling)")
    p.add_argument("--source", choices=("protocol", "spectrum"), default="protocol")
    p.add_argument("--workers", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bandbraid",
                                 description="knotted non-Hermitian band simulations")
    ap.add_argument("--config", help="JSON file with argument values (a manifest works)")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="band structure table")
    _add_model_args(p)
    p.add_argument("--k-points", type=int, default=pipeline.DEFAULT_K_POINTS)
    p.add_argument("--out", default="out")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("simulate", help="full measurement-to-invariants chain")
    _add_run_args(p)
    p.add_argument("--out", default="out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("winding", help="winding traces and matrix")
    _add_run_args(p)
    p.add_argument("--out", default="out")
    p.set_defaults(func=cmd_winding)

    p = sub.add_parser("braid", help="extract the braid word")
    _add_run_args(p)
    p.add_argument("--out", default="out")
    p.set_defaults(func=cmd_braid)

    p = sub.add_parser("invariants", help="knot polynomials of a braid word")
    p.add_argument("--word", required=True, help='e.g. "s1 s3 s2 s1 s3 s2"')
    p.add_argument("--strands", type=int, required=True)
    p.add_argument("--out", default="out")
    p.set_defaults(func=cmd_invariants)

    p = sub.add_parser("phase-diagram", help="raster of knot/link classes")
    p.add_argument("--model", choices=("2band", "4band"), default="2band")
    p.add_argument("--m0-min", type=float, default=-3.0)
    p.add_argument("--m0-max", type=float, default=3.0)
    p.add_argument("--m1-min", type=float, default=-3.0)
    p.add_argument("--m1-max", type=float, default=3.0)
    p.add_argument("--resolution", type=int, default=50)
    p.add_argument("--out", default="out")
    p.set_defaults(func=cmd_phase_diagram)

    p = sub.add_parser("torus-export", help="torus-embedded band curves")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--v", type=int, required=True)
    p.add_argument("--k-points", type=int, default=pipeline.DEFAULT_K_POINTS)
    p.add_argument("--out", default="out")
    p.set_defaults(func=cmd_torus_export)

    p = sub.add_parser("plot", help="SVG figures from tables")
    p.add_argument("--winding", help="winding.csv from simulate/winding")
    p.add_argument("--crossings", help="crossings.csv from simulate")
    p.add_argument("--braid-word", help='braid word text, e.g. "s1 s1"')
    p.add_argument("--strands", type=int, default=2)
    p.add_argument("--torus", help="torus.csv from torus-export")
    p.add_argument("--out", default="out")
    p.set_defaults(func=cmd_plot)
    return ap


def _apply_config(argv: list[str]) -> list[str]:
    """Fold --config FILE values in as defaults (command line wins)."""
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    path = argv[i + 1]
    rest = argv[:i] + argv[i + 2:]
    with open(path) as fh:
        data = json.load(fh)
    stored = data.get("args", data)
    command = data.get("command")
    out: list[str] = []
    if command and (not rest or rest[0].startswith("-")):
        out.append(command)
    out.extend(rest)
    for key, val in stored.items():
        flag = "--" + key.replace("_", "-")
        if flag in out:
            continue
        if isinstance(val, bool):
            if val:
                out.append(flag)
        else:
            out.extend([flag, str(val)])
    return out


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        argv = _apply_config(argv)
        args = build_parser().parse_args(argv)
        return args.func(args)
    except BandbraidError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ConfigError.exit_code


if __name__ == "__main__":
    sys.exit(main())
