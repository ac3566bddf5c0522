"""Render figure-reproduction plots from ionmbqc CSV artifacts.

Read-only consumer: every number plotted comes straight out of the input
files; the only transformations applied are plotting projections.  Output
images are deterministic for fixed inputs (Agg backend, pinned fonts, no
timestamps in the PNG metadata).

Kinds:
  bloch       single-qubit pattern outputs on the Bloch sphere
              (gates CSV: alpha,beta,gamma,x,y,z,oracle_fidelity)
  atf-curves  teleportation-fidelity curves vs flip probability, one curve
              per code length (one or more qec CSVs: n,p,input,fidelity,atf,atf_ideal)
  dm-bars     density-matrix bar charts (rho CSV: row,col,re,im)
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

SCHEMA_LINE = "# schema=1"
KINDS = ("bloch", "atf-curves", "dm-bars")

matplotlib.rcParams.update({
    "font.family": "DejaVu Sans",
    "figure.dpi": 100,
    "savefig.dpi": 100,
})


class PlotError(ValueError):
    pass


@dataclass(frozen=True)
class PlotJob:
    kind: str
    inputs: tuple[str, ...]
    output: str

    def __post_init__(self):
        if self.kind not in KINDS:
            raise PlotError(f"unknown figure kind {self.kind!r}")
        if not self.inputs:
            raise PlotError("at least one input file required")


def read_schema_csv(path: str | Path) -> tuple[list[str], list[list[str]]]:
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0].strip() != SCHEMA_LINE:
        raise PlotError(f"{path}: missing or mismatched schema header")
    rows = list(csv.reader(lines[1:]))
    if len(rows) < 2:
        raise PlotError(f"{path}: no data rows")
    return rows[0], rows[1:]


def _columns(header: list[str], rows: list[list[str]], wanted: list[str]) -> dict:
    missing = [c for c in wanted if c not in header]
    if missing:
        raise PlotError(f"missing columns {missing}")
    idx = {c: header.index(c) for c in wanted}
    return {c: [r[i] for r in rows] for c, i in idx.items()}


def build_bloch(paths) -> plt.Figure:
    header, rows = read_schema_csv(paths[0])
    cols = _columns(header, rows, ["x", "y", "z"])
    xs = np.array([float(v) for v in cols["x"]])
    ys = np.array([float(v) for v in cols["y"]])
    zs = np.array([float(v) for v in cols["z"]])
    fig = plt.figure(figsize=(5, 5))
    ax = fig.add_subplot(projection="3d")
    u = np.linspace(0, 2 * np.pi, 24)
    v = np.linspace(0, np.pi, 12)
    sx = np.outer(np.cos(u), np.sin(v))
    sy = np.outer(np.sin(u), np.sin(v))
    sz = np.outer(np.ones_like(u), np.cos(v))
    ax.plot_wireframe(sx, sy, sz, color="0.85", linewidth=0.4)
    ax.scatter(xs, ys, zs, c=range(len(xs)), cmap="viridis", s=60, depthshade=False)
    for axis, lbl in ((1, 0, 0), "x"), ((0, 1, 0), "y"), ((0, 0, 1), "z"):
        ax.quiver(0, 0, 0, *axis, color="0.4", arrow_length_ratio=0.08)
        ax.text(*(1.25 * np.array(axis)), lbl)
    ax.set_box_aspect((1, 1, 1))
    ax.set_axis_off()
    return fig


def build_atf_curves(paths) -> plt.Figure:
    fig, ax = plt.subplots(figsize=(6, 4))
    seen = []
    for path in paths:
        header, rows = read_schema_csv(path)
        cols = _columns(header, rows, ["n", "p", "atf", "atf_ideal"])
        by_n: dict[str, dict[float, tuple[float, float]]] = {}
        for n, p, a, ai in zip(cols["n"], cols["p"], cols["atf"], cols["atf_ideal"]):
            by_n.setdefault(n, {})[float(p)] = (float(a), float(ai))
        for n, series in sorted(by_n.items()):
            ps = sorted(series)
            sim = [series[p][0] for p in ps]
            ideal = [series[p][1] for p in ps]
            (line,) = ax.plot(ps, ideal, label=f"n={n}")
            ax.plot(ps, sim, "o", ms=3, color=line.get_color())
            seen.append(n)
    if not seen:
        raise PlotError("no curves found in inputs")
    ax.axhline(0.5, color="0.8", lw=0.6)
    ax.axvline(0.5, color="0.8", lw=0.6)
    ax.set_xlabel("flip probability p")
    ax.set_ylabel("average teleportation fidelity")
    ax.set_xlim(0, 1)
    ax.set_ylim(0, 1.02)
    ax.legend()
    fig.tight_layout()
    return fig


def build_dm_bars(paths) -> plt.Figure:
    header, rows = read_schema_csv(paths[0])
    cols = _columns(header, rows, ["row", "col", "re", "im"])
    ridx = [int(v) for v in cols["row"]]
    cidx = [int(v) for v in cols["col"]]
    dim = max(ridx) + 1
    re = np.zeros((dim, dim))
    im = np.zeros((dim, dim))
    for r, c, a, b in zip(ridx, cidx, cols["re"], cols["im"]):
        re[r, c] = float(a)
        im[r, c] = float(b)
    fig = plt.figure(figsize=(10, 4.5))
    for k, (mat, title) in enumerate([(re, "real part"), (im, "imaginary part")]):
        ax = fig.add_subplot(1, 2, k + 1, projection="3d")
        xs, ys = np.meshgrid(range(dim), range(dim), indexing="ij")
        ax.bar3d(xs.ravel(), ys.ravel(), np.zeros(dim * dim), 0.8, 0.8,
                 mat.ravel(), shade=True, color="#4878cf")
        ax.set_zlim(-0.55, 0.55)
        ax.set_title(title)
        ax.set_xticks([]); ax.set_yticks([])
    fig.tight_layout()
    return fig


_BUILDERS = {"bloch": build_bloch, "atf-curves": build_atf_curves, "dm-bars": build_dm_bars}


def build_figure(job: PlotJob) -> plt.Figure:
    return _BUILDERS[job.kind](job.inputs)


def render(job: PlotJob) -> str:
    fig = build_figure(job)
    try:
        fig.savefig(job.output, format="png",
                    metadata={"Software": "mbqcplots"})
    finally:
        plt.close(fig)
    return job.output


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="ionmbqc-plot",
                                 description="render ionmbqc artifacts")
    ap.add_argument("kind", choices=KINDS)
    ap.add_argument("inputs", nargs="+", help="input CSV file(s), output image last")
    args = ap.parse_args(argv)
    if len(args.inputs) < 2:
        ap.error("need at least one input CSV and one output image")
    try:
        job = PlotJob(args.kind, tuple(args.inputs[:-1]), args.inputs[-1])
        render(job)
    except (PlotError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
