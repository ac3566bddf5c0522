import math
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from mbqcplots.render import PlotError, PlotJob, build_figure, main, render

SCHEMA = "# schema=1"


def binom_atf(n, p):
    return sum(math.comb(n, k) * p ** k * (1 - p) ** (n - k) for k in range((n - 1) // 2 + 1))


def qec_csv(path: Path, n: int, points: int = 21):
    lines = [SCHEMA, "n,p,input,fidelity,atf,atf_ideal"]
    for p in np.linspace(0, 1, points):
        a = repr(float(binom_atf(n, p)))
        for label in ("+", "-", "+i", "-i"):
            lines.append(f"{n},{float(p)!r},{label},{a},{a},{a}")
    path.write_text("\n".join(lines) + "\n")


def gates_csv(path: Path):
    lines = [SCHEMA, "alpha,beta,gamma,x,y,z,oracle_fidelity"]
    pts = [(0, 1, 0), (0, -1, 0), (-1, 0, 0), (0, 0, 1), (0, 0.707, 0.707)]
    for i, (x, y, z) in enumerate(pts):
        lines.append(f"{0.1 * i},0.0,0.0,{x},{y},{z},1.0")
    path.write_text("\n".join(lines) + "\n")


def rho_csv(path: Path):
    lines = [SCHEMA, "row,col,re,im"]
    rho = np.full((4, 4), 0.25)
    for i in range(4):
        for j in range(4):
            lines.append(f"{i},{j},{float(rho[i, j])!r},0.0")
    path.write_text("\n".join(lines) + "\n")


class TestInputValidation:
    def test_unknown_kind_rejected(self):
        with pytest.raises(PlotError):
            PlotJob("pie", ("a.csv",), "out.png")

    def test_schema_mismatch_rejected(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("# schema=2\nn,p,input,fidelity,atf,atf_ideal\n1,0,+,1,1,1\n")
        with pytest.raises(PlotError, match="schema"):
            build_figure(PlotJob("atf-curves", (str(bad),), "o.png"))

    def test_empty_csv_rejected(self, tmp_path):
        empty = tmp_path / "empty.csv"
        empty.write_text(SCHEMA + "\nn,p,input,fidelity,atf,atf_ideal\n")
        with pytest.raises(PlotError, match="no data"):
            build_figure(PlotJob("atf-curves", (str(empty),), "o.png"))
        assert not (tmp_path / "o.png").exists()

    def test_missing_columns_rejected(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text(SCHEMA + "\na,b\n1,2\n")
        with pytest.raises(PlotError, match="missing columns"):
            build_figure(PlotJob("bloch", (str(bad),), "o.png"))


class TestAtfCurves:
    def test_three_curves_cross_at_half(self, tmp_path):
        paths = []
        for n in (1, 3, 5):
            p = tmp_path / f"qec{n}.csv"
            qec_csv(p, n)
            paths.append(str(p))
        fig = build_figure(PlotJob("atf-curves", tuple(paths), "o.png"))
        ax = fig.axes[0]
        curves = [ln for ln in ax.get_lines() if ln.get_label().startswith("n=")]
        assert len(curves) == 3
        for ln in curves:
            xs, ys = ln.get_xdata(), ln.get_ydata()
            i = int(np.argmin(np.abs(np.asarray(xs) - 0.5)))
            assert xs[i] == pytest.approx(0.5, abs=1e-12)
            assert ys[i] == pytest.approx(0.5, abs=1e-9)

    def test_render_writes_png(self, tmp_path):
        p = tmp_path / "qec.csv"
        qec_csv(p, 3)
        out = tmp_path / "fig.png"
        render(PlotJob("atf-curves", (str(p),), str(out)))
        assert out.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


class TestDeterminism:
    @pytest.mark.parametrize("kind", ["bloch", "atf-curves", "dm-bars"])
    def test_identical_input_identical_bytes(self, kind, tmp_path):
        src = tmp_path / "in.csv"
        if kind == "bloch":
            gates_csv(src)
        elif kind == "atf-curves":
            qec_csv(src, 3, points=5)
        else:
            rho_csv(src)
        out1, out2 = tmp_path / "a.png", tmp_path / "b.png"
        render(PlotJob(kind, (str(src),), str(out1)))
        render(PlotJob(kind, (str(src),), str(out2)))
        assert out1.read_bytes() == out2.read_bytes()


class TestCli:
    def test_main_round_trip(self, tmp_path):
        src = tmp_path / "gates.csv"
        gates_csv(src)
        out = tmp_path / "bloch.png"
        assert main(["bloch", str(src), str(out)]) == 0
        assert out.exists()

    def test_main_reports_schema_error(self, tmp_path, capsys):
        src = tmp_path / "bad.csv"
        src.write_text("nope\n")
        assert main(["bloch", str(src), str(tmp_path / "x.png")]) == 1
        assert "error" in capsys.readouterr().err

    def test_requires_output_argument(self, tmp_path):
        with pytest.raises(SystemExit):
            main(["bloch", str(tmp_path / "only.csv")])


class TestEndToEndWithPrimary:
    def test_consumes_real_cli_output(self, tmp_path):
        qec_out = tmp_path / "qec.csv"
        subprocess.run(
            [sys.executable, "-m", "ionmbqc.cli", "qec", "--n", "1",
             "--p-grid", "0:1:5", "--out", str(qec_out)],
            check=True,
        )
        out = tmp_path / "fig.png"
        assert main(["atf-curves", str(qec_out), str(out)]) == 0
        assert out.exists()
