import json
import subprocess
import sys

import numpy as np
import pytest

from ktn_figures.io import (ParseError, read_convergence, read_field,
                            read_spectrum, read_vectorfield)
from ktn_figures.render import KINDS, FigureJob, _render_panel, render


@pytest.fixture(scope="session")
def run_dir(tmp_path_factory):
    """A completed small run produced through the harness CLI only."""
    base = tmp_path_factory.mktemp("run")
    out = base / "out"
    cfg = {
        "J": 8, "n_eig": 32, "d": 8, "l": 16, "eval_l": 8,
        "times": [0.0, 1.0], "eig_fields": [1, 2],
        "kappa_obs": [5.0, 5.0], "kappa_eval": 5.0,
        "out_dir": str(out),
    }
    cfg_path = base / "config.json"
    cfg_path.write_text(json.dumps(cfg))
    for cmd in ("spectrum", "predict", "converge"):
        r = subprocess.run([sys.executable, "-m", "ktn.cli", cmd,
                            "--config", str(cfg_path)],
                           capture_output=True, text=True)
        assert r.returncode == 0, r.stderr
    return out


def test_read_field_roundtrip(run_dir):
    f = read_field(run_dir / "field_true_t0.csv")
    assert f.side == 8
    assert f.t == 0.0
    assert f.model == "true"
    assert f.grid.shape == (8, 8)
    assert np.isfinite(f.grid).all()


def test_read_tables(run_dir):
    spec = read_spectrum(run_dir / "spectrum.csv")
    assert spec.shape == (33, 3)
    assert spec[0, 1] == 0.0 and spec[0, 2] == 0.0
    vf = read_vectorfield(run_dir / "vectorfield.csv")
    assert vf.shape[1] == 4
    conv = read_convergence(run_dir / "convergence.csv")
    assert conv.shape == (3, 4)


def test_parse_errors_carry_file_and_line(tmp_path):
    bad = tmp_path / "field.csv"
    bad.write_text("# l=2 t=0 model=x\n1.0,2.0\n3.0\n")
    with pytest.raises(ParseError, match=r"field\.csv:3: expected 2 values"):
        read_field(bad)

    bad.write_text("not a header\n1.0\n")
    with pytest.raises(ParseError, match=r"field\.csv:1: bad field header"):
        read_field(bad)

    tab = tmp_path / "spectrum.csv"
    tab.write_text("index,omega,wrong\n0,0,0\n")
    with pytest.raises(ParseError, match=r"spectrum\.csv:1: expected columns"):
        read_spectrum(tab)

    tab.write_text("index,omega,dirichlet_energy\n0,zero,0\n")
    with pytest.raises(ParseError, match=r"spectrum\.csv:2"):
        read_spectrum(tab)


def test_unknown_kind_rejected(tmp_path):
    with pytest.raises(ValueError, match="unknown figure kind"):
        FigureJob(tmp_path, "pie-chart", tmp_path / "x.png")


def test_constant_field_panel_does_not_crash(tmp_path):
    header = "# l=2 t=0 model={m}"
    for m in ("true", "classical", "qm", "fock"):
        (tmp_path / f"field_{m}_t0.csv").write_text(
            header.format(m=m) + "\n1.0,1.0\n1.0,1.0\n")
        if m != "true":
            (tmp_path / f"error_{m}_t0.csv").write_text(
                header.format(m=m) + "\n0.0,0.0\n0.0,0.0\n")
    out = render(FigureJob(tmp_path, "evolution-panel", tmp_path / "evo.png"))
    assert out.exists() and out.stat().st_size > 0
    out = render(FigureJob(tmp_path, "error-panel", tmp_path / "err.png"))
    assert out.exists() and out.stat().st_size > 0


def test_render_is_pure(run_dir, tmp_path):
    before = {p.name: p.read_bytes() for p in run_dir.iterdir()}
    render(FigureJob(run_dir, "spectrum", tmp_path / "s.png"))
    after = {p.name: p.read_bytes() for p in run_dir.iterdir()}
    assert before == after


def test_cli_render_and_exit_codes(run_dir, tmp_path):
    out = tmp_path / "quiver.png"
    r = subprocess.run([sys.executable, "-m", "ktn_figures.cli", "render",
                        "--kind", "quiver", "--in", str(run_dir),
                        "--out", str(out)], capture_output=True, text=True)
    assert r.returncode == 0, r.stderr
    assert out.exists()

    r = subprocess.run([sys.executable, "-m", "ktn_figures.cli", "render",
                        "--kind", "spectrum", "--in", str(tmp_path / "nowhere"),
                        "--out", str(tmp_path / "x.png")],
                       capture_output=True, text=True)
    assert r.returncode == 1
    assert "render error" in r.stderr


def test_criterion_12_all_kinds_render(run_dir, tmp_path):
    ok = True
    detail = []
    for kind in KINDS:
        out = tmp_path / f"{kind}.png"
        try:
            render(FigureJob(run_dir, kind, out))
            ok = ok and out.exists() and out.stat().st_size > 0
        except Exception as exc:  # report, then fail below
            ok = False
            detail.append(f"{kind}: {exc}")
    fig = _render_panel(run_dir, "field", ("true", "classical", "qm", "fock"),
                        "viridis")
    layout_ok = len(fig.axes) >= 4 * 2 and fig.axes[0].get_title() == "t = 0"
    import matplotlib.pyplot as plt
    grid = [ax for ax in fig.axes if ax.get_subplotspec() is not None]
    rows = {ax.get_subplotspec().rowspan.start for ax in grid}
    cols = {ax.get_subplotspec().colspan.start for ax in grid}
    layout_ok = layout_ok and len(rows) == 4 and len(cols) == 2
    plt.close(fig)
    ok = ok and layout_ok
    print(f"criterion 12: {'PASS' if ok else 'FAIL'} "
          f"six kinds rendered, panel 4 rows x 2 time columns "
          f"{'; '.join(detail)}".rstrip())
    assert ok, detail
