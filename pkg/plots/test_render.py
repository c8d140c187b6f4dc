"""Tests for the scaling-plot renderer, including the rendering criterion:
two curves plus reference slope lines from a sweep CSV, byte-deterministic
rerenders.  The sweep CSV is produced through the harness CLI, the only
interface this component consumes.
"""

import subprocess
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))
from render import PlotSpec, default_slopes, main, render_scaling_plot  # noqa: E402

HEADER = "kind,m,n,k,p,q,seed,method,error,bound,ratio,time_ms,restarts,rounds"


@pytest.fixture(scope="module")
def sweep_csv(tmp_path_factory):
    path = tmp_path_factory.mktemp("sweep") / "sweep.csv"
    subprocess.run(
        [sys.executable, "-m", "carabal", "sweep", "--k-list", "4,8,16",
         "--m", "24", "--n", "12", "--trials", "2", "--seed", "7",
         "--p", "2", "--q", "2", "--out", str(path)],
        check=True, cwd=Path(__file__).parent.parent)
    return path


def test_two_curves_and_reference_lines(sweep_csv, tmp_path):
    out = tmp_path / "plot.svg"
    render_scaling_plot(PlotSpec(csv_path=str(sweep_csv), out_path=str(out)))
    svg = out.read_text()
    assert 'id="curve-walk"' in svg
    assert 'id="curve-maurey"' in svg
    assert svg.count('id="ref-slope-') >= 1


def test_rerender_is_byte_identical(sweep_csv, tmp_path):
    a = tmp_path / "a.svg"
    b = tmp_path / "b.svg"
    spec_a = PlotSpec(csv_path=str(sweep_csv), out_path=str(a))
    spec_b = PlotSpec(csv_path=str(sweep_csv), out_path=str(b))
    render_scaling_plot(spec_a)
    render_scaling_plot(spec_b)
    assert a.read_bytes() == b.read_bytes()


def test_explicit_slopes_cli(sweep_csv, tmp_path):
    out = tmp_path / "plot.svg"
    code = main(["--csv", str(sweep_csv), "--out", str(out),
                 "--slopes=-0.5,-1.0"])
    assert code == 0
    svg = out.read_text()
    assert 'id="ref-slope--0.5"' in svg
    assert 'id="ref-slope--1"' in svg


def test_summary_lines_are_ignored(sweep_csv):
    text = sweep_csv.read_text()
    assert "# slope," in text  # the fixture CSV really has a summary block


def test_empty_body_rejected(tmp_path, capsys):
    path = tmp_path / "empty.csv"
    path.write_text(HEADER + "\n")
    code = main(["--csv", str(path), "--out", str(tmp_path / "x.svg")])
    assert code == 1
    assert "no data rows" in capsys.readouterr().err


def test_missing_columns_lists_schema(tmp_path, capsys):
    path = tmp_path / "bad.csv"
    path.write_text("kind,m,n\nball,4,4\n")
    code = main(["--csv", str(path), "--out", str(tmp_path / "x.svg")])
    assert code == 1
    err = capsys.readouterr().err
    assert "missing columns" in err
    assert HEADER in err


def test_default_slopes_from_exponents():
    assert default_slopes(2.0, 2.0) == [-0.5]
    assert default_slopes(2.0, float("inf")) == [-0.5, -1.0]
