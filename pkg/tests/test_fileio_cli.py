import numpy as np
import pytest

from skewlat import E8_GENERATOR, SkewingSpec, e8_theta_psi
from skewlat.cli import main
from skewlat.errors import InputFileError
from skewlat.fileio import csv_text, parse_grid, parse_number, read_csv, read_lattice, read_relation, read_skew

from fractions import Fraction

from oracles import psi_1d, two_q


def _write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def _matrix_text(m):
    return "".join(" ".join(repr(float(v)) for v in row) + "\n" for row in np.atleast_2d(m))


@pytest.fixture
def files(tmp_path):
    f = {
        "z1": _write(tmp_path, "z1.txt", "1\n"),
        "two": _write(tmp_path, "two.txt", "2\n"),
        "e8": _write(tmp_path, "e8.txt", _matrix_text(E8_GENERATOR)),
        "e8orth": _write(tmp_path, "e8orth.txt", _matrix_text(np.diag([2, 1, 1, 1, 1, 1, 1, 0.5]))),
        "half8": _write(tmp_path, "half8.txt", _matrix_text(0.5 * np.eye(8))),
        "diag2": _write(tmp_path, "diag2.txt", "3 0\n0 0.8\n"),
    }
    spec = SkewingSpec.from_matrix(E8_GENERATOR)
    f["e8skew"] = _write(tmp_path, "e8.skew", "8\n" + " ".join(map(repr, spec.diagonal)) + "\n"
                         + " ".join(map(repr, spec.upper)) + "\n")
    f["zeroskew"] = _write(tmp_path, "zero.skew", "2\n3 4/5\n0\n")
    f["skew2"] = _write(tmp_path, "two.skew", "2\n3 0.8   # diagonal\n1\n")
    rel = np.rint(np.linalg.solve(0.5 * np.eye(8), np.asarray(E8_GENERATOR))).astype(int)
    f["e8rel"] = _write(tmp_path, "e8.rel", "\n".join(" ".join(map(str, r)) for r in rel) + "\n")
    return f


def _run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


# -- file parsing -----------------------------------------------------------------


def test_parse_number():
    assert parse_number("3/4") == 0.75
    assert parse_number("-1.5e-1") == Fraction(-3, 20)
    with pytest.raises(ValueError):
        parse_number("x")
    with pytest.raises(ValueError):
        parse_number("1/0")


def test_read_lattice_with_comments_and_rationals(tmp_path):
    p = _write(tmp_path, "l.txt", "# header\n1 1/2\n\n0 3/4   # second row\n")
    lat = read_lattice(p)
    assert np.array_equal(lat.generator, [[1.0, 0.5], [0.0, 0.75]])


@pytest.mark.parametrize("text,line,fragment", [
    ("1 0\n0 1 2\n", 2, "expected 2 entries"),
    ("1 0\n0 zz\n", 2, "not a number"),
    ("1 0 0\n0 1 0\n", 2, "square"),
    ("", 0, "no matrix"),
])
def test_read_lattice_errors(tmp_path, text, line, fragment):
    p = _write(tmp_path, "bad.txt", text)
    with pytest.raises(InputFileError) as info:
        read_lattice(p)
    assert info.value.lineno == line and fragment in str(info.value)
    assert str(info.value).startswith(f"{p}:{line}:" if line else f"{p}: ")


def test_read_lattice_singular(tmp_path):
    with pytest.raises(InputFileError, match="singular|rank|volume"):
        read_lattice(_write(tmp_path, "s.txt", "1 2\n2 4\n"))


def test_missing_file(tmp_path):
    with pytest.raises(InputFileError, match="cannot read"):
        read_lattice(str(tmp_path / "nope.txt"))


def test_read_relation_integrality(tmp_path):
    assert read_relation(_write(tmp_path, "r.txt", "2 1\n0 2\n")).dtype == np.int64
    with pytest.raises(InputFileError) as info:
        read_relation(_write(tmp_path, "r2.txt", "2 1\n0 1.5\n"))
    assert info.value.lineno == 2


def test_read_skew(files):
    spec = read_skew(files["skew2"])
    assert spec.diagonal == (3.0, 0.8) and spec.upper == (1.0,)


@pytest.mark.parametrize("text,line", [("x\n1\n", 1), ("2\n1 1\n", 2), ("2\n1 -1 0\n", 2), ("2\n1 1\n0 5\n", 3)])
def test_read_skew_errors(tmp_path, text, line):
    with pytest.raises(InputFileError) as info:
        read_skew(_write(tmp_path, "bad.skew", text))
    assert info.value.lineno == line


def test_parse_grid():
    assert parse_grid("1:3:3:linear") == [1.0, 2.0, 3.0]
    assert parse_grid("0.1:10:3:log") == pytest.approx([0.1, 1.0, 10.0])
    assert parse_grid("0.5,2") == [0.5, 2.0]
    assert parse_grid("7") == [7.0]
    assert parse_grid("2:2:1:log") == [2.0]
    for bad in ("0:1:3:log", "1:2:0:log", "2:1:3:linear", "1:2:3:cubic", "a,b", "-1", "1:2"):
        with pytest.raises(ValueError):
            parse_grid(bad)


def test_csv_format():
    text = csv_text(("a", "b", "c", "d"), [(0.1, 3, True, "direct")])
    assert text == "a,b,c,d\n0.10000000000000001,3,true,direct\n"
    header, rows = read_csv(text)
    assert header == ["a", "b", "c", "d"] and float(rows[0][0]) == 0.1


# -- commands -------------------------------------------------------------------------


def test_psi_identity_1x1(files, capsys):
    code, out, _ = _run(capsys, "psi", "--lattice", files["z1"], "--grid", "1,50")
    assert code == 0
    header, rows = read_csv(out)
    assert header == ["x", "psi", "truncation_bound", "method"]
    assert float(rows[0][1]) == pytest.approx(psi_1d(1.0), abs=1e-9)
    assert float(rows[1][1]) == pytest.approx(1.0, abs=1e-9)
    assert rows[0][3] in ("direct", "poisson_dual")


def test_psi_e8_matches_closed_form(files, capsys, tmp_path):
    out_path, fig = tmp_path / "e8.csv", tmp_path / "e8.png"
    code, _, _ = _run(capsys, "psi", "--lattice", files["e8"], "--grid", "0.1:5:50:log",
                      "--out", str(out_path), "--figure", str(fig))
    assert code == 0 and fig.stat().st_size > 0
    _, rows = read_csv(out_path.read_text())
    assert len(rows) == 50
    for x, psi, bound, _ in rows:
        ref = e8_theta_psi(float(x))
        assert abs(float(psi) - ref.value) <= float(bound) + ref.truncation_bound + 1e-12 * ref.value


def test_psi_method_flag(files, capsys):
    _, out, _ = _run(capsys, "psi", "--lattice", files["two"], "--grid", "0.2", "--method", "poisson")
    assert read_csv(out)[1][0][3] == "poisson_dual"


def test_compare_e8(files, capsys, tmp_path):
    fig = tmp_path / "cmp.svg"
    code, out, _ = _run(capsys, "compare", "--lattice", files["e8orth"], "--skew", files["e8skew"],
                        "--grid", "0.1:5:20:log", "--figure", str(fig))
    assert code == 0 and fig.read_text().lstrip().startswith("<?xml")
    header, rows = read_csv(out)
    assert header == ["x", "psi_orth", "psi_skew", "margin"]
    assert all(float(r[3]) > 0 for r in rows)


def test_compare_random_dim2(files, capsys):
    code, out, _ = _run(capsys, "compare", "--lattice", files["diag2"], "--skew", files["skew2"],
                        "--grid", "0.1:5:10:log")
    assert code == 0 and all(float(r[3]) > 0 for r in read_csv(out)[1])


def test_compare_zero_skew_is_error(files, capsys):
    code, _, err = _run(capsys, "compare", "--lattice", files["diag2"], "--skew", files["zeroskew"],
                        "--grid", "1")
    assert code == 2 and "error" in err


def test_compare_reports_unresolved_ordering(files, capsys):
    # at very small x the two psi values agree to double precision
    code, _, err = _run(capsys, "compare", "--lattice", files["diag2"], "--skew", files["skew2"],
                        "--grid", "1e-4")
    assert code == 1 and "not certified" in err


def test_bounds_ecdp_and_rep(files, capsys, tmp_path):
    code, out, _ = _run(capsys, "bounds", "--lattice", files["z1"], "--relation", files["two"],
                        "--which", "ecdp", "--grid", "0.01,1,100")
    assert code == 0
    header, rows = read_csv(out)
    assert header == ["sigma", "value", "capped"]
    assert rows[0][2] == "true" and rows[-1][2] == "false"
    assert float(rows[-1][1]) == pytest.approx(0.5, rel=0.01)
    code, out, _ = _run(capsys, "bounds", "--lattice", files["z1"], "--which", "rep", "--grid", "0.25")
    assert float(read_csv(out)[1][0][1]) == pytest.approx(0.13567, abs=1e-4)
    fig = tmp_path / "b.png"
    code, out, _ = _run(capsys, "bounds", "--lattice", files["z1"], "--relation", files["two"],
                        "--grid", "0.05:5:8:log", "--figure", str(fig))
    assert code == 0 and fig.exists()
    assert read_csv(out)[0] == ["sigma", "ecdp", "ecdp_capped", "rep", "rep_capped"]


def test_bounds_requires_relation_for_ecdp(files, capsys):
    code, _, err = _run(capsys, "bounds", "--lattice", files["z1"], "--which", "ecdp", "--grid", "1")
    assert code == 2 and "--relation" in err


def test_bad_grid_is_input_error(files, capsys):
    code, _, err = _run(capsys, "psi", "--lattice", files["z1"], "--grid", "0:1:5:log")
    assert code == 2 and "--grid" in err


def test_bad_file_reports_line(tmp_path, capsys):
    bad = _write(tmp_path, "bad.txt", "1 0\n0 q\n")
    code, _, err = _run(capsys, "psi", "--lattice", bad, "--grid", "1")
    assert code == 2 and f"{bad}:2:" in err


def test_simulate_rep(files, capsys, tmp_path):
    fig = tmp_path / "sim.png"
    code, out, _ = _run(capsys, "simulate", "--lattice", files["z1"], "--grid", "0.25", "--trials", "100000",
                        "--seed", "42", "--figure", str(fig))
    assert code == 0 and fig.exists()
    header, rows = read_csv(out)
    assert header == ["sigma", "estimate", "stderr", "trials"]
    est, se = float(rows[0][1]), float(rows[0][2])
    assert abs(est - two_q(0.25)) <= 3 * se and rows[0][3] == "100000"


def test_simulate_bytes_repeat_and_workers(files, tmp_path, capsys):
    outs = []
    for i, workers in enumerate(("1", "1", "4")):
        p = tmp_path / f"s{i}.csv"
        main(["simulate", "--lattice", files["z1"], "--relation", files["two"], "--grid", "0.3,0.6",
              "--trials", "9000", "--seed", "5", "--workers", workers, "--out", str(p)])
        outs.append(p.read_bytes())
    capsys.readouterr()
    assert outs[0] == outs[1] == outs[2]
    assert b"\r" not in outs[0]


def test_simulate_e8_coset_below_bound(files, capsys):
    grid = "0.25,0.35"
    _, sim, _ = _run(capsys, "simulate", "--lattice", files["half8"], "--relation", files["e8rel"],
                     "--grid", grid, "--trials", "4000", "--seed", "3")
    _, bnd, _ = _run(capsys, "bounds", "--lattice", files["half8"], "--relation", files["e8rel"],
                     "--which", "ecdp", "--grid", grid)
    for s, b in zip(read_csv(sim)[1], read_csv(bnd)[1]):
        if b[2] == "false":
            assert float(s[1]) <= float(b[1]) + 3 * float(s[2])


def test_e8_demo_quick(capsys, tmp_path):
    out, fig = tmp_path / "fig2.csv", tmp_path / "fig2.png"
    code, stdout, _ = _run(capsys, "e8-demo", "--skip-direct", "--grid", "0.1:5:12:log",
                           "--out", str(out), "--figure", str(fig))
    assert code == 0 and fig.exists()
    assert "[PASS] index 256" in stdout and "[PASS] equal rates 1 bpcu" in stdout
    assert "[PASS] shell counts" in stdout and "FAIL" not in stdout
    header, rows = read_csv(out.read_text())
    assert header == ["x", "psi_orth", "psi_e8", "margin"] and len(rows) == 12
