import numpy as np
import pytest

from twoatom.dynamics import SystemParams
from twoatom.hilbert import BasisTag, DensityMatrix, pure_state_density
from twoatom.scenario import (
    CSV_COLUMNS,
    FIGURE_PRESETS,
    ConfigError,
    CouplingsMode,
    ScenarioSpec,
    figure_preset,
    format_csv,
    initial_state,
    load_state_file,
    parse_config,
    run_scenario,
    write_csv,
)

from conftest import preset_run


def log_slope(t, c, lo, hi):
    sel = (t >= lo) & (t <= hi)
    return np.polyfit(t[sel], np.log(c[sel]), 1)[0]


def test_named_states():
    assert initial_state("e1g2").allclose(pure_state_density([0, 1, 0, 0]))
    assert initial_state("antisym").collective()[2, 2] == pytest.approx(1.0)
    with pytest.raises(ValueError):
        initial_state("ghz")


def test_preset_table():
    assert sorted(FIGURE_PRESETS) == [1, 2, 3, 4, 5, 6]
    spec = figure_preset(2)
    assert spec.t_end == 12.0 and spec.dt == 1e-3 and spec.stride == 10
    assert spec.params.gamma12 == 0.79 and spec.params.omega12 == 1.12
    assert spec.couplings_mode is CouplingsMode.CAPTION
    computed = figure_preset(3, caption_couplings=False)
    assert computed.params.gamma12 == pytest.approx(0.7932, abs=1e-4)
    assert computed.params.delta == 1.0
    with pytest.raises(ValueError):
        figure_preset(7)


def test_spec_validation():
    with pytest.raises(ValueError):
        ScenarioSpec("nope", SystemParams(0.5, 0.0))
    with pytest.raises(TypeError):
        ScenarioSpec(np.eye(4), SystemParams(0.5, 0.0))
    custom = ScenarioSpec(DensityMatrix(np.eye(4) / 4), SystemParams(0.5, 0.0))
    assert custom.rho0.entries[0, 0] == 0.25


def test_figure1_initial_row():
    d = preset_run(1).derived
    assert d["concurrence"][0] == 0.0
    assert d["rho_ss"][0] == pytest.approx(0.5) and d["rho_aa"][0] == pytest.approx(0.5)


def test_figure2_initial_row():
    d = preset_run(2).derived
    assert d["rho_ee"][0] == 1.0
    assert d["concurrence"][0] == 0.0 and d["negativity"][0] == 0.0


def test_derived_columns_consistent():
    tr = preset_run(3)
    d = tr.derived
    assert set(CSV_COLUMNS) <= set(d)
    total = d["rho_ee"] + d["rho_ss"] + d["rho_aa"] + d["rho_gg"]
    assert np.max(np.abs(total - 1)) < 1e-12
    assert np.allclose(d["s_squared"], 2 - 2 * d["rho_aa"])
    # one-excited closed form for the concurrence holds for detuned atoms too
    c = np.sqrt((d["rho_ss"] - d["rho_aa"]) ** 2 + 4 * d["im_rho_as"] ** 2)
    assert np.max(np.abs(c - d["concurrence"])) < 1e-8


def test_nonidentical_maximum_exceeds_identical():
    assert preset_run(3).derived["concurrence"].max() > preset_run(1).derived["concurrence"].max()


def test_figure4_two_time_scales():
    d = preset_run(4).derived
    early = log_slope(d["gamma_t"], d["concurrence"], 0.5, 1.5)
    late = log_slope(d["gamma_t"], d["concurrence"], 5.0, 8.0)
    assert early / late > 2


def test_figure4_late_decay_tracks_antisymmetric_population():
    d = preset_run(4).derived
    c_slope = log_slope(d["gamma_t"], d["concurrence"], 5.0, 8.0)
    a_slope = log_slope(d["gamma_t"], d["rho_aa"], 5.0, 8.0)
    assert c_slope == pytest.approx(a_slope, rel=0.05)


def test_dicke_both_excited_never_entangles():
    d = preset_run(2, gamma12=1.0).derived
    assert d["concurrence"].max() < 1e-9
    assert np.max(np.abs(d["s_squared"] - 2)) < 1e-8


def test_csv_format_and_determinism(tmp_path):
    tr = preset_run(1)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    write_csv(tr, a)
    write_csv(run_scenario(figure_preset(1)), b)
    assert a.read_bytes() == b.read_bytes()
    lines = a.read_text().splitlines()
    assert lines[0] == "gamma_t,concurrence,negativity,rho_ee,rho_ss,rho_aa,rho_gg,re_rho_as,im_rho_as,s_squared"
    assert len(lines) == 802
    assert lines[1].startswith("0,0,0,0,0.5,0.5,")
    assert "-0," not in a.read_text()
    row = lines[400].split(",")
    assert float(row[0]) == pytest.approx(3.99)
    assert all(len(v.replace("-", "").replace(".", "").split("e")[0].lstrip("0")) <= 12 for v in row)


def test_csv_requires_derived():
    tr = preset_run(1)
    bare = type(tr)(tr.times, tr.rho, tr.basis, tr.params, tr.engine)
    with pytest.raises(ValueError):
        format_csv(bare)


def test_write_csv_reports_path(tmp_path):
    target = tmp_path / "missing" / "x.csv"
    with pytest.raises(OSError, match="missing"):
        write_csv(preset_run(1), target)


def test_parse_config():
    cfg = parse_config("# comment\nt-end = 4\n\ndt=0.002  # trailing\n")
    assert cfg == {"t_end": "4", "dt": "0.002"}
    for bad in ("t_end\n", "= 3\n", "a = 1\na = 2\n"):
        with pytest.raises(ConfigError):
            parse_config(bad)
    with pytest.raises(ConfigError):
        parse_config("colour = red\n", allowed={"dt"})


def test_state_file_formats(tmp_path):
    amp = tmp_path / "amp.txt"
    amp.write_text("basis: collective\n0 0.6 0.8i 0\n")
    rho = load_state_file(amp)
    assert rho.basis is BasisTag.COLLECTIVE and rho.entries[1, 1] == pytest.approx(0.36)
    mat = tmp_path / "mat.txt"
    mat.write_text(initial_state("sym").to_text())
    assert load_state_file(mat) == initial_state("sym")
    junk = tmp_path / "junk.txt"
    junk.write_text("hello\nworld\n")
    with pytest.raises(ValueError):
        load_state_file(junk)
    with pytest.raises(ValueError, match="cannot read"):
        load_state_file(tmp_path / "absent.txt")
