import json

import numpy as np
import pytest

from caplab.channels import ChannelError, same_action, standard_channel
from caplab.cli import SpecError, main, parse_channel_spec, parse_state_spec

IDENTITY_SPEC = {"dim_in": 2, "dim_out": 2, "kraus": [[[[1, 0], [0, 0]], [[0, 0], [1, 0]]]]}


@pytest.fixture
def write(tmp_path):
    def _write(name, obj):
        path = tmp_path / name
        path.write_text(obj if isinstance(obj, str) else json.dumps(obj))
        return str(path)
    return _write


def test_parse_builtin():
    ch = parse_channel_spec('{"builtin":"depolarizing","params":{"p":0.25,"d":2}}')
    assert same_action(ch, standard_channel("depolarizing", p=0.25, d=2))


def test_parse_explicit_identity():
    ch = parse_channel_spec(json.dumps(IDENTITY_SPEC))
    assert (ch.dim_in, ch.dim_out, ch.rank) == (2, 2, 1)
    assert same_action(ch, standard_channel("identity", d=2))


def test_parse_complex_entries():
    s = 1 / np.sqrt(2)
    spec = {"dim_in": 2, "dim_out": 2, "kraus": [
        [[[s, 0], [0, 0]], [[0, 0], [0, s]]],
        [[[0, 0], [0, -s]], [[s, 0], [0, 0]]],
    ]}
    ch = parse_channel_spec(json.dumps(spec))
    np.testing.assert_allclose(ch.kraus[0], [[s, 0], [0, 1j * s]])


def test_parse_rejects_non_tp():
    spec = {"dim_in": 2, "dim_out": 2, "kraus": [[[[0.5, 0], [0, 0]], [[0, 0], [0.5, 0]]]]}
    with pytest.raises(ChannelError, match="trace preservation violated, deviation 0.75"):
        parse_channel_spec(json.dumps(spec))


@pytest.mark.parametrize("text, fragment", [
    ('{"dim_in": 2,\n "dim_out": 2,\n "kraus": [}', "line 3"),
    ('{"dim_in": 2, "dim_out": 2, "kraus": [[[[1, 0], [0]], [[0, 0], [1, 0]]]]}', "kraus[0][0][1]"),
    ('{"dim_in": 2, "dim_out": 2, "kraus": [[[[1, 0], [0, 0]]]]}', "kraus[0]"),
    ('{"dim_in": 0, "dim_out": 2, "kraus": []}', "dim_in"),
    ('[1, 2]', "JSON object"),
])
def test_parse_errors_carry_context(text, fragment):
    with pytest.raises(SpecError, match=fragment.replace("[", r"\[").replace("]", r"\]")):
        parse_channel_spec(text)


def test_parse_unknown_family():
    with pytest.raises(ChannelError):
        parse_channel_spec('{"builtin":"teleporter"}')


def test_parse_state():
    rho = parse_state_spec('{"dim":2,"matrix":[[0.5,0],[0,0.5],[0,-0.5],[0.5,0]]}')
    np.testing.assert_allclose(rho.matrix, [[0.5, 0.5j], [-0.5j, 0.5]])


def test_compute_identity(write, capsys):
    path = write("identity2.json", IDENTITY_SPEC)
    assert main(["compute", "--channel", path, "--quantity", "ce"]) == 0
    assert capsys.readouterr().out == "C_E = 2.000000 bits\n"


def test_compute_builtin_and_quantities(write, capsys):
    state = write("mm.json", {"dim": 2, "matrix": [[0.5, 0], [0, 0], [0, 0], [0.5, 0]]})
    assert main(["compute", "--builtin", "dephasing", "--params", "lambda=1",
                 "--quantity", "mi", "--input-state", state]) == 0
    assert main(["compute", "--builtin", "depolarizing", "--params", "p=1,d=2",
                 "--quantity", "ci", "--input-state", state]) == 0
    assert main(["compute", "--builtin", "identity", "--quantity", "c1", "--restarts", "2"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "I = 1.000000 bits"
    assert out[1] == "I_c = -1.000000 bits"
    assert out[2] == "C_1 = 1.000000 bits (lower bound)"


@pytest.mark.parametrize("argv", [
    ["compute", "--quantity", "ce"],
    ["compute", "--builtin", "identity", "--quantity", "mi"],
    ["compute", "--builtin", "depolarizing", "--params", "p=2", "--quantity", "ce"],
    ["compute", "--builtin", "depolarizing", "--params", "p", "--quantity", "ce"],
    ["compute", "--channel", "/nonexistent.json", "--quantity", "ce"],
    ["verify", "--suite", "nonesuch", "--trials", "1"],
    ["frobnicate"],
    ["compute", "--builtin", "identity", "--quantity", "qq"],
])
def test_usage_and_input_errors_exit_2(argv, capsys):
    assert main(argv) == 2
    err = capsys.readouterr().err
    assert "Traceback" not in err


def test_malformed_channel_exit_2(write, capsys):
    path = write("malformed.json", '{"dim_in": 2, "dim_out": ')
    assert main(["compute", "--channel", path, "--quantity", "ce"]) == 2
    assert "line 1" in capsys.readouterr().err


def test_non_tp_channel_exit_2(write, capsys):
    spec = {"dim_in": 2, "dim_out": 2, "kraus": [[[[0.5, 0], [0, 0]], [[0, 0], [0.5, 0]]]]}
    assert main(["compute", "--channel", write("bad.json", spec), "--quantity", "ce"]) == 2
    assert "trace preservation violated, deviation 0.75" in capsys.readouterr().err


def test_sweep_csv(tmp_path):
    out = tmp_path / "sweep.csv"
    argv = ["sweep", "--builtin", "depolarizing", "--param", "p", "--range", "0,1,3",
            "--out", str(out), "--restarts", "2"]
    assert main(argv) == 0
    raw = out.read_bytes()
    assert raw.splitlines()[0] == b"param,ce_bits"
    assert b"\r" not in raw
    rows = [line.split(",") for line in raw.decode().splitlines()[1:]]
    assert [r[0] for r in rows] == ["0.000000", "0.500000", "1.000000"]
    assert rows[0][1] == "2.000000" and rows[2][1] == "0.000000"
    first = raw
    assert main(argv) == 0
    assert out.read_bytes() == first


def test_verify_report(tmp_path):
    report = tmp_path / "out.json"
    assert main(["verify", "--suite", "ssa", "--trials", "100", "--seed", "42",
                 "--report", str(report)]) == 0
    doc = json.loads(report.read_text())
    assert set(doc) == {"suite", "trials", "failures", "worst_slack_bits", "worst_witness",
                        "elapsed_seconds"}
    assert doc["failures"] == 0 and doc["suite"] == "ssa" and doc["trials"] == 100
    assert set(doc["worst_witness"]) == {"seed", "params"}


def test_verify_exit_1_on_failure(monkeypatch, capsys):
    from caplab import verify
    from caplab.verify import Trial

    monkeypatch.setitem(verify.SUITES, "broken", (lambda seed: Trial(-1.0, {}), 1e-9))
    assert main(["verify", "--suite", "broken", "--trials", "2"]) == 1
    assert json.loads(capsys.readouterr().out)["failures"] == 2


def test_info(write, capsys):
    assert main(["info", "--channel", write("id.json", IDENTITY_SPEC)]) == 0
    out = capsys.readouterr().out
    assert "dim_in = 2" in out and "kraus_rank = 1" in out
    assert "choi_spectrum = 1.000000 0.000000 0.000000 0.000000" in out
