import json
from math import sqrt

import numpy as np
import pytest

import christoffel as ch
from christoffel import cli


@pytest.fixture()
def domains(tmp_path):
    paths = {}

    def write(name, payload):
        p = tmp_path / f"{name}.json"
        p.write_text(json.dumps(payload))
        paths[name] = str(p)

    write("interval", {"type": "cube", "dim": 1})
    write("disk", {"type": "ball_p", "dim": 2, "p": 2})
    write("ball15", {"type": "ball_p", "dim": 2, "p": 1.5})
    write("halfball3", {"type": "half_ball", "dim": 3})
    write("cube2", {"type": "cube", "dim": 2})
    return paths


def test_parse_degrees_and_point():
    assert cli.parse_degrees("4:24:2") == list(range(4, 25, 2))
    assert cli.parse_degrees("4:14") == list(range(4, 15))
    assert cli.parse_degrees("8") == [8]
    with pytest.raises(ValueError):
        cli.parse_degrees("10:4")
    np.testing.assert_allclose(cli.parse_point("1,0"), [1.0, 0.0])
    np.testing.assert_allclose(cli.parse_point("0.5 -1"), [0.5, -1.0])


def test_eval_interval_example(domains, capsys):
    code = cli.main(["eval", "--domain", domains["interval"],
                     "--degree", "5", "--point", "1"])
    assert code == 0
    record = json.loads(capsys.readouterr().out)
    assert record["C"] == pytest.approx(18.0, rel=1e-10)
    assert record["ratio"] == pytest.approx(sqrt(18.0), rel=1e-10)


def test_eval_degree_zero(domains, capsys):
    code = cli.main(["eval", "--domain", domains["disk"],
                     "--degree", "0", "--point", "0.2,0.1"])
    assert code == 0
    record = json.loads(capsys.readouterr().out)
    assert record["C"] == pytest.approx(1.0 / np.pi, rel=1e-12)


def test_eval_outside_domain_extension_semantics(domains, capsys):
    # v_n^d lies outside the ball; evaluation must still succeed
    n = 4
    v = 1.0 + 1.0 / (3 * n * n)
    code = cli.main(["eval", "--domain", domains["disk"],
                     "--degree", str(n), "--point", f"{v},0"])
    assert code == 0
    record = json.loads(capsys.readouterr().out)
    assert record["C"] > 0


def test_exit_code_malformed_json(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{oops")
    code = cli.main(["eval", "--domain", str(bad), "--degree", "3",
                     "--point", "0"])
    assert code == 2
    missing = tmp_path / "missing.json"
    code = cli.main(["eval", "--domain", str(missing), "--degree", "3",
                     "--point", "0"])
    assert code == 2


def test_exit_code_dimension_mismatch(domains):
    code = cli.main(["eval", "--domain", domains["disk"], "--degree", "3",
                     "--point", "1"])
    assert code == 3


def test_exit_code_degraded(domains, capsys, monkeypatch):
    # force the family to hand back a float64-degraded system
    real_family = cli.GramFamily

    class NoRescueFamily(real_family):
        def system(self, degree):
            out = super().system(degree)
            out.mp_cholesky = None
            out.degraded = True
            return out

    monkeypatch.setattr(cli, "GramFamily", NoRescueFamily)
    code = cli.main(["eval", "--domain", domains["disk"], "--degree", "4",
                     "--point", "1,0"])
    assert code == 4
    record = json.loads(capsys.readouterr().out)
    assert record["degraded"] is True
    assert np.isfinite(record["C"])  # value still printed, flagged


def test_max_command(domains, capsys):
    code = cli.main(["max", "--domain", domains["cube2"], "--degree", "6"])
    assert code == 0
    record = json.loads(capsys.readouterr().out)
    np.testing.assert_allclose(np.abs(record["argmax"]), [1.0, 1.0], atol=1e-8)


def test_sigma_csv_deterministic(domains, tmp_path):
    out1 = tmp_path / "a.csv"
    out2 = tmp_path / "b.csv"
    args = ["sigma", "--domain", domains["disk"], "--degrees", "4:12:2",
            "--seed", "7", "--format", "csv"]
    assert cli.main(args + ["--output", str(out1)]) == 0
    assert cli.main(args + ["--output", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    header = out1.read_text().splitlines()[0]
    assert header == "n,C_max,argmax_1,argmax_2,degraded"


def test_sigma_json_payload(domains, capsys):
    code = cli.main(["sigma", "--domain", domains["interval"],
                     "--degrees", "4:28:2"])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["sigma_reference"] == 2.0
    assert abs(payload["sigma_fit"] - 2.0) <= 0.15
    assert payload["domain"]["type"] == "cube"


def test_certify_upper_halfball(domains, capsys):
    code = cli.main(["certify", "--domain", domains["halfball3"],
                     "--kind", "upper-ellipsoid", "--degree", "5"])
    assert code == 0
    cert = json.loads(capsys.readouterr().out)
    assert cert["verified"] is True
    assert cert["det_scaling"] == pytest.approx(800.0, rel=1e-12)
    assert cert["rate_exponent"] == 4.0


def test_certify_premise_failure_exit_code(domains, tmp_path, capsys):
    mapfile = tmp_path / "map.json"
    mapfile.write_text(json.dumps(
        {"A": [[1.01, 0.0], [0.0, 1.01]], "b": [0.0, 0.0]}
    ))
    code = cli.main(["certify", "--domain", domains["disk"],
                     "--kind", "upper-ellipsoid", "--degree", "4",
                     "--map-file", str(mapfile)])
    assert code == 5


def test_certify_lower_parallel(domains, capsys):
    code = cli.main(["certify", "--domain", domains["ball15"],
                     "--kind", "lower-parallel", "--degree", "10"])
    assert code == 0
    cert = json.loads(capsys.readouterr().out)
    assert cert["rate_exponent"] == pytest.approx(10 / 3, abs=0.02)
    assert cert["value"] > 0


def test_certify_lower_tensor_halfball(domains, capsys):
    code = cli.main(["certify", "--domain", domains["halfball3"],
                     "--kind", "lower-tensor", "--degree", "9"])
    assert code == 0
    cert = json.loads(capsys.readouterr().out)
    assert cert["verified"] is True
    np.testing.assert_allclose(cert["point"], [1.0, 0.0, 0.0], atol=1e-12)


def test_certify_upper_cone(domains, capsys):
    code = cli.main(["certify", "--domain", domains["ball15"],
                     "--kind", "upper-cone", "--degree", "6"])
    assert code == 0
    cert = json.loads(capsys.readouterr().out)
    assert cert["verified"] is True
    assert cert["rate_exponent"] == pytest.approx(10 / 3, rel=1e-12)


def test_norms_command(domains, capsys):
    code = cli.main(["norms", "--domain", domains["cube2"], "--degree", "4",
                     "--q", "2", "--r", "inf", "--seed", "3"])
    assert code == 0
    record = json.loads(capsys.readouterr().out)
    assert record["passed"] is True
    assert record["ratio"] <= record["bound_direct"] * (1 + 1e-9)


def test_table_command(capsys):
    code = cli.main(["table"])
    assert code == 0
    rows = json.loads(capsys.readouterr().out)
    by_label = {r["label"]: r["sigma"] for r in rows}
    assert by_label["ball_p d=2 p=1.0"] == 4.0
    assert by_label["disk x interval"] == 5.0
    assert by_label["cone over disk"] == 6.0
    assert by_label["half-ball d=3"] == 5.0


def test_table_csv(capsys):
    code = cli.main(["table", "--format", "csv"])
    assert code == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "label,type,dim,sigma"
    assert len(lines) > 10


def test_domain_round_trip_via_cli_schema(domains):
    dom = ch.load_domain(domains["ball15"])
    again = ch.domain_from_json(dom.to_json())
    assert again.to_dict() == dom.to_dict()
