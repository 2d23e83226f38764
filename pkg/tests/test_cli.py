import json
from fractions import Fraction as Fr

import mpmath
import pytest

from shintani_stark import cli
from shintani_stark.cli import (EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_PASS, JobConfig, Report, digits_to_bits,
                                main, parse_config_text, parse_element, real_str, recognize_escalating, run)
from shintani_stark.recognize import FOUND, INCONCLUSIVE


def run_json(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_zeta0_command(capsys):
    code, rep = run_json(capsys, ["zeta0"])
    assert code == EXIT_PASS
    assert rep["results"]["zeta0"] == {"c1": "1/4", "c2": "1/4", "c3": "-1/4", "c4": "-1/4"}
    assert rep["results"]["group"]["order"] == 4
    assert rep["inputs"]["d"] == 5 and rep["provenance"]["a_c"] == "1"


def test_output_is_deterministic(capsys):
    main(["zeta0"])
    first = capsys.readouterr().out
    main(["zeta0"])
    assert capsys.readouterr().out == first
    assert "timing" not in first


def test_timing_is_opt_in(capsys):
    _, rep = run_json(capsys, ["zeta0", "--timing"])
    assert "seconds" in rep["timing"]


def test_json_file(tmp_path, capsys):
    path = tmp_path / "out.json"
    main(["zeta0", "--json", str(path)])
    printed = capsys.readouterr().out
    assert json.loads(path.read_text()) == json.loads(printed)


def test_xinv_command(capsys):
    code, rep = run_json(capsys, ["xinv", "--prec", "160"])
    assert code == EXIT_PASS
    row = rep["results"]["x"]["c1"]["iota1"]
    assert row["X"].startswith("0.33032672659266567379")
    assert row["prec_bits"] == 160


def test_other_field(capsys):
    code, rep = run_json(capsys, ["zeta0", "--d", "2", "--modulus", "3", "--inf", "1,2"])
    assert code == EXIT_PASS
    vals = [Fr(v) for v in rep["results"]["zeta0"].values()]
    assert len(vals) == rep["results"]["group"]["order"]
    assert sum(vals) == 0


def test_unsupported_field_exits_with_failure(capsys):
    assert main(["zeta0", "--d", "10", "--modulus", "1"]) == EXIT_FAIL
    assert "error" in capsys.readouterr().err


def test_low_precision_rejected(capsys):
    assert main(["xinv", "--prec", "64"]) == EXIT_FAIL


def test_verify_needs_check():
    with pytest.raises(SystemExit):
        run(["verify"])


def test_verify_main(capsys):
    code, rep = run_json(capsys, ["verify", "main", "--prec", "200"])
    assert code == EXIT_PASS
    assert len(rep["checks"]) == 8
    assert {c["q"] for c in rep["checks"]} == {"1/8", "-1/8"}


def test_verify_keylemma_with_config(tmp_path, capsys):
    cfg = tmp_path / "job.cfg"
    cfg.write_text("# small run\npoints = 200\nseed = 7\n")
    code, rep = run_json(capsys, ["verify", "keylemma", "--config", str(cfg)])
    assert code == EXIT_PASS
    assert rep["checks"][0]["points"] >= 200
    assert rep["inputs"]["seed"] == 7


def test_verify_identities(tmp_path, capsys):
    cfg = tmp_path / "job.cfg"
    cfg.write_text("identity_count = 40\n")
    code, rep = run_json(capsys, ["verify", "identities", "--config", str(cfg)])
    assert code == EXIT_PASS
    assert all(c["passed"] == c["total"] == 40 for c in rep["checks"])


def test_config_parsing():
    cfg = parse_config_text("d = 5\nmodulus = 6+sqrt(5)  # comment\ninf = 1, 2\nprec = 512\nsubgroup = 1,3\n")
    assert cfg == {"d": 5, "modulus": "6+sqrt(5)", "inf": (1, 2), "precision_bits": 512, "subgroup": (1, 3)}
    with pytest.raises(ValueError):
        parse_config_text("colour = blue")
    with pytest.raises(ValueError):
        parse_config_text("d 5")


def test_cli_overrides_config(tmp_path):
    cfg = tmp_path / "job.cfg"
    cfg.write_text("prec = 512\nseed = 3\n")
    args = cli.build_parser().parse_args(["zeta0", "--config", str(cfg), "--prec", "256"])
    c = cli.make_config(args)
    assert c.precision_bits == 256 and c.seed == 3


def test_parse_element(F):
    assert parse_element("4", F) == F.elem(4)
    assert parse_element("6+sqrt(5)", F) == F.elem(6, 1)
    assert parse_element("-1-2*sqrt5", F) == F.elem(-1, -2)
    assert parse_element("1/2+1/2*sqrt(5)", F) == F.elem(Fr(1, 2), Fr(1, 2))
    assert parse_element("√5", F) == F.elem(0, 1)
    for bad in ("", "x", "sqrt(3)", "4+"):
        with pytest.raises(ValueError):
            parse_element(bad, F)


def test_report_exit_codes():
    rep = Report("t", {})
    assert rep.exit_code() == EXIT_PASS
    rep.add_check("a", "pass")
    rep.add_check("b", INCONCLUSIVE)
    assert rep.exit_code() == EXIT_INCONCLUSIVE
    rep.add_check("c", "fail")
    assert rep.exit_code() == EXIT_FAIL
    assert json.loads(rep.to_json())["status"] == "fail"


def test_digits_to_bits():
    assert digits_to_bits(300) == 997
    assert digits_to_bits(1000) == 3322


def test_real_str_keeps_digits():
    with mpmath.workprec(200):
        x = mpmath.pi
    assert real_str(x, 200).startswith("3.14159265358979323846264338327950288419716939937510")


def test_recognize_escalating_found():
    def value(bits):
        with mpmath.workprec(bits + 10):
            return mpmath.sqrt(2) + mpmath.sqrt(3)

    rec = recognize_escalating(value, 4, 1000, ladder=(60,))
    assert rec.status == FOUND and rec.poly == (1, 0, -10, 0, 1) and rec.digits == 60
    assert rec.entry()["outcome"] == FOUND


def test_recognize_escalating_inconclusive():
    def value(bits):
        with mpmath.workprec(bits + 10):
            return +mpmath.pi

    rec = recognize_escalating(value, 8, 10 ** 6, ladder=(40, 45))
    assert rec.status == INCONCLUSIVE and rec.poly is None
    assert len(rec.trace) == 2


def test_default_config_values():
    c = JobConfig()
    assert (c.d, c.modulus, c.inf, c.max_deg, c.max_height, c.max_den) == (5, "4", (1, 2), 8, 10 ** 6, 10 ** 4)
