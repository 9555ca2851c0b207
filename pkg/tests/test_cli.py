import shutil
import subprocess
import sys
from pathlib import Path

import pytest

from helpers import data_text
from kbmc.bayes_net import from_text
from kbmc.cli import main


@pytest.fixture
def data(tmp_path):
    def put(name, text=None):
        p = tmp_path / name
        p.write_text(data_text(name) if text is None else text, encoding="utf-8")
        return str(p)
    return put


def test_check_ok(data, capsys):
    assert main(["check", data("example2.kb")]) == 0
    out = capsys.readouterr().out
    assert "ok" in out and "3 LocalStat" in out and "2 GroundFact" in out


def test_check_reports_located_errors(data, capsys):
    path = data("bad.kb", "kbmc-kb 1\nsort S;\npred P(S);\nfact P(A &.\n")
    assert main(["check", path]) == 1
    assert f"{path}:4:10:" in capsys.readouterr().err


def test_check_empty(data, capsys):
    assert main(["check", data("empty.kb", "")]) == 0
    assert "empty" in capsys.readouterr().out


def test_construct_writes_network_and_report(data, tmp_path, capsys):
    out, rep = tmp_path / "w.bn", tmp_path / "w.report"
    code = main(["construct", data("example2.kb"), data("watson_e002.req"), "-o", str(out),
                 "--report", str(rep)])
    assert code == 0
    net = from_text(out.read_text())
    assert len(net) == 2
    assert "@item3" in rep.read_text()


def test_construct_strict_fails_on_warnings(data, capsys):
    assert main(["construct", data("holmes.kb"), data("holmes_e002.req"), "--strict"]) == 1
    err = capsys.readouterr().err
    assert "warning:" in err and "--strict" in err


def test_construct_dot(data, capsys):
    assert main(["construct", data("holmes.kb"), data("holmes_e002.req"), "--format", "dot"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("digraph kbmc {") and out.count("->") == 2


def test_construct_conflict_is_a_user_error(data, capsys):
    extra = ("@item3b: stat [ReportsAlarm(e, Watson, x) | ~AlarmSound(e, x) & HouseWithAlarm(x)"
             " & LivesNear(x, Watson)]_{e, x} = 0.2.\n")
    kb = data("conflict.kb", data_text("example2.kb") + extra)
    assert main(["construct", kb, data("watson_e002.req")]) == 1
    assert "unresolved conflict" in capsys.readouterr().err


def test_infer_both_methods_agree(data, tmp_path, capsys):
    bn = tmp_path / "w.bn"
    main(["construct", data("example2.kb"), data("watson_e002.req"), "-o", str(bn)])
    capsys.readouterr()
    assert main(["infer", str(bn), data("watson_e002.req")]) == 0
    ve = capsys.readouterr().out
    assert main(["infer", str(bn), data("watson_e002.req"), "--method", "brute"]) == 0
    assert capsys.readouterr().out == ve
    # uniform prior: P(A | R) = (9/20) / (9/20 + 3/20) = 3/4
    assert "P(AlarmSound(E002,MyHouse)=true | ReportsAlarm(E002,Watson,MyHouse)=true) = 3/4" in ve


def test_infer_joint_cap(data, tmp_path, capsys):
    bn = tmp_path / "h.bn"
    main(["construct", data("holmes.kb"), data("holmes_e002.req"), "-o", str(bn)])
    assert main(["infer", str(bn), data("holmes_e002.req"), "--method", "brute", "--joint-cap", "4"]) == 1
    assert "cap" in capsys.readouterr().err


def test_oracle_on_coin_model(data, capsys):
    assert main(["oracle", data("coins.kb"), data("coins.model")]) == 0
    out = capsys.readouterr().out
    assert "3/3 sentences true" in out


def test_oracle_reports_false_sentences(data, capsys):
    model = data_text("coins.model").replace("pred Fair: C01;", "pred Fair:")
    assert main(["oracle", data("coins.kb"), data("bad.model", model)]) == 1
    assert "@ex2\tfalse" in capsys.readouterr().out


def test_translate_round_trip(data, tmp_path):
    bn, kb, back = tmp_path / "h.bn", tmp_path / "h.kb", tmp_path / "back.bn"
    main(["construct", data("holmes.kb"), data("holmes_e002.req"), "-o", str(bn)])
    assert main(["translate", str(bn), "-o", str(kb)]) == 0
    assert "// rename" in kb.read_text()
    assert main(["translate", str(kb), "-o", str(back)]) == 0
    assert back.read_text() == bn.read_text()


def test_translate_needs_known_format(data, capsys):
    assert main(["translate", data("x.txt", "hello\n")]) == 1
    assert "--to" in capsys.readouterr().err


def test_missing_file_is_a_user_error(capsys):
    assert main(["check", "/nonexistent/file.kb"]) == 1


def test_console_script_runs():
    exe = shutil.which("kbmc")
    cmd = [exe] if exe else [sys.executable, "-m", "kbmc.cli"]
    res = subprocess.run(cmd + ["--version"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.startswith("kbmc ")


def test_module_entry_point(tmp_path):
    kb = tmp_path / "h.kb"
    kb.write_text(data_text("holmes.kb"))
    res = subprocess.run([sys.executable, "-m", "kbmc.cli", "check", str(kb)],
                         capture_output=True, text=True, env={"KBMC_COLOR": "never", "PATH": ""})
    assert res.returncode == 0, res.stderr
    assert Path(kb).name in res.stdout
