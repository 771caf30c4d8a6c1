import io
import json

import pytest

from epicsub.cli import main

from conftest import CORPUS


def run(*argv):
    buf = io.StringIO()
    code = main([str(a) for a in argv], stdout=buf)
    return code, buf.getvalue()


def test_decide_two_lat(tmp_path):
    out_json = tmp_path / "r.json"
    code, text = run("decide", "--mode", "quasivariety", CORPUS / "two_lat.alg", "--json-out", out_json)
    assert code == 1
    assert "verdict: not-surjective" in text and "delta-certificate" in text
    data = json.loads(out_json.read_text())
    assert data["verdict"] == "not-surjective" and data["witness"]["verified"]


def test_decide_exit_codes():
    assert run("decide", "--mode", "quasivariety", CORPUS / "two_bool.alg")[0] == 0
    assert run("decide", "--mode", "variety", CORPUS / "set2.alg")[0] == 2
    assert run("--limit-size", 300, "decide", "--mode", "quasivariety", CORPUS / "extra" / "luk3.alg")[0] == 3


def test_find_term_majority():
    code, text = run("find-term", "majority", CORPUS / "two_lat.alg")
    assert code == 0 and text.strip() == "meet(join(x0,x1),meet(join(x0,x2),join(x1,x2)))"
    assert run("find-term", "pixley", CORPUS / "two_lat.alg")[0] == 1
    assert run("find-term", "nu", "--arity", 4, CORPUS / "two_lat.alg")[0] == 0


def test_epic_check_and_verify(tmp_path):
    cert = tmp_path / "c.cert"
    code, text = run("epic-check", "--b", CORPUS / "square_lat.alg", "--a", "(0,0),(0,1),(1,1)",
                     "--targets", CORPUS / "two_lat.alg", "--emit-certificate", cert)
    assert code == 0 and text.startswith("epic")
    code, text = run("certificate-verify", "--b", CORPUS / "square_lat.alg", "--a", "0,1,3",
                     "--cert", cert, "--targets", CORPUS / "two_lat.alg")
    assert code == 0 and text.strip() == "ok"
    code, text = run("epic-check", "--b", CORPUS / "square_lat.alg", "--a", "0 3",
                     "--targets", CORPUS / "two_lat.alg")
    assert code == 1 and "not epic" in text
    bad = tmp_path / "bad.cert"
    bad.write_text(cert.read_text().replace("meet(x0,x0)=x0", "meet(x0,x0)=x1"))
    code, text = run("certificate-verify", "--b", CORPUS / "square_lat.alg", "--a", "0,1,3",
                     "--cert", bad, "--targets", CORPUS / "two_lat.alg")
    assert code == 1 and "equation-fails" in text
    bad.write_text("nonsense\n")
    code, text = run("certificate-verify", "--b", CORPUS / "square_lat.alg", "--a", "0,1,3",
                     "--cert", bad, "--targets", CORPUS / "two_lat.alg")
    assert code == 1 and "malformed" in text


def test_structure_commands():
    code, text = run("homs", CORPUS / "square_lat.alg", CORPUS / "two_lat.alg")
    assert code == 0 and text.splitlines() == ["2 homomorphisms", "0 0 1 1", "0 1 0 1"]
    assert run("homs", CORPUS / "square_lat.alg", CORPUS / "two_lat.alg", "--count-only")[1] == "2 homomorphisms\n"
    assert run("subalgebras", CORPUS / "square_lat.alg")[1].startswith("4 subuniverses")
    assert run("congruences", CORPUS / "square_lat.alg")[1].startswith("4 congruences")
    assert "20 elements" in run("free", "--gens", 3, CORPUS / "two_lat.alg")[1]
    code, text = run("canon", CORPUS / "square_lat.alg")
    assert code == 0 and text.startswith("encoding ")


def test_errors_exit_4(tmp_path, capsys):
    bad = tmp_path / "bad.alg"
    bad.write_text("size 2\nop f 1 : 0 5\n")
    assert run("subalgebras", bad)[0] == 4
    assert f"{bad}:2:12:" in capsys.readouterr().err
    assert run("homs", CORPUS / "two_lat.alg", CORPUS / "Z2.alg")[0] == 4


def test_global_flags_either_side():
    a = run("--threads", 2, "decide", "--mode", "variety", CORPUS / "two_lat.alg")
    b = run("decide", "--mode", "variety", CORPUS / "two_lat.alg", "--threads", 2)
    assert a == b


def test_unknown_mode_rejected():
    with pytest.raises(SystemExit):
        run("decide", "--mode", "ring", CORPUS / "two_lat.alg")
