import json

from k0silting.cli import main

from conftest import fixture_path


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, (json.loads(out) if out.strip() else None), err


def test_hom_examples(capsys):
    code, out, _ = run(capsys, "hom", "--complex", fixture_path("s3.complex.json"))
    assert code == 0 and out["report"]["dimension"] == 1
    code, out, _ = run(capsys, "hom", "--complex", fixture_path("s1.complex.json"), "--shift", "1")
    assert code == 0 and out["report"]["dimension"] == 0
    code, out, _ = run(capsys, "hom", "--complex", fixture_path("s1.complex.json"),
                       "--target", fixture_path("s3.complex.json"), "--shift", "2")
    assert out["report"]["dimension"] == 1


def test_gamma_and_class(capsys, tmp_path):
    code, out, err = run(capsys, "gamma")
    assert code == 0 and out["report"]["gamma"] == {"P1": -1, "P2": 1}
    assert "P2: +1, P1: -1" in err
    shifted = tmp_path / "sp2.json"
    shifted.write_text(json.dumps({"terms": {"-1": ["2"]}}))
    code, out, _ = run(capsys, "gamma", "--class", "--complex", str(shifted))
    assert out["report"]["class"] == {"P2": -1} and out["report"]["shift"] == 1


def test_gamma_outside_f(capsys, tmp_path):
    p = tmp_path / "neg.json"
    p.write_text(json.dumps({"terms": {"-1": ["2"]}}))
    code, out, err = run(capsys, "gamma", "--complex", str(p))
    assert code == 2 and "not in F" in err


def test_verify_commands(capsys):
    assert run(capsys, "verify", "example-4-3")[0] == 0
    code, out, _ = run(capsys, "verify", "presilting", "--silting", fixture_path("rigid2.json"))
    assert code == 1 and out["report"]["first_failing_shift"] == 2
    assert run(capsys, "verify", "presilting")[0] == 0
    assert run(capsys, "verify", "silting-cert")[0] == 0
    assert run(capsys, "verify", "jordan-holder", "--samples", "4")[0] == 0
    assert run(capsys, "verify", "horseshoe", "--samples", "4")[0] == 0
    assert run(capsys, "verify", "fd-closure", "--silting", fixture_path("rigid2.json"))[0] == 1
    code, out, _ = run(capsys, "verify", "cluster-n", "--d", "2")
    assert code == 0 and out["report"]["all_generators_zero"]


def test_k0_isomorphism_report(capsys):
    code, out, _ = run(capsys, "verify", "theorem-a", "--samples", "40")
    assert code == 0
    assert out["report"]["rank"] == 3 and out["report"]["torsion"] == []


def test_precondition_and_usage_errors(capsys, tmp_path):
    assert run(capsys, "verify", "silting-cert", "--silting", fixture_path("rigid2.json"))[0] == 2
    assert run(capsys, "verify", "cluster-n")[0] == 2
    assert run(capsys, "verify", "theorem-a", "--field", "Fp:4")[0] == 2
    assert run(capsys, "verify", "nonsense")[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"vertices": [1, 2\n')
    code, _, err = run(capsys, "hom", "--algebra", str(bad))
    assert code == 2 and "line 2" in err
    assert run(capsys, "hom", "--complex", str(tmp_path / "missing.json"))[0] == 2


def test_reports_are_deterministic(capsys):
    first = run(capsys, "verify", "horseshoe", "--samples", "6", "--seed", "4")[1]
    second = run(capsys, "verify", "horseshoe", "--samples", "6", "--seed", "4")[1]
    parallel = run(capsys, "verify", "horseshoe", "--samples", "6", "--seed", "4", "--jobs", "2")[1]
    assert first == second == parallel
