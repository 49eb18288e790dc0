import io
import json
import random

import pytest

from backresp import tsr, zoo
from backresp.cli import main
from backresp.weights import emit_weights, shapley_weights
from helpers import random_model


@pytest.fixture
def write_model(tmp_path):
    def write(model, name="m.tsr"):
        path = tmp_path / name
        path.write_text(tsr.emit_tsr(model))
        return str(path)

    return write


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_analyze_train_table(capsys, write_model):
    code, out, _ = run(capsys, "analyze", "--input", write_model(zoo.train()), "--mode", "pessimistic")
    assert code == 0
    rows = {ln.split()[0]: ln.split()[2] for ln in out.splitlines()[3:] if not ln.startswith("#")}
    assert rows == {"s1": "1/6", "s2": "2/3", "s3": "1/6", "dest": "0", "crash": "0"}


def test_analyze_fast(capsys, write_model):
    code, out, _ = run(capsys, "analyze", "-i", write_model(zoo.train()), "--mode", "optimistic", "--engine", "fast")
    assert code == 0
    assert "# |W| = 2" in out
    assert "1/2" in out


def test_fast_rejects_pessimistic(capsys, write_model):
    code, _, err = run(capsys, "analyze", "-i", write_model(zoo.train()), "--engine", "fast")
    assert code == 2 and "optimistic" in err


def test_generate_then_analyze_grouped(capsys, tmp_path):
    out_file = tmp_path / "t5.tsr"
    assert main(["generate", "train", "--param", "branches=5", "-o", str(out_file)]) == 0
    code, out, _ = run(capsys, "analyze", "-i", str(out_file), "--use-groups", "--output", "json")
    assert code == 0
    vals = {p["name"]: (p["exact"]["num"], p["exact"]["den"]) for p in json.loads(out)["players"]}
    assert vals["s1"] == (1, 6) and vals["s2"] == (2, 3) and vals["t"] == (1, 6)


def test_generate_dresden_piped(capsys, monkeypatch):
    code, text, _ = run(capsys, "generate", "dresden")
    assert code == 0
    monkeypatch.setattr("sys.stdin", io.StringIO(text))
    code, out, _ = run(capsys, "analyze", "--output", "csv")
    assert code == 0
    assert "35,0.7500,3/4" in out.splitlines()


def test_generate_json_round_trip(capsys, tmp_path):
    path = tmp_path / "g.json"
    assert main(["generate", "generals", "--param", "N=3", "--format", "json", "-o", str(path)]) == 0
    model = tsr.loads(path.read_text())
    assert model.system.num_states == 9


def test_generate_bad_param(capsys):
    code, _, err = run(capsys, "generate", "generals", "--param", "N=99")
    assert code == 2 and "N must lie" in err


def test_validate_ok(capsys, write_model):
    code, out, _ = run(capsys, "validate", write_model(zoo.train()))
    assert code == 0
    assert "5 states" in out and "counterexample of length 3" in out


def test_validate_repeated_state(capsys, tmp_path):
    text = tsr.emit_tsr(zoo.train()).replace("counterexample 0 1 4", "counterexample 0 0 1 4")
    assert "0 0 1 4" in text
    path = tmp_path / "bad.tsr"
    path.write_text(text)
    code, _, err = run(capsys, "validate", str(path))
    assert code == 2
    assert "RepeatedState" in err


def test_validate_syntax_error(capsys, tmp_path):
    path = tmp_path / "junk.tsr"
    path.write_text("not a model\n")
    code, _, err = run(capsys, "validate", str(path))
    assert code == 2 and "SyntaxError" in err


def test_missing_file(capsys):
    code, _, err = run(capsys, "validate", "/nonexistent/file.tsr")
    assert code == 2 and "cannot read" in err


def test_cap_exit(capsys, write_model):
    m = random_model(random.Random(5), 30)
    code, _, err = run(capsys, "analyze", "-i", write_model(m))
    assert code == 3
    assert "--use-groups" in err and "sample" in err


def test_sample_budget_too_small(capsys, tmp_path):
    path = tmp_path / "g.tsr"
    # ten players means ten coalition sizes
    main(["generate", "train", "--param", "branches=6", "-o", str(path)])
    capsys.readouterr()
    code, _, err = run(capsys, "sample", "-i", str(path), "--samples", "3")
    assert code == 4 and "BudgetTooSmall" in err


def test_sample_train_close_to_exact(capsys, write_model):
    code, out, _ = run(capsys, "sample", "-i", write_model(zoo.train()), "--samples", "10000", "--seed", "1", "--output", "json")
    assert code == 0
    est = {p["name"]: p["estimate"] for p in json.loads(out)["players"]}
    for name, target in {"s1": 1 / 6, "s2": 2 / 3, "s3": 1 / 6, "dest": 0, "crash": 0}.items():
        assert abs(est[name] - target) <= 0.05


def test_sample_output_is_byte_identical(capsys, write_model):
    path = write_model(zoo.dresden())
    outputs = set()
    for threads in ("1", "4", "1"):
        code, out, _ = run(capsys, "sample", "-i", path, "--samples", "5000", "--seed", "2", "--threads", threads, "--output", "json")
        assert code == 0
        outputs.add(out)
    assert len(outputs) == 1


def test_time_budget(capsys, write_model):
    code, out, _ = run(capsys, "sample", "-i", write_model(zoo.train()), "--time-budget", "0.2", "--output", "json")
    assert code == 0
    assert sum(json.loads(out)["plan"]["allocation"]) >= 5


def test_custom_weights(capsys, tmp_path, write_model):
    wfile = tmp_path / "w.txt"
    wfile.write_text(emit_weights(shapley_weights(5)))
    model = write_model(zoo.train())
    _, shap, _ = run(capsys, "analyze", "-i", model)
    code, custom, _ = run(capsys, "analyze", "-i", model, "--index", f"custom:{wfile}")
    assert code == 0
    strip = lambda s: [ln for ln in s.splitlines() if not ln.startswith("#")]  # noqa: E731
    assert strip(shap) == strip(custom)


def test_custom_weights_wrong_length(capsys, tmp_path, write_model):
    wfile = tmp_path / "w.txt"
    wfile.write_text(emit_weights(shapley_weights(3)))
    code, _, err = run(capsys, "analyze", "-i", write_model(zoo.train()), "--index", f"custom:{wfile}")
    assert code == 2 and "3 entries" in err


def test_threads_env(monkeypatch, capsys, write_model):
    monkeypatch.setenv("RESP_THREADS", "3")
    code, out, _ = run(capsys, "analyze", "-i", write_model(zoo.train()), "--output", "json")
    assert code == 0 and out.endswith("\n")
