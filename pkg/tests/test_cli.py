import pytest

from isingforge.bundled import BUNDLED
from isingforge.cli import PipelineConfig, main


@pytest.fixture
def models(tmp_path):
    for name, text in BUNDLED.items():
        (tmp_path / f"{name}.model").write_text(text)
    return tmp_path


def test_compile_writes_graph_and_provenance(models):
    out = models / "tri.graph"
    assert main(["compile", str(models / "triangle.model"), "-o", str(out)]) == 0
    text = out.read_text()
    assert text.count("\nvertex ") == 4 and "prefactor" in text
    assert "constraint t0 t1 t2" in (models / "tri.graph.prov").read_text()


def test_compile_is_deterministic(models):
    outs = []
    for k in range(2):
        out = models / f"s{k}.graph"
        main(["compile", str(models / "potts4-chain.model"), "-o", str(out)])
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_verify_pass_and_mutation(models):
    out = models / "tri.graph"
    main(["compile", str(models / "triangle.model"), "-o", str(out)])
    assert main(["verify", str(models / "triangle.model"), "-c", str(out), "--tol", "1e-10"]) == 0
    lines = out.read_text().splitlines()
    parts = lines[1].split()
    parts[3] = str(int(parts[3]) + 1)  # +i*pi/4 on one vertex
    lines[1] = " ".join(parts)
    bad = models / "bad.graph"
    bad.write_text("\n".join(lines) + "\n")
    assert main(["verify", str(models / "triangle.model"), "-c", str(bad)]) == 1


def test_exit_codes(models):
    empty = models / "empty.model"
    empty.write_text("")
    assert main(["compile", str(empty)]) == 2
    bad = models / "sem.model"
    bad.write_text("site a spin\nterm {a b} 1\n")
    assert main(["compile", str(bad)]) == 3
    big = models / "big.model"
    big.write_text("".join(f"site s{i} spin\n" for i in range(30)) +
                   "".join(f"term {{s{i} s{i + 1}}} 0.1\n" for i in range(29)))
    assert main(["verify", str(big), "--cap", "28"]) == 4
    assert main(["compile", str(models / "missing.model")]) == 2


def test_config_validation():
    with pytest.raises(ValueError):
        PipelineConfig("x", tol=0)
    with pytest.raises(ValueError):
        PipelineConfig("x", cap=29)


def test_planarize_and_trace(models):
    graph = models / "tri.graph"
    main(["compile", str(models / "strip.model"), "-o", str(graph)])
    grid = models / "tri.grid"
    assert main(["planarize", str(graph), "-o", str(grid), "--trace", str(models / "tr")]) == 0
    assert grid.read_text().startswith("grid ")
    assert (models / "tr" / "rewrite.log").read_text().strip()
    assert (models / "tr" / "step_0001.graph").exists()
    assert main(["verify", str(models / "strip.model"), "-c", str(grid)]) == 0


@pytest.mark.parametrize("name", ["triangle", "potts4-chain"])
def test_pipeline(models, name, capsys):
    out = models / "p.grid"
    assert main(["pipeline", str(models / f"{name}.model"), "-o", str(out)]) == 0
    printed = capsys.readouterr().out
    assert "PASS" in printed


def test_pipeline_stepwise_report(models, capsys):
    assert main(["pipeline", str(models / "hexagon.model"), "-o", str(models / "h.grid"),
                 "--cap", "20"]) == 0
    assert "verified-through-step-" in capsys.readouterr().out


def test_dual(models, capsys):
    assert main(["dual", str(models / "triangle.model")]) == 0
    assert "dual PASS" in capsys.readouterr().out
