"""ising-forge command line driver.

Exit codes: 0 ok, 1 verification failed, 2 parse error, 3 semantic error,
4 enumeration cap exceeded.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

from .compiler import compile_with_provenance
from .duality import decimate_all
from .dsl import parse_model
from .errors import (CapExceededError, IsingForgeError, MalformedGraphError, ModelSemanticError,
                     ModelSyntaxError)
from .evaluator import DEFAULT_CAP, check_equivalence, exact_z_ising, exact_z_model
from .fields import Prefactor
from .graph import IsingGraph
from .pipeline import VERIFY_CAP, graph_z, grid_z, run_pipeline
from .planarizer import embed_grid
from .potts import encode_potts
from .serialize import (dump_graph, dump_grid, dump_provenance, load_artifact, load_graph)

__all__ = ["PipelineConfig", "cmd_compile", "cmd_verify", "cmd_planarize", "cmd_dual",
           "cmd_pipeline", "main", "EXIT_OK", "EXIT_VERIFY_FAIL", "EXIT_PARSE", "EXIT_SEMANTIC",
           "EXIT_CAP"]

EXIT_OK = 0
EXIT_VERIFY_FAIL = 1
EXIT_PARSE = 2
EXIT_SEMANTIC = 3
EXIT_CAP = 4


@dataclass(frozen=True)
class PipelineConfig:
    input: Path
    output: Path | None = None
    stages: tuple[str, ...] = ("compile",)
    cap: int = VERIFY_CAP
    tol: float = 1e-10
    trace: Path | None = None
    threads: int | None = None
    artifact: Path | None = None

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tolerance must be positive")
        if not 1 <= self.cap <= DEFAULT_CAP:
            raise ValueError(f"cap must be between 1 and {DEFAULT_CAP}")
        if self.threads is not None and self.threads < 1:
            raise ValueError("thread count must be at least 1")


def _read(path: Path) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise ModelSyntaxError(f"cannot read {path}: {exc.strerror}", 1, 1) from None


def _emit(config: PipelineConfig, text: str) -> None:
    if config.output is None:
        sys.stdout.write(text)
    else:
        Path(config.output).write_text(text)


def _is_artifact(text: str) -> bool:
    for raw in text.splitlines():
        body = raw.split("#", 1)[0].split()
        if body:
            return body[0] in ("graph", "grid")
    return False


def _spin_model(text: str):
    model = parse_model(text)
    if model.is_pure_spin:
        return model, model, Prefactor.one()
    spin, p = encode_potts(model)
    return model, spin, p


def _write_trace(directory: Path, trace, final_text: str | None = None) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    log = []
    for step in trace:
        (directory / f"step_{step.step:04d}.graph").write_text(dump_graph(step.graph, step.delta))
        log.append(step.log_line())
    (directory / "rewrite.log").write_text("".join(line + "\n" for line in log))
    if final_text is not None:
        (directory / "layout.grid").write_text(final_text)


def _report(label: str, verdict, z_a, z_b) -> None:
    print(f"{label} {'PASS' if verdict.passed else 'FAIL'} rel {verdict.rel_error!r}")
    print(f"  lhs {z_a}")
    print(f"  rhs {z_b}")


# ------------------------------------------------------------------ commands


def cmd_compile(config: PipelineConfig) -> int:
    """Model text -> compiled graph text (prefactor P with Z_model = P * Z_graph)."""
    _, spin, p_enc = _spin_model(_read(config.input))
    g, p, origin = compile_with_provenance(spin)
    _emit(config, dump_graph(g, p_enc * p))
    if config.output is not None:
        Path(str(config.output) + ".prov").write_text(dump_provenance(origin))
    return EXIT_OK


def cmd_verify(config: PipelineConfig) -> int:
    """Compare Z of a model (or graph) with Z of its compiled or given artifact."""
    text = _read(config.input)
    if _is_artifact(text):
        g, p_in = load_graph(text)
        if len(g.free_vertices()) > config.cap:
            raise CapExceededError(f"{len(g.free_vertices())} free spins exceed the cap of {config.cap}")
        z_a = exact_z_ising(g, cap=config.cap, threads=config.threads)
        if config.artifact is None:
            grid = embed_grid(g)
            z_b, p = grid_z(grid, config.cap, config.threads), grid.prefactor
        else:
            z_b, p = _artifact_z(config)
            p = p / p_in
    else:
        model, spin, p_enc = _spin_model(text)
        if model.n_configs > 1 << config.cap:
            raise CapExceededError(f"model has {model.n_configs} configurations, above 2^{config.cap}")
        z_a = exact_z_model(model, cap=config.cap, threads=config.threads)
        if config.artifact is None:
            g, p = compile_with_provenance(spin)[:2]
            p = p_enc * p
            if len(g.free_vertices()) > config.cap:
                raise CapExceededError(
                    f"compiled graph has {len(g.free_vertices())} free spins, above {config.cap}")
            z_b = exact_z_ising(g, cap=config.cap, threads=config.threads)
        else:
            z_b, p = _artifact_z(config)
    verdict = check_equivalence(z_a, z_b, p, config.tol)
    _report("verify", verdict, z_a, z_b)
    return EXIT_OK if verdict.passed else EXIT_VERIFY_FAIL


def _artifact_z(config: PipelineConfig):
    kind, obj = load_artifact(_read(config.artifact))
    if kind == "grid":
        return grid_z(obj, config.cap, config.threads), obj.prefactor
    g, p = obj
    if len(g.free_vertices()) > config.cap:
        raise CapExceededError(f"{len(g.free_vertices())} free spins exceed the cap of {config.cap}")
    return exact_z_ising(g, cap=config.cap, threads=config.threads), p


def cmd_planarize(config: PipelineConfig) -> int:
    """Graph text -> grid text; the grid prefactor keeps the file's own prefactor."""
    g, p = load_graph(_read(config.input))
    trace: list | None = [] if config.trace is not None else None
    grid = embed_grid(g, trace=trace)
    grid = type(grid)(grid.width, grid.height, grid.fields, p * grid.prefactor, grid.fixed)
    text = dump_grid(grid)
    _emit(config, text)
    if trace is not None:
        _write_trace(config.trace, trace, text)
    return EXIT_OK


def cmd_dual(config: PipelineConfig) -> int:
    """Compile a model, sum out every term spin of degree 1..3 and check Z."""
    model, spin, p_enc = _spin_model(_read(config.input))
    g, p, _ = compile_with_provenance(spin)
    terms = [v for v in g.vertices if v.startswith("t") and 1 <= g.degree(v) <= 3]
    dual = decimate_all(g, terms)
    lines = ["vertex neighbours A couplings"]
    for v, fit in dual.fits:
        cs = " ".join(f"{'.'.join(T)}={c.real!r}{c.imag:+}i" for T, c in fit.couplings.items())
        lines.append(f"{v} {','.join(fit.neighbors)} {fit.A.real!r}{fit.A.imag:+}i {cs}")
    _emit(config, "\n".join(lines) + "\n")
    if model.n_configs > 1 << config.cap or len(dual.graph) > config.cap:
        raise CapExceededError("model or decimated graph exceeds the verification cap")
    z_a = exact_z_model(model, cap=config.cap, threads=config.threads)
    z_b = exact_z_model(dual.to_spin_model(), cap=config.cap, threads=config.threads)
    verdict = check_equivalence(z_a, z_b, p_enc * p * dual.prefactor, config.tol)
    _report("dual", verdict, z_a, z_b)
    return EXIT_OK if verdict.passed else EXIT_VERIFY_FAIL


def cmd_pipeline(config: PipelineConfig) -> int:
    """Model -> grid. Verify end to end when the grid is small enough, else step by step."""
    model = parse_model(_read(config.input))
    result = run_pipeline(model)
    text = dump_grid(type(result.grid)(result.grid.width, result.grid.height, result.grid.fields,
                                       result.total_prefactor, result.grid.fixed))
    _emit(config, text)
    if config.trace is not None:
        _write_trace(config.trace, result.trace, text)
    grid = result.grid
    print(f"grid {grid.width}x{grid.height} free {grid.n_free} fixed {len(grid.fixed)} "
          f"steps {len(result.trace)}")
    if model.n_configs > 1 << config.cap:
        raise CapExceededError(f"model has {model.n_configs} configurations, above 2^{config.cap}")
    z_model = exact_z_model(model, cap=config.cap, threads=config.threads)
    if grid.n_free <= config.cap:
        z_grid = grid_z(grid, config.cap, config.threads)
        verdict = check_equivalence(z_model, z_grid, result.total_prefactor, config.tol)
        _report("end-to-end", verdict, z_model, z_grid)
        return EXIT_OK if verdict.passed else EXIT_VERIFY_FAIL

    # stage check: model against the compiled graph
    g = result.graph
    ok = True
    if len(g) <= config.cap:
        z_g = exact_z_ising(g, cap=config.cap, threads=config.threads)
        v = check_equivalence(z_model, z_g, result.graph_prefactor, config.tol)
        _report("compile", v, z_model, z_g)
        ok = v.passed
    verified = 0
    prev: IsingGraph = g
    for step in result.trace:
        if not ok or len(prev.free_vertices()) > config.cap or len(step.graph.free_vertices()) > config.cap:
            break
        z_pre = exact_z_ising(prev, cap=config.cap, threads=config.threads)
        z_post = exact_z_ising(step.graph, cap=config.cap, threads=config.threads)
        v = check_equivalence(z_pre, z_post, step.delta, config.tol)
        if not v.passed:
            _report(f"step {step.step} {step.rule}", v, z_pre, z_post)
            return EXIT_VERIFY_FAIL
        verified = step.step
        prev = step.graph
    print(f"verified-through-step-{verified}")
    try:
        z_grid = graph_z(grid.to_ising_graph(), config.cap, config.threads)
    except CapExceededError:
        return EXIT_OK if ok else EXIT_VERIFY_FAIL
    verdict = check_equivalence(z_model, z_grid, result.total_prefactor, config.tol)
    _report("end-to-end (elimination)", verdict, z_model, z_grid)
    return EXIT_OK if ok and verdict.passed else EXIT_VERIFY_FAIL


COMMANDS = {
    "compile": cmd_compile,
    "verify": cmd_verify,
    "planarize": cmd_planarize,
    "dual": cmd_dual,
    "pipeline": cmd_pipeline,
}


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ising-forge",
                                 description="Compile discrete spin models to i*pi/4 grid Ising models.")
    ap.add_argument("command", choices=list(COMMANDS))
    ap.add_argument("input", type=Path)
    ap.add_argument("-o", "--output", type=Path)
    ap.add_argument("-c", "--compiled", type=Path, help="artifact to verify against (verify only)")
    ap.add_argument("--tol", type=float, default=1e-10)
    ap.add_argument("--cap", type=int, default=VERIFY_CAP)
    ap.add_argument("--trace", type=Path)
    ap.add_argument("--threads", type=int)
    return ap


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        config = PipelineConfig(args.input, args.output, (args.command,), args.cap, args.tol,
                                args.trace, args.threads, args.compiled)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        return COMMANDS[args.command](config)
    except ModelSyntaxError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except CapExceededError as exc:
        print(f"cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (ModelSemanticError, MalformedGraphError) as exc:
        print(f"semantic error: {exc}", file=sys.stderr)
        return EXIT_SEMANTIC
    except IsingForgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SEMANTIC


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
