"""Operator command line: compile projects, inspect/validate graphs,
simulate playthroughs, and score branching-timing agreement.

Exit codes: 0 ok, 1 input error, 2 validation error, 3 provider
warnings only (graph still emitted).
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import graph as graph_mod
from .config import CompileConfig
from .errors import ConfigError, ContractError, GraphValidationError, LoadError, StorysphereError
from .ingest import load_project
from .pipeline import GraphCompiler
from .simulate import POLICIES, load_script, simulate

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_VALIDATION = 2
EXIT_PROVIDER = 3


@click.group()
def cli():
    """Compile and play back branching narrative graphs for 360-degree video."""


def _read_graph(path: Path) -> graph_mod.BranchGraph:
    if not path.is_file():
        raise LoadError(f"graph: file not found: {path}")
    return graph_mod.parse(path.read_bytes())


@cli.command(name="compile")
@click.argument("manifest", type=click.Path(path_type=Path))
@click.option("--config", "config_path", type=click.Path(path_type=Path), default=None)
@click.option("--out", "out_path", type=click.Path(path_type=Path), default=None)
@click.option("--report", "report_path", type=click.Path(path_type=Path), default=None)
def cmd_compile(manifest: Path, config_path: Path | None, out_path: Path | None, report_path: Path | None):
    """Compile a project manifest into a branch graph document."""
    config = CompileConfig.from_file(config_path) if config_path else CompileConfig()
    inputs = load_project(manifest)
    compiler = GraphCompiler.from_config(config).fit(inputs)
    out_path = out_path or manifest.with_name("branchgraph.json")
    out_path.write_bytes(graph_mod.emit(compiler.graph_))
    report_path = report_path or out_path.with_suffix(".report.json")
    report_path.write_text(
        json.dumps(compiler.report_, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )

    report = compiler.report_
    click.echo(f"graph written to {out_path}")
    click.echo(f"report written to {report_path}")
    click.echo(
        f"{len(compiler.graph_.scenes)} scenes, "
        f"{len(compiler.graph_.branch_points)} branching points"
    )
    for scene in report["scenes"]:
        click.echo(
            f"  scene {scene['scene']}: frames {scene['frames'][0]}-{scene['frames'][1]}, "
            f"{scene['candidates']} candidates -> {scene['selected']} branches"
        )
    for warning in report["warnings"]:
        click.echo(f"warning: {warning}", err=True)
    if report["provider_failures"]:
        click.echo(
            f"provider failed {report['provider_failures']} request(s); "
            "graph emitted with placeholders",
            err=True,
        )
        return EXIT_PROVIDER
    return EXIT_OK


@cli.command(name="validate")
@click.argument("graph_file", type=click.Path(path_type=Path))
def cmd_validate(graph_file: Path):
    """Validate a branch graph document."""
    if not graph_file.is_file():
        raise LoadError(f"graph: file not found: {graph_file}")
    errors = graph_mod.validate(graph_file.read_bytes())
    if errors:
        for error in errors:
            click.echo(f"error: {error}", err=True)
        return EXIT_VALIDATION
    click.echo("ok")
    return EXIT_OK


@cli.command(name="inspect")
@click.argument("graph_file", type=click.Path(path_type=Path))
@click.option("--scene", "scene_index", type=int, default=None)
def cmd_inspect(graph_file: Path, scene_index: int | None):
    """Print a human-readable summary of a graph."""
    graph = _read_graph(graph_file)
    click.echo(f"version {graph.version}; {graph.duration_s} s at {graph.fps} fps")
    times = ", ".join(f"{p.time:g}s ({p.source})" for p in graph.branch_points)
    click.echo(f"branching points: {times or 'none'}")
    scenes = graph.scenes
    if scene_index is not None:
        if not 0 <= scene_index < len(scenes):
            raise ContractError(f"scene {scene_index} outside 0..{len(scenes) - 1}")
        scenes = [scenes[scene_index]]
    for scene in scenes:
        div = scene.diversity
        click.echo(
            f"scene {scene.index} [{scene.frame_range[0]}-{scene.frame_range[1]}] "
            f"{scene.title!r} D={div['overall']:.3f} "
            f"(spa {div['d_spa']:.3f}, sem {div['d_sem']:.3f}, soc {div['d_soc']:.3f})"
        )
        for branch in scene.branches:
            marker = "*" if branch.index == scene.default_branch else " "
            slot = branch.narration
            click.echo(
                f"  {marker} branch {branch.index} {branch.title!r} "
                f"social {branch.social_score:.3f} "
                f"narration [{slot.start_s:g}, {slot.end_s:g}]s budget {slot.word_budget}"
            )
    return EXIT_OK


@cli.command(name="simulate")
@click.argument("graph_file", type=click.Path(path_type=Path))
@click.option("--policy", type=click.Choice(POLICIES), required=True)
@click.option("--script", "script_path", type=click.Path(path_type=Path), default=None)
@click.option("--out", "out_path", type=click.Path(path_type=Path), default=None)
def cmd_simulate(graph_file: Path, policy: str, script_path: Path | None, out_path: Path | None):
    """Traverse a graph deterministically and emit the playthrough trace."""
    graph = _read_graph(graph_file)
    script = None
    if script_path is not None:
        if not script_path.is_file():
            raise LoadError(f"script: file not found: {script_path}")
        script = load_script(script_path.read_bytes())
    trace = simulate(graph, policy, script)
    payload = trace.emit()
    if out_path:
        out_path.write_bytes(payload)
    else:
        sys.stdout.write(payload.decode("utf-8"))
    return EXIT_OK


def _read_times(path: Path) -> list[float]:
    if not path.is_file():
        raise LoadError(f"timing list: file not found: {path}")
    text = path.read_text(encoding="utf-8")
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return _read_graph(path).branch_point_times()
    times = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            times.append(float(line))
        except ValueError:
            raise LoadError(f"timing list: {path} line {line_no} is not a number: {line!r}")
    return times


@cli.command(name="eval-timing")
@click.argument("list_a", type=click.Path(path_type=Path))
@click.argument("list_b", type=click.Path(path_type=Path))
@click.option("--tol", type=float, default=5.0, show_default=True)
def cmd_eval_timing(list_a: Path, list_b: Path, tol: float):
    """Jaccard agreement of two branching-point lists (graphs or text files)."""
    a = _read_times(list_a)
    b = _read_times(list_b)
    matches = graph_mod.jaccard_matching(a, b, tol)
    value = graph_mod.jaccard_agreement(a, b, tol)
    click.echo(f"J = {value:.3f}")
    click.echo(f"matches: {len(matches)} of {len(a)} vs {len(b)}")
    for ta, tb in matches:
        click.echo(f"  {ta:g} ~ {tb:g}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    """Entry point with the documented exit-code contract."""
    try:
        result = cli.main(args=argv, standalone_mode=False)
        return int(result) if isinstance(result, int) else EXIT_OK
    except GraphValidationError as exc:
        for error in exc.errors:
            click.echo(f"error: {error}", err=True)
        return EXIT_VALIDATION
    except (LoadError, ConfigError, ContractError) as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_INPUT
    except StorysphereError as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_INPUT
    except click.ClickException as exc:
        exc.show()
        return EXIT_INPUT
    except click.exceptions.Abort:
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
