"""Command line front end.

Exit codes: 0 on success, 1 when the input parses but violates an
invariant, 2 when it does not parse (click's usage errors also use 2).
"""

from __future__ import annotations

import sys
from functools import wraps

import click

from . import io as wio
from .collapse import collapse as do_collapse
from .collapse import lift_flip
from .exchange import adjacency, enumerate_graph, export_dot
from .flips import backward_flip, dual_sgraph, forward_flip
from .hearts import heart_of, quotient_heart, run_tilt_script, transcript_table
from .schober import collapse_graph, from_sgraph, parse_graph
from .surface import WdmsError, weight_formula_check


class Failure(Exception):
    """Raised by commands to exit with status 1 and a message."""


def _guard(fn):
    @wraps(fn)
    def run(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except wio.ParseError as e:
            click.echo(f"parse error: {e}", err=True)
            sys.exit(2)
        except (WdmsError, Failure, KeyError, ValueError) as e:
            click.echo(f"error: {type(e).__name__}: {e}", err=True)
            sys.exit(1)
    return run


def _read(path) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _load(path):
    doc = wio.parse(_read(path))
    return doc, doc.angulation()


def _emit(text: str, out) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


def parse_script(text: str) -> list:
    """Lines ``forward <arc>`` or ``backward <arc>``; a bare arc means forward."""
    steps = []
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].split()
        if not line:
            continue
        if len(line) == 1:
            steps.append((line[0], "forward"))
        elif len(line) == 2 and line[0] in ("forward", "backward"):
            steps.append((line[1], line[0]))
        else:
            raise wio.ParseError(n, 1, f"cannot read script line {raw.strip()!r}")
    return steps


def format_script(steps, comments=()) -> str:
    lines = [f"# {c}" for c in comments]
    lines += [f"{d} {a}" for a, d in steps]
    return "\n".join(lines) + "\n"


def _selection(doc, select):
    sel = tuple(select) or doc.selection
    if not sel:
        raise Failure("no selection: pass --select or add a select line")
    return sel


def _sgraph_text(S) -> str:
    text = from_sgraph(S).text()
    shifts = "".join(f"# shift {e}={k}\n" for e, k in sorted(S.shifts.items()) if k)
    return text + shifts


@click.group()
@click.version_option(package_name="wdms")
def main():
    """Angulations of weighted decorated marked surfaces."""


@main.command()
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@_guard
def validate(path):
    """Parse, build and check the weight formula."""
    doc, A = _load(path)
    if not weight_formula_check(A):
        raise Failure("weight formula fails")
    if doc.selection:
        do_collapse(A, decorations=doc.selection)
    click.echo(f"ok: genus={A.spec.genus} boundaries={len(A.spec.boundaries)} "
               f"marked={len(A.marked_points())} polygons={len(A.polygons)} arcs={len(A.arcs)}")


@main.command()
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@click.option("--arc", required=True)
@click.option("--backward", is_flag=True, help="Flip backward instead of forward.")
@click.option("--out", type=click.Path(dir_okay=False))
@_guard
def flip(path, arc, backward, out):
    """Flip one arc and print the new angulation."""
    doc, A = _load(path)
    B, _ = (backward_flip if backward else forward_flip)(A, arc)
    _emit(wio.serialize(wio.document_of(B, doc.selection, doc.header)), out)


@main.command()
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@click.option("--script", "script", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", type=click.Path(dir_okay=False))
@_guard
def apply(path, script, out):
    """Replay a flip script and print the result."""
    doc, A = _load(path)
    for arc, d in parse_script(_read(script)):
        A, _ = (forward_flip if d == "forward" else backward_flip)(A, arc)
    _emit(wio.serialize(wio.document_of(A, doc.selection, doc.header)), out)


@main.command()
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", type=click.Path(dir_okay=False))
@_guard
def dual(path, out):
    """Print the dual S-graph in graph text form."""
    _, A = _load(path)
    _emit(_sgraph_text(dual_sgraph(A)), out)


@main.command()
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@click.option("--max-nodes", default=100, show_default=True)
@click.option("--mode", type=click.Choice(["tracked", "canonical"]), default="tracked", show_default=True)
@click.option("--format", "fmt", type=click.Choice(["dot", "adjacency"]), default="dot", show_default=True)
@click.option("--parallel", default=0, metavar="N", help="Expand each BFS level with N threads.")
@click.option("--out", type=click.Path(dir_okay=False))
@_guard
def eg(path, max_nodes, mode, fmt, parallel, out):
    """Enumerate the exchange graph by forward flips."""
    _, A = _load(path)
    G = enumerate_graph(A, max_nodes, mode, workers=parallel)
    _emit(export_dot(G) if fmt == "dot" else adjacency(G), out)


@main.command()
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@click.option("--select", multiple=True, help="Decoration to collapse; repeatable.")
@click.option("--lenient", is_flag=True, help="Allow frontiers along boundary segments, as after a lift.")
@click.option("--out", type=click.Path(dir_okay=False))
@_guard
def collapse(path, select, lenient, out):
    """Collapse the selected decorations and print the result."""
    doc, A = _load(path)
    ctx = do_collapse(A, decorations=_selection(doc, select), strict=not lenient)
    _emit(wio.serialize(ctx.collapsed), out)


@main.command()
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@click.option("--select", multiple=True)
@click.option("--arc", required=True)
@click.option("--out", type=click.Path(dir_okay=False))
@_guard
def lift(path, select, arc, out):
    """Print a flip script on the input that realises a flip after collapse."""
    doc, A = _load(path)
    ctx = do_collapse(A, decorations=_selection(doc, select))
    L = lift_flip(ctx, arc)
    steps = [(a, "forward") for a in L.preparation + L.flips]
    notes = [f"lift of {arc}, type {L.kind}"]
    if L.preparation:
        notes.append(f"first {len(L.preparation)} flips prepare the refinement")
    if L.half_edges:
        notes.append("half-edges at A: " + " ".join(map(str, L.half_edges)))
    _emit(format_script(steps, notes), out)


@main.command()
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@click.option("--script", "script", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--select", multiple=True, help="Also print the quotient heart for this selection.")
@click.option("--out", type=click.Path(dir_okay=False))
@_guard
def tilt(path, script, select, out):
    """Run a tilt script on the heart of the input; print the transcript."""
    doc, A = _load(path)
    H0 = heart_of(A)
    H, steps = run_tilt_script(H0, parse_script(_read(script)))
    text = transcript_table(H0, steps)
    text += "".join(f"{n}: {H.text(n)}\n" for n in sorted(H.simples))
    if select:
        ctx = do_collapse(A, decorations=tuple(select))
        Q = quotient_heart(H, ctx)
        text += "quotient:\n" + "".join(f"{n}: {Q.text(n)}\n" for n in sorted(Q.simples))
    _emit(text, out)


@main.command("graph-collapse")
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@click.option("--sub", multiple=True, required=True, help="Vertex of the subgraph; repeatable.")
@click.option("--out", type=click.Path(dir_okay=False))
@_guard
def graph_collapse(path, sub, out):
    """Contract a connected induced subgraph of a ribbon graph."""
    G = parse_graph(_read(path))
    H, bk = collapse_graph(G, list(sub))
    text = H.text()
    text += f"# arity {bk.arity}\n"
    text += "".join(f"# {lab} <- {h}\n" for lab, h in bk.phi.items())
    _emit(text, out)


@main.command("export-dot")
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", type=click.Path(dir_okay=False))
@_guard
def export_dot_cmd(path, out):
    """DOT for a ribbon graph (.graph) or the dual graph of a .wdms file."""
    if path.endswith(".graph"):
        G = parse_graph(_read(path))
    else:
        _, A = _load(path)
        G = from_sgraph(dual_sgraph(A))
    _emit(G.dot(), out)


if __name__ == "__main__":
    main()
