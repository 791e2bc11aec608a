"""Command-line front end: ``ech <command> ...``.

Results go to stdout as a JSON array (or CSV with ``--format csv``).  With
``--out`` they are written to a file instead, headed by the run configuration.
Exit status is 0 on success, 1 for a domain error (reported as JSON on stderr)
and 2 for invalid flags.
"""

from __future__ import annotations

import csv
import decimal
import io
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable

import click

from . import __version__
from .capacities import DisjointUnion, Ellipsoid, Polydisk, ToricRegion, scale_domain, volume_estimate
from .czpart import (
    ellipsoid_grading,
    negative_partition,
    partitions_of,
    positive_partition,
    workhorse_check,
)
from .embeddings import check_embedding, domain_from_json, parse_domain, staircase_scan
from .latgeom import RationalPolygon, SqrtSum
from .numkit import ECHError, Theta, format_rational, parse_rational, parse_theta
from .t3complex import (
    T3Direction,
    T3Generator,
    delta_squared_check,
    differential,
    enumerate_generators,
    grading,
    homology_ranks,
    t3_spectrum,
    u_theta,
)

__all__ = ["main"]


# --------------------------------------------------------------------------
# Parameter types


class RationalType(click.ParamType):
    name = "rational"

    def convert(self, value, param, ctx):
        if isinstance(value, Fraction):
            return value
        try:
            return parse_rational(value)
        except ECHError:
            self.fail(f"{value!r} is not a rational ('p/q' or a decimal)", param, ctx)


class ThetaType(click.ParamType):
    name = "theta"

    def convert(self, value, param, ctx):
        if isinstance(value, Theta):
            return value
        try:
            return parse_theta(value)
        except ECHError:
            self.fail(f"{value!r} is not an angle like '3/5+', '2-' or '1/3'", param, ctx)


RATIONAL = RationalType()
THETA = ThetaType()


# --------------------------------------------------------------------------
# Output


def _decimal(q: Fraction) -> str:
    with decimal.localcontext() as ctx:
        ctx.prec = 40
        d = decimal.Decimal(q.numerator) / decimal.Decimal(q.denominator)
    return format(d, ".12g")


def _jsonable(value: Any) -> Any:
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, SqrtSum):
        return value.to_json()
    if hasattr(value, "to_json"):
        return value.to_json()
    return value


def _csv_text(rows: list[dict]) -> str:
    columns: list[str] = []
    for row in rows:
        for key, value in row.items():
            names = [key, f"{key}_exact"] if isinstance(value, Fraction) else [key]
            for n in names:
                if n not in columns:
                    columns.append(n)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        out = {}
        for key, value in row.items():
            if isinstance(value, Fraction):
                out[key] = _decimal(value)
                out[f"{key}_exact"] = format_rational(value)
            elif isinstance(value, (dict, list, tuple)) or hasattr(value, "to_json"):
                out[key] = json.dumps(_jsonable(value), sort_keys=True, separators=(",", ":"))
            else:
                out[key] = _jsonable(value)
        writer.writerow(out)
    return buf.getvalue()


def _config(ctx: click.Context) -> dict:
    # threads never change results, so they are left out to keep files byte-identical
    path = []
    c = ctx
    while c is not None:
        if c.info_name:
            path.append(c.info_name)
        c = c.parent
    params = {k: v for k, v in ctx.params.items() if k not in ("threads", "out", "fmt")}
    return {
        "command": " ".join(reversed(path[:-1])) if len(path) > 1 else path[0],
        "params": _jsonable({k: (str(v) if isinstance(v, (Theta, Path)) else v) for k, v in params.items()}),
        "format": _settings(ctx)["fmt"],
        "version": __version__,
    }


def _emit(ctx: click.Context, rows: list[dict]) -> None:
    settings = _settings(ctx)
    fmt, out = settings["fmt"], settings["out"]
    if fmt == "csv":
        body = _csv_text(rows)
    else:
        body = json.dumps(_jsonable(rows), indent=2) + "\n"
    if out is None:
        click.echo(body, nl=False)
        return
    header = _config(ctx)
    if fmt == "csv":
        text = "# config: " + json.dumps(header, sort_keys=True) + "\n" + body
    else:
        text = json.dumps({"config": header, "results": _jsonable(rows)}, indent=2) + "\n"
    Path(out).write_text(text)


def _settings(ctx: click.Context) -> dict:
    root = ctx.find_root().ensure_object(dict)
    merged = {"fmt": root.get("fmt", "json"), "threads": root.get("threads", 1), "out": root.get("out")}
    for key in ("fmt", "threads", "out"):
        if ctx.params.get(key) is not None:
            merged[key] = ctx.params[key]
    return merged


def output_options(f: Callable) -> Callable:
    """``--format/--threads/--out``, also accepted after the subcommand."""
    f = click.option("--out", type=click.Path(dir_okay=False), default=None, help="Write results to a file.")(f)
    f = click.option("--threads", type=click.IntRange(min=1), default=None, help="Worker threads.")(f)
    f = click.option(
        "--format", "fmt", type=click.Choice(["json", "csv"]), default=None, help="Output format."
    )(f)
    return f


class _Group(click.Group):
    """Turns domain errors into exit status 1 with a JSON report on stderr."""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except ECHError as exc:
            click.echo(json.dumps({"error": str(exc), "type": type(exc).__name__}), err=True)
            ctx.exit(1)


@click.group(cls=_Group)
@click.version_option(__version__, prog_name="ech")
@output_options
@click.pass_context
def main(ctx, fmt, threads, out):
    """Exact ECH capacities, embedding obstructions and lattice combinatorics."""
    ctx.ensure_object(dict)
    ctx.obj.update(fmt=fmt or "json", threads=threads or 1, out=out)


# --------------------------------------------------------------------------
# Capacities


@main.group()
def cap():
    """Capacity sequences c_0 .. c_{count-1}."""


def _capacity_rows(seq, emit_witness: bool) -> list[dict]:
    rows = []
    for k, c in enumerate(seq.values):
        row = {"k": k, "c": c}
        if emit_witness and seq.witnesses:
            row["witness"] = seq.witnesses[k]
        rows.append(row)
    return rows


@cap.command("ellipsoid")
@click.option("--a", "a", type=RATIONAL, required=True)
@click.option("--b", "b", type=RATIONAL, required=True)
@click.option("--count", type=click.IntRange(min=1), required=True)
@output_options
@click.pass_context
def cap_ellipsoid_cmd(ctx, a, b, count, **_):
    """Capacities of E(a, b)."""
    _emit(ctx, _capacity_rows(Ellipsoid(a, b).capacities(count), False))


@cap.command("polydisk")
@click.option("--a", "a", type=RATIONAL, required=True)
@click.option("--b", "b", type=RATIONAL, required=True)
@click.option("--count", type=click.IntRange(min=1), required=True)
@output_options
@click.pass_context
def cap_polydisk_cmd(ctx, a, b, count, **_):
    """Capacities of P(a, b)."""
    _emit(ctx, _capacity_rows(Polydisk(a, b).capacities(count), False))


def _load_json(path: str) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ECHError(f"{path}: invalid JSON ({exc.msg})") from None


@cap.command("toric")
@click.option("--omega", type=click.Path(exists=True, dir_okay=False), required=True, help="Region JSON.")
@click.option("--count", type=click.IntRange(min=1), required=True)
@click.option("--emit", type=click.Choice(["value", "witness"]), default="value")
@click.option("--scale", type=RATIONAL, default=None, help="Multiply the region by this factor.")
@output_options
@click.pass_context
def cap_toric_cmd(ctx, omega, count, emit, scale, **_):
    """Capacities of X_Omega for a convex rational polygon Omega."""
    domain = ToricRegion(RationalPolygon.from_json(_load_json(omega)))
    if scale is not None:
        domain = scale_domain(domain, scale)
    seq = domain.capacities(count, threads=_settings(ctx)["threads"])
    _emit(ctx, _capacity_rows(seq, emit == "witness"))


@cap.command("union")
@click.option("--parts", multiple=True, required=True, help="Domain JSON files or specs like E(1,2).")
@click.argument("more", nargs=-1)
@click.option("--count", type=click.IntRange(min=1), required=True)
@output_options
@click.pass_context
def cap_union_cmd(ctx, parts, more, count, **_):
    """Capacities of a disjoint union (max-plus convolution of the parts)."""
    domains = [_domain_arg(p) for p in (*parts, *more)]
    seq = DisjointUnion(tuple(domains)).capacities(count, threads=_settings(ctx)["threads"])
    _emit(ctx, _capacity_rows(seq, False))


def _domain_arg(text: str):
    path = Path(text)
    if path.is_file():
        return domain_from_json(_load_json(text))
    return parse_domain(text)


@cap.command("volume")
@click.option("--domain", "spec", required=True, help="Domain spec or JSON file.")
@click.option("--k", "ks", multiple=True, type=click.IntRange(min=1), required=True)
@output_options
@click.pass_context
def cap_volume_cmd(ctx, spec, ks, **_):
    """c_k^2 / (4k), which tends to the volume."""
    domain = _domain_arg(spec)
    rows = []
    for k in ks:
        est = volume_estimate(domain, k)
        rows.append({"k": k, "c": est.capacity, "estimate": format(est.estimate, ".12g"), "volume": est.volume})
    _emit(ctx, rows)


# --------------------------------------------------------------------------
# Embeddings


@main.command("embed")
@click.option("--source", required=True, help="E(a,b), P(a,b), B(a), unions joined by '+', or a JSON file.")
@click.option("--target", required=True)
@click.option("--kmax", type=click.IntRange(min=0), required=True)
@output_options
@click.pass_context
def embed_cmd(ctx, source, target, kmax, **_):
    """Look for a capacity obstruction to embedding source into target."""
    src, dst = _domain_arg(source), _domain_arg(target)
    rep = check_embedding(src, dst, kmax, threads=_settings(ctx)["threads"])
    row = {
        "source": str(src),
        "target": str(dst),
        "k_max": kmax,
        "obstructed": rep.obstructed,
        "k": rep.obstructed_at,
        "c_source": rep.c_source,
        "c_target": rep.c_target,
        "verdict": rep.verdict,
        "note": rep.note,
    }
    _emit(ctx, [row])


@main.command("staircase")
@click.option("--from", "start", type=RATIONAL, required=True)
@click.option("--to", "stop", type=RATIONAL, required=True)
@click.option("--step", type=RATIONAL, required=True)
@click.option("--kmax", type=click.IntRange(min=1), required=True)
@output_options
@click.pass_context
def staircase_cmd(ctx, start, stop, step, kmax, **_):
    """Lower bounds for the ellipsoid-into-ball function on a grid (truncated at kmax)."""
    if step <= 0:
        raise ECHError("step must be positive")
    grid = []
    a = start
    while a <= stop:
        grid.append(a)
        a += step
    samples = staircase_scan(grid, kmax, threads=_settings(ctx)["threads"])
    _emit(ctx, [{"a": s.a, "value": s.value, "argmax_k": s.argmax_k, "k_max": s.k_max} for s in samples])


# --------------------------------------------------------------------------
# Partitions and gradings


@main.command("partitions")
@click.option("--theta", type=THETA, required=True, help="Angle like 3/5+ (base plus a side).")
@click.option("--m", "m", type=click.IntRange(min=1), required=True)
@output_options
@click.pass_context
def partitions_cmd(ctx, theta, m, **_):
    """The partitions p^+ and p^- of m for rotation angle theta."""
    rows = [{"m": k, "positive": str(positive_partition(theta, k)), "negative": str(negative_partition(theta, k))}
            for k in range(1, m + 1)]
    _emit(ctx, rows)


@main.command("workhorse")
@click.option("--theta", type=THETA, required=True)
@click.option("--m", "m", type=click.IntRange(min=1), required=True)
@click.option("--all", "scan_all", is_flag=True, help="Check every partition of m, not only p^+.")
@output_options
@click.pass_context
def workhorse_cmd(ctx, theta, m, scan_all, **_):
    """The lattice inequality behind the writhe bound."""
    plus = positive_partition(theta, m)
    parts = list(partitions_of(m)) if scan_all else [plus]
    rows = []
    for p in parts:
        r = workhorse_check(theta, p)
        rows.append({"parts": str(p), "lhs": r.lhs, "rhs": r.rhs, "holds": r.holds,
                     "equality": r.equality, "is_positive_partition": p == plus})
    _emit(ctx, rows)


@main.group()
def grading_group():
    """ECH gradings."""


main.add_command(grading_group, "grading")


@grading_group.command("ellipsoid")
@click.option("--ratio", type=THETA, required=True, help="b/a with a side, e.g. 2-.")
@click.option("--m1", type=click.IntRange(min=0), required=True)
@click.option("--m2", type=click.IntRange(min=0), required=True)
@output_options
@click.pass_context
def grading_ellipsoid_cmd(ctx, ratio, m1, m2, **_):
    """Grading of gamma_1^m1 gamma_2^m2 on an ellipsoid with b/a = ratio."""
    _emit(ctx, [{"m1": m1, "m2": m2, "ratio": str(ratio), "grading": ellipsoid_grading(1, ratio, m1, m2)}])


# --------------------------------------------------------------------------
# Three-torus


@main.group()
def t3():
    """The combinatorial chain complex of the three-torus."""


@t3.command("spectrum")
@click.option("--count", type=click.IntRange(min=1), required=True)
@output_options
@click.pass_context
def t3_spectrum_cmd(ctx, count, **_):
    """Minimal Euclidean length with k+1 lattice points, k < count."""
    threads = _settings(ctx)["threads"]
    rows = []
    for k in range(count):
        value, witness = t3_spectrum(k, threads=threads)
        rows.append({"k": k, "value": format(float(value), ".12g"), "exact": value, "witness": witness})
    _emit(ctx, rows)


@t3.command("d2check")
@click.option("--cutoff", type=RATIONAL, required=True)
@output_options
@click.pass_context
def t3_d2check_cmd(ctx, cutoff, **_):
    """Check that the differential squares to zero below a length cutoff."""
    threads = _settings(ctx)["threads"]
    n = len(enumerate_generators(cutoff, threads))
    _emit(ctx, [{"cutoff": cutoff, "generators": n, "ok": delta_squared_check(cutoff, threads)}])


@t3.command("homology")
@click.option("--degree", type=int, required=True)
@click.option("--cutoffs", required=True, help="Comma-separated length cutoffs, e.g. 4,6,8.")
@output_options
@click.pass_context
def t3_homology_cmd(ctx, degree, cutoffs, **_):
    """GF(2) homology rank of the length-filtered complex."""
    try:
        cuts = [parse_rational(c) for c in cutoffs.split(",") if c.strip()]
    except ECHError as exc:
        raise click.BadParameter(str(exc), param_hint="--cutoffs") from None
    ranks = homology_ranks(degree, cuts, _settings(ctx)["threads"])
    tail = [r for _, r in ranks][-3:]
    _emit(ctx, [{"degree": degree, "cutoff": c, "rank": r} for c, r in ranks]
          + [{"degree": degree, "rank": ranks[-1][1], "stabilized": len(set(tail)) == 1}])


@t3.command("diff")
@click.option("--gen", type=click.Path(exists=True, dir_okay=False), required=True, help="Generator JSON.")
@click.option("--theta", default=None, help="Apply U_theta instead, e.g. '1,1+'.")
@output_options
@click.pass_context
def t3_diff_cmd(ctx, gen, theta, **_):
    """Differential (or U map) of one generator."""
    g = T3Generator.from_json(_load_json(gen))
    if theta is None:
        image = differential(g)
    else:
        try:
            image = u_theta(g, T3Direction.parse(theta))
        except ValueError as exc:
            raise click.BadParameter(str(exc), param_hint="--theta") from None
    _emit(ctx, [{"generator": t, "grading": grading(t)} for t in image])


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
