"""Command-line client: run, measure and diff GTLC programs."""

from __future__ import annotations

import json
import sys

import click

from . import registry, service
from .service import (DiffRequest, DiffResponse, MeasureRequest, MeasureResponse,
                      RunRequest, RunResponse, ServiceError)

CALCULI = click.Choice(list(registry.CALCULI))
VARIANTS = click.Choice(["cc", "cc-prime"])


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as f:
        return f.read()


def _call(ctx, name, request, response_type):
    """Handle a request in-process, or post it to --server when one is given."""
    server = ctx.obj.get("server")
    if server is None:
        return getattr(service, name)(request)
    import httpx

    r = httpx.post(f"{server.rstrip('/')}/{name}", json=request.model_dump(), timeout=None)
    if r.status_code == 400:
        body = r.json()
        raise ServiceError(body["kind"], body["message"])
    r.raise_for_status()
    return response_type.model_validate(r.json())


def _fail(err: ServiceError):
    click.echo(f"{err.kind} error: {err.message}", err=True)
    sys.exit(err.exit_code)


@click.group()
@click.option("--server", default=None, metavar="URL",
              help="Send requests to a running castkit service instead of evaluating locally.")
@click.pass_context
def main(ctx, server):
    """Run gradually typed programs under a choice of cast calculi."""
    ctx.ensure_object(dict)
    ctx.obj["server"] = server


@main.command()
@click.argument("file")
@click.option("--calculus", type=CALCULI, default="eda", show_default=True)
@click.option("--variant", type=VARIANTS, default="cc", show_default=True,
              help="Cast calculus variant; lambda-s and hyper ignore it.")
@click.option("--fuel", type=click.IntRange(min=0), default=None,
              help="Step limit (default: $CASTKIT_FUEL or 10000).")
@click.option("--trace", is_flag=True, help="Print one line per reduction step.")
@click.pass_context
def run(ctx, file, calculus, variant, fuel, trace):
    """Evaluate FILE and print its value, blame label or timeout."""
    req = RunRequest(source=_read(file), calculus=calculus, variant=variant,
                     fuel=fuel, trace=trace)
    try:
        res = _call(ctx, "run", req, RunResponse)
    except ServiceError as e:
        _fail(e)
    for line in res.trace:
        click.echo(line.text())
    click.echo(res.summary())
    sys.exit(res.exit_code)


@main.command()
@click.argument("file")
@click.option("--calculus", type=click.Choice(list(registry.EFFICIENT)),
              default="lambda-s", show_default=True)
@click.option("--fuel", type=click.IntRange(min=0), default=None)
@click.pass_context
def measure(ctx, file, calculus, fuel):
    """Run FILE in the space-efficient calculus and check the space bound."""
    req = MeasureRequest(source=_read(file), calculus=calculus, fuel=fuel)
    try:
        res = _call(ctx, "measure", req, MeasureResponse)
    except ServiceError as e:
        _fail(e)
    for rec in res.records:
        click.echo(json.dumps(rec.model_dump()))
    for v in res.violations:
        click.echo(f"violation: {v}", err=True)
    click.echo(f"{res.verdict} outcome={res.outcome} max_real_size={res.max_real_size} "
               f"bound={res.bound_factor}*ideal_size")
    sys.exit(res.exit_code)


@main.command()
@click.argument("file")
@click.option("--calculi", default=",".join(registry.CALCULI), show_default=True,
              help="Comma-separated calculus names.")
@click.option("--variant", type=VARIANTS, default="cc", show_default=True)
@click.option("--fuel", type=click.IntRange(min=0), default=None)
@click.pass_context
def diff(ctx, file, calculi, variant, fuel):
    """Run FILE under several calculi and tabulate the outcomes."""
    names = [c.strip() for c in calculi.split(",") if c.strip()]
    unknown = [c for c in names if c not in registry.CALCULI]
    if unknown:
        raise click.BadParameter(f"unknown calculus {unknown[0]!r}", param_hint="--calculi")
    req = DiffRequest(source=_read(file), calculi=names, variant=variant, fuel=fuel)
    try:
        res = _call(ctx, "diff", req, DiffResponse)
    except ServiceError as e:
        _fail(e)
    width = max(len(r.calculus) for r in res.rows)
    for r in res.rows:
        click.echo(f"{r.calculus:<{width}}  {r.outcome}")
    click.echo("all agree" if res.agree else "disagreement")


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
def serve(host, port):
    """Start the HTTP service."""
    import uvicorn

    uvicorn.run("castkit.api:app", host=host, port=port)


if __name__ == "__main__":
    main()
