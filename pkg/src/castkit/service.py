"""Request handling shared by the HTTP API and the command line."""

from __future__ import annotations

import os
from typing import Literal, Optional

from pydantic import BaseModel, Field

from . import registry
from .cc import render
from .errors import GradualTypeError, ParseError
from .gtlc import typecheck_gtlc
from .harness import compile_for, execute, run_differential
from .sc import SpaceMonitor
from .syntax import parse_program

DEFAULT_FUEL = 10_000

EXIT_CODES = {"value": 0, "parse": 1, "type": 2, "blame": 3, "timeout": 4, "bound": 5}

Calculus = Literal["eda", "edi", "lambda-b1", "lambda-b2", "edc", "ldc",
                   "lambda-c", "lambda-s", "hyper"]
Variant = Literal["cc", "cc-prime"]


def default_fuel() -> int:
    raw = os.environ.get("CASTKIT_FUEL")
    if raw:
        try:
            return int(raw)
        except ValueError:
            pass
    return DEFAULT_FUEL


class ServiceError(Exception):
    def __init__(self, kind: str, message: str):
        super().__init__(message)
        self.kind = kind
        self.message = message
        self.exit_code = EXIT_CODES[kind]


class ErrorBody(BaseModel):
    kind: str
    message: str
    exit_code: int


class RunRequest(BaseModel):
    source: str
    calculus: Calculus = "eda"
    variant: Variant = "cc"
    fuel: Optional[int] = Field(default=None, ge=0)
    trace: bool = False


class TraceLine(BaseModel):
    index: int
    rule: str
    path: list[str]
    term: str

    def text(self) -> str:
        return f"{self.index} {self.rule} {self.term}"


class RunResponse(BaseModel):
    outcome: Literal["value", "blame", "timeout"]
    observation: Optional[str] = None
    label: Optional[int] = None
    type: str
    steps: int
    exit_code: int
    trace: list[TraceLine] = []

    def summary(self) -> str:
        if self.outcome == "value":
            return f"value {self.observation}"
        if self.outcome == "blame":
            return f"blame {self.label}"
        return "timeout"


class MeasureRequest(BaseModel):
    source: str
    calculus: Literal["lambda-s", "hyper"] = "lambda-s"
    fuel: Optional[int] = Field(default=None, ge=0)


class MeasureRecord(BaseModel):
    step: int
    rule: str
    size: int
    ideal: int
    real: int
    height: int
    adjacency: int
    ok: Optional[int]


class MeasureResponse(BaseModel):
    outcome: Literal["value", "blame", "timeout"]
    records: list[MeasureRecord]
    bound_factor: int
    max_real_size: int
    verdict: Literal["PASS", "FAIL"]
    violations: list[str]
    exit_code: int


class DiffRequest(BaseModel):
    source: str
    calculi: list[Calculus] = list(registry.CALCULI)
    variant: Variant = "cc"
    fuel: Optional[int] = Field(default=None, ge=0)


class DiffRow(BaseModel):
    calculus: str
    outcome: str


class DiffResponse(BaseModel):
    rows: list[DiffRow]
    agree: bool


def _front(source: str):
    try:
        M = parse_program(source)
    except ParseError as e:
        raise ServiceError("parse", str(e)) from e
    try:
        A = typecheck_gtlc((), M)
    except GradualTypeError as e:
        raise ServiceError("type", str(e)) from e
    return M, A


def run(req: RunRequest) -> RunResponse:
    M, A = _front(req.source)
    lines = []
    if req.trace:
        lines.append(TraceLine(index=0, rule="start", path=[],
                               term=render(compile_for(M, req.calculus, req.variant))))

    def on_step(s):
        lines.append(TraceLine(index=s.index, rule=s.rule, path=list(s.path),
                               term=render(s.term)))

    fuel = default_fuel() if req.fuel is None else req.fuel
    out = execute(M, req.calculus, req.variant, fuel,
                  on_step=on_step if req.trace else None)
    obs = out.describe().split(" ", 1)[1] if out.kind == "value" else None
    return RunResponse(outcome=out.kind, observation=obs, label=out.label,
                       type=str(A), steps=out.steps, exit_code=EXIT_CODES[out.kind],
                       trace=lines)


def measure(req: MeasureRequest) -> MeasureResponse:
    M, _ = _front(req.source)
    d = registry.get(req.calculus)
    monitor = SpaceMonitor(d)
    fuel = default_fuel() if req.fuel is None else req.fuel
    out = execute(M, req.calculus, fuel=fuel, on_report=monitor.observe)
    records = [MeasureRecord(**r.record()) for r in monitor.reports]
    verdict = "FAIL" if monitor.violations else "PASS"
    code = EXIT_CODES["bound"] if monitor.violations else EXIT_CODES[out.kind]
    return MeasureResponse(outcome=out.kind, records=records,
                           bound_factor=monitor.bound(),
                           max_real_size=max(r.real for r in records),
                           verdict=verdict, violations=monitor.violations,
                           exit_code=code)


def diff(req: DiffRequest) -> DiffResponse:
    M, _ = _front(req.source)
    fuel = default_fuel() if req.fuel is None else req.fuel
    report = run_differential(M, list(req.calculi), fuel, variant=req.variant)
    rows = [DiffRow(calculus=k, outcome=v) for k, v in report.rows()]
    return DiffResponse(rows=rows, agree=report.all_agree)
