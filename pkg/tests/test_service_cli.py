import json

import httpx
import pytest
from click.testing import CliRunner
from fastapi.testclient import TestClient

from castkit import registry
from castkit.api import app
from castkit.cli import main
from castkit.harness import stress_source

client = TestClient(app)

IDENTITY = "((lam (x : Dyn) x) 4)@1"
BAD_PROJECTION = "((lam (x : Dyn) (inc x)@2) true)@1"


@pytest.fixture
def write(tmp_path):
    def go(text, name="prog.gtlc"):
        p = tmp_path / name
        p.write_text(text)
        return str(p)
    return go


# HTTP service

def test_health():
    assert client.get("/health").json()["status"] == "ok"


def test_run_endpoint():
    r = client.post("/run", json={"source": IDENTITY, "calculus": "eda"})
    body = r.json()
    assert r.status_code == 200
    assert (body["outcome"], body["observation"], body["exit_code"]) == ("value", "4", 0)


def test_run_endpoint_blame_and_trace():
    body = client.post("/run", json={"source": BAD_PROJECTION, "trace": True}).json()
    assert (body["outcome"], body["label"], body["exit_code"]) == ("blame", 2, 3)
    assert body["trace"][0]["rule"] == "start"
    assert [t["index"] for t in body["trace"]] == list(range(len(body["trace"])))


def test_errors_are_reported_with_kinds():
    parse = client.post("/run", json={"source": "(lam"})
    assert parse.status_code == 400 and parse.json()["kind"] == "parse"
    typed = client.post("/run", json={"source": "(true 1)@1"})
    assert typed.json() == {"kind": "type", "message": typed.json()["message"], "exit_code": 2}
    assert client.post("/run", json={"source": IDENTITY, "calculus": "nope"}).status_code == 422


def test_measure_endpoint():
    body = client.post("/measure", json={"source": stress_source(10),
                                         "calculus": "hyper"}).json()
    assert body["verdict"] == "PASS" and body["outcome"] == "value"
    assert body["bound_factor"] == 13 * 9 * 2 ** body["records"][0]["height"]
    assert all(r["adjacency"] <= 3 for r in body["records"])


def test_diff_endpoint():
    body = client.post("/diff", json={"source": "((lam (x : Nat) (inc x)@2) 1)@1"}).json()
    assert body["agree"]
    assert [r["calculus"] for r in body["rows"]] == list(registry.CALCULI)
    assert {r["outcome"] for r in body["rows"]} == {"value 2"}


# command line

def test_cli_run_value(write):
    r = CliRunner().invoke(main, ["run", "--calculus", "eda", write(IDENTITY)])
    assert r.exit_code == 0 and r.output == "value 4\n"


def test_cli_run_blame(write):
    r = CliRunner().invoke(main, ["run", "--calculus", "eda", write(BAD_PROJECTION)])
    assert r.exit_code == 3 and r.output == "blame 2\n"


def test_cli_exit_codes(write):
    runner = CliRunner()
    assert runner.invoke(main, ["run", write("(lam")]).exit_code == 1
    assert runner.invoke(main, ["run", write("(true 1)@1")]).exit_code == 2
    w = "(lam (x : Dyn) (x x)@1)"
    r = runner.invoke(main, ["run", "--fuel", "50", write(f"({w} {w})@2")])
    assert r.exit_code == 4 and r.output == "timeout\n"


def test_cli_fuel_from_environment(write, monkeypatch):
    w = "(lam (x : Dyn) (x x)@1)"
    monkeypatch.setenv("CASTKIT_FUEL", "20")
    r = CliRunner().invoke(main, ["run", "--trace", write(f"({w} {w})@2")])
    assert r.exit_code == 4
    assert len(r.output.splitlines()) == 1 + 20 + 1


def test_cli_reads_stdin():
    r = CliRunner().invoke(main, ["run", "-"], input=IDENTITY)
    assert r.output == "value 4\n"


def test_cli_measure(write):
    r = CliRunner().invoke(main, ["measure", "--calculus", "lambda-s",
                                  write(stress_source(5))])
    assert r.exit_code == 0
    lines = r.output.splitlines()
    records = [json.loads(x) for x in lines[:-1]]
    assert records[0]["step"] == 0 and records[-1]["rule"] != "start"
    assert lines[-1].startswith("PASS outcome=value")


def test_cli_diff(write):
    r = CliRunner().invoke(main, ["diff", "--calculi", "eda,lambda-b1,lambda-s",
                                  write("((lam (x : Nat) (inc x)@2) 1)@1")])
    assert r.exit_code == 0
    assert r.output.splitlines() == ["eda        value 2", "lambda-b1  value 2",
                                     "lambda-s   value 2", "all agree"]
    bad = CliRunner().invoke(main, ["diff", "--calculi", "eda,nope", write(IDENTITY)])
    assert bad.exit_code != 0


def test_cli_as_thin_client(write, monkeypatch):
    def post(url, json, timeout):
        return client.post(url.removeprefix("http://svc"), json=json)

    monkeypatch.setattr(httpx, "post", post)
    runner = CliRunner()
    r = runner.invoke(main, ["--server", "http://svc", "run", write(BAD_PROJECTION)])
    assert r.exit_code == 3 and r.output == "blame 2\n"
    r = runner.invoke(main, ["--server", "http://svc", "run", write("(true 1)@1")])
    assert r.exit_code == 2
    r = runner.invoke(main, ["--server", "http://svc", "diff", "--calculi", "eda",
                             write(IDENTITY)])
    assert r.output == "eda  value 4\nall agree\n"
