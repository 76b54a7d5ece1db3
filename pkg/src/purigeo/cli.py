"""Command-line client.

Thin front end over the service layer: jobs are JSON documents validated
by the same request models the HTTP endpoints use.  By default a job runs
in-process; with ``--server`` it is POSTed to a running service instead.
No environment variables are consulted.

Exit codes: 0 success, 1 validation failure, 2 numerical failure.
"""

import argparse
import csv
import json
import sys

from .errors import PurigeoError
from .service import handlers
from .service.schemas import JobSpec, Report

COMMANDS = ("convert", "metric", "transport", "vn", "holonomy", "noise", "selftest")


def report_dict(report: Report, include_timing: bool = True) -> dict:
    out = report.model_dump(exclude_none=False)
    if not include_timing:
        out.get("diagnostics", {}).pop("timing_ms", None)
    return out


def report_json(report: Report, include_timing: bool = True) -> str:
    return json.dumps(report_dict(report, include_timing), indent=2, sort_keys=True)


def _load_job(args) -> JobSpec:
    if args.spec is None:
        if args.command != "selftest":
            raise ValueError(f"{args.command} requires --spec FILE")
        params = {}
        seed = 0
    else:
        with open(args.spec, encoding="utf-8") as fh:
            doc = json.load(fh)
        if isinstance(doc, dict) and "command" in doc:
            if doc["command"] != args.command:
                raise ValueError(
                    f"spec file declares command {doc['command']!r}, invoked as {args.command!r}"
                )
            params = doc.get("parameters", {})
            seed = doc.get("seed", 0)
        else:
            params = dict(doc)
            seed = params.pop("seed", 0)
    if args.seed is not None:
        seed = args.seed
    fields = handlers.request_model(args.command).model_fields
    if args.steps is not None:
        if "steps" not in fields:
            raise ValueError(f"{args.command} does not take --steps")
        params = {**params, "steps": args.steps}
    if args.grid is not None:
        if "grid" not in fields:
            raise ValueError(f"{args.command} does not take --grid")
        lo, hi, n = args.grid.split(",")
        params = {**params, "grid": {"lo": float(lo), "hi": float(hi), "n": int(n)}}
    return JobSpec(command=args.command, parameters=params, seed=seed)


def _write_table(report: Report, path: str) -> None:
    if report.table is None:
        print(f"note: job produced no table; {path} not written", file=sys.stderr)
        return
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(report.table.columns)
        writer.writerows(report.table.rows)


def _post_job(server: str, job: JobSpec, transport=None):
    import httpx

    with httpx.Client(base_url=server, transport=transport, timeout=600.0) as client:
        return client.post("/v1/jobs", json=job.model_dump())


def _run_remote(args, job: JobSpec) -> int:
    resp = _post_job(args.server, job)
    if resp.status_code == 200:
        report = Report.model_validate(resp.json())
        print(report_json(report))
        if args.out:
            _write_table(report, args.out)
        if job.command == "selftest" and not report.outputs.get("passed", False):
            return 2
        return 0
    try:
        detail = resp.json().get("detail", {})
    except Exception:
        detail = {"kind": "numerical", "message": resp.text}
    print(json.dumps({"status": "error", "detail": detail}, indent=2), file=sys.stderr)
    if isinstance(detail, dict) and detail.get("kind") == "validation":
        return 1
    return 2


def _run_local(args, job: JobSpec) -> int:
    report = handlers.run(job)
    print(report_json(report))
    if args.out:
        _write_table(report, args.out)
    if job.command == "selftest":
        for line in report.outputs["lines"]:
            print(line, file=sys.stderr)
        if not report.outputs["passed"]:
            return 2
    return 0


def _serve(args) -> int:
    import uvicorn

    from .service.app import app

    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="purigeo",
        description="Connections, monotone metrics, and holonomy for purified density operators.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, help=f"run a {name} job")
        p.add_argument("--spec", help="JSON job document (parameters or full job spec)")
        p.add_argument("--out", help="write the report's table as CSV to this path")
        p.add_argument("--seed", type=int, help="override the job seed")
        p.add_argument("--steps", type=int, help="override the step count")
        p.add_argument("--grid", help="override the function grid as lo,hi,n")
        p.add_argument("--server", help="POST the job to a running service at this base URL")
    srv = sub.add_parser("serve", help="run the HTTP service")
    srv.add_argument("--host", default="127.0.0.1")
    srv.add_argument("--port", type=int, default=8000)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "serve":
        return _serve(args)
    try:
        job = _load_job(args)
        if args.server:
            return _run_remote(args, job)
        return _run_local(args, job)
    except handlers.VALIDATION_FAILURES as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 1
    except (OSError, json.JSONDecodeError) as exc:
        print(f"cannot read job spec: {exc}", file=sys.stderr)
        return 1
    except PurigeoError as exc:
        print(f"numerical error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
