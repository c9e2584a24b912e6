"""Validate the fixtures and the reports the CLI writes for them against schemas/."""

import json
import pathlib
import subprocess
import sys

import jsonschema
from referencing import Registry, Resource

root = pathlib.Path(__file__).resolve().parent.parent
cli = sys.argv[1]
load = lambda p: json.loads(pathlib.Path(p).read_text())
problem_schema = load(root / "schemas/problem.schema.json")
report_schema = load(root / "schemas/report.schema.json")
registry = Registry().with_resources(
    [(s["$id"], Resource.from_contents(s)) for s in (problem_schema, report_schema)]
)
problems = jsonschema.Draft202012Validator(problem_schema, registry=registry)
reports = jsonschema.Draft202012Validator(report_schema, registry=registry)

for path in sorted((root / "fixtures").glob("*.json")):
    problems.validate(load(path))
    run = subprocess.run([cli, "run", str(path)], capture_output=True, text=True)
    if run.returncode not in (0, 2, 3):
        sys.exit(f"{path.name}: unexpected exit code {run.returncode}")
    reports.validate(json.loads(run.stdout))
    print(f"{path.name}: ok (exit {run.returncode})")
