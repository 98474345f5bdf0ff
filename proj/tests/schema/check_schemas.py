"""Runs every documented job through the CLI and validates jobs and reports against the
published schemas. Usage: check_schemas.py <phicert-binary> <docs-dir>"""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

from jsonschema import Draft202012Validator
from referencing import Registry, Resource

EXPECTED_EXIT = {
    "replay_sp_worked.json": 0,
    "replay_sp_random.json": 0,
    "replay_so_rank4.json": 0,
    "replay_so_skip_step1.json": 2,
    "keylemma_small.json": 0,
    "keylemma_small_doubled.json": 0,
    "keylemma_empty.json": 0,
    "admissible_aligned.json": 0,
    "classicality.json": 0,
    "ps_irreducible.json": 0,
    "hilbert_product.json": 0,
    "hilbert_places.json": 0,
    "wald_sign.json": 0,
}


def load(path):
    return json.loads(Path(path).read_text())


def main():
    binary, docs = Path(sys.argv[1]), Path(sys.argv[2])
    schemas = {name: load(docs / "schemas" / name)
               for name in ("job.schema.json", "report.schema.json", "certificate.schema.json")}
    registry = Registry().with_resources(
        [(s["$id"], Resource.from_contents(s)) for s in schemas.values()]
        + [(name, Resource.from_contents(s)) for name, s in schemas.items()])
    job_v = Draft202012Validator(schemas["job.schema.json"], registry=registry)
    report_v = Draft202012Validator(schemas["report.schema.json"], registry=registry)
    for s in schemas.values():
        Draft202012Validator.check_schema(s)

    failures = []
    tmp = Path(tempfile.mkdtemp())

    def run(job, name):
        job_path = tmp / name
        job_path.write_text(json.dumps(job))
        proc = subprocess.run([str(binary), "--job", str(job_path), "--seed", "7"],
                              capture_output=True, text=True)
        return proc.returncode, proc.stdout

    def check(cond, what):
        if not cond:
            failures.append(what)

    jobs_dir = docs / "jobs"
    found = sorted(p.name for p in jobs_dir.glob("*.json"))
    check(found == sorted(EXPECTED_EXIT), f"job list differs: {found}")
    reports = {}
    for name in found:
        job = load(jobs_dir / name)
        errs = [e.message for e in job_v.iter_errors(job)]
        check(not errs, f"{name}: job rejected by schema: {errs}")
        code, out = run(job, name)
        check(code == EXPECTED_EXIT.get(name), f"{name}: exit {code}")
        first = out
        code2, out2 = run(job, name)
        check(out2 == first and code2 == code, f"{name}: report not reproducible")
        report = json.loads(out)
        errs = [e.message for e in report_v.iter_errors(report)]
        check(not errs, f"{name}: report rejected by schema: {errs}")
        reports[name] = report

    cert = reports["replay_sp_worked.json"]["result"]["certificates"][0]
    verify = {"command": "verify-cert", "params": {"certificate": cert}}
    check(job_v.is_valid(verify), "verify job rejected by schema")
    code, out = run(verify, "verify.json")
    check(code == 0 and report_v.is_valid(json.loads(out)), f"verify-cert: exit {code}")
    tampered = json.loads(json.dumps(verify))
    tampered["params"]["certificate"]["places"][0]["x2_prime"][1] = "-26/1"
    code, out = run(tampered, "tampered.json")
    check(code == 2 and report_v.is_valid(json.loads(out)), f"tampered verify-cert: exit {code}")

    for path in sorted((jobs_dir / "invalid").glob("*.json")):
        job = load(path)
        check(not job_v.is_valid(job), f"invalid/{path.name}: accepted by schema")
        code, out = run(job, path.name)
        report = json.loads(out)
        check(code == 1 and "error" in report, f"invalid/{path.name}: exit {code}")
        check(report_v.is_valid(report), f"invalid/{path.name}: error report rejected by schema")

    for f in failures:
        print("FAIL", f)
    print(f"{len(found)} jobs, {len(failures)} failures")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
