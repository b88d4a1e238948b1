"""Validates documents written by the mahler CLI against schemas/."""

import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema
from referencing import Registry, Resource


def load_registry(schema_dir):
    schemas = {p.name: json.loads(p.read_text()) for p in schema_dir.glob("*.schema.json")}
    registry = Registry().with_resources((name, Resource.from_contents(s)) for name, s in schemas.items())
    return schemas, registry


def main():
    cli, root = pathlib.Path(sys.argv[1]), pathlib.Path(sys.argv[2])
    schemas, registry = load_registry(root / "schemas")
    failures = 0

    def check(doc, schema_name, label):
        nonlocal failures
        validator = jsonschema.Draft202012Validator(schemas[schema_name], registry=registry)
        errors = list(validator.iter_errors(doc))
        status = "ok" if not errors else "INVALID"
        print(f"{status:8} {label} against {schema_name}")
        for e in errors[:3]:
            print(f"         {e.json_path}: {e.message}")
        failures += bool(errors)

    def run(*args):
        subprocess.run([str(cli), *args], check=True, stdout=subprocess.DEVNULL)

    with tempfile.TemporaryDirectory() as tmp:
        out = pathlib.Path(tmp)
        for path in sorted((root / "data").glob("*.json")):
            check(json.loads(path.read_text()), "polytope.schema.json", f"data/{path.name}")

        for backend in ("exact", "float"):
            for form in ("vertices", "halfspaces"):
                target = out / f"polar_{backend}_{form}.json"
                run("polar", "--in", str(root / "data/rhombus.json"), "--backend", backend, "--form", form,
                    "--out", str(target))
                check(json.loads(target.read_text()), "polytope.schema.json", target.name)

        run("canonicalize", "--in", str(root / "data/cut_square.json"), "--out", str(out / "canon.json"))
        run("contact", "--in", str(out / "canon.json"), "--out", str(out / "contact.json"))
        contact = json.loads((out / "contact.json").read_text())
        for name in ("contact.schema.json", "flag_points.schema.json", "alpha_weights.schema.json"):
            check(contact, name, "contact.json")

        for dim, backend in ((2, "exact"), (3, "float")):
            lines, summary = out / f"t{dim}.jsonl", out / f"s{dim}.json"
            run("trials", "--dim", str(dim), "--trials", "20", "--seed", "3", "--backend", backend,
                "--out", str(lines), "--summary", str(summary))
            for i, line in enumerate(lines.read_text().splitlines()):
                check(json.loads(line), "trial_report.schema.json", f"{lines.name}:{i + 1}")
            check(json.loads(summary.read_text()), "trial_summary.schema.json", summary.name)

    print(f"{failures} invalid documents")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
