"""Validates the CLI's diagram and corpus JSON against the published schemas."""
import json
import pathlib
import subprocess
import sys

import jsonschema

cli = str(pathlib.Path(sys.argv[1]).resolve())
corpus, docs = pathlib.Path(sys.argv[2]), pathlib.Path(sys.argv[3])
diagram_schema = json.loads((docs / "diagram-schema.json").read_text())
report_schema = json.loads((docs / "report-schema.json").read_text())


def run(*args):
    return subprocess.run([cli, *args], cwd=corpus, capture_output=True, text=True).stdout


checked = 0
for path in sorted(corpus.glob("*.rdjson")):
    jsonschema.validate(json.loads(path.read_text()), diagram_schema)
    checked += 1
for path in sorted(corpus.glob("*.trc")) + sorted(corpus.glob("*.dlg")):
    expect = json.loads(path.with_suffix(".expect").read_text())
    if "error" in expect:
        continue
    full = ["--full"] if expect.get("full") else []
    out = run("--schema", expect["schema"], *full, "diagram", "--emit", "json", path.name)
    jsonschema.validate(json.loads(out), diagram_schema)
    checked += 1
jsonschema.validate(json.loads(run("--json", "corpus", ".")), report_schema)
print(f"{checked} diagrams and 1 report match their schemas")
