#!/usr/bin/env python3
"""Run a quick scenario and validate its summary.json against the schema."""
import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema


def main():
    binary, schema_path, scenario = sys.argv[1], sys.argv[2], sys.argv[3]
    schema = json.loads(pathlib.Path(schema_path).read_text())
    with tempfile.TemporaryDirectory() as tmp:
        cfg = pathlib.Path(tmp) / "run.ini"
        cfg.write_text(f"scenario = {scenario}\n")
        rc = subprocess.run([binary, "run", str(cfg), "--quick", "--out-dir", tmp]).returncode
        if rc != 0:
            print(f"run exited with {rc}")
            return 1
        bundle = next((pathlib.Path(tmp) / "reports").iterdir())
        summary = json.loads((bundle / "summary.json").read_text())
        jsonschema.validate(summary, schema)
        for rep in summary["reports"]:
            if not (bundle / rep["file"]).is_file():
                print(f"missing report file {rep['file']}")
                return 1
        for art in summary["artifacts"]:
            if not (bundle / art).is_file():
                print(f"missing artifact {art}")
                return 1
    print("summary.json valid")
    return 0


if __name__ == "__main__":
    sys.exit(main())
