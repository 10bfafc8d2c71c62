#!/usr/bin/env python3
"""Validate every scene JSON in a directory against the scene schema."""
import json
import pathlib
import sys

import jsonschema


def main() -> int:
    schema = json.loads(pathlib.Path(sys.argv[1]).read_text())
    validator = jsonschema.Draft202012Validator(schema)
    files = sorted(pathlib.Path(sys.argv[2]).glob("*.json"))
    bad = 0
    for f in files:
        for err in validator.iter_errors(json.loads(f.read_text())):
            print(f"{f.name}: {err.json_path}: {err.message}")
            bad += 1
    print(f"{len(files)} scenes checked, {bad} problems")
    return 1 if bad or not files else 0


if __name__ == "__main__":
    sys.exit(main())
