import json
import subprocess
import sys

import jsonschema

RUNS = [
    ["phase", "--d", "3", "--beta", "0.0795775", "--rho", "2.6"],
    ["phase", "--d", "1"],
    ["phase", "--d", "3", "--rho", "100"],
    ["alpha", "--d", "2", "--rho", "0.3"],
    ["free-energy", "--d", "3", "--rho", "0.01"],
    ["free-energy", "--d", "4", "--rho", "50"],
    ["minimize", "--K", "200", "--rho", "0.01"],
    ["minimize", "--K", "200", "--rho", "100"],
    ["exact-z", "--n", "6"],
    ["exact-z", "--n", "7", "--oracle"],
    ["converge", "--n-list", "5,10"],
    ["sample", "--n", "100", "--steps", "20000", "--seed", "3"],
    ["scan-long-cycles", "--n-list", "50,100", "--steps", "20000"],
]

FAILING = [
    (["teleport"], 1),
    (["phase", "--d", "0"], 2),
    (["exact-z", "--n", "90"], 3),
]


def main():
    binary, schema_path = sys.argv[1], sys.argv[2]
    with open(schema_path) as f:
        schema = json.load(f)
    jsonschema.Draft202012Validator.check_schema(schema)
    validator = jsonschema.Draft202012Validator(schema)
    failures = 0
    for args in RUNS:
        proc = subprocess.run([binary, *args], capture_output=True, text=True)
        if proc.returncode != 0:
            print(f"FAIL {' '.join(args)}: exit {proc.returncode}: {proc.stderr.strip()}")
            failures += 1
            continue
        doc = json.loads(proc.stdout)
        errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.path))
        if errors:
            failures += 1
            print(f"FAIL {' '.join(args)}: {errors[0].message} at {list(errors[0].path)}")
        else:
            print(f"ok   {' '.join(args)}")
    # Mismatched result shapes must be rejected.
    doc = json.loads(subprocess.run([binary, "phase"], capture_output=True, text=True).stdout)
    doc["config"]["command"] = "sample"
    if validator.is_valid(doc):
        print("FAIL schema accepted a phase result labelled as sample")
        failures += 1
    for args, code in FAILING:
        proc = subprocess.run([binary, *args], capture_output=True, text=True)
        if proc.returncode != code or proc.stdout:
            print(f"FAIL {' '.join(args)}: exit {proc.returncode}, expected {code} with empty stdout")
            failures += 1
    sys.exit(1 if failures else 0)


if __name__ == "__main__":
    main()
