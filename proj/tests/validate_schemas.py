"""Runs the spanmeta binary and validates each JSON output against its schema.

usage: validate_schemas.py <spanmeta binary> <schema dir>
"""

import json
import random
import subprocess
import sys
import tempfile
from pathlib import Path

import jsonschema


def load_schemas(schema_dir):
    schemas = {}
    for path in sorted(Path(schema_dir).glob("*.schema.json")):
        schema = json.loads(path.read_text())
        jsonschema.Draft202012Validator.check_schema(schema)
        schemas[path.name.removesuffix(".schema.json")] = schema
    return schemas


def write_corpus(path, docs, seed):
    rng = random.Random(seed)
    with open(path, "w") as out:
        for d in range(docs):
            out.write(f"# id = doc{d}\n")
            for _ in range(8):
                if rng.random() < 0.3:
                    out.write(f"Name{rng.randrange(5)}\tB-PER\tcap\n")
                elif rng.random() < 0.2:
                    out.write(f"at\tB-LOC\tlower\nCity{rng.randrange(3)}\tI-LOC\tcap\n")
                else:
                    out.write(f"w{rng.randrange(5)}\tO\tlower\n")
            out.write("\n")


def main():
    binary, schema_dir = sys.argv[1], sys.argv[2]
    schemas = load_schemas(schema_dir)
    failures = 0

    def run(*args):
        return subprocess.run([binary, *args], check=True, capture_output=True,
                              text=True).stdout

    def check(name, instance, label):
        nonlocal failures
        errors = sorted(jsonschema.Draft202012Validator(schemas[name])
                        .iter_errors(instance), key=str)
        status = "ok" if not errors else "INVALID"
        print(f"{label}: {name} {status}")
        for e in errors[:5]:
            print(f"  {list(e.absolute_path)}: {e.message}")
        failures += bool(errors)

    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        train, dev = tmp / "train.tsv", tmp / "dev.tsv"
        write_corpus(train, 30, 1)
        write_corpus(dev, 8, 2)

        check("profile", json.loads(run("profile", str(train), "--format", "json")),
              "profile")
        for arch in ("crf", "baseline"):
            model, log = tmp / f"{arch}.json", tmp / f"{arch}-log.json"
            summary = run("train", "--arch", arch, "--train", str(train), "--dev",
                          str(dev), "--epochs", "4", "--lr", "0.05", "--out",
                          str(model), "--log", str(log))
            check("train-log", json.loads(summary), f"train {arch} stdout")
            check("train-log", json.loads(log.read_text()), f"train {arch} --log")
            check("labeler", json.loads(model.read_text()), f"{arch} model")
            pred = tmp / f"{arch}-pred.jsonl"
            run("tag", "--model", str(model), "--input", str(dev), "-o", str(pred))
            for i, line in enumerate(pred.read_text().splitlines()):
                check("document", json.loads(line), f"tag {arch} line {i + 1}")
            check("eval", json.loads(run("eval", "--gold", str(dev), "--pred",
                                         str(pred))), f"eval {arch}")

        for extra in ([], ["--l1", "0.5", "--l2", "1"]):
            meta = tmp / "meta.json"
            run("meta", "fit", "-o", str(meta), *extra)
            check("meta-model", json.loads(meta.read_text()),
                  "meta fit " + (" ".join(extra) or "ols"))
        check("cv", json.loads(run("meta", "cv")), "meta cv")
        check("cv", json.loads(run("meta", "cv", "--predictors", "empty")),
              "meta cv empty")
        check("cv", json.loads(run("meta", "ablate")), "meta ablate")
        check("alpha-search", json.loads(run("meta", "select-alpha", "--grid", "0.1",
                                             "0.2", "0.3")), "meta select-alpha")
        for extra in ([], ["--skip-alpha-search"]):
            out = tmp / ("report" + "".join(extra))
            run("reproduce", "--out-dir", str(out), *extra)
            check("report", json.loads((out / "report.json").read_text()),
                  "reproduce " + (" ".join(extra) or "default"))

    print("FAILED" if failures else "all outputs valid")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
