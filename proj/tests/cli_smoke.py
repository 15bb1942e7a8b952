#!/usr/bin/env python3
"""Drives the chessvec binary end to end: exit codes, help text, fixture
corpus, manifest checksums, query output and SVG well-formedness."""

import json
import os
import subprocess
import sys
import tempfile
import xml.etree.ElementTree as ET

BIN, FIXTURES = sys.argv[1], sys.argv[2]
failures = []


def run(*args, expect=0):
    p = subprocess.run([BIN, *args], capture_output=True, text=True)
    if p.returncode != expect:
        failures.append(f"{' '.join(args)}: exit {p.returncode}, expected {expect}\n{p.stderr}")
    return p


def check(cond, what):
    if not cond:
        failures.append(what)


def read(path):
    with open(path, encoding="utf-8") as f:
        return f.read()


with tempfile.TemporaryDirectory() as d:
    j = lambda name: os.path.join(d, name)

    run(expect=1)
    run("--help")
    run("frobnicate", expect=1)
    for sub in (["ingest"], ["corpus"], ["recipes"], ["train"], ["query"], ["query", "similar"], ["query", "distance"],
                ["query", "analogy"], ["query", "odd"], ["stats"], ["stats", "dest"], ["stats", "pairs"], ["tsne"],
                ["generate"], ["rerun"]):
        p = run(*sub, "--help")
        check("--help" in p.stdout, f"{sub} --help lists no options")
    check("--window" in run("train", "--help").stdout, "train --help misses --window")
    check("--out-svg" in run("tsne", "--help").stdout, "tsne --help misses --out-svg")

    # the sample game through moves_texts gives back its own move listing
    sample = os.path.join(FIXTURES, "sample_game_long.txt")
    run("ingest", sample, "--out", j("sample.store"))
    run("corpus", "--store", j("sample.store"), "--recipe", "moves_texts", "--out", j("sample.txt"))
    listing = " ".join(read(sample).split()) + "\n"
    check(read(j("sample.txt")) == listing, "moves_texts corpus differs from the sample listing")
    check(os.path.exists(j("sample.txt.manifest.json")), "corpus wrote no manifest")

    p = run("corpus", "--store", j("sample.store"), "--recipe", "no_such_recipe", "--out", j("x.txt"), expect=1)
    names = run("recipes").stdout.split()
    check(len(names) == 19, f"expected 19 recipes, got {len(names)}")
    check(all(n in p.stderr for n in names), "unknown recipe error does not list every recipe")
    run("ingest", j("missing.pgn"), "--out", j("x.store"), expect=1)

    # deterministic training twice -> same model checksum in both manifests
    run("generate", "--games", "300", "--seed", "5", "--out", j("g.pgn"), "--format", "pgn")
    p = run("ingest", j("g.pgn"), "--out", j("g.store"))
    check("games 300" in p.stdout, "ingest did not report 300 games")
    run("corpus", "--store", j("g.store"), "--recipe", "moves_texts", "--out", j("g.txt"))
    sums = []
    for name in ("m1.txt", "m2.txt"):
        run("train", "--corpus", j("g.txt"), "--out", j(name), "--dim", "24", "--epochs", "2", "--min-count", "2",
            "--deterministic", "--seed", "7")
        m = json.loads(read(j(name) + ".manifest.json"))
        sums.append(m["checksums"][j(name)])
        check(m["seed"] == 7 and m["flags"]["window"] == 5, "train manifest missing seed/window")
    check(sums[0] == sums[1], "deterministic models differ")
    check(read(j("m1.txt")) == read(j("m2.txt")), "deterministic model files differ")
    p = run("rerun", j("m1.txt.manifest.json"), "--verify")
    check("match" in p.stdout and "MISMATCH" not in p.stdout, "rerun did not reproduce the model")

    model = j("m1.txt")
    p = run("query", "odd", "--model", model, "Pe2e4", "Ng1f3", "Pd2d4", "Bf1c4", "Nb1c3", "Pb4b5")
    check(len(p.stdout.split()) == 1, "odd printed more than one token")
    p = run("query", "similar", "--model", model, "Pe2e4", "-k", "4")
    check(len(p.stdout.splitlines()) == 4, "similar -k 4 did not print 4 rows")
    check(all(len(line.split()[1].split(".")[1]) == 6 for line in p.stdout.splitlines()), "similarities not 6 decimals")
    p = run("query", "similar", "--model", model, "Pe2e4", "-k", "3", "--csv")
    check(p.stdout.splitlines()[0] == "token,similarity", "csv header")
    p = run("query", "distance", "--model", model, "Pe2e4", "Pe2e4")
    check(abs(float(p.stdout) - 1.0) < 1e-6, "distance to self is not 1")
    p = run("query", "similar", "--model", model, "Qz9z9", expect=2)
    check("Qz9z9" in p.stderr, "unknown token not echoed")
    run("query", "odd", "--model", model, "Pe2e4", "Ng1f3", expect=1)
    run("query", "analogy", "--model", model, "--positive", "Pe2e4", "pe7e5", "--negative", "Pd2d4")
    run("stats", "dest", "--model", model, "--csv")
    run("stats", "pairs", "--model", model, "-k", "3")
    with open(j("bad.txt"), "w") as f:
        f.write("2 3\nPe2e4 1 0\n")
    run("query", "similar", "--model", j("bad.txt"), "Pe2e4", expect=2)

    run("tsne", "--model", model, "--perplexity", "5", "--iters", "300", "--top", "150", "--out-svg", j("p.svg"),
        "--out-csv", j("p.csv"))
    root = ET.parse(j("p.svg")).getroot()
    check(root.tag.endswith("svg"), "svg root element")
    rows = read(j("p.csv")).splitlines()
    check(rows[0] == "token,x,y,piece,color,labeled" and len(rows) == 151, "csv shape")
    check(sum(r.endswith(",1") for r in rows[1:]) == 50, "label_every 3 over 150 points should label 50")
    run("tsne", "--model", model, "--perplexity", "60", "--top", "150", "--out-csv", j("q.csv"), expect=1)
    run("tsne", "--model", model, expect=1)

if failures:
    print("\n".join(failures))
    sys.exit(1)
print("cli smoke: ok")
