#!/usr/bin/env python3
# SPDX-License-Identifier: Apache-2.0
# Copyright 2026 The scs Authors
"""Mine docstring/function pairs from installed Python sources.

Writes CodeSearchNet-style JSONL (id, language, doc_tokens, code_tokens,
raw_doc) for a train and a test partition. Whole top-level packages go to
one side so no repository contributes to both. Output depends only on the
files found under the scanned roots.
"""

import argparse
import ast
import io
import json
import random
import re
import sys
import sysconfig
import tokenize
import zlib
from pathlib import Path

SKIP_DIRS = {"test", "tests", "testing", "idle_test", "__pycache__", "lib2to3", "site-packages",
             "dist-packages", "ensurepip", "turtledemo", "_vendor", "vendored", "examples"}
MARKUP = re.compile(r"\{@\S+\s+([^}]*)\}|<[^>]+>|[`*]|:\w+:")


def summarize(doc):
    """First paragraph, inline markup stripped, whitespace-split."""
    para = re.split(r"\n\s*\n", doc.strip(), maxsplit=1)[0]
    return MARKUP.sub(lambda m: m.group(1) or "", para).split()


def code_tokens(source):
    out = []
    try:
        for tok in tokenize.generate_tokens(io.StringIO(source).readline):
            if tok.type in (tokenize.NAME, tokenize.OP, tokenize.NUMBER, tokenize.STRING):
                out.append(tok.string)
    except (tokenize.TokenError, IndentationError, SyntaxError):
        return None
    return out


def strip_docstring(fn, lines):
    """Source of `fn` without its docstring statement."""
    body0 = fn.body[0]
    start = fn.lineno - 1 if not fn.decorator_list else fn.decorator_list[0].lineno - 1
    kept = lines[start:body0.lineno - 1] + lines[body0.end_lineno:fn.end_lineno]
    return "".join(kept)


def pairs_from_file(path, root):
    try:
        text = path.read_text(encoding="utf-8")
        tree = ast.parse(text)
    except (UnicodeDecodeError, SyntaxError, ValueError, RecursionError):
        return
    lines = text.splitlines(keepends=True)
    module = ".".join(path.relative_to(root).with_suffix("").parts)
    stack = [(tree, "")]
    while stack:
        node, prefix = stack.pop()
        for child in ast.iter_child_nodes(node):
            if isinstance(child, ast.ClassDef):
                stack.append((child, prefix + child.name + "."))
            elif isinstance(child, (ast.FunctionDef, ast.AsyncFunctionDef)):
                doc = ast.get_docstring(child)
                name = child.name
                if not doc or (name.startswith("__") and name.endswith("__")) or name.startswith("test"):
                    continue
                if len(child.body) < 2:
                    continue
                doc_toks = summarize(doc)
                code = code_tokens(strip_docstring(child, lines))
                if len(doc_toks) < 3 or not code or not (20 <= len(code) <= 400):
                    continue
                yield {
                    "id": f"{module}:{prefix}{name}",
                    "language": "python",
                    "doc_tokens": doc_toks,
                    "code_tokens": code,
                    "raw_doc": doc,
                }


def side_of(pkg, test_fraction):
    return "test" if zlib.crc32(pkg.encode()) % 1000 / 1000.0 < test_fraction else "train"


def scan(roots, want, test_fraction, surplus=3):
    """Scans top-level packages in name order until each side holds
    `surplus` times the requested number of pairs."""
    side = {"train": [], "test": []}
    seen_ids = set()
    seen_code = set()
    for root in roots:
        for top in sorted(root.iterdir()):
            if top.name.startswith(".") or top.name in SKIP_DIRS:
                continue
            if top.is_dir():
                files = sorted(top.rglob("*.py"))
            elif top.suffix == ".py":
                files = [top]
            else:
                continue
            bucket = side[side_of(top.name.removesuffix(".py"), test_fraction)]
            name = "test" if bucket is side["test"] else "train"
            if len(bucket) >= surplus * want[name]:
                continue
            for path in files:
                rel = path.relative_to(root).parts
                if any(p in SKIP_DIRS or p.startswith(".") for p in rel[:-1]):
                    continue
                for e in pairs_from_file(path, root):
                    key = " ".join(e["code_tokens"])
                    if e["id"] in seen_ids or key in seen_code:
                        continue
                    seen_ids.add(e["id"])
                    seen_code.add(key)
                    bucket.append(e)
    return side


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-dir", required=True, type=Path)
    ap.add_argument("--train", type=int, default=5000)
    ap.add_argument("--test", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--test-fraction", type=float, default=0.3,
                    help="share of packages routed to the test side")
    ap.add_argument("--root", type=Path, action="append",
                    help="source root to scan (default: stdlib and site-packages)")
    args = ap.parse_args()

    paths = sysconfig.get_paths()
    default_roots = dict.fromkeys(Path(paths[k]) for k in ("stdlib", "purelib", "platlib"))
    roots = args.root or [r for r in default_roots if r.is_dir()]
    want = {"train": args.train, "test": args.test}
    side = scan(roots, want, args.test_fraction)

    rng = random.Random(args.seed)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    for name, want in (("train", args.train), ("test", args.test)):
        items = side[name]
        rng.shuffle(items)
        if len(items) < want:
            print(f"error: only {len(items)} {name} pairs available, {want} requested",
                  file=sys.stderr)
            return 1
        tmp = args.out_dir / f"{name}.jsonl.tmp"
        with tmp.open("w", encoding="utf-8", newline="\n") as f:
            for e in items[:want]:
                f.write(json.dumps(e, ensure_ascii=False) + "\n")
        tmp.replace(args.out_dir / f"{name}.jsonl")
    print(f"train {args.train} of {len(side['train'])}, test {args.test} of {len(side['test'])}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
