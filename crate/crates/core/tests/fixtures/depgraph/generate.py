#!/usr/bin/env python3
"""Writes the medium C fixture tree and its golden outputs.

Edges are planned first; include lines are then written so that each one
names its planned target. The golden files come from the plan, not from
scanning the tree.
"""
import os
import random
import shutil

HERE = os.path.dirname(os.path.abspath(__file__))
TREE = os.path.join(HERE, "medium")
SEARCH = [".", "include"]

rng = random.Random(20240611)

files = []
files += [f"include/core/{n}.h" for n in ["types", "alloc", "list", "hash", "log", "error", "config_defs", "atom"]]
files += [f"include/util/{n}.h" for n in ["str", "math", "time", "bits", "path", "env"]]
files += [f"src/core/{n}" for n in ["main.c", "alloc.c", "list.c", "hash.c", "log.c", "error.c", "internal.h", "state.h", "state.c", "atom.c"]]
files += [f"src/net/{n}" for n in ["socket.c", "socket.h", "proto.c", "proto.h", "peer_a.h", "peer_b.h", "peer.c", "buffer.c", "buffer.h", "dns.cc"]]
files += [f"src/gui/{n}" for n in ["window.cpp", "window.hh", "widget.cpp", "widget.hh", "font.c", "font.h", "event.c", "event.h", "theme.hpp", "render.cxx"]]
files += [f"lib/{n}" for n in ["compat.c", "compat.h", "strlcpy.c", "qsort.c", "getopt.c", "getopt.h"]]
files += [f"tools/{n}" for n in ["gen.c", "dump.c", "bench.c", "lint.c"]]
files += ["version.h", "top.c"]
assert len(files) == len(set(files)) and len(files) >= 50

present = set(files)


def resolves(src, ref):
    base = os.path.dirname(src)
    for b in [base] + SEARCH:
        cand = os.path.normpath(os.path.join(b, ref)).replace(os.sep, "/")
        if not cand.startswith("..") and cand in present:
            return cand
    return None


def spelling(src, dst):
    """Shortest include string that reaches dst under the lookup order."""
    options = [os.path.relpath(dst, os.path.dirname(src) or ".").replace(os.sep, "/")]
    if dst.startswith("include/"):
        options.append(dst[len("include/"):])
    options.append(dst)
    for ref in sorted(options, key=len):
        if resolves(src, ref) == dst:
            return ref
    raise AssertionError((src, dst))


headers = [f for f in files if f.endswith((".h", ".hh", ".hpp"))]
plan = {f: [] for f in files}
for src in files:
    pool = [h for h in headers if h != src]
    k = rng.randint(1, 4) if not src.startswith("include/") else rng.randint(0, 2)
    for dst in rng.sample(pool, k):
        plan[src].append(dst)
# fixed features: a mutual pair, a parent-relative include, shadowing by the local directory
plan["src/net/peer_a.h"] = ["src/net/peer_b.h"]
plan["src/net/peer_b.h"] = ["src/net/peer_a.h", "include/core/types.h"]
plan["src/gui/font.c"].append("version.h")
plan["tools/gen.c"].append("src/core/state.h")
plan["lib/compat.c"] = ["lib/compat.h"]

externals = {
    "src/core/main.c": ["stdio.h", "stdlib.h", "config.h"],
    "src/net/socket.c": ["sys/socket.h", "stdio.h"],
    "src/gui/window.cpp": ["vector", "X11/Xlib.h"],
    "tools/dump.c": ["stdio.h"],
    "lib/compat.c": ["string.h"],
}

shutil.rmtree(TREE, ignore_errors=True)
for f in files:
    path = os.path.join(TREE, f)
    os.makedirs(os.path.dirname(path), exist_ok=True)
    lines = [f"/* {f} */"]
    for ext in externals.get(f, []):
        lines.append(f"#include <{ext}>")
    for i, dst in enumerate(plan[f]):
        ref = spelling(f, dst)
        lines.append(f'#include "{ref}"')
        if i == 0:
            lines.append(f'#  include "{ref}"  /* repeated on purpose */')
    lines.append('// #include "ghost_line.h"')
    lines.append("/*")
    lines.append('#include "ghost_block.h"')
    lines.append("*/")
    lines.append("int placeholder_%d;" % files.index(f))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")

# files the C profile must ignore
for extra, body in [("README.md", '#include "top.c"\n'), ("Makefile", "all:\n"), ("scripts/run.py", "import os\n")]:
    path = os.path.join(TREE, extra)
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w") as fh:
        fh.write(body)

ordered = sorted(files)
ext_names = sorted({e for refs in externals.values() for e in refs})
ids = {f: i for i, f in enumerate(ordered)}
ids.update({"ext:" + e: len(ordered) + i for i, e in enumerate(ext_names)})
edges = set()
for src, dsts in plan.items():
    for dst in dsts:
        edges.add((ids[src], ids[dst]))
for src, refs in externals.items():
    for e in refs:
        edges.add((ids[src], ids["ext:" + e]))

with open(os.path.join(HERE, "medium_edges.txt"), "w") as fh:
    fh.write(f"# nodes={len(ids)}\n")
    for u, v in sorted(edges):
        fh.write(f"{u},{v}\n")
with open(os.path.join(HERE, "medium_labels.csv"), "w") as fh:
    fh.write("id,path\n")
    for name, i in sorted(ids.items(), key=lambda kv: kv[1]):
        fh.write(f"{i},{name}\n")
print(f"{len(files)} files, {len(ext_names)} externals, {len(edges)} edges")
