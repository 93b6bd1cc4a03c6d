"""Compare the compiled kernels with the pure-Python fallback.

Each workload runs in a fresh interpreter, once with ``UNIDOM_PURE=1``
and once without, so the backend is chosen at import exactly as in normal
use.  Usage: ``python benchmarks/bench_kernels.py [--repeat N]``.
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys

WORKLOADS = {
    "mul/conj, degree 100": """
import random
from unidom import kernels as K
rng = random.Random(1)
ps = [tuple(rng.sample(range(100), 100)) for _ in range(200)]
t0 = time.perf_counter()
for p in ps:
    for q in ps:
        K.conj(K.mul(p, q), q)
""",
    "stabilizer chain, M12 x 20": """
from unidom.atlas import bundled
from unidom.chain import build_chain
spec = bundled("M12")
gens = [g.images for g in spec.generators]
t0 = time.perf_counter()
for seed in range(20):
    build_chain(gens, spec.degree, seed=seed)
""",
    "coset space M12/L2(11) and fpr": """
from unidom.atlas import bundled
from unidom.overgroups import maximal_overgroups
from unidom.actions import coset_action, fpr
G = bundled("M12").group()
s = G.class_table().by_label("11a").rep
t0 = time.perf_counter()
ov = maximal_overgroups(G, s)
for H in ov.subgroups:
    act = coset_action(G, H)
    for c in G.class_table():
        fpr(c.rep, act)
""",
    "class table by enumeration, A7": """
from unidom.group import PermGroup
from unidom.atlas import alternating
spec = alternating(7)
t0 = time.perf_counter()
G = PermGroup([g.images for g in spec.generators], 7)
G.class_table()
""",
}

RUNNER = """
import time, json
{body}
print(json.dumps({{"seconds": time.perf_counter() - t0, "backend": __import__("unidom").BACKEND}}))
"""


def run(body: str, pure: bool) -> dict:
    env = dict(os.environ)
    env["UNIDOM_PURE"] = "1" if pure else "0"
    out = subprocess.run([sys.executable, "-c", RUNNER.format(body=body)], env=env, check=True,
                         capture_output=True, text=True).stdout
    return json.loads(out.strip().splitlines()[-1])


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args()
    rows = []
    for name, body in WORKLOADS.items():
        best = {}
        for pure in (False, True):
            times = [run(body, pure) for _ in range(args.repeat)]
            best[pure] = min(t["seconds"] for t in times)
            backend = times[0]["backend"]
            if not pure and backend != "compiled":
                print("warning: compiled extension not available; both columns are pure Python", file=sys.stderr)
        rows.append({"workload": name, "compiled": best[False], "pure": best[True],
                     "speedup": best[True] / best[False] if best[False] else float("inf")})
    if args.json:
        print(json.dumps(rows, indent=2))
        return
    w = max(len(r["workload"]) for r in rows)
    print(f"{'workload'.ljust(w)}  compiled(s)    pure(s)  speedup")
    for r in rows:
        print(f"{r['workload'].ljust(w)}  {r['compiled']:11.3f}  {r['pure']:9.3f}  {r['speedup']:6.2f}x")


if __name__ == "__main__":
    main()
