"""Command-line interface: ``unidom <command> <group> [options]``.

Exit codes: 0 success, 1 a certificate failed verification, 2 inconclusive
within the given budgets, 3 bad input.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import logging
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

from unidom import __version__
from unidom.actions import (
    DEFAULT_DEGREE_CAP,
    DEFAULT_NODE_BUDGET,
    DegreeCapError,
    NodeBudgetExceeded,
    base_size,
    coset_action,
    fpr,
)
from unidom.atlas import GroupLoadError, GroupSpec, resolve
from unidom.chain import DEFAULT_ENUMERATION_CAP, EnumerationCapError
from unidom.kernels import BACKEND
from unidom.perm import CycleParseError, format_cycles, parse_cycles

log = logging.getLogger("unidom")

EXIT_OK, EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_INPUT = 0, 1, 2, 3
CACHE_SCHEMA = 1


class Inconclusive(Exception):
    def __init__(self, message: str, report: dict | None = None):
        super().__init__(message)
        self.report = report


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    cap: int = DEFAULT_ENUMERATION_CAP
    degree_cap: int = DEFAULT_DEGREE_CAP
    trials: int = 2000
    node_budget: int = DEFAULT_NODE_BUDGET
    refute_budget: int = 50_000_000
    climb_budget: int | None = None
    workers: int = 1
    mode: str | None = None
    cache_dir: str | None = None
    format: str = "json"

    def __post_init__(self):
        for k in ("cap", "degree_cap", "trials", "node_budget", "refute_budget", "workers"):
            if getattr(self, k) <= 0:
                raise ValueError(f"{k} must be positive")
        if self.climb_budget is not None and self.climb_budget <= 0:
            raise ValueError("budget must be positive")

    def digest(self) -> str:
        d = asdict(self)
        d.pop("cache_dir")
        d.pop("format")
        return hashlib.sha256(json.dumps(d, sort_keys=True).encode()).hexdigest()[:16]


# -- cache -----------------------------------------------------------------------


class Cache:
    """JSON blobs keyed by (group digest, operation, parameters, config)."""

    def __init__(self, root: str | None):
        self.root = Path(root) if root else None

    def _path(self, key: dict) -> Path:
        h = hashlib.sha256(json.dumps(key, sort_keys=True).encode()).hexdigest()
        return self.root / f"v{CACHE_SCHEMA}" / h[:2] / f"{h}.json"

    def get(self, key: dict):
        if self.root is None:
            return None
        p = self._path(key)
        if not p.exists():
            return None
        blob = json.loads(p.read_text())
        if blob.get("schema") != CACHE_SCHEMA or blob.get("key") != key:
            return None
        log.info("cache hit %s", p.name)
        return blob["value"]

    def put(self, key: dict, value) -> None:
        if self.root is None:
            return
        p = self._path(key)
        p.parent.mkdir(parents=True, exist_ok=True)
        # key order is kept so replayed text and csv output match a fresh run
        p.write_text(json.dumps({"schema": CACHE_SCHEMA, "key": key, "value": value}))


# -- helpers -----------------------------------------------------------------------


def _group(spec: GroupSpec, cfg: RunConfig):
    return spec.group(seed=cfg.seed, cap=cfg.cap)


def _mode(G, cfg: RunConfig) -> str:
    from unidom.overgroups import CERTIFIED, ESTIMATED

    if cfg.mode:
        return cfg.mode
    return CERTIFIED if G.enumerable() else ESTIMATED


def _element(G, args) -> tuple:
    """The element named by --element (cycles) or --class (label)."""
    if getattr(args, "element", None):
        x = parse_cycles(args.element, G.degree).images
        if not G.contains(x):
            raise ValueError(f"{args.element} is not in {G.name}")
        return x
    if getattr(args, "cls", None):
        return G.class_table().by_label(args.cls).rep
    raise ValueError("give --class LABEL or --element CYCLES")


def _overgroups(G, s, cfg: RunConfig):
    from unidom.overgroups import maximal_overgroups

    return maximal_overgroups(G, s, _mode(G, cfg), cfg.climb_budget, cfg.seed, cfg.degree_cap)


# -- commands ----------------------------------------------------------------------


def cmd_info(spec, G, args, cfg, cache):
    out = {"group": G.name, "degree": G.degree, "order": G.order, "generators": [format_cycles(g) for g in G.gens],
           "provenance": spec.provenance, "backend": BACKEND}
    try:
        tab = G.class_table()
        out["classes"] = len(tab)
        out["class_table"] = [{"label": c.label, "order": c.order, "size": c.size, "rep": format_cycles(c.rep)}
                              for c in tab]
    except Exception as e:  # noqa: BLE001 - summary only
        out["classes"] = None
        out["class_table_error"] = str(e)
    return out, True


def cmd_mu(spec, G, args, cfg, cache):
    from unidom.overgroups import mu

    r = mu(G, _mode(G, cfg), cfg.climb_budget, cfg.seed, ties=args.ties)
    return r.to_json(), r.certified


def cmd_overgroups(spec, G, args, cfg, cache):
    s = _element(G, args)
    ov = _overgroups(G, s, cfg)
    d = ov.to_json()
    d["orders"] = ov.orders()
    d["count"] = len(ov)
    return d, ov.certified


def cmd_base(spec, G, args, cfg, cache):
    from unidom.actions import ksets_base_size, halasi_bracket

    if args.ksets:
        n, k = args.ksets
        b, witness = ksets_base_size(n, k)
        lo, hi = halasi_bracket(n, k)
        return {"action": f"S_{n} on {k}-sets", "b": b, "witness": [[p + 1 for p in w] for w in witness],
                "halasi_bracket": [lo, hi]}, True
    if args.cls or args.element:
        s = _element(G, args)
        ov = _overgroups(G, s, cfg)
        rows = []
        for H in ov.subgroups:
            act = coset_action(G, H, cfg.degree_cap)
            cert = base_size(act, args.strategy, cfg.node_budget, cfg.seed)
            rows.append({"subgroup_order": H.order, "index": H.index, **cert.to_json()})
        return {"element": format_cycles(s), "overgroup_mode": ov.mode, "actions": rows}, ov.certified and all(
            r["conclusive"] for r in rows)
    cert = base_size(G, args.strategy, cfg.node_budget, cfg.seed)
    return {"action": "natural", **cert.to_json()}, cert.conclusive


def cmd_fpr(spec, G, args, cfg, cache):
    from unidom.actions import fpr_ksets
    from unidom.field import is_prime

    if args.ksets:
        n, k = args.ksets
        shape = [int(x) for x in args.shape.split(",")] if args.shape else [n]
        v = fpr_ksets(shape, n, k)
        return {"shape": shape, "n": n, "k": k, "fpr": str(v)}, True
    s = _element(G, args)
    ov = _overgroups(G, s, cfg)
    tab = G.class_table()
    rows = []
    for H in ov.subgroups:
        act = coset_action(G, H, cfg.degree_cap)
        vals = {}
        for c in tab:
            if is_prime(c.order):
                v = fpr(c.rep, act, dual=args.dual)
                vals[c.label] = str(v)
        rows.append({"subgroup_order": H.order, "index": H.index, "fpr": vals})
    return {"element": format_cycles(s), "overgroup_mode": ov.mode, "actions": rows}, ov.certified


def cmd_qhat(spec, G, args, cfg, cache):
    from unidom.prob import NoConclusion, ProbProfile, min_c

    s = _element(G, args)
    ov = _overgroups(G, s, cfg)
    prof = ProbProfile.build(G, s, ov, with_p=args.exact)
    cs = list(range(1, args.c_max + 1))
    out = prof.to_json(cs)
    for method in (("q_hat", "q_exact") if args.exact else ("q_hat",)):
        r = min_c(prof, method, args.c_max)
        out[f"min_c_{method}"] = r.to_json() if isinstance(r, NoConclusion) else r
    return out, prof.certified


def cmd_gamma(spec, G, args, cfg, cache):
    from unidom.domination import gamma_u_bracket

    rep = gamma_u_bracket(G, cfg.seed, cfg.trials, args.c_max, cfg.refute_budget, _mode(G, cfg),
                          cfg.climb_budget, with_prob=not args.no_prob)
    d = rep.to_json()
    if not rep.exact:
        raise Inconclusive(f"bracket [{rep.lower}, {rep.upper}] is not closed", d)
    return d, rep.exact


def cmd_tds_search(spec, G, args, cfg, cache):
    from unidom.domination import gamma_u_upper_random

    s = _element(G, args)
    cls = G.class_table().classify(s) if G.enumerable() or G.family else None
    ov = _overgroups(G, s, cfg)
    if cls is None or G.class_table()[cls].rep != s:
        raise ValueError("tds-search works with class representatives; use --class")
    cert = gamma_u_upper_random(G, cls, args.size, cfg.trials, cfg.seed, ov)
    if cert is None:
        raise Inconclusive(f"no TDS of size {args.size} found in {cfg.trials} trials")
    d = cert.to_json()
    d["group_digest"] = spec.digest()
    if args.out:
        Path(args.out).write_text(json.dumps(d, indent=2))
    return d, cert.certified


def cmd_tds_verify(spec, G, args, cfg, cache):
    from unidom.domination import TDSCertificate, verify_certificate

    try:
        raw = json.loads(Path(args.certificate).read_text())
        cert = TDSCertificate.from_json(raw)
    except (OSError, json.JSONDecodeError, KeyError) as e:
        raise ValueError(f"cannot read certificate: {e}") from None
    ok, why = verify_certificate(G, cert, args.method, cfg.seed, cfg.climb_budget)
    if ok and raw.get("group_digest") not in (None, spec.digest()):
        ok, why = False, "certificate was issued for different generators"
    return {"certificate": args.certificate, "pass": ok, "reason": why}, ok


def cmd_alt_theory(spec, G, args, cfg, cache):
    from unidom import alt_theory as T
    from unidom.field import is_prime

    n = args.n
    w = T.script_H(n)
    shape = T.shape_for(n)
    out = {"n": n, "H_witnesses": [list(x) for x in w.witnesses], "mu_predicted": T.mu_alt_predicted(n),
           "shape": shape}
    if len(shape) <= 3:
        pad = shape + [1] * (n - sum(shape))
        if len(pad) <= 3:
            v, why = T.imprimitive_containment(pad, n)
            out["imprimitive"] = {"contained": v, "reason": why}
    if is_prime(n) and w:
        out["ell"] = T.ell_bound(n)
        out["pgam_brackets"] = []
        for q, d in w.witnesses:
            from unidom.field import factor_prime_power

            _p, f = factor_prime_power(q)
            lo, hi = T.pgam_bracket(n, q, d, f)
            out["pgam_brackets"].append({"q": q, "d": d, "lower": str(lo), "upper": str(hi)})
    return out, True


COMMANDS = {
    "info": cmd_info,
    "mu": cmd_mu,
    "overgroups": cmd_overgroups,
    "base": cmd_base,
    "fpr": cmd_fpr,
    "qhat": cmd_qhat,
    "gamma": cmd_gamma,
    "tds-search": cmd_tds_search,
    "tds-verify": cmd_tds_verify,
    "alt-theory": cmd_alt_theory,
}
NO_GROUP = {"alt-theory"}
CACHED = {"mu", "overgroups", "base", "fpr", "qhat", "gamma"}


# -- output ------------------------------------------------------------------------


def _flatten(d, prefix="") -> list[tuple[str, str]]:
    rows = []
    if isinstance(d, dict):
        for k, v in d.items():
            rows += _flatten(v, f"{prefix}{k}.")
        return rows
    if isinstance(d, list) and any(isinstance(v, (dict, list)) for v in d):
        for i, v in enumerate(d):
            rows += _flatten(v, f"{prefix}{i}.")
        return rows
    return [(prefix.rstrip("."), json.dumps(d) if isinstance(d, list) else str(d))]


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True)
    rows = _flatten(report)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["key", "value"])
        w.writerows(rows)
        return buf.getvalue().rstrip("\n")
    width = max((len(k) for k, _ in rows), default=0)
    return "\n".join(f"{k.ljust(width)}  {v}" for k, v in rows)


# -- parser ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("global options")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--budget", type=int, default=None, help="climb budget for overgroup searches")
    g.add_argument("--cap", type=int, default=DEFAULT_ENUMERATION_CAP, help="enumeration cap on group order")
    g.add_argument("--degree-cap", type=int, default=DEFAULT_DEGREE_CAP)
    g.add_argument("--trials", type=int, default=2000, help="random search trials")
    g.add_argument("--node-budget", type=int, default=DEFAULT_NODE_BUDGET, help="base-size search nodes")
    g.add_argument("--refute-budget", type=int, default=50_000_000, help="exhaustive tuple limit")
    g.add_argument("--mode", choices=["certified", "estimated"], default=None)
    g.add_argument("--format", choices=["json", "csv", "text"], default="json")
    g.add_argument("--cache-dir", default=None)
    g.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="unidom", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"unidom {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, help_, group=True):
        sp = sub.add_parser(name, parents=[common], help=help_)
        if group:
            sp.add_argument("group", help="e.g. 'alt 9', 'psl2 9', 'M12', 'file path.gens'")
        return sp

    def element_opts(sp):
        sp.add_argument("--class", dest="cls", help="class label such as 10a")
        sp.add_argument("--element", help="element in cycle notation, 1-based")

    add("info", "degree, order and class table")
    sp = add("mu", "minimal number of maximal overgroups")
    sp.add_argument("--ties", action="store_true", help="report every class attaining the minimum")
    element_opts(add("overgroups", "maximal subgroups containing an element"))
    sp = add("base", "base sizes")
    element_opts(sp)
    sp.add_argument("--strategy", choices=["exact", "greedy", "log"], default="exact")
    sp.add_argument("--ksets", type=int, nargs=2, metavar=("N", "K"), help="S_N acting on K-sets")
    sp = add("fpr", "fixed point ratios on cosets of maximal overgroups")
    element_opts(sp)
    sp.add_argument("--dual", action="store_true", help="cross-check with the class sweep")
    sp.add_argument("--ksets", type=int, nargs=2, metavar=("N", "K"))
    sp.add_argument("--shape", help="cycle shape for --ksets, e.g. 3,3,1")
    sp = add("qhat", "probabilistic bounds and minimal c")
    element_opts(sp)
    sp.add_argument("--c-max", type=int, default=8)
    sp.add_argument("--exact", action="store_true", help="also compute P(x,s) and the sharper bound")
    sp = add("gamma", "bracket the uniform domination number")
    sp.add_argument("--c-max", type=int, default=6)
    sp.add_argument("--no-prob", action="store_true", help="skip the probabilistic columns")
    sp = add("tds-search", "random search for a TDS of conjugates")
    element_opts(sp)
    sp.add_argument("--size", type=int, required=True)
    sp.add_argument("--out", help="write the certificate here")
    sp = add("tds-verify", "re-check a TDS certificate")
    sp.add_argument("certificate")
    sp.add_argument("--method", choices=["direct", "criterion"], default=None)
    sp = add("alt-theory", "arithmetic predicates for A_n", group=False)
    sp.add_argument("n", type=int)
    return p


def _config(args) -> RunConfig:
    return RunConfig(seed=args.seed, cap=args.cap, degree_cap=args.degree_cap, trials=args.trials,
                     node_budget=args.node_budget, refute_budget=args.refute_budget, climb_budget=args.budget,
                     mode=args.mode, cache_dir=args.cache_dir, format=args.format)


def _params(args) -> dict:
    skip = {"seed", "budget", "cap", "degree_cap", "trials", "node_budget", "refute_budget", "mode", "format",
            "cache_dir", "verbose", "command", "group"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse uses 2 for usage errors, which here means inconclusive
        return EXIT_OK if not e.code else EXIT_INPUT
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = _config(args)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    cache = Cache(cfg.cache_dir)
    report = {"tool": "unidom", "version": __version__, "backend": BACKEND, "command": args.command,
              "seed": cfg.seed, "config_digest": cfg.digest()}
    code = EXIT_OK
    try:
        spec = G = None
        if args.command not in NO_GROUP:
            spec = resolve(args.group)
            G = _group(spec, cfg)
            report["group"] = {"name": spec.name, "degree": spec.degree, "digest": spec.digest()}
        key = None
        result = None
        if args.command in CACHED and cfg.cache_dir:
            key = {"group": spec.digest(), "op": args.command, "params": _params(args), "config": cfg.digest(),
                   "version": __version__}
            result = cache.get(key)
        if result is None:
            value, certified = COMMANDS[args.command](spec, G, args, cfg, cache)
            result = {"result": value, "certified": bool(certified)}
            if key is not None:
                cache.put(key, result)
        report.update(result)
        if args.command == "tds-verify" and not result["result"]["pass"]:
            code = EXIT_FAIL
    except Inconclusive as e:
        report.update({"result": e.report, "certified": False, "inconclusive": str(e)})
        code = EXIT_INCONCLUSIVE
    except (GroupLoadError, CycleParseError, KeyError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (EnumerationCapError, DegreeCapError, NodeBudgetExceeded) as e:
        report.update({"result": None, "certified": False, "inconclusive": str(e)})
        code = EXIT_INCONCLUSIVE
    except Exception as e:  # budget exhaustion inside overgroup searches
        from unidom.overgroups import BudgetExceeded

        if not isinstance(e, BudgetExceeded):
            raise
        report.update({"result": None, "certified": False, "inconclusive": str(e)})
        code = EXIT_INCONCLUSIVE
    print(render(report, cfg.format), file=stdout)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
