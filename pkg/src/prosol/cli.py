"""Command-line interface: ``prosol <command> ...``.

Exit codes: 0 success, 1 a check failed, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import yaml

from . import certify, congruence, corpus, tower, treeauto
from .config import ConfigError, load_config
from .finite import derived_series, lower_central_series
from .freequot import lcs_depth, metabelian_image, subgroup_membership, subgroup_rank
from .words import ParseError, parse_presentation, parse_word
from .zlattice import abelianize


class UsageError(Exception):
    pass


def _text_or_file(arg: str) -> str:
    path = Path(arg)
    if path.is_file():
        return path.read_text()
    if arg.lstrip().startswith(("<", "{", "name:", "generators:")):
        return arg
    raise UsageError(f"no such file: {arg}")


def _emit(data: dict, as_json: bool, text: str) -> None:
    if as_json:
        print(json.dumps(data, indent=2, sort_keys=True))
    else:
        print(text)


# --- commands -------------------------------------------------------------------

def cmd_run(args, cfg) -> int:
    report = corpus.run_suite(args.corpus, cfg, args.only or None)
    payload = report.dumps()
    if args.report:
        Path(args.report).write_text(payload)
    if args.json:
        sys.stdout.write(payload)
    else:
        print(report.text())
    return 0 if report.passed else 1


def cmd_explain(args, cfg) -> int:
    try:
        print(corpus.explain(args.entry, cfg, args.corpus))
    except KeyError as e:
        raise UsageError(str(e.args[0])) from None
    return 0


def cmd_abelianize(args, cfg) -> int:
    p = parse_presentation(_text_or_file(args.presentation))
    ab = abelianize(p)
    data = {
        "abelian_invariants": ab.invariants.to_json(),
        "generator_images": {n: list(v) for n, v in ab.images.items()},
    }
    _emit(data, args.json, str(ab.invariants))
    return 0


def _load_group(arg: str, cfg):
    spec = yaml.safe_load(_text_or_file(arg))
    if not isinstance(spec, dict):
        raise UsageError("group file must be a mapping")
    return corpus.build_group(spec.get("group", spec), cfg.element_cap)


def cmd_series(args, cfg) -> int:
    g = corpus._perm_model(_load_group(args.group, cfg))
    s = derived_series(g) if args.kind == "derived" else lower_central_series(g)
    ds = s if args.kind == "derived" else derived_series(g)
    data = {
        "kind": args.kind,
        "series_orders": s.orders,
        "length": s.length,
        "derived_lengths": [derived_series(h).length for h in s.groups],
        "is_soluble": ds.reaches_trivial,
        "is_nilpotent": lower_central_series(g).reaches_trivial,
        "soluble_residual_order": ds.terminal.order(),
    }
    text = f"{args.kind} series orders: {' > '.join(map(str, s.orders))}"
    text += f"\nsoluble: {data['is_soluble']}  nilpotent: {data['is_nilpotent']}"
    text += f"  soluble residual order: {data['soluble_residual_order']}"
    _emit(data, args.json, text)
    return 0


def cmd_tree_quotients(args, cfg) -> int:
    arg = args.automaton
    if arg in corpus._BUILTIN_AUTOMATA:
        sys_ = corpus._BUILTIN_AUTOMATA[arg]()
    else:
        sys_ = treeauto.load_automaton(_text_or_file(arg), cfg.max_tree_level)
    if args.levels > sys_.max_level:
        raise UsageError(f"--levels exceeds the configured maximum {sys_.max_level}")
    rep = treeauto.verify_two_group_tower(sys_, args.levels)
    data = rep.to_json()
    data["ok"] = rep.ok
    text = "\n".join(
        f"level {n}: order {o}  class {c}  derived length {d}"
        for n, o, c, d in zip(rep.levels, rep.orders, rep.nilpotency_classes, rep.derived_lengths)
    )
    _emit(data, args.json, text + f"\nall checks: {'pass' if rep.ok else 'FAIL'}")
    return 0 if rep.ok else 1


def cmd_congruence(args, cfg) -> int:
    reports = [congruence.layer_structure(args.d, args.p, a, args.variant, cfg.layer_cap, seed=cfg.seed)
               for a in range(2, args.max_a + 1)]
    data = {
        "d": args.d,
        "p": args.p,
        "variant": args.variant.upper(),
        "levels": list(range(2, args.max_a + 1)),
        "layer_orders": [r.order for r in reports],
        "elementary_abelian": [r.elementary_abelian for r in reports],
        "ok": all(r.ok for r in reports),
    }
    text = "\n".join(
        f"a={r.a}: |L_a| = {r.order} (expected {r.expected_order}), elementary abelian: {r.elementary_abelian}"
        for r in reports
    )
    _emit(data, args.json, text)
    return 0 if data["ok"] else 1


def _load_tower(arg: str, cfg) -> tower.QuotientTower:
    kind, _, rest = arg.partition(":")
    if kind == "padic" and rest:
        p, _, depth = rest.partition(":")
        return tower.padic_tower(int(p), int(depth or cfg.tower_depth))
    if kind in corpus._BUILTIN_AUTOMATA:
        return corpus.build_tower({"automaton": kind, "levels": int(rest or cfg.tree_levels)}, cfg)
    spec = yaml.safe_load(_text_or_file(arg))
    return corpus.build_tower(spec.get("tower", spec), cfg)


def cmd_metric(args, cfg) -> int:
    t = _load_tower(args.tower, cfg)
    d = tower.metric(t, args.word1, args.word2)
    _emit({"distance": d.to_json()}, args.json, str(d))
    return 0


def _presentation_and_cert(arg: str, cert_path: str | None):
    entries = {e.name: e for e in corpus.load_corpus(corpus.shipped_corpus_text())}
    if arg in entries and entries[arg].kind == "presentation":
        e = entries[arg]
        p = parse_presentation(e.payload["presentation"])
        cert_src = e.payload.get("certificate")
    else:
        p = parse_presentation(_text_or_file(arg))
        cert_src = None
    if cert_path:
        cert_src = Path(cert_path).read_text()
    cert = certify.load_certificate(cert_src, p) if cert_src is not None else None
    return p, cert


def cmd_compare(args, cfg) -> int:
    entries = {e.name: e for e in corpus.load_corpus(corpus.shipped_corpus_text())}
    e = entries.get(args.group)
    if e is not None and e.kind in ("permutation-group", "matrix-group", "wreath"):
        g = corpus.build_group(e.payload["group"], cfg.element_cap)
        rep = tower.completion_comparison(g, e.name)
    else:
        p, cert = _presentation_and_cert(args.group, args.cert)
        rep = tower.completion_comparison(p, args.group if e else "G", max_stage=cfg.tower_depth, certificate=cert)
    _emit(rep.to_json(), args.json, rep.verdict)
    return 0


def cmd_kernel(args, cfg) -> int:
    p, cert = _presentation_and_cert(args.presentation, args.cert)
    v = certify.prosoluble_kernel_report(p, cert, args.presentation if not Path(args.presentation).is_file() else "G")
    print(json.dumps(v.to_json(), indent=2, sort_keys=True))
    if cert is not None and not v.certificate["accepted"]:
        return 1
    return 0


def cmd_nilpotent_depth(args, cfg) -> int:
    names = args.alphabet.split(",")
    w = parse_word(args.word, names)
    depth = lcs_depth(w, args.cls, len(names))
    data = {"lcs_depth": str(depth), "metabelian_trivial": metabelian_image(w, len(names)).is_trivial()}
    _emit(data, args.json, f"lcs depth: {depth}\ntrivial in F/D^2: {data['metabelian_trivial']}")
    return 0


def cmd_subgroup(args, cfg) -> int:
    names = args.alphabet.split(",")
    lines = [ln.split("#", 1)[0].strip() for ln in Path(args.gens).read_text().splitlines()]
    gens = [parse_word(ln, names) for ln in lines if ln]
    data = {"subgroup_rank": subgroup_rank(gens)}
    text = f"subgroup rank: {data['subgroup_rank']}"
    if args.member:
        member = subgroup_membership(gens, parse_word(args.member, names))
        data["member"] = member
        text += f"\n{args.member} in subgroup: {member}"
    _emit(data, args.json, text)
    return 0


# --- parser ------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="prosol", description="Finite truncations of prosoluble and profinite completions.")
    ap.add_argument("--config", help="YAML file overriding the default caps and seeds")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(func=func)
        p.add_argument("--json", action="store_true", help="print the JSON report")
        return p

    p = add("run", cmd_run, "run the corpus verification suite")
    p.add_argument("--corpus", help="corpus file (default: the shipped paper.corpus)")
    p.add_argument("--report", help="write the JSON report here")
    p.add_argument("--only", nargs="*", help="run only these entries")

    p = add("explain", cmd_explain, "show an entry's anchors and evidence")
    p.add_argument("entry")
    p.add_argument("--corpus")

    p = add("abelianize", cmd_abelianize, "abelian invariants of a presentation")
    p.add_argument("presentation", help="file or literal such as '<a,b | a = [a, a^b]>'")

    p = add("series", cmd_series, "derived or lower central series of a finite group")
    p.add_argument("group", help="YAML group file")
    p.add_argument("--kind", choices=["derived", "lcs"], default="derived")

    p = add("tree-quotients", cmd_tree_quotients, "level quotients of a tree automaton")
    p.add_argument("automaton", help="automaton file or a built-in name (grigorchuk, basilica)")
    p.add_argument("--levels", type=int, default=5)

    p = add("congruence", cmd_congruence, "layers of the congruence filtration")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--max-a", type=int, required=True)
    p.add_argument("--variant", choices=["sl", "gl", "SL", "GL"], default="gl")

    p = add("metric", cmd_metric, "distance between two words in a tower")
    p.add_argument("tower", help="tower file, padic:P:DEPTH or grigorchuk:LEVELS")
    p.add_argument("word1")
    p.add_argument("word2")

    p = add("compare", cmd_compare, "compare prosoluble and pro-p towers of a group")
    p.add_argument("group", help="corpus entry name or presentation")
    p.add_argument("--cert")

    p = add("kernel", cmd_kernel, "prosoluble kernel verdict as JSON")
    p.add_argument("presentation", help="corpus entry name, file or literal presentation")
    p.add_argument("--cert", help="YAML certificate file")

    p = add("nilpotent-depth", cmd_nilpotent_depth, "lower central depth of a free-group word")
    p.add_argument("--class", dest="cls", type=int, required=True)
    p.add_argument("--word", required=True)
    p.add_argument("--alphabet", default="x,y")

    p = add("subgroup", cmd_subgroup, "rank of and membership in a subgroup of a free group")
    p.add_argument("--gens", required=True, help="file with one generator word per line")
    p.add_argument("--member")
    p.add_argument("--alphabet", default="x,y")
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        cfg = load_config(args.config)
        return args.func(args, cfg)
    except (UsageError, ParseError, corpus.CorpusError, ConfigError, certify.CertificateError,
            tower.TowerError, yaml.YAMLError, FileNotFoundError, ValueError) as e:
        print(f"prosol: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
