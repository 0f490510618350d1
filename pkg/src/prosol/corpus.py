"""Corpus entries, their checks, and the verification report."""

from __future__ import annotations

import json
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any, Callable, Mapping

import yaml

from . import certify, congruence, tower, treeauto
from .config import Config
from .finite import (
    MatrixGroup,
    PermGroup,
    alternating_group,
    cyclic_group,
    derived_quotient_consistency,
    derived_series,
    dihedral_group,
    direct_product,
    enumerate_closure,
    lower_central_series,
    perfect_core_by_lattice,
    prosoluble_completion_finite,
    symmetric_group,
    wreath_product,
)
from .finite import perm as P
from .freequot import (
    lcs_depth,
    lcs_layer_ranks,
    metabelian_image,
    necklace_count,
    nilpotent_surjectivity,
    subgroup_membership,
    subgroup_rank,
)
from .words import ParseError, Word, commutator, conjugate, parse_presentation, parse_word
from .zlattice import abelianize

KINDS = (
    "presentation",
    "permutation-group",
    "matrix-group",
    "wreath",
    "tree-automaton",
    "tower",
    "congruence",
    "free-subgroup",
    "padic",
    "words",
)


class CorpusError(ValueError):
    def __init__(self, msg: str, line: int | None = None):
        super().__init__(f"line {line}: {msg}" if line is not None else msg)
        self.line = line


@dataclass
class CorpusEntry:
    name: str
    kind: str
    payload: dict
    expect: dict = field(default_factory=dict)
    tags: dict = field(default_factory=dict)
    flags: tuple[str, ...] = ()
    anchors: tuple[str, ...] = ()
    line: int | None = None


def shipped_corpus_text() -> str:
    return resources.files("prosol.data").joinpath("paper.corpus").read_text()


class _LineLoader(yaml.SafeLoader):
    pass


def _construct_mapping(loader, node):
    mapping = loader.construct_mapping(node, deep=True)
    mapping["__line__"] = node.start_mark.line + 1
    return mapping


_LineLoader.add_constructor(yaml.resolver.BaseResolver.DEFAULT_MAPPING_TAG, _construct_mapping)


def _strip_lines(x):
    if isinstance(x, dict):
        return {k: _strip_lines(v) for k, v in x.items() if k != "__line__"}
    if isinstance(x, list):
        return [_strip_lines(v) for v in x]
    return x


def load_corpus(text: str) -> list[CorpusEntry]:
    """Parse a corpus (YAML list of entries under ``entries``)."""
    try:
        data = yaml.load(text, Loader=_LineLoader)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        raise CorpusError(str(getattr(e, "problem", e)), mark.line + 1 if mark else None) from None
    if data is None:
        return []
    if not isinstance(data, dict) or not isinstance(data.get("entries", []), list):
        raise CorpusError("corpus must be a mapping with an 'entries' list", 1)
    out, seen = [], set()
    for raw in data.get("entries") or []:
        line = raw.get("__line__") if isinstance(raw, dict) else None
        if not isinstance(raw, dict) or "name" not in raw or "kind" not in raw:
            raise CorpusError("entry needs a name and a kind", line)
        raw = _strip_lines(raw)
        name, kind = str(raw.pop("name")), str(raw.pop("kind"))
        if kind not in KINDS:
            raise CorpusError(f"entry {name!r}: unknown kind {kind!r}", line)
        if name in seen:
            raise CorpusError(f"duplicate entry {name!r}", line)
        seen.add(name)
        entry = CorpusEntry(
            name,
            kind,
            raw,
            dict(raw.pop("expect", {}) or {}),
            dict(raw.pop("tags", {}) or {}),
            tuple(raw.pop("flags", ()) or ()),
            tuple(raw.pop("anchors", ()) or ()),
            line,
        )
        _validate_payload(entry)
        out.append(entry)
    return out


def _validate_payload(e: CorpusEntry) -> None:
    try:
        if e.kind == "presentation":
            p = parse_presentation(e.payload["presentation"])
            if "certificate" in e.payload:
                certify.load_certificate(e.payload["certificate"], p)
        elif e.kind in ("permutation-group", "matrix-group", "wreath"):
            if "group" not in e.payload:
                raise CorpusError("missing 'group'")
        elif e.kind == "tree-automaton":
            if "automaton" not in e.payload:
                raise CorpusError("missing 'automaton'")
        elif e.kind == "free-subgroup":
            names = e.payload.get("alphabet", ["x", "y"])
            for w in e.payload.get("gens", []):
                parse_word(w, names)
    except (ParseError, KeyError, certify.CertificateError) as err:
        raise CorpusError(f"entry {e.name!r}: {err}", e.line) from None


# --- finite groups ---------------------------------------------------------

def build_group(spec: Mapping, cap: int = 2**24):
    """Finite group from a corpus description."""
    if "symmetric" in spec:
        return symmetric_group(int(spec["symmetric"]))
    if "alternating" in spec:
        return alternating_group(int(spec["alternating"]))
    if "cyclic" in spec:
        return cyclic_group(int(spec["cyclic"]))
    if "dihedral" in spec:
        return dihedral_group(int(spec["dihedral"]))
    if "permutations" in spec:
        return PermGroup.from_cycles(spec["permutations"], int(spec.get("degree", 0)))
    if "matrices" in spec:
        return MatrixGroup(spec["matrices"], int(spec["modulus"]), cap=cap)
    if "direct" in spec:
        parts = [build_group(s, cap) for s in spec["direct"]]
        return direct_product(*(g if isinstance(g, PermGroup) else g.as_perm_group() for g in parts))
    if "wreath" in spec:
        s, t = (build_group(x, cap) for x in spec["wreath"])
        return wreath_product(s, t)
    if "automaton_level" in spec:
        a = spec["automaton_level"]
        return treeauto.level_quotient_group(_automaton(a["automaton"]), int(a["level"]))
    raise ValueError(f"unknown group description {sorted(spec)}")


def _perm_model(g) -> PermGroup:
    return g if isinstance(g, PermGroup) else g.as_perm_group()


def run_finite(e: CorpusEntry, cfg: Config) -> dict:
    g = build_group(e.payload["group"], cfg.element_cap)
    pg = _perm_model(g)
    ds, lcs = derived_series(pg), lower_central_series(pg)
    out: dict[str, Any] = {
        "order": pg.order(),
        "derived_orders": ds.orders,
        "lcs_orders": lcs.orders,
        "derived_length": ds.length,
        "nilpotency_class": lcs.length,
        "is_soluble": ds.reaches_trivial,
        "is_nilpotent": lcs.reaches_trivial,
        "soluble_residual_order": ds.terminal.order(),
        "prosoluble_completion_order": prosoluble_completion_finite(pg).order(),
        "derived_quotient_consistency": derived_quotient_consistency(pg),
    }
    if out["order"] <= cfg.enumeration_limit:
        if isinstance(g, MatrixGroup):
            enum = len(enumerate_closure(g.gens, g.identity(), g.mul, cfg.element_cap))
        else:
            enum = len(enumerate_closure(pg.gens, pg.identity(), P.mul, cfg.element_cap))
        out["schreier_sims_matches_enumeration"] = enum == out["order"]
    if e.payload.get("lattice") and out["order"] <= cfg.lattice_cap:
        oracle = perfect_core_by_lattice(pg, cfg.lattice_cap)
        out["perfect_core_matches_lattice"] = oracle == frozenset(ds.terminal.elements())
    return out


# --- presentations ---------------------------------------------------------

def run_presentation(e: CorpusEntry, cfg: Config) -> dict:
    p = parse_presentation(e.payload["presentation"])
    ab = abelianize(p)
    out: dict[str, Any] = {
        "abelian_invariants": str(ab.invariants),
        "abelian_json": ab.invariants.to_json(),
        "generator_images": {n: list(v) for n, v in ab.images.items()},
    }
    cert = certify.load_certificate(e.payload["certificate"], p) if "certificate" in e.payload else None
    v = certify.prosoluble_kernel_report(p, cert, e.name)
    out["kernel_status"] = v.status
    out["prosoluble"] = v.prosoluble
    out["kernel"] = v.kernel
    if cert is not None:
        chk = certify.verify_certificate(p, cert)
        out["certificate_accepted"] = chk.accepted
        out["target_image_zero"] = not any(certify.derived_tower_stage(p, 1).image(cert.target))
        out["quotient_abelian"] = v.quotient_abelian
        if v.prosoluble is not None and chk.accepted:
            t = certify.prosoluble_tower(p, v, e.name)
            out["prosoluble_tower_stages"] = [st.name for st in t.stages]
            out["canonical_map_target_identity"] = tower.canonical_map(t, cert.target).is_identity()
    if "metabelian_words" in e.payload:
        stage = certify.derived_tower_stage(p, 2)
        out["metabelian_trivial"] = {w: stage.is_trivial(parse_word(w, p.names)) for w in e.payload["metabelian_words"]}
    if "certificate_search" in e.payload:
        s = e.payload["certificate_search"]
        conj = [parse_word(c, p.names) if c != "1" else Word() for c in s["conjugators"]]
        out["small_certificate_found"] = {
            t: certify.small_certificate_search(p, parse_word(t, p.names), conj) for t in s["targets"]
        }
    if e.payload.get("compare"):
        rep = tower.completion_comparison(p, e.name, max_stage=cfg.tower_depth, certificate=cert)
        out["comparison"] = rep.to_json()
    return out


# --- tree automata -----------------------------------------------------------

_BUILTIN_AUTOMATA: dict[str, Callable[[], treeauto.AutomatonSystem]] = {
    "grigorchuk": treeauto.grigorchuk_group,
    "basilica": treeauto.basilica_group,
}


def _automaton(spec, max_level: int = treeauto.DEFAULT_MAX_LEVEL) -> treeauto.AutomatonSystem:
    if isinstance(spec, str):
        if spec not in _BUILTIN_AUTOMATA:
            raise ValueError(f"unknown automaton {spec!r}")
        return _BUILTIN_AUTOMATA[spec]()
    return treeauto.load_automaton(yaml.safe_dump(spec), max_level)


def run_automaton(e: CorpusEntry, cfg: Config) -> dict:
    sys = _automaton(e.payload["automaton"], cfg.max_tree_level)
    levels = int(e.payload.get("levels", cfg.tree_levels))
    rep = treeauto.verify_two_group_tower(sys, levels)
    out = rep.to_json()
    out["ok"] = rep.ok
    naive = []
    for n in range(1, min(levels, 3) + 1):
        G = treeauto.level_quotient_group(sys, n)
        naive.append(len(enumerate_closure(G.gens, G.identity(), P.mul)) == G.order())
    out["enumeration_matches"] = all(naive)
    return out


# --- towers -------------------------------------------------------------------

def build_tower(spec: Mapping, cfg: Config) -> tower.QuotientTower:
    if "padic" in spec:
        s = spec["padic"]
        return tower.padic_tower(int(s["p"]), int(s.get("depth", cfg.tower_depth)))
    if "moduli" in spec:
        return tower.cyclic_tower([int(m) for m in spec["moduli"]], name="moduli")
    if "automaton" in spec:
        sys = _automaton(spec["automaton"], cfg.max_tree_level)
        levels = int(spec.get("levels", cfg.tree_levels))
        groups = [treeauto.level_quotient_group(sys, n) for n in range(1, levels + 1)]
        return tower.tower_from_levels(groups, sys.generators, treeauto.project, name=sys.name)
    if "congruence" in spec:
        s = spec["congruence"]
        return congruence.residual_p_tower(int(s["d"]), int(s["p"]), int(s["max_a"]), cfg.layer_cap).to_tower()
    if "stages" in spec:
        return tower.load_tower(spec)
    raise ValueError(f"unknown tower description {sorted(spec)}")


def _random_words(names, count: int, max_len: int, rng: random.Random) -> list[Word]:
    k = len(names)
    out = []
    for _ in range(count):
        n = rng.randint(0, max_len)
        out.append(Word(rng.choice([1, -1]) * rng.randint(1, k) for _ in range(n)))
    return out


def run_tower(e: CorpusEntry, cfg: Config) -> dict:
    t = build_tower(e.payload["tower"], cfg)
    rng = random.Random(cfg.seed)
    out: dict[str, Any] = {"depth": t.depth, "stage_names": [st.name for st in t.stages]}
    out["distances"] = [str(tower.metric(t, x, y)) for x, y in e.payload.get("distances", [])]
    sample = _random_words(t.generators, cfg.ultrametric_sample, cfg.max_word_length, rng)
    sample += [t.word(w) for w in e.payload.get("sample", [])]
    rep = tower.ultrametric_check(t, sample, cfg.ultrametric_triples, cfg.seed)
    out["ultrametric_triples"] = rep.triples
    out["ultrametric_ok"] = rep.ok
    out["series_formula_matches"] = all(
        tower.metric(t, x, y).key() == tower.series_distance(t, x, y) for x in sample for y in sample
    )
    # canonical map: homomorphism on samples, stage kernels closed under conjugation
    hom = True
    normal = True
    for x, y in zip(sample, sample[1:]):
        prod = tower.canonical_map(t, x) * tower.canonical_map(t, y)
        hom &= tower.canonical_map(t, x * y).elements == prod.elements
    last = t.depth
    for x in sample:
        if t.stages[last - 1].is_identity(t.evaluate(last, x)):
            for i in range(len(t.generators)):
                g = Word.gen(i)
                normal &= t.stages[last - 1].is_identity(t.evaluate(last, conjugate(x, g)))
    out["canonical_map_homomorphic"] = hom
    out["stage_kernel_normal"] = normal
    if "refine" in e.payload:
        other = build_tower(e.payload["refine"], cfg)
        r = tower.refinement_check(t, other)
        out["refines"] = r.refines
        out["same_topology"] = r.same_topology
    if "coherent" in e.payload:
        a, b = (tower.CoherentSequence(t, tuple(s)) for s in e.payload["coherent"])
        out["coherent_product"] = (a * b).format()
    if e.payload.get("center_check"):
        out["stagewise_center"] = tower.stagewise_center_check(t)
    return out


# --- congruence, free subgroups, p-adic, words -------------------------------

def run_congruence(e: CorpusEntry, cfg: Config) -> dict:
    out: dict[str, Any] = {}
    layers = []
    for d, p, a, variant in e.payload.get("layers", []):
        r = congruence.layer_structure(d, p, a, variant, cfg.layer_cap, seed=cfg.seed)
        layers.append(r)
    if layers:
        out["layer_orders"] = [r.order for r in layers]
        out["expected_orders"] = [r.expected_order for r in layers]
        out["elementary_abelian"] = [r.elementary_abelian for r in layers]
        out["layers_ok"] = all(r.ok for r in layers)
    if "residual_tower" in e.payload:
        s = e.payload["residual_tower"]
        rt = congruence.residual_p_tower(s["d"], s["p"], s["max_a"], cfg.layer_cap)
        out["residual_tower"] = rt.to_json()
        out["residual_tower_ok"] = rt.ok
    if "unit_scan" in e.payload:
        d, p, a = e.payload["unit_scan"]
        out["unit_determinants"] = congruence.determinant_unit_scan(d, p, a)
    return out


def run_free_subgroup(e: CorpusEntry, cfg: Config) -> dict:
    names = e.payload.get("alphabet", ["x", "y"])
    gens = [parse_word(w, names) for w in e.payload.get("gens", [])]
    out: dict[str, Any] = {}
    if gens:
        out["subgroup_rank"] = subgroup_rank(gens)
        out["membership"] = {w: subgroup_membership(gens, parse_word(w, names)) for w in e.payload.get("members", [])}
        out["nilpotent_surjectivity"] = nilpotent_surjectivity(gens, len(names), 2)
    if "lcs_layers" in e.payload:
        k, c = e.payload["lcs_layers"]
        ranks = lcs_layer_ranks(k, c, cfg.magnus_max_class)
        out["lcs_layer_ranks"] = ranks
        out["necklace_counts"] = [necklace_count(k, j) for j in range(1, c + 1)]
    if "lcs_depth" in e.payload:
        c = int(e.payload.get("cutoff", 6))
        out["lcs_depth"] = {w: str(lcs_depth(parse_word(w, names), c, len(names))) for w in e.payload["lcs_depth"]}
    if "metabelian_words" in e.payload:
        out["metabelian_trivial"] = {
            w: metabelian_image(parse_word(w, names), len(names)).is_trivial() for w in e.payload["metabelian_words"]
        }
    return out


def run_padic(e: CorpusEntry, cfg: Config) -> dict:
    out: dict[str, Any] = {}
    demos = []
    for p, n, a in e.payload.get("grothendieck", []):
        demos.append(tower.padic_grothendieck_demo(p, n, min(a, cfg.padic_max_a)))
    if demos:
        out["grothendieck"] = [d.to_json() for d in demos]
        out["grothendieck_ok"] = all(d.ok for d in demos)
    ranks = []
    for item in e.payload.get("rank2", []):
        p, x, a = item["p"], item.get("x"), item["max_a"]
        ranks.append(tower.padic_rank2_demo(p, x, min(a, cfg.padic_max_a), item.get("min_a", 0)))
    if ranks:
        out["rank2"] = [r.to_json() for r in ranks]
        out["rank2_ok"] = all(r.ok for r in ranks)
    return out


def run_words(e: CorpusEntry, cfg: Config) -> dict:
    names = e.payload.get("alphabet", ["x", "y"])
    return {"normal_forms": {w: parse_word(w, names).format(names) for w in e.payload.get("words", [])}}


HANDLERS: dict[str, Callable[[CorpusEntry, Config], dict]] = {
    "presentation": run_presentation,
    "permutation-group": run_finite,
    "matrix-group": run_finite,
    "wreath": run_finite,
    "tree-automaton": run_automaton,
    "tower": run_tower,
    "congruence": run_congruence,
    "free-subgroup": run_free_subgroup,
    "padic": run_padic,
    "words": run_words,
}


# --- running -------------------------------------------------------------------

@dataclass
class EntryResult:
    name: str
    kind: str
    passed: bool
    fields: dict
    failures: list[str]
    flags: tuple[str, ...] = ()
    seconds: float = 0.0

    def to_json(self) -> dict:
        out = {"name": self.name, "kind": self.kind, "passed": self.passed, "fields": self.fields}
        if self.failures:
            out["failures"] = self.failures
        if self.flags:
            out["flags"] = list(self.flags)
        return out


def _jsonable(x):
    return json.loads(json.dumps(x, default=str, sort_keys=True))


def _lookup(fields: dict, path: str):
    cur: Any = fields
    for part in path.split("."):
        if isinstance(cur, list) and part.isdigit() and int(part) < len(cur):
            cur = cur[int(part)]
        elif isinstance(cur, dict) and part in cur:
            cur = cur[part]
        else:
            raise KeyError(path)
    return cur


def run_entry(entry: CorpusEntry, cfg: Config) -> EntryResult:
    start = time.perf_counter()
    failures = []
    try:
        fields = _jsonable(HANDLERS[entry.kind](entry, cfg))
    except Exception as err:  # isolate the entry
        fields = {}
        failures.append(f"error: {type(err).__name__}: {err}")
    else:
        for key, want in entry.expect.items():
            try:
                got = _lookup(fields, key)
            except KeyError:
                failures.append(f"{key}: no such report field")
                continue
            if got != _jsonable(want):
                failures.append(f"{key}: expected {want!r}, got {got!r}")
    return EntryResult(entry.name, entry.kind, not failures, fields, failures, entry.flags,
                       time.perf_counter() - start)


def _run_pair(args):
    return run_entry(*args)


@dataclass
class Report:
    results: list[EntryResult]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def to_json(self) -> dict:
        return {
            "entries": [r.to_json() for r in self.results],
            "summary": {
                "total": len(self.results),
                "passed": sum(r.passed for r in self.results),
                "failed": sum(not r.passed for r in self.results),
            },
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n"

    def text(self) -> str:
        lines = []
        for r in self.results:
            mark = "PASS" if r.passed else "FAIL"
            flag = f" [{', '.join(r.flags)}]" if r.flags else ""
            lines.append(f"{mark}  {r.name:<28} {r.kind:<18} {r.seconds:7.2f}s{flag}")
            lines += [f"      {f}" for f in r.failures]
        s = self.to_json()["summary"]
        lines.append(f"{s['passed']}/{s['total']} entries passed")
        return "\n".join(lines)


def run_suite(corpus: str | Path | None, cfg: Config, only: list[str] | None = None) -> Report:
    """Run every entry of a corpus (the shipped one when ``corpus`` is None)."""
    text = shipped_corpus_text() if corpus is None else Path(corpus).read_text()
    entries = load_corpus(text)
    if only:
        missing = set(only) - {e.name for e in entries}
        if missing:
            raise KeyError(f"unknown entries: {', '.join(sorted(missing))}")
        entries = [e for e in entries if e.name in only]
    entries.sort(key=lambda e: e.name)
    if cfg.workers > 1 and len(entries) > 1:
        with ProcessPoolExecutor(cfg.workers) as pool:
            results = list(pool.map(_run_pair, [(e, cfg) for e in entries]))
    else:
        results = [run_entry(e, cfg) for e in entries]
    return Report(results)


def explain(name: str, cfg: Config, corpus: str | Path | None = None) -> str:
    text = shipped_corpus_text() if corpus is None else Path(corpus).read_text()
    entries = {e.name: e for e in load_corpus(text)}
    if name not in entries:
        raise KeyError(f"unknown entry {name!r}")
    e = entries[name]
    r = run_entry(e, cfg)
    lines = [f"{e.name} ({e.kind})"]
    if e.flags:
        lines.append(f"flags: {', '.join(e.flags)}")
    for a in e.anchors:
        lines.append(f"anchor: {a}")
    lines.append("evidence:")
    lines += ["  " + ln for ln in json.dumps(r.fields, indent=2, sort_keys=True).splitlines()]
    if e.expect:
        lines.append("expectations:")
        for key, want in sorted(e.expect.items()):
            tag = e.tags.get(key)
            lines.append(f"  {key} = {json.dumps(want)}" + (f"  [{tag}]" if tag else ""))
    lines.append("result: " + ("pass" if r.passed else "FAIL: " + "; ".join(r.failures)))
    return "\n".join(lines)


def dyadic(value: str) -> Fraction:
    """Parse ``1/2^k`` back into a Fraction."""
    if "/" not in value:
        return Fraction(int(value))
    num, den = value.split("/")
    base, exp = den.split("^")
    return Fraction(int(num), int(base) ** int(exp))
