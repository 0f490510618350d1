"""Certificates that an element lies in every term of the derived series.

A certificate for g in a presented group is a free-group identity

    g^-1 [w_1, w_2] [w_3, w_4] ... = r_(j1)^(v1 e1) r_(j2)^(v2 e2) ...

where every w_i is a product of conjugates of g and the right-hand side is
a product of conjugates of relators.  If g lies in D^n then so does every
conjugate of g, so each [w_(2i-1), w_(2i)] lies in D^(n+1), and the identity
puts g in D^(n+1).  Induction from D^0 puts g in every D^n, hence the
normal closure of g lies in the kernel of the map to the true prosoluble
completion.  Only the free identity is checked here; it is decidable by
free reduction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Sequence

import yaml

from .freequot import metabelian_image
from .words import ParseError, Presentation, Word, commutator, conjugate, exponent_sums, parse_word
from .zlattice import Abelianization, abelian_invariants, abelianize, relation_matrix


class CertificateError(ValueError):
    pass


# --- expressions in conjugates of g --------------------------------------

@dataclass(frozen=True)
class Atom:
    """``g^(u)`` raised to ``exponent``."""

    conjugator: Word
    exponent: int = 1


@dataclass(frozen=True)
class GExpr:
    """A product of atoms; evaluating it substitutes the target g."""

    atoms: tuple[Atom, ...]

    def evaluate(self, g: Word) -> Word:
        out = Word()
        for a in self.atoms:
            out = out * (conjugate(g, a.conjugator) ** a.exponent)
        return out

    def format(self, names: Sequence[str]) -> str:
        parts = []
        for a in self.atoms:
            s = f"g^({a.conjugator.format(names)})" if a.conjugator else "g"
            parts.append(s if a.exponent == 1 else f"{s}^{a.exponent}")
        return " ".join(parts) or "1"


def _balanced(text: str, i: int) -> int:
    """Index just past the parenthesis group opening at ``text[i]``."""
    depth = 0
    for j in range(i, len(text)):
        if text[j] == "(":
            depth += 1
        elif text[j] == ")":
            depth -= 1
            if depth == 0:
                return j + 1
    raise ParseError("unbalanced parentheses", text, i)


def parse_gexpr(text: str, names: Sequence[str]) -> GExpr:
    """Parse ``g^(u) g^(v)^-1 g`` (atoms separated by spaces or ``*``)."""
    atoms = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch in " \t*":
            i += 1
            continue
        if text.startswith("1", i) and (i + 1 == n or text[i + 1] in " \t*"):
            i += 1
            continue
        if ch != "g":
            raise ParseError("expected an atom g or g^(u)", text, i)
        i += 1
        conj = Word()
        if text.startswith("^(", i):
            end = _balanced(text, i + 1)
            inner = text[i + 2 : end - 1].strip()
            conj = parse_word(inner, names) if inner else Word()
            i = end
        exp = 1
        if text.startswith("^", i):
            j = i + 1
            if j < n and text[j] == "-":
                j += 1
            k = j
            while k < n and text[k].isdigit():
                k += 1
            if k == j:
                raise ParseError("expected an integer exponent", text, i)
            exp = int(text[i + 1 : k])
            i = k
        atoms.append(Atom(conj, exp))
    return GExpr(tuple(atoms))


@dataclass(frozen=True)
class RelatorFactor:
    """``r_index^(conjugator)`` raised to ``sign``."""

    index: int
    conjugator: Word
    sign: int = 1


@dataclass
class DerivedCertificate:
    target: Word
    pairs: list[tuple[GExpr, GExpr]]
    pi: list[RelatorFactor] = field(default_factory=list)
    name: str = ""

    def check_structure(self, p: Presentation) -> None:
        if not self.pairs:
            raise CertificateError("at least one commutator pair is required")
        for f in self.pi:
            if not 0 <= f.index < len(p.relators):
                raise CertificateError(f"relator index {f.index} out of range")
            if f.sign not in (1, -1):
                raise CertificateError("relator signs must be +1 or -1")
        k = p.rank
        words = [self.target] + [f.conjugator for f in self.pi]
        words += [a.conjugator for u, v in self.pairs for a in u.atoms + v.atoms]
        if any(w.max_generator() >= k for w in words):
            raise CertificateError("certificate uses letters outside the presentation")

    def lhs(self) -> Word:
        g = self.target
        out = g.inverse()
        for u, v in self.pairs:
            out = out * commutator(u.evaluate(g), v.evaluate(g))
        return out

    def rhs(self, p: Presentation) -> Word:
        out = Word()
        for f in self.pi:
            out = out * (conjugate(p.relators[f.index], f.conjugator) ** f.sign)
        return out


@dataclass
class CertificateCheck:
    accepted: bool
    reason: str
    residue: Word | None = None

    def to_json(self, names: Sequence[str]) -> dict:
        out = {"accepted": self.accepted, "reason": self.reason}
        if self.residue is not None:
            out["residue"] = self.residue.format(names)
        return out


def verify_certificate(p: Presentation, cert: DerivedCertificate) -> CertificateCheck:
    """Check g^-1 prod [w_(2i-1), w_(2i)] == pi by free reduction."""
    try:
        cert.check_structure(p)
    except CertificateError as e:
        return CertificateCheck(False, f"structural: {e}")
    residue = cert.lhs().inverse() * cert.rhs(p)
    if residue:
        return CertificateCheck(False, "free identity fails", residue)
    return CertificateCheck(
        True,
        "g^-1 * prod [w1, w2] equals the relator product in the free group; "
        "by induction g lies in D^n for every n, so its normal closure lies in the prosoluble kernel",
    )


def load_certificate(text: str | dict, p: Presentation) -> DerivedCertificate:
    """Read the YAML certificate format.

    ::

        target: a
        w1: "g"
        w2: "g^(b)"
        pi:
          - [0, "1", 1]    # relator index, conjugator, sign

    Several pairs go under ``pairs: [[w1, w2], ...]``.  Relator indices refer
    to the presentation's relators in order.
    """
    data = yaml.safe_load(text) if isinstance(text, str) else text
    if not isinstance(data, dict) or "target" not in data:
        raise CertificateError("certificate needs a target")
    names = p.names
    target = parse_word(str(data["target"]), names)
    if "pairs" in data:
        raw_pairs = data["pairs"]
    elif "w1" in data and "w2" in data:
        raw_pairs = [[data["w1"], data["w2"]]]
    else:
        raise CertificateError("certificate needs w1 and w2 or pairs")
    pairs = []
    for item in raw_pairs:
        if len(item) != 2:
            raise CertificateError("each pair has exactly two entries")
        pairs.append((parse_gexpr(str(item[0]), names), parse_gexpr(str(item[1]), names)))
    pi = []
    for item in data.get("pi") or []:
        if len(item) != 3:
            raise CertificateError("pi entries are [relator index, conjugator, sign]")
        idx, conj, sign = item
        cw = parse_word(str(conj), names) if str(conj).strip() not in ("", "1") else Word()
        pi.append(RelatorFactor(int(idx), cw, int(sign)))
    return DerivedCertificate(target, pairs, pi, str(data.get("name", "")))


# --- verdicts ----------------------------------------------------------------

@dataclass
class KernelVerdict:
    group: str
    status: str  # residually-soluble-evidence | kernel-contains | soluble | unknown
    abelianization: str
    kernel: str | None = None
    prosoluble: str | None = None
    soluble_length: int | None = None
    certificate: dict | None = None
    quotient_abelian: bool | None = None
    notes: list[str] = field(default_factory=list)
    stage_images: dict[str, list[int]] = field(default_factory=dict)

    def to_json(self) -> dict:
        out: dict[str, Any] = {"group": self.group, "status": self.status, "abelianization": self.abelianization}
        for key in ("kernel", "prosoluble", "soluble_length", "certificate", "quotient_abelian"):
            val = getattr(self, key)
            if val is not None:
                out[key] = val
        if self.stage_images:
            out["stage_images"] = self.stage_images
        if self.notes:
            out["notes"] = self.notes
        return out


def eliminate_generator(p: Presentation, g: Word) -> Presentation | None:
    """Tietze elimination of a generator g (a single letter) set to 1."""
    if len(g) != 1:
        return None
    idx = abs(g.letters[0]) - 1
    keep = [i for i in range(p.rank) if i != idx]
    renum = {i + 1: j + 1 for j, i in enumerate(keep)}
    rels = []
    for r in p.relators:
        letters = [(1 if x > 0 else -1) * renum[abs(x)] for x in r.letters if abs(x) - 1 != idx]
        w = Word(letters).cyclically_reduced()
        if w:
            rels.append(w)
    return Presentation.build([p.names[i] for i in keep], rels)


def quotient_is_abelian(p: Presentation, g: Word) -> tuple[bool | None, Presentation | None]:
    """Whether G/<<g>> is visibly abelian.

    Detected when g is a generator whose elimination leaves at most one
    generator, so the quotient is cyclic.  Returns None when undecided.
    """
    q = eliminate_generator(p, g)
    if q is None:
        return None, None
    if q.rank <= 1:
        return True, q
    return None, q


def prosoluble_kernel_report(p: Presentation, cert: DerivedCertificate | None = None,
                             name: str = "") -> KernelVerdict:
    ab = abelianize(p)
    inv = ab.invariants
    v = KernelVerdict(name or "G", "unknown", str(inv))
    v.stage_images = {n: list(c) for n, c in ab.images.items()}
    if cert is not None:
        check = verify_certificate(p, cert)
        v.certificate = check.to_json(p.names)
        if check.accepted:
            gname = cert.target.format(p.names)
            v.status = "kernel-contains"
            v.kernel = f"<<{gname}>>"
            img = _image(ab, cert.target, p)
            if any(img):
                v.notes.append("target has nonzero abelianization image; certificate inconsistent with relators")
                v.status = "unknown"
                return v
            ok, q = quotient_is_abelian(p, cert.target)
            v.quotient_abelian = ok
            if ok:
                # G/<<g>> is abelian, so D(G) <= <<g>> <= kernel and the tower stops at G/D(G)
                qa = abelian_invariants(relation_matrix(q), q.rank)
                v.prosoluble = str(qa)
                v.notes.append("G/<<g>> abelian: D(G) = <<g>> is perfect, P S(G) = G/D(G) at every stage")
            return v
        v.notes.append("certificate rejected; no claim made")
    if not p.relators:
        v.status = "residually-soluble-evidence"
        v.notes.append("free group: residually a finite p-group for every prime p")
        v.kernel = "1"
        return v
    if inv.is_trivial:
        v.status = "kernel-contains"
        v.kernel = "G"
        v.prosoluble = "1"
        v.notes.append("perfect presentation: every soluble quotient is trivial; P S(G) is reduced to one element")
        return v
    if p.rank <= 1:
        v.status = "soluble"
        v.soluble_length = 0 if inv.is_trivial else 1
        v.kernel = "1"
        v.prosoluble = str(inv)
        return v
    return v


def _image(ab: Abelianization, w: Word, p: Presentation) -> list[int]:
    sums = exponent_sums(w, p.rank)
    inv = ab.invariants
    moduli = [0] * inv.free_rank + list(inv.torsion)
    out = [0] * len(moduli)
    for c, n in zip(sums, p.names):
        for j, x in enumerate(ab.images[n]):
            out[j] += c * x
    return [x % m if m else x for x, m in zip(out, moduli)]


# --- stages of the derived tower -------------------------------------------

@dataclass
class DerivedStage:
    """Stage G/D^n; n = 2 only for free groups."""

    n: int
    presentation: Presentation
    abelianization: Abelianization | None = None

    def image(self, w: Word):
        if self.n == 1:
            return tuple(_image(self.abelianization, w, self.presentation))
        return metabelian_image(w, self.presentation.rank)

    def is_trivial(self, w: Word) -> bool:
        img = self.image(w)
        if self.n == 1:
            return not any(img)
        return img.is_trivial()

    def describe(self) -> str:
        if self.n == 1:
            return str(self.abelianization.invariants)
        return f"F_{self.presentation.rank}/D^2"


class UnsupportedStage(NotImplementedError):
    pass


def derived_tower_stage(p: Presentation, n: int) -> DerivedStage:
    if n == 1:
        return DerivedStage(1, p, abelianize(p))
    if n == 2:
        if p.relators:
            raise UnsupportedStage("membership in G/D^2 is implemented only for free groups")
        return DerivedStage(2, p)
    raise UnsupportedStage(f"derived stage {n} is not supported")


def prosoluble_tower(p: Presentation, verdict: KernelVerdict, name: str = ""):
    """One-stage tower G/D(G) when the verdict pins P S(G) down to it."""
    from .tower import AbelianStage, QuotientTower

    if verdict.prosoluble is None:
        raise ValueError("verdict does not determine the prosoluble completion")
    ab = abelianize(p)
    if verdict.prosoluble == "1":
        stage = AbelianStage(abelian_invariants([], 0), "1")
        images = [{n: () for n in p.names}]
    else:
        stage = AbelianStage(ab.invariants, f"G/D(G) = {ab.invariants}")
        images = [dict(ab.images)]
    return QuotientTower(tuple(p.names), [stage], images, name=name or "prosoluble")


def small_certificate_search(p: Presentation, g: Word, conjugators: Sequence[Word], max_pi: int = 1) -> bool:
    """Exhaustive search over one-pair certificates [g^u, g^v] with at most
    ``max_pi`` single-conjugate relator factors drawn from ``conjugators``."""
    rel_terms = [Word()]
    if max_pi:
        for j, r in enumerate(p.relators):
            for c in conjugators:
                for s in (1, -1):
                    rel_terms.append(conjugate(r, c) ** s)
    for u in conjugators:
        for v in conjugators:
            for eu in (1, -1):
                for ev in (1, -1):
                    lhs = g.inverse() * commutator(conjugate(g, u) ** eu, conjugate(g, v) ** ev)
                    for t in rel_terms:
                        if lhs == t:
                            return True
    return False
