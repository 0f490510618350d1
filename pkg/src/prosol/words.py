"""Free-group words, presentations, and the presentation text syntax.

A letter is a nonzero int: ``+(i+1)`` is generator ``i`` and ``-(i+1)`` its
inverse.  The inverse-closed alphabet is never materialized.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence


def _reduce_letters(letters: Iterable[int]) -> tuple[int, ...]:
    stack: list[int] = []
    for x in letters:
        if stack and stack[-1] == -x:
            stack.pop()
        else:
            stack.append(x)
    return tuple(stack)


class Word:
    """An immutable, always freely reduced word."""

    __slots__ = ("letters", "_hash")

    def __init__(self, letters: Iterable[int] = ()):
        letters = _reduce_letters(letters)
        if any(x == 0 for x in letters):
            raise ValueError("letter 0 is not allowed")
        object.__setattr__(self, "letters", letters)
        object.__setattr__(self, "_hash", hash(letters))

    def __setattr__(self, name, value):
        raise AttributeError("Word is immutable")

    @classmethod
    def gen(cls, index: int, sign: int = 1) -> Word:
        return cls((sign * (index + 1),))

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, int]]) -> Word:
        """Build from (generator index, sign) pairs."""
        return cls(s * (i + 1) for i, s in pairs)

    def pairs(self) -> list[tuple[int, int]]:
        return [(abs(x) - 1, 1 if x > 0 else -1) for x in self.letters]

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __bool__(self) -> bool:
        return bool(self.letters)

    def __eq__(self, other) -> bool:
        return isinstance(other, Word) and self.letters == other.letters

    def __hash__(self) -> int:
        return self._hash

    def __mul__(self, other: Word) -> Word:
        return Word(self.letters + other.letters)

    def __pow__(self, n: int) -> Word:
        if n < 0:
            return self.inverse() ** (-n)
        return Word(self.letters * n)

    def inverse(self) -> Word:
        return Word(-x for x in reversed(self.letters))

    def max_generator(self) -> int:
        """Largest generator index used, or -1 for the empty word."""
        return max((abs(x) - 1 for x in self.letters), default=-1)

    def cyclically_reduced(self) -> Word:
        xs = self.letters
        i, j = 0, len(xs) - 1
        while i < j and xs[i] == -xs[j]:
            i += 1
            j -= 1
        return Word(xs[i : j + 1])

    def format(self, names: Sequence[str] | None = None) -> str:
        if not self.letters:
            return "1"
        out = []
        # group runs into powers for readability
        i = 0
        xs = self.letters
        while i < len(xs):
            j = i
            while j < len(xs) and xs[j] == xs[i]:
                j += 1
            g = abs(xs[i]) - 1
            name = names[g] if names is not None else f"x{g}"
            power = (j - i) * (1 if xs[i] > 0 else -1)
            out.append(name if power == 1 else f"{name}^{power}")
            i = j
        return " ".join(out)

    def __repr__(self) -> str:
        return f"Word({self.format()})"


IDENTITY = Word()


def free_reduce(w: Word | Iterable[int]) -> Word:
    """Freely reduce. ``Word`` values are reduced at construction."""
    if isinstance(w, Word):
        return w
    return Word(w)


def commutator(u: Word, v: Word) -> Word:
    """``[u, v] = u^-1 v^-1 u v``."""
    return Word(u.inverse().letters + v.inverse().letters + u.letters + v.letters)


def left_normed_commutator(*ws: Word) -> Word:
    """``[w1, w2, ..., wn] = [[...[w1, w2], ...], wn]``."""
    out = ws[0]
    for w in ws[1:]:
        out = commutator(out, w)
    return out


def conjugate(u: Word, v: Word) -> Word:
    """``u^v = v^-1 u v``."""
    return Word(v.inverse().letters + u.letters + v.letters)


def exponent_sums(w: Word, k: int) -> list[int]:
    if w.max_generator() >= k:
        raise ValueError(f"word uses a generator outside an alphabet of size {k}")
    sums = [0] * k
    for x in w.letters:
        if x > 0:
            sums[x - 1] += 1
        else:
            sums[-x - 1] -= 1
    return sums


@dataclass(frozen=True)
class Generator:
    index: int
    name: str


@dataclass(frozen=True)
class Presentation:
    """A finite presentation ``<generators | relators>``.

    Relators are stored reduced and cyclically reduced; ``source`` keeps the
    original text of each relator for reporting.
    """

    generators: tuple[Generator, ...]
    relators: tuple[Word, ...]
    source: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        names = [g.name for g in self.generators]
        if len(set(names)) != len(names):
            raise ValueError("generator names must be unique")
        k = len(self.generators)
        rels = tuple(r.cyclically_reduced() for r in self.relators)
        for r in rels:
            if r.max_generator() >= k:
                raise ValueError("relator uses an undeclared generator")
        object.__setattr__(self, "relators", rels)

    @classmethod
    def build(cls, names: Sequence[str], relators: Iterable[Word]) -> Presentation:
        return cls(tuple(Generator(i, n) for i, n in enumerate(names)), tuple(relators))

    @property
    def names(self) -> list[str]:
        return [g.name for g in self.generators]

    @property
    def rank(self) -> int:
        return len(self.generators)

    def word(self, text: str) -> Word:
        return parse_word(text, self.names)

    def format(self) -> str:
        rels = ", ".join(r.format(self.names) for r in self.relators)
        return f"<{', '.join(self.names)} | {rels}>"


# --- text syntax ----------------------------------------------------------

class ParseError(ValueError):
    def __init__(self, msg: str, text: str = "", pos: int | None = None, line: int | None = None):
        self.pos = pos
        self.line = line
        where = ""
        if line is not None:
            where += f"line {line}: "
        if pos is not None:
            where += f"col {pos + 1}: "
        super().__init__(f"{where}{msg}" + (f" in {text!r}" if text else ""))


_TOKEN_RE = re.compile(r"\s*(?:(?P<ident>[A-Za-z_][A-Za-z0-9_']*)|(?P<int>-?\d+)|(?P<sym>[\^\[\](),*={}<>|.-]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    toks = []
    pos = 0
    text = text.replace("·", "*").replace("−", "-").replace("′", "'")
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError("unexpected character", text, pos)
        kind = m.lastgroup
        toks.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    return toks


class _WordParser:
    def __init__(self, text: str, names: Sequence[str]):
        self.text = text
        self.names = list(names)
        self.index = {n: i for i, n in enumerate(self.names)}
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self, value: str | None = None):
        if self.i >= len(self.toks):
            return None
        t = self.toks[self.i]
        if value is not None and t[1] != value:
            return None
        return t

    def take(self, value: str | None = None):
        t = self.peek(value)
        if t is None:
            pos = self.toks[self.i][2] if self.i < len(self.toks) else len(self.text)
            raise ParseError(f"expected {value!r}" if value else "unexpected end", self.text, pos)
        self.i += 1
        return t

    def split_ident(self, ident: str, pos: int) -> Word:
        if ident in self.index:
            return Word.gen(self.index[ident])
        # juxtaposed names such as "yxy": greedy longest match
        letters = []
        rest = ident
        while rest:
            for n in sorted(self.names, key=len, reverse=True):
                if rest.startswith(n):
                    letters.append(self.index[n] + 1)
                    rest = rest[len(n):]
                    break
            else:
                raise ParseError(f"unknown generator in {ident!r}", self.text, pos)
        return Word(letters)

    def parse(self) -> Word:
        w = self.product()
        if self.peek() is not None:
            raise ParseError("trailing input", self.text, self.toks[self.i][2])
        return w

    def product(self) -> Word:
        w = Word()
        while True:
            t = self.peek()
            if t is None or t[1] in (")", "]", ",", "}", "=", "|", ">"):
                return w
            if t[1] in ("*", "."):
                self.i += 1
                continue
            w = w * self.factor()

    def factor(self) -> Word:
        base = self.atom()
        while self.peek("^"):
            self.take("^")
            t = self.peek()
            if t is None:
                raise ParseError("missing exponent", self.text, len(self.text))
            if t[0] == "int":
                self.i += 1
                base = base ** int(t[1])
            elif t[1] == "-":
                self.i += 1
                n = self.take()
                if n[0] != "int":
                    raise ParseError("expected integer exponent", self.text, n[2])
                base = base ** (-int(n[1]))
            elif t[1] == "{":
                self.i += 1
                if self.peek() and (self.peek()[0] == "int" or self.peek()[1] == "-"):
                    sign = 1
                    if self.peek("-"):
                        self.i += 1
                        sign = -1
                    n = self.take()
                    self.take("}")
                    base = base ** (sign * int(n[1]))
                else:
                    v = self.product()
                    self.take("}")
                    base = conjugate(base, v)
            else:
                base = conjugate(base, self.atom())
        return base

    def atom(self) -> Word:
        t = self.take()
        kind, val, pos = t
        if kind == "ident":
            return self.split_ident(val, pos)
        if kind == "int" and val == "1":
            return Word()
        if val == "(":
            w = self.product()
            self.take(")")
            return w
        if val == "[":
            parts = [self.product()]
            while self.peek(","):
                self.take(",")
                parts.append(self.product())
            self.take("]")
            if len(parts) < 2:
                raise ParseError("commutator needs two entries", self.text, pos)
            return left_normed_commutator(*parts)
        raise ParseError(f"unexpected {val!r}", self.text, pos)


def parse_word(text: str, names: Sequence[str]) -> Word:
    """Parse a word such as ``"y x y x^-1 y^-1"``, ``"[a, a^b]"`` or ``"a = b"``.

    ``u = v`` yields the relator ``u^-1 v``.
    """
    p = _WordParser(text, names)
    lhs = p.product()
    if p.peek("="):
        p.take("=")
        rhs = p.product()
        if p.peek() is not None:
            raise ParseError("trailing input", text, p.toks[p.i][2])
        return lhs.inverse() * rhs
    if p.peek() is not None:
        raise ParseError("trailing input", text, p.toks[p.i][2])
    return lhs


def _split_top(text: str, sep: str = ",") -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch in "([{":
            depth += 1
        elif ch in ")]}":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return [p.strip() for p in parts if p.strip()]


def parse_presentation(text: str) -> Presentation:
    """Parse ``<a, b | a = [a, a^b]>``; ``#`` starts a comment.

    Relators may be separated by commas or newlines.
    """
    lines = [ln.split("#", 1)[0] for ln in text.splitlines()]
    body = " ".join(lines).strip()
    if not (body.startswith("<") and body.endswith(">")):
        raise ParseError("presentation must be enclosed in < >", body)
    inner = body[1:-1]
    if "|" in inner:
        gens_part, rels_part = inner.split("|", 1)
    elif ";" in inner:
        gens_part, rels_part = inner.split(";", 1)
    else:
        gens_part, rels_part = inner, ""
    names = [n.strip() for n in gens_part.split(",") if n.strip()]
    for n in names:
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_']*", n):
            raise ParseError(f"bad generator name {n!r}", body)
    rel_texts = _split_top(rels_part.replace(";", ","))
    rels = [parse_word(r, names) for r in rel_texts]
    return Presentation(tuple(Generator(i, n) for i, n in enumerate(names)), tuple(rels), tuple(rel_texts))
