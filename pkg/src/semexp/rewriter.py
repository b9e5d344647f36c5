"""Word reduction to normal form, two ways.

The primary route folds canonical generators through the pair product
(terminating by construction).  The relation-level rewrite engine is an
independent oracle: it works on token sequences mixing bracket and
epsilon letters, applies the defining relations with a fixed rule
priority, and records every step.  The two routes must agree; a
mismatch raises and means the rule engine is broken, not the input.

Rule tags:
  R3        absorb a bracket into epsilon-times-bracket
  R1        merge two adjacent brackets
  R2        push a bracket to the right past an epsilon
  Reductor  rescale all letters by the joint source idempotent
  NormShape adjoin the anchor and its source idempotent to the prefix
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .core import InverseSemigroup
from .errors import OracleMismatch, ParseError, StepLimitExceeded, UnknownElement
from .expansion import ExpElem, canonical_gen, exp_product

DEFAULT_STEP_LIMIT = 10_000

# a token is ("eps", id) or ("br", id)
Token = tuple[str, int]


@dataclass(frozen=True)
class Word:
    """Nonempty sequence of generator letters (element ids)."""

    letters: tuple[int, ...]

    def __post_init__(self):
        if not self.letters:
            raise ParseError("empty word")


@dataclass
class RewriteTrace:
    steps: list[tuple[str, tuple[Token, ...], tuple[Token, ...]]] = field(default_factory=list)

    def format(self, s: InverseSemigroup) -> str:
        return "\n".join(
            f"{rule}: {render_tokens(s, before)} => {render_tokens(s, after)}"
            for rule, before, after in self.steps
        )


def render_tokens(s: InverseSemigroup, tokens) -> str:
    parts = []
    for kind, v in tokens:
        parts.append(f"eps{{{s.names[v]}}}" if kind == "eps" else f"[{s.names[v]}]")
    return " ".join(parts)


_TOKEN_RE = re.compile(r"\[([^\[\]]*)\]|(\S)")


def parse_word(text: str, s: InverseSemigroup) -> Word:
    """Parse bracketed letters: ``[name]``, with ``*`` suffixes for inverses."""
    letters = []
    for m in _TOKEN_RE.finditer(text):
        if m.group(1) is None:
            raise ParseError(f"unexpected character {m.group(2)!r} outside brackets")
        body = m.group(1).strip()
        stars = 0
        while body.endswith("*"):
            stars += 1
            body = body[:-1]
        if not body:
            raise ParseError(f"empty letter in {m.group(0)!r}")
        if body in s.name_to_id:
            g = s.name_to_id[body]
        elif body.isdigit() and int(body) < s.n:
            g = int(body)
        else:
            raise UnknownElement(f"unknown element {body!r}")
        for _ in range(stars):
            g = s.inv[g]
        letters.append(g)
    if not letters:
        raise ParseError("word has no letters")
    return Word(tuple(letters))


def reduce_to_normal_form(s: InverseSemigroup, w: Word) -> ExpElem:
    """Fold the word through the pair product, left to right."""
    acc = canonical_gen(s, w.letters[0])
    for g in w.letters[1:]:
        acc = exp_product(s, acc, canonical_gen(s, g))
    return acc


def eval_tokens(s: InverseSemigroup, tokens) -> ExpElem:
    """Image of a token word: eps letters expand to bracket pairs."""
    word = []
    for kind, v in tokens:
        word.append(v)
        if kind == "eps":
            word.append(s.inv[v])
    return reduce_to_normal_form(s, Word(tuple(word)))


def rewrite_steps(
    s: InverseSemigroup, w: Word, max_steps: int = DEFAULT_STEP_LIMIT
) -> tuple[ExpElem, RewriteTrace]:
    """Relation-level rewriting with a full trace.

    Phases: absorb every bracket (R3); then repeatedly merge adjacent
    brackets (R1, preferred) or push a bracket right past an epsilon
    (R2), leftmost redex first; finally one Reductor step and one
    NormShape step.  The result is cross-checked against the fold.
    """
    if max_steps < 1:
        raise ParseError("max_steps must be >= 1")
    table, inv = s.table, s.inv
    trace = RewriteTrace()
    toks: list[Token] = [("br", g) for g in w.letters]

    def record(rule, before, after):
        if len(trace.steps) >= max_steps:
            raise StepLimitExceeded(
                f"exceeded {max_steps} rewrite steps", trace=trace
            )
        trace.steps.append((rule, tuple(before), tuple(after)))

    # absorb each original bracket once, left to right
    i = 0
    while i < len(toks):
        if toks[i][0] == "br":
            before = list(toks)
            toks.insert(i, ("eps", toks[i][1]))
            record("R3", before, toks)
            i += 2
        else:
            i += 1

    # collapse to a single trailing bracket
    while True:
        merge_at = push_at = None
        for i in range(len(toks) - 1):
            if toks[i][0] == "br" and toks[i + 1][0] == "br":
                merge_at = i
                break
            if toks[i][0] == "br" and toks[i + 1][0] == "eps" and push_at is None:
                push_at = i
        if merge_at is not None:
            t, r = toks[merge_at][1], toks[merge_at + 1][1]
            before = list(toks)
            toks[merge_at:merge_at + 2] = [("eps", t), ("br", table[t][r])]
            record("R1", before, toks)
        elif push_at is not None:
            t, e = toks[push_at][1], toks[push_at + 1][1]
            before = list(toks)
            toks[push_at:push_at + 2] = [("eps", table[t][e]), ("br", t)]
            record("R2", before, toks)
        else:
            break

    # now toks == eps* br
    anchor = toks[-1][1]
    p = table[anchor][inv[anchor]]
    for kind, v in toks[:-1]:
        p = table[p][table[v][inv[v]]]
    row = table[p]
    rescaled = [("eps", row[v]) for _, v in toks[:-1]] + [("br", row[anchor])]
    if rescaled != toks:
        before = list(toks)
        toks = rescaled
        record("Reductor", before, toks)
    anchor = toks[-1][1]

    present = {v for kind, v in toks[:-1]}
    missing = [v for v in (anchor, table[anchor][inv[anchor]]) if v not in present]
    if missing:
        before = list(toks)
        extra: list[Token] = [("eps", v) for v in dict.fromkeys(missing)]
        toks = toks[:-1] + extra + [toks[-1]]
        record("NormShape", before, toks)

    mask = 0
    for kind, v in toks[:-1]:
        mask |= 1 << v
    result = ExpElem(mask, toks[-1][1])

    folded = reduce_to_normal_form(s, w)
    if result != folded:
        raise OracleMismatch(
            f"rewriting gave {result.render(s)}, fold gave {folded.render(s)}"
        )
    return result, trace


def words_equal(s: InverseSemigroup, w1: Word, w2: Word) -> bool:
    return reduce_to_normal_form(s, w1) == reduce_to_normal_form(s, w2)
