"""Words over the four-letter alphabet and their realizations as scores.

Letters come in four kinds.  Two carry no payload and stand for the
1-dimensional classes: ``xi`` runs from level 1 up to level 3, ``eta``
runs from level 2 down to level 0.  Two carry a point count that must be
a power of two: ``^s`` (an s-point column from level 3 to 2) and ``_r``
(an r-point column from level 0 up to 1, i.e. the points sit between
levels 1 and 0).  Valid words cycle through xi, ^s, eta, _r in that
order, starting anywhere.

Besides plain (basic) words there are three framed variants:

* central words  u t v: two anchor objects at levels 2 and 1 joined by a
  t-point column, with u growing from the level-2 anchor and v from the
  level-1 anchor;
* eps words  u e v: anchors at levels 0 and 3 joined by a 2-dimensional
  class, u growing from level 0 and v from level 3;
* cyclic words (w, A): several copies of w closed up by xi-edges whose
  pattern is an invertible matrix A over GF(2).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction

from . import linalg
from .score import UNKNOWN, FlowScore

INF = math.inf


class WordError(ValueError):
    pass


@dataclass(frozen=True)
class Letter:
    kind: str          # "xi" | "S" | "eta" | "R"
    payload: int = 0   # point count for S and R, 0 otherwise

    def __str__(self):
        if self.kind == "xi":
            return "xi"
        if self.kind == "eta":
            return "eta"
        if self.kind == "S":
            return f"^{self.payload}"
        return f"_{self.payload}"


def xi():
    return Letter("xi")


def eta():
    return Letter("eta")


def up(s):
    return Letter("S", s)


def down(r):
    return Letter("R", r)


# where each letter kind starts and ends, and what may follow it
_START = {"xi": 1, "S": 3, "eta": 2, "R": 0}
_END = {"xi": 3, "S": 2, "eta": 0, "R": 1}
_NEXT = {"xi": "S", "S": "eta", "eta": "R", "R": "xi"}

# deterministic letter order used for rotation tie-breaks
_KIND_RANK = {"xi": 0, "S": 1, "eta": 2, "R": 3}


def letter_key(letter):
    return (_KIND_RANK[letter.kind], letter.payload)


@dataclass(frozen=True)
class BasicWord:
    letters: tuple

    def __str__(self):
        return " ".join(str(l) for l in self.letters)


@dataclass(frozen=True)
class CentralWord:
    u: tuple
    t: int
    v: tuple

    def __str__(self):
        us = " ".join(str(l) for l in self.u)
        vs = " ".join(str(l) for l in self.v)
        return f"central(u={us}; t={self.t}; v={vs})"


@dataclass(frozen=True)
class EpsWord:
    u: tuple
    v: tuple

    def __str__(self):
        us = " ".join(str(l) for l in self.u)
        vs = " ".join(str(l) for l in self.v)
        return f"eps(u={us}; v={vs})"


@dataclass(frozen=True)
class CyclicWord:
    letters: tuple
    matrix: tuple   # rows of an invertible GF(2) matrix, as tuples

    def __str__(self):
        ws = " ".join(str(l) for l in self.letters)
        rows = ",".join("[" + ",".join(str(x) for x in row) + "]" for row in self.matrix)
        return f"cyclic({ws}; A=[{rows}])"


def _is_power_of_two(n):
    return n >= 2 and (n & (n - 1)) == 0


def _chain_problems(letters, expect_first=None, what="word"):
    out = []
    for i, l in enumerate(letters):
        if l.kind not in _START:
            out.append(f"{what}: unknown letter kind {l.kind!r}")
            continue
        if l.kind in ("S", "R"):
            if not _is_power_of_two(l.payload):
                out.append(f"{what}: payload {l.payload} of {l} is not a power of 2")
        elif l.payload:
            out.append(f"{what}: letter {l.kind} carries a payload")
        if i == 0:
            if expect_first is not None and l.kind not in expect_first:
                out.append(f"{what}: must start with one of {sorted(expect_first)}")
        else:
            if l.kind != _NEXT[letters[i - 1].kind]:
                out.append(
                    f"{what}: letter {l} cannot follow {letters[i - 1]}"
                )
    return out


def validate_word(word):
    """All structural problems of a word, as strings; empty when valid."""
    if isinstance(word, BasicWord):
        if not word.letters:
            return ["basic word is empty"]
        return _chain_problems(word.letters, None, "basic")
    if isinstance(word, CentralWord):
        out = []
        if not _is_power_of_two(word.t):
            out.append(f"central: t = {word.t} is not a power of 2")
        out += _chain_problems(word.u, {"eta"}, "central u")
        out += _chain_problems(word.v, {"xi"}, "central v")
        return out
    if isinstance(word, EpsWord):
        out = []
        out += _chain_problems(word.u, {"R"}, "eps u")
        out += _chain_problems(word.v, {"S"}, "eps v")
        return out
    if isinstance(word, CyclicWord):
        out = []
        k = len(word.letters)
        if k == 0 or k % 4:
            out.append(f"cyclic: length {k} is not a positive multiple of 4")
        if word.letters and word.letters[0].kind != "xi":
            out.append("cyclic: word must start with xi")
        out += _chain_problems(word.letters, None, "cyclic")
        if word.letters and word.letters[-1].kind != "R":
            out.append("cyclic: word must end with a point letter _r")
        m = len(word.matrix)
        if m == 0 or any(len(row) != m for row in word.matrix):
            out.append("cyclic: matrix is not square and nonempty")
        elif not linalg.f2_is_invertible([list(r) for r in word.matrix]):
            out.append("cyclic: matrix is not invertible over GF(2)")
        return out
    return [f"not a word: {word!r}"]


# ---------------------------------------------------------------------------
# symbols


def _pad_cmp(a, b):
    n = max(len(a), len(b))
    ta = tuple(a) + (0,) * (n - len(a))
    tb = tuple(b) + (0,) * (n - len(b))
    if ta < tb:
        return -1
    if ta > tb:
        return 1
    return 0


def seq_lt(a, b):
    return _pad_cmp(a, b) < 0


def seq_le(a, b):
    return _pad_cmp(a, b) <= 0


def sigma(letters):
    """Symbol of a word that is empty or starts with xi."""
    letters = tuple(letters)
    if not letters:
        return ()
    if letters[0].kind != "xi":
        raise WordError("sigma needs a word starting with xi")
    if len(letters) == 1:
        return (INF,)
    s = letters[1].payload
    if len(letters) == 2:
        return (s,)
    if len(letters) == 3:
        return (s, -INF)
    r = letters[3].payload
    return (s, -r) + sigma(letters[4:])


def rho(letters):
    """Symbol of a word that is empty or starts with eta."""
    letters = tuple(letters)
    if not letters:
        return ()
    if letters[0].kind != "eta":
        raise WordError("rho needs a word starting with eta")
    if len(letters) == 1:
        return (INF,)
    r = letters[1].payload
    if len(letters) == 2:
        return (r,)
    if len(letters) == 3:
        return (r, -INF)
    s = letters[3].payload
    return (r, -s) + rho(letters[4:])


def sigma_star(letters):
    s = sigma(letters)
    return (2 * s[0],) + s[1:] if s else s


def rho_star(letters):
    s = rho(letters)
    return (2 * s[0],) + s[1:] if s else s


def sigma_bar(letters):
    """Rational symbol of a word ending in xi, read from the xi end."""
    letters = tuple(letters)
    if not letters or letters[-1].kind != "xi":
        raise WordError("sigma_bar needs a word ending in xi")
    if len(letters) == 1:
        return (Fraction(0), Fraction(0))
    q = letters[-2].payload
    if letters[-2].kind != "R":
        raise WordError("xi must be preceded by a point letter _q")
    if len(letters) == 2:
        return (Fraction(1, q), Fraction(1), Fraction(0))
    if len(letters) == 3:
        return (Fraction(1, q), Fraction(0))
    p = letters[-4].payload
    if len(letters) == 4:
        return (Fraction(1, q), Fraction(-1, p), Fraction(-1), Fraction(0))
    return (Fraction(1, q), Fraction(-1, p)) + sigma_bar(letters[:-4])


# ---------------------------------------------------------------------------
# realization as a score


def _grow(score, letters, start_id, counter, prefix):
    """Attach a letter chain to an existing object, returning all ids."""
    ids = [start_id]
    cur = start_id
    level = score.level(start_id)
    for l in letters:
        if _START[l.kind] != level:
            raise WordError(
                f"letter {l} starts at level {_START[l.kind]}, chain is at {level}"
            )
        nid = f"{prefix}{next(counter)}"
        level = _END[l.kind]
        score.add_object(nid, level)
        if l.kind == "xi":
            score.set_eta(nid, cur)
        elif l.kind == "eta":
            score.set_eta(cur, nid)
        elif l.kind == "S":
            score.set_points(cur, nid, l.payload)
        else:  # R
            score.set_points(nid, cur, l.payload)
        ids.append(nid)
        cur = nid
    return ids


def fill_forced_unknowns(score):
    """Mark 2-dimensional classes whose boundary strata are nonempty."""
    for a in score.level_objects(3):
        for v in score.level_objects(0):
            if score.eps(a, v) == UNKNOWN:
                continue
            broken = any(
                score.points(z, v) and score.eta(a, z)
                for z in score.level_objects(1)
            ) or any(
                score.eta(z, v) and score.points(a, z)
                for z in score.level_objects(2)
            )
            if broken:
                score.set_eps(a, v, UNKNOWN)
    return score


def word_to_score(word, base_degree=0, prefix="x"):
    """Build the score of a word's flow category at the given base degree."""
    bad = validate_word(word)
    if bad:
        raise WordError("; ".join(bad))
    import itertools

    counter = itertools.count(1)
    score = FlowScore(base_degree)

    if isinstance(word, BasicWord):
        first = f"{prefix}{next(counter)}"
        score.add_object(first, _START[word.letters[0].kind])
        _grow(score, word.letters, first, counter, prefix)
    elif isinstance(word, CentralWord):
        a0 = f"{prefix}{next(counter)}"
        a1 = f"{prefix}{next(counter)}"
        score.add_object(a0, 2)
        score.add_object(a1, 1)
        score.set_points(a0, a1, word.t)
        _grow(score, word.u, a0, counter, prefix)
        _grow(score, word.v, a1, counter, prefix)
    elif isinstance(word, EpsWord):
        a0 = f"{prefix}{next(counter)}"
        a1 = f"{prefix}{next(counter)}"
        score.add_object(a0, 0)
        score.add_object(a1, 3)
        score.set_eps(a1, a0, 1)
        _grow(score, word.u, a0, counter, prefix)
        _grow(score, word.v, a1, counter, prefix)
    elif isinstance(word, CyclicWord):
        m = len(word.matrix)
        starts = []
        ends = []
        for j in range(m):
            first = f"{prefix}{next(counter)}"
            score.add_object(first, 3)
            ids = _grow(score, word.letters[1:], first, counter, prefix)
            starts.append(ids[0])
            ends.append(ids[-1])
        for i in range(m):
            for j in range(m):
                if word.matrix[i][j]:
                    score.set_eta(starts[i], ends[j])
    fill_forced_unknowns(score)
    return score


def word_levels(word):
    """Set of levels the word's objects occupy."""
    def walk(start, letters):
        seen = {start}
        level = start
        for l in letters:
            level = _END[l.kind]
            seen.add(level)
        return seen

    if isinstance(word, BasicWord):
        return walk(_START[word.letters[0].kind], word.letters)
    if isinstance(word, CentralWord):
        return walk(2, word.u) | walk(1, word.v)
    if isinstance(word, EpsWord):
        return walk(0, word.u) | walk(3, word.v)
    if isinstance(word, CyclicWord):
        return {0, 1, 2, 3}
    raise WordError(f"not a word: {word!r}")


# ---------------------------------------------------------------------------
# special words


def is_special(word):
    """Whether the word survives as its own summand in the normal form."""
    bad = validate_word(word)
    if bad:
        raise WordError("; ".join(bad))
    if isinstance(word, (BasicWord, CentralWord)):
        levels = word_levels(word)
        return 0 in levels and 3 in levels
    if isinstance(word, EpsWord):
        u, v = word.u, word.v
        s1 = sigma((xi(),) + v)[0]
        r1 = rho((eta(),) + u)[0]
        if s1 >= 4 and r1 >= 4:
            return True
        if s1 == 2 and r1 >= 4:
            return seq_lt(rho_star(v[1:]), rho((eta(),) + u))
        if s1 >= 4 and r1 == 2:
            return seq_lt(sigma_star(u[1:]), sigma((xi(),) + v))
        return False
    if isinstance(word, CyclicWord):
        # proper powers first collapse to the primitive word with a block
        # permutation matrix; one indecomposable block means one summand
        return len(cyclic_split(word)) == 1
    raise WordError(f"not a word: {word!r}")


# ---------------------------------------------------------------------------
# cyclic canonicalization


def _blocks_of(letters):
    return [tuple(letters[i : i + 4]) for i in range(0, len(letters), 4)]


def _primitive_block_count(letters):
    blocks = _blocks_of(letters)
    k = len(blocks)
    for period in range(1, k + 1):
        if k % period:
            continue
        if all(blocks[i] == blocks[i % period] for i in range(k)):
            return period
    return k


def cyclic_canonical(word):
    """Canonical representative of a cyclic word's equivalence class.

    Proper powers are rewritten to the primitive word with a larger
    block-permutation matrix; the word is rotated (by whole xi ^s eta _r
    blocks) to its least form; the matrix is replaced by its similarity
    canonical form.  Rotation does not change the similarity class of
    the matrix, so the two normalizations are independent.
    """
    bad = validate_word(word)
    if bad:
        raise WordError("; ".join(bad))
    letters = tuple(word.letters)
    matrix = [list(r) for r in word.matrix]
    blocks = _blocks_of(letters)
    k = len(blocks)
    period = _primitive_block_count(letters)
    if period < k:
        j = k // period
        m = len(matrix)
        size = j * m
        big = [[0] * size for _ in range(size)]
        # chains split into j half-chains linked in series: consecutive
        # segments are joined by identities, the last wraps through A
        for seg in range(j - 1):
            for i in range(m):
                big[seg * m + i][(seg + 1) * m + i] = 1
        for i in range(m):
            for jj in range(m):
                if matrix[i][jj]:
                    big[(j - 1) * m + i][jj] = 1
        letters = tuple(l for b in blocks[:period] for l in b)
        matrix = big
        blocks = _blocks_of(letters)
        k = period
    best = None
    for rot in range(k):
        candidate = tuple(l for b in (blocks[rot:] + blocks[:rot]) for l in b)
        key = tuple(letter_key(l) for l in candidate)
        if best is None or key < best[0]:
            best = (key, candidate)
    canon = linalg.f2_canonical_form(matrix)
    rows = tuple(tuple(r) for r in canon.matrix())
    return CyclicWord(letters=best[1], matrix=rows)


def cyclic_split(word):
    """Split a cyclic word into one summand per indecomposable block."""
    canon = cyclic_canonical(word)
    out = []
    for block in linalg.f2_canonical_form([list(r) for r in canon.matrix]).blocks:
        rows = tuple(tuple(r) for r in block.matrix())
        out.append(CyclicWord(letters=canon.letters, matrix=rows))
    return out


# ---------------------------------------------------------------------------
# text form


_LETTER_RE = re.compile(r"^(xi|eta|\^(\d+)|_(\d+))$")


def parse_letters(text):
    out = []
    for tok in text.split():
        m = _LETTER_RE.match(tok)
        if not m:
            raise WordError(f"bad letter {tok!r}")
        if tok == "xi":
            out.append(xi())
        elif tok == "eta":
            out.append(eta())
        elif tok.startswith("^"):
            out.append(up(int(tok[1:])))
        else:
            out.append(down(int(tok[1:])))
    return tuple(out)


def format_letters(letters):
    return " ".join(str(l) for l in letters)


_CENTRAL_RE = re.compile(r"^central\(u=([^;]*);\s*t=(\d+);\s*v=([^;]*)\)$")
_EPS_RE = re.compile(r"^eps\(u=([^;]*);\s*v=([^;]*)\)$")
_CYCLIC_RE = re.compile(r"^cyclic\(([^;]*);\s*A=(\[\[.*\]\])\)$")


def parse_word(text):
    text = text.strip()
    m = _CENTRAL_RE.match(text)
    if m:
        return CentralWord(
            u=parse_letters(m.group(1)), t=int(m.group(2)), v=parse_letters(m.group(3))
        )
    m = _EPS_RE.match(text)
    if m:
        return EpsWord(u=parse_letters(m.group(1)), v=parse_letters(m.group(2)))
    m = _CYCLIC_RE.match(text)
    if m:
        body = m.group(2)
        rows = []
        for part in re.findall(r"\[([0-9,\s]*)\]", body[1:-1]):
            rows.append(tuple(int(x) for x in part.split(",") if x.strip()))
        return CyclicWord(letters=parse_letters(m.group(1)), matrix=tuple(rows))
    return BasicWord(letters=parse_letters(text))
