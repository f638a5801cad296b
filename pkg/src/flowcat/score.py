"""Scores: decorated graded graphs standing in for framed flow categories.

A score keeps objects on levels 0..3 (degree = base_degree + level) and
three layers of edge data between them:

* ``d``    gap-1 edges, signed point counts,
* ``h``    gap-2 edges, classes of 1-dimensional moduli in {0, 1},
* ``e``    gap-3 edges, classes of 2-dimensional moduli in {0, 1, unknown}.

``unknown`` records that the 2-dimensional moduli is not closed, so no
class is defined for it; it is absorbing under every move.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field

from . import linalg

UNKNOWN = "unknown"

LEVELS = (0, 1, 2, 3)


class ScoreError(ValueError):
    pass


class FlowScore:
    def __init__(self, base_degree=0):
        self.base_degree = base_degree
        self._levels = {}    # id -> level
        self._labels = {}    # id -> str
        self._order = []     # insertion order of ids
        self.d = {}          # (upper, lower) -> nonzero int, gap 1
        self.h = {}          # (upper, lower) -> 1, gap 2
        self.e = {}          # (upper, lower) -> 1 | UNKNOWN, gap 3

    # -- construction -------------------------------------------------

    def add_object(self, oid, level, label=None):
        if oid in self._levels:
            raise ScoreError(f"duplicate object id {oid!r}")
        if level not in LEVELS:
            raise ScoreError(f"object {oid!r}: level {level} outside 0..3")
        self._levels[oid] = level
        self._order.append(oid)
        if label is not None:
            self._labels[oid] = label
        return oid

    def remove_object(self, oid):
        level = self._levels.pop(oid)
        self._order.remove(oid)
        self._labels.pop(oid, None)
        for store in (self.d, self.h, self.e):
            for key in [k for k in store if oid in k]:
                del store[key]
        return level

    def _edge_key(self, upper, lower, gap):
        for oid in (upper, lower):
            if oid not in self._levels:
                raise ScoreError(f"unknown object id {oid!r}")
        if self._levels[upper] - self._levels[lower] != gap:
            raise ScoreError(
                f"edge {upper!r}->{lower!r} spans"
                f" {self._levels[upper] - self._levels[lower]} levels, expected {gap}"
            )
        return (upper, lower)

    def set_points(self, upper, lower, count):
        key = self._edge_key(upper, lower, 1)
        if count == 0:
            self.d.pop(key, None)
        else:
            self.d[key] = int(count)

    def set_eta(self, upper, lower, value=1):
        key = self._edge_key(upper, lower, 2)
        if value & 1:
            self.h[key] = 1
        else:
            self.h.pop(key, None)

    def set_eps(self, upper, lower, value):
        key = self._edge_key(upper, lower, 3)
        if value == UNKNOWN:
            self.e[key] = UNKNOWN
        elif value in (0, False):
            self.e.pop(key, None)
        elif value in (1, True):
            self.e[key] = 1
        else:
            raise ScoreError(f"epsilon value {value!r} not in {{0, 1, unknown}}")

    # -- access --------------------------------------------------------

    @property
    def objects(self):
        return list(self._order)

    def level(self, oid):
        return self._levels[oid]

    def label(self, oid):
        return self._labels.get(oid)

    def degree(self, oid):
        return self.base_degree + self._levels[oid]

    def level_objects(self, level):
        return [oid for oid in self._order if self._levels[oid] == level]

    def points(self, upper, lower):
        return self.d.get((upper, lower), 0)

    def eta(self, upper, lower):
        return self.h.get((upper, lower), 0)

    def eps(self, upper, lower):
        return self.e.get((upper, lower), 0)

    def has_object(self, oid):
        return oid in self._levels

    def fresh_id(self, prefix="q"):
        k = 1
        while f"{prefix}{k}" in self._levels:
            k += 1
        return f"{prefix}{k}"

    def copy(self):
        out = FlowScore(self.base_degree)
        out._levels = dict(self._levels)
        out._labels = dict(self._labels)
        out._order = list(self._order)
        out.d = dict(self.d)
        out.h = dict(self.h)
        out.e = dict(self.e)
        return out

    def __eq__(self, other):
        if not isinstance(other, FlowScore):
            return NotImplemented
        return (
            self.base_degree == other.base_degree
            and self._levels == other._levels
            and set(self._order) == set(other._order)
            and self.d == other.d
            and self.h == other.h
            and self.e == other.e
        )

    def __repr__(self):
        return f"<FlowScore {len(self._order)} objects base {self.base_degree}>"

    # -- validation ----------------------------------------------------

    def validate(self):
        """All invariant violations, as human-readable strings."""
        bad = []
        for (a, b), v in self.d.items():
            if v == 0:
                bad.append(f"points {a}->{b} stored as zero")
        lv = self._levels
        by_level = {l: self.level_objects(l) for l in LEVELS}

        # chain: consecutive point matrices compose to zero
        for top, mid, bot in ((3, 2, 1), (2, 1, 0)):
            for a in by_level[top]:
                for c in by_level[bot]:
                    total = sum(
                        self.points(a, z) * self.points(z, c) for z in by_level[mid]
                    )
                    if total != 0:
                        bad.append(
                            f"chain: point paths {a}->{c} sum to {total}, not 0"
                        )

        # eta support: no gap-1 strata under a recorded 1-dim class
        for (a, c) in self.h:
            mid = lv[a] - 1
            for z in by_level[mid]:
                if self.points(a, z) and self.points(z, c):
                    bad.append(
                        f"eta {a}->{c}: stratum through {z} is nonempty"
                    )

        # eps support: determinate entries need every stratum empty
        for a in by_level[3]:
            for v in by_level[0]:
                if self.eps(a, v) == UNKNOWN:
                    continue
                broken = None
                for z in by_level[1]:
                    if self.points(z, v) and self.eta(a, z):
                        broken = z
                        break
                if broken is None:
                    for z in by_level[2]:
                        if self.eta(z, v) and self.points(a, z):
                            broken = z
                            break
                if broken is not None:
                    bad.append(
                        f"eps {a}->{v}: determinate but stratum through {broken}"
                        " is nonempty; must be unknown"
                    )

        # eta parity: boundary classes of the 2-dim moduli cancel mod 2
        for a in by_level[3]:
            for v in by_level[0]:
                total = sum(
                    (self.points(z, v) & 1) * self.eta(a, z) for z in by_level[1]
                ) + sum(
                    self.eta(z, v) * (self.points(a, z) & 1) for z in by_level[2]
                )
                if total % 2:
                    bad.append(
                        f"parity: 1-dim boundary classes of ({a},{v}) do not cancel"
                    )
        return bad

    def check(self):
        bad = self.validate()
        if bad:
            raise ScoreError("; ".join(bad))
        return self

    # -- invariants ----------------------------------------------------

    def boundary_matrix(self, gap):
        """Point matrix of the gap, rows = upper objects, cols = lower."""
        upper = self.level_objects(gap)
        lower = self.level_objects(gap - 1)
        return [
            [self.points(a, b) for b in lower] for a in upper
        ]

    def homology(self):
        """Degree -> (free rank, sorted tuple of prime-power torsion)."""
        mats = {g: self.boundary_matrix(g) for g in (1, 2, 3)}
        counts = {l: len(self.level_objects(l)) for l in LEVELS}
        ranks = {}
        torsion = {}
        for g in (1, 2, 3):
            dec = linalg.smith_normal_form(mats[g])
            facs = dec.invariant_factors()
            ranks[g] = len(facs)
            tors = []
            for f in facs:
                tors.extend(linalg.prime_power_refine(f))
            torsion[g] = tuple(sorted(tors))
        ranks[4] = 0
        torsion[4] = ()
        out = {}
        for l in LEVELS:
            rank = counts[l] - ranks.get(l, 0) - ranks[l + 1]
            tors = torsion[l + 1]
            if rank or tors:
                out[self.base_degree + l] = (rank, tors)
        return out

    # -- assembly ------------------------------------------------------

    def summand_split(self):
        """Connected components, in order of first object appearance."""
        neighbors = {oid: set() for oid in self._order}
        for store in (self.d, self.h, self.e):
            for (a, b) in store:
                neighbors[a].add(b)
                neighbors[b].add(a)
        seen = set()
        parts = []
        for oid in self._order:
            if oid in seen:
                continue
            comp = []
            stack = [oid]
            seen.add(oid)
            while stack:
                cur = stack.pop()
                comp.append(cur)
                for nxt in neighbors[cur]:
                    if nxt not in seen:
                        seen.add(nxt)
                        stack.append(nxt)
            members = [x for x in self._order if x in set(comp)]
            parts.append(self.restrict(members))
        return parts

    def restrict(self, members):
        keep = set(members)
        out = FlowScore(self.base_degree)
        for oid in self._order:
            if oid in keep:
                out.add_object(oid, self._levels[oid], self._labels.get(oid))
        for store_name in ("d", "h", "e"):
            src = getattr(self, store_name)
            dst = getattr(out, store_name)
            for (a, b), v in src.items():
                if a in keep and b in keep:
                    dst[(a, b)] = v
        return out

    def suspend(self, times=1):
        out = self.copy()
        out.base_degree += times
        return out


def disjoint_union(first, second):
    """Put two scores side by side on a common degree window.

    Object ids of the second score are suffixed when they collide.  The
    result uses the smaller base degree; fails if the combined degree
    span does not fit in four levels.
    """
    base = min(first.base_degree, second.base_degree)
    out = FlowScore(base)

    def plant(src, rename):
        shift = src.base_degree - base
        mapping = {}
        for oid in src.objects:
            new_level = src.level(oid) + shift
            if new_level not in LEVELS:
                raise ScoreError(
                    "disjoint union does not fit in four levels"
                )
            nid = oid
            if rename:
                while out.has_object(nid):
                    nid = nid + "'"
            mapping[oid] = nid
            out.add_object(nid, new_level, src.label(oid))
        for (a, b), v in src.d.items():
            out.d[(mapping[a], mapping[b])] = v
        for (a, b), v in src.h.items():
            out.h[(mapping[a], mapping[b])] = v
        for (a, b), v in src.e.items():
            out.e[(mapping[a], mapping[b])] = v

    plant(first, rename=False)
    plant(second, rename=True)
    return out


# ---------------------------------------------------------------------------
# form predicates


def _is_prime_power(v):
    return v >= 2 and linalg.prime_power_refine(v) == [v]


def is_primary_smith(score):
    """Point matrices diagonal with positive prime-power entries."""
    for gap in (1, 2, 3):
        uppers = {}
        lowers = {}
        for (a, b), v in score.d.items():
            if score.level(a) != gap:
                continue
            if not _is_prime_power(v):
                return False
            uppers[a] = uppers.get(a, 0) + 1
            lowers[b] = lowers.get(b, 0) + 1
        if any(c > 1 for c in uppers.values()) or any(c > 1 for c in lowers.values()):
            return False
    return True


def is_chang(score):
    """Primary Smith plus: at most one gap-2 class at every level-0
    and level-2 object (gap-2 edges between levels 2 and 0 only)."""
    if not is_primary_smith(score):
        return False
    incident = {}
    for (a, c) in score.h:
        if score.level(a) != 2:
            continue
        incident[a] = incident.get(a, 0) + 1
        incident[c] = incident.get(c, 0) + 1
    return all(v <= 1 for v in incident.values())


# ---------------------------------------------------------------------------
# text form


_TOKEN = re.compile(r'"([^"]*)"|(\S+)')


def _tokens(line):
    return [m.group(1) if m.group(1) is not None else m.group(2) for m in _TOKEN.finditer(line)]


def parse_score(text):
    """Parse the plain-text score schema.  Raises ScoreError on bad input."""
    score = FlowScore(0)
    saw_base = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = _tokens(line)
        head = parts[0]
        try:
            if head == "base_degree":
                if saw_base:
                    raise ScoreError("base_degree given twice")
                if len(parts) != 2:
                    raise ScoreError("base_degree takes one integer")
                score.base_degree = int(parts[1])
                saw_base = True
            elif head == "object":
                if len(parts) not in (4, 6) or parts[2] != "level":
                    raise ScoreError("expected: object <id> level <0..3> [label \"...\"]")
                label = None
                if len(parts) == 6:
                    if parts[4] != "label":
                        raise ScoreError("expected label keyword")
                    label = parts[5]
                score.add_object(parts[1], int(parts[3]), label)
            elif head == "points":
                if len(parts) != 4:
                    raise ScoreError("expected: points <from> <to> <count>")
                key = score._edge_key(parts[1], parts[2], 1)
                if key in score.d:
                    raise ScoreError(f"duplicate points edge {parts[1]}->{parts[2]}")
                count = int(parts[3])
                if count == 0:
                    raise ScoreError("points count must be nonzero")
                score.d[key] = count
            elif head == "eta":
                if len(parts) != 3:
                    raise ScoreError("expected: eta <from> <to>")
                key = score._edge_key(parts[1], parts[2], 2)
                if key in score.h:
                    raise ScoreError(f"duplicate eta edge {parts[1]}->{parts[2]}")
                score.h[key] = 1
            elif head == "epsilon":
                if len(parts) != 4 or parts[3] not in ("0", "1", "unknown"):
                    raise ScoreError("expected: epsilon <from> <to> {0|1|unknown}")
                key = score._edge_key(parts[1], parts[2], 3)
                if key in score.e:
                    raise ScoreError(f"duplicate epsilon edge {parts[1]}->{parts[2]}")
                if parts[3] == "unknown":
                    score.e[key] = UNKNOWN
                elif parts[3] == "1":
                    score.e[key] = 1
            else:
                raise ScoreError(f"unknown directive {head!r}")
        except ScoreError as exc:
            raise ScoreError(f"line {lineno}: {exc}") from None
        except ValueError as exc:
            raise ScoreError(f"line {lineno}: {exc}") from None
    return score


def format_score(score):
    """Deterministic inverse of parse_score."""
    idx = {oid: i for i, oid in enumerate(score.objects)}
    lines = [f"base_degree {score.base_degree}"]
    for oid in score.objects:
        line = f"object {oid} level {score.level(oid)}"
        label = score.label(oid)
        if label is not None:
            line += f' label "{label}"'
        lines.append(line)
    for (a, b) in sorted(score.d, key=lambda k: (idx[k[0]], idx[k[1]])):
        lines.append(f"points {a} {b} {score.d[(a, b)]}")
    for (a, b) in sorted(score.h, key=lambda k: (idx[k[0]], idx[k[1]])):
        lines.append(f"eta {a} {b}")
    for (a, b) in sorted(score.e, key=lambda k: (idx[k[0]], idx[k[1]])):
        lines.append(f"epsilon {a} {b} {score.e[(a, b)]}")
    return "\n".join(lines) + "\n"


def score_digest(score):
    return hashlib.sha256(format_score(score).encode()).hexdigest()[:16]


# ---------------------------------------------------------------------------
# isomorphism up to relabeling (levels and all edge data preserved)


def scores_isomorphic(first, second):
    if first.base_degree != second.base_degree:
        return False
    by_level_a = {l: first.level_objects(l) for l in LEVELS}
    by_level_b = {l: second.level_objects(l) for l in LEVELS}
    if any(len(by_level_a[l]) != len(by_level_b[l]) for l in LEVELS):
        return False

    import itertools

    def signature(score, oid):
        deg_d = sorted(v for (a, b), v in score.d.items() if oid in (a, b))
        deg_h = sum(1 for k in score.h if oid in k)
        deg_e = sorted(str(v) for k, v in score.e.items() if oid in k)
        return (deg_d, deg_h, deg_e)

    for l in LEVELS:
        sig_a = sorted(map(lambda o: signature(first, o), by_level_a[l]))
        sig_b = sorted(map(lambda o: signature(second, o), by_level_b[l]))
        if sig_a != sig_b:
            return False

    def compatible(mapping):
        for (a, b), v in first.d.items():
            if second.points(mapping[a], mapping[b]) != v:
                return False
        for (a, b), v in first.h.items():
            if second.eta(mapping[a], mapping[b]) != v:
                return False
        for (a, b), v in first.e.items():
            if second.eps(mapping[a], mapping[b]) != v:
                return False
        if len(first.d) != len(second.d) or len(first.h) != len(second.h):
            return False
        if len(first.e) != len(second.e):
            return False
        return True

    perms_per_level = [
        itertools.permutations(by_level_b[l]) for l in LEVELS
    ]
    for combo in itertools.product(*perms_per_level):
        mapping = {}
        for l, perm in zip(LEVELS, combo):
            for src, dst in zip(by_level_a[l], perm):
                mapping[src] = dst
        if compatible(mapping):
            return True
    return False


# ---------------------------------------------------------------------------
# drawing support


def render_layout(score):
    """Stable coordinates for drawing: x = slot within level, y = level."""
    out = {}
    slots = {l: 0 for l in LEVELS}
    for oid in score.objects:
        l = score.level(oid)
        out[oid] = (slots[l], l)
        slots[l] += 1
    return out
