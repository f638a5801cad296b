"""Certified moves on scores.

Every public move checks its preconditions, applies an exact rewrite of
the point, eta and epsilon layers, re-marks 2-dimensional classes whose
boundary strata became nonempty, and finally re-validates the score.  A
move that cannot keep the score valid raises instead of corrupting it.

The records returned by the move functions are small frozen dataclasses
that can be replayed on a copy of the starting score.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .score import UNKNOWN, FlowScore
from .words import fill_forced_unknowns


class MoveError(ValueError):
    pass


@dataclass(frozen=True)
class HandleSlide:
    moving: str
    over: str
    sign: int = 1


@dataclass(frozen=True)
class Trick2:
    upper: str
    lower: str


@dataclass(frozen=True)
class Trick1:
    variant: str   # "a" .. "f"
    helper: str    # the object carrying the odd point column
    mover: str     # the object whose edge is being cleared
    pivot: str     # the shared endpoint holding the odd entry


@dataclass(frozen=True)
class CancelUnit:
    upper: str
    lower: str


@dataclass(frozen=True)
class Birth:
    upper: str
    lower: str
    level: int     # level of the new upper object
    unit: int = 1


@dataclass(frozen=True)
class HookComposite:
    lemma: str     # "be" | "te"
    case: int
    subrecords: tuple = ()


@dataclass(frozen=True)
class LemmaRewrite:
    name: str
    args: tuple = ()


@dataclass(frozen=True)
class Composite:
    """A burst of primitive moves whose net effect is one certified rewrite."""

    tag: str
    subrecords: tuple = ()


MOVE_TYPES = (HandleSlide, Trick2, Trick1, CancelUnit, Birth, HookComposite, Composite, LemmaRewrite)


_deferred = 0


class deferred_validation:
    """Suspend per-move bookkeeping while a composite is in flight.

    A slide sequence certified as one rewrite can pass through states
    whose 1-dimensional moduli are not closed; only the state at the
    composite boundary is a score again.  Inside the context the moves
    skip the forced-unknown fill and the validation, both of which run
    once when the composite ends.
    """

    def __enter__(self):
        global _deferred
        _deferred += 1
        return self

    def __exit__(self, exc_type, exc, tb):
        global _deferred
        _deferred -= 1
        return False


def deferral_depth():
    return _deferred


def _eps_xor_bit(score, upper, lower, flip):
    """Flip an epsilon entry by an F2 bit; unknown absorbs any flip."""
    if not flip:
        return
    cur = score.eps(upper, lower)
    if cur == UNKNOWN:
        return
    score.set_eps(upper, lower, cur ^ 1)


def _eps_xor_value(score, upper, lower, value, parity=1):
    """Add parity * value to an epsilon entry, value may be unknown."""
    if parity % 2 == 0 or value == 0:
        return
    if value == UNKNOWN:
        score.set_eps(upper, lower, UNKNOWN)
        return
    _eps_xor_bit(score, upper, lower, 1)


def _finish(score, record):
    if _deferred:
        return record
    fill_forced_unknowns(score)
    problems = score.validate()
    if problems:
        raise MoveError(f"{record} broke the score: {problems}")
    return record


# ---------------------------------------------------------------------------
# handle slides


def handle_slide(score, moving, over, sign=1):
    """Replace the handle of `moving` by moving + sign * over.

    Both objects must share a level.  Outgoing edges of `moving` gain
    those of `over`; incoming edges of `over` lose those of `moving`.
    At the middle levels the 2-dimensional classes threading through the
    pair lose their framing and become indeterminate.
    """
    if moving == over:
        raise MoveError("cannot slide an object over itself")
    if sign not in (1, -1):
        raise MoveError(f"slide sign must be +1 or -1, got {sign}")
    level = score.level(moving)
    if level != score.level(over):
        raise MoveError(
            f"slide needs equal levels, got {level} and {score.level(over)}"
        )

    # below: rows of `moving` gain the rows of `over`
    for w in score.objects:
        gap = level - score.level(w)
        if gap == 1:
            score.set_points(moving, w, score.points(moving, w) + sign * score.points(over, w))
        elif gap == 2:
            score.set_eta(moving, w, score.eta(moving, w) ^ score.eta(over, w))
        elif gap == 3:
            _eps_xor_value(score, moving, w, score.eps(over, w))
    # above: columns of `over` lose the columns of `moving`
    for u in score.objects:
        gap = score.level(u) - level
        if gap == 1:
            score.set_points(u, over, score.points(u, over) - sign * score.points(u, moving))
        elif gap == 2:
            score.set_eta(u, over, score.eta(u, over) ^ score.eta(u, moving))
        elif gap == 3:
            _eps_xor_value(score, u, over, score.eps(u, moving))
    return _finish(score, HandleSlide(moving, over, sign))


# ---------------------------------------------------------------------------
# framed interval tricks


def trick2(score, upper, lower):
    """Birth and death of a cancelling interval between adjacent levels.

    Flips eta entries parallel to the pair by the parity of the adjacent
    point columns, and epsilon entries by the adjacent eta rows.  All
    classes that thread through both sides at once become indeterminate.
    """
    lu = score.level(upper)
    ll = score.level(lower)
    if lu != ll + 1:
        raise MoveError(f"trick2 needs adjacent levels, got {lu} and {ll}")

    poisoned = []
    if lu == 2:
        for u in score.level_objects(3):
            if not score.points(u, upper):
                continue
            for v in score.level_objects(0):
                if score.points(lower, v):
                    poisoned.append((u, v))

    for w in score.objects:
        gap = ll - score.level(w)
        if gap == 1:
            score.set_eta(upper, w, score.eta(upper, w) ^ (score.points(lower, w) & 1))
        elif gap == 2:
            _eps_xor_bit(score, upper, w, score.eta(lower, w))
    for u in score.objects:
        gap = score.level(u) - lu
        if gap == 1:
            score.set_eta(u, lower, score.eta(u, lower) ^ (score.points(u, upper) & 1))
        elif gap == 2:
            _eps_xor_bit(score, u, lower, score.eta(u, upper))
    for u, v in poisoned:
        score.set_eps(u, v, UNKNOWN)
    return _finish(score, Trick2(upper, lower))


_TRICK1_LEVELS = {
    # variant: (helper level, mover level, pivot level)
    "a": (1, 2, 0),
    "b": (2, 3, 1),
    "c": (1, 0, 2),
    "d": (2, 1, 3),
    "e": (1, 3, 0),
    "f": (2, 0, 3),
}


def trick1(score, variant, helper, mover, pivot):
    """Clear one eta or epsilon edge across an odd point column.

    The helper carries the odd column, the pivot is the endpoint where
    the odd entry sits, and the mover is the other end of the edge being
    cleared.  Variants a-d clear eta edges, e and f clear epsilon edges;
    lettering follows the vertical position and side of the column.
    """
    if variant not in _TRICK1_LEVELS:
        raise MoveError(f"unknown trick1 variant {variant!r}")
    hl, ml, pl = _TRICK1_LEVELS[variant]
    for oid, want in ((helper, hl), (mover, ml), (pivot, pl)):
        if score.level(oid) != want:
            raise MoveError(
                f"trick1 {variant}: {oid} sits at level {score.level(oid)}, wanted {want}"
            )
    if variant in ("a", "b", "e"):
        odd = score.points(helper, pivot)
    else:
        odd = score.points(pivot, helper)
    if odd % 2 == 0:
        raise MoveError(f"trick1 {variant}: point count {odd} at the pivot is even")

    if variant == "a":
        for x in score.level_objects(0):
            score.set_eta(mover, x, score.eta(mover, x) ^ (score.points(helper, x) & 1))
        for x in score.level_objects(3):
            score.set_eta(x, helper, score.eta(x, helper) ^ (score.points(x, mover) & 1))
    elif variant == "b":
        for x in score.level_objects(1):
            score.set_eta(mover, x, score.eta(mover, x) ^ (score.points(helper, x) & 1))
        for y in score.level_objects(0):
            _eps_xor_bit(score, mover, y, score.eta(helper, y))
    elif variant == "c":
        for x in score.level_objects(2):
            score.set_eta(x, mover, score.eta(x, mover) ^ (score.points(x, helper) & 1))
        for x in score.level_objects(3):
            _eps_xor_bit(score, x, mover, score.eta(x, helper))
    elif variant == "d":
        for x in score.level_objects(3):
            score.set_eta(x, mover, score.eta(x, mover) ^ (score.points(x, helper) & 1))
        for y in score.level_objects(0):
            score.set_eta(helper, y, score.eta(helper, y) ^ (score.points(mover, y) & 1))
    elif variant == "e":
        for x in score.level_objects(0):
            _eps_xor_bit(score, mover, x, score.points(helper, x) & 1)
    else:  # f
        for x in score.level_objects(3):
            _eps_xor_bit(score, x, mover, score.points(x, helper) & 1)
    return _finish(score, Trick1(variant, helper, mover, pivot))


# ---------------------------------------------------------------------------
# births and deaths


def birth(score, level, unit=1, upper=None, lower=None):
    """Insert a cancelling pair of objects joined by a unit point."""
    if level not in (1, 2, 3):
        raise MoveError(f"birth level must be 1, 2 or 3, got {level}")
    if unit not in (1, -1):
        raise MoveError(f"birth unit must be +1 or -1, got {unit}")
    upper = upper or score.fresh_id("b")
    score.add_object(upper, level)
    lower = lower or score.fresh_id("b")
    score.add_object(lower, level - 1)
    score.set_points(upper, lower, unit)
    return _finish(score, Birth(upper, lower, level, unit))


def cancel_unit(score, upper, lower):
    """Cancel a pair joined by a single signed point.

    Flows into the dying lower object reroute along the boundary of the
    dying upper object; composite corrections hit every layer the window
    allows, with parities deciding the eta and epsilon flips.
    """
    delta = score.points(upper, lower)
    if delta not in (1, -1):
        raise MoveError(f"cancel needs a unit point count, got {delta}")
    lb = score.level(upper)

    into_d = [(u, score.points(u, lower)) for u in score.level_objects(lb)
              if u != upper and score.points(u, lower)]
    into_h = [(u, 1) for u in score.level_objects(lb + 1)
              if lb + 1 <= 3 and score.eta(u, lower)]
    into_e = [(u, score.eps(u, lower)) for u in score.level_objects(lb + 2)
              if lb + 2 <= 3 and score.eps(u, lower) not in (0,)]
    out_d = [(v, score.points(upper, v)) for v in score.level_objects(lb - 1)
             if v != lower and score.points(upper, v)]
    out_h = [(v, 1) for v in score.level_objects(lb - 2)
             if lb - 2 >= 0 and score.eta(upper, v)]
    out_e = [(v, score.eps(upper, v)) for v in score.level_objects(lb - 3)
             if lb - 3 >= 0 and score.eps(upper, v) not in (0,)]

    for u, cu in into_d:
        for v, bv in out_d:
            score.set_points(u, v, score.points(u, v) - delta * cu * bv)
        for v, _ in out_h:
            score.set_eta(u, v, score.eta(u, v) ^ (cu & 1))
        for v, bv in out_e:
            _eps_xor_value(score, u, v, bv, parity=cu)
    for u, _ in into_h:
        for v, bv in out_d:
            score.set_eta(u, v, score.eta(u, v) ^ (bv & 1))
        for v, _ in out_h:
            _eps_xor_bit(score, u, v, 1)
    for u, eu in into_e:
        for v, bv in out_d:
            _eps_xor_value(score, u, v, eu, parity=bv)

    score.remove_object(upper)
    score.remove_object(lower)
    return _finish(score, CancelUnit(upper, lower))


# ---------------------------------------------------------------------------
# composites and replay


def apply_move(score, record):
    """Replay one move record on a score."""
    if isinstance(record, HandleSlide):
        handle_slide(score, record.moving, record.over, record.sign)
    elif isinstance(record, Trick2):
        trick2(score, record.upper, record.lower)
    elif isinstance(record, Trick1):
        trick1(score, record.variant, record.helper, record.mover, record.pivot)
    elif isinstance(record, CancelUnit):
        cancel_unit(score, record.upper, record.lower)
    elif isinstance(record, Birth):
        birth(score, record.level, record.unit, record.upper, record.lower)
    elif isinstance(record, (HookComposite, Composite)):
        with deferred_validation():
            for sub in record.subrecords:
                apply_move(score, sub)
        fill_forced_unknowns(score)
        if not _deferred:
            problems = score.validate()
            if problems:
                raise MoveError(f"{record} broke the score: {problems}")
    elif isinstance(record, LemmaRewrite):
        _apply_rewrite(score, record)
    else:
        raise MoveError(f"unknown move record {record!r}")
    return record


def replay(score, records):
    """Apply a list of records to a copy of the score, returning it."""
    out = score.copy()
    for record in records:
        apply_move(out, record)
    return out


def _apply_rewrite(score, record):
    """Net rewrites certified by the splitting lemmas."""
    if record.name == "split_eps":
        upper, lower = record.args
        if score.eps(upper, lower) != 1:
            raise MoveError(f"split_eps: no determinate class at ({upper}, {lower})")
        score.set_eps(upper, lower, 0)
        problems = score.validate()
        if problems:
            raise MoveError(f"{record} broke the score: {problems}")
    else:
        raise MoveError(f"unknown rewrite {record.name!r}")


# ---------------------------------------------------------------------------
# random applicable moves, used by the shake-and-bake tests


def applicable_moves(score):
    """All single moves whose preconditions hold, as unapplied records."""
    out = []
    objs = score.objects
    for x in objs:
        for y in objs:
            if x == y:
                continue
            if score.level(x) == score.level(y):
                out.append(HandleSlide(x, y, 1))
                out.append(HandleSlide(x, y, -1))
            if score.level(x) == score.level(y) + 1:
                out.append(Trick2(x, y))
                if score.points(x, y) in (1, -1):
                    out.append(CancelUnit(x, y))
    for variant, (hl, ml, pl) in _TRICK1_LEVELS.items():
        for helper in score.level_objects(hl):
            for pivot in score.level_objects(pl):
                count = (
                    score.points(helper, pivot)
                    if variant in ("a", "b", "e")
                    else score.points(pivot, helper)
                )
                if count % 2 == 0:
                    continue
                for mover in score.level_objects(ml):
                    out.append(Trick1(variant, helper, mover, pivot))
    for level in (1, 2, 3):
        out.append(Birth("", "", level, 1))
        out.append(Birth("", "", level, -1))
    return out


def random_move(score, rng):
    """Apply one applicable move chosen at random, returning its record."""
    options = applicable_moves(score)
    rng.shuffle(options)
    for record in options:
        probe = score.copy()
        try:
            if isinstance(record, Birth):
                applied = birth(probe, record.level, record.unit)
            else:
                applied = apply_move(probe, record)
        except MoveError:
            continue
        score._levels = probe._levels
        score._labels = probe._labels
        score._order = probe._order
        score.d = probe.d
        score.h = probe.h
        score.e = probe.e
        return applied
    raise MoveError("no applicable move")
