"""Adversarial stream constructions from communication lower bounds.

* ``disjointness``: Alice inserts every ``i`` with ``a_i = 1``, Bob every
  ``i`` with ``b_i = 1``. All non-zero counts are equal (so one piece fits
  with zero support-aware error) exactly when the sets are disjoint.
* ``proper``: universe ``[1..3n]`` for a square ``n``. ``[1..2n]`` is cut
  into blocks ``A_1, B_1, ..., A_t, B_t`` of width ``t = sqrt(n)``; items
  ``2n+1..3n`` always have count 1. Alice fills ``A_i`` with mice when
  ``a_i = 1``; Bob deletes the mice in ``A_1..A_{j-1}``, places
  ``floor(t/(j-1))`` elephants (count ``t``) in each earlier ``B`` block and
  ``round(gamma*t)`` elephants in ``B_j``.
* ``bicriteria``: universe ``[1..n]`` in ``t`` chunks of width ``t``, each
  cut into ``b*t`` sub-intervals. Alice puts ``a/b`` mice in every
  sub-interval of chunk ``i`` when ``x_i = 1`` (never on its first index);
  Bob deletes Alice's mice in chunks ``1..j-1`` and adds ``t`` copies of the
  first index of each sub-interval of chunk ``j``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import BadParams
from .stream import ArrayStream

FAMILIES = ("disjointness", "proper", "bicriteria")


@dataclass
class GadgetSpec:
    family: str
    n: int
    a_bits: tuple[int, ...] = ()
    b_bits: tuple[int, ...] = ()
    j: int = 1
    gamma: float = 0.2
    a: Fraction = Fraction(1, 2)
    b: Fraction = Fraction(1, 8)
    c: Fraction = Fraction(1, 10)
    k: Fraction = Fraction(1, 40)
    seed: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise BadParams(f"unknown gadget family {self.family!r}")
        self.a_bits = tuple(int(x) for x in self.a_bits)
        self.b_bits = tuple(int(x) for x in self.b_bits)
        if any(x not in (0, 1) for x in self.a_bits + self.b_bits):
            raise BadParams("bit vectors must hold 0/1 values")
        for name in ("a", "b", "c", "k"):
            setattr(self, name, Fraction(getattr(self, name)).limit_denominator(10**6))
        if self.family == "disjointness":
            if len(self.a_bits) != self.n or len(self.b_bits) != self.n:
                raise BadParams("disjointness needs two bit vectors of length n")
            return
        t = math.isqrt(self.n)
        if t * t != self.n or t < 2:
            raise BadParams("n must be a perfect square >= 4")
        if len(self.a_bits) != t:
            raise BadParams(f"need sqrt(n) = {t} bits")
        if not 1 <= self.j <= t:
            raise BadParams(f"index j must lie in [1..{t}]")
        if self.family == "proper":
            if not 0 < self.gamma < 1:
                raise BadParams("gamma must lie in (0, 1)")
        else:
            subs = self.b * t
            if subs.denominator != 1 or subs < 1 or t % int(subs):
                raise BadParams("b*sqrt(n) must be a whole number dividing sqrt(n)")
            per = self.a / self.b
            if per.denominator != 1:
                raise BadParams("a/b must be an integer")
            if per > t // int(subs) - 1:
                raise BadParams("too many mice per sub-interval")

    @property
    def t(self) -> int:
        return math.isqrt(self.n)

    @property
    def universe(self) -> int:
        return 3 * self.n if self.family == "proper" else self.n


def _stream(universe, parts):
    items = np.concatenate([p[0] for p in parts]) if parts else np.zeros(0, np.int64)
    deltas = np.concatenate([p[1] for p in parts]) if parts else np.zeros(0, np.int64)
    return ArrayStream(universe, items.astype(np.int64), deltas.astype(np.int64))


def _ins(items, count=1):
    items = np.asarray(items, dtype=np.int64)
    return items, np.full(len(items), count, dtype=np.int64)


def gadget_stream(spec: GadgetSpec) -> ArrayStream:
    """Alice's updates followed by Bob's, over ``spec.universe``."""
    rng = np.random.default_rng(spec.seed)
    if spec.family == "disjointness":
        a = np.flatnonzero(np.array(spec.a_bits)) + 1
        b = np.flatnonzero(np.array(spec.b_bits)) + 1
        return _stream(spec.n, [_ins(a), _ins(b)])
    t = spec.t
    if spec.family == "proper":
        return _proper(spec, t, rng)
    return _bicriteria(spec, t, rng)


def _proper(spec, t, rng):
    n = spec.n
    A = lambda i: np.arange(2 * (i - 1) * t + 1, 2 * (i - 1) * t + t + 1)  # noqa: E731
    B = lambda i: A(i) + t  # noqa: E731
    alice = [_ins(np.arange(2 * n + 1, 3 * n + 1))]
    alice += [_ins(A(i)) for i in range(1, t + 1) if spec.a_bits[i - 1]]
    bob = []
    for i in range(1, spec.j):
        if spec.a_bits[i - 1]:
            bob.append(_ins(A(i), -1))
    if spec.j > 1:
        per = t // (spec.j - 1)
        for i in range(1, spec.j):
            bob.append(_ins(np.sort(rng.choice(B(i), size=per, replace=False)), t))
    g = elephants_in_target(spec)
    bob.append(_ins(np.sort(rng.choice(B(spec.j), size=g, replace=False)), t))
    return _stream(3 * n, alice + bob)


def elephants_in_target(spec: GadgetSpec) -> int:
    """Elephants Bob places in his own target block (at least one)."""
    return max(1, round(spec.gamma * spec.t))


def proper_opt2_counts(spec: GadgetSpec) -> int | None:
    """Derived optimal 2-piece error, in counts, when ``a_j = 1``.

    Splitting right after ``B_{j-1}`` leaves only the target block's
    elephants misfit by ``t - 1`` each; every other split misfits at least
    the ``t`` mice of ``A_j`` by the same amount. Returns None when
    ``a_j = 0`` (the optimum is then 0).
    """
    if not spec.a_bits[spec.j - 1]:
        return None
    return elephants_in_target(spec) * (spec.t - 1)


def _bicriteria(spec, t, rng):
    subs = int(spec.b * t)
    width = t // subs
    per = int(spec.a / spec.b)
    alice_by_chunk = {}
    parts = []
    for i in range(1, t + 1):
        if not spec.a_bits[i - 1]:
            continue
        chosen = []
        for s in range(subs):
            first = (i - 1) * t + s * width + 1
            chosen.append(first + 1 + np.sort(rng.choice(width - 1, size=per, replace=False)))
        items = np.concatenate(chosen)
        alice_by_chunk[i] = items
        parts.append(_ins(items))
    for i in range(1, spec.j):
        if i in alice_by_chunk:
            parts.append(_ins(alice_by_chunk[i], -1))
    firsts = (spec.j - 1) * t + np.arange(subs) * width + 1
    parts.append(_ins(firsts, t))
    return _stream(spec.n, parts)


def bicriteria_constraints(a, b, c, k) -> tuple[bool, Fraction]:
    """Check the constant constraints and return the admissible error bound.

    Conditions: ``a + b <= 1``, ``a/b`` integral, ``b > c > k``; the bound
    is ``min(c/2, a(c-k)/(2b) - b)`` and must be positive.
    """
    a, b, c, k = (Fraction(x).limit_denominator(10**6) for x in (a, b, c, k))
    bound = min(c / 2, a * (c - k) / (2 * b) - b)
    ok = a + b <= 1 and (a / b).denominator == 1 and b > c > k and bound > 0
    return ok, bound


def random_spec(family: str, n: int, rng: np.random.Generator, **overrides) -> GadgetSpec:
    """Random bit inputs for ``family``; ``overrides`` fix any field."""
    if family == "disjointness":
        a = rng.integers(0, 2, size=n)
        b = rng.integers(0, 2, size=n)
        kw = dict(a_bits=tuple(a), b_bits=tuple(b))
    else:
        t = math.isqrt(n)
        kw = dict(a_bits=tuple(rng.integers(0, 2, size=t)), j=int(rng.integers(1, t + 1)))
    kw["seed"] = int(rng.integers(2**31))
    kw.update(overrides)
    return GadgetSpec(family, n, **kw)
