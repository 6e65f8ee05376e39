"""Finite abelian groups at desk scale.

Elements are tuples of non-negative integers in a canonical encoding:

* ``BitVector(lam)``      -- GF(2)^lam, one bit per coordinate, XOR.
* ``MultMod(n)``          -- Z_n^*, a single residue coprime to ``n``.
* ``CyclicProduct(ns)``   -- Z_n1 x ... x Z_nt, residues added coordinatewise.
* ``DirectProduct(L, R)`` -- concatenation of an ``L`` and an ``R`` element.

All iteration over element sets is in lexicographic tuple order, so
experiments are reproducible.
"""

from __future__ import annotations

import math
import threading
from abc import ABC, abstractmethod
from dataclasses import dataclass
from functools import cached_property
from itertools import product
from typing import Iterable, Sequence

from sympy import totient

from .errors import ClosureOverflowError, MalformedElementError, ParameterError

DEFAULT_CLOSURE_CAP = 2**20

Element = tuple


class Group(ABC):
    """A finite abelian group with canonical tuple encodings."""

    family: str

    @property
    @abstractmethod
    def order(self) -> int: ...

    @property
    @abstractmethod
    def element_width(self) -> int: ...

    @property
    @abstractmethod
    def identity(self) -> Element: ...

    @abstractmethod
    def is_valid(self, a: Element) -> bool: ...

    @abstractmethod
    def _op(self, a: Element, b: Element) -> Element:
        """Unchecked group operation on canonical tuples."""

    @abstractmethod
    def _inv(self, a: Element) -> Element: ...

    @abstractmethod
    def _enumerate(self) -> Iterable[Element]:
        """All elements in lexicographic order."""

    @abstractmethod
    def sample(self, rng) -> Element:
        """Uniform element."""

    @abstractmethod
    def to_json(self) -> dict: ...

    def element(self, value) -> Element:
        """Coerce an int or a sequence of ints into a validated element."""
        if isinstance(value, int):
            value = (value,)
        try:
            a = tuple(int(v) for v in value)
        except (TypeError, ValueError):
            raise MalformedElementError(f"{value!r} is not an integer sequence") from None
        if not self.is_valid(a):
            raise MalformedElementError(f"{a} is not an element of {self}")
        return a

    def compose(self, a, b) -> Element:
        return self._op(self.element(a), self.element(b))

    def inverse(self, a) -> Element:
        return self._inv(self.element(a))

    def power(self, a, e: int) -> Element:
        a = self.element(a)
        if e < 0:
            a, e = self._inv(a), -e
        result = self.identity
        while e:
            if e & 1:
                result = self._op(result, a)
            a = self._op(a, a)
            e >>= 1
        return result

    def element_order(self, a) -> int:
        a = self.element(a)
        cur, n = a, 1
        while cur != self.identity:
            cur = self._op(cur, a)
            n += 1
        return n

    def elements(self, cap: int = DEFAULT_CLOSURE_CAP) -> list[Element]:
        if self.order > cap:
            raise ClosureOverflowError(f"{self} has {self.order} elements, cap is {cap}")
        return list(self._enumerate())

    @property
    def k(self) -> int:
        """ceil(log2 |G|)."""
        return (self.order - 1).bit_length()


@dataclass(frozen=True)
class BitVector(Group):
    lam: int
    family = "bitvector"

    def __post_init__(self):
        if self.lam < 1:
            raise ParameterError("BitVector needs lambda >= 1")

    @property
    def order(self):
        return 2**self.lam

    @property
    def element_width(self):
        return self.lam

    @property
    def identity(self):
        return (0,) * self.lam

    def is_valid(self, a):
        return len(a) == self.lam and all(v in (0, 1) for v in a)

    def _op(self, a, b):
        return tuple(x ^ y for x, y in zip(a, b))

    def _inv(self, a):
        return a

    def _enumerate(self):
        return product((0, 1), repeat=self.lam)

    def sample(self, rng):
        return to_bits(rng.getrandbits(self.lam), self.lam)

    def to_json(self):
        return {"family": self.family, "lambda": self.lam}


@dataclass(frozen=True)
class MultMod(Group):
    n: int
    family = "multmod"

    def __post_init__(self):
        if self.n < 2:
            raise ParameterError("MultMod needs n >= 2")

    @cached_property
    def order(self):
        return int(totient(self.n))

    @property
    def element_width(self):
        return 1

    @property
    def identity(self):
        return (1,)

    def is_valid(self, a):
        return len(a) == 1 and 0 < a[0] < self.n and math.gcd(a[0], self.n) == 1

    def _op(self, a, b):
        return (a[0] * b[0] % self.n,)

    def _inv(self, a):
        return (pow(a[0], -1, self.n),)

    def _enumerate(self):
        return ((r,) for r in range(1, self.n) if math.gcd(r, self.n) == 1)

    def sample(self, rng):
        # rejection of non-units
        while True:
            r = rng.randrange(1, self.n)
            if math.gcd(r, self.n) == 1:
                return (r,)

    def to_json(self):
        return {"family": self.family, "n": self.n}


@dataclass(frozen=True)
class CyclicProduct(Group):
    moduli: tuple[int, ...]
    family = "cyclic"

    def __post_init__(self):
        object.__setattr__(self, "moduli", tuple(int(m) for m in self.moduli))
        if not self.moduli or any(m < 1 for m in self.moduli):
            raise ParameterError("CyclicProduct needs at least one modulus, all >= 1")

    @property
    def order(self):
        return math.prod(self.moduli)

    @property
    def element_width(self):
        return len(self.moduli)

    @property
    def identity(self):
        return (0,) * len(self.moduli)

    def is_valid(self, a):
        return len(a) == len(self.moduli) and all(0 <= v < m for v, m in zip(a, self.moduli))

    def _op(self, a, b):
        return tuple((x + y) % m for x, y, m in zip(a, b, self.moduli))

    def _inv(self, a):
        return tuple(-x % m for x, m in zip(a, self.moduli))

    def _enumerate(self):
        return product(*(range(m) for m in self.moduli))

    def sample(self, rng):
        return tuple(rng.randrange(m) for m in self.moduli)

    def to_json(self):
        return {"family": self.family, "moduli": list(self.moduli)}


@dataclass(frozen=True)
class DirectProduct(Group):
    left: Group
    right: Group
    family = "product"

    @property
    def order(self):
        return self.left.order * self.right.order

    @property
    def element_width(self):
        return self.left.element_width + self.right.element_width

    @property
    def identity(self):
        return self.left.identity + self.right.identity

    def split(self, a):
        w = self.left.element_width
        return a[:w], a[w:]

    def is_valid(self, a):
        if len(a) != self.element_width:
            return False
        x, y = self.split(a)
        return self.left.is_valid(x) and self.right.is_valid(y)

    def _op(self, a, b):
        w = self.left.element_width
        return self.left._op(a[:w], b[:w]) + self.right._op(a[w:], b[w:])

    def _inv(self, a):
        x, y = self.split(a)
        return self.left._inv(x) + self.right._inv(y)

    def _enumerate(self):
        rights = list(self.right._enumerate())
        return (x + y for x in self.left._enumerate() for y in rights)

    def sample(self, rng):
        return self.left.sample(rng) + self.right.sample(rng)

    def to_json(self):
        return {"family": self.family, "left": self.left.to_json(), "right": self.right.to_json()}


def group_from_json(spec: dict) -> Group:
    try:
        fam = spec["family"]
        if fam == "bitvector":
            return BitVector(int(spec["lambda"]))
        if fam == "multmod":
            return MultMod(int(spec["n"]))
        if fam == "cyclic":
            return CyclicProduct(tuple(spec["moduli"]))
        if fam == "product":
            return DirectProduct(group_from_json(spec["left"]), group_from_json(spec["right"]))
    except KeyError as e:
        raise ParameterError(f"group spec is missing field {e}") from None
    raise ParameterError(f"unknown group family {spec.get('family')!r}")


# GF(2) helpers -------------------------------------------------------------

def to_mask(v: Sequence[int]) -> int:
    return sum(bit << i for i, bit in enumerate(v))


def to_bits(mask: int, lam: int) -> Element:
    return tuple((mask >> i) & 1 for i in range(lam))


def _gf2_reduce(basis: dict[int, int], v: int) -> int:
    while v:
        b = basis.get(v.bit_length() - 1)
        if b is None:
            return v
        v ^= b
    return 0


def _gf2_insert(basis: dict[int, int], v: int) -> bool:
    r = _gf2_reduce(basis, v)
    if r:
        basis[r.bit_length() - 1] = r
        return True
    return False


def gf2_rank(vectors: Iterable[Sequence[int]]) -> int:
    basis: dict[int, int] = {}
    for v in vectors:
        _gf2_insert(basis, to_mask(v))
    return len(basis)


# Subgroups -----------------------------------------------------------------

def _adjoin(group: Group, members: set, g: Element, cap: int) -> set:
    """Return <members, g> for a subgroup ``members`` of an abelian group.

    <H, g> is the union of the cosets g^i H for i below the order of g mod H,
    so the work is linear in the size of the result.
    """
    if g in members:
        return members
    out = set(members)
    base = list(members)
    cur = g
    while cur not in members:
        out.update(group._op(cur, h) for h in base)
        if len(out) > cap:
            raise ClosureOverflowError(f"closure exceeded cap of {cap} elements")
        cur = group._op(cur, g)
    return out


class Subgroup:
    """The subgroup generated by a list of elements.

    The closure is computed once, on first use, under a lock. BitVector
    subgroups answer ``order`` and membership from a GF(2) basis without
    enumerating.
    """

    def __init__(self, group: Group, generators: Iterable, cap: int = DEFAULT_CLOSURE_CAP,
                 _members: frozenset | None = None):
        self.group = group
        self.generators = tuple(group.element(g) for g in generators)
        self.cap = cap
        self._lock = threading.Lock()
        self._members = _members
        self._basis = None
        if isinstance(group, BitVector):
            basis: dict[int, int] = {}
            for g in self.generators:
                _gf2_insert(basis, to_mask(g))
            self._basis = basis

    def __repr__(self):
        return f"Subgroup({self.group}, {len(self.generators)} generators)"

    def _closure(self) -> frozenset:
        if self._members is None:
            with self._lock:
                if self._members is None:
                    if self._basis is not None and 2 ** len(self._basis) > self.cap:
                        raise ClosureOverflowError(f"closure exceeded cap of {self.cap} elements")
                    members = {self.group.identity}
                    for g in self.generators:
                        members = _adjoin(self.group, members, g, self.cap)
                    self._members = frozenset(members)
        return self._members

    @property
    def elements(self) -> list[Element]:
        return sorted(self._closure())

    @property
    def order(self) -> int:
        if self._basis is not None:
            return 2 ** len(self._basis)
        return len(self._closure())

    def __len__(self):
        return self.order

    def __contains__(self, x) -> bool:
        x = self.group.element(x)
        if self._basis is not None:
            return _gf2_reduce(self._basis, to_mask(x)) == 0
        return x in self._closure()

    def contains_by_closure(self, x) -> bool:
        """Membership by closure lookup, bypassing any fast path."""
        return self.group.element(x) in self._closure()

    def extend(self, more: Iterable) -> "Subgroup":
        """<generators, more>, reusing the closure computed so far."""
        more = [self.group.element(g) for g in more]
        if self._basis is not None or self._members is None:
            return Subgroup(self.group, self.generators + tuple(more), self.cap)
        members = set(self._members)
        for g in more:
            members = _adjoin(self.group, members, g, self.cap)
        return Subgroup(self.group, self.generators + tuple(more), self.cap, frozenset(members))


def compose(G: Group, a, b) -> Element:
    return G.compose(a, b)


def inverse(G: Group, a) -> Element:
    return G.inverse(a)


def closure(G: Group, S: Iterable, cap: int = DEFAULT_CLOSURE_CAP) -> Subgroup:
    sub = Subgroup(G, S, cap)
    sub._closure()
    return sub


def membership(G: Group, sub: Subgroup, x) -> bool:
    if sub.group != G:
        raise MalformedElementError("subgroup belongs to a different group")
    return x in sub


def subgroup_order(G: Group, S: Iterable, cap: int = DEFAULT_CLOSURE_CAP) -> int:
    return Subgroup(G, S, cap).order
