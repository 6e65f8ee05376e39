"""Toy group homomorphic encryption schemes.

A scheme exposes KeyGen/Enc/Dec with the randomness of Enc passed
explicitly, the plaintext group, the ciphertext supergroup, and an
enumeration of the randomness space (desk scale only). There is
deliberately no membership test for the set of valid ciphertexts.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Optional

from sympy import isprime, legendre_symbol, jacobi_symbol, n_order

from .errors import ParameterError
from .groups import CyclicProduct, DirectProduct, Group, MultMod

MAX_ELGAMAL_P = 2**10
MAX_GM_PRIME = 31


@dataclass(frozen=True)
class KeyPair:
    pk: Any
    sk: Any


class GroupHomomorphicScheme(ABC):
    @abstractmethod
    def keygen(self, rng) -> KeyPair: ...

    @abstractmethod
    def enc(self, pk, m, r) -> tuple: ...

    @abstractmethod
    def dec(self, sk, c) -> Optional[tuple]:
        """Plaintext, or ``None`` for inputs outside the valid ciphertexts."""

    @abstractmethod
    def plaintext_group(self, pk) -> Group: ...

    @abstractmethod
    def ciphertext_group(self, pk) -> Group: ...

    @abstractmethod
    def random_r(self, pk, rng): ...

    @abstractmethod
    def randomness(self, pk) -> list:
        """Every value of the randomness space."""

    @abstractmethod
    def to_json(self) -> dict: ...

    def encrypt(self, pk, m, rng) -> tuple:
        return self.enc(pk, m, self.random_r(pk, rng))

    def identity_message(self, pk) -> tuple:
        return self.plaintext_group(pk).identity

    def random_message(self, pk, rng, exclude=None) -> tuple:
        P = self.plaintext_group(pk)
        while True:
            m = P.sample(rng)
            if m != exclude:
                return m


@dataclass(frozen=True)
class ElGamalPK:
    p: int
    g: int
    h: int


class ToyElGamal(GroupHomomorphicScheme):
    """ElGamal over Z_p^*: Enc(m; r) = (g^r, m h^r), r in [0, p-1)."""

    def __init__(self, p: int, g: int):
        if not (isprime(p) and 2 < p <= MAX_ELGAMAL_P):
            raise ParameterError(f"p must be an odd prime <= {MAX_ELGAMAL_P}, got {p}")
        if math.gcd(g, p) != 1 or n_order(g, p) != p - 1:
            raise ParameterError(f"{g} does not generate Z_{p}^*")
        self.p, self.g = p, g
        self._P = MultMod(p)
        self._C = DirectProduct(self._P, self._P)

    def __repr__(self):
        return f"ToyElGamal(p={self.p}, g={self.g})"

    def keys_from_secret(self, x: int) -> KeyPair:
        return KeyPair(ElGamalPK(self.p, self.g, pow(self.g, x, self.p)), x)

    def keygen(self, rng):
        return self.keys_from_secret(rng.randrange(self.p - 1))

    def enc(self, pk, m, r):
        (m,) = self._P.element(m)
        return (pow(pk.g, r, pk.p), m * pow(pk.h, r, pk.p) % pk.p)

    def dec(self, sk, c):
        c1, c2 = self._C.element(c)
        return (c2 * pow(c1, -sk, self.p) % self.p,)

    def plaintext_group(self, pk):
        return self._P

    def ciphertext_group(self, pk):
        return self._C

    def random_r(self, pk, rng):
        return rng.randrange(self.p - 1)

    def randomness(self, pk):
        return list(range(self.p - 1))

    def to_json(self):
        return {"scheme": "elgamal", "p": self.p, "g": self.g}


@dataclass(frozen=True)
class GMPK:
    N: int
    x: int


class GoldwasserMicali(GroupHomomorphicScheme):
    """Bit encryption Enc(b; r) = x^b r^2 mod N with a pseudosquare x.

    Plaintexts form Z_2 (XOR). Ciphertexts live in Z_N^*; the valid ones are
    the Jacobi-symbol +1 elements, and anything else decrypts to ``None``.
    """

    def __init__(self, p: int, q: int):
        for v in (p, q):
            if not (isprime(v) and 2 < v <= MAX_GM_PRIME):
                raise ParameterError(f"GM primes must be odd primes <= {MAX_GM_PRIME}, got {v}")
        if p == q:
            raise ParameterError("GM primes must differ")
        self.p, self.q = p, q
        self.N = p * q
        self.x = self._pseudosquare()
        self._P = CyclicProduct((2,))
        self._C = MultMod(self.N)

    def __repr__(self):
        return f"GoldwasserMicali(p={self.p}, q={self.q})"

    def _pseudosquare(self) -> int:
        for x in range(2, self.N):
            if (math.gcd(x, self.N) == 1 and legendre_symbol(x, self.p) == -1
                    and legendre_symbol(x, self.q) == -1):
                return x
        raise ParameterError(f"no pseudosquare modulo {self.N}")

    def keygen(self, rng=None):
        return KeyPair(GMPK(self.N, self.x), (self.p, self.q))

    def enc(self, pk, m, r):
        (b,) = self._P.element(m)
        (r,) = self._C.element(r)
        return (pow(pk.x, b, pk.N) * r * r % pk.N,)

    def dec(self, sk, c):
        (c,) = self._C.element(c)
        if jacobi_symbol(c, self.N) != 1:
            return None
        p, _ = sk
        return (0,) if legendre_symbol(c % p, p) == 1 else (1,)

    def plaintext_group(self, pk):
        return self._P

    def ciphertext_group(self, pk):
        return self._C

    def random_r(self, pk, rng):
        return self._C.sample(rng)[0]

    def randomness(self, pk):
        return [r for (r,) in self._C.elements()]

    def to_json(self):
        return {"scheme": "gm", "p": self.p, "q": self.q}


class EStar(GroupHomomorphicScheme):
    """``base`` with one message made partly deterministic.

    Randomness is a pair ``(r, coin)``. Encrypting ``m_star`` with coin 0
    ignores ``r`` and uses the public ``r_star``; every other case is the
    base encryption. Decryption, groups and valid ciphertexts are unchanged.
    """

    def __init__(self, base: GroupHomomorphicScheme, m_star, r_star):
        self.base = base
        self.m_star_raw = m_star
        self.r_star = r_star

    def __repr__(self):
        return f"EStar({self.base!r}, m_star={self.m_star_raw}, r_star={self.r_star})"

    def m_star(self, pk):
        return self.base.plaintext_group(pk).element(self.m_star_raw)

    def keygen(self, rng):
        return self.base.keygen(rng)

    def enc(self, pk, m, r):
        r_base, coin = r
        if self.base.plaintext_group(pk).element(m) == self.m_star(pk) and coin == 0:
            return self.base.enc(pk, m, self.r_star)
        return self.base.enc(pk, m, r_base)

    def dec(self, sk, c):
        return self.base.dec(sk, c)

    def plaintext_group(self, pk):
        return self.base.plaintext_group(pk)

    def ciphertext_group(self, pk):
        return self.base.ciphertext_group(pk)

    def random_r(self, pk, rng):
        return (self.base.random_r(pk, rng), rng.getrandbits(1))

    def randomness(self, pk):
        return [(r, b) for r in self.base.randomness(pk) for b in (0, 1)]

    def to_json(self):
        m = self.m_star_raw
        return {"scheme": "estar", "base": self.base.to_json(),
                "m_star": list(m) if isinstance(m, tuple) else m, "r_star": self.r_star}


def toy_elgamal(p: int, g: int) -> ToyElGamal:
    return ToyElGamal(p, g)


def goldwasser_micali(p: int, q: int) -> GoldwasserMicali:
    return GoldwasserMicali(p, q)


def estar_wrap(base: GroupHomomorphicScheme, m_star, r_star, pk=None) -> EStar:
    if pk is not None and base.plaintext_group(pk).element(m_star) == base.identity_message(pk):
        raise ParameterError("m_star must not be the identity message")
    if pk is None and m_star in (1, (1,)) and isinstance(base, ToyElGamal):
        raise ParameterError("m_star must not be the identity message")
    if pk is None and m_star in (0, (0,)) and isinstance(base, GoldwasserMicali):
        raise ParameterError("m_star must not be the identity message")
    return EStar(base, m_star, r_star)


def scheme_from_json(spec: dict) -> GroupHomomorphicScheme:
    try:
        kind = spec["scheme"]
        if kind == "elgamal":
            return toy_elgamal(int(spec["p"]), int(spec["g"]))
        if kind == "gm":
            return goldwasser_micali(int(spec["p"]), int(spec["q"]))
        if kind == "estar":
            r_star = spec["r_star"]
            return estar_wrap(scheme_from_json(spec["base"]), spec["m_star"],
                              tuple(r_star) if isinstance(r_star, list) else r_star)
    except KeyError as e:
        raise ParameterError(f"scheme spec is missing field {e}") from None
    raise ParameterError(f"unknown scheme {spec.get('scheme')!r}")


# Structural verification ----------------------------------------------------

@dataclass
class Fact1Report:
    """Outcome of each coset-structure check, with a witness on failure."""

    checks: dict = field(default_factory=dict)

    def record(self, name: str, ok: bool, witness=None):
        self.checks[name] = {"passed": bool(ok), "witness": None if ok else witness}

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.checks.values())

    def failures(self) -> dict:
        return {k: v["witness"] for k, v in self.checks.items() if not v["passed"]}


def ciphertext_classes(scheme, keys: KeyPair) -> dict:
    """Map each message m to C_m, the valid ciphertexts decrypting to m."""
    pk, sk = keys.pk, keys.sk
    messages = scheme.plaintext_group(pk).elements()
    valid = {scheme.enc(pk, m, r) for m in messages for r in scheme.randomness(pk)}
    classes = {m: set() for m in messages}
    for c in sorted(valid):
        m = scheme.dec(sk, c)
        if m in classes:
            classes[m].add(c)
    return classes


def fact1_check(scheme, keys: KeyPair, rng=None, r=None) -> Fact1Report:
    """Exhaustively verify the coset structure of the valid ciphertexts.

    coset_structure: C_m = Enc(m; r) * C_1 for every m and every r.
    normal_subgroup: C_1 is a proper subgroup of C closed under conjugation.
    equal_sizes:     |C_m| = |C_1| for every m.
    transversal:     {Enc(m; r)} meets every coset of C_1 in C exactly once,
                     for the single r given, sampled from ``rng``, or the first.
    """
    pk = keys.pk
    G = scheme.ciphertext_group(pk)
    P = scheme.plaintext_group(pk)
    one = P.identity
    if r is None:
        r = scheme.random_r(pk, rng) if rng is not None else scheme.randomness(pk)[0]
    messages = P.elements()
    valid = {scheme.enc(pk, m, rr) for m in messages for rr in scheme.randomness(pk)}
    classes = ciphertext_classes(scheme, keys)
    c1 = classes[one]
    report = Fact1Report()

    witness = None
    for m in messages:
        for rr in scheme.randomness(pk):
            shifted = {G._op(scheme.enc(pk, m, rr), c) for c in c1}
            if shifted != classes[m]:
                diff = sorted(shifted ^ classes[m])
                witness = {"message": list(m), "r": _jsonable(rr), "element": list(diff[0])}
                break
        if witness is not None:
            break
    report.record("coset_structure", witness is None, witness)

    witness = None
    if G.identity not in c1:
        witness = {"missing_identity": list(G.identity)}
    elif not c1 < valid:
        witness = {"not_proper": len(c1)}
    else:
        for a in sorted(c1):
            if G._inv(a) not in c1:
                witness = {"no_inverse": list(a)}
                break
            bad = next((b for b in sorted(c1) if G._op(a, b) not in c1), None)
            if bad is not None:
                witness = {"not_closed": [list(a), list(bad)]}
                break
        if witness is None:
            for z in sorted(valid):
                zi = G._inv(z)
                bad = next((h for h in sorted(c1) if G._op(G._op(z, h), zi) not in c1), None)
                if bad is not None:
                    witness = {"not_normal": [list(z), list(bad)]}
                    break
    report.record("normal_subgroup", witness is None, witness)

    sizes = {m: len(classes[m]) for m in messages}
    odd = next((m for m in messages if sizes[m] != len(c1)), None)
    report.record("equal_sizes", odd is None,
                  None if odd is None else {"message": list(odd), "size": sizes[odd], "c1_size": len(c1)})

    witness = None
    cosets = {}
    for m in messages:
        rep = scheme.enc(pk, m, r)
        coset = frozenset(G._op(rep, c) for c in c1)
        if coset in cosets:
            witness = {"repeated_coset": [list(cosets[coset]), list(m)]}
            break
        cosets[coset] = m
    if witness is None:
        covered = set().union(*cosets)
        if covered != valid:
            witness = {"uncovered": list(sorted(valid - covered)[0])}
    report.record("transversal", witness is None, witness)
    return report


def _jsonable(r):
    return list(r) if isinstance(r, tuple) else r
