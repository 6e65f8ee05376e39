"""Order-finding oracles: |<S>| with failure probability at most eps.

Three realizations share one call shape, ``oracle.order(G, gens, rng)``:

* ``ExactOracle``          -- closure-based, never wrong.
* ``NoisyOracle(eps)``     -- returns twice the true order with probability eps.
* ``QuantumCyclicOracle``  -- phase estimation on a statevector, for a single
  generator of Z_n^* only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, reduce
from typing import Optional

import numpy as np
from sympy import primefactors

from .errors import ParameterError
from .groups import Group, MultMod, subgroup_order

MAX_MODULUS = 64
MAX_PRECISION = 12


def exact_order(G: Group, S) -> int:
    return subgroup_order(G, S)


def noisy_order(G: Group, S, eps: float, rng) -> int:
    _check_eps(eps)
    o = exact_order(G, S)
    # always draw, so streams stay aligned across eps values
    return 2 * o if rng.random() < eps else o


def _check_eps(eps):
    if not 0 <= eps < 1:
        raise ParameterError(f"eps must lie in [0, 1), got {eps}")


class ExactOracle:
    eps = 0.0

    def order(self, G: Group, gens, rng=None) -> int:
        return exact_order(G, gens)

    def __repr__(self):
        return "ExactOracle()"


class NoisyOracle:
    def __init__(self, eps: float):
        _check_eps(eps)
        self.eps = eps

    def order(self, G: Group, gens, rng) -> int:
        return noisy_order(G, gens, self.eps, rng)

    def __repr__(self):
        return f"NoisyOracle(eps={self.eps})"


def make_oracle(eps: float = 0.0):
    return ExactOracle() if eps == 0 else NoisyOracle(eps)


# Phase estimation -----------------------------------------------------------

@dataclass(frozen=True)
class ShotRecord:
    measured_phase_numerator: int
    precision_qubits: int
    decoded_order: Optional[int]


def continued_fraction_decode(y: int, Q: int, denom_bound: int) -> Optional[Fraction]:
    """Last convergent s/r of y/Q with r <= denom_bound."""
    if not 0 <= y < Q:
        raise ParameterError(f"need 0 <= y < Q, got y={y}, Q={Q}")
    best = None
    h_prev, h = 0, 1  # numerators h_{-2}, h_{-1}
    k_prev, k = 1, 0  # denominators
    num, den = y, Q
    while den:
        a, rem = divmod(num, den)
        h_prev, h = h, a * h + h_prev
        k_prev, k = k, a * k + k_prev
        if k > denom_bound:
            break
        best = Fraction(h, k)
        num, den = den, rem
    return best


def phase_distribution(a: int, n: int, t: int) -> np.ndarray:
    """Measurement distribution of the t control qubits in order finding for a mod n.

    Controls start in uniform superposition and the work register in |1>.
    Control qubit j applies the permutation w -> a^(2^j) w mod n; an inverse
    Fourier transform on the controls follows. Cached; the array is read-only.
    """
    _check_quantum_args(a, n, t)
    return _phase_distribution(a % n, n, t)


@lru_cache(maxsize=4096)
def _phase_distribution(a, n, t):
    Q = 2**t
    state = np.zeros((Q, n), dtype=complex)
    state[:, 1 % n] = 1 / math.sqrt(Q)
    perm = (a * np.arange(n)) % n
    rows = np.arange(Q)
    for j in range(t):
        on = ((rows >> j) & 1).astype(bool)
        block = state[on]
        moved = np.zeros_like(block)
        moved[:, perm] = block
        state[on] = moved
        perm = perm[perm]
    state = np.fft.fft(state, axis=0, norm="ortho")
    probs = (np.abs(state) ** 2).sum(axis=1)
    probs /= probs.sum()
    probs.flags.writeable = False
    return probs


def _check_quantum_args(a, n, t):
    if not 2 <= n <= MAX_MODULUS:
        raise ParameterError(f"n must lie in [2, {MAX_MODULUS}], got {n}")
    if not 1 <= t <= MAX_PRECISION:
        raise ParameterError(f"precision must lie in [1, {MAX_PRECISION}], got {t}")
    if math.gcd(a, n) != 1:
        raise ParameterError(f"gcd({a}, {n}) != 1")


def decode_shot(y: int, t: int, n: int) -> ShotRecord:
    frac = continued_fraction_decode(y, 2**t, n)
    return ShotRecord(y, t, frac.denominator if frac is not None else None)


def quantum_order_finding(a: int, n: int, t_precision: int, shots: int, rng):
    """Estimate the order of a mod n from sampled phase-estimation shots.

    The estimate is the lcm of the per-shot decoded orders, with any prime
    factor p removed while a^(L/p) = 1 mod n still holds. The pruning only
    discards factors contributed by off-peak shots; it cannot supply a
    factor no shot found. Returns ``(estimate, records)``.
    """
    if shots < 1:
        raise ParameterError("need at least one shot")
    a %= n
    probs = phase_distribution(a, n, t_precision)
    ys = rng.choices(range(2**t_precision), weights=probs.tolist(), k=shots)
    records = [decode_shot(y, t_precision, n) for y in ys]
    estimate = reduce(math.lcm, (r.decoded_order for r in records if r.decoded_order), 1)
    return prune_order_multiple(a, n, estimate), records


def prune_order_multiple(a: int, n: int, L: int) -> int:
    """Smallest divisor d of L with a^d = 1 mod n, when a^L = 1; else L."""
    if pow(a, L, n) != 1:
        return L
    for p in primefactors(L):
        while L % p == 0 and pow(a, L // p, n) == 1:
            L //= p
    return L


def shot_success_probability(a: int, n: int, t: int) -> float:
    """Exact probability that a single shot decodes to the true order."""
    true = MultMod(n).element_order(a % n)
    probs = phase_distribution(a % n, n, t)
    return float(sum(p for y, p in enumerate(probs) if decode_shot(y, t, n).decoded_order == true))


class QuantumCyclicOracle:
    """Order of <a> in Z_n^* from simulated phase estimation.

    Accepts one non-identity generator (repeats and the identity are
    ignored); anything else is outside the cyclic demo.
    """

    eps = None

    def __init__(self, precision: int = 8, shots: int = 20):
        self.precision = precision
        self.shots = shots

    def order(self, G: Group, gens, rng) -> int:
        if not isinstance(G, MultMod):
            raise ParameterError("quantum demo supports MultMod groups only")
        distinct = {G.element(g) for g in gens} - {G.identity}
        if not distinct:
            return 1
        if len(distinct) > 1:
            raise ParameterError("quantum demo supports a single generator only")
        (a,), = distinct
        return quantum_order_finding(a, G.n, self.precision, self.shots, rng)[0]

    def __repr__(self):
        return f"QuantumCyclicOracle(precision={self.precision}, shots={self.shots})"
