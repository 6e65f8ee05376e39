"""Desk-scale lab for order-finding attacks on group homomorphic encryption."""

from .groups import (BitVector, CyclicProduct, DirectProduct, Group, MultMod, Subgroup,
                     closure, compose, inverse, membership, subgroup_order)
from .distributions import (GroupDistribution, covering_probability, exotic,
                            greedy_covering_generators, uniform)
from .genset import algorithm1, algorithm2, compute_N
from .oracle import ExactOracle, NoisyOracle, QuantumCyclicOracle, quantum_order_finding
from .schemes import estar_wrap, fact1_check, goldwasser_micali, toy_elgamal
from .games import indcpa_experiment, reduce_smp_to_indcpa, smp_experiment, smp_from_scheme
from .attacks import attack_arbitrary, attack_uniform, attack_with_generators

__version__ = "0.1.0"
