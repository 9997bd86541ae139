"""Normal-form arithmetic A^a B^b C^c for the p = 2 families.

The collector is derived from a dense oracle: exponent ranges and the
fusion of B^b_mod and C^c_mod into powers of A are read off the group,
while the moves past C follow from the defining relations::

    B A = A B C^-1
    C^c A^a = A^(a * alpha^-c) C^c
    C^c B^b = B^(b * alpha^c) C^c
"""
import logging
from typing import NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from mcdw.core.group import IDENTITY, DenseGroup, abc_factorization, center, powers
from mcdw.models.params import FamilyParams

logger = logging.getLogger(__name__)

DEFAULT_SAMPLES = 10 ** 5


class CollectorError(RuntimeError):
    """Raised when a derived collector disagrees with its oracle."""


class ExpTriple(NamedTuple):
    a: int
    b: int
    c: int


IDENTITY_TRIPLE = ExpTriple(0, 0, 0)
Factor = Tuple[Union[str, ExpTriple, Sequence], int]


class Collector:
    """Exponent arithmetic on triples (a, b, c) standing for A^a B^b C^c."""

    def __init__(self, params: FamilyParams, oracle: DenseGroup):
        self.params = params
        self.alpha = params.alpha
        A, B = oracle.generators[:2]
        C = oracle.commutator(A, B)
        self.generators = (A, B, C)
        factorization = abc_factorization(oracle, A, B, C)
        if not factorization.bijective:
            raise CollectorError(
                f"A^a B^b C^c does not cover {oracle.name} bijectively: ranges "
                f"({factorization.a_mod}, {factorization.b_mod}, {factorization.c_mod})"
            )
        self.a_mod = factorization.a_mod
        self.b_mod = factorization.b_mod
        self.c_mod = factorization.c_mod
        self.ord_b = oracle.element_order(B)
        self.grid = factorization.grid
        self.triples = factorization.triples()

        central = center(oracle)
        a_powers = powers(oracle, A, self.a_mod)
        a_index = {int(g): k for k, g in enumerate(a_powers)}
        fused_b = oracle.power(B, self.b_mod)
        fused_c = oracle.power(C, self.c_mod)
        for label, element in (("B", fused_b), ("C", fused_c)):
            if element not in a_index or element not in central:
                raise CollectorError(f"{label}^{label.lower()}_mod is not a central power of A")
        self.fuse_b = a_index[fused_b]
        self.fuse_c = a_index[fused_c]

        span = 2 * self.c_mod
        inverse_alpha = pow(self.alpha, -1, self.a_mod)
        self.alpha_a = np.array([pow(inverse_alpha, k, self.a_mod) for k in range(span)], dtype=np.int64)
        self.alpha_b = np.array([pow(self.alpha, k, self.ord_b) for k in range(span)], dtype=np.int64)

        b_powers = powers(oracle, B, self.b_mod)
        swapped = oracle.product_many(b_powers[:, None], a_powers[None, :])
        self.swap = self.triples[swapped]
        logger.info("Derived collector for %s: ranges (%s, %s, %s), B^%s = A^%s, C^%s = A^%s",
                    params.label(), self.a_mod, self.b_mod, self.c_mod,
                    self.b_mod, self.fuse_b, self.c_mod, self.fuse_c)

    @property
    def order(self) -> int:
        return self.a_mod * self.b_mod * self.c_mod

    def mul_many(self, left: np.ndarray, right: np.ndarray) -> np.ndarray:
        """Vectorized product of triple arrays of shape (..., 3)."""
        left = np.asarray(left, dtype=np.int64)
        right = np.asarray(right, dtype=np.int64)
        a1, b1, c1 = left[..., 0], left[..., 1], left[..., 2]
        a2, b2, c2 = right[..., 0], right[..., 1], right[..., 2]
        moved = (a2 * self.alpha_a[c1]) % self.a_mod
        swapped = self.swap[b1, moved]
        x, y, z = swapped[..., 0], swapped[..., 1], swapped[..., 2]
        shift = z + c1
        b_total = y + (b2 * self.alpha_b[shift]) % self.ord_b
        c_total = shift + c2
        carry_b, b = np.divmod(b_total, self.b_mod)
        carry_c, c = np.divmod(c_total, self.c_mod)
        a = (a1 + x + self.fuse_b * carry_b + self.fuse_c * carry_c) % self.a_mod
        return np.stack([a, b, c], axis=-1)

    def nf_mul(self, t1: Sequence[int], t2: Sequence[int]) -> ExpTriple:
        return ExpTriple(*(int(v) for v in self.mul_many(np.asarray(t1), np.asarray(t2))))

    def basic_power(self, letter: str, k: int) -> ExpTriple:
        """Normal form of A^k, B^k or C^k for any integer k."""
        if letter == "A":
            return ExpTriple(k % self.a_mod, 0, 0)
        if letter == "B":
            carry, b = divmod(k, self.b_mod)
            return ExpTriple((self.fuse_b * carry) % self.a_mod, b, 0)
        if letter == "C":
            carry, c = divmod(k, self.c_mod)
            return ExpTriple((self.fuse_c * carry) % self.a_mod, 0, c)
        raise ValueError(f"unknown letter {letter!r}")

    def nf_inv(self, t: Sequence[int]) -> ExpTriple:
        a, b, c = t
        result = self.basic_power("C", -c)
        result = self.nf_mul(result, self.basic_power("B", -b))
        return self.nf_mul(result, self.basic_power("A", -a))

    def nf_pow(self, t: Sequence[int], k: int) -> ExpTriple:
        if k < 0:
            t, k = self.nf_inv(t), -k
        result, base = IDENTITY_TRIPLE, ExpTriple(*t)
        while k:
            if k & 1:
                result = self.nf_mul(result, base)
            k >>= 1
            if k:
                base = self.nf_mul(base, base)
        return result

    def nf_comm(self, t1: Sequence[int], t2: Sequence[int]) -> ExpTriple:
        """[t1, t2] = t1^-1 t2^-1 t1 t2."""
        left = self.nf_mul(self.nf_inv(t1), self.nf_inv(t2))
        return self.nf_mul(left, self.nf_mul(t1, t2))

    def nf_conj(self, t: Sequence[int], by: Sequence[int]) -> ExpTriple:
        """t^by = by^-1 t by."""
        return self.nf_mul(self.nf_mul(self.nf_inv(by), t), by)

    def eval_word_nf(self, factors: Sequence[Factor]) -> ExpTriple:
        """Evaluate a product of powers left to right.

        Each factor is ``(base, exponent)`` with base one of ``"A"``,
        ``"B"``, ``"C"``, a triple, or a nested factor sequence.
        """
        result = IDENTITY_TRIPLE
        for base, exponent in factors:
            if isinstance(base, str):
                value = self.basic_power(base, exponent)
            elif isinstance(base, tuple) and len(base) == 3 and all(isinstance(v, (int, np.integer)) for v in base):
                value = self.nf_pow(base, exponent)
            else:
                value = self.nf_pow(self.eval_word_nf(base), exponent)
            result = self.nf_mul(result, value)
        return result

    def to_triple(self, g: int) -> ExpTriple:
        return ExpTriple(*(int(v) for v in self.triples[g]))

    def to_id(self, t: Sequence[int]) -> int:
        a, b, c = t
        return int(self.grid[a, b, c])

    def validate(self, oracle: DenseGroup, samples: int = DEFAULT_SAMPLES, seed: int = 0,
                 exhaustive_limit: Optional[int] = None) -> int:
        """Compare products against the oracle; return the number of mismatches.

        Every pair is checked when ``order**2 <= exhaustive_limit``.
        """
        n = oracle.order
        if exhaustive_limit is not None and n * n <= exhaustive_limit:
            left = np.repeat(np.arange(n), n)
            right = np.tile(np.arange(n), n)
        else:
            rng = np.random.default_rng(seed)
            left = rng.integers(0, n, size=samples)
            right = rng.integers(0, n, size=samples)
        mismatches = 0
        chunk = 1 << 16
        for start in range(0, len(left), chunk):
            g, h = left[start:start + chunk], right[start:start + chunk]
            expected = self.triples[oracle.product_many(g, h)]
            got = self.mul_many(self.triples[g], self.triples[h])
            mismatches += int((expected != got).any(axis=1).sum())
        logger.info("Collector check on %s: %s pairs, %s mismatches", oracle.name, len(left), mismatches)
        return mismatches


def derive_collector(
    params: FamilyParams,
    oracle: DenseGroup,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
    exhaustive_limit: Optional[int] = None,
) -> Collector:
    """Derive and validate a collector for J2 at ``params``.

    Raises:
        CollectorError: If the ranges, fusion or sampled products disagree with the oracle
    """
    if params.p != 2:
        raise CollectorError("collectors are derived for the p = 2 families only")
    collector = Collector(params, oracle)
    if collector.to_id(IDENTITY_TRIPLE) != IDENTITY:
        raise CollectorError("identity does not map to (0, 0, 0)")
    mismatches = collector.validate(oracle, samples=samples, seed=seed, exhaustive_limit=exhaustive_limit)
    if mismatches:
        raise CollectorError(f"collector disagrees with the oracle on {mismatches} products")
    return collector
