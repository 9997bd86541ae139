"""Todd-Coxeter coset enumeration over two-generator presentations.

Columns are the letters 0=x, 1=x^-1, 2=y, 3=y^-1, so the inverse of a
letter ``l`` is ``l ^ 1``. The working table is a flat ``array('i')`` with
``-1`` for undefined entries; a completed table is standardized into an
``(n, 4)`` numpy array whose row 0 is the subgroup coset.
"""
import logging
from abc import ABC, abstractmethod
from array import array
from collections import deque
from enum import Enum
from typing import Dict, List, Optional, Sequence, Type

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components
from sympy.combinatorics import Permutation, PermutationGroup

from mcdw.core.presentations import X, Presentation, Word, letters

logger = logging.getLogger(__name__)

DEFAULT_COSET_LIMIT = 2 ** 22
DEFAULT_DEDUCTION_LIMIT = 50000
WIDTH = 4
GENERATOR_COLUMNS = (0, 2)


class EnumerationError(RuntimeError):
    """Raised when an enumeration cannot produce a valid coset table."""


class CosetLimitError(EnumerationError):
    """Raised when the coset limit is reached; ``table`` can be resumed with a larger limit."""

    def __init__(self, message: str, table: "CosetTable"):
        super().__init__(message)
        self.table = table


class LabelError(EnumerationError):
    """Raised when the Schreier labels over a cyclic subgroup are not determined."""


class UnsupportedStrategyError(ValueError):
    """Raised when an unknown enumeration strategy is requested."""


class _SpaceExhausted(Exception):
    pass


class TableStatus(str, Enum):
    INCOMPLETE = "incomplete"
    COMPLETE = "complete"
    COLLAPSED = "collapsed"


class CosetTable:
    """Coset table with union-find coincidence handling."""

    def __init__(
        self,
        relators: Sequence[Sequence[int]],
        subgroup: Sequence[Sequence[int]] = (),
        limit: int = DEFAULT_COSET_LIMIT,
        deduction_limit: int = DEFAULT_DEDUCTION_LIMIT,
    ):
        self.relators = [list(r) for r in relators if r]
        self.subgroup = [list(w) for w in subgroup if w]
        self.limit = limit
        self.deduction_limit = deduction_limit
        self.table = array("i", [-1] * WIDTH)
        self.p = array("i", [0])
        self.dead = 0
        self.alpha = 0
        self.started = False
        self.record = False
        self.deductions: List[tuple] = []
        self.rows: Optional[np.ndarray] = None
        self.status = TableStatus.INCOMPLETE

    @property
    def n(self) -> int:
        return len(self.p)

    @property
    def live(self) -> int:
        return self.n - self.dead

    @property
    def index(self) -> int:
        if self.rows is None:
            raise EnumerationError("coset table is not complete")
        return len(self.rows)

    def define(self, alpha: int, letter: int) -> int:
        if self.live >= self.limit:
            raise _SpaceExhausted()
        beta = self.n
        self.table.extend((-1, -1, -1, -1))
        self.p.append(beta)
        self.table[WIDTH * alpha + letter] = beta
        self.table[WIDTH * beta + (letter ^ 1)] = alpha
        if self.record:
            self.deductions.append((alpha, letter))
        return beta

    def scan(self, alpha: int, word: Sequence[int], fill: bool = False) -> None:
        """Trace ``word`` from ``alpha`` in both directions, deducing or filling gaps."""
        table = self.table
        f = b = alpha
        i, j = 0, len(word) - 1
        while True:
            while i <= j and table[WIDTH * f + word[i]] >= 0:
                f = table[WIDTH * f + word[i]]
                i += 1
            if i > j:
                if f != b:
                    self.coincidence(f, b)
                return
            while j >= i and table[WIDTH * b + (word[j] ^ 1)] >= 0:
                b = table[WIDTH * b + (word[j] ^ 1)]
                j -= 1
            if j < i:
                self.coincidence(f, b)
                return
            if j == i:
                table[WIDTH * f + word[i]] = b
                table[WIDTH * b + (word[i] ^ 1)] = f
                if self.record:
                    self.deductions.append((f, word[i]))
                return
            if not fill:
                return
            self.define(f, word[i])

    def rep(self, k: int) -> int:
        p = self.p
        root = k
        while p[root] != root:
            root = p[root]
        while p[k] != root:
            p[k], k = root, p[k]
        return root

    def merge(self, k: int, lam: int, queue: deque) -> None:
        phi, psi = self.rep(k), self.rep(lam)
        if phi != psi:
            mu, v = min(phi, psi), max(phi, psi)
            self.p[v] = mu
            self.dead += 1
            queue.append(v)

    def coincidence(self, alpha: int, beta: int) -> None:
        table = self.table
        queue: deque = deque()
        self.merge(alpha, beta, queue)
        while queue:
            gamma = queue.popleft()
            for x in range(WIDTH):
                delta = table[WIDTH * gamma + x]
                if delta < 0:
                    continue
                table[WIDTH * delta + (x ^ 1)] = -1
                mu, nu = self.rep(gamma), self.rep(delta)
                if table[WIDTH * mu + x] >= 0:
                    self.merge(nu, table[WIDTH * mu + x], queue)
                elif table[WIDTH * nu + (x ^ 1)] >= 0:
                    self.merge(mu, table[WIDTH * nu + (x ^ 1)], queue)
                else:
                    table[WIDTH * mu + x] = nu
                    table[WIDTH * nu + (x ^ 1)] = mu
                    if self.record:
                        self.deductions.append((mu, x))

    def look_ahead(self) -> int:
        """Scan every live coset under every relator without defining; return cosets killed."""
        before = self.dead
        p = self.p
        for beta in range(self.n):
            if p[beta] != beta:
                continue
            for word in self.relators:
                self.scan(beta, word)
                if p[beta] != beta:
                    break
        killed = self.dead - before
        logger.debug("Lookahead killed %s cosets (%s live)", killed, self.live)
        return killed

    def is_closed(self) -> bool:
        p, table = self.p, self.table
        for alpha in range(self.n):
            if p[alpha] == alpha:
                for x in range(WIDTH):
                    if table[WIDTH * alpha + x] < 0:
                        return False
        return True

    def standardize(self) -> np.ndarray:
        """Renumber live cosets breadth-first from coset 0 along x and y."""
        table = self.table
        mapping = array("i", [-1] * self.n)
        mapping[0] = 0
        order = [0]
        k = 0
        while k < len(order):
            coset = order[k]
            k += 1
            for x in GENERATOR_COLUMNS:
                target = self.rep(table[WIDTH * coset + x])
                if mapping[target] < 0:
                    mapping[target] = len(order)
                    order.append(target)
        reps = np.array([self.rep(i) for i in range(self.n)], dtype=np.int64)
        relabel = np.asarray(mapping, dtype=np.int64)[reps]
        raw = np.frombuffer(table, dtype=np.int32).reshape(-1, WIDTH).astype(np.int64)
        rows = relabel[reps[raw[np.asarray(order, dtype=np.int64)]]]
        self.rows = rows
        self.status = TableStatus.COLLAPSED if len(rows) == 1 else TableStatus.COMPLETE
        return rows

    def verify(self) -> bool:
        """Check inverse columns and that every relator closes at every coset."""
        rows = self.rows
        if rows is None or (rows < 0).any():
            return False
        ids = np.arange(len(rows))
        for x in range(WIDTH):
            if not np.array_equal(rows[rows[:, x], x ^ 1], ids):
                return False
        for word in self.relators:
            current = ids
            for letter in word:
                current = rows[current, letter]
            if not np.array_equal(current, ids):
                return False
        for word in self.subgroup:
            coset = 0
            for letter in word:
                coset = rows[coset, letter]
            if coset != 0:
                return False
        return True


class EnumerationStrategy(ABC):
    """Definition strategy for filling a coset table."""

    name = ""

    @abstractmethod
    def run(self, table: CosetTable) -> None:
        """Drive ``table`` to a closed state, resuming from ``table.alpha``.

        Raises:
            CosetLimitError: If the live coset count reaches ``table.limit``
        """

    def _make_room(self, table: CosetTable) -> None:
        if table.look_ahead() == 0 or table.live >= table.limit:
            raise CosetLimitError(
                f"coset enumeration reached the limit of {table.limit} cosets "
                f"({table.live} live); resume with a larger limit",
                table,
            )


class HLTStrategy(EnumerationStrategy):
    """Relator-based definitions with lookahead when space runs out."""

    name = "hlt"

    def run(self, table: CosetTable) -> None:
        table.record = False
        p = table.p
        while True:
            try:
                if not table.started:
                    for word in table.subgroup:
                        table.scan(0, word, fill=True)
                    table.started = True
                while table.alpha < table.n:
                    alpha = table.alpha
                    if p[alpha] == alpha:
                        for word in table.relators:
                            table.scan(alpha, word, fill=True)
                            if p[alpha] != alpha:
                                break
                        if p[alpha] == alpha:
                            for x in range(WIDTH):
                                if table.table[WIDTH * alpha + x] < 0:
                                    table.define(alpha, x)
                    table.alpha += 1
                return
            except _SpaceExhausted:
                self._make_room(table)


class FelschStrategy(EnumerationStrategy):
    """Coset-table based definitions with deduction processing."""

    name = "felsch"

    def run(self, table: CosetTable) -> None:
        table.record = True
        by_letter = self._conjugates_by_letter(table.relators)
        p = table.p
        while True:
            try:
                if not table.started:
                    for word in table.subgroup:
                        table.scan(0, word, fill=True)
                    table.started = True
                self._process_deductions(table, by_letter)
                while table.alpha < table.n:
                    alpha = table.alpha
                    for x in range(WIDTH):
                        if p[alpha] != alpha:
                            break
                        if table.table[WIDTH * alpha + x] < 0:
                            table.define(alpha, x)
                            self._process_deductions(table, by_letter)
                    table.alpha += 1
                self._close(table)
                return
            except _SpaceExhausted:
                table.deductions.clear()
                self._make_room(table)

    @staticmethod
    def _conjugates_by_letter(relators: List[List[int]]) -> List[List[List[int]]]:
        seen = set()
        by_letter: List[List[List[int]]] = [[] for _ in range(WIDTH)]
        for word in relators:
            inverse = [letter ^ 1 for letter in reversed(word)]
            for base in (word, inverse):
                for shift in range(len(base)):
                    rotated = tuple(base[shift:] + base[:shift])
                    if rotated not in seen:
                        seen.add(rotated)
                        by_letter[rotated[0]].append(list(rotated))
        return by_letter

    @staticmethod
    def _process_deductions(table: CosetTable, by_letter: List[List[List[int]]]) -> None:
        p = table.p
        stack = table.deductions
        while stack:
            if len(stack) >= table.deduction_limit:
                stack.clear()
                table.look_ahead()
                stack.clear()
                continue
            alpha, x = stack.pop()
            if p[alpha] == alpha:
                for word in by_letter[x]:
                    table.scan(alpha, word)
                    if p[alpha] != alpha:
                        break
            beta = table.table[WIDTH * alpha + x]
            if beta >= 0 and p[beta] == beta:
                for word in by_letter[x ^ 1]:
                    table.scan(beta, word)
                    if p[beta] != beta:
                        break

    @staticmethod
    def _close(table: CosetTable) -> None:
        # dropped deductions can leave relators unchecked; rescan until stable
        table.record = False
        while table.look_ahead():
            pass
        table.deductions.clear()


STRATEGIES: Dict[str, Type[EnumerationStrategy]] = {
    "hlt": HLTStrategy,
    "felsch": FelschStrategy,
}


def get_strategy(name: str) -> EnumerationStrategy:
    """Get an enumeration strategy by name.

    Raises:
        UnsupportedStrategyError: If the strategy is not registered
    """
    key = name.lower()
    if key not in STRATEGIES:
        raise UnsupportedStrategyError(
            f"Unsupported strategy: '{name}'. Supported strategies: {', '.join(STRATEGIES)}"
        )
    return STRATEGIES[key]()


def list_strategies() -> List[str]:
    return list(STRATEGIES)


def coset_enumerate(
    pres: Presentation,
    subgroup: Sequence[Word] = (),
    limit: int = DEFAULT_COSET_LIMIT,
    strategy: str = "hlt",
    deduction_limit: int = DEFAULT_DEDUCTION_LIMIT,
    draft: Optional[CosetTable] = None,
) -> CosetTable:
    """Enumerate the cosets of ``<subgroup>`` in the group presented by ``pres``.

    Args:
        pres: Two-generator presentation of a finite group
        subgroup: Words generating the subgroup (empty for the trivial subgroup)
        limit: Maximum number of live cosets
        strategy: ``hlt`` or ``felsch``
        deduction_limit: Felsch deduction stack size that triggers a lookahead
        draft: Table from a previous :class:`CosetLimitError` to resume

    Returns:
        Complete, standardized CosetTable

    Raises:
        CosetLimitError: If the limit is reached (carries the resumable table)
        EnumerationError: If the finished table fails verification
    """
    runner = get_strategy(strategy)
    if draft is not None:
        table = draft
        table.limit = limit
    else:
        table = CosetTable(
            [letters(r) for r in pres.relators],
            [letters(w) for w in subgroup],
            limit=limit,
            deduction_limit=deduction_limit,
        )
    logger.info("Enumerating %s over %s subgroup words (%s)", pres.name or "presentation",
                len(table.subgroup), runner.name)
    runner.run(table)
    if not table.is_closed():
        raise EnumerationError("enumeration finished with undefined entries")
    table.standardize()
    if not table.verify():
        raise EnumerationError(f"coset table for {pres.name} failed relator verification")
    logger.info("Enumeration of %s complete: index %s (%s cosets defined)",
                pres.name or "presentation", table.index, table.n)
    return table


def order(pres: Presentation, **kwargs) -> int:
    """Order of the presented group: the index of the trivial subgroup."""
    return coset_enumerate(pres, (), **kwargs).index


class PermGroupGens(BaseModel):
    """Permutation images of x and y acting on cosets (``images[g][c] = c.g``)."""

    degree: int
    images: List[np.ndarray]
    faithful: bool
    group_order: Optional[int] = None

    model_config = ConfigDict(arbitrary_types_allowed=True)

    @property
    def regular(self) -> bool:
        return self.faithful and self.group_order == self.degree

    @classmethod
    def from_table(cls, table: CosetTable, faithful: bool, group_order: Optional[int] = None) -> "PermGroupGens":
        rows = table.rows
        return cls(
            degree=len(rows),
            images=[np.ascontiguousarray(rows[:, x]) for x in GENERATOR_COLUMNS],
            faithful=faithful,
            group_order=group_order,
        )


def closure_order(images: Sequence[np.ndarray]) -> int:
    """Order of the permutation group generated by ``images``."""
    return int(PermutationGroup([Permutation(list(map(int, image))) for image in images]).order())


def faithful_action(
    pres: Presentation,
    subgroup: Optional[Word] = None,
    group_order: Optional[int] = None,
    **kwargs,
) -> PermGroupGens:
    """Action on the cosets of ``<subgroup>``, falling back to the regular action.

    ``group_order`` may be supplied when already known; otherwise it is
    computed by enumerating over the trivial subgroup.
    """
    regular_table: Optional[CosetTable] = None
    if group_order is None:
        regular_table = coset_enumerate(pres, (), **kwargs)
        group_order = regular_table.index
    if subgroup is not None:
        table = coset_enumerate(pres, [subgroup], **kwargs)
        gens = PermGroupGens.from_table(table, faithful=False, group_order=group_order)
        size = closure_order(gens.images)
        if size == group_order:
            gens.faithful = True
            return gens
        logger.warning("Action of %s on %s cosets has image of order %s, not %s; using the regular action",
                       pres.name, table.index, size, group_order)
    if regular_table is None:
        regular_table = coset_enumerate(pres, (), **kwargs)
    return PermGroupGens.from_table(regular_table, faithful=True, group_order=group_order)


def _spanning_tree(rows: np.ndarray) -> np.ndarray:
    """Mask over label variables ``2*c + g`` that are edges of a BFS tree from coset 0."""
    count = len(rows)
    seen = np.zeros(count, dtype=bool)
    seen[0] = True
    tree = np.zeros(2 * count, dtype=bool)
    queue = deque([0])
    while queue:
        coset = queue.popleft()
        for g, column in enumerate(GENERATOR_COLUMNS):
            target = int(rows[coset, column])
            if not seen[target]:
                seen[target] = True
                tree[2 * coset + g] = True
                queue.append(target)
    if not seen.all():
        raise LabelError("coset graph is not connected")
    return tree


def _label_equations(rows: np.ndarray, relators: Sequence[List[int]], modulus: int) -> np.ndarray:
    """One linear equation over Z/modulus per relator and coset: the labels along the walk sum to 0."""
    count = len(rows)
    ids = np.arange(count)
    blocks = []
    for word in relators:
        block = np.zeros((count, 2 * count), dtype=np.int64)
        current = ids
        for letter in word:
            target = rows[current, letter]
            g = letter >> 1
            if letter & 1:
                block[ids, 2 * target + g] -= 1
            else:
                block[ids, 2 * current + g] += 1
            current = target
        blocks.append(block % modulus)
    return np.unique(np.concatenate(blocks), axis=0)


def _solve_mod(matrix: np.ndarray, rhs: np.ndarray, modulus: int) -> Optional[np.ndarray]:
    """Unique solution of ``matrix @ v = rhs`` over Z/modulus, or None.

    Only unit pivots are used, so a solvable system whose columns lack a
    unit entry is reported as None as well.
    """
    system = np.concatenate([matrix, rhs[:, None]], axis=1) % modulus
    system = system[system.any(axis=1)]
    n_rows, n_cols = system.shape[0], system.shape[1] - 1
    pivot = 0
    for col in range(n_cols):
        if pivot == n_rows:
            return None
        candidates = pivot + np.flatnonzero(np.gcd(system[pivot:, col], modulus) == 1)
        if candidates.size == 0:
            return None
        row = int(candidates[0])
        if row != pivot:
            system[[pivot, row]] = system[[row, pivot]]
        inverse = pow(int(system[pivot, col]), -1, modulus)
        system[pivot, col:] = system[pivot, col:] * inverse % modulus
        others = np.flatnonzero(system[:, col])
        others = others[others != pivot]
        if others.size:
            system[others, col:] = (
                system[others, col:] - np.outer(system[others, col], system[pivot, col:])
            ) % modulus
        pivot += 1
    if system[pivot:, -1].any():
        return None
    return system[:n_cols, -1].copy()


def regular_action(pres: Presentation, exponent: int, **kwargs) -> PermGroupGens:
    """Regular action rebuilt from the cosets of ``<x>``, where ``x^exponent = 1``.

    The transversal follows a BFS tree of the coset table, and the label
    ``a`` with ``t_c s = x^a t_{c.s}`` is solved modulo ``exponent`` from
    the relators. Group elements ``x^k t_c`` become points ``k*n + c``.
    A solution that satisfies every relator and acts transitively has
    ``n * exponent`` points, which bounds the group order from below, so
    the action is regular.

    Raises:
        LabelError: If the labels are not determined or the action fails the checks
    """
    table = coset_enumerate(pres, [X], **kwargs)
    rows = table.rows.astype(np.int64)
    count = len(rows)
    relators = [letters(r) for r in pres.relators]
    tree = _spanning_tree(rows)
    equations = _label_equations(rows, relators, exponent)

    # t_0 x = x t_0 on the subgroup coset itself
    fixed = tree.copy()
    fixed[0] = True
    rhs = (-equations[:, 0]) % exponent
    free = np.flatnonzero(~fixed)
    solution = _solve_mod(equations[:, free], rhs, exponent)
    if solution is None:
        raise LabelError(f"labels of {pres.name} over <x> are not determined modulo {exponent}")
    labels = np.zeros(2 * count, dtype=np.int64)
    labels[0] = 1
    labels[free] = solution

    cosets = np.tile(np.arange(count), exponent)
    powers = np.repeat(np.arange(exponent), count)
    images = [
        ((powers + labels[2 * cosets + g]) % exponent) * count + rows[cosets, column]
        for g, column in enumerate(GENERATOR_COLUMNS)
    ]
    degree = count * exponent
    moves = []
    for image in images:
        inverse = np.empty_like(image)
        inverse[image] = np.arange(degree)
        moves.extend([image, inverse])
    points = np.arange(degree)
    for word in relators:
        current = points
        for letter in word:
            current = moves[letter][current]
        if not np.array_equal(current, points):
            raise LabelError(f"rebuilt action of {pres.name} violates a relator")
    graph = csr_matrix((np.ones(2 * degree, dtype=np.int8),
                        (np.concatenate([points, points]), np.concatenate(images))),
                       shape=(degree, degree))
    components, _ = connected_components(graph, directed=True, connection="weak")
    if components != 1:
        raise LabelError(f"rebuilt action of {pres.name} has {components} orbits")
    logger.info("Rebuilt regular action of %s on %s points from %s cosets of <x>",
                pres.name or "presentation", degree, count)
    return PermGroupGens(degree=degree, images=images, faithful=True, group_order=degree)
