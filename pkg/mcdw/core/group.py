"""Dense engine over fully enumerated groups.

A :class:`DenseGroup` is given by right-multiplication tables
``tables[s][g] = id(g * s)`` for its generators, with id 0 the identity.
Element arithmetic walks a breadth-first spanning tree of the Cayley
graph on the jump set {s^(±2^k)}, which keeps every path short.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components
from sympy import factorint

from mcdw.core.enumerate import PermGroupGens
from mcdw.models.report import SeriesReport, SeriesTerm

logger = logging.getLogger(__name__)

DEFAULT_DENSE_CAP = 2 ** 19
IDENTITY = 0


class GroupError(ValueError):
    """Raised for invalid group-level requests."""


class DenseCapError(GroupError):
    """Raised when a group would exceed the configured dense-build cap."""


class NotNormalError(GroupError):
    """Raised when a subgroup required to be normal is not."""


class NotAbelianError(GroupError):
    """Raised when an abelian input is required."""


@dataclass(frozen=True)
class Subgroup:
    """Sorted element ids of a subgroup plus the generators it was built from."""

    elements: np.ndarray
    generators: Tuple[int, ...]
    mask: np.ndarray = field(repr=False, compare=False)

    @property
    def order(self) -> int:
        return int(len(self.elements))

    def __contains__(self, element: int) -> bool:
        return bool(self.mask[element])

    def __len__(self) -> int:
        return self.order

    def same_as(self, other: "Subgroup") -> bool:
        return np.array_equal(self.elements, other.elements)

    @classmethod
    def from_mask(cls, mask: np.ndarray, generators: Iterable[int] = ()) -> "Subgroup":
        return cls(np.flatnonzero(mask), tuple(int(g) for g in generators), mask)


class DenseGroup:
    """A finite group held as right-multiplication tables."""

    def __init__(
        self,
        tables: Sequence[np.ndarray],
        name: str = "",
        generator_names: Optional[Sequence[str]] = None,
    ):
        if not tables:
            raise GroupError("a dense group needs at least one generator table")
        self.tables = [np.asarray(t, dtype=np.intp) for t in tables]
        self.order = int(len(self.tables[0]))
        self.name = name
        self.generator_names = tuple(generator_names or "ABCDEFGH"[: len(self.tables)])
        self.projection: Optional[np.ndarray] = None
        self.embedding: Optional[np.ndarray] = None
        for table in self.tables:
            if len(table) != self.order or not np.array_equal(np.sort(table), np.arange(self.order)):
                raise GroupError(f"generator table of {name or 'group'} is not a permutation")
        self._build_jumps()
        self._build_tree()
        self._orders: Optional[np.ndarray] = None
        self._inverses: Optional[np.ndarray] = None
        self._conj_maps: Optional[List[np.ndarray]] = None
        logger.debug("Built dense group %s of order %s (tree depth %s, %s jumps)",
                     name, self.order, self.depth, len(self.jump_meta))

    def __repr__(self) -> str:
        return f"DenseGroup({self.name or '?'}, order={self.order})"

    @property
    def generators(self) -> List[int]:
        return [int(t[IDENTITY]) for t in self.tables]

    @property
    def rank(self) -> int:
        return len(self.tables)

    def _build_jumps(self) -> None:
        ids = np.arange(self.order)
        jumps: List[np.ndarray] = []
        meta: List[Tuple[int, int]] = []
        levels = max(1, self.order.bit_length())
        for index, table in enumerate(self.tables):
            power = table
            for k in range(levels):
                if np.array_equal(power, ids):
                    break
                inverse = np.empty_like(power)
                inverse[power] = ids
                jumps.extend([power, inverse])
                meta.extend([(index, 2 ** k), (index, -(2 ** k))])
                power = power[power]
        if not jumps:
            jumps = [ids, ids]
            meta = [(0, 0), (0, 0)]
        self.jumps = np.stack(jumps)
        self.jump_meta = meta

    def _build_tree(self) -> None:
        n_jumps = len(self.jump_meta)
        parent = np.full(self.order, -1, dtype=np.intp)
        via = np.full(self.order, -1, dtype=np.int16)
        parent[IDENTITY] = IDENTITY
        frontier = np.array([IDENTITY], dtype=np.intp)
        layers = [frontier]
        while frontier.size:
            reached = self.jumps[:, frontier].T.ravel()
            sources = np.repeat(frontier, n_jumps)
            jump_ids = np.tile(np.arange(n_jumps), frontier.size)
            fresh = parent[reached] < 0
            reached, sources, jump_ids = reached[fresh], sources[fresh], jump_ids[fresh]
            _, first = np.unique(reached, return_index=True)
            first.sort()
            frontier = reached[first]
            parent[frontier] = sources[first]
            via[frontier] = jump_ids[first]
            if frontier.size:
                layers.append(frontier)
        if (parent < 0).any():
            raise GroupError(f"generators of {self.name or 'group'} do not act transitively")
        depth = len(layers) - 1
        paths = np.full((max(depth, 1), self.order), -1, dtype=np.int16)
        for d, layer in enumerate(layers[1:], start=1):
            paths[:, layer] = paths[:, parent[layer]]
            paths[d - 1, layer] = via[layer]
        self.parent = parent
        self.via = via
        self.layers = layers
        self.depth = depth
        self.paths = paths

    # element arithmetic

    def path(self, g: int) -> List[int]:
        column = self.paths[:, g]
        return [int(j) for j in column[column >= 0]]

    def product(self, g: int, h: int) -> int:
        current = int(g)
        for j in self.path(h):
            current = int(self.jumps[j, current])
        return current

    def product_many(self, g, h) -> np.ndarray:
        """Elementwise products of two broadcastable id arrays."""
        g, h = np.broadcast_arrays(np.asarray(g, dtype=np.intp), np.asarray(h, dtype=np.intp))
        current = g.copy()
        for d in range(self.depth):
            steps = self.paths[d, h]
            active = steps >= 0
            if not active.any():
                break
            current[active] = self.jumps[steps[active], current[active]]
        return current

    def right_map(self, h: int) -> np.ndarray:
        """g -> g*h for every g."""
        current = np.arange(self.order)
        for j in self.path(h):
            current = self.jumps[j][current]
        return current

    def left_map(self, g: int) -> np.ndarray:
        """h -> g*h for every h, filled layer by layer along the spanning tree."""
        result = np.empty(self.order, dtype=np.intp)
        result[IDENTITY] = g
        for layer in self.layers[1:]:
            result[layer] = self.jumps[self.via[layer], result[self.parent[layer]]]
        return result

    def inverse_map(self) -> np.ndarray:
        if self._inverses is None:
            current = np.zeros(self.order, dtype=np.intp)
            for d in range(self.depth - 1, -1, -1):
                steps = self.paths[d]
                active = steps >= 0
                current[active] = self.jumps[steps[active] ^ 1, current[active]]
            self._inverses = current
        return self._inverses

    def inverse(self, g: int) -> int:
        current = IDENTITY
        for j in reversed(self.path(g)):
            current = int(self.jumps[j ^ 1, current])
        return current

    def power(self, g: int, k: int) -> int:
        if k < 0:
            g, k = self.inverse(g), -k
        result, base = IDENTITY, int(g)
        while k:
            if k & 1:
                result = self.product(result, base)
            k >>= 1
            if k:
                base = self.product(base, base)
        return result

    def power_many(self, g, k: int) -> np.ndarray:
        g = np.asarray(g, dtype=np.intp)
        if k < 0:
            g, k = self.inverse_map()[g], -k
        result = np.zeros_like(g)
        base = g.copy()
        while k:
            if k & 1:
                result = self.product_many(result, base)
            k >>= 1
            if k:
                base = self.product_many(base, base)
        return result

    def commutator(self, g: int, h: int) -> int:
        """[g,h] = g^-1 h^-1 g h."""
        return self.product(self.product(self.inverse(g), self.inverse(h)), self.product(g, h))

    def commutator_many(self, g, h) -> np.ndarray:
        inv = self.inverse_map()
        g, h = np.broadcast_arrays(np.asarray(g, dtype=np.intp), np.asarray(h, dtype=np.intp))
        return self.product_many(self.product_many(inv[g], inv[h]), self.product_many(g, h))

    def conjugate(self, g: int, a: int) -> int:
        """g^a = a^-1 g a."""
        return self.product(self.product(self.inverse(a), g), a)

    def conjugation_map(self, a: int) -> np.ndarray:
        """g -> a^-1 g a for every g."""
        return self.right_map(a)[self.left_map(self.inverse(a))]

    def conj_maps(self) -> List[np.ndarray]:
        if self._conj_maps is None:
            self._conj_maps = [self.conjugation_map(s) for s in self.generators]
        return self._conj_maps

    def element_order(self, g: int) -> int:
        result = self.order
        for p, e in factorint(self.order).items():
            for _ in range(e):
                if result % p == 0 and self.power(g, result // p) == IDENTITY:
                    result //= p
                else:
                    break
        return result

    def element_orders(self) -> np.ndarray:
        if self._orders is None:
            orders = np.ones(self.order, dtype=np.int64)
            ids = np.arange(self.order)
            for p, e in factorint(self.order).items():
                current = self.power_many(ids, self.order // p ** e)
                for _ in range(e):
                    nontrivial = current != IDENTITY
                    if not nontrivial.any():
                        break
                    orders[nontrivial] *= p
                    current = self.power_many(current, p)
            self._orders = orders
        return self._orders

    def word(self, g: int) -> List[Tuple[int, int]]:
        """Syllables (generator index, exponent) of a short word for ``g``."""
        syllables: List[Tuple[int, int]] = []
        for j in self.path(g):
            generator, exponent = self.jump_meta[j]
            if syllables and syllables[-1][0] == generator:
                merged = syllables[-1][1] + exponent
                syllables.pop()
                if merged:
                    syllables.append((generator, merged))
            else:
                syllables.append((generator, exponent))
        return syllables

    def format_element(self, g: int) -> str:
        parts = []
        for generator, exponent in self.word(g):
            name = self.generator_names[generator]
            parts.append(name if exponent == 1 else f"{name}^{exponent}")
        return " ".join(parts) or "1"

    def is_abelian(self) -> bool:
        gens = self.generators
        return all(self.product(a, b) == self.product(b, a) for a in gens for b in gens)


def _mask(order: int, elements) -> np.ndarray:
    mask = np.zeros(order, dtype=bool)
    mask[np.asarray(elements, dtype=np.intp)] = True
    return mask


def subgroup_closure(G: DenseGroup, seeds: Iterable[int], stop_above: Optional[int] = None) -> Subgroup:
    """Smallest subgroup containing ``seeds``.

    With ``stop_above`` the search stops early once the closure is larger,
    returning a partial element set.
    """
    seeds = sorted({int(s) for s in seeds} - {IDENTITY})
    maps = [G.right_map(s) for s in seeds]
    mask = np.zeros(G.order, dtype=bool)
    mask[IDENTITY] = True
    frontier = np.array([IDENTITY], dtype=np.intp)
    size = 1
    while frontier.size and maps:
        reached = np.unique(np.concatenate([m[frontier] for m in maps]))
        frontier = reached[~mask[reached]]
        mask[frontier] = True
        size += frontier.size
        if stop_above is not None and size > stop_above:
            break
    return Subgroup.from_mask(mask, seeds)


def trivial_subgroup(G: DenseGroup) -> Subgroup:
    return Subgroup.from_mask(_mask(G.order, [IDENTITY]))


def whole_group(G: DenseGroup) -> Subgroup:
    return Subgroup.from_mask(np.ones(G.order, dtype=bool), G.generators)


def generates(G: DenseGroup, elements: Iterable[int]) -> bool:
    """True when ``elements`` generate G, stopping once more than half is reached."""
    closure = subgroup_closure(G, elements, stop_above=G.order // 2)
    return closure.order > G.order // 2


def is_normal(G: DenseGroup, H: Subgroup) -> bool:
    return all(H.mask[conj[H.elements]].all() for conj in G.conj_maps())


def normal_closure(G: DenseGroup, seeds: Iterable[int]) -> Subgroup:
    gens = sorted({int(s) for s in seeds})
    H = subgroup_closure(G, gens)
    while True:
        missing = None
        for conj in G.conj_maps():
            images = conj[H.elements]
            outside = images[~H.mask[images]]
            if outside.size:
                missing = int(outside.min())
                break
        if missing is None:
            return H
        gens.append(missing)
        H = subgroup_closure(G, gens)


def minimal_generators(G: DenseGroup, H: Subgroup) -> List[int]:
    """Greedy generators for H, preferring elements of largest order."""
    orders = G.element_orders()
    gens: List[int] = []
    closure = trivial_subgroup(G)
    while closure.order < H.order:
        remaining = H.elements[~closure.mask[H.elements]]
        best = remaining[np.argmax(orders[remaining])]
        gens.append(int(best))
        closure = subgroup_closure(G, gens)
    return gens


def _canonical_labels(labels: np.ndarray) -> np.ndarray:
    _, first, inverse = np.unique(labels, return_index=True, return_inverse=True)
    rank = np.empty(len(first), dtype=np.intp)
    rank[np.argsort(first)] = np.arange(len(first))
    return rank[inverse.ravel()]


def coset_labels(G: DenseGroup, N: Subgroup) -> np.ndarray:
    """Label each element by its coset gN; the coset of the identity gets label 0."""
    gens = list(N.generators) or minimal_generators(G, N)
    if N.order == 1:
        return np.arange(G.order)
    rows = np.concatenate([np.arange(G.order)] * len(gens))
    cols = np.concatenate([G.right_map(n) for n in gens])
    graph = csr_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(G.order, G.order))
    _, labels = connected_components(graph, directed=True, connection="weak")
    return _canonical_labels(labels)


def center(G: DenseGroup) -> Subgroup:
    ids = np.arange(G.order)
    mask = np.ones(G.order, dtype=bool)
    for conj in G.conj_maps():
        mask &= conj == ids
    return Subgroup.from_mask(mask, minimal_generators(G, Subgroup.from_mask(mask)))


def upper_central_terms(G: DenseGroup) -> List[Subgroup]:
    """Z_1, Z_2, ... up to G.

    Raises:
        GroupError: If the series stalls below G (G not nilpotent)
    """
    terms: List[Subgroup] = []
    labels = np.arange(G.order)
    current = trivial_subgroup(G)
    while current.order < G.order:
        mask = np.ones(G.order, dtype=bool)
        for conj in G.conj_maps():
            mask &= labels[conj] == labels
        if mask.sum() == current.order:
            raise GroupError(f"{G.name or 'group'} is not nilpotent: series stalls at order {current.order}")
        term = Subgroup.from_mask(mask)
        term = Subgroup.from_mask(mask, minimal_generators(G, term))
        if not is_normal(G, term):
            raise GroupError(f"computed central term of order {term.order} is not normal")
        terms.append(term)
        labels = coset_labels(G, term)
        current = term
    return terms


def abelian_invariants(G: DenseGroup, H: Subgroup, N: Optional[Subgroup] = None) -> List[int]:
    """Elementary divisors of the abelian section H/N (N defaults to trivial).

    Raises:
        NotAbelianError: If H/N is not abelian
    """
    N = N if N is not None else trivial_subgroup(G)
    gens = list(H.generators) or minimal_generators(G, H)
    for i, a in enumerate(gens):
        for b in gens[i + 1:]:
            if G.commutator(a, b) not in N:
                raise NotAbelianError(f"section of order {H.order // N.order} is not abelian")
    index = H.order // N.order
    if index == 1:
        return []
    labels = coset_labels(G, N) if N.order > 1 else np.arange(G.order)
    _, first = np.unique(labels[H.elements], return_index=True)
    reps = H.elements[np.sort(first)]
    divisors: List[int] = []
    for p, e in sorted(factorint(index).items()):
        counts = [1]
        current = reps
        for _ in range(e):
            current = G.power_many(current, p)
            counts.append(int(N.mask[current].sum()))
            if counts[-1] == len(reps):
                break
        # rank_k = number of cyclic factors of order >= p^k
        ranks = []
        for k in range(1, len(counts)):
            ranks.append(round(np.log(counts[k] / counts[k - 1]) / np.log(p)))
        for k, r in enumerate(ranks, start=1):
            following = ranks[k] if k < len(ranks) else 0
            divisors.extend([p ** k] * (r - following))
    return sorted(divisors)


def derived_subgroup(G: DenseGroup) -> Subgroup:
    gens = G.generators
    seeds = [G.commutator(a, b) for i, a in enumerate(gens) for b in gens[i + 1:]]
    return normal_closure(G, seeds)


def nilpotency_class(G: DenseGroup) -> int:
    return len(upper_central_terms(G))


def upper_central_series(G: DenseGroup) -> SeriesReport:
    terms = upper_central_terms(G)
    report_terms = []
    previous = trivial_subgroup(G)
    for index, term in enumerate(terms, start=1):
        report_terms.append(
            SeriesTerm(
                index=index,
                order=term.order,
                generators=list(term.generators),
                factor_invariants=abelian_invariants(G, term, previous),
                abelian=is_abelian_subgroup(G, term),
            )
        )
        previous = term
    logger.info("Upper central series of %s: orders %s", G.name, [t.order for t in terms])
    return SeriesReport(terms=report_terms, nilpotency_class=len(terms))


def is_abelian_subgroup(G: DenseGroup, H: Subgroup) -> bool:
    gens = list(H.generators) or minimal_generators(G, H)
    return all(G.product(a, b) == G.product(b, a) for i, a in enumerate(gens) for b in gens[i + 1:])


def quotient(G: DenseGroup, N: Subgroup, name: str = "") -> DenseGroup:
    """G/N with inherited generator images; ``result.projection`` maps ids to cosets.

    Raises:
        NotNormalError: If N is not normal in G
    """
    if not is_normal(G, N):
        raise NotNormalError(f"subgroup of order {N.order} is not normal in {G.name}")
    labels = coset_labels(G, N)
    count = int(labels.max()) + 1
    _, first = np.unique(labels, return_index=True)
    reps = first  # first[label] is the smallest element of that coset
    tables = [labels[table[reps]] for table in G.tables]
    if count == 1:
        tables = [np.zeros(1, dtype=np.intp) for _ in G.tables]
    Q = DenseGroup(tables, name=name or f"{G.name}/N", generator_names=G.generator_names)
    Q.projection = labels
    logger.info("Quotient %s has order %s", Q.name, Q.order)
    return Q


def conjugacy_class_reps(G: DenseGroup) -> List[int]:
    """Smallest id of every conjugacy class, ascending."""
    maps = G.conj_maps()
    rows = np.concatenate([np.arange(G.order)] * len(maps))
    cols = np.concatenate(maps)
    graph = csr_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(G.order, G.order))
    _, labels = connected_components(graph, directed=True, connection="weak")
    _, first = np.unique(labels, return_index=True)
    return sorted(int(f) for f in first)


def class_sizes(G: DenseGroup) -> Dict[int, int]:
    maps = G.conj_maps()
    rows = np.concatenate([np.arange(G.order)] * len(maps))
    cols = np.concatenate(maps)
    graph = csr_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(G.order, G.order))
    _, labels = connected_components(graph, directed=True, connection="weak")
    _, first, counts = np.unique(labels, return_index=True, return_counts=True)
    return {int(f): int(c) for f, c in zip(first, counts)}


def subgroup_group(G: DenseGroup, gens: Sequence[int], name: str = "") -> DenseGroup:
    """The subgroup <gens> as a DenseGroup; ``result.embedding`` maps its ids into G."""
    H = subgroup_closure(G, gens)
    index = np.full(G.order, -1, dtype=np.intp)
    index[H.elements] = np.arange(H.order)
    tables = [index[G.right_map(g)[H.elements]] for g in gens]
    S = DenseGroup(tables, name=name or f"<{len(gens)} gens in {G.name}>",
                   generator_names=[chr(ord("a") + i) for i in range(len(gens))])
    S.embedding = H.elements
    return S


def powers(G: DenseGroup, g: int, count: int) -> np.ndarray:
    result = np.empty(count, dtype=np.intp)
    current = IDENTITY
    step = G.right_map(g)
    for k in range(count):
        result[k] = current
        current = step[current]
    return result


@dataclass
class ABCFactorization:
    """Ranges of the unique factorisation g = A^a B^b C^c."""

    a_mod: int
    b_mod: int
    c_mod: int
    grid: np.ndarray
    bijective: bool

    @property
    def size(self) -> int:
        return self.a_mod * self.b_mod * self.c_mod

    def triples(self) -> np.ndarray:
        """Inverse of ``grid``: row g holds (a, b, c) with A^a B^b C^c = g."""
        if not self.bijective:
            raise GroupError("factorisation is not bijective")
        result = np.empty((self.size, 3), dtype=np.intp)
        a, b, c = np.meshgrid(np.arange(self.a_mod), np.arange(self.b_mod), np.arange(self.c_mod), indexing="ij")
        flat = self.grid.ravel()
        result[flat, 0] = a.ravel()
        result[flat, 1] = b.ravel()
        result[flat, 2] = c.ravel()
        return result


def abc_factorization(G: DenseGroup, A: int, B: int, C: int) -> ABCFactorization:
    """Derive ranges a < ord(A), b < [<A,B>:<A>], c < minimal with C^c in A^*B^* and test bijectivity."""
    a_mod = G.element_order(A)
    a_powers = powers(G, A, a_mod)
    in_a = _mask(G.order, a_powers)
    step_b = G.right_map(B)
    b_mod, current = 1, B
    while not in_a[current]:
        current = int(step_b[current])
        b_mod += 1
    b_powers = powers(G, B, b_mod)
    ab = G.product_many(a_powers[:, None], b_powers[None, :])
    in_ab = _mask(G.order, ab.ravel())
    step_c = G.right_map(C)
    c_mod, current = 1, C
    while not in_ab[current] and c_mod <= G.order:
        current = int(step_c[current])
        c_mod += 1
    c_powers = powers(G, C, c_mod)
    grid = G.product_many(ab[:, :, None], c_powers[None, None, :])
    bijective = grid.size == G.order and len(np.unique(grid)) == G.order
    logger.debug("ABC factorisation of %s: ranges (%s, %s, %s), bijective=%s",
                 G.name, a_mod, b_mod, c_mod, bijective)
    return ABCFactorization(a_mod, b_mod, c_mod, grid, bijective)


def build(gens: PermGroupGens, cap: int = DEFAULT_DENSE_CAP, name: str = "") -> DenseGroup:
    """Dense group from faithful permutation generators.

    Raises:
        GroupError: If the generators are not faithful
        DenseCapError: If the closure exceeds ``cap``
    """
    if not gens.faithful:
        raise GroupError("build needs a faithful action")
    if gens.group_order is not None and gens.group_order > cap:
        raise DenseCapError(f"group order {gens.group_order} exceeds the dense cap {cap}")
    if gens.regular:
        return DenseGroup(gens.images, name=name)
    identity = np.arange(gens.degree, dtype=np.intp)
    elements = [identity]
    index = {identity.tobytes(): 0}
    tables: List[List[int]] = [[] for _ in gens.images]
    k = 0
    while k < len(elements):
        g = elements[k]
        for t, s in enumerate(gens.images):
            image = s[g]
            key = image.tobytes()
            if key not in index:
                if len(elements) >= cap:
                    raise DenseCapError(f"closure exceeds the dense cap {cap}")
                index[key] = len(elements)
                elements.append(image)
            tables[t].append(index[key])
        k += 1
    return DenseGroup([np.array(t, dtype=np.intp) for t in tables], name=name)
