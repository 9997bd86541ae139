"""Isomorphism certificates, explicit maps and pruned searches."""
import logging
import math
import time
from collections import deque
from concurrent.futures import FIRST_COMPLETED, Future, ProcessPoolExecutor, wait
from typing import Iterator, List, Optional, Sequence, Set, Tuple, Union

import numpy as np

from mcdw.config.settings import Config
from mcdw.core.collect import Collector
from mcdw.core.construct import build_group, source_for
from mcdw.core.group import (
    IDENTITY,
    DenseCapError,
    DenseGroup,
    NotNormalError,
    Subgroup,
    conjugacy_class_reps,
    generates,
    is_normal,
    quotient,
)
from mcdw.core.params import (
    expected_order,
    find_f,
    find_t,
    iso_predicate,
    solve_m2_residues,
)
from mcdw.core.presentations import Presentation, Word, evaluate_syllables, format_word, syllables
from mcdw.models.params import CaseTag, Family, FamilyParams
from mcdw.models.report import IsoCertificate, SearchBudget, SearchOutcome, SearchResult

logger = logging.getLogger(__name__)

Source = Union[Presentation, DenseGroup]
Syllables = List[Tuple[int, int]]


class HomomorphismError(ValueError):
    """Raised when proposed images do not define an isomorphism."""

    def __init__(self, message: str, relator: Optional[str] = None):
        super().__init__(message)
        self.relator = relator


class NoConstructiveClauseError(LookupError):
    """Raised when no explicit map covers the requested pair; use a search instead."""


class LiftHypothesisError(ValueError):
    """Raised when generator perturbations by N1 do not all extend to automorphisms."""


def evaluate_word(G: DenseGroup, word: Word, images: Sequence[int]) -> int:
    return evaluate_syllables(word, [int(i) for i in images], G.product, G.power, IDENTITY)


def _evaluate_many(G: DenseGroup, word: Syllables, images: Sequence) -> np.ndarray:
    shape = np.broadcast_shapes(*(np.shape(i) for i in images))
    result = np.zeros(shape, dtype=np.intp)
    for generator, exponent in word:
        image = images[generator]
        if np.ndim(image) == 0:
            value = G.power(int(image), exponent)
        else:
            value = G.power_many(image, exponent)
        result = G.product_many(result, value)
    return result


def _cost(word: Syllables) -> int:
    return sum(1 + abs(e).bit_length() for _, e in word)


def hom_map(source: DenseGroup, target: DenseGroup, images: Sequence[int]) -> np.ndarray:
    """Extend generator images along the source spanning tree and check every Cayley edge.

    Raises:
        HomomorphismError: If some edge g -> g*s is not respected
    """
    images = [int(i) for i in images]
    if len(images) != source.rank:
        raise HomomorphismError(f"expected {source.rank} images, got {len(images)}")
    jump_images = np.array([target.power(images[gen], exp) for gen, exp in source.jump_meta], dtype=np.intp)
    phi = np.empty(source.order, dtype=np.intp)
    phi[IDENTITY] = IDENTITY
    for layer in source.layers[1:]:
        phi[layer] = target.product_many(phi[source.parent[layer]], jump_images[source.via[layer]])
    for index, table in enumerate(source.tables):
        if not np.array_equal(target.product_many(phi, images[index]), phi[table]):
            bad = int(np.flatnonzero(target.product_many(phi, images[index]) != phi[table])[0])
            raise HomomorphismError(
                f"edge {source.format_element(bad)} * {source.generator_names[index]} is not respected",
                relator=f"{source.generator_names[index]} at {bad}",
            )
    return phi


def check_hom(
    source: Source,
    target: DenseGroup,
    images: Sequence[int],
    source_order: Optional[int] = None,
    collector: Optional[Collector] = None,
    source_label: Optional[str] = None,
    target_label: Optional[str] = None,
) -> IsoCertificate:
    """Certify that generator images define an isomorphism source -> target.

    Args:
        source: Presentation (relators are evaluated) or DenseGroup (Cayley edges are checked)
        target: Target group
        images: One target element per source generator
        source_order: Order of the presented group (required for a Presentation)
        collector: When given, images are also reported as normal-form triples

    Raises:
        HomomorphismError: Naming the first violated relator, or the failed obligation
    """
    start = time.monotonic()
    images = [int(i) for i in images]
    bijective_map = True
    if isinstance(source, Presentation):
        if source_order is None:
            raise ValueError("source_order is required when the source is a presentation")
        if len(images) != source.generator_count:
            raise HomomorphismError(f"expected {source.generator_count} images, got {len(images)}")
        for relator in source.relators:
            if evaluate_word(target, relator, images) != IDENTITY:
                text = format_word(relator, source.generator_names)
                raise HomomorphismError(f"relator {text} does not hold at the images", relator=text)
        order = source_order
        label = source_label or source.name
    else:
        phi = hom_map(source, target, images)
        order = source.order
        bijective_map = len(np.unique(phi)) == order
        label = source_label or source.name
    generation = generates(target, images)
    orders_match = order == target.order
    certificate = IsoCertificate(
        source=label,
        target=target_label or target.name,
        images=images,
        images_nf=[list(collector.to_triple(g)) for g in images] if collector else None,
        relations_hold=True,
        generates=generation,
        orders_match=orders_match,
        bijective=generation and orders_match and bijective_map,
        elapsed=time.monotonic() - start,
    )
    if not certificate.valid:
        raise HomomorphismError(
            f"map {label} -> {certificate.target} is not an isomorphism "
            f"(generates={generation}, orders_match={orders_match})"
        )
    return certificate


def _scan_block(
    target: DenseGroup,
    relators: List[Syllables],
    g_block: Sequence[int],
    h_pool: np.ndarray,
    seconds: float,
    cap: int,
) -> Tuple[str, Optional[Tuple[int, int]], int]:
    deadline = time.monotonic() + seconds
    count = 0
    for g in g_block:
        if time.monotonic() > deadline:
            return "timeout", None, count
        if count >= cap:
            return "cap", None, count
        candidates = h_pool
        count += len(candidates)
        for word in relators:
            values = _evaluate_many(target, word, [g, candidates])
            candidates = candidates[values == IDENTITY]
            if not candidates.size:
                break
        for h in candidates:
            if generates(target, [g, int(h)]):
                return "found", (int(g), int(h)), count
    return "done", None, count


def search_epimorphism(
    pres: Presentation,
    target: DenseGroup,
    budget: Optional[SearchBudget] = None,
    source_group: Optional[DenseGroup] = None,
    source_order: Optional[int] = None,
    collector: Optional[Collector] = None,
    source_label: Optional[str] = None,
) -> SearchResult:
    """Search x -> g, y -> h with g over class representatives and h over elements of matching order.

    ``source_group`` is a reference copy of the presented group; it supplies
    the orders of x and y used for pruning and, if given, the source order.
    """
    budget = budget or SearchBudget()
    start = time.monotonic()
    order = source_group.order if source_group is not None else source_order
    if order is None:
        raise ValueError("either source_group or source_order is required")
    if order != target.order:
        return SearchResult(outcome=SearchOutcome.EXHAUSTED, reason="order mismatch",
                            elapsed=time.monotonic() - start)

    target_orders = target.element_orders()
    reps = np.array(conjugacy_class_reps(target), dtype=np.intp)
    h_pool = np.arange(target.order)
    if source_group is not None:
        x_order = source_group.element_order(source_group.generators[0])
        y_order = source_group.element_order(source_group.generators[1])
        reps = reps[target_orders[reps] == x_order]
        h_pool = h_pool[target_orders == y_order]
    relators = sorted((syllables(r) for r in pres.relators), key=_cost)
    logger.info("Searching %s -> %s: %s representatives x %s candidates",
                pres.name, target.name, len(reps), len(h_pool))

    workers = max(1, budget.workers)
    block_size = max(1, math.ceil(len(reps) / (workers * 4)))
    blocks = [reps[i:i + block_size] for i in range(0, len(reps), block_size)]
    count = 0
    hit: Optional[Tuple[int, int]] = None
    stopped: Optional[str] = None

    if workers == 1:
        for block in blocks:
            remaining = budget.timeout - (time.monotonic() - start)
            status, found, scanned = _scan_block(target, relators, block, h_pool, remaining,
                                                 budget.candidate_cap - count)
            count += scanned
            if status == "found":
                hit = found
                break
            if status in ("timeout", "cap"):
                stopped = status
                break
    else:
        pending = deque(blocks)
        running: Set[Future] = set()
        with ProcessPoolExecutor(max_workers=workers) as executor:
            while (pending or running) and hit is None and stopped is None:
                while pending and len(running) < workers:
                    remaining = budget.timeout - (time.monotonic() - start)
                    if remaining <= 0 or count >= budget.candidate_cap:
                        if not running:
                            stopped = "timeout" if remaining <= 0 else "cap"
                        break
                    running.add(executor.submit(_scan_block, target, relators, pending.popleft(), h_pool,
                                                remaining, budget.candidate_cap - count))
                if not running:
                    break
                done, running = wait(running, return_when=FIRST_COMPLETED)
                for future in done:
                    status, found, scanned = future.result()
                    count += scanned
                    if status == "found" and hit is None:
                        hit = found
                    elif status in ("timeout", "cap") and stopped is None:
                        stopped = status
            for future in running:
                future.cancel()

    elapsed = time.monotonic() - start
    if hit is not None:
        certificate = check_hom(pres, target, hit, source_order=order, collector=collector,
                                source_label=source_label)
        certificate.elapsed = elapsed
        logger.info("Found isomorphism %s -> %s after %s candidates", pres.name, target.name, count)
        return SearchResult(outcome=SearchOutcome.FOUND, certificate=certificate,
                            candidates=count, elapsed=elapsed)
    if stopped is not None:
        reason = "timeout" if stopped == "timeout" else "candidate cap reached"
        logger.warning("Search %s -> %s stopped: %s", pres.name, target.name, reason)
        return SearchResult(outcome=SearchOutcome.TIMEOUT, candidates=count, elapsed=elapsed, reason=reason)
    logger.info("Search %s -> %s exhausted after %s candidates", pres.name, target.name, count)
    return SearchResult(outcome=SearchOutcome.EXHAUSTED, candidates=count, elapsed=elapsed,
                        reason="search space exhausted")


def _assignments(source: DenseGroup, target: DenseGroup, first_pool: np.ndarray) -> Iterator[List[int]]:
    """Image tuples for the source generators that respect orders, commutation and product orders."""
    gens = source.generators
    k = len(gens)
    target_orders = target.element_orders()
    wanted = [source.element_order(g) for g in gens]
    commute = [[source.product(a, b) == source.product(b, a) for b in gens] for a in gens]
    product_order = [[source.element_order(source.product(a, b)) for b in gens] for a in gens]
    pools = [np.flatnonzero(target_orders == w) for w in wanted]
    pools[0] = first_pool[target_orders[first_pool] == wanted[0]]

    def extend(chosen: List[int]) -> Iterator[List[int]]:
        i = len(chosen)
        if i == k:
            yield list(chosen)
            return
        candidates = pools[i]
        for j, t in enumerate(chosen):
            forward = target.product_many(t, candidates)
            keep = target_orders[forward] == product_order[j][i]
            backward = target.product_many(candidates, t)
            keep &= (forward == backward) == commute[j][i]
            candidates = candidates[keep]
        for c in candidates:
            yield from extend(chosen + [int(c)])

    yield from extend([])


def search_isomorphism(
    source: DenseGroup,
    target: DenseGroup,
    budget: Optional[SearchBudget] = None,
    hints: Sequence[Sequence[int]] = (),
) -> SearchResult:
    """Backtracking search for images of all source generators, trying ``hints`` first."""
    budget = budget or SearchBudget()
    start = time.monotonic()
    if source.order != target.order:
        return SearchResult(outcome=SearchOutcome.EXHAUSTED, reason="order mismatch",
                            elapsed=time.monotonic() - start)
    count = 0
    for hint in hints:
        count += 1
        try:
            certificate = check_hom(source, target, hint)
        except HomomorphismError as e:
            logger.debug("Hint %s rejected: %s", list(hint), e)
            continue
        return SearchResult(outcome=SearchOutcome.FOUND, certificate=certificate, candidates=count,
                            elapsed=time.monotonic() - start, notes=["hint accepted"])
    reps = np.array(conjugacy_class_reps(target), dtype=np.intp)
    for images in _assignments(source, target, reps):
        count += 1
        if time.monotonic() - start > budget.timeout or count > budget.candidate_cap:
            reason = "timeout" if count <= budget.candidate_cap else "candidate cap reached"
            return SearchResult(outcome=SearchOutcome.TIMEOUT, candidates=count,
                                elapsed=time.monotonic() - start, reason=reason)
        try:
            certificate = check_hom(source, target, images)
        except HomomorphismError:
            continue
        certificate.elapsed = time.monotonic() - start
        return SearchResult(outcome=SearchOutcome.FOUND, certificate=certificate, candidates=count,
                            elapsed=certificate.elapsed)
    return SearchResult(outcome=SearchOutcome.EXHAUSTED, candidates=count,
                        elapsed=time.monotonic() - start, reason="search space exhausted")


def automorphisms(G: DenseGroup, cap: int = 2 ** 13) -> List[Tuple[int, ...]]:
    """Every generator-image tuple defining an automorphism of G.

    Raises:
        DenseCapError: If |G| exceeds ``cap``
    """
    if G.order > cap:
        raise DenseCapError(f"automorphism enumeration is capped at order {cap}, got {G.order}")
    result = []
    for images in _assignments(G, G, np.arange(G.order)):
        try:
            check_hom(G, G, images)
        except HomomorphismError:
            continue
        result.append(tuple(images))
    logger.info("%s has %s automorphisms", G.name, len(result))
    return result


def compose_images(G: DenseGroup, first: Sequence[int], second: Sequence[int]) -> Tuple[int, ...]:
    """Generator images of the composite 'first, then second' (left-to-right)."""
    phi = hom_map(G, G, second)
    return tuple(int(phi[g]) for g in first)


def _minimal_preimages(G: DenseGroup, projection: np.ndarray, count: int) -> np.ndarray:
    result = np.full(count, -1, dtype=np.intp)
    order = np.argsort(projection, kind="stable")
    labels = projection[order]
    first = np.flatnonzero(np.r_[True, labels[1:] != labels[:-1]])
    result[labels[first]] = order[first]
    return result


def lift_search(
    G1: DenseGroup,
    G2: DenseGroup,
    N1: Subgroup,
    N2: Subgroup,
    gamma_images: Sequence[int],
    U: Sequence[Sequence[int]],
    verify_hypothesis: bool = True,
    hypothesis_cap: int = 2 ** 12,
) -> SearchResult:
    """Reduce G1 -> G2 to isomorphisms of G1/N1 -> G2/N2 composed with automorphisms in U.

    For each u in U the generators e of G1 are sent to the least preimage of
    e.u.gamma and the assignment is tested as an isomorphism.

    Raises:
        NotNormalError: If N1 or N2 is not normal
        HomomorphismError: If gamma is not an isomorphism of the quotients
        LiftHypothesisError: If some perturbation e -> e*f_e is not an automorphism
    """
    start = time.monotonic()
    notes: List[str] = []
    for G, N in ((G1, N1), (G2, N2)):
        if not is_normal(G, N):
            raise NotNormalError(f"subgroup of order {N.order} is not normal in {G.name}")
    if G1.order != G2.order:
        return SearchResult(outcome=SearchOutcome.EXHAUSTED, reason="order mismatch")
    L1 = quotient(G1, N1, name=f"{G1.name}/N")
    L2 = quotient(G2, N2, name=f"{G2.name}/N")
    check_hom(L1, L2, gamma_images)
    gamma = hom_map(L1, L2, gamma_images)

    E = G1.generators
    if verify_hypothesis:
        combinations = N1.order ** len(E)
        if combinations > hypothesis_cap:
            notes.append(
                f"hypothesis taken on authority: {combinations} perturbations exceed the cap {hypothesis_cap}"
            )
            logger.warning("Lifting hypothesis for %s not verified (%s perturbations)", G1.name, combinations)
        else:
            grids = np.meshgrid(*[N1.elements] * len(E), indexing="ij")
            for perturbation in zip(*(g.ravel() for g in grids)):
                images = [G1.product(e, int(f)) for e, f in zip(E, perturbation)]
                try:
                    check_hom(G1, G1, images)
                except HomomorphismError as e:
                    raise LiftHypothesisError(
                        f"perturbation {list(map(int, perturbation))} of the generators is not an automorphism"
                    ) from e
            notes.append(f"hypothesis verified over {combinations} perturbations")

    preimages = _minimal_preimages(G2, L2.projection, L2.order)
    count = 0
    for u in U:
        count += 1
        phi_u = hom_map(L1, L1, u)
        lifted = [int(preimages[gamma[phi_u[int(L1.projection[e])]]]) for e in E]
        try:
            certificate = check_hom(G1, G2, lifted)
        except HomomorphismError:
            continue
        image_of_n1 = hom_map(G1, G2, lifted)[N1.elements]
        if not np.array_equal(np.sort(image_of_n1), N2.elements):
            continue
        certificate.elapsed = time.monotonic() - start
        return SearchResult(outcome=SearchOutcome.FOUND, certificate=certificate, candidates=count,
                            elapsed=certificate.elapsed, notes=notes)
    return SearchResult(outcome=SearchOutcome.EXHAUSTED, candidates=count, elapsed=time.monotonic() - start,
                        reason="no element of U lifts", notes=notes)


def _images_power(G: DenseGroup, factors: Sequence[Tuple[int, int]]) -> int:
    """Product of powers g^k of target elements, left to right."""
    result = IDENTITY
    for g, k in factors:
        result = G.product(result, G.power(g, k))
    return result


def m2_images(target: DenseGroup, s: int, i: int, j: int, a: int, b: int) -> List[int]:
    """X -> A^(1+s+2si) B^(2sj), Y -> A^s B A^(2sa) B^(2sb)."""
    A, B = target.generators[:2]
    x = _images_power(target, [(A, 1 + s + 2 * s * i), (B, 2 * s * j)])
    y = _images_power(target, [(A, s), (B, 1), (A, 2 * s * a), (B, 2 * s * b)])
    return [x, y]


def solve_m2_map(
    params: FamilyParams,
    ell_prime: int,
    target: DenseGroup,
    source: Presentation,
    source_order: int,
) -> Tuple[Optional[IsoCertificate], Optional[Tuple[int, int, int, int]]]:
    """Brute-force (i, j, a, b) in [0, 2u)^4 over the residue solutions and certify the first map."""
    c = params.constants
    residues = set(solve_m2_residues(params, ell_prime))
    if not residues:
        return None, None
    span = range(2 * c.u)
    for i in span:
        for j in span:
            for a in span:
                for b in span:
                    if (i % c.s, j % c.s, a % c.s, b % c.s) not in residues:
                        continue
                    images = m2_images(target, c.s, i, j, a, b)
                    try:
                        certificate = check_hom(source, target, images, source_order=source_order)
                    except HomomorphismError:
                        continue
                    return certificate, (i, j, a, b)
    return None, None


def h2_map_exponents(
    params: FamilyParams,
    ell_prime: int,
    target: DenseGroup,
    source: Presentation,
    source_order: int,
) -> Tuple[str, int, int, IsoCertificate]:
    """Exponents of X -> A^i, Y -> B^j, or X -> (AB^r)^i, Y -> B^j, for H2 with m > 2.

    The first shape is tried when ell' ≡ ell (mod s); the second uses
    i ≡ 1 (mod 2s) and j = 1 + kr with k ≡ 1 (mod 4).

    Raises:
        NoConstructiveClauseError: If no exponents in range give an isomorphism
    """
    c = params.constants
    modulus = 2 ** (2 * params.m - 1)
    A, B = target.generators[:2]
    if (ell_prime - params.ell) % c.s == 0:
        shape = "XA"
        candidates = [(i, j, A, B) for i in range(1, modulus, 2) for j in range(1, modulus, 2)]
    else:
        shape = "XAr"
        base = target.product(A, target.power(B, c.r))
        candidates = [(i, 1 + k * c.r, base, B) for i in range(1, modulus, 2 * c.s)
                      for k in range(1, modulus // c.r, 4)]
    for i, j, x_base, y_base in candidates:
        images = [target.power(x_base, i), target.power(y_base, j)]
        try:
            certificate = check_hom(source, target, images, source_order=source_order)
        except HomomorphismError:
            continue
        return shape, i, j, certificate
    raise NoConstructiveClauseError(f"no {shape} exponents for {params.label()} and ell'={ell_prime}")


def explicit_sufficiency_map(
    family,
    params_a: FamilyParams,
    params_b: FamilyParams,
    config: Optional[Config] = None,
    target: Optional[DenseGroup] = None,
    source_group: Optional[DenseGroup] = None,
    collector: Optional[Collector] = None,
) -> IsoCertificate:
    """Build the stated isomorphism from the group at ``params_b`` onto the group at ``params_a``.

    Raises:
        NoConstructiveClauseError: If the pair is not covered by an explicit construction
    """
    family = Family(family)
    if family is Family.G or not iso_predicate(family, params_a, params_b):
        raise NoConstructiveClauseError(
            f"no explicit map for {params_b.label()} -> {params_a.label()}; use search_epimorphism"
        )
    target = target or build_group(family, params_a, config)
    source = source_for(family, params_b, config)
    if isinstance(source, Presentation):
        if family.kind == "J":
            source_order = expected_order(family, params_b)
        else:
            source_order = (source_group or build_group(family, params_b, config)).order
    else:
        source_order = source.order
    labels = {"source_label": params_b.label(), "target_label": params_a.label()}
    A, B = target.generators[:2]
    p, m = params_a.p, params_a.m

    if family.kind == "K" and params_a.case is not CaseTag.CASE3:
        t = find_t(params_a, params_b.alpha)
        logger.info("K-level map x -> a, y -> b^%s for %s -> %s", t, params_b.label(), params_a.label())
        return check_hom(source, target, [A, target.power(B, t)], source_order=source_order,
                         collector=collector, **labels)

    congruent = params_a.case is CaseTag.CASE3 or (params_b.ell - params_a.ell) % p ** m == 0
    if congruent:
        f = find_f(params_a, params_b.ell)
        logger.info("Map X -> A, Y -> B^%s for %s -> %s", f, params_b.label(), params_a.label())
        return check_hom(source, target, [A, target.power(B, f)], source_order=source_order,
                         collector=collector, **labels)

    if family is Family.H2 and m >= 2 and isinstance(source, Presentation):
        shape, i, j, certificate = h2_map_exponents(params_a, params_b.ell, target, source, source_order)
        logger.info("H2 map of shape %s with i=%s, j=%s", shape, i, j)
        return certificate.model_copy(update=labels)

    if family is Family.J2 and m == 2:
        certificate, solution = solve_m2_map(params_a, params_b.ell, target, source, source_order)
        if certificate is None:
            raise NoConstructiveClauseError(f"residue conditions unsolvable for {params_b.label()}")
        logger.info("J2 map with (i, j, a, b) = %s", solution)
        return certificate.model_copy(update=labels)

    raise NoConstructiveClauseError(
        f"no explicit map for {params_b.label()} -> {params_a.label()}; use search_epimorphism"
    )
