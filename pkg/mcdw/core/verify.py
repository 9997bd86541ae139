"""Named, reproducible checks over the group families.

Every check returns a CheckReport. Mathematical failures become ``fail``
reports carrying a witness; exceeded caps or budgets become ``skipped`` or
``timeout`` reports. Nothing here raises for a disproved claim.
"""
import asyncio
import functools
import logging
import threading
import time
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from mcdw.cache.store import GroupCache
from mcdw.config.settings import Config
from mcdw.core.appendix import evaluate_catalogue
from mcdw.core.collect import Collector, CollectorError, derive_collector
from mcdw.core.construct import build_group, uses_presentation
from mcdw.core.enumerate import EnumerationError
from mcdw.core.group import (
    DenseGroup,
    GroupError,
    abc_factorization,
    center,
    derived_subgroup,
    is_abelian_subgroup,
    minimal_generators,
    powers,
    subgroup_closure,
    subgroup_group,
    upper_central_series,
    upper_central_terms,
)
from mcdw.core.iso import (
    HomomorphismError,
    NoConstructiveClauseError,
    explicit_sufficiency_map,
    search_epimorphism,
    search_isomorphism,
    solve_m2_map,
)
from mcdw.core.params import (
    ParameterError,
    check_sum_congruence,
    class_count,
    expected_class,
    expected_order,
    find_f,
    iso_predicate,
    lift_obstruction,
    macdonald_order,
    make_params,
    solve_m2_residues,
    sylow_wise_predicate,
    theorem_d_predicate,
)
from mcdw.core.presentations import PresentationError, macdonald_presentation, presentation
from mcdw.models.params import CaseTag, Family, FamilyParams
from mcdw.models.report import CheckReport, CheckStatus, SearchBudget, SearchOutcome, SearchResult

logger = logging.getLogger(__name__)

THEOREMS = ("A", "B", "C", "D", "E")

DEFAULT_SUFFICIENCY_GRIDS: Dict[CaseTag, Dict[str, Any]] = {
    CaseTag.CASE1: {
        "p": 5, "m": 1,
        "pairs": [(1, 6), (2, 7), (3, 8), (4, 9), (1, 11), (6, 11)],
    },
    CaseTag.CASE2: {
        "p": 2, "m": 2,
        "pairs": [(1, 5), (1, 9), (1, 13), (5, 9), (3, 7), (3, 11), (7, 11), (1, 3), (1, 7), (3, 5)],
    },
    CaseTag.CASE3: {
        "p": 3, "m": 1,
        "pairs": [(2, 5), (2, 8), (5, 8), (2, 11), (5, 11), (8, 11), (2, 14), (5, 14), (8, 14), (11, 14)],
    },
}

APPENDIX_ELLS = (1, 3)

_SKIPPABLE = (GroupError, EnumerationError, CollectorError, PresentationError, ParameterError)


class Workbench:
    """Shared configuration, cache and built groups for a batch of checks."""

    def __init__(self, config: Optional[Config] = None):
        self.config = config or Config(use_cache=False)
        self.cache = GroupCache(self.config.cache_dir) if self.config.use_cache else None
        self._groups: Dict[FamilyParams, DenseGroup] = {}
        self._collectors: Dict[FamilyParams, Collector] = {}
        self._lock = threading.Lock()

    def group(self, params: FamilyParams) -> DenseGroup:
        with self._lock:
            if params not in self._groups:
                self._groups[params] = build_group(params.family, params, self.config, self.cache)
            return self._groups[params]

    def collector(self, params: FamilyParams) -> Collector:
        oracle = self.group(params)
        with self._lock:
            if params not in self._collectors:
                self._collectors[params] = derive_collector(
                    params, oracle,
                    samples=self.config.collector_samples,
                    exhaustive_limit=self.config.collector_exhaustive_limit,
                )
            return self._collectors[params]

    @property
    def budget(self) -> SearchBudget:
        return SearchBudget(
            timeout=self.config.search_timeout,
            candidate_cap=self.config.candidate_cap,
            workers=self.config.workers,
        )


def _params_dict(params: FamilyParams) -> Dict[str, Any]:
    return params.model_dump(mode="json", exclude_none=True)


def _finish(check_id: str, parameters: Dict[str, Any], start: float, evidence: Dict[str, Any],
            failures: Sequence[Any] = (), timeouts: Sequence[Any] = ()) -> CheckReport:
    if failures:
        status = CheckStatus.FAIL
        evidence = {**evidence, "witness": failures[0], "failures": list(failures)}
    elif timeouts:
        status = CheckStatus.TIMEOUT
        evidence = {**evidence, "timeouts": list(timeouts)}
    else:
        status = CheckStatus.PASS
    report = CheckReport(check_id=check_id, parameters=parameters, status=status, evidence=evidence,
                         elapsed=time.monotonic() - start)
    logger.info("Check %s %s: %s", check_id, parameters, status.value)
    return report


def _guarded(check_id: str):
    """Turn cap, budget and precondition errors into ``skipped`` reports."""
    def decorator(func: Callable[..., CheckReport]) -> Callable[..., CheckReport]:
        @functools.wraps(func)
        def wrapper(*args, **kwargs) -> CheckReport:
            start = time.monotonic()
            try:
                return func(*args, **kwargs)
            except _SKIPPABLE as e:
                logger.warning("Check %s skipped: %s", check_id, e)
                return CheckReport(
                    check_id=check_id,
                    parameters={"args": [str(a) for a in args if not isinstance(a, Workbench)]},
                    status=CheckStatus.SKIPPED,
                    evidence={"reason": f"{type(e).__name__}: {e}"},
                    elapsed=time.monotonic() - start,
                )
        return wrapper
    return decorator


def certify_pair(family, params_a: FamilyParams, params_b: FamilyParams, bench: Workbench) -> Tuple[str, SearchResult]:
    """Isomorphism group(params_b) -> group(params_a): explicit map first, then a search."""
    family = Family(family)
    target = bench.group(params_a)
    try:
        certificate = explicit_sufficiency_map(family, params_a, params_b, bench.config, target=target,
                                               source_group=None if family.kind == "J" else bench.group(params_b))
        return "explicit", SearchResult(outcome=SearchOutcome.FOUND, certificate=certificate,
                                        candidates=1, elapsed=certificate.elapsed)
    except NoConstructiveClauseError as e:
        logger.info("%s; searching instead", e)
    except HomomorphismError as e:
        logger.warning("Explicit map %s -> %s failed (%s); searching instead",
                       params_b.label(), params_a.label(), e)
    return "search", search_pair(family, params_a, params_b, bench)


def search_pair(family, params_a: FamilyParams, params_b: FamilyParams, bench: Workbench) -> SearchResult:
    family = Family(family)
    target = bench.group(params_a)
    source_group = bench.group(params_b)
    if family is Family.G:
        pres = macdonald_presentation(params_b.beta)
    elif uses_presentation(family, params_b):
        pres = presentation(family, params_b)
    else:
        return search_isomorphism(source_group, target, bench.budget)
    return search_epimorphism(pres, target, bench.budget, source_group=source_group,
                              source_label=params_b.label())


def _fundamental_relations(G: DenseGroup, params: FamilyParams) -> Dict[str, bool]:
    A, B = G.generators[:2]
    C = G.commutator(A, B)
    identity = 0
    if params.case is CaseTag.CASE1:
        q = params.p ** (2 * params.m)
        return {f"A^{q} B^{q} = 1": G.product(G.power(A, q), G.power(B, q)) == identity}
    if params.case is CaseTag.CASE2:
        s, u = 2 ** (params.m - 1), 4 ** (params.m - 1)
        a_top, b_top, c_top = G.power(A, 2 * u * s), G.power(B, 2 * u * s), G.power(C, 2 * u)
        return {
            f"A^{2 * u} B^{2 * u} = 1": G.product(G.power(A, 2 * u), G.power(B, 2 * u)) == identity,
            f"A^{2 * u * s} = B^{2 * u * s} = C^{2 * u}": a_top == b_top == c_top,
        }
    return {"A^27 B^27 = 1": G.product(G.power(A, 27), G.power(B, 27)) == identity}


def _described_series(G: DenseGroup, params: FamilyParams) -> Optional[List[List[int]]]:
    """Generators of Z_1..Z_4 as known for J_1 and for J_2 with m > 1."""
    A, B = G.generators[:2]
    C = G.commutator(A, B)
    if params.family is Family.J1:
        pm, p2m = params.p ** params.m, params.p ** (2 * params.m)
        return [
            [G.power(A, p2m)],
            [G.power(A, p2m), G.power(C, pm)],
            [G.power(A, pm), G.power(B, pm), G.power(C, pm)],
            [G.power(A, pm), G.power(B, pm), C],
        ]
    if params.family is Family.J2 and params.m > 1:
        s = 2 ** (params.m - 1)
        u = s * s
        return [
            [G.power(A, 2 * u)],
            [G.power(A, 2 * u), G.power(C, s)],
            [G.power(A, 2 * s), G.power(B, 2 * s), G.power(C, s)],
            [G.power(A, s), G.power(B, s), C],
        ]
    return None


@_guarded("structure")
def verify_structure(family, params: FamilyParams, bench: Optional[Workbench] = None) -> CheckReport:
    """Order, class, upper central series, fundamental relations and the ABC factorisation."""
    start = time.monotonic()
    bench = bench or Workbench()
    family = Family(family)
    G = bench.group(params)
    series = upper_central_series(G)
    evidence: Dict[str, Any] = {"order": G.order, "class": series.nilpotency_class, "series": series.to_dict()}
    failures: List[Dict[str, Any]] = []

    if family.kind == "J":
        wanted_order, wanted_class = expected_order(family, params), expected_class(family, params)
        if G.order != wanted_order:
            failures.append({"quantity": "order", "expected": wanted_order, "computed": G.order})
        if series.nilpotency_class != wanted_class:
            failures.append({"quantity": "class", "expected": wanted_class, "computed": series.nilpotency_class})
    elif family is Family.G:
        wanted_order = macdonald_order(params.beta)
        if G.order != wanted_order:
            failures.append({"quantity": "order", "expected": wanted_order, "computed": G.order})

    if family is not Family.G:
        relations = _fundamental_relations(G, params)
        evidence["relations"] = relations
        failures.extend({"relation": name} for name, holds in relations.items() if not holds)

    if family.kind == "J":
        A, B = G.generators[:2]
        a_powers = powers(G, A, G.element_order(A))
        b_powers = powers(G, B, G.element_order(B))
        meet = np.intersect1d(a_powers, b_powers)
        evidence["a_meet_b_order"] = int(meet.size)
        if params.case is CaseTag.CASE1:
            step = params.p ** (2 * params.m)
            described = np.unique(powers(G, G.power(B, step), G.element_order(B) // step))
            if not np.array_equal(meet, described):
                failures.append({"quantity": "A meet B", "expected": int(described.size), "computed": int(meet.size)})
        factorization = abc_factorization(G, A, B, G.commutator(A, B))
        evidence["abc"] = {"ranges": [factorization.a_mod, factorization.b_mod, factorization.c_mod],
                           "bijective": factorization.bijective}
        if not factorization.bijective:
            failures.append({"quantity": "abc factorisation", "ranges": evidence["abc"]["ranges"]})

        described_terms = _described_series(G, params)
        if described_terms is not None:
            terms = upper_central_terms(G)
            for index, (term, gens) in enumerate(zip(terms, described_terms), start=1):
                closure = subgroup_closure(G, gens)
                if not closure.same_as(term):
                    failures.append({"term": index, "expected": closure.order, "computed": term.order})
            if len(terms) >= 3 and not is_abelian_subgroup(G, terms[2]):
                failures.append({"term": 3, "property": "abelian"})

    return _finish("structure", _params_dict(params), start, evidence, failures)


def _pairwise_certificates(family, anchor: FamilyParams, others: Sequence[FamilyParams],
                           bench: Workbench, failures: List, timeouts: List) -> List[Dict[str, Any]]:
    certificates = []
    for other in others:
        method, result = certify_pair(family, anchor, other, bench)
        entry = {"source": other.label(), "target": anchor.label(), "method": method,
                 "outcome": result.outcome.value}
        if result.certificate is not None:
            entry["images"] = result.certificate.images
        certificates.append(entry)
        if result.outcome is SearchOutcome.EXHAUSTED:
            failures.append({**entry, "reason": result.reason})
        elif result.outcome is SearchOutcome.TIMEOUT:
            timeouts.append(entry)
    return certificates


def _separate(first: FamilyParams, second: FamilyParams, bench: Workbench) -> Dict[str, Any]:
    """Exhaust H1 epimorphisms between two J1 class candidates; H1 is J1 modulo its center."""
    result = search_pair("H1", make_params("H1", first.p, first.m, first.ell),
                         make_params("H1", second.p, second.m, second.ell), bench)
    return {"pair": [second.label(), first.label()], "family": "H1", "outcome": result.outcome.value,
            "candidates": result.candidates, "result": result}


def _theorem_a(bench: Workbench, scope: Dict[str, Any], necessity: bool,
               failures: List, timeouts: List) -> Dict[str, Any]:
    p, m = scope.get("p", 5), scope.get("m", 1)
    ells = scope.get("ells", (1, 2, 3, 4, 6))
    params = [make_params("J1", p, m, ell) for ell in ells]
    classes: List[List[FamilyParams]] = []
    certificates: List[Dict[str, Any]] = []
    separations: List[Dict[str, Any]] = []
    for candidate in params:
        placed = False
        for group_ in classes:
            rep = group_[0]
            predicted = iso_predicate("J1", rep, candidate)
            if predicted:
                entries = _pairwise_certificates("J1", rep, [candidate], bench, failures, timeouts)
                certificates += entries
                if entries[0]["outcome"] == SearchOutcome.FOUND.value:
                    group_.append(candidate)
                    placed = True
                    break
                continue
            if not necessity:
                separations.append({"pair": [candidate.label(), rep.label()], "outcome": "not requested"})
                continue
            entry = _separate(rep, candidate, bench)
            result = entry.pop("result")
            separations.append(entry)
            if result.outcome is SearchOutcome.FOUND:
                failures.append({**entry, "images": result.certificate.images})
            elif result.outcome is SearchOutcome.TIMEOUT:
                timeouts.append(entry)
        if not placed:
            classes.append([candidate])

    predicted = class_count("J1", p, m)
    wanted = p ** (m - 1) * (p - 1)
    evidence: Dict[str, Any] = {
        "partition": [[c.alpha for c in group_] for group_ in classes],
        "class_count": predicted,
        "certificates": certificates,
        "separations": separations,
    }
    if (p, m) != (3, 1) and predicted != wanted:
        failures.append({"quantity": "class count", "expected": wanted, "computed": predicted})
    if len(classes) != predicted:
        failures.append({"quantity": "classes found", "expected": predicted, "computed": len(classes),
                         "partition": evidence["partition"]})

    # at (p, m) = (3, 1) every Case 1 group is isomorphic to J1(4)
    slice_ells = scope.get("exceptional_ells", (1, 4, 7))
    slice_params = [make_params("J1", 3, 1, ell) for ell in slice_ells]
    evidence["exceptional_slice_classes"] = class_count("J1", 3, 1)
    if evidence["exceptional_slice_classes"] != 1:
        failures.append({"quantity": "classes at (3, 1)", "expected": 1,
                         "computed": evidence["exceptional_slice_classes"]})
    evidence["exceptional_slice"] = _pairwise_certificates("J1", slice_params[0], slice_params[1:], bench,
                                                           failures, timeouts)

    k_params = [make_params("K1", p, m, ell) for ell in ells]
    evidence["k_certificates"] = _pairwise_certificates("K1", k_params[0], k_params[1:], bench, failures, timeouts)
    return evidence


def _theorem_b(bench: Workbench, scope: Dict[str, Any], failures: List, timeouts: List) -> Dict[str, Any]:
    ells = scope.get("ells", (1, 3, 5, 7))
    evidence: Dict[str, Any] = {"certificates": []}
    for m in scope.get("ms", (1, 2)):
        params = [make_params("J2", 2, m, ell) for ell in ells]
        evidence["certificates"] += _pairwise_certificates("J2", params[0], params[1:], bench, failures, timeouts)
    k_params = [make_params("K2", 2, 2, ell) for ell in ells]
    evidence["certificates"] += _pairwise_certificates("K2", k_params[0], k_params[1:], bench, failures, timeouts)
    predicted = class_count("J2", 2, 3, CaseTag.CASE2)
    evidence["class_count_m3"] = predicted
    if predicted != 4:
        failures.append({"quantity": "class count at m=3", "expected": 4, "computed": predicted})
    evidence["necessity_m3"] = "stretch: exhaustive search at order 2^18 is opt-in"
    return evidence


def _theorem_c(bench: Workbench, scope: Dict[str, Any], failures: List, timeouts: List) -> Dict[str, Any]:
    ells = scope.get("ells", (2, 5, 8))
    evidence: Dict[str, Any] = {"certificates": []}
    for family in scope.get("families", ("J3", "H3", "K3")):
        params = [make_params(family, 3, 1, ell) for ell in ells]
        evidence["certificates"] += _pairwise_certificates(family, params[0], params[1:], bench, failures, timeouts)
    return evidence


def _v3(n: int) -> int:
    count = 0
    while n and n % 3 == 0:
        n //= 3
        count += 1
    return count


def _theorem_d(bench: Workbench, scope: Dict[str, Any], failures: List, timeouts: List) -> Dict[str, Any]:
    evidence: Dict[str, Any] = {"certificates": []}
    for alpha, beta in scope.get("pairs", ((3, -1), (5, -3))):
        target = make_params("G", beta=alpha)
        source = make_params("G", beta=beta)
        result = search_pair("G", target, source, bench)
        entry = {"source": source.label(), "target": target.label(), "outcome": result.outcome.value}
        if result.certificate is not None:
            entry["images"] = result.certificate.images
        evidence["certificates"].append(entry)
        if result.outcome is SearchOutcome.EXHAUSTED:
            failures.append(entry)
        elif result.outcome is SearchOutcome.TIMEOUT:
            timeouts.append(entry)

    low, high = scope.get("window", (-12, 14))
    bookkeeping = {"equal_orders": 0, "asymmetric": [], "predicates_agree": 0}
    for alpha in range(low, high + 1):
        if alpha == 1:
            continue
        partner = 2 - alpha
        order, partner_order = macdonald_order(alpha), macdonald_order(partner)
        if _v3(alpha - 1) != 1:
            if order != partner_order:
                failures.append({"alpha": alpha, "orders": [order, partner_order]})
            else:
                bookkeeping["equal_orders"] += 1
        else:
            pair = sorted([3 ** _v3(order), 3 ** _v3(partner_order)])
            bookkeeping["asymmetric"].append({"alpha": alpha, "sylow3": pair})
            if pair != [3 ** 7, 3 ** 10]:
                failures.append({"alpha": alpha, "sylow3": pair})
        if theorem_d_predicate(alpha, partner) != sylow_wise_predicate(alpha, partner):
            failures.append({"alpha": alpha, "predicates": "disagree"})
        else:
            bookkeeping["predicates_agree"] += 1
    evidence["bookkeeping"] = bookkeeping
    return evidence


def _theorem_e(bench: Workbench, scope: Dict[str, Any], failures: List, timeouts: List) -> Dict[str, Any]:
    ells = scope.get("ells", (1, 3, 5, 7))
    evidence: Dict[str, Any] = {"certificates": []}
    for m in scope.get("ms", (1, 2, 3)):
        params = [make_params("H2", 2, m, ell) for ell in ells]
        evidence["certificates"] += _pairwise_certificates("H2", params[0], params[1:], bench, failures, timeouts)
    predicted = class_count("H2", 2, 4, CaseTag.CASE2)
    evidence["class_count_m4"] = predicted
    if predicted != 2:
        failures.append({"quantity": "class count at m=4", "expected": 2, "computed": predicted})
    return evidence


@_guarded("theorem")
def verify_theorem(theorem: str, scope: Optional[Dict[str, Any]] = None, bench: Optional[Workbench] = None,
                   necessity: bool = True) -> CheckReport:
    """Check one of the classification theorems A-E over a desk-scale scope.

    For A, ``necessity`` separates the J1 classes by exhausted H1 searches;
    without it classes that are not certified isomorphic stay apart unchecked.
    """
    start = time.monotonic()
    theorem = theorem.upper()
    if theorem not in THEOREMS:
        raise ParameterError(f"unknown theorem '{theorem}' (expected one of {', '.join(THEOREMS)})")
    bench = bench or Workbench()
    scope = dict(scope or {})
    failures: List[Dict[str, Any]] = []
    timeouts: List[Dict[str, Any]] = []
    if theorem == "A":
        evidence = _theorem_a(bench, scope, necessity, failures, timeouts)
    elif theorem == "B":
        evidence = _theorem_b(bench, scope, failures, timeouts)
    elif theorem == "C":
        evidence = _theorem_c(bench, scope, failures, timeouts)
    elif theorem == "D":
        evidence = _theorem_d(bench, scope, failures, timeouts)
    else:
        evidence = _theorem_e(bench, scope, failures, timeouts)
    parameters = {"theorem": theorem, **{k: list(v) if isinstance(v, tuple) else v for k, v in scope.items()}}
    return _finish(f"theorem.{theorem}", parameters, start, evidence, failures, timeouts)


def _derived_hint(G_b: DenseGroup, params_a: FamilyParams, params_b: FamilyParams,
                  D_b: DenseGroup) -> List[List[int]]:
    """Images A^2s -> A'^2s, B^2s -> B'^2s, C -> C'^i with alpha ≡ alpha'^i (mod 2u)."""
    s = 2 ** (params_a.m - 1)
    modulus = 2 * s * s
    exponent = next((i for i in range(1, modulus + 1)
                     if pow(params_b.alpha, i, modulus) == params_a.alpha % modulus), None)
    if exponent is None:
        return []
    A2, B2 = G_b.generators[:2]
    images = [G_b.power(A2, 2 * s), G_b.power(B2, 2 * s), G_b.power(G_b.commutator(A2, B2), exponent)]
    position = np.full(G_b.order, -1, dtype=np.intp)
    position[D_b.embedding] = np.arange(D_b.order)
    hint = [int(position[g]) for g in images]
    return [hint] if min(hint) >= 0 else []


@_guarded("pair")
def verify_pair(family, params_a: FamilyParams, params_b: FamilyParams,
                bench: Optional[Workbench] = None) -> CheckReport:
    """Certificate group(params_b) -> group(params_a); an exhausted search is a failure."""
    start = time.monotonic()
    bench = bench or Workbench()
    family = Family(family)
    method, result = certify_pair(family, params_a, params_b, bench)
    entry = {"source": params_b.label(), "target": params_a.label(), "method": method,
             "outcome": result.outcome.value}
    evidence: Dict[str, Any] = {**entry, "candidates": result.candidates}
    if result.certificate is not None:
        evidence["images"] = result.certificate.images
    if family is not Family.G:
        evidence["predicted"] = iso_predicate(family, params_a, params_b)
    failures = [{**entry, "reason": result.reason}] if result.outcome is SearchOutcome.EXHAUSTED else []
    timeouts = [entry] if result.outcome is SearchOutcome.TIMEOUT else []
    parameters = {"family": family.value, "a": params_a.label(), "b": params_b.label()}
    return _finish("pair", parameters, start, evidence, failures, timeouts)


@_guarded("series-factors")
def verify_series_factors(family, params_a: FamilyParams, params_b: FamilyParams,
                          bench: Optional[Workbench] = None, compare_derived: bool = True) -> CheckReport:
    """Termwise equal central-series factors and, for J_2, isomorphic derived subgroups."""
    start = time.monotonic()
    bench = bench or Workbench()
    family = Family(family)
    G_a, G_b = bench.group(params_a), bench.group(params_b)
    series_a, series_b = upper_central_series(G_a), upper_central_series(G_b)
    parameters = {"family": family.value, "a": params_a.label(), "b": params_b.label()}
    failures: List[Dict[str, Any]] = []
    timeouts: List[Dict[str, Any]] = []
    if series_a.nilpotency_class != series_b.nilpotency_class:
        failures.append({"quantity": "class", "left": series_a.nilpotency_class, "right": series_b.nilpotency_class})
    for left, right in zip(series_a.terms, series_b.terms):
        if left.order != right.order or left.factor_invariants != right.factor_invariants:
            failures.append({"term": left.index, "left": left.factor_invariants, "right": right.factor_invariants})
    evidence: Dict[str, Any] = {"series_a": series_a.to_dict(), "series_b": series_b.to_dict()}

    if compare_derived and family is Family.J2 and params_a.m > 1 and params_a != params_b:
        derived_a, derived_b = derived_subgroup(G_a), derived_subgroup(G_b)
        evidence["derived_orders"] = [derived_a.order, derived_b.order]
        if derived_a.order != derived_b.order:
            failures.append({"quantity": "derived order", "left": derived_a.order, "right": derived_b.order})
        else:
            s = 2 ** (params_a.m - 1)
            A, B = G_a.generators[:2]
            hinted = [G_a.power(A, 2 * s), G_a.power(B, 2 * s), G_a.commutator(A, B)]
            hints: List[List[int]] = []
            if subgroup_closure(G_a, hinted).same_as(derived_a):
                D_a = subgroup_group(G_a, hinted, name=f"[{params_a.label()}]'")
                A2, B2 = G_b.generators[:2]
                hinted_b = [G_b.power(A2, 2 * s), G_b.power(B2, 2 * s), G_b.commutator(A2, B2)]
                D_b = subgroup_group(G_b, hinted_b if subgroup_closure(G_b, hinted_b).same_as(derived_b)
                                     else minimal_generators(G_b, derived_b), name=f"[{params_b.label()}]'")
                hints = _derived_hint(G_b, params_a, params_b, D_b)
            else:
                D_a = subgroup_group(G_a, minimal_generators(G_a, derived_a), name=f"[{params_a.label()}]'")
                D_b = subgroup_group(G_b, minimal_generators(G_b, derived_b), name=f"[{params_b.label()}]'")
            result = search_isomorphism(D_a, D_b, bench.budget, hints=hints)
            evidence["derived"] = result.to_dict()
            if result.outcome is SearchOutcome.EXHAUSTED:
                failures.append({"quantity": "derived subgroups", "reason": result.reason})
            elif result.outcome is SearchOutcome.TIMEOUT:
                timeouts.append({"quantity": "derived subgroups", "reason": result.reason})
    return _finish("series-factors", parameters, start, evidence, failures, timeouts)


@_guarded("appendix")
def verify_appendix(params: FamilyParams, bench: Optional[Workbench] = None,
                    grid: Optional[Dict[str, Sequence[int]]] = None,
                    include_lemmas: bool = True) -> CheckReport:
    """Evaluate the lift identities at J_2(alpha), m >= 3, over the grid; lemmas are reported alongside."""
    start = time.monotonic()
    bench = bench or Workbench()
    if params.family is not Family.J2 or params.m < 3:
        raise ParameterError(f"the lift identities need J2 with m >= 3, got {params.label()}")
    collector = bench.collector(params)
    z1 = center(bench.group(params))
    tallies = evaluate_catalogue(collector, "lift", grid, center=z1)
    evidence: Dict[str, Any] = {"identities": [t.to_dict() for t in tallies]}
    if include_lemmas:
        evidence["supplementary"] = [t.to_dict() for t in evaluate_catalogue(collector, "lemma", grid, center=z1)]
    failures = [{"identity": t.name, **t.witness} for t in tallies if not t.all_passed]
    parameters = {**_params_dict(params), "grid": {k: list(v) for k, v in (grid or {}).items()}}
    return _finish("appendix", parameters, start, evidence, failures)


@_guarded("residue-identities")
def verify_residue_identities(params: FamilyParams, bench: Optional[Workbench] = None,
                              grid: Optional[Dict[str, Sequence[int]]] = None) -> CheckReport:
    """Tally the normal-form identities behind the residue conditions (m >= 2). Informational."""
    start = time.monotonic()
    bench = bench or Workbench()
    if params.family is not Family.J2 or params.m < 2:
        raise ParameterError(f"the residue identities need J2 with m >= 2, got {params.label()}")
    tallies = evaluate_catalogue(bench.collector(params), "residue", grid)
    evidence = {"identities": [t.to_dict() for t in tallies]}
    failures = [{"identity": t.name, **t.witness} for t in tallies if not t.all_passed]
    return _finish("residue-identities", _params_dict(params), start, evidence, failures)


@_guarded("m2-map")
def verify_m2_map(params: FamilyParams, ell_prime: int, bench: Optional[Workbench] = None) -> CheckReport:
    """Solve the residue conditions for J_2(alpha') -> J_2(alpha) and certify the resulting map.

    Only m = 2 admits solutions; for m > 2 the check passes when the
    residue system is empty.
    """
    start = time.monotonic()
    bench = bench or Workbench()
    parameters = {**_params_dict(params), "ell_prime": ell_prime}
    if params.family is not Family.J2 or params.m < 2:
        raise ParameterError(f"needs J2 with m >= 2, got {params.label()}")
    if ell_prime == params.ell:
        return CheckReport(check_id="m2-map", parameters=parameters, status=CheckStatus.SKIPPED,
                           evidence={"reason": "alpha' equals alpha"}, elapsed=time.monotonic() - start)
    residues = solve_m2_residues(params, ell_prime)
    evidence: Dict[str, Any] = {"residue_solutions": len(residues)}
    failures: List[Dict[str, Any]] = []
    if params.m > 2:
        evidence["unsolvable"] = not residues
        if residues:
            failures.append({"residues": list(residues[0])})
        return _finish("m2-map", parameters, start, evidence, failures)

    source_params = make_params("J2", 2, params.m, ell_prime)
    certificate, solution = solve_m2_map(params, ell_prime, bench.group(params),
                                         presentation("J2", source_params), expected_order("J2", source_params))
    if certificate is None:
        failures.append({"residue_solutions": len(residues), "reason": "no (i, j, a, b) gives an isomorphism"})
    else:
        evidence["solution"] = dict(zip("ijab", solution))
        evidence["certificate"] = certificate.to_dict()
    return _finish("m2-map", parameters, start, evidence, failures)


@_guarded("lift-obstruction")
def verify_lift_obstruction(params: FamilyParams, ell1_values: Sequence[int] = (0, 1),
                            bench: Optional[Workbench] = None) -> CheckReport:
    """The two lift congruences never hold together for m > 2 (residue brute force)."""
    start = time.monotonic()
    counts = {ell1: lift_obstruction(params, ell1) for ell1 in ell1_values}
    failures = [{"ell1": ell1, **c} for ell1, c in counts.items() if c["both"]]
    return _finish("lift-obstruction", {**_params_dict(params), "ell1": list(ell1_values)}, start,
                   {"counts": {str(k): v for k, v in counts.items()}}, failures)


@_guarded("sufficiency-grid")
def verify_sufficiency_grid(case, pairs: Optional[Sequence[Tuple[int, int]]] = None,
                            p: Optional[int] = None, m: Optional[int] = None,
                            bench: Optional[Workbench] = None) -> CheckReport:
    """Certify the explicit map for every (ell, ell') pair of the grid."""
    start = time.monotonic()
    bench = bench or Workbench()
    case = CaseTag(case)
    defaults = DEFAULT_SUFFICIENCY_GRIDS[case]
    p = p or defaults["p"]
    m = m or defaults["m"]
    pairs = list(pairs or defaults["pairs"])
    family = {CaseTag.CASE1: "J1", CaseTag.CASE2: "J2", CaseTag.CASE3: "J3"}[case]
    failures: List[Dict[str, Any]] = []
    rows = []
    for ell, ell_prime in pairs:
        params_a = make_params(family, p, m, ell)
        params_b = make_params(family, p, m, ell_prime)
        row: Dict[str, Any] = {"pair": [ell, ell_prime], "alphas": [params_a.alpha, params_b.alpha]}
        try:
            certificate = explicit_sufficiency_map(family, params_a, params_b, bench.config,
                                                   target=bench.group(params_a))
        except (NoConstructiveClauseError, HomomorphismError) as e:
            failures.append({**row, "reason": str(e)})
            rows.append({**row, "certified": False})
            continue
        row["certified"] = True
        row["images"] = certificate.images
        try:
            f = find_f(params_a, ell_prime)
        except ParameterError:
            f = None
        if f is not None:
            report = check_sum_congruence(params_a, f)
            row["f"] = f
            row["sum_congruence"] = report.holds
            row["forms_agree"] = report.agree
        rows.append(row)
    evidence = {"pairs": rows, "certified": sum(r["certified"] for r in rows)}
    return _finish("sufficiency-grid", {"case": case.value, "p": p, "m": m}, start, evidence, failures)


async def run_checks(jobs: Sequence[Tuple[Callable[..., CheckReport], tuple, dict]]) -> List[CheckReport]:
    """Run independent checks concurrently in worker threads; results keep the job order."""
    tasks = [asyncio.to_thread(func, *args, **kwargs) for func, args, kwargs in jobs]
    return list(await asyncio.gather(*tasks))


def default_suite(bench: Workbench, slow: bool = False) -> List[Tuple[Callable[..., CheckReport], tuple, dict]]:
    """The standard batch of checks; ``slow`` adds the larger orders."""
    jobs: List[Tuple[Callable[..., CheckReport], tuple, dict]] = [
        (verify_structure, ("J2", make_params("J2", 2, 1, 1), bench), {}),
        (verify_structure, ("J2", make_params("J2", 2, 2, 1), bench), {}),
        (verify_structure, ("J1", make_params("J1", 3, 1, 1), bench), {}),
        (verify_m2_map, (make_params("J2", 2, 2, 1), 3, bench), {}),
        (verify_lift_obstruction, (make_params("J2", 2, 3, 1),), {"bench": bench}),
        (verify_sufficiency_grid, (CaseTag.CASE1,), {"bench": bench}),
        (verify_sufficiency_grid, (CaseTag.CASE2,), {"bench": bench}),
        (verify_theorem, ("D",), {"bench": bench}),
        (verify_pair, ("J1", make_params("J1", 5, 1, 1), make_params("J1", 5, 1, 6), bench), {}),
        (verify_series_factors, ("J1", make_params("J1", 5, 1, 1), make_params("J1", 5, 1, 2), bench), {}),
    ]
    if slow:
        jobs += [
            (verify_structure, ("J3", make_params("J3", 3, 1, 2), bench), {}),
            (verify_theorem, ("A",), {"bench": bench}),
            (verify_theorem, ("B",), {"bench": bench}),
            (verify_theorem, ("C",), {"bench": bench}),
            (verify_theorem, ("E",), {"bench": bench}),
            (verify_sufficiency_grid, (CaseTag.CASE3,), {"bench": bench}),
            *[(verify_appendix, (make_params("J2", 2, 3, ell), bench), {}) for ell in APPENDIX_ELLS],
            (verify_series_factors, ("J2", make_params("J2", 2, 3, 1), make_params("J2", 2, 3, 3), bench), {}),
        ]
    return jobs
