"""Single entry point for building the groups of every family."""
import logging
from typing import Optional, Union

from mcdw.cache.store import GroupCache
from mcdw.config.settings import Config
from mcdw.core.enumerate import LabelError, PermGroupGens, coset_enumerate, regular_action
from mcdw.core.group import DenseCapError, DenseGroup, build, quotient, upper_central_terms
from mcdw.core.params import h_exponent, j_exponent, make_params
from mcdw.core.presentations import Presentation, macdonald_presentation, presentation
from mcdw.models.params import Family, FamilyParams

logger = logging.getLogger(__name__)


def uses_presentation(family, params: FamilyParams) -> bool:
    """True when the family is built from its own presentation rather than as a quotient.

    H3/K3 have no stated presentation; the p = 2 presentations of H2/K2 are
    only stated for m > 1.
    """
    family = Family(family)
    if family.kind in ("J", "G"):
        return True
    if family.index == 3:
        return False
    return not (family.index == 2 and params.m == 1)


def _generator_names(family: Family):
    return ("a", "b") if family.kind == "K" else ("A", "B")


def group_from_presentation(
    pres: Presentation,
    config: Optional[Config] = None,
    name: str = "",
    power_exponent: Optional[int] = None,
) -> DenseGroup:
    """Build the regular dense group of ``pres``.

    With ``power_exponent`` (the order of x) the regular action is rebuilt
    from the cosets of <x>, which keeps the table small; if the labels are
    not determined this falls back to enumerating over the trivial subgroup.

    Raises:
        DenseCapError: If the order exceeds ``config.dense_cap``
    """
    config = config or Config(use_cache=False)
    if power_exponent is not None:
        try:
            gens = regular_action(pres, power_exponent, limit=config.coset_limit, strategy=config.strategy,
                                  deduction_limit=config.deduction_limit)
        except LabelError as exc:
            logger.warning("Falling back to the trivial subgroup for %s: %s", name or pres.name, exc)
        else:
            if gens.degree > config.dense_cap:
                raise DenseCapError(f"{name or pres.name} has order {gens.degree}, above the dense cap {config.dense_cap}")
            return build(gens, cap=config.dense_cap, name=name or pres.name)
    table = coset_enumerate(pres, (), limit=config.coset_limit, strategy=config.strategy,
                            deduction_limit=config.deduction_limit)
    if table.index > config.dense_cap:
        raise DenseCapError(f"{name or pres.name} has order {table.index}, above the dense cap {config.dense_cap}")
    gens = PermGroupGens.from_table(table, faithful=True, group_order=table.index)
    return build(gens, cap=config.dense_cap, name=name or pres.name)


def build_group(
    family,
    params: FamilyParams,
    config: Optional[Config] = None,
    cache: Optional[GroupCache] = None,
) -> DenseGroup:
    """Build (or load from the cache) the group of ``family`` at ``params``."""
    family = Family(family)
    config = config or Config(use_cache=False)
    if cache is None and config.use_cache:
        cache = GroupCache(config.cache_dir)
    if cache is not None:
        cached = cache.load(params)
        if cached is not None:
            return cached

    label = params.label()
    if family is Family.G:
        G = group_from_presentation(macdonald_presentation(params.beta), config, name=label)
    elif uses_presentation(family, params):
        exponent = j_exponent(params) if family.kind == "J" else h_exponent(params)
        G = group_from_presentation(presentation(family, params), config, name=label, power_exponent=exponent)
    else:
        parent = make_params(f"J{family.index}", params.p, params.m, params.ell)
        J = build_group(parent.family, parent, config, cache)
        terms = upper_central_terms(J)
        N = terms[0] if family.kind == "H" else terms[1]
        G = quotient(J, N, name=label)
    G.generator_names = _generator_names(family)
    logger.info("Built %s of order %s", label, G.order)
    if cache is not None:
        cache.save(params, G)
    return G


def source_for(family, params: FamilyParams, config: Optional[Config] = None,
               cache: Optional[GroupCache] = None) -> Union[Presentation, DenseGroup]:
    """Presentation when one is used for construction, otherwise the built group."""
    family = Family(family)
    if family is Family.G:
        return macdonald_presentation(params.beta)
    if uses_presentation(family, params):
        return presentation(family, params)
    return build_group(family, params, config, cache)
