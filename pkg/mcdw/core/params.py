"""Exact parameter arithmetic, case classification and congruence predicates."""
import logging
from itertools import product
from typing import Dict, List, Optional, Tuple, Union

from sympy import factorint, isprime

from mcdw.models.params import CaseTag, CongruenceReport, Family, FamilyParams

logger = logging.getLogger(__name__)


class ParameterError(ValueError):
    """Raised for invalid parameters or unsatisfiable parameter requests."""


FamilyLike = Union[Family, str]

# beta values for which G(beta) and G(2 - beta) are isomorphic
_THEOREM_D_SELF_PAIRED = frozenset({-3, -1, 0, 1, 2, 3, 5})

_CASE_OF_INDEX = {1: CaseTag.CASE1, 2: CaseTag.CASE2, 3: CaseTag.CASE3}


def classify(p: int, m: int, ell: int) -> CaseTag:
    """Return the case tag for (p, m, ell).

    Raises:
        ParameterError: If p is not prime, m < 1 or p divides ell
    """
    if not isprime(p):
        raise ParameterError(f"p must be prime, got {p}")
    if m < 1:
        raise ParameterError(f"m must be positive, got {m}")
    if ell % p == 0:
        raise ParameterError(f"p={p} divides ell={ell}")
    if p == 2:
        return CaseTag.CASE2
    if (p, m) == (3, 1) and ell % 3 == 2:
        return CaseTag.CASE3
    return CaseTag.CASE1


def make_params(
    family: FamilyLike,
    p: Optional[int] = None,
    m: Optional[int] = None,
    ell: Optional[int] = None,
    beta: Optional[int] = None,
) -> FamilyParams:
    """Build validated FamilyParams, deriving alpha and the case tag.

    Raises:
        ParameterError: If the parameters are invalid for the family
    """
    family = Family(family)
    if family is Family.G:
        if beta is None:
            raise ParameterError("family G requires beta")
        return FamilyParams(family=family, beta=beta)
    if p is None or m is None or ell is None:
        raise ParameterError(f"family {family.value} requires p, m and ell")
    case = classify(p, m, ell)
    if _CASE_OF_INDEX[family.index] is not case:
        raise ParameterError(
            f"{family.value} needs {_CASE_OF_INDEX[family.index].value}, "
            f"but (p={p}, m={m}, ell={ell}) is {case.value}"
        )
    return FamilyParams(family=family, p=p, m=m, ell=ell, case=case)


def sibling(params: FamilyParams, ell: int, family: Optional[FamilyLike] = None) -> FamilyParams:
    """Same p and m with another ell (and optionally another family)."""
    return make_params(family or params.family, params.p, params.m, ell)


def j_exponent(params: FamilyParams) -> int:
    """Exponent of the J-level power relators."""
    if params.case is CaseTag.CASE1:
        return params.p ** (3 * params.m)
    if params.case is CaseTag.CASE2:
        return 2 ** (3 * params.m - 1)
    return 81


def h_exponent(params: FamilyParams) -> int:
    """Exponent of the H- and K-level power relators."""
    if params.case is CaseTag.CASE1:
        return params.p ** (2 * params.m)
    if params.case is CaseTag.CASE2:
        return 2 ** (2 * params.m - 1)
    return 27


def _require_j(family: FamilyLike) -> Family:
    family = Family(family)
    if family.kind != "J":
        raise ParameterError(
            f"no closed form for {family.value}: derive by quotient/enumeration"
        )
    return family


def expected_order(family: FamilyLike, params: FamilyParams) -> int:
    """|J_i(alpha)|: p^{7m}, 2^{7m-3} or 3^{10}."""
    family = _require_j(family)
    if params.case is CaseTag.CASE1:
        return params.p ** (7 * params.m)
    if params.case is CaseTag.CASE2:
        return 2 ** (7 * params.m - 3)
    return 3 ** 10


def expected_class(family: FamilyLike, params: FamilyParams) -> int:
    """Nilpotency class of J_i(alpha)."""
    family = _require_j(family)
    if params.case is CaseTag.CASE3:
        return 7
    if params.case is CaseTag.CASE2 and params.m == 1:
        return 3
    return 5


def tri(i: int) -> int:
    return i * (i - 1) // 2


def tet(n: int) -> int:
    return n * (n - 1) * (n - 2) // 6


def _check_same_case(params: FamilyParams, ell_prime: int) -> None:
    other = classify(params.p, params.m, ell_prime)
    if other is not params.case:
        raise ParameterError(f"ell'={ell_prime} is {other.value}, expected {params.case.value}")


def find_f(params: FamilyParams, ell_prime: int) -> int:
    """Minimal f = 1 + k*step with alpha^f ≡ alpha' modulo the J exponent.

    Raises:
        ParameterError: If ell' violates the congruence precondition ("no f")
    """
    _check_same_case(params, ell_prime)
    p, m = params.p, params.m
    if params.case is not CaseTag.CASE3 and (ell_prime - params.ell) % p ** m:
        raise ParameterError(
            f"no f: ell'={ell_prime} is not congruent to ell={params.ell} mod {p ** m}"
        )
    modulus = j_exponent(params)
    step = 3 if params.case is CaseTag.CASE3 else p ** m
    target = (1 + p ** m * ell_prime) % modulus
    for k in range(modulus):
        f = 1 + k * step
        if pow(params.alpha, f, modulus) == target:
            logger.debug("find_f(%s, ell'=%s) -> %s", params.label(), ell_prime, f)
            return f
    raise ParameterError(f"no f for {params.label()} and ell'={ell_prime}")


def sum_modulus(params: FamilyParams) -> int:
    if params.case is CaseTag.CASE1:
        return params.p ** params.m
    if params.case is CaseTag.CASE2:
        return 2 ** (params.m - 1)
    return 9


def check_sum_congruence(params: FamilyParams, f: int) -> CongruenceReport:
    """Evaluate alpha + 2alpha^2 + ... + (f-1)alpha^{f-1} ≡ 0 and its reduced forms."""
    if f < 1:
        raise ParameterError(f"f must be positive, got {f}")
    alpha = params.alpha
    total = 0
    power = 1
    for i in range(1, f):
        power *= alpha
        total += i * power
    modulus = sum_modulus(params)
    report = CongruenceReport.evaluate("power-sum", modulus, total, 0, alpha=alpha, f=f)

    if params.case is CaseTag.CASE3:
        if (f - 1) % 3 == 0:
            k = (f - 1) // 3
            squares = (f - 1) * f * (2 * f - 1) // 6
            report.variants.append(
                CongruenceReport.evaluate("power-sum.mod9", 9, tri(f) + (alpha - 1) * squares, 0, k=k)
            )
            report.variants.append(
                CongruenceReport.evaluate(
                    "power-sum.mod3", 3, k * f * (1 + (2 * (f - 1) + 1) * params.ell), 0, k=k
                )
            )
    else:
        report.variants.append(CongruenceReport.evaluate("power-sum.closed", modulus, tri(f), 0))
    return report


def _iso_mod(a: FamilyParams, b: FamilyParams, modulus: int) -> bool:
    return (a.alpha - b.alpha) % modulus == 0


def iso_predicate(family: FamilyLike, params_a: FamilyParams, params_b: FamilyParams) -> bool:
    """Decide isomorphism from the classification theorems.

    Raises:
        ParameterError: If the two parameter sets are in different slices
    """
    family = Family(family)
    if family is Family.G:
        return theorem_d_predicate(params_a.beta, params_b.beta)
    if (params_a.p, params_a.m) != (params_b.p, params_b.m) or params_a.case is not params_b.case:
        raise ParameterError(
            f"mixed parameters: {params_a.label()} and {params_b.label()} "
            f"are not in the same (p, m, case) slice"
        )
    p, m = params_a.p, params_a.m
    if params_a.case is CaseTag.CASE3:
        return True
    if family.kind == "K":
        return True
    if params_a.case is CaseTag.CASE1:
        if (p, m) == (3, 1):
            return True
        return _iso_mod(params_a, params_b, p ** (2 * m))
    if family.kind == "J":
        if m in (1, 2):
            return True
        return _iso_mod(params_a, params_b, 2 ** (2 * m))
    if m in (1, 2, 3):
        return True
    return _iso_mod(params_a, params_b, 2 ** (2 * m - 2))


def find_t(params: FamilyParams, alpha_prime: int) -> int:
    """Smallest positive t prime to p with alpha^t ≡ alpha' (mod p^{2m} or 2^{2m-1})."""
    if params.case is CaseTag.CASE1:
        modulus = params.p ** (2 * params.m)
    elif params.case is CaseTag.CASE2:
        modulus = 2 ** (2 * params.m - 1)
    else:
        raise ParameterError("find_t is defined for Cases 1 and 2 only")
    target = alpha_prime % modulus
    for t in range(1, modulus * params.p + 1):
        if t % params.p and pow(params.alpha, t, modulus) == target:
            return t
    raise ParameterError(f"internal error: no t with {params.alpha}^t ≡ {alpha_prime} mod {modulus}")


def class_count(family: FamilyLike, p: int, m: int, case: CaseTag = CaseTag.CASE1) -> int:
    """Number of isomorphism classes in a (family, p, m) slice, by brute force over ell."""
    family = Family(family)
    span = p ** (m + 1) if p != 3 or m != 1 else 27
    representatives: List[FamilyParams] = []
    for ell in range(1, span + 1):
        if ell % p == 0 or classify(p, m, ell) is not case:
            continue
        candidate = make_params(Family(f"{family.kind}{_index_of(case)}"), p, m, ell)
        if not any(iso_predicate(family, rep, candidate) for rep in representatives):
            representatives.append(candidate)
    return len(representatives)


def _index_of(case: CaseTag) -> int:
    return {CaseTag.CASE1: 1, CaseTag.CASE2: 2, CaseTag.CASE3: 3}[case]


def _sylow_order(p: int, v: int, ell: int) -> int:
    if p == 2:
        return 2 ** (7 * v - 3)
    if (p, v) == (3, 1):
        return 3 ** 7 if ell % 3 == 1 else 3 ** 10
    return p ** (7 * v)


def sylow_parameters(beta: int) -> List[FamilyParams]:
    """Parameters of the Sylow subgroups J_i(beta) of G(beta), one per prime of beta - 1."""
    if beta == 1:
        raise ParameterError("G(1) is infinite")
    n = beta - 1
    result = []
    for p, v in sorted(factorint(abs(n)).items()):
        ell = n // p ** v
        case = classify(p, v, ell)
        result.append(make_params(f"J{_index_of(case)}", p, v, ell))
    return result


def macdonald_order(beta: int) -> int:
    """|G(beta)| as the product of its Sylow orders."""
    order = 1
    for params in sylow_parameters(beta):
        order *= _sylow_order(params.p, params.m, params.ell)
    return order


def theorem_d_predicate(alpha: int, beta: int) -> bool:
    """G(alpha) ≅ G(beta) iff beta = alpha, or beta = 2 - alpha with alpha self-paired."""
    if beta == alpha:
        return True
    return beta == 2 - alpha and alpha in _THEOREM_D_SELF_PAIRED


def sylow_wise_predicate(alpha: int, beta: int) -> bool:
    """Decide G(alpha) ≅ G(beta) prime by prime through iso_predicate on the Sylow subgroups."""
    if alpha == beta:
        return True
    sylows_a = {params.p: params for params in sylow_parameters(alpha)}
    sylows_b = {params.p: params for params in sylow_parameters(beta)}
    if set(sylows_a) != set(sylows_b):
        return False
    for p, params_a in sylows_a.items():
        params_b = sylows_b[p]
        if (params_a.m, params_a.case) != (params_b.m, params_b.case):
            return False
        if not iso_predicate(params_a.family, params_a, params_b):
            return False
    return True


def _q_of(params: FamilyParams, ell_prime: int) -> int:
    s = params.constants.s
    q, rem = divmod(ell_prime - params.ell, s)
    if rem or q % 2 == 0:
        raise ParameterError(
            f"ell'={ell_prime} must equal ell + q*s with q odd (ell={params.ell}, s={s})"
        )
    return q


def m2_congruences(
    params: FamilyParams, ell_prime: int, i: int, j: int, a: int, b: int
) -> List[CongruenceReport]:
    """The residue conditions for the map X -> A^{1+s+2si}B^{2sj}, Y -> A^sBA^{2sa}B^{2sb}."""
    c = params.constants
    ell = params.ell
    q = _q_of(params, ell_prime)
    r = c.r
    return [
        CongruenceReport.evaluate(
            "residue.x", c.s, ell * (i + b + 2 * j), -ell + r + (q + ell) // 2, q=q
        ),
        CongruenceReport.evaluate("residue.y", c.s, ell * (i + b + 2 * a), (q - 3 * ell) // 2, q=q),
        CongruenceReport.evaluate("residue.commutator", c.s, 2 * ell * (j - a), r + ell, q=q),
    ]


def solve_m2_residues(params: FamilyParams, ell_prime: int) -> List[Tuple[int, int, int, int]]:
    """All (i, j, a, b) in [0, s)^4 satisfying the three residue conditions."""
    s = params.constants.s
    solutions = []
    for i, j, a, b in product(range(s), repeat=4):
        if all(rep.holds for rep in m2_congruences(params, ell_prime, i, j, a, b)):
            solutions.append((i, j, a, b))
    return solutions


def lift_congruences(
    params: FamilyParams, ell1_prime: int, i: int, j: int, a: int, b: int
) -> Tuple[CongruenceReport, CongruenceReport]:
    """Both residue conditions that an isomorphism with ell' = ell - r - s*ell'_1 would force."""
    c = params.constants
    if params.m < 3:
        raise ParameterError("these conditions need m >= 3")
    s, u, r, rb = c.s, c.u, c.r, c.rbar
    ell = params.ell
    l1 = ell1_prime
    ell_p = ell - r - s * l1
    modulus = 4 * u * s
    first = (
        u * (1 - ell) + 4 * u * ell * (i + 2 * a + b + 2) + 2 * u * l1 + u * r * (ell + 1)
        + u * s * (ell + l1) + u * s * r + 2 * u * s * (a + b + l1)
    )
    second = (
        -u * (ell + 1) - 2 * u * l1 - 4 * u * ell * (i + 2 * j + b + 1) - u * r * (ell - 1)
        + u * s * (rb - ell + l1 + 1) + u * s * r * (rb + 1) + u * tet(2 * s * ell_p)
        + 2 * u * s * (a + b + l1 + 1)
    )
    return (
        CongruenceReport.evaluate("lift.left", modulus, first, 0, ell_prime=ell_p),
        CongruenceReport.evaluate("lift.right", modulus, second, 0, ell_prime=ell_p),
    )


def lift_obstruction(params: FamilyParams, ell1_prime: int) -> Dict[str, int]:
    """Count residue tuples satisfying each LR condition and both together.

    The "both" count is zero whenever no isomorphism of the shape exists.
    """
    s = params.constants.s
    counts = {"first": 0, "second": 0, "both": 0, "tuples": 0}
    for i, j, a, b in product(range(s), repeat=4):
        first, second = lift_congruences(params, ell1_prime, i, j, a, b)
        counts["tuples"] += 1
        counts["first"] += first.holds
        counts["second"] += second.holds
        counts["both"] += first.holds and second.holds
    return counts
