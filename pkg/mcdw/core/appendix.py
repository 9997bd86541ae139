"""Catalogue of normal-form identities in J_2(alpha), evaluated with a collector.

Notation: s = 2^(m-1), u = s^2, r = s/2, rb = r/2, alpha = 1 + 2 s ell and
alpha' = 1 + 2 s ell'. X and Y are the candidate images of the generators
of J_2(alpha') and C = [A, B]. The ``lift`` set needs m >= 3 and the
``residue`` set m >= 2; the ``lemma`` set collects the commutator
evaluations used to derive the commutator-mod-center identity.
"""
import logging
from dataclasses import asdict, dataclass
from itertools import product
from typing import Callable, Dict, Iterable, List, Optional, Sequence

from mcdw.core.collect import Collector, ExpTriple
from mcdw.core.group import Subgroup
from mcdw.core.params import tet
from mcdw.models.params import FamilyParams

logger = logging.getLogger(__name__)

DEFAULT_GRID = {"i": (0, 1), "j": (0, 1), "a": (0, 1), "b": (0, 1), "ell1": (0, 1)}


@dataclass(frozen=True)
class Point:
    """One grid point: the constants of J_2(alpha) plus the free integers."""

    s: int
    u: int
    r: int
    rb: int
    ell: int
    ell_p: int
    i: int = 0
    j: int = 0
    a: int = 0
    b: int = 0

    @property
    def alpha(self) -> int:
        return 1 + 2 * self.s * self.ell

    @property
    def alpha_p(self) -> int:
        return 1 + 2 * self.s * self.ell_p

    @property
    def phi_s(self) -> int:
        return tet(self.s)


Side = Callable[[Collector, Point], ExpTriple]


@dataclass(frozen=True)
class Identity:
    name: str
    group: str
    left: Side
    right: Side
    modulo_center: bool = False
    min_m: int = 2


@dataclass
class IdentityTally:
    """Pass count of one identity over a grid."""

    name: str
    group: str
    checked: int = 0
    passed: int = 0
    witness: Optional[Dict] = None

    @property
    def all_passed(self) -> bool:
        return self.checked > 0 and self.passed == self.checked

    def to_dict(self) -> Dict:
        data = {"name": self.name, "group": self.group, "checked": self.checked, "passed": self.passed}
        if self.witness is not None:
            data["witness"] = self.witness
        return data


def point_for(params: FamilyParams, ell_p: int, i: int = 0, j: int = 0, a: int = 0, b: int = 0) -> Point:
    c = params.constants
    return Point(s=c.s, u=c.u, r=c.r or 0, rb=c.rbar or 0, ell=params.ell, ell_p=ell_p, i=i, j=j, a=a, b=b)


def _abc(col: Collector, a: int, b: int, c: int, tail: int = 0) -> ExpTriple:
    """A^a B^b C^c A^tail for arbitrary integer exponents."""
    return col.eval_word_nf([("A", a), ("B", b), ("C", c), ("A", tail)])


def _abr(p: Point):
    return [("A", 1), ("B", p.r)]


def _x(col: Collector, p: Point) -> ExpTriple:
    """(AB^r)^(1+s) A^(2si) B^(2sj)."""
    return col.eval_word_nf([(_abr(p), 1 + p.s), ("A", 2 * p.s * p.i), ("B", 2 * p.s * p.j)])


def _y(col: Collector, p: Point) -> ExpTriple:
    """B^(1+r) (AB^r)^s A^(2sa) B^(2sb)."""
    return col.eval_word_nf([("B", 1 + p.r), (_abr(p), p.s), ("A", 2 * p.s * p.a), ("B", 2 * p.s * p.b)])


def _x0(col: Collector, p: Point) -> ExpTriple:
    """A^(1+s+2si) B^(2sj)."""
    return col.eval_word_nf([("A", 1 + p.s + 2 * p.s * p.i), ("B", 2 * p.s * p.j)])


def _y0(col: Collector, p: Point) -> ExpTriple:
    """A^s B A^(2sa) B^(2sb)."""
    return col.eval_word_nf([("A", p.s), ("B", 1), ("A", 2 * p.s * p.a), ("B", 2 * p.s * p.b)])


def _self_conj(first: Side, second: Side) -> Side:
    """g^[g, h] with g = first, h = second."""
    def side(col: Collector, p: Point) -> ExpTriple:
        g, h = first(col, p), second(col, p)
        return col.nf_conj(g, col.nf_comm(g, h))
    return side


def _alpha_prime_power(base: Side) -> Side:
    def side(col: Collector, p: Point) -> ExpTriple:
        return col.nf_pow(base(col, p), p.alpha_p)
    return side


def _comm(a_side: Callable[[Point], tuple], b_side: Callable[[Point], tuple]) -> Side:
    """[L^e, M^f] for basic letters, each given as (letter, exponent)."""
    def side(col: Collector, p: Point) -> ExpTriple:
        return col.nf_comm(col.basic_power(*a_side(p)), col.basic_power(*b_side(p)))
    return side


def _word(factors: Callable[[Point], list]) -> Side:
    def side(col: Collector, p: Point) -> ExpTriple:
        return col.eval_word_nf(factors(p))
    return side


def _x_head(p: Point):
    return ("A", 1 + p.s), ("B", p.r + p.s * p.r + p.u * p.rb * p.ell), ("C", -p.s * p.rb)


def _y_head(p: Point):
    s, u, r, rb, ell = p.s, p.u, p.r, p.rb, p.ell
    return ("A", s - u * ell), ("B", 1 + r + s * r - u * rb * ell), ("C", s * (rb - 1) - s * r + u * (rb * ell + ell - rb))


def _lift_exponent_e(p: Point) -> int:
    s, u, r, rb = p.s, p.u, p.r, p.rb
    return 1 + r + s - s * r + 2 * s * (p.i + p.b) + u * (rb + p.i + p.a + 1)


LIFT_IDENTITIES: List[Identity] = [
    Identity(
        "abr-power-1s", "lift",
        _word(lambda p: [(_abr(p), 1 + p.s)]),
        _word(lambda p: list(_x_head(p)) + [
            ("A", p.u * p.phi_s * p.ell + p.u * p.r * p.ell * (p.rb - 1) + p.u * p.s * p.rb * (p.ell - 1))
        ]),
        min_m=3,
    ),
    Identity(
        "x-head-times-tail", "lift",
        _word(lambda p: list(_x_head(p)) + [("A", 2 * p.s * p.i), ("B", 2 * p.s * p.j)]),
        lambda col, p: _abc(
            col, 1 + p.s + 2 * p.s * p.i, p.r + p.s * p.r + 2 * p.s * p.j + p.u * p.rb * p.ell,
            -p.s * p.rb - p.u * p.i, 2 * p.u * p.s * p.i + p.u * p.s * p.r * p.i,
        ),
        min_m=3,
    ),
    Identity(
        "x-image", "lift", _x,
        lambda col, p: _abc(
            col, 1 + p.s + 2 * p.s * p.i, p.r + p.s * p.r + 2 * p.s * p.j + p.u * p.rb * p.ell,
            -p.s * p.rb - p.u * p.i,
            p.u * p.r * p.ell * (p.rb - 1) + p.u * p.phi_s * p.ell + p.u * p.s * p.rb * (p.ell - 1)
            + p.u * p.s * p.r * p.i + 2 * p.u * p.s * p.i,
        ),
        min_m=3,
    ),
    Identity(
        "abr-power-s", "lift",
        _word(lambda p: [(_abr(p), p.s)]),
        lambda col, p: _abc(
            col, p.s, p.s * p.r - p.u * p.rb * p.ell, -p.u * p.rb + p.s * p.rb,
            p.u * p.phi_s * p.ell - p.u * p.r * p.rb * p.ell + p.u * p.s * p.r * p.rb
            + p.u * p.s * p.rb * p.ell ** 2,
        ),
        min_m=3,
    ),
    Identity(
        "b-times-abr-s-head", "lift",
        _word(lambda p: [("B", 1 + p.r), ("A", p.s), ("B", p.s * p.r - p.u * p.rb * p.ell),
                         ("C", -p.u * p.rb + p.s * p.rb)]),
        _word(lambda p: list(_y_head(p)) + [
            ("A", p.u * p.s * (p.rb * p.ell + p.rb + p.ell + 1) + 2 * p.u * p.s)
        ]),
        min_m=3,
    ),
    Identity(
        "b-abr-s", "lift",
        _word(lambda p: [("B", 1 + p.r), (_abr(p), p.s)]),
        _word(lambda p: list(_y_head(p)) + [
            ("A", -p.u * p.r * p.rb * p.ell + p.u * p.s * (p.rb * p.ell + p.ell + 1)
             + p.u * p.s * p.r * (p.rb + 1) + p.u * p.phi_s * p.ell + 2 * p.u * p.s)
        ]),
        min_m=3,
    ),
    Identity(
        "y-head-times-tail", "lift",
        _word(lambda p: list(_y_head(p)) + [("A", 2 * p.s * p.a), ("B", 2 * p.s * p.b)]),
        lambda col, p: _abc(
            col, p.s + 2 * p.s * p.a - p.u * p.ell, 1 + p.r + p.s * p.r + 2 * p.s * p.b - p.u * p.rb * p.ell,
            p.s * (p.rb - 1) - 2 * p.s * p.a - p.s * p.r + p.u * (p.ell - p.a),
            -2 * p.u * p.ell * p.a + p.u * p.s * p.rb * (p.ell - 1) + p.u * p.s * p.r * p.a,
        ),
        min_m=3,
    ),
    Identity(
        "y-image", "lift", _y,
        lambda col, p: _abc(
            col, p.s + 2 * p.s * p.a - p.u * p.ell, 1 + p.r + 2 * p.s * p.b + p.s * p.r - p.u * p.rb * p.ell,
            p.s * (p.rb - 1) - 2 * p.s * p.a - p.s * p.r + p.u * (p.ell - p.a),
            -2 * p.u * p.ell * p.a - p.u * p.r * p.rb * p.ell + p.u * p.s * (p.ell - p.rb + 1)
            + p.u * p.phi_s * p.ell + p.u * p.s * p.r * (p.rb + p.a) + 2 * p.u * p.s,
        ),
        min_m=3,
    ),
    Identity(
        "commutator-mod-center", "lift",
        lambda col, p: col.nf_comm(_x(col, p), _y(col, p)),
        lambda col, p: _abc(
            col, p.u, p.s * p.r * p.ell + p.u * (p.rb + 1), _lift_exponent_e(p),
        ),
        modulo_center=True,
        min_m=3,
    ),
    Identity(
        "x-conjugated-by-commutator", "lift", _self_conj(_x, _y),
        lambda col, p: _abc(
            col, 1 + p.s + 2 * p.s * (p.i + p.ell) + p.u * p.ell,
            p.r + p.s * p.r + 2 * p.s * p.j + p.u * p.ell * (p.rb - 1),
            -p.s * p.rb + p.s * p.r * p.ell + p.u * (p.rb - p.i + 1),
            4 * p.u * p.ell * (2 * p.i + p.j + p.b + 1) + p.u * p.r * p.ell * (p.rb + p.ell)
            + p.u * p.phi_s * p.ell + p.u * p.s * (p.ell - p.rb + 1) + p.u * p.s * p.r * p.i
            + 2 * p.u * p.s * (p.j + p.a + p.b + 1),
        ),
        min_m=3,
    ),
    Identity(
        "x-power-alpha-prime", "lift", _alpha_prime_power(_x),
        lambda col, p: _abc(
            col, 1 + p.s + 2 * p.s * (p.i + p.ell_p),
            p.r + p.s * p.r + 2 * p.s * p.j + p.u * (p.rb * p.ell + p.ell_p),
            -p.s * p.rb - p.s * p.r * p.ell_p - p.u * p.i,
            2 * p.u * p.ell_p * (2 * p.i - 2 * p.j + 1) + p.u * p.r * p.ell * (p.rb - p.ell_p - 1)
            + p.u * p.phi_s * p.ell
            + p.u * p.s * (p.rb * p.ell + p.rb * p.ell * p.ell_p - p.rb - p.ell * p.ell_p - p.ell_p)
            + 2 * p.u * p.s * p.i + p.u * tet(2 * p.s * p.ell_p) + p.u * p.s * p.r * p.i,
        ),
        min_m=3,
    ),
    Identity(
        "y-conjugated-by-commutator", "lift", _self_conj(_y, _x),
        lambda col, p: _abc(
            col, p.s + 2 * p.s * p.a - p.u * p.ell,
            1 + p.r + 2 * p.s * (p.b + p.ell) + p.s * p.r - p.u * p.rb * p.ell,
            p.s * (p.rb - 1) - 2 * p.s * p.a - p.s * p.r + p.u * (p.ell - p.a + 1),
            -2 * p.u * p.ell * (2 * p.i + 3 * p.a + 4 * p.b + 3) - p.u * p.r * p.ell * (p.rb + 1)
            - p.u * p.s * p.rb + p.u * p.phi_s * p.ell + p.u * p.s * p.r * (p.rb + p.a) + 2 * p.u * p.s,
        ),
        min_m=3,
    ),
    Identity(
        "y-power-alpha-prime", "lift", _alpha_prime_power(_y),
        lambda col, p: _abc(
            col, p.s + 2 * p.s * p.a - p.u * p.ell,
            1 + p.r + 2 * p.s * (p.b + p.ell_p) + p.s * p.r + p.u * (p.ell_p - p.rb * p.ell),
            p.s * (p.rb - 1) - 2 * p.s * p.a - p.s * p.r + p.u * (p.ell - p.a + p.ell_p),
            2 * p.u * (2 * p.a * p.ell_p - p.ell * p.a - 2 * p.b * p.ell_p + p.ell_p)
            - p.u * p.r * p.rb * p.ell
            + p.u * p.s * (p.ell - p.rb + 1 - p.ell * p.ell_p - p.ell_p)
            + p.u * p.phi_s * p.ell + p.u * p.s * p.r * (p.rb + p.a) + 2 * p.u * p.s * (p.ell_p + 1),
        ),
        min_m=3,
    ),
]


def _e(p: Point) -> int:
    return _lift_exponent_e(p)


def _x_b(p: Point) -> int:
    return p.r + p.s * p.r + 2 * p.s * p.j + p.u * p.rb * p.ell


def _k(p: Point) -> int:
    return p.s * p.r * p.ell + p.u * (p.rb + 1)


def _y_b(p: Point) -> int:
    return 1 + p.r + 2 * p.s * p.b + p.s * p.r - p.u * p.rb * p.ell


def _y_c(p: Point) -> int:
    return p.s * (p.rb - 1) - 2 * p.s * p.a - p.s * p.r + p.u * (p.ell - p.a)


LEMMA_IDENTITIES: List[Identity] = [
    Identity("lemma.x1", "lemma", _comm(lambda p: ("A", p.u), lambda p: ("B", _x_b(p))),
             _word(lambda p: [("A", p.u * p.s * p.r)]), min_m=3),
    Identity("lemma.x2", "lemma", _comm(lambda p: ("C", -p.s * p.rb - p.u * p.i), lambda p: ("A", p.u)),
             _word(lambda p: []), min_m=3),
    Identity("lemma.x3", "lemma",
             _comm(lambda p: ("A", 1 + p.s + 2 * p.s * p.i), lambda p: ("B", _k(p))),
             _word(lambda p: [("C", _k(p)), ("A", p.u * p.r * p.ell ** 2 + p.u * p.s * p.ell * (p.rb + 1)
                                              + p.u * p.s * p.r)]), min_m=3),
    Identity("lemma.x4", "lemma", _comm(lambda p: ("C", -p.s * p.rb - p.u * p.i), lambda p: ("B", _k(p))),
             _word(lambda p: []), min_m=3),
    Identity("lemma.x5", "lemma", _comm(lambda p: ("C", _k(p)), lambda p: ("B", _x_b(p))),
             _word(lambda p: [("B", p.u * p.s * p.r)]), min_m=3),
    Identity("lemma.x6", "lemma",
             _comm(lambda p: ("C", _e(p)), lambda p: ("A", 1 + p.s + 2 * p.s * p.i)),
             _word(lambda p: [("A", -2 * p.s * p.ell - p.u * p.ell),
                              ("A", -4 * p.u * p.ell * (2 * p.i + p.b + 1) - p.u * p.s * p.ell ** 2
                               + 2 * p.u * p.s * (p.rb + p.a + 1) + p.u * p.s * p.r)]), min_m=3),
    Identity("lemma.x7", "lemma", _comm(lambda p: ("C", _e(p)), lambda p: ("B", _x_b(p))),
             _word(lambda p: [("B", p.u * p.ell),
                              ("B", 4 * p.u * p.ell * p.j + p.u * p.r * p.ell
                               + 2 * p.u * p.s * (p.rb + p.i + p.j + p.b) + p.u * p.s * p.r)]), min_m=3),
    Identity("lemma.y1", "lemma",
             _comm(lambda p: ("C", -_e(p)), lambda p: ("A", p.s + 2 * p.s * p.a - p.u * p.ell)),
             _word(lambda p: [("A", 2 * p.u * p.ell * (2 * p.a + 1) + p.u * p.s * p.ell
                               + 2 * p.u * p.s * p.a)]), min_m=3),
    Identity("lemma.y2", "lemma", _comm(lambda p: ("C", -_e(p)), lambda p: ("B", _y_b(p))),
             _word(lambda p: [("B", -2 * p.s * p.ell),
                              ("B", -4 * p.u * p.ell * (p.i + 2 * p.b + 1) - p.u * p.r * p.ell
                               + p.u * p.s * (p.ell + 1) + 2 * p.u * p.s * p.a)]), min_m=3),
    Identity("lemma.y3", "lemma",
             _comm(lambda p: ("A", p.s + 2 * p.s * p.a - p.u * p.ell), lambda p: ("B", -_k(p))),
             _word(lambda p: [("A", p.u * p.s * p.r)]), min_m=3),
    Identity("lemma.y4", "lemma", _comm(lambda p: ("C", _y_c(p)), lambda p: ("B", -_k(p))),
             _word(lambda p: []), min_m=3),
    Identity("lemma.y5", "lemma",
             _comm(lambda p: ("A", -p.u), lambda p: ("B", _y_b(p) + 2 * p.s * p.ell)),
             _word(lambda p: [("C", -p.u), ("A", -p.u * p.s * p.ell + p.u * p.s * p.r)]), min_m=3),
    Identity("lemma.y6", "lemma", _comm(lambda p: ("C", _y_c(p)), lambda p: ("A", -p.u)),
             _word(lambda p: []), min_m=3),
]

RESIDUE_IDENTITIES: List[Identity] = [
    Identity(
        "y-image-normal-form", "residue", _y0,
        lambda col, p: _abc(col, p.s + 2 * p.s * p.a, 1 + 2 * p.s * p.b, -2 * p.s * p.a,
                            -2 * p.u * p.ell * p.a),
    ),
    Identity(
        "x-conjugated-by-commutator", "residue", _self_conj(_x0, _y0),
        lambda col, p: col.basic_power(
            "A", p.alpha + p.s + 2 * p.s * p.i + 4 * p.u * p.ell * (2 * p.i + p.b + p.j + 1)
        ),
    ),
    Identity(
        "x-power-alpha-prime", "residue", _alpha_prime_power(_x0),
        lambda col, p: col.eval_word_nf([
            ("A", p.alpha_p + p.s + 2 * p.s * p.i + 2 * p.u * p.ell_p + 4 * p.u * p.ell_p * (p.i - p.j)),
            ("B", 2 * p.s * p.j),
        ]),
    ),
    Identity(
        "y-conjugated-by-commutator", "residue", _self_conj(_y0, _x0),
        lambda col, p: _abc(
            col, p.s + 2 * p.s * p.a, 1 + 2 * p.s * p.ell + 2 * p.s * p.b, -2 * p.s * p.a + p.u,
            -4 * p.u * p.ell - 6 * p.u * p.ell * p.a - 4 * p.u * p.ell * (p.i + 2 * p.b)
            + p.u * p.s * p.ell,
        ),
    ),
    Identity(
        "y-power-alpha-prime", "residue", _alpha_prime_power(_y0),
        lambda col, p: _abc(
            col, p.s + 2 * p.s * p.a, 1 + 2 * p.s * p.ell_p + 2 * p.s * p.b, -2 * p.s * p.a - p.u * p.ell_p,
            2 * p.u * (p.ell_p - p.s) + 4 * p.u * p.ell_p * (p.a - p.b)
            - p.u * p.s * p.ell_p * p.ell - 2 * p.u * p.ell * p.a,
        ),
    ),
]

CATALOGUES: Dict[str, List[Identity]] = {
    "lift": LIFT_IDENTITIES,
    "lemma": LEMMA_IDENTITIES,
    "residue": RESIDUE_IDENTITIES,
}


def _central(col: Collector, t: ExpTriple, center: Optional[Subgroup], u: int) -> bool:
    if center is not None:
        return col.to_id(t) in center
    return t.b == 0 and t.c == 0 and t.a % (2 * u) == 0


def evaluate_identity(
    identity: Identity,
    col: Collector,
    point: Point,
    center: Optional[Subgroup] = None,
) -> Dict:
    """Evaluate both sides at one point and compare them."""
    left = identity.left(col, point)
    right = identity.right(col, point)
    if identity.modulo_center:
        holds = _central(col, col.nf_mul(left, col.nf_inv(right)), center, point.u)
    else:
        holds = left == right
    return {"holds": holds, "left": list(left), "right": list(right)}


def grid_points(params: FamilyParams, group: str, grid: Optional[Dict[str, Sequence[int]]] = None) -> Iterable[Point]:
    """Points of the default grid for ``params``.

    For the lift set ell' = ell - r - s*ell1; for the residue set ell' = ell + s.
    """
    grid = {**DEFAULT_GRID, **(grid or {})}
    c = params.constants
    ell1_values = grid["ell1"] if group in ("lift", "lemma") else (None,)
    for ell1, i, j, a, b in product(ell1_values, grid["i"], grid["j"], grid["a"], grid["b"]):
        if ell1 is None:
            ell_p = params.ell + c.s
        else:
            ell_p = params.ell - (c.r or 0) - c.s * ell1
        yield point_for(params, ell_p, i, j, a, b)


def evaluate_catalogue(
    col: Collector,
    group: str = "lift",
    grid: Optional[Dict[str, Sequence[int]]] = None,
    center: Optional[Subgroup] = None,
) -> List[IdentityTally]:
    """Tally every identity of ``group`` over the grid at the collector's parameters.

    Raises:
        KeyError: For an unknown identity group
        ValueError: If m is too small for the group
    """
    identities = CATALOGUES[group]
    params = col.params
    minimum = min(identity.min_m for identity in identities)
    if params.m < minimum:
        raise ValueError(f"identity group '{group}' needs m >= {minimum}, got m={params.m}")
    tallies = {identity.name: IdentityTally(identity.name, group) for identity in identities}
    for point in grid_points(params, group, grid):
        for identity in identities:
            tally = tallies[identity.name]
            outcome = evaluate_identity(identity, col, point, center)
            tally.checked += 1
            if outcome["holds"]:
                tally.passed += 1
            elif tally.witness is None:
                tally.witness = {"point": asdict(point), "left": outcome["left"], "right": outcome["right"]}
    result = list(tallies.values())
    logger.info("Identity group %s at %s: %s/%s identities pass everywhere",
                group, params.label(), sum(t.all_passed for t in result), len(result))
    return result
