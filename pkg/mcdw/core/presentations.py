"""Two-generator presentations of the J, H, K and Macdonald families.

Words are elements of the sympy free group on ``x, y``; sympy keeps them
freely reduced. Relations ``a^c = a^k`` are stored as the single relator
``c^-1 a c a^-k`` with the conventions ``[a,b] = a^-1 b^-1 a b`` and
``b^a = a^-1 b a``.
"""
import logging
import re
from typing import Callable, Iterable, List, Optional, Sequence, Tuple, TypeVar

from pydantic import BaseModel, ConfigDict
from sympy.combinatorics.free_groups import FreeGroupElement, free_group

from mcdw.core.params import h_exponent, j_exponent
from mcdw.models.params import CaseTag, Family, FamilyParams

logger = logging.getLogger(__name__)

FREE, X, Y = free_group("x, y")
GENERATORS: Tuple[FreeGroupElement, FreeGroupElement] = (X, Y)

Word = FreeGroupElement
T = TypeVar("T")


class PresentationError(ValueError):
    """Raised when a family has no stated presentation or the request is invalid."""


class PresentationSyntaxError(PresentationError):
    """Raised when a textual presentation cannot be parsed."""


class Presentation(BaseModel):
    """Generators plus relator words over x and y."""

    name: str = ""
    generator_names: Tuple[str, str] = ("x", "y")
    relators: Tuple[Word, ...]

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @property
    def generator_count(self) -> int:
        return len(self.generator_names)

    def __str__(self) -> str:
        return format_presentation(self)


def commutator(a: Word, b: Word) -> Word:
    return a ** -1 * b ** -1 * a * b


def conjugate(b: Word, a: Word) -> Word:
    """b^a = a^-1 b a."""
    return a ** -1 * b * a


def relation(left: Word, right: Word) -> Word:
    """Relator for ``left = right``."""
    return left * right ** -1


def invert(word: Word) -> Word:
    return word ** -1


def concat(first: Word, second: Word) -> Word:
    return first * second


def free_reduce(syllables: Iterable[Tuple[int, int]]) -> Word:
    """Freely reduce a sequence of (generator index, exponent) pairs."""
    word = FREE.identity
    for generator, exponent in syllables:
        if exponent:
            word = word * GENERATORS[generator] ** exponent
    return word


def syllables(word: Word) -> List[Tuple[int, int]]:
    """(generator index, exponent) pairs with adjacent generators distinct."""
    return [(FREE.symbols.index(symbol), exponent) for symbol, exponent in word.array_form]


def letters(word: Word) -> List[int]:
    """Expand a word into coset-table letters: 0=x, 1=x^-1, 2=y, 3=y^-1."""
    result: List[int] = []
    for generator, exponent in syllables(word):
        letter = 2 * generator + (1 if exponent < 0 else 0)
        result.extend([letter] * abs(exponent))
    return result


def evaluate_syllables(
    word: Word,
    images: Sequence[T],
    multiply: Callable[[T, T], T],
    power: Callable[[T, int], T],
    identity: T,
) -> T:
    """Evaluate a word left to right in any group given by its operations."""
    result = identity
    for generator, exponent in syllables(word):
        result = multiply(result, power(images[generator], exponent))
    return result


def _power_relation(generator: Word, alpha: int, other: Word) -> Word:
    return relation(conjugate(generator, commutator(generator, other)), generator ** alpha)


def _macdonald_relators(alpha: int) -> List[Word]:
    return [_power_relation(X, alpha, Y), _power_relation(Y, alpha, X)]


def presentation(family, params: FamilyParams) -> Presentation:
    """Relators of the J, H or K family at the given parameters.

    Raises:
        PresentationError: For H3/K3 (quotients only) and for family G
    """
    family = Family(family)
    if family is Family.G:
        return macdonald_presentation(params.beta)
    if family.index == 3 and family.kind != "J":
        raise PresentationError(
            f"{family.value} has no stated presentation: construct as quotient of J3 "
            f"by its {'center' if family.kind == 'H' else 'second center'}"
        )
    if family.kind == "J":
        exponent = j_exponent(params)
    else:
        exponent = h_exponent(params)
    relators = _macdonald_relators(params.alpha)
    relators += [X ** exponent, Y ** exponent]
    if family.kind == "K":
        commutator_exponent = params.p ** params.m if params.case is CaseTag.CASE1 else 2 ** (params.m - 1)
        relators.append(commutator(X, Y) ** commutator_exponent)
    name = f"{family.value}({params.alpha})"
    logger.debug("Built presentation %s with %s relators", name, len(relators))
    return Presentation(name=name, relators=tuple(relators))


def macdonald_presentation(beta: int) -> Presentation:
    """The two-relator presentation of G(beta).

    Raises:
        PresentationError: If beta = 1 (the group is infinite)
    """
    if beta == 1:
        raise PresentationError("G(1) is an infinite group; nothing to enumerate")
    return Presentation(name=f"G({beta})", relators=tuple(_macdonald_relators(beta)))


def format_word(word: Word, names: Sequence[str] = ("x", "y")) -> str:
    if word == FREE.identity:
        return "1"
    parts = []
    for generator, exponent in syllables(word):
        name = names[generator]
        parts.append(name if exponent == 1 else f"{name}^{exponent}")
    return " ".join(parts)


def format_presentation(pres: Presentation) -> str:
    """Render as ``<generators> | <relators>``."""
    names = pres.generator_names
    body = ", ".join(format_word(r, names) for r in pres.relators)
    return f"{', '.join(names)} | {body}"


_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<sym>[\^\-\[\](),*=|]))")


def _tokenize(text: str) -> List[str]:
    tokens = []
    position = 0
    text = text.rstrip()
    while position < len(text):
        match = _TOKEN.match(text, position)
        if match is None:
            raise PresentationSyntaxError(f"unexpected character {text[position]!r} at {position}")
        tokens.append(match.group(match.lastgroup))
        position = match.end()
    return tokens


class _Parser:
    def __init__(self, tokens: List[str], names: Sequence[str]):
        self.tokens = tokens
        self.index = 0
        self.names = list(names)

    def peek(self) -> Optional[str]:
        return self.tokens[self.index] if self.index < len(self.tokens) else None

    def take(self, expected: Optional[str] = None) -> str:
        token = self.peek()
        if token is None or (expected is not None and token != expected):
            raise PresentationSyntaxError(f"expected {expected or 'a token'}, got {token!r}")
        self.index += 1
        return token

    def relators(self) -> List[Word]:
        result = [self.relator()]
        while self.peek() == ",":
            self.take(",")
            result.append(self.relator())
        if self.peek() is not None:
            raise PresentationSyntaxError(f"trailing input at {self.peek()!r}")
        return result

    def relator(self) -> Word:
        left = self.product()
        if self.peek() == "=":
            self.take("=")
            return relation(left, self.product())
        return left

    def product(self) -> Word:
        word = self.factor()
        while self.peek() not in (None, ",", "]", ")", "="):
            if self.peek() == "*":
                self.take("*")
            word = word * self.factor()
        return word

    def factor(self) -> Word:
        word = self.atom()
        while self.peek() == "^":
            self.take("^")
            if self.peek() == "-" or (self.peek() or "").isdigit():
                word = word ** self.integer()
            else:
                word = conjugate(word, self.atom())
        return word

    def integer(self) -> int:
        sign = 1
        if self.peek() == "-":
            self.take("-")
            sign = -1
        token = self.take()
        if not token.isdigit():
            raise PresentationSyntaxError(f"expected an integer exponent, got {token!r}")
        return sign * int(token)

    def atom(self) -> Word:
        token = self.take()
        if token == "(":
            word = self.product()
            self.take(")")
            return word
        if token == "[":
            first = self.product()
            self.take(",")
            second = self.product()
            self.take("]")
            return commutator(first, second)
        if token == "1":
            return FREE.identity
        if token in self.names:
            return GENERATORS[self.names.index(token)]
        raise PresentationSyntaxError(f"unknown generator {token!r}")


def parse_word(text: str, names: Sequence[str] = ("x", "y")) -> Word:
    parser = _Parser(_tokenize(text), names)
    word = parser.relator()
    if parser.peek() is not None:
        raise PresentationSyntaxError(f"trailing input at {parser.peek()!r}")
    return word


def parse_presentation(text: str, name: str = "") -> Presentation:
    """Parse ``<generators> | <relators>``; relators may be written as ``lhs = rhs``.

    Raises:
        PresentationSyntaxError: On malformed text or more than two generators
    """
    if "|" not in text:
        raise PresentationSyntaxError("missing '|' between generators and relators")
    head, body = text.split("|", 1)
    names = [n.strip() for n in head.split(",") if n.strip()]
    if len(names) != 2 or len(set(names)) != 2:
        raise PresentationSyntaxError(f"expected two distinct generators, got {names}")
    relators = _Parser(_tokenize(body), names).relators() if body.strip() else []
    return Presentation(name=name, generator_names=(names[0], names[1]), relators=tuple(relators))
