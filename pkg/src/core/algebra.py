"""Supercommutative coefficient algebra: rational functions in even generators
times monomials in exterior odd generators.
"""

from __future__ import annotations

from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import sympy
from sympy import Expr, Poly, Rational, Symbol

try:
    from utils.exceptions import ContextMismatch, MissingImage, NotInvertible, ParityViolation
except ImportError:
    from src.utils.exceptions import ContextMismatch, MissingImage, NotInvertible, ParityViolation

OddMonomial = Tuple[int, ...]
EvenScalar = Expr
ScalarLike = Union[int, Rational, Expr]


def normalize_scalar(value: ScalarLike) -> Expr:
    """Return the canonical reduced-fraction form of a rational function"""
    return sympy.cancel(sympy.sympify(value))


def monomial_key(monomial: OddMonomial) -> Tuple[int, OddMonomial]:
    return (len(monomial), monomial)


class GeneratorContext:
    """Ordered even and odd generator names shared by a family of elements."""

    __slots__ = ("even_names", "odd_names", "_symbols", "_odd_index")

    def __init__(self, even_names: Sequence[str] = (), odd_names: Sequence[str] = ()) -> None:
        self.even_names = tuple(even_names)
        self.odd_names = tuple(odd_names)
        every = self.even_names + self.odd_names
        if len(set(every)) != len(every):
            raise ContextMismatch(f"Duplicate generator names in {every}")
        self._symbols = {name: Symbol(name) for name in self.even_names}
        self._odd_index = {name: i for i, name in enumerate(self.odd_names)}

    # ------------------------------------------------------------------
    def symbol(self, name: str) -> Symbol:
        return self._symbols[name]

    @property
    def symbols(self) -> Tuple[Symbol, ...]:
        return tuple(self._symbols[name] for name in self.even_names)

    def odd_index(self, name: str) -> int:
        return self._odd_index[name]

    def is_even(self, name: str) -> bool:
        return name in self._symbols

    def is_odd(self, name: str) -> bool:
        return name in self._odd_index

    def has(self, name: str) -> bool:
        return self.is_even(name) or self.is_odd(name)

    @property
    def names(self) -> Tuple[str, ...]:
        return self.even_names + self.odd_names

    def extend(self, even: Sequence[str] = (), odd: Sequence[str] = ()) -> "GeneratorContext":
        return GeneratorContext(self.even_names + tuple(even), self.odd_names + tuple(odd))

    def contains(self, other: "GeneratorContext") -> bool:
        """True when every generator of ``other`` exists here with the same parity and order"""
        return (
            self.even_names[: len(other.even_names)] == other.even_names
            and self.odd_names[: len(other.odd_names)] == other.odd_names
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GeneratorContext):
            return NotImplemented
        return self.even_names == other.even_names and self.odd_names == other.odd_names

    def __hash__(self) -> int:
        return hash((self.even_names, self.odd_names))

    def __repr__(self) -> str:
        return f"GeneratorContext(even={list(self.even_names)}, odd={list(self.odd_names)})"

    def __getstate__(self):
        return (self.even_names, self.odd_names)

    def __setstate__(self, state) -> None:
        self.__init__(*state)


# ----------------------------------------------------------------------
# Relations and assumptions
# ----------------------------------------------------------------------


class PartitionRelation:
    """The relation sum(r_a**2) = 1 on a set of even symbols.

    An empty name list stands for the trivial relation (a single chart,
    whose partition function is the constant one).
    """

    def __init__(self, names: Sequence[str] = ()) -> None:
        self.names = tuple(names)

    def reduce(self, polynomial: Expr) -> Expr:
        """Rewrite powers of the last symbol above one using the relation"""
        if not self.names:
            return sympy.expand(polynomial)
        last = Symbol(self.names[-1])
        rest = sympy.Integer(1) - sum((Symbol(n) ** 2 for n in self.names[:-1]), sympy.Integer(0))
        poly = Poly(sympy.expand(polynomial), last)
        reduced = sympy.Integer(0)
        for (power,), coefficient in poly.terms():
            reduced += coefficient * rest ** (power // 2) * last ** (power % 2)
        return sympy.expand(reduced)

    def vanishes(self, value: ScalarLike) -> bool:
        numerator, _ = sympy.fraction(normalize_scalar(value))
        return self.reduce(numerator) == 0

    def __repr__(self) -> str:
        return f"PartitionRelation({list(self.names)})"


class AssumptionSet:
    """Accumulates polynomials assumed nonzero during a computation."""

    def __init__(self, items: Iterable[ScalarLike] = ()) -> None:
        self._items: Dict[str, Expr] = {}
        for item in items:
            self.add(item)

    def add(self, value: ScalarLike) -> None:
        numerator, _ = sympy.fraction(normalize_scalar(value))
        numerator = sympy.expand(numerator)
        if numerator == 0:
            raise NotInvertible("Cannot assume zero is nonzero")
        if numerator.is_number:
            return
        symbols = sorted(numerator.free_symbols, key=str)
        _, primitive = Poly(numerator, *symbols).primitive()
        normalized = primitive.as_expr()
        if normalized.could_extract_minus_sign():
            normalized = -normalized
        self._items.setdefault(str(normalized), normalized)

    def merge(self, other: "AssumptionSet") -> "AssumptionSet":
        for value in other._items.values():
            self.add(value)
        return self

    def as_strings(self) -> List[str]:
        return sorted(self._items)

    def __iter__(self) -> Iterator[Expr]:
        return iter(self._items[key] for key in sorted(self._items))

    def __len__(self) -> int:
        return len(self._items)

    def __contains__(self, value: ScalarLike) -> bool:
        single = AssumptionSet()
        try:
            single.add(value)
        except NotInvertible:
            return False
        return all(key in self._items for key in single._items)

    def __repr__(self) -> str:
        return f"AssumptionSet({self.as_strings()})"


# ----------------------------------------------------------------------
# Elements
# ----------------------------------------------------------------------


def _multiply_monomials(left: OddMonomial, right: OddMonomial) -> Tuple[int, Optional[OddMonomial]]:
    """Return (sign, monomial) of left*right, or (0, None) when it vanishes"""
    swaps = 0
    for a in left:
        for b in right:
            if a > b:
                swaps += 1
    if set(left) & set(right):
        return 0, None
    return (-1 if swaps % 2 else 1), tuple(sorted(left + right))


class SuperElement:
    """An element sum_S c_S * e_S with canonical rational-function coefficients."""

    __slots__ = ("context", "terms")

    def __init__(self, context: GeneratorContext, terms: Optional[Mapping[OddMonomial, Expr]] = None) -> None:
        self.context = context
        ordered = sorted((terms or {}).items(), key=lambda item: monomial_key(item[0]))
        self.terms: Dict[OddMonomial, Expr] = {m: c for m, c in ordered if c != 0}

    # -- constructors --------------------------------------------------
    @classmethod
    def from_terms(cls, context: GeneratorContext, pairs: Iterable[Tuple[OddMonomial, ScalarLike]]) -> "SuperElement":
        collected: Dict[OddMonomial, Expr] = {}
        for monomial, coefficient in pairs:
            collected[monomial] = collected.get(monomial, sympy.Integer(0)) + sympy.sympify(coefficient)
        return cls(context, {m: normalize_scalar(c) for m, c in collected.items()})

    @classmethod
    def zero(cls, context: GeneratorContext) -> "SuperElement":
        return cls(context, {})

    @classmethod
    def one(cls, context: GeneratorContext) -> "SuperElement":
        return cls(context, {(): sympy.Integer(1)})

    @classmethod
    def scalar(cls, context: GeneratorContext, value: ScalarLike) -> "SuperElement":
        for symbol in sympy.sympify(value).free_symbols:
            if not context.is_even(str(symbol)):
                raise ContextMismatch(f"Symbol {symbol} is not an even generator of {context}")
        return cls(context, {(): normalize_scalar(value)})

    @classmethod
    def generator(cls, context: GeneratorContext, name: str) -> "SuperElement":
        if context.is_even(name):
            return cls(context, {(): context.symbol(name)})
        if context.is_odd(name):
            return cls(context, {(context.odd_index(name),): sympy.Integer(1)})
        raise ContextMismatch(f"{name!r} is not a generator of {context}")

    # -- inspection ----------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def parity(self) -> Optional[int]:
        """0 or 1 for homogeneous elements, None for zero, -1 when mixed"""
        parities = {len(m) % 2 for m in self.terms}
        if not parities:
            return None
        if len(parities) > 1:
            return -1
        return parities.pop()

    def is_homogeneous(self) -> bool:
        return self.parity() != -1

    def has_parity(self, parity: int) -> bool:
        found = self.parity()
        return found is None or found == parity

    def body(self) -> Expr:
        return self.terms.get((), sympy.Integer(0))

    def involves(self, names: Iterable[str]) -> bool:
        wanted = set(names)
        odd = {self.context.odd_index(n) for n in wanted if self.context.is_odd(n)}
        even = {self.context.symbol(n) for n in wanted if self.context.is_even(n)}
        for monomial, coefficient in self.terms.items():
            if odd.intersection(monomial) or even.intersection(coefficient.free_symbols):
                return True
        return False

    def embed(self, context: GeneratorContext) -> "SuperElement":
        """Re-express this element over a context that extends its own"""
        if context == self.context:
            return self
        if not context.contains(self.context):
            raise ContextMismatch(f"{context} does not extend {self.context}")
        return SuperElement(context, dict(self.terms))

    # -- arithmetic ----------------------------------------------------
    def _check(self, other: "SuperElement") -> None:
        if self.context != other.context:
            raise ContextMismatch(f"{self.context} vs {other.context}")

    def _coerce(self, other) -> "SuperElement":
        if isinstance(other, SuperElement):
            self._check(other)
            return other
        return SuperElement.scalar(self.context, other)

    def __add__(self, other) -> "SuperElement":
        return add(self, self._coerce(other))

    __radd__ = __add__

    def __neg__(self) -> "SuperElement":
        return SuperElement(self.context, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "SuperElement":
        return add(self, -self._coerce(other))

    def __rsub__(self, other) -> "SuperElement":
        return add(self._coerce(other), -self)

    def __mul__(self, other) -> "SuperElement":
        return mul(self, self._coerce(other))

    def __rmul__(self, other) -> "SuperElement":
        return mul(self._coerce(other), self)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, SuperElement):
            return self.context == other.context and equals(self, other)
        if isinstance(other, (int, Rational, Expr)):
            return equals(self, SuperElement.scalar(self.context, other))
        return NotImplemented

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"SuperElement({format_element(self)})"

    def __str__(self) -> str:
        return format_element(self)


def _same_context(a: SuperElement, b: SuperElement) -> None:
    if a.context != b.context:
        raise ContextMismatch(f"{a.context} vs {b.context}")


def add(a: SuperElement, b: SuperElement) -> SuperElement:
    _same_context(a, b)
    terms = dict(a.terms)
    for monomial, coefficient in b.terms.items():
        terms[monomial] = normalize_scalar(terms.get(monomial, sympy.Integer(0)) + coefficient)
    return SuperElement(a.context, terms)


def mul(a: SuperElement, b: SuperElement) -> SuperElement:
    _same_context(a, b)
    terms: Dict[OddMonomial, Expr] = {}
    for left, x in a.terms.items():
        for right, y in b.terms.items():
            sign, monomial = _multiply_monomials(left, right)
            if not sign:
                continue
            terms[monomial] = terms.get(monomial, sympy.Integer(0)) + sign * x * y
    return SuperElement(a.context, {m: normalize_scalar(c) for m, c in terms.items()})


def invert(a: SuperElement, assumptions: Optional[AssumptionSet] = None) -> SuperElement:
    """Invert an even element with nonzero body via the terminating geometric series.

    The numerator of the body is recorded in ``assumptions``.
    """
    if a.parity() not in (0,):
        raise NotInvertible(f"Only nonzero even elements are invertible, got {format_element(a)}")
    body = a.body()
    if body == 0:
        raise NotInvertible(f"Body of {format_element(a)} is zero")
    if assumptions is not None:
        assumptions.add(body)
    inverse_body = SuperElement.scalar(a.context, 1 / body)
    step = -mul(inverse_body, a - SuperElement.scalar(a.context, body))
    result = inverse_body
    power = SuperElement.one(a.context)
    for _ in range(len(a.context.odd_names) + 1):
        power = mul(power, step)
        if power.is_zero():
            break
        result = add(result, mul(power, inverse_body))
    return result


def _evaluate_polynomial(
    polynomial: Expr,
    symbols: Sequence[Symbol],
    images: Mapping[Symbol, SuperElement],
    target: GeneratorContext,
    powers: Dict[Tuple[Symbol, int], SuperElement],
) -> SuperElement:
    result = SuperElement.zero(target)
    if not symbols:
        return SuperElement.scalar(target, polynomial)
    for exponents, coefficient in Poly(polynomial, *symbols).terms():
        term = SuperElement.scalar(target, coefficient)
        for symbol, exponent in zip(symbols, exponents):
            if not exponent:
                continue
            key = (symbol, exponent)
            if key not in powers:
                value = SuperElement.one(target)
                for _ in range(exponent):
                    value = mul(value, images[symbol])
                powers[key] = value
            term = mul(term, powers[key])
        result = add(result, term)
    return result


def substitute(
    a: SuperElement,
    images: Mapping[str, SuperElement],
    target: GeneratorContext,
    assumptions: Optional[AssumptionSet] = None,
) -> SuperElement:
    """Apply the algebra homomorphism determined by generator images.

    Every generator occurring in ``a`` needs an image of matching parity in
    ``target``. Denominators are substituted and then inverted.
    """
    source = a.context
    used_even = set()
    used_odd = set()
    for monomial, coefficient in a.terms.items():
        used_odd.update(source.odd_names[i] for i in monomial)
        used_even.update(str(s) for s in coefficient.free_symbols)
    for name in sorted(used_even | used_odd):
        if name not in images:
            raise MissingImage(f"No image for generator {name!r}")
        image = images[name]
        if image.context != target:
            raise ContextMismatch(f"Image of {name!r} lives in {image.context}, expected {target}")
        expected = 0 if name in used_even else 1
        if not image.has_parity(expected):
            raise ParityViolation(f"Image of {name!r} must have parity {expected}: {format_element(image)}")

    even_symbols = [source.symbol(n) for n in source.even_names if n in used_even]
    even_images = {source.symbol(n): images[n] for n in used_even}
    scalar_only = all(set(img.terms) <= {()} for img in even_images.values())
    powers: Dict[Tuple[Symbol, int], SuperElement] = {}

    result = SuperElement.zero(target)
    for monomial, coefficient in a.terms.items():
        numerator, denominator = sympy.fraction(coefficient)
        if scalar_only:
            replacement = {s: img.body() for s, img in even_images.items()}
            new_denominator = normalize_scalar(denominator.xreplace(replacement))
            if new_denominator == 0:
                raise NotInvertible(f"Denominator {denominator} vanishes under substitution")
            if assumptions is not None:
                assumptions.add(new_denominator)
            value = SuperElement.scalar(target, numerator.xreplace(replacement) / new_denominator)
        else:
            symbols = [s for s in even_symbols if s in coefficient.free_symbols]
            value = _evaluate_polynomial(numerator, symbols, even_images, target, powers)
            if denominator != 1:
                value = mul(value, invert(_evaluate_polynomial(denominator, symbols, even_images, target, powers), assumptions))
        for index in monomial:
            value = mul(value, images[source.odd_names[index]])
        result = add(result, value)
    return result


def equals(a: SuperElement, b: SuperElement, relation: Optional[PartitionRelation] = None) -> bool:
    _same_context(a, b)
    difference = add(a, -b)
    if relation is None:
        return difference.is_zero()
    return all(relation.vanishes(c) for c in difference.terms.values())


def generators(context: GeneratorContext) -> Dict[str, SuperElement]:
    """The identity substitution of a context"""
    return {name: SuperElement.generator(context, name) for name in context.names}


# ----------------------------------------------------------------------
# Printing
# ----------------------------------------------------------------------


def _format_coefficient(coefficient: Expr) -> str:
    text = str(coefficient)
    if coefficient.is_Atom:
        return text
    return f"({text})"


def format_element(a: SuperElement) -> str:
    """Canonical text form, readable back by the expression parser"""
    if a.is_zero():
        return "0"
    pieces: List[str] = []
    for monomial, coefficient in a.terms.items():
        names = "*".join(a.context.odd_names[i] for i in monomial)
        if not names:
            piece = _format_coefficient(coefficient)
        elif coefficient == 1:
            piece = names
        elif coefficient == -1:
            piece = f"-{names}"
        else:
            piece = f"{_format_coefficient(coefficient)}*{names}"
        if pieces and piece.startswith("-"):
            pieces.append(f"- {piece[1:]}")
        elif pieces:
            pieces.append(f"+ {piece}")
        else:
            pieces.append(piece)
    return " ".join(pieces)
