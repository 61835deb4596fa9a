"""The involution nu, the formal unit 1nu and mixed matrix entries."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Dict, Optional, Tuple, Union

import sympy

try:
    from config.settings import FORMAL_UNIT_TEXT
    from core.algebra import GeneratorContext, OddMonomial, SuperElement, add, equals, mul
    from utils.exceptions import FormalUnitSum, NuGrassError, ParityViolation
except ImportError:
    from src.config.settings import FORMAL_UNIT_TEXT
    from src.core.algebra import GeneratorContext, OddMonomial, SuperElement, add, equals, mul
    from src.utils.exceptions import FormalUnitSum, NuGrassError, ParityViolation

Pairing = Dict[OddMonomial, Tuple[int, OddMonomial]]


def all_monomials(count: int):
    for size in range(count + 1):
        yield from combinations(range(count), size)


class NuInvolution:
    """A parity-swapping involution of a generator context.

    Two flavours exist:

    * toggle: the carrier generator is added to or removed from each
      monomial, with no sign (nu(e1) = 1, nu(1) = e1);
    * explicit pairing: any signed involutive pairing of monomials.

    Both are linear over the even functions.
    """

    def __init__(self, context: GeneratorContext, carrier: Optional[str] = None, pairing: Optional[Pairing] = None) -> None:
        self.context = context
        self.carrier = carrier
        self.pairing = pairing
        if carrier is not None and not context.is_odd(carrier):
            raise ParityViolation(f"Carrier {carrier!r} is not an odd generator of {context}")
        if pairing is not None:
            self._validate_pairing(pairing)

    # -- constructors --------------------------------------------------
    @classmethod
    def toggle(cls, context: GeneratorContext, name: Optional[str] = None) -> "NuInvolution":
        if name is None:
            name = context.odd_names[0] if context.odd_names else None
        return cls(context, carrier=name)

    @classmethod
    def from_pairing(cls, context: GeneratorContext, pairing: Pairing) -> "NuInvolution":
        return cls(context, pairing=dict(pairing))

    @classmethod
    def for_context(cls, context: GeneratorContext) -> "NuInvolution":
        return cls.toggle(context)

    @property
    def unit_image(self) -> SuperElement:
        """nu(1), the ring element read off a cell holding 1nu"""
        return self.apply(SuperElement.one(self.context))

    def _require_carrier(self) -> None:
        if self.carrier is None and self.pairing is None:
            raise NuGrassError(f"{self.context} has no odd generator to carry nu")

    def _validate_pairing(self, pairing: Pairing) -> None:
        monomials = list(all_monomials(len(self.context.odd_names)))
        for monomial in monomials:
            if monomial not in pairing:
                raise ParityViolation(f"Pairing misses monomial {monomial}")
        for monomial in monomials:
            sign, image = pairing[monomial]
            if sign not in (1, -1):
                raise ParityViolation(f"Pairing sign for {monomial} must be +1 or -1")
            if len(image) % 2 == len(monomial) % 2:
                raise ParityViolation(f"Pairing keeps the parity of {monomial}")
            if image not in pairing:
                raise ParityViolation(f"Pairing sends {monomial} to unknown monomial {image}")
            back_sign, back = pairing[image]
            if back != monomial or back_sign * sign != 1:
                raise ParityViolation(f"Pairing is not involutive at {monomial}")

    # -- action on monomials -------------------------------------------
    def _toggle(self, monomial: OddMonomial) -> Tuple[int, OddMonomial]:
        index = self.context.odd_index(self.carrier)
        if index in monomial:
            return 1, tuple(i for i in monomial if i != index)
        return 1, tuple(sorted(monomial + (index,)))

    def apply(self, a: SuperElement) -> SuperElement:
        """nu(a)"""
        self._require_carrier()
        if a.context != self.context:
            a = a.embed(self.context)
        rule = self.pairing.get if self.pairing is not None else self._toggle
        terms = {}
        for monomial, coefficient in a.terms.items():
            sign, image = rule(monomial)
            terms[image] = terms.get(image, sympy.Integer(0)) + sign * coefficient
        return SuperElement.from_terms(self.context, terms.items())

    def __repr__(self) -> str:
        if self.pairing is not None:
            return f"NuInvolution(pairing over {self.context})"
        return f"NuInvolution(carrier={self.carrier!r})"


def nu_apply(involution: NuInvolution, a: SuperElement) -> SuperElement:
    return involution.apply(a)


# ----------------------------------------------------------------------
# Formal entries
# ----------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Ring:
    value: SuperElement

    def __repr__(self) -> str:
        return f"Ring({self.value})"


class NuUnit:
    """The formal unit 1nu"""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "NuUnit"

    def __reduce__(self):
        return (NuUnit, ())


NU_UNIT = NuUnit()
FormalEntry = Union[Ring, NuUnit]


def ring(value: SuperElement) -> Ring:
    return Ring(value)


def entry_is_zero(x: FormalEntry) -> bool:
    return isinstance(x, Ring) and x.value.is_zero()


def entry_is_one(x: FormalEntry) -> bool:
    return isinstance(x, Ring) and x.value == 1


def entry_parity(x: FormalEntry) -> Optional[int]:
    if isinstance(x, NuUnit):
        return 1
    return x.value.parity()


def entry_value(x: FormalEntry, involution: NuInvolution) -> SuperElement:
    """The ring element an entry stands for once read out of a matrix; 1nu reads as nu(1)"""
    if isinstance(x, Ring):
        return x.value
    return involution.unit_image


def entry_mul(x: FormalEntry, y: FormalEntry, involution: NuInvolution) -> FormalEntry:
    """Product of two entries; lambda*1nu and 1nu*lambda both collapse to nu(lambda)"""
    if isinstance(x, NuUnit) and isinstance(y, NuUnit):
        return Ring(SuperElement.one(involution.context))
    if entry_is_zero(x):
        return x
    if entry_is_zero(y):
        return y
    if isinstance(y, NuUnit):
        if entry_is_one(x):
            return NU_UNIT
        return Ring(involution.apply(x.value))
    if isinstance(x, NuUnit):
        if entry_is_one(y):
            return NU_UNIT
        return Ring(involution.apply(y.value))
    return Ring(mul(x.value, y.value))


def entry_add(x: FormalEntry, y: FormalEntry, involution: Optional[NuInvolution] = None) -> FormalEntry:
    if entry_is_zero(y):
        return x
    if entry_is_zero(x):
        return y
    if isinstance(x, NuUnit) or isinstance(y, NuUnit):
        raise FormalUnitSum(f"{format_entry(x)} + {format_entry(y)} is a formal sum with 1nu")
    return Ring(add(x.value, y.value))


def entry_neg(x: FormalEntry, involution: Optional[NuInvolution] = None) -> FormalEntry:
    """-x; -1nu collapses to nu(-1) like any other scalar multiple of 1nu"""
    if isinstance(x, NuUnit):
        if involution is None:
            raise FormalUnitSum("-1nu needs an involution to collapse")
        return Ring(-involution.unit_image)
    return Ring(-x.value)


def entry_sub(x: FormalEntry, y: FormalEntry, involution: Optional[NuInvolution] = None) -> FormalEntry:
    if isinstance(x, NuUnit) and isinstance(y, NuUnit):
        if involution is None:
            raise FormalUnitSum("1nu - 1nu needs a context")
        return Ring(SuperElement.zero(involution.context))
    if entry_is_zero(y):
        return x
    if entry_is_zero(x):
        return entry_neg(y, involution)
    if isinstance(x, NuUnit) or isinstance(y, NuUnit):
        raise FormalUnitSum(f"{format_entry(x)} - {format_entry(y)} is a formal sum with 1nu")
    return Ring(add(x.value, -y.value))


def entries_equal(x: FormalEntry, y: FormalEntry, involution: Optional[NuInvolution] = None, relation=None) -> bool:
    if isinstance(x, NuUnit) or isinstance(y, NuUnit):
        return isinstance(x, NuUnit) and isinstance(y, NuUnit)
    return equals(x.value, y.value, relation)


def format_entry(x: FormalEntry) -> str:
    if isinstance(x, NuUnit):
        return FORMAL_UNIT_TEXT
    return str(x.value)
