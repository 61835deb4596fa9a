"""Tests for the parity-swapping involution and formal 1nu entries."""

from __future__ import annotations

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

try:
    from core.algebra import GeneratorContext, SuperElement, mul
    from core.nu import (
        NU_UNIT,
        NuInvolution,
        NuUnit,
        Ring,
        all_monomials,
        entries_equal,
        entry_add,
        entry_mul,
        entry_neg,
        entry_parity,
        entry_sub,
        entry_value,
        format_entry,
        nu_apply,
    )
    from core.parser import parse_expression
    from utils.exceptions import FormalUnitSum, NuGrassError, ParityViolation
except ImportError:
    from src.core.algebra import GeneratorContext, SuperElement, mul
    from src.core.nu import (
        NU_UNIT,
        NuInvolution,
        NuUnit,
        Ring,
        all_monomials,
        entries_equal,
        entry_add,
        entry_mul,
        entry_neg,
        entry_parity,
        entry_sub,
        entry_value,
        format_entry,
        nu_apply,
    )
    from src.core.parser import parse_expression
    from src.utils.exceptions import FormalUnitSum, NuGrassError, ParityViolation


EXTERIOR = GeneratorContext(["x"], ["e1", "e2"])
WIDE = GeneratorContext(["x", "y"], ["e1", "e2", "e3", "e4"])
X, Y = sympy.Symbol("x"), sympy.Symbol("y")


def ext(text: str) -> SuperElement:
    return parse_expression(text, EXTERIOR)


functions = st.lists(
    st.tuples(st.integers(-3, 3), st.integers(0, 2), st.integers(0, 2)), min_size=1, max_size=3
).map(lambda items: SuperElement.scalar(WIDE, sum(c * X**i * Y**j for c, i, j in items)))

wide_elements = st.lists(
    st.tuples(st.sampled_from(list(all_monomials(4))), st.integers(-3, 3), st.sampled_from([1, X, Y, X * Y])),
    max_size=5,
).map(lambda items: SuperElement.from_terms(WIDE, [(m, c * f) for m, c, f in items]))


# ===========================================================================
# Toggle involution
# ===========================================================================


class TestToggle:
    def test_default_carrier_is_first_odd_generator(self):
        nu = NuInvolution.for_context(EXTERIOR)
        assert nu.carrier == "e1"
        assert nu.unit_image == ext("e1")

    def test_toggles_carrier(self):
        nu = NuInvolution.toggle(EXTERIOR)
        assert nu.apply(ext("1")) == ext("e1")
        assert nu.apply(ext("e1")) == ext("1")
        assert nu.apply(ext("x*e2")) == ext("x*e1*e2")

    def test_is_involutive(self):
        nu = NuInvolution.toggle(EXTERIOR, "e2")
        value = ext("3 + x*e1 - e1*e2")
        assert nu.apply(nu.apply(value)) == value

    @pytest.mark.parametrize("count", range(1, 9))
    def test_squares_to_the_identity_on_every_monomial(self, count):
        context = GeneratorContext(["x"], [f"e{i}" for i in range(1, count + 1)])
        nu = NuInvolution.for_context(context)
        for monomial in all_monomials(count):
            value = SuperElement.from_terms(context, [(monomial, 1)])
            image = nu.apply(value)
            assert image.parity() != value.parity()
            assert nu.apply(image) == value, monomial

    @settings(max_examples=100, deadline=None)
    @given(functions, wide_elements)
    def test_linear_over_functions(self, f, a):
        nu = NuInvolution.for_context(WIDE)
        assert nu.apply(mul(f, a)) == mul(f, nu.apply(a))

    def test_swaps_parity(self):
        nu = NuInvolution.toggle(EXTERIOR)
        assert nu.apply(ext("x + e1*e2")).parity() == 1
        assert nu_apply(nu, ext("e2")).parity() == 0

    def test_even_carrier_rejected(self):
        with pytest.raises(ParityViolation):
            NuInvolution(EXTERIOR, carrier="x")

    def test_context_without_odd_generators_raises_on_use(self):
        context = GeneratorContext(["x"], [])
        nu = NuInvolution.for_context(context)
        assert nu.carrier is None
        with pytest.raises(NuGrassError):
            nu.apply(SuperElement.one(context))


# ===========================================================================
# Explicit pairings
# ===========================================================================


class TestPairing:
    CONTEXT = GeneratorContext([], ["e1"])

    def test_signed_pairing(self):
        pairing = {(): (-1, (0,)), (0,): (-1, ())}
        nu = NuInvolution.from_pairing(self.CONTEXT, pairing)
        one = SuperElement.one(self.CONTEXT)
        assert nu.apply(one) == -SuperElement.generator(self.CONTEXT, "e1")
        assert nu.apply(nu.apply(one)) == one

    def test_missing_monomial(self):
        with pytest.raises(ParityViolation):
            NuInvolution.from_pairing(self.CONTEXT, {(): (1, (0,))})

    def test_parity_preserving_pairing(self):
        with pytest.raises(ParityViolation):
            NuInvolution.from_pairing(self.CONTEXT, {(): (1, ()), (0,): (1, (0,))})

    def test_non_involutive_signs(self):
        with pytest.raises(ParityViolation):
            NuInvolution.from_pairing(self.CONTEXT, {(): (1, (0,)), (0,): (-1, ())})


# ===========================================================================
# Formal entries
# ===========================================================================


class TestFormalEntries:
    NU = NuInvolution.for_context(EXTERIOR)

    def test_unit_is_a_singleton(self):
        assert NuUnit() is NU_UNIT

    def test_unit_times_unit_is_one(self):
        product = entry_mul(NU_UNIT, NU_UNIT, self.NU)
        assert isinstance(product, Ring)
        assert product.value == 1

    def test_one_times_unit_stays_formal(self):
        assert entry_mul(Ring(ext("1")), NU_UNIT, self.NU) is NU_UNIT
        assert entry_mul(NU_UNIT, Ring(ext("1")), self.NU) is NU_UNIT

    def test_element_times_unit_applies_nu(self):
        assert entry_mul(Ring(ext("x")), NU_UNIT, self.NU).value == ext("x*e1")
        assert entry_mul(NU_UNIT, Ring(ext("x")), self.NU).value == ext("x*e1")
        assert entry_mul(NU_UNIT, Ring(ext("e1")), self.NU).value == 1

    def test_unit_plus_element_is_a_formal_sum(self):
        with pytest.raises(FormalUnitSum):
            entry_add(NU_UNIT, Ring(ext("x")), self.NU)
        with pytest.raises(FormalUnitSum):
            entry_add(NU_UNIT, NU_UNIT, self.NU)
        with pytest.raises(FormalUnitSum):
            entry_sub(Ring(ext("x")), NU_UNIT, self.NU)

    def test_unit_minus_unit(self):
        assert entry_sub(NU_UNIT, NU_UNIT, self.NU).value.is_zero()

    def test_negated_unit_collapses(self):
        assert entry_neg(NU_UNIT, self.NU).value == ext("-e1")
        assert entry_sub(Ring(SuperElement.zero(EXTERIOR)), NU_UNIT, self.NU).value == ext("-e1")

    def test_zero_is_absorbing(self):
        zero = Ring(SuperElement.zero(EXTERIOR))
        assert entry_mul(zero, NU_UNIT, self.NU) is zero
        assert entry_add(zero, NU_UNIT) is NU_UNIT
        assert entry_add(NU_UNIT, zero) is NU_UNIT

    def test_unit_reads_as_nu_of_one(self):
        assert entry_value(NU_UNIT, self.NU) == ext("e1")
        assert self.NU.apply(entry_value(NU_UNIT, self.NU)) == 1
        assert entry_value(Ring(ext("x")), self.NU) == ext("x")

    def test_parity_and_text(self):
        assert entry_parity(NU_UNIT) == 1
        assert format_entry(NU_UNIT) == "1nu"
        assert format_entry(Ring(ext("x"))) == "x"

    def test_equality(self):
        assert entries_equal(NU_UNIT, NU_UNIT)
        assert not entries_equal(NU_UNIT, Ring(ext("e1")))
        assert entries_equal(Ring(ext("x*e1")), Ring(ext("e1*x")))
