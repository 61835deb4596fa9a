"""Text form of elements and matrix entries.

Grammar: rational literals, generator names, + - * /, integer powers,
parentheses and nu(...). Division is only allowed by invertible even
subexpressions.
"""

from __future__ import annotations

from typing import Optional

import sympy
from lark import Lark, Transformer, v_args
from lark.exceptions import UnexpectedInput, VisitError

try:
    from config.settings import FORMAL_UNIT_TEXT
    from core.algebra import SuperElement, GeneratorContext, invert, mul
    from core.nu import NU_UNIT, FormalEntry, NuInvolution, Ring
    from utils.exceptions import (
        DivisionByNonInvertible,
        ExpressionSyntaxError,
        NotInvertible,
        NuGrassError,
        UnknownIdentifier,
    )
except ImportError:
    from src.config.settings import FORMAL_UNIT_TEXT
    from src.core.algebra import SuperElement, GeneratorContext, invert, mul
    from src.core.nu import NU_UNIT, FormalEntry, NuInvolution, Ring
    from src.utils.exceptions import (
        DivisionByNonInvertible,
        ExpressionSyntaxError,
        NotInvertible,
        NuGrassError,
        UnknownIdentifier,
    )

GRAMMAR = r"""
?start: sum

?sum: product
    | sum "+" product   -> add
    | sum "-" product   -> sub

?product: unary
    | product "*" unary -> mul
    | product "/" unary -> div

?unary: power
    | "-" unary         -> neg
    | "+" unary

?power: atom
    | atom ("^" | "**") INT -> pow

?atom: NUMBER           -> number
    | NU "(" sum ")"    -> nu
    | NAME              -> name
    | "(" sum ")"

NU.2: /nu(?![A-Za-z_0-9])/
NAME: /[A-Za-z_][A-Za-z_0-9]*/
NUMBER: /\d+(\.\d+)?/

%import common.INT
%import common.WS
%ignore WS
"""

_PARSER = Lark(GRAMMAR, parser="lalr", maybe_placeholders=False)


@v_args(inline=True)
class _ElementBuilder(Transformer):
    def __init__(self, context: GeneratorContext, involution: Optional[NuInvolution]) -> None:
        super().__init__()
        self.context = context
        self.involution = involution

    def number(self, token):
        return SuperElement.scalar(self.context, sympy.Rational(str(token)))

    def name(self, token):
        text = str(token)
        if not self.context.has(text):
            raise UnknownIdentifier(f"Unknown identifier {text!r} at position {token.start_pos}")
        return SuperElement.generator(self.context, text)

    def nu(self, _keyword, value):
        involution = self.involution or NuInvolution.for_context(self.context)
        return involution.apply(value)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return mul(a, b)

    def div(self, a, b):
        if b.parity() != 0:
            raise DivisionByNonInvertible(f"Cannot divide by {b}")
        try:
            return mul(a, invert(b))
        except NotInvertible as exc:
            raise DivisionByNonInvertible(str(exc)) from exc

    def neg(self, a):
        return -a

    def pow(self, base, exponent):
        result = SuperElement.one(self.context)
        for _ in range(int(exponent)):
            result = mul(result, base)
        return result


def parse_expression(text: str, context: GeneratorContext, involution: Optional[NuInvolution] = None) -> SuperElement:
    try:
        tree = _PARSER.parse(text)
    except UnexpectedInput as exc:
        position = getattr(exc, "pos_in_stream", None)
        if position is None:
            position = getattr(exc, "column", -1)
        raise ExpressionSyntaxError(f"Cannot parse {text!r} near position {position}", position=position) from exc
    try:
        return _ElementBuilder(context, involution).transform(tree)
    except VisitError as exc:
        if isinstance(exc.orig_exc, NuGrassError):
            raise exc.orig_exc from None
        raise


def parse_entry(text: str, context: GeneratorContext, involution: Optional[NuInvolution] = None) -> FormalEntry:
    """Parse a matrix entry; the literal 1nu denotes the formal unit"""
    if text.strip() == FORMAL_UNIT_TEXT:
        return NU_UNIT
    return Ring(parse_expression(text, context, involution))
