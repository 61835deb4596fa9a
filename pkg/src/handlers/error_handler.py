"""Error handler for nugrass"""

from typing import Dict, Optional, Type

from rich.console import Console

# Simplified import handling with clear fallback chain
try:
    # When installed via pip/pipx (package_dir={"": "src"})
    from config.settings import EXIT_FAIL, EXIT_INPUT_ERROR
    from utils import exceptions as errors
except ImportError:
    # When running from source (development mode)
    from src.config.settings import EXIT_FAIL, EXIT_INPUT_ERROR
    from src.utils import exceptions as errors


class ErrorHandler:
    def __init__(self, console: Optional[Console] = None) -> None:
        self.console = console or Console(stderr=True)

        # Define error messages for each error class
        self.error_messages: Dict[Type[Exception], Dict[str, str]] = {
            errors.SchemaError: {
                "code": "E-SCHEMA",
                "message": "Bundle file does not match the schema",
                "solution": "Check the file against docs/bundle_schema.md (schema 1)",
            },
            errors.ExpressionSyntaxError: {
                "code": "E-SYNTAX",
                "message": "Expression could not be parsed",
                "solution": "Use rationals, generator names, + - * / ^, parentheses and nu(...)",
            },
            errors.UnknownIdentifier: {
                "code": "E-NAME",
                "message": "Expression uses a generator that is not declared",
                "solution": "Declare the generator in the chart's even_gens or odd_gens",
            },
            errors.DivisionByNonInvertible: {
                "code": "E-DIV",
                "message": "Division by an odd or non-invertible value",
                "solution": "Only divide by even expressions with a nonzero body",
            },
            errors.BadIndexBalance: {
                "code": "E-BALANCE",
                "message": "Multi-index does not pick k even and l odd rows",
                "solution": "Choose k indices among the even rows and l among the odd rows",
            },
            errors.DimensionMismatch: {
                "code": "E-DIM",
                "message": "Shapes, ranks or chart counts do not agree",
                "solution": "Check rank, chart count and level arguments",
            },
            errors.ParityViolation: {
                "code": "E-PARITY",
                "message": "An element has the wrong parity",
                "solution": "Even generators need even images and odd generators odd images",
            },
            errors.ContextMismatch: {
                "code": "E-CONTEXT",
                "message": "Elements from different charts were combined",
                "solution": "Express every image in the coordinates of the source chart",
            },
            errors.MissingImage: {
                "code": "E-IMAGE",
                "message": "An overlap does not give an image for every generator",
                "solution": "List an image for each generator of the target chart",
            },
            errors.NotInvertible: {
                "code": "E-INVERT",
                "message": "A value that must be invertible is not",
                "solution": "Check the overlap assumptions and the cocycle matrices",
            },
            errors.FormalUnitSum: {
                "code": "E-NUSUM",
                "message": "The formal unit 1nu cannot be added to a ring element here",
                "solution": "Keep 1nu entries isolated: only 0 may be added to 1nu",
            },
        }

    def describe(self, e: Exception) -> Dict[str, str]:
        for cls in type(e).__mro__:
            if cls in self.error_messages:
                return self.error_messages[cls]
        return {"code": "E-INTERNAL", "message": "Unexpected error", "solution": "Re-run with -vv and report the log"}

    def exit_code(self, e: Exception) -> int:
        """Input problems exit with 2; anything else raised during a check counts as a failure"""
        if isinstance(e, (errors.KernelNotTrivial, errors.EndpointMismatch, errors.Singular)):
            return EXIT_FAIL
        if isinstance(e, (errors.NuGrassError, OSError, ValueError)):
            return EXIT_INPUT_ERROR
        return EXIT_FAIL

    def handle_error(self, e: Exception) -> int:
        """Print the error with a suggested solution and return the exit code"""
        info = self.describe(e)
        self.console.print(f"[red]Error ({info['code']}): {info['message']}[/red]")
        self.console.print(f"[red]{e}[/red]")
        self.console.print(f"[cyan]Solution: {info['solution']}[/cyan]")
        return self.exit_code(e)
