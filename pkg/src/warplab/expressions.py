"""Safe arithmetic expression parsing for custom warps, profiles, and boundary data.

Supported grammar: +, -, *, /, ** (powers), unary minus, parentheses, numeric
literals, the constants ``pi`` and ``e``, the functions exp, log, sin, cos,
sinh, cosh, and the declared variables (``r`` and/or ``theta``; a literal
``θ`` in the source is accepted and read as ``theta``).
"""

from __future__ import annotations

import ast
import math
from typing import Callable

from .errors import ConfigError

_FUNCTIONS = {
    "exp": math.exp,
    "log": math.log,
    "sin": math.sin,
    "cos": math.cos,
    "sinh": math.sinh,
    "cosh": math.cosh,
}

_CONSTANTS = {"pi": math.pi, "e": math.e}

_BINOPS = (ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow)
_UNARYOPS = (ast.USub, ast.UAdd)


def _validate(node: ast.AST, variables: tuple[str, ...], source: str) -> None:
    if isinstance(node, ast.Expression):
        _validate(node.body, variables, source)
    elif isinstance(node, ast.BinOp) and isinstance(node.op, _BINOPS):
        _validate(node.left, variables, source)
        _validate(node.right, variables, source)
    elif isinstance(node, ast.UnaryOp) and isinstance(node.op, _UNARYOPS):
        _validate(node.operand, variables, source)
    elif isinstance(node, ast.Call):
        if not isinstance(node.func, ast.Name) or node.func.id not in _FUNCTIONS:
            raise ConfigError(f"unknown function in expression {source!r}")
        if len(node.args) != 1 or node.keywords:
            raise ConfigError(f"functions take exactly one argument: {source!r}")
        _validate(node.args[0], variables, source)
    elif isinstance(node, ast.Name):
        if node.id not in variables and node.id not in _CONSTANTS:
            raise ConfigError(
                f"unknown name {node.id!r} in expression {source!r} "
                f"(allowed variables: {', '.join(variables)})"
            )
    elif isinstance(node, ast.Constant):
        if not isinstance(node.value, (int, float)):
            raise ConfigError(f"non-numeric literal in expression {source!r}")
    else:
        raise ConfigError(f"unsupported syntax in expression {source!r}")


def compile_expression(
    source: str, variables: tuple[str, ...] = ("r", "theta")
) -> Callable[..., float]:
    """Compile a restricted arithmetic expression into a float-valued callable.

    The returned callable takes positional arguments matching ``variables``.
    Raises ConfigError for anything outside the whitelisted grammar.
    """
    text = source.replace("θ", "theta").strip()
    if not text:
        raise ConfigError("empty expression")
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as exc:
        raise ConfigError(f"cannot parse expression {source!r}: {exc.msg}") from exc
    _validate(tree, variables, source)
    code = compile(tree, filename="<expression>", mode="eval")
    env = {"__builtins__": {}}
    env.update(_FUNCTIONS)
    env.update(_CONSTANTS)

    def evaluate(*args: float) -> float:
        scope = dict(zip(variables, args))
        return float(eval(code, env, scope))

    evaluate.__doc__ = f"expression: {text}"
    return evaluate
