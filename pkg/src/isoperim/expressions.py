"""Small arithmetic-expression grammar for profiles, regions, and fields.

Supports + - * / ^, the functions cosh, sinh, sin, cos, tan, tanh, exp,
sqrt, log, abs, the constants pi and e, and named variables.  Expressions
compile to numpy-vectorized callables.
"""

import ast
import math

import numpy as np

from .errors import ConfigError

_FUNCTIONS = {
    "sin": np.sin,
    "cos": np.cos,
    "tan": np.tan,
    "sinh": np.sinh,
    "cosh": np.cosh,
    "tanh": np.tanh,
    "exp": np.exp,
    "sqrt": np.sqrt,
    "log": np.log,
    "abs": np.abs,
}

_CONSTANTS = {"pi": math.pi, "e": math.e}

_BINOPS = {
    ast.Add: np.add,
    ast.Sub: np.subtract,
    ast.Mult: np.multiply,
    ast.Div: np.true_divide,
    ast.Pow: np.power,
}


def _compile_node(node, variables):
    if isinstance(node, ast.Expression):
        return _compile_node(node.body, variables)
    if isinstance(node, ast.Constant):
        if not isinstance(node.value, (int, float)):
            raise ConfigError(f"non-numeric literal {node.value!r}", kind="parse")
        value = float(node.value)
        return lambda env: value
    if isinstance(node, ast.Name):
        name = node.id
        if name in _CONSTANTS:
            value = _CONSTANTS[name]
            return lambda env: value
        if name in variables:
            return lambda env: env[name]
        raise ConfigError(f"unknown name {name!r} (variables: {sorted(variables)})",
                          kind="parse")
    if isinstance(node, ast.BinOp):
        op = _BINOPS.get(type(node.op))
        if op is None:
            raise ConfigError(f"operator {ast.dump(node.op)} not allowed", kind="parse")
        left = _compile_node(node.left, variables)
        right = _compile_node(node.right, variables)
        return lambda env: op(left(env), right(env))
    if isinstance(node, ast.UnaryOp):
        operand = _compile_node(node.operand, variables)
        if isinstance(node.op, ast.USub):
            return lambda env: np.negative(operand(env))
        if isinstance(node.op, ast.UAdd):
            return operand
        raise ConfigError("unary operator not allowed", kind="parse")
    if isinstance(node, ast.Call):
        if not isinstance(node.func, ast.Name) or node.keywords:
            raise ConfigError("only plain function calls allowed", kind="parse")
        fn = _FUNCTIONS.get(node.func.id)
        if fn is None:
            raise ConfigError(f"unknown function {node.func.id!r}", kind="parse")
        if len(node.args) != 1:
            raise ConfigError(f"{node.func.id} takes one argument", kind="parse")
        arg = _compile_node(node.args[0], variables)
        return lambda env: fn(arg(env))
    raise ConfigError(f"syntax element {type(node).__name__} not allowed", kind="parse")


class Expression:
    """A compiled scalar expression in named variables.

    ``Expression("1 + z^2", ("z",))`` evaluates elementwise on arrays.
    """

    def __init__(self, text, variables):
        self.text = str(text).strip()
        self.variables = tuple(variables)
        python_text = self.text.replace("^", "**")
        try:
            tree = ast.parse(python_text, mode="eval")
        except SyntaxError as exc:
            raise ConfigError(f"cannot parse expression {self.text!r}: {exc}",
                              kind="parse") from None
        self._fn = _compile_node(tree, set(self.variables))

    def __call__(self, *args):
        env = dict(zip(self.variables, (np.asarray(a, dtype=float) for a in args)))
        out = self._fn(env)
        if args:
            return np.broadcast_to(out, np.broadcast_shapes(
                *(np.shape(a) for a in args))).astype(float, copy=True) \
                if np.ndim(out) == 0 else np.asarray(out, dtype=float)
        return float(out)

    def __repr__(self):
        return f"Expression({self.text!r}, vars={self.variables})"


def derivative(fn, x, order=1, h=1e-4):
    """Richardson-extrapolated central finite difference of a 1d callable."""
    x = np.asarray(x, dtype=float)

    def central(step):
        if order == 1:
            return (fn(x + step) - fn(x - step)) / (2.0 * step)
        if order == 2:
            return (fn(x + step) - 2.0 * fn(x) + fn(x - step)) / step**2
        raise ValueError("order must be 1 or 2")

    d_h = central(h)
    d_h2 = central(h / 2.0)
    # central differences have O(h^2) error, so Richardson weight is 4/3.
    return (4.0 * d_h2 - d_h) / 3.0
