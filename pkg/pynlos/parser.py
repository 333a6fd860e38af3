# -*- coding: utf-8 -*-

import math
import operator

import numpy as np
import pyparsing as pp
from pyparsing import pyparsing_common as common

from .exceptions import GridSyntaxError

# grid expressions:
# start:stop:count  -> count nodes, uniform, both ends included
# value             -> single node
#
# start, stop and value are arithmetic expressions over numbers and pi,
# e.g. "0:2*pi:72", "pi/3", "-(1+2):40:5"

_BINARY = {"+": operator.add, "-": operator.sub, "*": operator.mul, "/": operator.truediv}


def _number(expr, loc, toks):
    return float(toks[0])


def _signed(expr, loc, toks):
    sign, value = toks[0]
    return -value if sign == "-" else value


def _binary(expr, loc, toks):
    toks = toks[0]
    value = toks[0]
    for op, operand in zip(toks[1::2], toks[2::2]):
        value = _BINARY[op](value, operand)
    return value


def _grid(expr, loc, toks):
    start, stop, count = toks
    if count < 1:
        raise pp.ParseFatalException(expr, loc, f"Grid count must be at least 1, got {count}")
    if count > 1 and not stop > start:
        raise pp.ParseFatalException(expr, loc, f"Grid stop {stop} must exceed start {start}")
    return [np.linspace(start, stop, count) if count > 1 else np.array([start])]


def _single(expr, loc, toks):
    return [np.array([toks[0]])]


PI = pp.CaselessKeyword("pi").setParseAction(pp.replaceWith(math.pi))

COLON = pp.Literal(":").suppress()

NUMBER = common.fnumber.copy().setParseAction(_number)

OPERAND = NUMBER | PI

EXPRESSION = pp.infixNotation(
    OPERAND,
    [
        (pp.oneOf("+ -"), 1, pp.opAssoc.RIGHT, _signed),
        (pp.oneOf("* /"), 2, pp.opAssoc.LEFT, _binary),
        (pp.oneOf("+ -"), 2, pp.opAssoc.LEFT, _binary),
    ],
)

COUNT = common.integer

RANGE = (EXPRESSION + COLON + EXPRESSION + COLON + COUNT).setParseAction(_grid)

SINGLE = EXPRESSION.copy().setParseAction(_single)

GRID = RANGE | SINGLE


class GridParser:
    def parse(self, expr):
        try:
            result = GRID.parseString(expr.strip(), parseAll=True)
        except pp.ParseBaseException as exc:
            raise GridSyntaxError(f"Invalid grid {expr!r}: {exc.msg}") from exc
        except ZeroDivisionError as exc:
            raise GridSyntaxError(f"Division by zero in grid: {expr}") from exc

        return result[0]
