"""First-order assertion logic over integers, finite sets and vectors."""

from .syntax import *  # noqa: F401,F403
from .canon import (  # noqa: F401
    ParseError, canonical_text, closed_text, parse_closed, parse_formula,
    parse_term, to_sexpr_text, to_text,
)
from .semantics import (  # noqa: F401
    CounterModel, EvalError, NonGround, TooLarge, Valid, ediv, emod,
    enumerate_validity, eval_ground, eval_term, state_window,
)
