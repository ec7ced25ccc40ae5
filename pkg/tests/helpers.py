"""Shared fixtures-by-function for the test suite (corpus loading, cached builds)."""

import itertools
import json
import re
import subprocess
import sys
import textwrap
from functools import lru_cache
from importlib import resources

from lissom.compiler import compile_program
from lissom.lang import parse_program, typecheck
from lissom.producer import produce

INPUT_RANGE = range(-3, 4)


@lru_cache(maxsize=None)
def corpus():
    """``{name: (text, max_inputs)}`` for every bundled program."""
    out = {}
    for entry in sorted(resources.files("lissom").joinpath("corpus").iterdir(), key=lambda p: p.name):
        if entry.name.endswith(".liss"):
            text = entry.read_text(encoding="utf-8")
            n = int(re.search(r"max-inputs:\s*(\d+)", text).group(1))
            out[entry.name[:-5]] = (text, n)
    return out


def corpus_names():
    return list(corpus())


@lru_cache(maxsize=None)
def typed(name):
    return typecheck(parse_program(corpus()[name][0]))


def typed_text(text):
    return typecheck(parse_program(text))


@lru_cache(maxsize=None)
def compiled(name):
    return compile_program(typed(name))


@lru_cache(maxsize=None)
def built(name):
    """``(bundle, module, trace, bytecode_obligations)``."""
    return produce(corpus()[name][0])


def input_vectors(max_inputs):
    for k in range(max_inputs + 1):
        yield from (list(v) for v in itertools.product(INPUT_RANGE, repeat=k))


# -- import isolation ---------------------------------------------------------

PRODUCER_SIDE = ["lissom.lang", "lissom.compiler", "lissom.producer", "lissom.proof.prover",
                 "lissom.proof.fm", "lissom.vcgen.source", "lissom.cli"]

_BLOCKER = """
import sys

BLOCKED = {blocked!r}


class Block:
    def find_spec(self, name, path=None, target=None):
        if any(name == b or name.startswith(b + ".") for b in BLOCKED):
            raise ImportError("blocked import of " + name)
        return None


sys.meta_path.insert(0, Block())
"""


def run_isolated(blocked, body):
    code = textwrap.dedent(_BLOCKER.format(blocked=blocked)) + textwrap.dedent(body)
    proc = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0, proc.stderr
    return json.loads(proc.stdout.strip().splitlines()[-1])


def loaded(prefixes):
    return f"[m for m in sys.modules if any(m == p or m.startswith(p + '.') for p in {prefixes!r})]"
