"""Type checking, evaluation, the refinement oracle and C emission for Cogent core programs."""

import json

from . import _core

__all__ = [
    "CogentError",
    "anf",
    "check",
    "desugar",
    "emit_c",
    "find_c_compiler",
    "max_kind",
    "mono",
    "oracle",
    "run",
]


class CogentError(Exception):
    """A toolchain error. `code` is the error code name, e.g. "TypeMismatch"."""

    def __init__(self, code, diagnostic, message):
        super().__init__(diagnostic)
        self.code = code
        self.diagnostic = diagnostic
        self.message = message


def _call(f, *args):
    try:
        return f(*args)
    except _core.Error as e:
        raise CogentError(*e.args) from None


def check(source):
    """Typing derivations per definition, as decoded JSON."""
    return json.loads(_call(_core.check, source))


def run(source, fn, arg, semantics="value", type_args=()):
    """Applies `fn` to `arg` (a value in JSON form). Update runs return {"value", "store"}."""
    return json.loads(_call(_core.run, source, fn, json.dumps(arg), semantics, list(type_args)))


def oracle(source, fn="main", count=20, seed=0):
    """Refinement oracle verdicts on `count` generated inputs."""
    return json.loads(_call(_core.oracle, source, fn, count, seed))


def desugar(source):
    return _call(_core.desugar, source)


def anf(source):
    return _call(_core.anf, source)


def mono(source, entries=()):
    """(program text, rename map)."""
    text, renames = _call(_core.mono, source, list(entries))
    return text, json.loads(renames)


def emit_c(source, stem="prog"):
    """{"header": ..., "source": ...} for the monomorphised, normalised program."""
    return _call(_core.emit_c, source, stem)


def max_kind(type_text, delta=None):
    """Largest kind of a type as a subset of "DSE"; `delta` maps variables to kinds."""
    return _call(_core.max_kind, type_text, dict(delta or {}))


def find_c_compiler():
    return _core.find_c_compiler()
