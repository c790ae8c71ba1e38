"""Embeddable Prolog engine with a Python bridge.

    >>> e = BoundEngine("f(a). f(b).")
    >>> e.db.f(V)
    'a'
    >>> [x for x in e.db.f.iter(V)]
    ['a', 'b']
"""

from __future__ import annotations

import threading

from . import _core
from ._core import (
    BenchmarkError,
    BoundaryError,
    Cursor,
    Engine,
    HostObject,
    OpaqueTerm,
    PrologError,
)


class Record:
    """A compound term on the host side: name plus positional fields."""

    __slots__ = ("name", "fields")

    def __init__(self, name, *fields):
        self.name = name
        self.fields = tuple(fields)

    def __eq__(self, other):
        return isinstance(other, Record) and self.name == other.name and self.fields == other.fields

    def __hash__(self):
        return hash((self.name, self.fields))

    def __repr__(self):
        args = ", ".join(repr(f) for f in self.fields)
        return f"Record({self.name!r}, {args})" if args else f"Record({self.name!r})"


_core._set_record_type(Record)


class _Placeholder:
    """Marks an output argument in a db proxy call."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "V"


V = _Placeholder()


def _goal(name, args):
    """Goal text and inputs for name(args...); V marks outputs."""
    parts, inputs, outputs = [], {}, []
    for i, a in enumerate(args):
        if a is V:
            var = f"O{i}"
            outputs.append(var)
        else:
            var = f"I{i}"
            inputs[var] = a
        parts.append(var)
    head = _core.quote_atom(name)
    return (f"{head}({', '.join(parts)})" if parts else head), inputs, outputs


def _shape(answer, outputs):
    if not outputs:
        return True
    if len(outputs) == 1:
        return answer[outputs[0]]
    return tuple(answer[o] for o in outputs)


class _Answers:
    """Iterator over the answers of one query. Nothing runs until the first pull."""

    def __init__(self, cursor, outputs):
        self._cursor = cursor
        self._outputs = outputs
        self._owner = threading.get_ident()

    def __iter__(self):
        return self

    def __next__(self):
        if threading.get_ident() != self._owner:
            raise RuntimeError("an answer iterator is used from one thread only")
        return _shape(next(self._cursor), self._outputs)

    @property
    def cursor(self):
        return self._cursor


class _Predicate:
    def __init__(self, engine, name):
        self._engine = engine
        self._name = name

    def _once(self, args, nc):
        goal, inputs, outputs = _goal(self._name, args)
        answer = self._engine.query_once(goal, inputs, nc=nc)
        return None if answer is None else _shape(answer, outputs)

    def __call__(self, *args):
        """First answer, converted deeply; None when the goal fails."""
        return self._once(args, False)

    def nc(self, *args):
        """First answer without conversion: composites come back as OpaqueTerm."""
        return self._once(args, True)

    def iter(self, *args, nc=False):
        """Lazy iterator over every answer."""
        goal, inputs, outputs = _goal(self._name, args)
        return _Answers(self._engine.query(goal, inputs, nc=nc), outputs)

    def __repr__(self):
        return f"<predicate {self._name}>"


class _Db:
    def __init__(self, engine):
        self._engine = engine

    def __getattr__(self, name):
        if name.startswith("__"):
            raise AttributeError(name)
        return _Predicate(self._engine, name)

    def __getitem__(self, name):
        return _Predicate(self._engine, name)


class BoundEngine:
    """An engine with attribute-style predicate access through ``db``.

    ``engine.db.p(1, V)`` runs ``p(1, X)`` and returns X. Several V
    placeholders give a tuple, none gives True, failure gives None.
    """

    def __init__(self, source, *, indexing=True, unknown_fails=False):
        self.engine = Engine(source, indexing=indexing, unknown_fails=unknown_fails)
        self.db = _Db(self.engine)

    def query(self, goal, inputs=None, *, nc=None):
        return self.engine.query(goal, inputs or {}, nc=nc)

    def query_once(self, goal, inputs=None, *, nc=None):
        return self.engine.query_once(goal, inputs or {}, nc=nc)

    def make_term(self, value):
        return self.engine.make_term(value)

    @property
    def crossings(self):
        return self.engine.crossings

    def reset_crossings(self):
        self.engine.reset_crossings()

    @classmethod
    def from_fixture(cls, name, **kw):
        return cls(_core.fixture(name), **kw)


from .kernels import MICRO, cross_driver, host_kernel  # noqa: E402

__all__ = [
    "BenchmarkError",
    "BoundEngine",
    "BoundaryError",
    "Cursor",
    "Engine",
    "HostObject",
    "MICRO",
    "OpaqueTerm",
    "PrologError",
    "Record",
    "V",
    "cross_driver",
    "host_kernel",
]
