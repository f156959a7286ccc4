"""DEVS model structure: ports, message bags, atomic and coupled models.

An atomic model is a subclass of :class:`Atomic` that implements the pure
functions of the Parallel DEVS atomic definition. The state value itself is
owned by whoever executes the model (see :mod:`rtdevs.coordinator`); the
model object only describes behaviour and declares ports.

A coupled model is a :class:`Coupled` instance listing its components and the
three coupling tables. Couplings name child components by ``name`` and ports
by port name::

    Coupled(
        "blinkySystem",
        [blinky, generator],
        ic=[(("generator", "out"), ("blinky", "in"))],
    )

EIC entries are ``(parent_in_port, (child, child_in_port))`` and EOC entries
are ``((child, child_out_port), parent_out_port)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterable, Iterator, Mapping, Sequence, Union

from .timebase import INFINITY, Time, check_time


class ModelError(RuntimeError):
    """A model misbehaved while being executed."""

    def __init__(self, model_name: str, message: str):
        super().__init__(f"{model_name}: {message}")
        self.model_name = model_name


class StructureError(ValueError):
    """A coupled model failed structural validation."""

    def __init__(self, errors: Sequence[str]):
        super().__init__("invalid coupled model:\n  " + "\n  ".join(errors))
        self.errors = list(errors)


@dataclass(frozen=True)
class Port:
    name: str
    direction: str  # "input" or "output"
    kind: type


def conforms(value: Any, kind: type) -> bool:
    """True if ``value`` is an acceptable payload for a port of ``kind``.

    ``bool`` is an ``int`` subclass in Python; the two are kept apart so a
    boolean port never silently carries integers and vice versa.
    """
    if kind is object:
        return True
    if kind is int:
        return isinstance(value, int) and not isinstance(value, bool)
    return isinstance(value, kind)


class Bag:
    """Multiset of payloads per port, for one instant."""

    __slots__ = ("_items",)

    def __init__(self, items: Mapping[str, Iterable[Any]] | None = None):
        self._items: dict[str, list] = {}
        if items:
            for port, values in items.items():
                for v in values:
                    self.add(port, v)

    @classmethod
    def of(cls, port: str, *values: Any) -> "Bag":
        bag = cls()
        for v in values:
            bag.add(port, v)
        return bag

    def add(self, port: str, value: Any) -> "Bag":
        self._items.setdefault(port, []).append(value)
        return self

    def values(self, port: str) -> list:
        return list(self._items.get(port, ()))

    def __getitem__(self, port: str) -> list:
        return self.values(port)

    def ports(self) -> list[str]:
        return [p for p, vs in self._items.items() if vs]

    def items(self) -> Iterator[tuple[str, list]]:
        for p, vs in self._items.items():
            if vs:
                yield p, list(vs)

    def clear(self) -> None:
        self._items.clear()

    def __bool__(self) -> bool:
        return any(self._items.values())

    def __len__(self) -> int:
        return sum(len(vs) for vs in self._items.values())

    def __eq__(self, other) -> bool:
        if not isinstance(other, Bag):
            return NotImplemented
        if set(self.ports()) != set(other.ports()):
            return False
        for port in self.ports():
            rest = other.values(port)
            for v in self._items[port]:
                try:
                    rest.remove(v)
                except ValueError:
                    return False
            if rest:
                return False
        return True

    def __repr__(self) -> str:
        return f"Bag({dict(self.items())!r})"


class Atomic:
    """Base class for atomic models.

    Subclasses set ``inputs``/``outputs`` (port name -> payload type) and
    implement ``initial_state``, ``ta``, ``delta_int``, ``delta_ext`` and
    ``output``. ``delta_con`` defaults to internal-then-external.
    ``state_text`` controls the state column of the trace; returning
    ``None`` suppresses the state line.

    Transition functions must not mutate the state they are given.
    """

    inputs: Mapping[str, type] = {}
    outputs: Mapping[str, type] = {}

    def __init__(self, name: str):
        self.name = name

    def initial_state(self) -> Any:
        raise NotImplementedError

    def ta(self, s) -> Time:
        raise NotImplementedError

    def delta_int(self, s):
        raise NotImplementedError

    def delta_ext(self, s, e: int, bag: Bag):
        raise NotImplementedError

    def delta_con(self, s, bag: Bag):
        return default_confluent(self, s, bag)

    def output(self, s) -> Bag:
        return Bag()

    def state_text(self, s) -> str | None:
        return str(s)

    def ports(self) -> list[Port]:
        return _ports(self)

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.name!r}>"


Endpoint = tuple[str, str]
EIC = tuple[str, Endpoint]
EOC = tuple[Endpoint, str]
IC = tuple[Endpoint, Endpoint]


class Coupled:
    """A composition of atomic and coupled components."""

    def __init__(
        self,
        name: str,
        components: Sequence["Model"],
        *,
        eic: Iterable[EIC] = (),
        eoc: Iterable[EOC] = (),
        ic: Iterable[IC] = (),
        inputs: Mapping[str, type] | None = None,
        outputs: Mapping[str, type] | None = None,
    ):
        self.name = name
        self.components = list(components)
        self.eic = [(str(p), (str(c), str(cp))) for p, (c, cp) in eic]
        self.eoc = [((str(c), str(cp)), str(p)) for (c, cp), p in eoc]
        self.ic = [((str(a), str(ap)), (str(b), str(bp))) for (a, ap), (b, bp) in ic]
        self.inputs = dict(inputs or {})
        self.outputs = dict(outputs or {})

    def child(self, name: str) -> "Model":
        for c in self.components:
            if c.name == name:
                return c
        raise KeyError(f"{self.name} has no component {name!r}")

    def ports(self) -> list[Port]:
        return _ports(self)

    def __repr__(self) -> str:
        return f"<Coupled {self.name!r} ({len(self.components)} components)>"


Model = Union[Atomic, Coupled]


def _ports(model) -> list[Port]:
    return [Port(n, "input", k) for n, k in model.inputs.items()] + [
        Port(n, "output", k) for n, k in model.outputs.items()
    ]


def default_confluent(behavior: Atomic, s, bag: Bag):
    """Internal transition first, then the external one with zero elapsed time."""
    if not bag:
        raise ValueError("default_confluent needs a non-empty bag")
    return behavior.delta_ext(behavior.delta_int(s), 0, bag)


def validate_coupled(model: Model) -> list[str]:
    """Return every structural violation in ``model`` (empty list when valid).

    Nested coupled components are checked recursively. An atomic root is
    trivially valid apart from its port declarations.
    """
    errors: list[str] = []
    seen: dict[int, str] = {}
    _validate(model, errors, seen, model.name)
    return errors


def check_coupled(model: Model) -> None:
    """Raise :class:`StructureError` unless ``model`` validates."""
    errors = validate_coupled(model)
    if errors:
        raise StructureError(errors)


def _validate(model, errors: list[str], seen: dict[int, str], path: str) -> None:
    if id(model) in seen:
        errors.append(f"{path}: model instance already used at {seen[id(model)]}")
        return
    seen[id(model)] = path
    for direction, decl in (("input", model.inputs), ("output", model.outputs)):
        for pname, kind in decl.items():
            if not isinstance(kind, type):
                errors.append(f"{path}: {direction} port {pname!r} kind {kind!r} is not a type")
    if isinstance(model, Atomic):
        return
    if not isinstance(model, Coupled):
        errors.append(f"{path}: {model!r} is neither Atomic nor Coupled")
        return

    children: dict[str, Model] = {}
    for c in model.components:
        if c.name in children:
            errors.append(f"{path}: duplicate component name {c.name!r}")
        children[c.name] = c

    def child_port(cname: str, pname: str, direction: str, where: str):
        child = children.get(cname)
        if child is None:
            errors.append(f"{path}: {where} names nonexistent component {cname!r}")
            return None
        decl = child.inputs if direction == "input" else child.outputs
        if pname not in decl:
            errors.append(f"{path}: {where} names nonexistent {direction} port {cname}.{pname}")
            return None
        return decl[pname]

    def own_port(pname: str, direction: str, where: str):
        decl = model.inputs if direction == "input" else model.outputs
        if pname not in decl:
            errors.append(f"{path}: {where} names nonexistent {direction} port {model.name}.{pname}")
            return None
        return decl[pname]

    def match(src_kind, dst_kind, where: str) -> None:
        if src_kind is not None and dst_kind is not None and src_kind is not dst_kind:
            errors.append(
                f"{path}: {where}: value-kind mismatch "
                f"({src_kind.__name__} -> {dst_kind.__name__})"
            )

    for pport, (c, cp) in model.eic:
        where = f"EIC {model.name}.{pport} -> {c}.{cp}"
        match(own_port(pport, "input", where), child_port(c, cp, "input", where), where)
    for (c, cp), pport in model.eoc:
        where = f"EOC {c}.{cp} -> {model.name}.{pport}"
        match(child_port(c, cp, "output", where), own_port(pport, "output", where), where)
    for (a, ap), (b, bp) in model.ic:
        where = f"IC {a}.{ap} -> {b}.{bp}"
        if a == b:
            errors.append(f"{path}: {where}: a component may not be coupled to itself")
        match(child_port(a, ap, "output", where), child_port(b, bp, "input", where), where)

    for c in model.components:
        _validate(c, errors, seen, f"{path}.{c.name}")


def atomics(root: Model) -> list[Atomic]:
    """Atomic models in depth-first registration order."""
    if isinstance(root, Atomic):
        return [root]
    out: list[Atomic] = []
    for c in root.components:
        out.extend(atomics(c))
    return out


def assign_model_ids(root: Model) -> dict[int, Atomic]:
    """Number atomic models 1, 2, ... in depth-first registration order."""
    return {i: m for i, m in enumerate(atomics(root), start=1)}


def flatten(root: Model) -> Model:
    """Collapse a hierarchy into a single-level coupled model.

    The result has the same external ports and the same atomic instances
    (in the same registration order), with every multi-level coupling chain
    composed into one direct coupling. Atomic names must be unique across the
    whole hierarchy.
    """
    if isinstance(root, Atomic):
        return root
    flat = _flatten(root)
    names = [a.name for a in flat.components]
    dupes = sorted({n for n in names if names.count(n) > 1})
    if dupes:
        raise ValueError(f"cannot flatten: atomic names not unique: {dupes}")
    return flat


def _flatten(model: Coupled) -> Coupled:
    # Each child is flattened first; then parent couplings are composed with
    # the child's EIC (on the destination side) and EOC (on the source side).
    flat_children: dict[str, Model] = {}
    comps: list[Atomic] = []
    ic: list[IC] = []
    for c in model.components:
        fc = c if isinstance(c, Atomic) else _flatten(c)
        flat_children[c.name] = fc
        if isinstance(fc, Atomic):
            comps.append(fc)
        else:
            comps.extend(fc.components)
            ic.extend(fc.ic)

    def sources(cname: str, port: str) -> list[Endpoint]:
        fc = flat_children[cname]
        if isinstance(fc, Atomic):
            return [(cname, port)]
        return [src for src, p in fc.eoc if p == port]

    def sinks(cname: str, port: str) -> list[Endpoint]:
        fc = flat_children[cname]
        if isinstance(fc, Atomic):
            return [(cname, port)]
        return [dst for p, dst in fc.eic if p == port]

    for (a, ap), (b, bp) in model.ic:
        for src in sources(a, ap):
            for dst in sinks(b, bp):
                ic.append((src, dst))
    eic = [(p, dst) for p, (c, cp) in model.eic for dst in sinks(c, cp)]
    eoc = [(src, p) for (c, cp), p in model.eoc for src in sources(c, cp)]
    return Coupled(model.name, comps, eic=eic, eoc=eoc, ic=ic,
                   inputs=model.inputs, outputs=model.outputs)


def positive_ta(model: Atomic, s) -> Time:
    """``model.ta(s)`` checked against the positive-or-infinite codomain."""
    sigma = model.ta(s)
    try:
        check_time(sigma)
    except (TypeError, ValueError, OverflowError) as exc:
        raise ModelError(model.name, f"bad time advance {sigma!r}: {exc}") from exc
    if sigma is not INFINITY and sigma == 0:
        raise ModelError(model.name, "time advance must be strictly positive or INFINITY")
    return sigma
