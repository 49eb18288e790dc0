"""Reading and writing the line-based TSR model format and its JSON mirror.

Example::

    ts 1
    states 5
    name 0 s1
    initial 0
    bad 4
    trans 0 1
    ...
    counterexample 0 1 4
    group turn0 0 1
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

from .ts import (
    Counterexample,
    Issue,
    StateGrouping,
    TransitionSystem,
    ValidationError,
    make_grouping,
    validate_counterexample,
    validate_system,
)

MAGIC = "ts"
VERSION = "1"


class TSRSyntaxError(ValidationError):
    def __init__(self, lineno: int, message: str):
        self.lineno = lineno
        super().__init__([Issue("SyntaxError", message, (lineno,))])


@dataclass(frozen=True)
class Model:
    system: TransitionSystem
    counterexample: Optional[Counterexample] = None
    grouping: Optional[StateGrouping] = None


def _ints(tokens, lineno):
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise TSRSyntaxError(lineno, f"expected integers, got {' '.join(tokens)!r}") from None


def parse_tsr(text: str, complete_sinks: bool = False) -> Model:
    lines = text.splitlines()
    n = None
    names: dict[int, str] = {}
    initial = None
    bad: list[int] = []
    trans: list[tuple[int, int]] = []
    run = None
    groups: list[tuple[str, list[int]]] = []
    saw_header = False

    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        kw, args = tokens[0], tokens[1:]
        if not saw_header:
            if tokens != [MAGIC, VERSION]:
                raise TSRSyntaxError(lineno, f"expected header 'ts 1', got {line!r}")
            saw_header = True
            continue
        if kw == "states":
            if n is not None:
                raise TSRSyntaxError(lineno, "duplicate 'states' line")
            if len(args) != 1:
                raise TSRSyntaxError(lineno, "'states' takes exactly one count")
            (n,) = _ints(args, lineno)
            continue
        if n is None:
            raise TSRSyntaxError(lineno, f"'{kw}' before 'states'")
        if kw == "name":
            if len(args) < 2:
                raise TSRSyntaxError(lineno, "'name' needs an id and a string")
            (sid,) = _ints(args[:1], lineno)
            if sid in names:
                raise TSRSyntaxError(lineno, f"state {sid} named twice")
            names[sid] = line.split(None, 2)[2]
        elif kw == "initial":
            if initial is not None or len(args) != 1:
                raise TSRSyntaxError(lineno, "'initial' must appear once with one id")
            (initial,) = _ints(args, lineno)
        elif kw == "bad":
            if not args:
                raise TSRSyntaxError(lineno, "'bad' needs at least one id")
            bad.extend(_ints(args, lineno))
        elif kw == "trans":
            if len(args) != 2:
                raise TSRSyntaxError(lineno, "'trans' takes a source and a target")
            src, dst = _ints(args, lineno)
            trans.append((src, dst))
        elif kw == "counterexample":
            if run is not None:
                raise TSRSyntaxError(lineno, "duplicate 'counterexample' line")
            if not args:
                raise TSRSyntaxError(lineno, "'counterexample' needs at least one id")
            run = _ints(args, lineno)
        elif kw == "group":
            if len(args) < 2:
                raise TSRSyntaxError(lineno, "'group' needs a name and at least one id")
            groups.append((args[0], _ints(args[1:], lineno)))
        else:
            raise TSRSyntaxError(lineno, f"unknown keyword {kw!r}")

    if not saw_header:
        raise TSRSyntaxError(1, "empty input")
    if n is None:
        raise TSRSyntaxError(len(lines), "missing 'states' line")
    if initial is None:
        raise TSRSyntaxError(len(lines), "missing 'initial' line")
    bad_ids = [i for i in names if not (0 <= i < n)]
    if bad_ids:
        raise ValidationError([Issue("UnknownState", f"name given for state {i}", (i,)) for i in bad_ids])

    return _build(n, names, initial, bad, trans, run, groups if groups else None, complete_sinks)


def _build(n, names, initial, bad, trans, run, groups, complete_sinks) -> Model:
    name_list = [names.get(i, str(i)) for i in range(n)] if names else None
    ts = validate_system(n, trans, initial, bad, name_list, complete_sinks=complete_sinks)
    ce = validate_counterexample(ts, run) if run is not None else None
    grouping = make_grouping(ts, groups) if groups is not None else None
    return Model(ts, ce, grouping)


def emit_tsr(model: Model) -> str:
    ts = model.system
    out = [f"{MAGIC} {VERSION}", f"states {ts.num_states}"]
    for i, nm in enumerate(ts.names):
        if nm != str(i):
            out.append(f"name {i} {nm}")
    out.append(f"initial {ts.initial}")
    if ts.bad:
        out.append("bad " + " ".join(map(str, sorted(ts.bad))))
    out.extend(f"trans {s} {d}" for s, d in ts.transitions())
    if model.counterexample is not None:
        out.append("counterexample " + " ".join(map(str, model.counterexample.run)))
    if model.grouping is not None:
        for name, block in zip(model.grouping.names, model.grouping.blocks):
            out.append(f"group {name} " + " ".join(map(str, block)))
    return "\n".join(out) + "\n"


def model_to_json(model: Model) -> dict:
    ts = model.system
    doc = {
        "states": ts.num_states,
        "names": list(ts.names),
        "initial": ts.initial,
        "bad": sorted(ts.bad),
        "trans": [[s, d] for s, d in ts.transitions()],
    }
    if model.counterexample is not None:
        doc["counterexample"] = list(model.counterexample.run)
    if model.grouping is not None:
        doc["groups"] = {name: list(b) for name, b in zip(model.grouping.names, model.grouping.blocks)}
    return doc


def model_from_json(doc: dict, complete_sinks: bool = False) -> Model:
    try:
        n = doc["states"]
        initial = doc["initial"]
    except KeyError as e:
        raise ValidationError([Issue("MissingKey", f"JSON model lacks {e.args[0]!r}")]) from None
    names = dict(enumerate(doc["names"])) if doc.get("names") else {}
    trans = [tuple(t) for t in doc.get("trans", [])]
    groups = doc.get("groups")
    if isinstance(groups, dict):
        groups = list(groups.items())
    return _build(n, names, initial, doc.get("bad", []), trans, doc.get("counterexample"), groups, complete_sinks)


def loads(text: str, complete_sinks: bool = False) -> Model:
    """Parse either format, picking JSON when the text starts with ``{``."""
    if text.lstrip().startswith("{"):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as e:
            raise TSRSyntaxError(e.lineno, f"invalid JSON: {e.msg}") from None
        return model_from_json(doc, complete_sinks)
    return parse_tsr(text, complete_sinks)
