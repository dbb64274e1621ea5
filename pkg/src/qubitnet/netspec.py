"""JSON network descriptions.

Schema::

    {
      "qubits": 4,
      "phi": "pi/3",                       # radians, or "pi/2", "2*pi/3", ...
      "interactions": [
        {"kind": "cu2",  "controls": [1],    "targets": [2],    "p": 0.5},
        {"kind": "cu31", "controls": [1],    "targets": [2, 3], "p": 1.0},
        ...
      ],
      "family_weights": {"p2": 0.5, "p31": 0.5, "p32": 0.0}   # optional
    }

Probabilities are normalized per gate family; families are then mixed with
``family_weights``. The weights may be omitted when only one family is present.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

from .gates import ARITY
from .ruo import RandomUnitaryOperation, from_topology, mix
from .topology import KINDS, Topology

PROB_TOL = 1e-9
WEIGHT_KEYS = {"cu2": "p2", "cu31": "p31", "cu32": "p32"}
_ANGLE = re.compile(r"^\s*(?:(?P<num>[0-9.]+)\s*\*?\s*)?pi\s*(?:/\s*(?P<den>[0-9.]+))?\s*$")


class SpecError(ValueError):
    """Invalid network description; the message names the offending field."""


def parse_angle(value) -> float:
    """Radians from a number or a string like ``"pi/2"`` or ``"2*pi/3"``."""
    if isinstance(value, bool):
        raise SpecError(f"phi: expected a number or angle string, got {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        m = _ANGLE.match(value.lower())
        if m:
            num = float(m["num"]) if m["num"] else 1.0
            den = float(m["den"]) if m["den"] else 1.0
            if num == 1.0:
                return math.pi / den
            return num * math.pi / den
        try:
            return float(value)
        except ValueError:
            pass
    raise SpecError(f"phi: cannot parse angle {value!r}")


@dataclass(frozen=True)
class Interaction:
    kind: str
    controls: tuple[int, ...]
    targets: tuple[int, ...]
    p: float

    def hyperedge(self):
        if self.kind == "cu2":
            return (self.controls[0], self.targets[0])
        if self.kind == "cu31":
            return (self.controls[0], self.targets)
        return (self.controls, self.targets[0])


@dataclass
class NetworkSpec:
    qubits: int
    phi: float
    interactions: list[Interaction]
    family_weights: dict[str, float] = field(default_factory=dict)

    def kinds(self) -> list[str]:
        return [k for k in ("cu2", "cu31", "cu32") if any(i.kind == k for i in self.interactions)]

    def topologies(self) -> dict[str, Topology]:
        out = {}
        for kind in self.kinds():
            items = [i for i in self.interactions if i.kind == kind]
            out[kind] = KINDS[kind](self.qubits, tuple(i.hyperedge() for i in items), tuple(i.p for i in items))
        return out

    def weights(self) -> dict[str, float]:
        kinds = self.kinds()
        if len(kinds) == 1 and not self.family_weights:
            return {kinds[0]: 1.0}
        return {k: self.family_weights[WEIGHT_KEYS[k]] for k in kinds}

    def ruo(self) -> RandomUnitaryOperation:
        topos = self.topologies()
        w = self.weights()
        parts = [(from_topology(t, self.phi), w[k]) for k, t in topos.items()]
        return parts[0][0] if len(parts) == 1 else mix(parts)

    def to_dict(self) -> dict:
        d = {
            "qubits": self.qubits,
            "phi": self.phi,
            "interactions": [
                {"kind": i.kind, "controls": list(i.controls), "targets": list(i.targets), "p": i.p}
                for i in self.interactions
            ],
        }
        if self.family_weights:
            d["family_weights"] = dict(self.family_weights)
        return d


def _int_list(value, where: str) -> tuple[int, ...]:
    if not isinstance(value, list) or not all(isinstance(v, int) and not isinstance(v, bool) for v in value):
        raise SpecError(f"{where}: expected a list of integers, got {value!r}")
    return tuple(value)


def spec_from_dict(data: dict) -> NetworkSpec:
    if not isinstance(data, dict):
        raise SpecError("top level: expected a JSON object")
    extra = set(data) - {"qubits", "phi", "interactions", "family_weights"}
    if extra:
        raise SpecError(f"top level: unknown field(s) {sorted(extra)}")
    n = data.get("qubits")
    if not isinstance(n, int) or isinstance(n, bool) or n < 2:
        raise SpecError(f"qubits: expected an integer >= 2, got {n!r}")
    if "phi" not in data:
        raise SpecError("phi: missing")
    phi = parse_angle(data["phi"])
    if not 0 < phi < math.pi:
        raise SpecError(f"phi: {phi!r} must lie strictly inside (0, pi)")
    raw = data.get("interactions")
    if not isinstance(raw, list) or not raw:
        raise SpecError("interactions: expected a non-empty list")

    items = []
    for k, it in enumerate(raw):
        where = f"interactions[{k}]"
        if not isinstance(it, dict):
            raise SpecError(f"{where}: expected an object")
        kind = it.get("kind")
        if kind not in ARITY:
            raise SpecError(f"{where}.kind: expected one of {sorted(ARITY)}, got {kind!r}")
        controls = _int_list(it.get("controls"), f"{where}.controls")
        targets = _int_list(it.get("targets"), f"{where}.targets")
        nc, nt = ARITY[kind]
        if len(controls) != nc or len(targets) != nt:
            raise SpecError(f"{where}: {kind} needs {nc} control(s) and {nt} target(s)")
        qs = controls + targets
        for q in qs:
            if not 1 <= q <= n:
                raise SpecError(f"{where}: qubit index {q} outside 1..{n}")
        if len(set(qs)) != len(qs):
            raise SpecError(f"{where}: control and target qubits must be distinct, got {list(qs)}")
        p = it.get("p")
        if not isinstance(p, (int, float)) or isinstance(p, bool) or not p > 0:
            raise SpecError(f"{where}.p: expected a positive number, got {p!r}")
        items.append(Interaction(kind, controls, targets, float(p)))

    spec = NetworkSpec(n, phi, items, {})
    for kind in spec.kinds():
        total = sum(i.p for i in items if i.kind == kind)
        if abs(total - 1) > PROB_TOL:
            raise SpecError(f"interactions: {kind} probabilities sum to {total:.12g}, expected 1")
    try:
        spec.topologies()
    except ValueError as exc:
        raise SpecError(f"interactions: {exc}") from None

    fw = data.get("family_weights")
    if fw is not None:
        if not isinstance(fw, dict) or set(fw) - set(WEIGHT_KEYS.values()):
            raise SpecError(f"family_weights: expected keys among {sorted(WEIGHT_KEYS.values())}")
        weights = {k: float(fw.get(k, 0.0)) for k in WEIGHT_KEYS.values()}
        present = {WEIGHT_KEYS[k] for k in spec.kinds()}
        for key, w in weights.items():
            if key in present and not w > 0:
                raise SpecError(f"family_weights.{key}: must be positive when that family is present")
            if key not in present and w != 0:
                raise SpecError(f"family_weights.{key}: nonzero weight for a family with no interactions")
        if abs(sum(weights.values()) - 1) > PROB_TOL:
            raise SpecError(f"family_weights: weights sum to {sum(weights.values()):.12g}, expected 1")
        spec.family_weights = weights
    elif len(spec.kinds()) > 1:
        raise SpecError("family_weights: required when more than one gate family is present")
    return spec


def parse_spec(path) -> NetworkSpec:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"{path}: malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return spec_from_dict(data)


def spec_from_topologies(
    topologies: list[Topology], phi: float, family_weights: dict[str, float] | None = None
) -> NetworkSpec:
    items = []
    for t in topologies:
        for e, p in zip(t.hyperedges, t.probs):
            if t.kind == "cu2":
                items.append(Interaction("cu2", (e[0],), (e[1],), p))
            elif t.kind == "cu31":
                items.append(Interaction("cu31", (e[0],), tuple(e[1]), p))
            else:
                items.append(Interaction("cu32", tuple(e[0]), (e[1],), p))
    n = topologies[0].n
    return NetworkSpec(n, phi, items, dict(family_weights or {}))


def dump_spec(spec: NetworkSpec, path) -> None:
    Path(path).write_text(json.dumps(spec.to_dict(), indent=2) + "\n")
