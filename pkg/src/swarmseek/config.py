"""
YAML experiment configuration.

A document has up to five sections (``arena``, ``field``, ``swarm``,
``world``, ``experiment``).  Every section is optional; the defaults give a
damped inertia-weight swarm of five seekers with omega1=3, lambda=0.95,
c1=c2=2 and v_max=500 mm over a 5 m square arena with a noisy RSSI source in
the middle.  The structure is checked against ``config_schema.json`` and
unknown keys are rejected.
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any, Mapping, Optional

import jsonschema
import yaml

from .avoidance import DynamicConfig, Obstacle, World
from .errors import InvalidConfig, SwarmSeekError
from .field import AcousticParams, EmDecayParams, NoiseParams, SignalField, VaporParams
from .geometry import Point, Rect
from .harness import ExperimentConfig
from .swarm import Constriction, InertiaWeight, Spso, SwarmConfig, Topology, spso_defaults

SECTIONS = ("arena", "field", "swarm", "world", "experiment")

_VARIANT_DEFAULTS = {
    "inertia": {"omega1": 3.0, "lambda": 0.95, "c1": 2.0, "c2": 2.0},
    "constriction": {"phi": 4.1},
    "spso": {"omega": spso_defaults(2)[1], "c": spso_defaults(2)[2], "topology": "random", "k": 3},
}
_VARIANT_KEYS = {
    "inertia": {"omega1", "lambda", "c1", "c2"},
    "constriction": {"phi", "c1", "c2"},
    "spso": {"omega", "c", "topology", "k"},
}


def load_schema() -> dict:
    text = resources.files("swarmseek").joinpath("config_schema.json").read_text()
    return json.loads(text)


def _line_of(node, path) -> Optional[int]:
    """1-based source line of the YAML node at ``path``, if it can be found."""
    for key in path:
        if isinstance(node, yaml.MappingNode):
            nxt = None
            for k, v in node.value:
                if k.value == key:
                    nxt = v
                    break
            if nxt is None:
                return node.start_mark.line + 1
            node = nxt
        elif isinstance(node, yaml.SequenceNode) and isinstance(key, int) and key < len(node.value):
            node = node.value[key]
        else:
            break
    return node.start_mark.line + 1 if node is not None else None


def key_path(path) -> str:
    out = ""
    for p in path:
        out += f"[{p}]" if isinstance(p, int) else (f".{p}" if out else str(p))
    return out or "<root>"


def _schema_defaults(schema: dict) -> dict:
    out = {}
    for name in SECTIONS:
        props = schema["properties"][name]["properties"]
        out[name] = {k: copy.deepcopy(v["default"]) for k, v in props.items() if "default" in v}
    return out


def set_dotted(doc: dict, dotted: str, value) -> None:
    parts = dotted.split(".")
    cur = doc
    for p in parts[:-1]:
        cur = cur.setdefault(p, {})
    cur[parts[-1]] = value


def validate(doc: Any, node=None, source: str = "<config>") -> None:
    if doc is None:
        doc = {}
    validator = jsonschema.Draft202012Validator(load_schema())
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(map(str, e.absolute_path)))
    if not errors:
        return
    lines = []
    for e in errors:
        path = list(e.absolute_path)
        if e.validator == "additionalProperties":
            extra = sorted(set(e.instance) - set(e.schema.get("properties", {})))
            path = path + extra[:1]
        where = key_path(path)
        line = _line_of(node, path) if node is not None else None
        loc = f"{source}:{line}" if line else source
        lines.append(f"{loc}: {where}: {e.message}")
    raise InvalidConfig("invalid configuration\n  " + "\n  ".join(lines))


def resolve(doc: Mapping | None) -> dict:
    """Return a copy of ``doc`` with every default filled in."""
    doc = copy.deepcopy(dict(doc or {}))
    out = _schema_defaults(load_schema())
    for name in SECTIONS:
        out[name].update(doc.get(name) or {})
    sw = out["swarm"]
    variant = sw["variant"]
    params = dict(sw.get("parameters") or {})
    stray = sorted(set(params) - _VARIANT_KEYS[variant])
    if stray:
        raise InvalidConfig(f"swarm.parameters.{stray[0]}: not a parameter of the {variant} variant")
    sw["parameters"] = {**_VARIANT_DEFAULTS[variant], **params}
    if "n" not in sw:
        sw["n"] = spso_defaults(2)[0] if variant == "spso" else 5
    fl = out["field"]
    if "source_mm" not in fl:
        fl["source_mm"] = [out["arena"]["width_mm"] / 2.0, out["arena"]["height_mm"] / 2.0]
    return out


def build_field(cfg: dict) -> SignalField:
    a, f = cfg["arena"], cfg["field"]
    arena = Rect(0.0, 0.0, float(a["width_mm"]), float(a["height_mm"]))
    src = Point(*map(float, f["source_mm"]))
    if f["model"] == "em":
        model = EmDecayParams(f["source_power"], f["medium_constant"], f["alpha"], src)
    elif f["model"] == "vapor":
        model = VaporParams(f["emission_rate"], f["diffusivity"], src, f["start_time_s"])
    else:
        model = AcousticParams(f["source_power"], src)
    noise = NoiseParams(float(f["sigma_db"]), float(f["grid_mm"]), int(f["seed"]))
    return SignalField(arena, model, noise, f["calibration_offset_db"],
                       observation_time=float(f["observation_time_s"]))


def build_swarm(cfg: dict, seed: int = 0) -> SwarmConfig:
    a, s = cfg["arena"], cfg["swarm"]
    p = s["parameters"]
    if s["variant"] == "inertia":
        variant = InertiaWeight(p["omega1"], p["lambda"], p["c1"], p["c2"])
    elif s["variant"] == "constriction":
        variant = Constriction(p["phi"], p.get("c1"), p.get("c2"))
    else:
        variant = Spso(p["omega"], p["c"], Topology(p["topology"], p["k"]))
    return SwarmConfig(
        variant=variant,
        swarm_size=s["n"],
        v_max=float(s["v_max_mm"]),
        arena=Rect(0.0, 0.0, float(a["width_mm"]), float(a["height_mm"])),
        stagnation_window=s["stagnation_window"],
        max_iterations=s["max_iterations"],
        seed=seed,
    )


def build_world(cfg: dict) -> Optional[World]:
    w = cfg["world"]
    if not w["obstacles"]:
        return None
    obstacles = []
    for i, coords in enumerate(w["obstacles"]):
        try:
            obstacles.append(Obstacle.from_coords(coords))
        except SwarmSeekError as exc:
            raise InvalidConfig(f"world.obstacles[{i}]: {exc}") from exc
    a = cfg["arena"]
    dyn = DynamicConfig(w["R_mm"], w["force_scale"], w["max_force_iterations"])
    return World(obstacles, Rect(0.0, 0.0, float(a["width_mm"]), float(a["height_mm"])),
                 static_strategy=w["static_strategy"], dynamic=dyn)


def build_experiment(cfg: dict) -> ExperimentConfig:
    e = cfg["experiment"]
    return ExperimentConfig(
        field=build_field(cfg),
        swarm=build_swarm(cfg),
        world=build_world(cfg),
        num_runs=e["num_runs"],
        master_seed=e["master_seed"],
        success_threshold=float(e["success_threshold"]),
        label=e["label"],
    )


@dataclass
class LoadedConfig:
    raw: dict
    resolved: dict
    experiment: ExperimentConfig


def load(path=None, overrides: Mapping[str, Any] | None = None) -> LoadedConfig:
    """Read, validate and build a configuration; ``overrides`` are dotted keys applied on top."""
    source = str(path) if path else "<defaults>"
    node = None
    doc: dict = {}
    if path:
        text = Path(path).read_text()
        try:
            node = yaml.compose(text)
            doc = yaml.safe_load(text) or {}
        except yaml.YAMLError as exc:
            raise InvalidConfig(f"{source}: cannot parse YAML: {exc}") from exc
        if not isinstance(doc, dict):
            raise InvalidConfig(f"{source}: top level must be a mapping")
    for k, v in (overrides or {}).items():
        if v is not None:
            set_dotted(doc, k, v)
    validate(doc, node, source)
    resolved = resolve(doc)
    return LoadedConfig(doc, resolved, build_experiment(resolved))


def dump(cfg: dict, path) -> None:
    with open(path, "w") as fh:
        yaml.safe_dump(cfg, fh, sort_keys=False, default_flow_style=None)
