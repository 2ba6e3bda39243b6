"""Scenario description: room, sources, target region, mic layout, frequencies.

Stored as JSON. `reference_scenario()` builds the reverberant-room setup used
throughout the demos and acceptance runs: a 6 x 4 x 4 m room with four
reflective walls, five unit sources, and a 1 m circular target region.
"""

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .kernels import SPEED_OF_SOUND
from .room import MicArray, RoomSpec, SourceSpec, mic_count_rule, place_mics_circular, place_mics_random


@dataclass
class Scenario:
    room: RoomSpec = field(default_factory=RoomSpec)
    sources: list = field(default_factory=list)          # list[SourceSpec]
    target_center: tuple = (-1.0, 0.5, 0.0)
    target_radius: float = 1.0
    mic_kind: str = "circular"                           # circular | random
    n_mics: int = 75
    mic_seed: int = 0
    frequencies: list = field(default_factory=lambda: [float(f) for f in range(100, 2001, 100)])
    c: float = SPEED_OF_SOUND
    snr_db: float | None = 20.0
    max_order: int = 30
    eval_spacing: float = 0.053

    def __post_init__(self):
        if self.mic_kind not in ("circular", "random"):
            raise ValueError(f"unknown mic placement kind: {self.mic_kind}")
        if not self.frequencies:
            raise ValueError("need at least one frequency")

    def mic_array(self, n_mics: int | None = None, seed: int | None = None) -> MicArray:
        q = self.n_mics if n_mics is None else n_mics
        if self.mic_kind == "circular":
            return place_mics_circular(self.target_center, self.target_radius, q)
        return place_mics_random(self.target_center, self.target_radius, q,
                                 self.mic_seed if seed is None else seed)


def reference_scenario(**overrides) -> Scenario:
    sources = [SourceSpec((-2.65, 1.5, 0.0)), SourceSpec((-2.4, -1.2, 0.0)),
               SourceSpec((0.2, -1.5, 0.0)), SourceSpec((1.7, -0.2, 0.0)),
               SourceSpec((1.0, 1.2, 0.0))]
    return Scenario(sources=sources, **overrides)


def scenario_to_dict(s: Scenario) -> dict:
    return {
        "room": {"dimensions": list(s.room.dimensions), "reflection": list(s.room.reflection)},
        "sources": [{"position": list(src.position),
                     "strength": [complex(src.strength).real, complex(src.strength).imag]}
                    for src in s.sources],
        "target_center": list(s.target_center),
        "target_radius": s.target_radius,
        "mic_kind": s.mic_kind,
        "n_mics": s.n_mics,
        "mic_seed": s.mic_seed,
        "frequencies": list(s.frequencies),
        "c": s.c,
        "snr_db": s.snr_db,
        "max_order": s.max_order,
        "eval_spacing": s.eval_spacing,
    }


def scenario_from_dict(d: dict) -> Scenario:
    return Scenario(
        room=RoomSpec(tuple(d["room"]["dimensions"]), tuple(d["room"]["reflection"])),
        sources=[SourceSpec(tuple(src["position"]),
                            complex(src["strength"][0], src["strength"][1]))
                 for src in d["sources"]],
        target_center=tuple(d["target_center"]),
        target_radius=float(d["target_radius"]),
        mic_kind=d["mic_kind"],
        n_mics=int(d["n_mics"]),
        mic_seed=int(d["mic_seed"]),
        frequencies=[float(f) for f in d["frequencies"]],
        c=float(d["c"]),
        snr_db=None if d["snr_db"] is None else float(d["snr_db"]),
        max_order=int(d["max_order"]),
        eval_spacing=float(d["eval_spacing"]),
    )


def save_scenario(s: Scenario, path) -> None:
    Path(path).write_text(json.dumps(scenario_to_dict(s), indent=2) + "\n")


def load_scenario(path) -> Scenario:
    return scenario_from_dict(json.loads(Path(path).read_text()))
