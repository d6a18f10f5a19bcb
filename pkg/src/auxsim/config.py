"""Simulation configuration: one flat record, JSON-friendly.

Scenario files override fields by name; validation collects every
problem before raising so a bad file reports all its mistakes at once.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields

from . import actuation, locking
from .geometry import UnitGeometry, pentagon_unit, square_unit

GRAVITY_M_S2 = 9.81


class ConfigError(ValueError):
    def __init__(self, problems: list[str]):
        self.problems = problems
        super().__init__("; ".join(problems))


@dataclass
class SimConfig:
    tick_s: float = 0.005
    outline: str = "pentagon"  # or "square" (square bodies fold but carry no mounts)
    side_mm: float = 40.0
    alpha_deg: float = 108.0
    skirt_mm: float = 15.0
    body_mass_kg: float = 0.5
    mu_grip: float = 0.6
    mu_feet: tuple[float, float, float, float] = (0.8, 0.8, 0.8, 0.8)
    foot_grip_n: float = 0.95  # tangential force a fully held pad must carry
    tau_finger_s: float = actuation.TAU_FINGER_CHAMBER_S
    tau_body_chamber_s: float = actuation.TAU_BODY_CHAMBER_S
    tau_fold_s: float = locking.TAU_THETA_S
    snapshot_every_ticks: int = 10

    def geometry(self) -> UnitGeometry:
        if self.outline == "pentagon":
            return pentagon_unit(self.side_mm, self.alpha_deg, self.skirt_mm)
        if self.outline == "square":
            return square_unit(self.side_mm)
        raise ConfigError([f"outline: unknown preset {self.outline!r}"])

    def validate(self) -> None:
        problems = []
        if self.tick_s <= 0.0 or self.tick_s > 0.1:
            problems.append(f"tick_s: {self.tick_s} outside (0, 0.1]")
        if self.outline not in ("pentagon", "square"):
            problems.append(f"outline: unknown preset {self.outline!r}")
        if self.side_mm <= 0.0:
            problems.append(f"side_mm: {self.side_mm} must be positive")
        if self.outline == "pentagon" and not (90.0 < self.alpha_deg < 180.0):
            problems.append(f"alpha_deg: {self.alpha_deg} outside (90, 180)")
        if self.skirt_mm <= 0.0:
            problems.append(f"skirt_mm: {self.skirt_mm} must be positive")
        if self.body_mass_kg < 0.0:
            problems.append(f"body_mass_kg: {self.body_mass_kg} must be >= 0")
        if self.mu_grip < 0.0:
            problems.append(f"mu_grip: {self.mu_grip} must be >= 0")
        if len(self.mu_feet) != 4 or any(m < 0.0 for m in self.mu_feet):
            problems.append(f"mu_feet: {self.mu_feet} needs four values >= 0")
        if self.foot_grip_n <= 0.0:
            problems.append(f"foot_grip_n: {self.foot_grip_n} must be positive")
        for name in ("tau_finger_s", "tau_body_chamber_s", "tau_fold_s"):
            if getattr(self, name) <= 0.0:
                problems.append(f"{name}: must be positive")
        if self.snapshot_every_ticks < 1:
            problems.append(f"snapshot_every_ticks: {self.snapshot_every_ticks} must be >= 1")
        if problems:
            raise ConfigError(problems)

    def foot_load_n(self) -> float:
        return self.body_mass_kg * GRAVITY_M_S2 / 4.0

    def to_dict(self) -> dict:
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            out[f.name] = list(v) if isinstance(v, tuple) else v
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "SimConfig":
        known = {f.name for f in fields(cls)}
        problems = [f"config: unknown field {k!r}" for k in data if k not in known]
        kwargs = {k: v for k, v in data.items() if k in known}
        for k in list(kwargs):
            v = kwargs[k]
            if k == "outline":
                ok = isinstance(v, str)
            elif k == "mu_feet":
                ok = (isinstance(v, (list, tuple))
                      and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in v))
                if ok:
                    kwargs[k] = tuple(float(x) for x in v)
            elif k == "snapshot_every_ticks":
                ok = isinstance(v, int) and not isinstance(v, bool)
            else:
                ok = isinstance(v, (int, float)) and not isinstance(v, bool)
            if not ok:
                problems.append(f"{k}: bad value {v!r}")
                del kwargs[k]  # fall back to the default so validation can go on
        cfg = cls(**kwargs)
        try:
            cfg.validate()
        except ConfigError as e:
            problems.extend(e.problems)
        if problems:
            raise ConfigError(problems)
        return cfg
