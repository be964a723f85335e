"""Riemann invariants, six-case classification and region layouts."""

from __future__ import annotations

import bisect
import enum
import math
from dataclasses import dataclass

from .errors import DegenerateStep, DomainError
from .genus1 import whitham_velocity


class RegionKind(str, enum.Enum):
    LEFT_PLANE = "LeftPlane"
    DSW = "DSW"
    UNMODULATED = "UnmodulatedElliptic"
    MIDDLE_PLANE = "MiddlePlane"
    RAREFACTION = "Rarefaction"
    VACUUM = "Vacuum"
    RIGHT_PLANE = "RightPlane"


LP, DSW, UE, MP, RW, VAC, RP = (
    RegionKind.LEFT_PLANE,
    RegionKind.DSW,
    RegionKind.UNMODULATED,
    RegionKind.MIDDLE_PLANE,
    RegionKind.RAREFACTION,
    RegionKind.VACUUM,
    RegionKind.RIGHT_PLANE,
)


@dataclass(frozen=True)
class StepData:
    A_l: float
    mu_l: float
    A_r: float
    mu_r: float

    def __post_init__(self):
        for name in ("A_l", "mu_l", "A_r", "mu_r"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")
        if not (self.A_l > 0 and self.A_r > 0):
            raise DomainError("step amplitudes must be positive")

    def mirrored(self) -> "StepData":
        """Step data of ``q(-x, 0)``."""
        return StepData(self.A_r, -self.mu_r, self.A_l, -self.mu_l)


@dataclass(frozen=True)
class RiemannInvariants:
    lam_l_plus: float
    lam_l_minus: float
    lam_r_plus: float
    lam_r_minus: float

    def __post_init__(self):
        if not (self.lam_l_plus > self.lam_l_minus and self.lam_r_plus > self.lam_r_minus):
            raise DomainError("each side needs lam_plus > lam_minus")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.lam_l_plus, self.lam_l_minus, self.lam_r_plus, self.lam_r_minus)


def invariants(step: StepData) -> RiemannInvariants:
    return RiemannInvariants(
        step.mu_l + step.A_l, step.mu_l - step.A_l, step.mu_r + step.A_r, step.mu_r - step.A_r
    )


# case -> descending order of (l+, l-, r+, r-) by name
_ORDERINGS = {
    "A": ("r+", "r-", "l+", "l-"),
    "B": ("l+", "l-", "r+", "r-"),
    "C": ("r+", "l+", "r-", "l-"),
    "D": ("l+", "r+", "l-", "r-"),
    "E": ("r+", "l+", "l-", "r-"),
    "F": ("l+", "r+", "r-", "l-"),
}

_KINDS = {
    "A": (LP, DSW, UE, DSW, RP),
    "B": (LP, RW, VAC, RW, RP),
    "C": (LP, DSW, MP, DSW, RP),
    "D": (LP, RW, MP, RW, RP),
    "E": (LP, DSW, MP, RW, RP),
    "F": (LP, RW, MP, DSW, RP),
}

MIRROR_CASE = {"A": "A", "B": "B", "C": "C", "D": "D", "E": "F", "F": "E"}


@dataclass(frozen=True)
class CaseLabel:
    case: str
    ordering: tuple[str, str, str, str]

    def __str__(self) -> str:
        return self.case


def classify(inv: RiemannInvariants) -> CaseLabel:
    vals = {"l+": inv.lam_l_plus, "l-": inv.lam_l_minus, "r+": inv.lam_r_plus, "r-": inv.lam_r_minus}
    if len(set(vals.values())) < 4:
        raise DegenerateStep(f"tied Riemann invariants {inv.as_tuple()}: boundary between cases")
    order = tuple(sorted(vals, key=vals.__getitem__, reverse=True))
    for case, want in _ORDERINGS.items():
        if order == want:
            return CaseLabel(case, order)
    raise DegenerateStep(f"ordering {order} matches no case")  # unreachable for valid invariants


@dataclass(frozen=True)
class RegionLayout:
    case: CaseLabel
    boundaries: tuple[float, float, float, float]
    kinds: tuple[RegionKind, ...]

    def index(self, xi: float) -> int:
        """Region index for ``xi``; exact boundary hits go to the right."""
        return bisect.bisect_right(self.boundaries, xi)

    def side(self, index: int) -> str | None:
        """'left' or 'right' for the two fan/shock slots, else None."""
        return {1: "left", 3: "right"}.get(index)

    def label(self, index: int) -> str:
        kind = self.kinds[index]
        side = self.side(index)
        if kind in (DSW, RW) and side:
            return f"{kind.value}-{side}"
        return kind.value


def _closed_boundaries(case: str, lp: float, lm: float, rp: float, rm: float):
    def shock_left():
        return -(2 * rp + lp + lm) / 2 + 2 * (rp - lp) * (rp - lm) / (-2 * rp + lp + lm)

    def shock_right():
        return -(rp + rm + 2 * lm) / 2 + 2 * (rp - lm) * (rm - lm) / (rp + rm - 2 * lm)

    fan_left = -(3 * lp + lm) / 2
    fan_right = -(rp + 3 * rm) / 2
    if case == "A":
        v2 = whitham_velocity(2, (rp, rm, lp, lm))
        v3 = whitham_velocity(3, (rp, rm, lp, lm))
        return (shock_left(), v2, v3, shock_right())
    if case == "B":
        return (fan_left, -2 * lm, -2 * rp, fan_right)
    if case == "C":
        return (shock_left(), -(rp + 2 * lp + lm) / 2, -(rp + 2 * rm + lm) / 2, shock_right())
    if case == "D":
        return (fan_left, -(3 * rp + lm) / 2, -(rp + 3 * lm) / 2, fan_right)
    if case == "E":
        return (shock_left(), -(rp + 2 * lp + lm) / 2, -(rp + 3 * lm) / 2, fan_right)
    return (fan_left, -(3 * rp + lm) / 2, -(rp + 2 * rm + lm) / 2, shock_right())


def region_layout(inv: RiemannInvariants) -> RegionLayout:
    label = classify(inv)
    b = _closed_boundaries(label.case, *inv.as_tuple())
    if not (b[0] < b[1] < b[2] < b[3]):
        raise DegenerateStep(f"boundaries not strictly increasing: {b}")
    return RegionLayout(label, tuple(float(v) + 0.0 for v in b), _KINDS[label.case])


def mirror_layout(layout: RegionLayout) -> tuple[str, tuple[float, ...], tuple[RegionKind, ...]]:
    """Layout expected for the mirrored step: reflected boundaries, reversed kinds."""
    swap = {LP: RP, RP: LP}
    return (
        MIRROR_CASE[layout.case.case],
        tuple(0.0 - v for v in reversed(layout.boundaries)),
        tuple(swap.get(k, k) for k in reversed(layout.kinds)),
    )
