"""Standard widening, widening up to a threshold set, and the delayed step."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

from .polyhedra import Constraint, Polyhedron

__all__ = [
    "WideningKind",
    "WideningConfig",
    "widen_standard",
    "widen_upto",
    "widen",
    "widen_step",
    "uniform_bound",
]


class WideningKind(enum.Enum):
    STANDARD = "standard"
    UPTO_M = "upto-m"


@dataclass(frozen=True)
class WideningConfig:
    kind: WideningKind = WideningKind.UPTO_M
    m_set: tuple[Constraint, ...] = ()
    delay: int = 3

    def __post_init__(self):
        if self.delay < 0:
            raise ValueError("delay must be nonnegative")
        if self.kind is WideningKind.STANDARD and self.m_set:
            object.__setattr__(self, "m_set", ())


def widen_standard(p1: Polyhedron, p2: Polyhedron) -> Polyhedron:
    """Keep the constraints of ``p1`` that hold on ``p2``.

    Also keeps every constraint of ``p2`` that can stand in for a
    constraint of ``p1`` without changing ``p1``.  Both systems are the
    minimised ones, with equalities split into inequality pairs.
    """
    if p1.is_empty():
        return p2
    if p2.is_empty():
        return p1
    c1 = p1.inequalities
    c2 = p2.inequalities
    kept = [phi for phi in c1 if p2.entails(phi)]
    for psi in c2:
        if any(_key_eq(psi, phi, p1) for phi in kept):
            continue
        for i in range(len(c1)):
            swapped = c1[:i] + [psi] + c1[i + 1:]
            if Polyhedron.from_constraints(p1.dims, swapped) == p1:
                kept.append(psi)
                break
    return Polyhedron.from_constraints(p1.dims, kept)


def _key_eq(a: Constraint, b: Constraint, p: Polyhedron) -> bool:
    return a.key(p.dims) == b.key(p.dims)


def widen_upto(p1: Polyhedron, p2: Polyhedron, m: Sequence[Constraint]) -> Polyhedron:
    """Standard widening intersected with the thresholds both arguments satisfy."""
    base = widen_standard(p1, p2)
    keep = [phi for phi in m if p1.entails(phi) and p2.entails(phi)]
    if not keep:
        return base
    return base.add_constraints(keep)


def widen(config: WideningConfig, p1: Polyhedron, p2: Polyhedron) -> Polyhedron:
    if config.kind is WideningKind.STANDARD:
        return widen_standard(p1, p2)
    return widen_upto(p1, p2, config.m_set)


def widen_step(config: WideningConfig, step_index: int, p_old: Polyhedron,
               p_new: Polyhedron) -> Polyhedron:
    """One iteration step: plain join while delayed, widening afterwards."""
    if step_index < config.delay:
        return p_old.join(p_new)
    return widen(config, p_old, p_new)


def uniform_bound(p0: Polyhedron, config: WideningConfig) -> int:
    """Steps within which any widening chain from ``p0`` stabilises.

    The number of inequalities of the minimised system of ``p0`` (equalities
    count twice), plus the threshold count for widening up to M.
    """
    n = p0.constraint_count()
    if config.kind is WideningKind.UPTO_M:
        n += len(config.m_set)
    return n
