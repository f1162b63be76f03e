"""Kushilevitz-Mansour search for heavy paths over the branching diagram."""
from __future__ import annotations

from dataclasses import dataclass, field

from .errors import SchurSamplingError
from .estimation import EstimationParams, Seed, estimate_marginal, seed_sequence
from .schur_states import CTState
from .spin_combinatorics import SpinPath

GAMMA_MARGIN = 0.01


@dataclass(frozen=True)
class KMParams:
    theta: float
    gamma: float

    def __post_init__(self):
        if not 0 < self.theta <= 1:
            raise SchurSamplingError(f"theta must lie in (0, 1], got {self.theta}")
        if not 0 < self.gamma < 1:
            raise SchurSamplingError(f"gamma must lie in (0, 1), got {self.gamma}")

    def delta_per_call(self, n: int) -> float:
        """Per-marginal failure probability: ``theta / 4n``, tightened to meet ``gamma``."""
        delta = self.theta / (4 * n)
        if self.gamma < 2 * delta * n / self.theta:
            delta = self.gamma * self.theta / (2 * n * (1 + GAMMA_MARGIN))
        return delta

    def gamma_effective(self, n: int) -> float:
        return 2 * self.delta_per_call(n) * n / self.theta


@dataclass
class HeavyList:
    theta: float
    gamma: float
    entries: list[tuple[SpinPath, float]] = field(default_factory=list)
    level_widths: list[int] = field(default_factory=list)
    halted: bool = False
    halted_level: int | None = None
    delta_per_call: float = 0.0
    trace: list[dict] = field(default_factory=list)

    @property
    def paths(self) -> list[SpinPath]:
        return [p for p, _ in self.entries]

    def to_json(self) -> dict:
        return {
            "theta": self.theta,
            "gamma": self.gamma,
            "halted": self.halted,
            "halted_level": self.halted_level,
            "level_widths": list(self.level_widths),
            "heavy": [{"path": p.word, "estimate": e} for p, e in self.entries],
        }


def km_search(
    phi: CTState, params: KMParams, seed: Seed = 0, method: str = "fused"
) -> HeavyList:
    """Every path with ``p(J) > theta`` (and none below ``theta / 2``), w.p. ``>= 1 - gamma``.

    Grows prefixes level by level, keeping a child when its estimated
    marginal (to additive ``theta / 4``) is at least ``3 theta / 4``.  A level
    wider than ``2 / theta`` halts the search with an empty result; the
    ``halted`` flag tells that apart from a genuinely empty list.
    """
    n = phi.n
    delta = params.delta_per_call(n)
    out = HeavyList(params.theta, params.gamma, delta_per_call=delta)
    cutoff = 0.75 * params.theta
    max_width = 2 / params.theta

    def marginal(path: SpinPath, level: int, index: int) -> float:
        est = EstimationParams(params.theta / 4, delta, seed_sequence(seed, level, index))
        return estimate_marginal(path, phi, est, method=method)

    if n == 1:
        root = SpinPath("")
        p = marginal(root, 1, 0)
        out.entries = [(root, p)] if p >= cutoff else []
        out.level_widths = [len(out.entries)]
        return out

    level = [SpinPath("")]
    estimates: dict[SpinPath, float] = {}
    for k in range(2, n + 1):
        children = [c for parent in level for c in parent.children()]
        kept = []
        for i, child in enumerate(children):
            p = marginal(child, k, i)
            if p >= cutoff:
                kept.append(child)
                estimates[child] = p
        out.level_widths.append(len(kept))
        out.trace.append({"level": k, "candidates": len(children), "kept": len(kept)})
        if len(kept) > max_width:
            out.halted = True
            out.halted_level = k
            return out
        level = kept
    out.entries = [(p, estimates[p]) for p in level]
    return out


def resolve_heavy_probabilities(
    phi: CTState,
    heavy: HeavyList | list[SpinPath],
    eps: float,
    delta: float,
    seed: Seed = 0,
    method: str = "fused",
) -> dict[tuple[SpinPath, int], float]:
    """Estimate ``|<J, M|phi>|^2`` for every heavy path and each of its ``2J + 1`` values of M."""
    paths = heavy.paths if isinstance(heavy, HeavyList) else list(heavy)
    out: dict[tuple[SpinPath, int], float] = {}
    for i, path in enumerate(paths):
        for j, tm in enumerate(range(-path.twice_j, path.twice_j + 1, 2)):
            est = EstimationParams(eps, delta, seed_sequence(seed, i, j))
            out[(path, tm)] = estimate_marginal(path, phi, est, method=method, twice_m=tm)
    return out


def km_report(heavy: HeavyList, resolved: dict[tuple[SpinPath, int], float] | None = None) -> dict:
    report = heavy.to_json()
    report["resolved"] = [
        {"path": p.word, "twice_m": tm, "estimate": e}
        for (p, tm), e in sorted((resolved or {}).items())
    ]
    return report
