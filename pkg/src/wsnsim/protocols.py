"""Cluster-head election kernels for DEEC, DDEEC, EDEEC and TDEEC.

Every kernel reduces to the same shape: a node's election probability is a
per-node coefficient times ``E_i(r) / E_avg(r)``, and the coefficient only
depends on the node's energy class (and, for DDEEC, on whether the node has
fallen under the residual-energy threshold).  :func:`probability_coefficients`
exposes those coefficients so the compiled round kernel and the pure-Python
path evaluate identical floating-point expressions.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .model import HeterogeneityModel, MultiLevel, NodeState, ThreeLevel, TwoLevel


class Protocol(enum.Enum):
    DEEC = "deec"
    DDEEC = "ddeec"
    EDEEC = "edeec"
    TDEEC = "tdeec"

    @classmethod
    def parse(cls, name: str) -> "Protocol":
        try:
            return cls(name.lower())
        except ValueError:
            raise ValueError(f"unknown protocol {name!r}") from None


@dataclass(frozen=True)
class ProtocolKind:
    protocol: Protocol
    ddeec_c: float = 0.02
    clamp_threshold: bool = True

    def __post_init__(self) -> None:
        if not 0.0 < self.ddeec_c <= 1.0:
            raise ValueError(f"ddeec_c must lie in (0, 1], got {self.ddeec_c}")

    @property
    def name(self) -> str:
        return self.protocol.value


@dataclass(frozen=True)
class ElectionContext:
    round: int
    avg_energy: float
    p_opt: float
    heterogeneity: HeterogeneityModel
    k_opt: float
    n_nodes: int
    e_o: float = 0.5
    # sum of the a_i ratios; only read for multi-level networks
    ratio_sum: float = 0.0

    def __post_init__(self) -> None:
        if self.avg_energy < 0:
            raise ValueError(f"avg_energy must be >= 0, got {self.avg_energy}")


def ddeec_threshold_energy(e_o: float, a: float = 0.0, e_dis_nn: float = 0.0,
                           e_dis_an: float = 0.0) -> float:
    """Residual energy below which DDEEC stops favouring advanced nodes.

    Uses the simplified ``0.7 * e_o`` form; the remaining arguments are
    accepted for signature parity with :func:`ddeec_threshold_energy_general`.
    """
    if e_o < 0:
        raise ValueError(f"e_o must be >= 0, got {e_o}")
    return 0.7 * e_o


def ddeec_threshold_energy_general(e_o: float, a: float, e_dis_nn: float, e_dis_an: float) -> float:
    """Threshold from the normal/advanced dissipation ratio before simplification."""
    return e_o * (1.0 + a * e_dis_nn / (e_dis_nn - e_dis_an))


def _share_denominator(model: HeterogeneityModel) -> float:
    if isinstance(model, ThreeLevel):
        return 1.0 + model.m * (model.a + model.m_o * model.b)
    return 1.0 + model.a * model.m


def node_coefficients(kind: ProtocolKind, ratio: float, ctx: ElectionContext) -> Tuple[float, float]:
    """Return ``(coef, depleted_coef)`` for a node with extra-energy ratio ``ratio``.

    ``coef`` applies while the node is above the DDEEC threshold (always, for
    the other kernels); ``depleted_coef`` once it is at or below it.
    """
    model = ctx.heterogeneity
    p_opt = ctx.p_opt
    proto = kind.protocol

    if isinstance(model, MultiLevel):
        n = ctx.n_nodes
        coef = p_opt * n * (1.0 + ratio) / (n + ctx.ratio_sum)
        depleted = kind.ddeec_c * p_opt * n * (1.0 + model.a_max) / (n + ctx.ratio_sum)
    elif isinstance(model, ThreeLevel):
        if proto in (Protocol.EDEEC, Protocol.TDEEC):
            coef = p_opt * (1.0 + ratio) / _share_denominator(model)
        else:
            # DEEC and DDEEC carry no three-level class weights
            coef = p_opt
        depleted = kind.ddeec_c * (1.0 + model.a) * p_opt / (1.0 + model.a * model.m)
    else:
        coef = p_opt * (1.0 + ratio) / _share_denominator(model)
        depleted = kind.ddeec_c * (1.0 + model.a) * p_opt / (1.0 + model.a * model.m)

    if proto is not Protocol.DDEEC:
        depleted = coef
    return coef, depleted


def probability_coefficients(kind: ProtocolKind, nodes: Sequence[NodeState],
                             ctx: ElectionContext) -> Tuple[np.ndarray, np.ndarray, float]:
    """Vectorised :func:`node_coefficients` plus the DDEEC threshold energy.

    The threshold is ``-inf`` for kernels without a depleted branch.
    """
    pairs = [node_coefficients(kind, node.ratio, ctx) for node in nodes]
    coef = np.array([p[0] for p in pairs], dtype=np.float64)
    depleted = np.array([p[1] for p in pairs], dtype=np.float64)
    if kind.protocol is Protocol.DDEEC:
        th = ddeec_threshold_energy(ctx.e_o)
    else:
        th = -math.inf
    return coef, depleted, th


def election_probability(kind: ProtocolKind, node: NodeState, ctx: ElectionContext) -> float:
    if ctx.avg_energy <= 0.0:
        raise ValueError("average energy must be positive to compute election probability")
    coef, depleted = node_coefficients(kind, node.ratio, ctx)
    if kind.protocol is Protocol.DDEEC and node.residual_energy <= ddeec_threshold_energy(ctx.e_o):
        coef = depleted
    p = coef * node.residual_energy / ctx.avg_energy
    if p < 0.0:
        return 0.0
    if p > 1.0:
        return 1.0
    return p


def rotation_period(p: float) -> int:
    """Rounds per epoch for probability ``p``; at least 1."""
    if p >= 1.0:
        return 1
    return int(math.floor(1.0 / p))


def threshold(kind: ProtocolKind, p_i: float, node: NodeState, ctx: ElectionContext) -> float:
    if not node.eligible or p_i <= 0.0:
        return 0.0
    t = p_i / (1.0 - p_i * (ctx.round % rotation_period(p_i)))
    if kind.protocol is Protocol.TDEEC:
        t = t * (node.residual_energy * ctx.k_opt) / ctx.avg_energy
    if kind.clamp_threshold:
        if t > 1.0:
            return 1.0
        if t < 0.0:
            return 0.0
    return t


def elect(kind: ProtocolKind, nodes: List[NodeState], ctx: ElectionContext,
          rng: Optional[np.random.Generator] = None,
          draws: Optional[Sequence[float]] = None) -> List[int]:
    """Run one election sweep and return the elected ids in ascending order.

    One uniform is consumed per node (dead or ineligible nodes included) so the
    random stream advances identically every round. Pass ``draws`` to supply
    the uniforms directly. Cool-downs of nodes that were not elected tick down
    by one; an elected node sits out the next ``period - 1`` rounds.
    """
    if draws is None:
        if rng is None:
            raise ValueError("elect needs either rng or draws")
        draws = rng.random(len(nodes))
    elected: List[int] = []
    can_elect = ctx.avg_energy > 0.0
    for node, u in zip(nodes, draws):
        if not node.alive:
            continue
        if can_elect and node.eligible:
            p = election_probability(kind, node, ctx)
            if u < threshold(kind, p, node, ctx):
                elected.append(node.id)
                node.rounds_as_ch += 1
                node.cooldown = rotation_period(p) - 1
                node.eligible = node.cooldown == 0
                continue
        if node.cooldown > 0:
            node.cooldown -= 1
            node.eligible = node.cooldown == 0
    return elected
