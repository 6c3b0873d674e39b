"""Network domain types, heterogeneous energy assignment and radio costs."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple, Union

import numpy as np


class EnergyClass(enum.Enum):
    NORMAL = "normal"
    ADVANCED = "advanced"
    SUPER = "super"
    MULTI = "multi"


@dataclass
class NodeState:
    id: int
    x: float
    y: float
    energy_class: EnergyClass
    initial_energy: float
    residual_energy: float
    alive: bool = True
    rounds_as_ch: int = 0
    eligible: bool = True
    # extra-energy ratio a_i; 0 for normal, a for advanced, b for super
    ratio: float = 0.0
    # rounds left before the node may be elected again
    cooldown: int = 0

    @property
    def position(self) -> Tuple[float, float]:
        return (self.x, self.y)


@dataclass(frozen=True)
class TwoLevel:
    m: float = 0.0
    a: float = 0.0

    def validate(self) -> None:
        _check_fraction("m", self.m)
        if self.a < 0:
            raise ValueError(f"a must be >= 0, got {self.a}")


@dataclass(frozen=True)
class ThreeLevel:
    m: float
    m_o: float
    a: float
    b: float

    def validate(self) -> None:
        _check_fraction("m", self.m)
        _check_fraction("m_o", self.m_o)
        if not self.a > 0:
            raise ValueError(f"a must be > 0, got {self.a}")
        if not self.b > self.a:
            raise ValueError(f"b must exceed a (b={self.b}, a={self.a})")


@dataclass(frozen=True)
class MultiLevel:
    a_max: float = 2.0

    def validate(self) -> None:
        if not self.a_max > 0:
            raise ValueError(f"a_max must be > 0, got {self.a_max}")


HeterogeneityModel = Union[TwoLevel, ThreeLevel, MultiLevel]


def _check_fraction(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value}")


@dataclass(frozen=True)
class RadioParams:
    """First-order radio model constants (SI units)."""

    e_elec: float = 50e-9
    eps_fs: float = 10e-12
    eps_mp: float = 0.0013e-12
    e_da: float = 5e-9
    d_o: float = 70.0
    msg_bits: int = 4000

    def validate(self) -> None:
        for name in ("e_elec", "eps_fs", "eps_mp", "e_da", "d_o", "msg_bits"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)}")


@dataclass(frozen=True)
class NetworkConfig:
    n_nodes: int = 100
    field_side: float = 100.0
    e_o: float = 0.5
    p_opt: float = 0.1
    bs_position: Optional[Tuple[float, float]] = None
    heterogeneity: HeterogeneityModel = field(default_factory=TwoLevel)
    radio: RadioParams = field(default_factory=RadioParams)
    max_rounds: int = 10000
    rng_seed: int = 0

    @property
    def bs(self) -> Tuple[float, float]:
        if self.bs_position is None:
            return (self.field_side / 2.0, self.field_side / 2.0)
        return self.bs_position

    def validate(self) -> None:
        if not 0.0 < self.p_opt < 1.0:
            raise ValueError(f"p_opt must lie in (0, 1), got {self.p_opt}")
        if self.n_nodes < 1:
            raise ValueError(f"n_nodes must be >= 1, got {self.n_nodes}")
        if self.field_side < 0:
            raise ValueError(f"field_side must be >= 0, got {self.field_side}")
        if not self.e_o > 0:
            raise ValueError(f"e_o must be > 0, got {self.e_o}")
        if self.max_rounds < 0:
            raise ValueError(f"max_rounds must be >= 0, got {self.max_rounds}")
        self.heterogeneity.validate()
        self.radio.validate()


def class_counts(n: int, model: HeterogeneityModel) -> Tuple[int, int, int]:
    """Return (super, advanced, normal) node counts; normal takes the remainder."""
    if isinstance(model, MultiLevel):
        return (0, 0, n)
    if isinstance(model, TwoLevel):
        n_super = 0
        n_adv = round(n * model.m)
    else:
        n_super = round(n * model.m * model.m_o)
        n_adv = round(n * model.m * (1.0 - model.m_o))
    if n_super + n_adv > n:
        raise ValueError(
            f"class fractions yield {n_super} super + {n_adv} advanced nodes, more than N={n}"
        )
    return (n_super, n_adv, n - n_super - n_adv)


def assign_energies(config: NetworkConfig, rng: np.random.Generator) -> List[NodeState]:
    """Place ``config.n_nodes`` nodes uniformly over the field and give them energy.

    Super nodes take the lowest ids, then advanced, then normal. Positions are
    drawn first (x then y, one vector each), then multi-level ratios if needed.
    """
    n = config.n_nodes
    side = config.field_side
    xs = rng.random(n) * side
    ys = rng.random(n) * side
    model = config.heterogeneity
    e_o = config.e_o

    if isinstance(model, MultiLevel):
        ratios = rng.random(n) * model.a_max
        classes = [EnergyClass.MULTI] * n
    else:
        n_super, n_adv, n_norm = class_counts(n, model)
        b = model.b if isinstance(model, ThreeLevel) else 0.0
        ratios = np.array([b] * n_super + [model.a] * n_adv + [0.0] * n_norm)
        classes = (
            [EnergyClass.SUPER] * n_super
            + [EnergyClass.ADVANCED] * n_adv
            + [EnergyClass.NORMAL] * n_norm
        )

    nodes = []
    for i in range(n):
        ratio = float(ratios[i])
        energy = e_o * (1.0 + ratio)
        nodes.append(
            NodeState(
                id=i,
                x=float(xs[i]),
                y=float(ys[i]),
                energy_class=classes[i],
                initial_energy=energy,
                residual_energy=energy,
                ratio=ratio,
            )
        )
    return nodes


def total_initial_energy(config: NetworkConfig, nodes: List[NodeState]) -> float:
    return math.fsum(node.initial_energy for node in nodes)


def closed_form_total_energy(config: NetworkConfig, nodes: Optional[List[NodeState]] = None) -> float:
    """Published closed form ``N*E_o*(1 + a*m)`` / ``N*E_o*(1 + m*(a + m_o*b))``.

    The three-level expression drops the ``-m*m_o*a`` term, so it overstates
    the energy of a population with ``N*m*m_o`` super and ``N*m*(1-m_o)``
    advanced nodes whenever ``m_o*a > 0``; :func:`population_total_energy`
    gives the exact figure. Multi-level networks need the drawn ratios, so
    ``nodes`` is required there.
    """
    n, e_o = config.n_nodes, config.e_o
    model = config.heterogeneity
    if isinstance(model, TwoLevel):
        return n * e_o * (1.0 + model.a * model.m)
    if isinstance(model, ThreeLevel):
        return n * e_o * (1.0 + model.m * (model.a + model.m_o * model.b))
    if nodes is None:
        raise ValueError("multi-level closed form needs the node list")
    return e_o * (n + math.fsum(node.ratio for node in nodes))


def population_total_energy(config: NetworkConfig) -> float:
    """Energy of the rounded class populations that :func:`assign_energies` builds."""
    model = config.heterogeneity
    if isinstance(model, MultiLevel):
        raise ValueError("multi-level energy depends on the drawn ratios")
    n_super, n_adv, n_norm = class_counts(config.n_nodes, model)
    b = model.b if isinstance(model, ThreeLevel) else 0.0
    e_o = config.e_o
    return n_norm * e_o + n_adv * e_o * (1.0 + model.a) + n_super * e_o * (1.0 + b)


def tx_energy(radio: RadioParams, bits: float, d: float) -> float:
    if d < radio.d_o:
        return bits * radio.e_elec + bits * radio.eps_fs * (d * d)
    return bits * radio.e_elec + bits * radio.eps_mp * (d * d * d * d)


def rx_energy(radio: RadioParams, bits: float) -> float:
    return bits * radio.e_elec


def distance_to_bs_estimate(config: NetworkConfig) -> float:
    return 0.765 * config.field_side / 2.0


def k_opt(config: NetworkConfig) -> float:
    """Analytically optimal number of clusters."""
    n = config.n_nodes
    if n <= 0:
        return 0.0
    d_bs = distance_to_bs_estimate(config)
    if d_bs == 0.0:
        return 0.0
    radio = config.radio
    return (
        math.sqrt(n) / math.sqrt(2.0 * math.pi)
        * math.sqrt(radio.eps_fs / radio.eps_mp)
        * config.field_side / (d_bs * d_bs)
    )


def expected_distances(config: NetworkConfig, k: Optional[float] = None) -> Tuple[float, float]:
    """Mean member-to-CH and CH-to-BS distances as ``(d_to_ch, d_to_bs)``.

    ``k`` defaults to :func:`k_opt`.
    """
    d_bs = distance_to_bs_estimate(config)
    if k is None:
        k = k_opt(config)
    if config.field_side == 0.0 or k <= 0.0:
        return (0.0, d_bs)
    return (config.field_side / math.sqrt(2.0 * math.pi * k), d_bs)


def e_round(config: NetworkConfig) -> float:
    """Energy the whole network spends in one clustered round."""
    radio = config.radio
    n = config.n_nodes
    k = k_opt(config)
    d_ch, d_bs = expected_distances(config, k)
    return radio.msg_bits * (
        2 * n * radio.e_elec
        + n * radio.e_da
        + k * radio.eps_mp * d_bs ** 4
        + n * radio.eps_fs * d_ch ** 2
    )


def lifetime_estimate(config: NetworkConfig, e_total: Optional[float] = None) -> float:
    """Rounds until the network's energy budget is spent at the clustered rate.

    ``e_total`` defaults to the assigned population's energy for two- and
    three-level networks.
    """
    if e_total is None:
        e_total = population_total_energy(config)
    er = e_round(config)
    if e_total == 0.0:
        return 0.0
    if er <= 0.0:
        return math.inf
    return e_total / er


def average_energy_estimate(config: NetworkConfig, r: float, e_total: Optional[float] = None,
                            lifetime: Optional[float] = None) -> float:
    """Predicted per-node average residual energy at round ``r``, floored at 0."""
    if r < 0:
        raise ValueError(f"round must be >= 0, got {r}")
    if e_total is None:
        e_total = population_total_energy(config)
    if lifetime is None:
        lifetime = lifetime_estimate(config, e_total)
    if lifetime <= 0.0:
        return 0.0
    value = e_total / config.n_nodes * (1.0 - r / lifetime)
    return value if value > 0.0 else 0.0
