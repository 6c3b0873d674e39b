"""Round loop: election, cluster formation, energy accounting and metrics."""

from __future__ import annotations

import logging
import math
import os
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Union

import numpy as np

from . import model
from .model import NetworkConfig, NodeState, RadioParams
from .protocols import ElectionContext, Protocol, ProtocolKind, elect, probability_coefficients

log = logging.getLogger(__name__)

try:
    from . import _kernel
except ImportError:  # pragma: no cover - depends on the build
    _kernel = None

HAVE_COMPILED = _kernel is not None

# uniforms are drawn in blocks of this many rounds for the compiled path
_CHUNK_ROUNDS = 512


def default_backend() -> str:
    forced = os.environ.get("WSNSIM_BACKEND", "").strip().lower()
    if forced in ("python", "compiled"):
        return forced
    return "compiled" if HAVE_COMPILED else "python"


@dataclass
class RoundMetrics:
    round: int
    alive: int
    dead: int
    ch_count: int
    packets_to_bs: int
    packets_to_ch: int
    total_residual: float


@dataclass
class RunSummary:
    protocol: str
    scenario: str
    seed: int
    first_death_round: Optional[int]
    tenth_death_round: Optional[int]
    last_death_round: Optional[int]
    total_packets_to_bs: int
    per_round: List[RoundMetrics] = field(default_factory=list)
    config: Dict[str, Any] = field(default_factory=dict)

    @property
    def stability_period(self) -> Optional[int]:
        return self.first_death_round

    @property
    def instability_period(self) -> Optional[int]:
        if self.first_death_round is None or self.last_death_round is None:
            return None
        return self.last_death_round - self.first_death_round

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class NetworkState:
    """Mutable state of one simulation run."""

    config: NetworkConfig
    nodes: List[NodeState]
    e_total: float
    lifetime: float
    k_opt: float
    ratio_sum: float
    round: int = 0
    packets_to_bs: int = 0
    packets_to_ch: int = 0

    @classmethod
    def create(cls, config: NetworkConfig, rng: np.random.Generator) -> "NetworkState":
        nodes = model.assign_energies(config, rng)
        e_total = model.total_initial_energy(config, nodes)
        return cls(
            config=config,
            nodes=nodes,
            e_total=e_total,
            lifetime=model.lifetime_estimate(config, e_total),
            k_opt=model.k_opt(config),
            ratio_sum=math.fsum(n.ratio for n in nodes),
        )

    def context(self) -> ElectionContext:
        cfg = self.config
        return ElectionContext(
            round=self.round,
            avg_energy=model.average_energy_estimate(cfg, self.round, self.e_total, self.lifetime),
            p_opt=cfg.p_opt,
            heterogeneity=cfg.heterogeneity,
            k_opt=self.k_opt,
            n_nodes=cfg.n_nodes,
            e_o=cfg.e_o,
            ratio_sum=self.ratio_sum,
        )

    def alive_count(self) -> int:
        return sum(1 for n in self.nodes if n.alive)

    def total_residual(self) -> float:
        total = 0.0
        for n in self.nodes:
            if n.residual_energy > 0.0:
                total += n.residual_energy
        return total

    def metrics(self, ch_count: int = 0) -> RoundMetrics:
        alive = self.alive_count()
        return RoundMetrics(
            round=self.round,
            alive=alive,
            dead=len(self.nodes) - alive,
            ch_count=ch_count,
            packets_to_bs=self.packets_to_bs,
            packets_to_ch=self.packets_to_ch,
            total_residual=self.total_residual(),
        )


def _dist(ax: float, ay: float, bx: float, by: float) -> float:
    dx = ax - bx
    dy = ay - by
    return math.sqrt(dx * dx + dy * dy)


def run_round(state: NetworkState, kind: ProtocolKind, rng: Optional[np.random.Generator] = None,
              draws=None) -> RoundMetrics:
    """Advance ``state`` by one round and return the metrics row for it.

    The returned row's ``round`` is the 1-based number of the round just played.
    """
    cfg = state.config
    radio = cfg.radio
    bits = radio.msg_bits
    bs_x, bs_y = cfg.bs
    nodes = state.nodes

    ctx = state.context()
    ch_ids = elect(kind, nodes, ctx, rng, draws)
    heads = [nodes[i] for i in ch_ids]
    members = dict.fromkeys(ch_ids, 0)
    is_head = set(ch_ids)

    direct = 0
    for node in nodes:
        if not node.alive or node.id in is_head:
            continue
        if heads:
            best = heads[0]
            best_d2 = math.inf
            for h in heads:
                dx = node.x - h.x
                dy = node.y - h.y
                d2 = dx * dx + dy * dy
                if d2 < best_d2:
                    best_d2 = d2
                    best = h
            members[best.id] += 1
            node.residual_energy -= model.tx_energy(radio, bits, math.sqrt(best_d2))
        else:
            direct += 1
            node.residual_energy -= model.tx_energy(radio, bits, _dist(node.x, node.y, bs_x, bs_y))

    for h in heads:
        k = members[h.id]
        cost = (model.rx_energy(radio, bits) * k + radio.e_da * bits * (k + 1)
                + model.tx_energy(radio, bits, _dist(h.x, h.y, bs_x, bs_y)))
        h.residual_energy -= cost

    for node in nodes:
        if node.alive and node.residual_energy <= 0.0:
            node.alive = False
            node.eligible = False

    state.packets_to_bs += len(heads) + direct
    state.packets_to_ch += sum(members.values())
    state.round += 1
    return state.metrics(len(heads))


def _death_rounds(rows: List[RoundMetrics], n: int):
    first = tenth = last = None
    for row in rows:
        if first is None and row.dead >= 1:
            first = row.round
        if tenth is None and row.dead >= 10:
            tenth = row.round
        if last is None and row.dead >= n:
            last = row.round
    return first, tenth, last


def config_echo(config: NetworkConfig) -> Dict[str, Any]:
    echo = asdict(config)
    echo["heterogeneity"] = {"kind": type(config.heterogeneity).__name__, **echo["heterogeneity"]}
    echo["bs_position"] = list(config.bs)
    return echo


def _simulate_python(state: NetworkState, kind: ProtocolKind, rng: np.random.Generator) -> List[RoundMetrics]:
    rows = []
    for _ in range(state.config.max_rounds):
        rows.append(run_round(state, kind, rng))
        if rows[-1].alive == 0:
            break
    return rows


def _simulate_compiled(state: NetworkState, kind: ProtocolKind, rng: np.random.Generator) -> List[RoundMetrics]:
    cfg = state.config
    radio = cfg.radio
    nodes = state.nodes
    n = len(nodes)
    coef, depleted, th_rev = probability_coefficients(kind, nodes, state.context())

    xs = np.array([nd.x for nd in nodes], dtype=np.float64)
    ys = np.array([nd.y for nd in nodes], dtype=np.float64)
    energy = np.array([nd.residual_energy for nd in nodes], dtype=np.float64)
    alive = np.array([nd.alive for nd in nodes], dtype=np.uint8)
    cooldown = np.array([nd.cooldown for nd in nodes], dtype=np.int64)
    ch_rounds = np.array([nd.rounds_as_ch for nd in nodes], dtype=np.int64)
    counters = np.array([state.packets_to_bs, state.packets_to_ch], dtype=np.int64)
    bs_x, bs_y = cfg.bs
    params = np.array([
        state.e_total, float(n), state.lifetime, state.k_opt, th_rev,
        bs_x, bs_y, float(radio.msg_bits), radio.e_elec, radio.eps_fs,
        radio.eps_mp, radio.e_da, radio.d_o,
    ], dtype=np.float64)
    flags = np.array([
        kind.protocol is Protocol.TDEEC, kind.clamp_threshold,
    ], dtype=np.uint8)

    rows: List[RoundMetrics] = []
    remaining = cfg.max_rounds
    while remaining > 0:
        chunk = min(_CHUNK_ROUNDS, remaining)
        draws = rng.random((chunk, n))
        out_alive = np.zeros(chunk, dtype=np.int64)
        out_ch = np.zeros(chunk, dtype=np.int64)
        out_bs = np.zeros(chunk, dtype=np.int64)
        out_to_ch = np.zeros(chunk, dtype=np.int64)
        out_res = np.zeros(chunk, dtype=np.float64)
        played = _kernel.simulate_chunk(
            xs, ys, energy, alive, cooldown, ch_rounds, coef, depleted,
            params, flags, draws, state.round, counters,
            out_alive, out_ch, out_bs, out_to_ch, out_res,
        )
        for j in range(played):
            rows.append(RoundMetrics(
                round=state.round + j + 1,
                alive=int(out_alive[j]),
                dead=n - int(out_alive[j]),
                ch_count=int(out_ch[j]),
                packets_to_bs=int(out_bs[j]),
                packets_to_ch=int(out_to_ch[j]),
                total_residual=float(out_res[j]),
            ))
        state.round += played
        remaining -= played
        if played < chunk or (rows and rows[-1].alive == 0):
            break

    state.packets_to_bs, state.packets_to_ch = int(counters[0]), int(counters[1])
    for i, nd in enumerate(nodes):
        nd.residual_energy = float(energy[i])
        nd.alive = bool(alive[i])
        nd.cooldown = int(cooldown[i])
        nd.eligible = nd.alive and nd.cooldown == 0
        nd.rounds_as_ch = int(ch_rounds[i])
    return rows


def run_simulation(config: NetworkConfig, kind: Union[ProtocolKind, Protocol, str],
                   scenario: str = "custom", backend: Optional[str] = None) -> RunSummary:
    """Simulate ``config`` under one protocol until every node is dead or
    ``config.max_rounds`` rounds have been played.

    ``backend`` is ``"compiled"``, ``"python"`` or ``None`` for the default
    (compiled when the extension is importable, overridable through the
    ``WSNSIM_BACKEND`` environment variable).
    """
    config.validate()
    if isinstance(kind, str):
        kind = Protocol.parse(kind)
    if isinstance(kind, Protocol):
        kind = ProtocolKind(kind)
    backend = backend or default_backend()
    if backend == "compiled" and not HAVE_COMPILED:
        raise RuntimeError("compiled kernel is not available; reinstall the package with a C compiler")
    if backend not in ("compiled", "python"):
        raise ValueError(f"unknown backend {backend!r}")

    rng = np.random.default_rng(config.rng_seed)
    state = NetworkState.create(config, rng)
    rows: List[RoundMetrics] = []
    if config.max_rounds > 0:
        rows.append(state.metrics())
        simulate = _simulate_compiled if backend == "compiled" else _simulate_python
        rows.extend(simulate(state, kind, rng))

    first, tenth, last = _death_rounds(rows, config.n_nodes)
    log.debug("%s seed=%d: first=%s tenth=%s last=%s", kind.name, config.rng_seed, first, tenth, last)
    return RunSummary(
        protocol=kind.name,
        scenario=scenario,
        seed=config.rng_seed,
        first_death_round=first,
        tenth_death_round=tenth,
        last_death_round=last,
        total_packets_to_bs=state.packets_to_bs,
        per_round=rows,
        config=config_echo(config),
    )
