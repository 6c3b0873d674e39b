"""Exit criteria for the simulator, one test per criterion.

Each test records a PASS/FAIL line shown in the pytest terminal summary.
"""

import dataclasses
import math
import statistics
import time

import numpy as np
import pytest

from wsnsim import cli, engine, model
from wsnsim.engine import NetworkState, run_round, run_simulation
from wsnsim.model import MultiLevel, NetworkConfig, NodeState, ThreeLevel, TwoLevel
from wsnsim.protocols import ElectionContext, Protocol, ProtocolKind, election_probability

from acceptance_log import record
from round_oracle import play

S1 = ThreeLevel(m=0.5, m_o=0.4, a=1.5, b=3.0)
SEEDS = range(30)
ORDER = ["deec", "ddeec", "edeec", "tdeec"]
# reported first-death rounds for scenario 1
REPORTED_FIRST = {"deec": 1117, "ddeec": 1470, "edeec": 1583, "tdeec": 1719}


@pytest.fixture(scope="module")
def scenario1():
    start = time.perf_counter()
    runs = {p: [run_simulation(NetworkConfig(heterogeneity=S1, rng_seed=s), p, scenario="s1")
                for s in SEEDS] for p in ORDER}
    elapsed = time.perf_counter() - start

    def med(attr):
        out = {}
        for p, rs in runs.items():
            vals = [getattr(r, attr) for r in rs]
            # a network still alive at max_rounds counts as lasting max_rounds
            out[p] = statistics.median(v if v is not None else 10_000 for v in vals)
        return out

    return {
        "elapsed": elapsed,
        "first": med("first_death_round"),
        "last": med("last_death_round"),
        "packets": med("total_packets_to_bs"),
    }


def _fmt(d):
    return ", ".join(f"{k}={v:g}" for k, v in d.items())


def test_c1_stability_ordering(scenario1):
    first = scenario1["first"]
    ordered = first["tdeec"] > first["edeec"] > first["ddeec"] > first["deec"]
    fast = scenario1["elapsed"] < 60.0
    band = {p: abs(first[p] - REPORTED_FIRST[p]) / REPORTED_FIRST[p] <= 0.25 for p in ORDER}
    record("C1 scenario-1 first-death ordering TDEEC>EDEEC>DDEEC>DEEC (30 seeds, <60 s)", ordered and fast,
           f"medians {_fmt(first)}; {scenario1['elapsed']:.1f} s")
    record("C1 (soft target) each median within +/-25% of reported value", all(band.values()),
           ", ".join(f"{p}={'ok' if ok else 'out'}" for p, ok in band.items()))
    assert ordered, first
    assert fast, scenario1["elapsed"]


def test_c2_lifetime_tie(scenario1):
    last = scenario1["last"]
    tie = abs(last["edeec"] - last["tdeec"]) <= 0.05 * max(last["edeec"], last["tdeec"])
    beats = min(last["edeec"], last["tdeec"]) > max(last["deec"], last["ddeec"])
    record("C2 EDEEC/TDEEC last death within 5% and above DEEC/DDEEC", tie and beats,
           f"medians {_fmt(last)}")
    assert tie and beats, last


def test_c3_throughput_ordering(scenario1):
    pk = scenario1["packets"]
    ok = (pk["tdeec"] > pk["edeec"] > max(pk["deec"], pk["ddeec"])
          and pk["edeec"] >= 2 * pk["deec"])
    record("C3 packets TDEEC>EDEEC>>{DEEC,DDEEC}, EDEEC>=2xDEEC", ok, f"medians {_fmt(pk)}")
    assert ok, pk


@pytest.mark.parametrize("n", [1, 10, 100])
def test_c4_expected_ch_identity(n):
    avg = 0.37
    ctx = ElectionContext(round=0, avg_energy=avg, p_opt=0.1, heterogeneity=TwoLevel(),
                          k_opt=1.0, n_nodes=n, e_o=0.5)
    nodes = [NodeState(id=i, x=0, y=0, energy_class=model.EnergyClass.NORMAL, initial_energy=0.5,
                       residual_energy=avg) for i in range(n)]
    total = math.fsum(election_probability(ProtocolKind(Protocol.DEEC), nd, ctx) for nd in nodes)
    rel = abs(total - n * 0.1) / (n * 0.1)
    ok = rel <= 1e-12
    record(f"C4 sum p_i = N p_opt (N={n})", ok, f"relative error {rel:.2e}")
    assert ok


def test_c5_closed_form_energy():
    g = np.random.default_rng(2024)
    worst = 0.0
    fails = 0
    for i in range(50):
        m = g.integers(1, 11) / 10
        m_o = g.integers(0, 11) / 10
        a = float(g.uniform(0.1, 3.0))
        b = a + float(g.uniform(0.1, 3.0))
        cfg = NetworkConfig(heterogeneity=ThreeLevel(m=m, m_o=m_o, a=a, b=b))
        nodes = model.assign_energies(cfg, np.random.default_rng(i))
        total = model.total_initial_energy(cfg, nodes)
        closed = model.closed_form_total_energy(cfg)
        rel = abs(total - closed) / closed
        worst = max(worst, rel)
        fails += rel > 1e-12
    ok = fails == 0
    record("C5 total_initial_energy matches closed form (50 draws, rel 1e-12)", ok,
           f"{fails}/50 draws outside tolerance, worst relative error {worst:.3g}")
    assert ok


def test_c6_conservation():
    g = np.random.default_rng(6)
    hets = [lambda: TwoLevel(m=float(g.uniform(0, 1)), a=float(g.uniform(0, 3))),
            lambda: ThreeLevel(m=float(g.uniform(0, 1)), m_o=float(g.uniform(0, 1)),
                               a=float(g.uniform(0.1, 1.5)), b=float(g.uniform(1.6, 4))),
            lambda: MultiLevel(a_max=float(g.uniform(0.1, 3)))]
    bad = []
    for case in range(100):
        cfg = NetworkConfig(n_nodes=int(g.integers(1, 21)), field_side=float(g.uniform(10, 200)),
                            e_o=float(g.uniform(0.002, 0.05)), heterogeneity=hets[case % 3](),
                            max_rounds=int(g.integers(1, 201)), rng_seed=int(g.integers(2**32)))
        run = run_simulation(cfg, ORDER[case % 4])
        for prev, cur in zip(run.per_round, run.per_round[1:]):
            if not (cur.total_residual < prev.total_residual and cur.alive <= prev.alive):
                bad.append((case, cur.round))
                break
    record("C6 residual strictly decreasing, alive non-increasing (100 configs)", not bad,
           f"{len(bad)} violating configs")
    assert not bad


def test_c7_oracle_equivalence():
    worst = 0.0
    for case in range(20):
        n = 1 + case % 5
        kind = ORDER[case % 4]
        het = [S1, TwoLevel(m=0.5, a=1.0), MultiLevel(2.0)][case % 3]
        cfg = NetworkConfig(n_nodes=n, heterogeneity=het, rng_seed=case, e_o=0.0005 + 0.0005 * (case % 3))
        rng = np.random.default_rng(case)
        state = NetworkState.create(cfg, rng)
        initial = [dataclasses.replace(nd) for nd in state.nodes]
        draws = [rng.random(n) for _ in range(3)]
        got = []
        for d in draws:
            run_round(state, ProtocolKind(Protocol(kind)), draws=d)
            got.append([nd.residual_energy for nd in state.nodes])
        want = play(kind, cfg, initial, draws)
        for gr, wr in zip(got, want):
            for x, y in zip(gr, wr):
                worst = max(worst, abs(x - y) / max(abs(y), 1e-300))
    ok = worst <= 1e-12
    record("C7 engine vs brute-force oracle (20 cases, rel 1e-12)", ok, f"worst relative error {worst:.2e}")
    assert ok


def test_c8_expected_ch_count():
    # E_o large enough that no node dies and the energy estimator stays positive for 2000 rounds
    cfg = NetworkConfig(n_nodes=100, heterogeneity=TwoLevel(m=0.0), e_o=50.0, max_rounds=2000, rng_seed=8)
    run = run_simulation(cfg, "deec")
    counts = [r.ch_count for r in run.per_round[1:]]
    mean = float(np.mean(counts))
    ok = len(counts) == 2000 and 8.0 <= mean <= 12.0
    record("C8 homogeneous DEEC mean CHs/round in [8, 12] over 2000 rounds", ok, f"mean {mean:.3f}")
    assert ok


def test_c9_cli_determinism(tmp_path):
    argv = ["--seed", "17", "--max-rounds", "3000", "--scenario", "s1"]
    assert cli.main(argv + ["--out", str(tmp_path / "a")]) == 0
    assert cli.main(argv + ["--out", str(tmp_path / "b")]) == 0
    files = sorted(p.name for p in (tmp_path / "a").iterdir())
    same = files == sorted(p.name for p in (tmp_path / "b").iterdir()) and all(
        (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes() for f in files)
    record("C9 identical invocations give byte-identical CSVs", same, f"{len(files)} files compared")
    assert same
