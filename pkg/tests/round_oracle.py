"""Straight-line reimplementation of a simulation round, kept independent of
wsnsim's engine and protocol code. Only the initial node placement is shared.
"""

import math

E_ELEC, EPS_FS, EPS_MP, E_DA, D_O, BITS = 50e-9, 10e-12, 0.0013e-12, 5e-9, 70.0, 4000


def _tx(d):
    if d < D_O:
        return BITS * E_ELEC + BITS * EPS_FS * d ** 2
    return BITS * E_ELEC + BITS * EPS_MP * d ** 4


def _weight(protocol, het, ratio, a_sum, n):
    """Per-class multiplier of p_opt * E_i / Ebar, plus DDEEC's depleted multiplier."""
    kind = type(het).__name__
    if kind == "MultiLevel":
        w = n * (1 + ratio) / (n + a_sum)
        low = 0.02 * n * (1 + het.a_max) / (n + a_sum)
    elif kind == "ThreeLevel":
        if protocol in ("edeec", "tdeec"):
            w = (1 + ratio) / (1 + het.m * het.a + het.m * het.m_o * het.b)
        else:
            w = 1.0
        low = 0.02 * (1 + het.a) / (1 + het.a * het.m)
    else:
        w = (1 + ratio) / (1 + het.a * het.m)
        low = 0.02 * (1 + het.a) / (1 + het.a * het.m)
    return w, low


def play(protocol, cfg, nodes, draws_per_round):
    """Return residual energies after each round for the given uniforms."""
    n = len(nodes)
    het = cfg.heterogeneity
    xs = [nd.x for nd in nodes]
    ys = [nd.y for nd in nodes]
    energy = [nd.initial_energy for nd in nodes]
    ratios = [nd.ratio for nd in nodes]
    alive = [True] * n
    wait = [0] * n
    a_sum = sum(ratios)
    e_total = sum(energy)

    d_bs_avg = 0.765 * cfg.field_side / 2
    k = math.sqrt(n / (2 * math.pi)) * math.sqrt(EPS_FS / EPS_MP) * cfg.field_side / d_bs_avg ** 2
    d_ch_avg = cfg.field_side / math.sqrt(2 * math.pi * k)
    e_round = BITS * (2 * n * E_ELEC + n * E_DA + k * EPS_MP * d_bs_avg ** 4 + n * EPS_FS * d_ch_avg ** 2)
    big_r = e_total / e_round
    bx = by = cfg.field_side / 2

    history = []
    for r, draws in enumerate(draws_per_round):
        avg = max(0.0, e_total / n * (1 - r / big_r))
        heads = []
        for i in range(n):
            if not alive[i]:
                continue
            if wait[i] == 0 and avg > 0:
                w, low = _weight(protocol, het, ratios[i], a_sum, n)
                if protocol == "ddeec" and energy[i] <= 0.7 * cfg.e_o:
                    w = low
                p = min(1.0, cfg.p_opt * w * energy[i] / avg)
                period = 1 if p >= 1 else int(1 / p)
                t = p / (1 - p * (r % period))
                if protocol == "tdeec":
                    t = min(1.0, t * energy[i] * k / avg)
                if draws[i] < t:
                    heads.append(i)
                    wait[i] = period - 1
                    continue
            wait[i] = max(0, wait[i] - 1)

        spend = [0.0] * n
        joined = {h: 0 for h in heads}
        for i in range(n):
            if not alive[i] or i in joined:
                continue
            if heads:
                dists = [(math.dist((xs[i], ys[i]), (xs[h], ys[h])), h) for h in heads]
                d, h = min(dists)
                joined[h] += 1
                spend[i] = _tx(d)
            else:
                spend[i] = _tx(math.dist((xs[i], ys[i]), (bx, by)))
        for h in heads:
            spend[h] = (BITS * E_ELEC * joined[h] + E_DA * BITS * (joined[h] + 1)
                        + _tx(math.dist((xs[h], ys[h]), (bx, by))))
        for i in range(n):
            energy[i] -= spend[i]
            if alive[i] and energy[i] <= 0:
                alive[i] = False
        history.append(list(energy))
    return history
