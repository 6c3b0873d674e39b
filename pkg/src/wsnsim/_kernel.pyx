# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled round loop.

Mirrors ``engine.run_round`` operation for operation so both paths produce
bit-identical residual energies for the same uniforms.
"""

from libc.math cimport sqrt, floor, INFINITY


cdef inline double tx_cost(double bits, double d, double e_elec, double eps_fs,
                           double eps_mp, double d_o) nogil:
    if d < d_o:
        return bits * e_elec + bits * eps_fs * (d * d)
    return bits * e_elec + bits * eps_mp * (d * d * d * d)


def simulate_chunk(const double[::1] xs, const double[::1] ys, double[::1] energy,
                   unsigned char[::1] alive, long long[::1] cooldown, long long[::1] ch_rounds,
                   const double[::1] coef, const double[::1] depleted,
                   const double[::1] params, const unsigned char[::1] flags,
                   const double[:, ::1] draws, long long start_round, long long[::1] counters,
                   long long[::1] out_alive, long long[::1] out_ch, long long[::1] out_bs,
                   long long[::1] out_to_ch, double[::1] out_res):
    """Play up to ``draws.shape[0]`` rounds; return how many were played.

    ``params`` = (e_total, n, lifetime, k_opt, th_rev, bs_x, bs_y, bits,
    e_elec, eps_fs, eps_mp, e_da, d_o); ``flags`` = (tdeec, clamp).
    ``counters`` = cumulative (packets_to_bs, packets_to_ch), updated in place.
    """
    cdef Py_ssize_t n = xs.shape[0]
    cdef Py_ssize_t rounds = draws.shape[0]
    cdef double e_total = params[0], n_nodes = params[1], lifetime = params[2]
    cdef double k_opt = params[3], th_rev = params[4], bs_x = params[5], bs_y = params[6]
    cdef double bits = params[7], e_elec = params[8], eps_fs = params[9]
    cdef double eps_mp = params[10], e_da = params[11], d_o = params[12]
    cdef bint tdeec = flags[0], clamp = flags[1]

    cdef Py_ssize_t j, i, h, best, n_heads, n_alive
    cdef long long r, period, direct, to_ch, k
    cdef double avg, p, t, u, dx, dy, d2, best_d2, cost, total
    cdef long long pkt_bs = counters[0], pkt_ch = counters[1]

    heads_buf = bytearray(n * sizeof(Py_ssize_t))
    members_buf = bytearray(n * sizeof(long long))
    is_head_buf = bytearray(n)
    cdef Py_ssize_t* heads = <Py_ssize_t*> <char*> heads_buf
    cdef long long* members = <long long*> <char*> members_buf
    cdef unsigned char* is_head = <unsigned char*> <char*> is_head_buf

    cdef Py_ssize_t played = 0
    with nogil:
        for j in range(rounds):
            r = start_round + j
            if lifetime <= 0.0:
                avg = 0.0
            else:
                avg = e_total / n_nodes * (1.0 - r / lifetime)
                if not avg > 0.0:
                    avg = 0.0

            # election
            n_heads = 0
            for i in range(n):
                if not alive[i]:
                    continue
                if avg > 0.0 and cooldown[i] == 0:
                    if energy[i] <= th_rev:
                        p = depleted[i] * energy[i] / avg
                    else:
                        p = coef[i] * energy[i] / avg
                    if p < 0.0:
                        p = 0.0
                    elif p > 1.0:
                        p = 1.0
                    if p > 0.0:
                        if p >= 1.0:
                            period = 1
                        else:
                            period = <long long> floor(1.0 / p)
                        t = p / (1.0 - p * (r % period))
                        if tdeec:
                            t = t * (energy[i] * k_opt) / avg
                        if clamp:
                            if t > 1.0:
                                t = 1.0
                            elif t < 0.0:
                                t = 0.0
                        if draws[j, i] < t:
                            heads[n_heads] = i
                            n_heads += 1
                            ch_rounds[i] += 1
                            cooldown[i] = period - 1
                            continue
                if cooldown[i] > 0:
                    cooldown[i] -= 1

            for h in range(n_heads):
                is_head[heads[h]] = 1
                members[heads[h]] = 0

            # cluster formation and member transmissions
            direct = 0
            to_ch = 0
            for i in range(n):
                if not alive[i] or is_head[i]:
                    continue
                if n_heads > 0:
                    best = heads[0]
                    best_d2 = INFINITY
                    for h in range(n_heads):
                        dx = xs[i] - xs[heads[h]]
                        dy = ys[i] - ys[heads[h]]
                        d2 = dx * dx + dy * dy
                        if d2 < best_d2:
                            best_d2 = d2
                            best = heads[h]
                    members[best] += 1
                    to_ch += 1
                    energy[i] -= tx_cost(bits, sqrt(best_d2), e_elec, eps_fs, eps_mp, d_o)
                else:
                    direct += 1
                    dx = xs[i] - bs_x
                    dy = ys[i] - bs_y
                    energy[i] -= tx_cost(bits, sqrt(dx * dx + dy * dy), e_elec, eps_fs, eps_mp, d_o)

            for h in range(n_heads):
                i = heads[h]
                k = members[i]
                dx = xs[i] - bs_x
                dy = ys[i] - bs_y
                cost = (bits * e_elec * k + e_da * bits * (k + 1)
                        + tx_cost(bits, sqrt(dx * dx + dy * dy), e_elec, eps_fs, eps_mp, d_o))
                energy[i] -= cost
                is_head[i] = 0

            n_alive = 0
            total = 0.0
            for i in range(n):
                if alive[i] and energy[i] <= 0.0:
                    alive[i] = 0
                if alive[i]:
                    n_alive += 1
                if energy[i] > 0.0:
                    total += energy[i]

            pkt_bs += n_heads + direct
            pkt_ch += to_ch
            out_alive[j] = n_alive
            out_ch[j] = n_heads
            out_bs[j] = pkt_bs
            out_to_ch[j] = pkt_ch
            out_res[j] = total
            played += 1
            if n_alive == 0:
                break

    counters[0] = pkt_bs
    counters[1] = pkt_ch
    return played
