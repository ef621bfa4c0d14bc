"""Pure-Python kernels. Reference behaviour for ``_kernels.pyx``.

Both backends expose the same three functions with the same signatures and
must return identical results (the objective tables are computed by the
caller, so grid searches agree bit for bit).
"""
import itertools
import math

import numpy as np

LN2 = math.log(2.0)


def dual_iterations(lam, beta, n_f, w, bandwidth, eps, p_ac, p_0, p_max, p_pg,
                    n_min, n_max, step_1, step_2, unit, relative, step_floor,
                    mult_floor, max_iter, tol):
    """Alternate the closed-form subproblem and projected multiplier steps.

    Returns ``(lams, betas, ps, ns, lam, beta, converged)`` where the arrays
    hold the multipliers used at each iteration and the resulting per-subcarrier
    power and antenna count; ``lam, beta`` are the multipliers after the last
    update.
    """
    lams, betas, ps, ns = [], [], [], []
    converged = False
    lo = step_floor * unit
    for m in range(max_iter):
        s = lam + beta * eps
        p = p_max if s < mult_floor else min(w / (LN2 * s), p_max)
        if beta < mult_floor:
            n = float(n_max)
        else:
            n = min(max(bandwidth / (LN2 * p_ac * beta), float(n_min)), float(n_max))
        lams.append(lam)
        betas.append(beta)
        ps.append(p)
        ns.append(n)

        d = math.sqrt(m + 1.0)
        if relative:
            xi_1 = step_1 * max(lam, lo) / d
            xi_2 = step_2 * max(beta, lo) / d
        else:
            xi_1 = step_1 * unit / d
            xi_2 = step_2 * unit / d
        new_lam = max(0.0, lam - xi_1 * (p_max - n_f * p))
        new_beta = max(0.0, beta - xi_2 * (p_pg - n * p_ac - n_f * eps * p - p_0))
        change = math.hypot(new_lam - lam, new_beta - beta)
        scale = max(math.hypot(lam, beta), mult_floor)
        lam, beta = new_lam, new_beta
        if change / scale < tol:
            converged = True
            break
    return (np.array(lams), np.array(betas), np.array(ps), np.array(ns),
            lam, beta, converged)


def _feasible(psum, nmax_ac, eps, p_0, p_max, p_pg, tol):
    return (psum <= p_max + tol) & (nmax_ac + eps * psum + p_0 <= p_pg + tol)


def chunk_search(term, powers, antennas, n_f, eps, p_ac, p_0, p_max, p_pg, tol):
    """Best common ``(antenna index, power index)`` over a 2-D grid.

    ``term[k, j]`` is the per-subcarrier capacity at ``antennas[k]`` and
    ``powers[j]``. Ties go to the lowest antenna count, then lowest power.
    Returns ``(-1, -1, -inf)`` when nothing is feasible.
    """
    psum = n_f * powers[None, :]
    ok = _feasible(psum, antennas[:, None] * p_ac, eps, p_0, p_max, p_pg, tol)
    obj = np.where(ok, n_f * term, -np.inf)
    flat = int(np.argmax(obj))
    k, j = divmod(flat, powers.shape[0])
    if not ok[k, j]:
        return -1, -1, -math.inf
    return k, j, float(obj[k, j])


def full_search(term, powers, antennas, n_f, eps, p_ac, p_0, p_max, p_pg, tol):
    """Exhaustive search with independent ``(power, antennas)`` per subcarrier.

    Candidates are flattened antenna-major (``c = k * len(powers) + j``) and
    tuples ``(c_1, ..., c_nf)`` are visited in lexicographic order; the first
    strict maximum wins. Returns ``(indices, best)`` with ``indices`` empty
    when nothing is feasible.
    """
    n_p = powers.shape[0]
    cand_term = term.ravel()
    cand_p = np.tile(powers, antennas.shape[0])
    cand_n = np.repeat(antennas, n_p)
    g = cand_term.shape[0]

    best = -math.inf
    best_idx = ()
    for prefix in itertools.product(range(g), repeat=n_f - 1):
        t = 0.0
        ps = 0.0
        nm = -math.inf
        for c in prefix:
            t += cand_term[c]
            ps += cand_p[c]
            nm = max(nm, cand_n[c])
        psum = ps + cand_p
        ok = _feasible(psum, np.maximum(nm, cand_n) * p_ac, eps, p_0, p_max, p_pg, tol)
        if not ok.any():
            continue
        obj = np.where(ok, t + cand_term, -np.inf)
        last = int(np.argmax(obj))
        if obj[last] > best:
            best = float(obj[last])
            best_idx = prefix + (last,)
    return np.array(best_idx, dtype=np.intp), best
