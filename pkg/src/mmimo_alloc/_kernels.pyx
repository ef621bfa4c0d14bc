# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels. Same contracts as ``_kernels_py``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, log, INFINITY

cnp.import_array()

cdef double LN2 = log(2.0)


def dual_iterations(double lam, double beta, int n_f, double w, double bandwidth,
                    double eps, double p_ac, double p_0, double p_max, double p_pg,
                    int n_min, int n_max, double step_1, double step_2, double unit,
                    bint relative, double step_floor, double mult_floor,
                    int max_iter, double tol):
    cdef cnp.ndarray[cnp.float64_t] lams = np.empty(max_iter)
    cdef cnp.ndarray[cnp.float64_t] betas = np.empty(max_iter)
    cdef cnp.ndarray[cnp.float64_t] ps = np.empty(max_iter)
    cdef cnp.ndarray[cnp.float64_t] ns = np.empty(max_iter)
    cdef double s, p, n, d, xi_1, xi_2, new_lam, new_beta, change, scale
    cdef double lo = step_floor * unit
    cdef int m, done = 0
    cdef bint converged = False
    for m in range(max_iter):
        s = lam + beta * eps
        if s < mult_floor:
            p = p_max
        else:
            p = w / (LN2 * s)
            if p > p_max:
                p = p_max
        if beta < mult_floor:
            n = n_max
        else:
            n = bandwidth / (LN2 * p_ac * beta)
            if n < n_min:
                n = n_min
            if n > n_max:
                n = n_max
        lams[m] = lam
        betas[m] = beta
        ps[m] = p
        ns[m] = n
        done = m + 1

        d = sqrt(m + 1.0)
        if relative:
            xi_1 = step_1 * (lam if lam > lo else lo) / d
            xi_2 = step_2 * (beta if beta > lo else lo) / d
        else:
            xi_1 = step_1 * unit / d
            xi_2 = step_2 * unit / d
        new_lam = lam - xi_1 * (p_max - n_f * p)
        if new_lam < 0.0:
            new_lam = 0.0
        new_beta = beta - xi_2 * (p_pg - n * p_ac - n_f * eps * p - p_0)
        if new_beta < 0.0:
            new_beta = 0.0
        change = sqrt((new_lam - lam) * (new_lam - lam) + (new_beta - beta) * (new_beta - beta))
        scale = sqrt(lam * lam + beta * beta)
        if scale < mult_floor:
            scale = mult_floor
        lam = new_lam
        beta = new_beta
        if change / scale < tol:
            converged = True
            break
    return lams[:done], betas[:done], ps[:done], ns[:done], lam, beta, converged


def chunk_search(double[:, ::1] term, double[::1] powers, double[::1] antennas, int n_f,
                 double eps, double p_ac, double p_0, double p_max, double p_pg, double tol):
    cdef Py_ssize_t k, j
    cdef Py_ssize_t bk = -1, bj = -1
    cdef double best = -INFINITY, obj, psum
    for k in range(antennas.shape[0]):
        for j in range(powers.shape[0]):
            psum = n_f * powers[j]
            if psum > p_max + tol:
                continue
            if antennas[k] * p_ac + eps * psum + p_0 > p_pg + tol:
                continue
            obj = n_f * term[k, j]
            if obj > best:
                best = obj
                bk = k
                bj = j
    return bk, bj, best


def full_search(double[:, ::1] term, double[::1] powers, double[::1] antennas, int n_f,
                double eps, double p_ac, double p_0, double p_max, double p_pg, double tol):
    cdef Py_ssize_t n_p = powers.shape[0]
    cdef Py_ssize_t g = antennas.shape[0] * n_p
    cdef cnp.ndarray[cnp.float64_t] cand_term = np.ascontiguousarray(term).ravel()
    cdef cnp.ndarray[cnp.float64_t] cand_p = np.tile(np.asarray(powers), antennas.shape[0])
    cdef cnp.ndarray[cnp.float64_t] cand_n = np.repeat(np.asarray(antennas), n_p)
    cdef cnp.ndarray[cnp.intp_t] idx = np.zeros(n_f, dtype=np.intp)
    cdef cnp.ndarray[cnp.intp_t] best_idx = np.zeros(n_f, dtype=np.intp)
    cdef double best = -INFINITY, t, ps, nm
    cdef Py_ssize_t i, pos
    cdef bint found = False
    while True:
        t = 0.0
        ps = 0.0
        nm = -INFINITY
        for i in range(n_f):
            t = t + cand_term[idx[i]]
            ps = ps + cand_p[idx[i]]
            if cand_n[idx[i]] > nm:
                nm = cand_n[idx[i]]
        if ps <= p_max + tol and nm * p_ac + eps * ps + p_0 <= p_pg + tol and t > best:
            best = t
            found = True
            for i in range(n_f):
                best_idx[i] = idx[i]
        pos = n_f - 1
        while pos >= 0:
            idx[pos] += 1
            if idx[pos] < g:
                break
            idx[pos] = 0
            pos -= 1
        if pos < 0:
            break
    if not found:
        return np.zeros(0, dtype=np.intp), -INFINITY
    return best_idx, best
