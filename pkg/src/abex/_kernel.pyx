# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled episode kernel for the adaptive-binning policy.

Mirrors abex._fallback.run_abe_episode operation-for-operation (same
floating-point expressions in the same order) so the two backends produce
identical traces.  The partition lives in flat arrays: node i stores its
level, lower corner, visit count, decision interval and grid statistics;
children occupy ids first_child[i] .. first_child[i] + 2^d - 1 in
binary-code order (first dimension most significant).
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport ceil, fabs, ldexp, log, sqrt

cnp.import_array()

# Environment ids
cdef int ENV_WEIGHTED = 0
cdef int ENV_NEAREST = 1
cdef int ENV_BOUNDARY = 2
cdef int ENV_LOWER_BOUND = 3

cdef double CX0 = 0.2, CY0 = 0.2
cdef double CX1 = 0.2, CY1 = 0.8
cdef double CX2 = 0.8, CY2 = 0.2
cdef double COEF0 = 1.0, COEF1 = 2.0, COEF2 = 0.5


cdef inline double _clamp01(double v) nogil:
    if v < 0.0:
        return 0.0
    if v > 1.0:
        return 1.0
    return v


cdef inline double _weighted_coef(double x0, double x1) nogil:
    """Reciprocal-l1-distance blend coefficient c in demand = 1 - c*p."""
    cdef double d0 = fabs(x0 - CX0) + fabs(x1 - CY0)
    cdef double d1 = fabs(x0 - CX1) + fabs(x1 - CY1)
    cdef double d2 = fabs(x0 - CX2) + fabs(x1 - CY2)
    cdef double i0, i1, i2, s
    if d0 == 0.0:
        return COEF0
    if d1 == 0.0:
        return COEF1
    if d2 == 0.0:
        return COEF2
    i0 = 1.0 / d0
    i1 = 1.0 / d1
    i2 = 1.0 / d2
    s = i0 + i1 + i2
    return (i0 / s) * COEF0 + (i1 / s) * COEF1 + (i2 / s) * COEF2


cdef inline double _nearest_coef(double x0, double x1) nogil:
    cdef double d0 = fabs(x0 - CX0) + fabs(x1 - CY0)
    cdef double d1 = fabs(x0 - CX1) + fabs(x1 - CY1)
    cdef double d2 = fabs(x0 - CX2) + fabs(x1 - CY2)
    if d0 <= d1 and d0 <= d2:
        return COEF0
    if d1 < d0 and d1 <= d2:
        return COEF1
    return COEF2


cdef inline double _boundary_eval(double x0, double x1, double price,
                                  double* a, double* b) nogil:
    """Demand for the degenerate-center blend at (x, price); also outputs
    the revenue coefficients a, b of a*p - b*p^2 for the oracle."""
    cdef double d0 = fabs(x0 - CX0) + fabs(x1 - CY0)
    cdef double d1 = fabs(x0 - CX1) + fabs(x1 - CY1)
    cdef double d2 = fabs(x0 - CX2) + fabs(x1 - CY2)
    cdef double i0, i1, i2, s, w0, w1
    if d0 == 0.0:
        a[0] = 1.0; b[0] = 1.0
        return _clamp01(1.0 - price)
    if d1 == 0.0:
        a[0] = 0.5; b[0] = 0.0
        return 0.5
    if d2 == 0.0:
        a[0] = 0.0; b[0] = 0.0
        return 0.0
    i0 = 1.0 / d0
    i1 = 1.0 / d1
    i2 = 1.0 / d2
    s = i0 + i1 + i2
    w0 = i0 / s
    w1 = i1 / s
    a[0] = w0 + 0.5 * w1
    b[0] = w0
    return _clamp01(w0 * (1.0 - price) + w1 * 0.5)


cdef inline double _lb_peak(const double* x, int d, int m,
                            const cnp.int64_t* w) nogil:
    """Optimal price at x for the localized quadratic model: 0 on flat
    cells, else the distance to the cell boundary."""
    cdef int i, ji
    cdef long long j = 0
    cdef double lo, hi, dist, v
    for i in range(d):
        ji = <int>(x[i] * m)
        if ji > m - 1:
            ji = m - 1
        j = j * m + ji
    if w[j] == 0:
        return 0.0
    dist = 2.0  # larger than any in-cell distance
    for i in range(d):
        ji = <int>(x[i] * m)
        if ji > m - 1:
            ji = m - 1
        lo = ji / <double>m
        hi = lo + 1.0 / m
        v = x[i] - lo
        if hi - x[i] < v:
            v = hi - x[i]
        if v < dist:
            dist = v
    return dist


def supports_model(kind):
    return kind in ("weighted", "nearest_center", "boundary", "lower_bound")


def run_abe_episode(schedule, model, X, draws, checkpoints, keep_state=False):
    """Compiled twin of abex._fallback.run_abe_episode."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2] X_arr = \
        np.ascontiguousarray(X, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] draws_arr = \
        np.ascontiguousarray(draws, dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] check_arr = \
        np.ascontiguousarray(checkpoints, dtype=np.int64)

    cdef int d = schedule.d
    cdef int K = schedule.K
    cdef int Ngrid = schedule.N[0]
    cdef int n_children = 1 << d
    cdef long long T = X_arr.shape[0]

    cdef cnp.ndarray[cnp.int64_t, ndim=1] n_arr = \
        np.asarray(schedule.n, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] delta_arr = \
        np.asarray(schedule.delta, dtype=np.float64)

    # Environment dispatch
    cdef int env_id
    cdef int lb_m = 0
    cdef cnp.ndarray[cnp.int64_t, ndim=1] lb_w = np.zeros(1, dtype=np.int64)
    kind = model.kind
    if kind == "weighted":
        env_id = ENV_WEIGHTED
    elif kind == "nearest_center":
        env_id = ENV_NEAREST
    elif kind == "boundary":
        env_id = ENV_BOUNDARY
    elif kind == "lower_bound":
        env_id = ENV_LOWER_BOUND
        lb_m = model.m
        lb_w = np.ascontiguousarray(model.w, dtype=np.int64)
    else:
        raise ValueError(f"unsupported model kind {kind!r}")

    # Node storage, grown by doubling.
    cdef long long cap = 1024
    levels = np.zeros(cap, dtype=np.int32)
    first_child = np.full(cap, -1, dtype=np.int64)
    visits = np.zeros(cap, dtype=np.int64)
    plo = np.zeros(cap, dtype=np.float64)
    pu = np.zeros(cap, dtype=np.float64)
    step = np.zeros(cap, dtype=np.float64)
    lower = np.zeros((cap, d), dtype=np.float64)
    means = np.zeros((cap, Ngrid), dtype=np.float64)
    counts = np.zeros((cap, Ngrid), dtype=np.int64)

    cdef cnp.int32_t[::1] lv = levels
    cdef cnp.int64_t[::1] fc = first_child
    cdef cnp.int64_t[::1] vis = visits
    cdef cnp.float64_t[::1] lo_v = plo
    cdef cnp.float64_t[::1] up_v = pu
    cdef cnp.float64_t[::1] st_v = step
    cdef cnp.float64_t[:, ::1] low_v = lower
    cdef cnp.float64_t[:, ::1] mean_v = means
    cdef cnp.int64_t[:, ::1] cnt_v = counts
    cdef cnp.int64_t[::1] n_v = n_arr
    cdef cnp.float64_t[::1] delta_v = delta_arr
    cdef cnp.float64_t[:, ::1] X_v = X_arr
    cdef cnp.float64_t[::1] draws_v = draws_arr
    cdef cnp.int64_t[::1] check_v = check_arr

    cdef long long n_nodes = 1
    # Root: full price interval (or fixed midpoint when K == 0).
    lo_v[0] = 0.0
    up_v[0] = 1.0
    st_v[0] = 1.0 / (Ngrid - 1) if K > 0 else 0.0

    cdef cnp.ndarray[cnp.float64_t, ndim=1] cum = \
        np.empty(len(check_arr), dtype=np.float64)
    cdef cnp.float64_t[::1] cum_v = cum

    cdef long long t, node, child, base, ci = 0
    cdef int k, i, j, jstar, bit, code
    cdef double x0, x1, mid, half, price, z, demand, fval, fstar
    cdef double pstar, best, c_coef, a_co, b_co, g, dlt, c_plo, c_pu
    cdef double regret = 0.0
    cdef long long cnt

    for t in range(T):
        x0 = X_v[t, 0]
        x1 = X_v[t, 1] if d > 1 else 0.0

        # Locate the leaf containing X_t.
        node = 0
        while fc[node] >= 0:
            half = ldexp(1.0, -(lv[node] + 1))
            code = 0
            for i in range(d):
                mid = low_v[node, i] + half
                code = (code << 1) | (1 if X_v[t, i] >= mid else 0)
            node = fc[node] + code

        # Decide, splitting (possibly through several levels) as needed.
        while True:
            vis[node] += 1
            k = lv[node]
            if k == K:
                price = (lo_v[node] + up_v[node]) / 2.0
                j = -1
                break
            if vis[node] < n_v[k]:
                j = <int>((vis[node] - 1) % Ngrid)
                price = lo_v[node] + j * st_v[node]
                break
            # Quota reached: inherit the empirical argmax into 2^d children.
            jstar = 0
            best = mean_v[node, 0]
            for i in range(1, Ngrid):
                if mean_v[node, i] > best:
                    best = mean_v[node, i]
                    jstar = i
            pstar = lo_v[node] + jstar * st_v[node]
            dlt = delta_v[k + 1]
            c_plo = pstar - dlt / 2.0
            if c_plo < 0.0:
                c_plo = 0.0
            c_pu = pstar + dlt / 2.0
            if c_pu > 1.0:
                c_pu = 1.0

            if n_nodes + n_children > cap:
                cap = cap * 2 + n_children
                levels = np.resize(levels, cap)
                first_child = np.resize(first_child, cap)
                visits = np.resize(visits, cap)
                plo = np.resize(plo, cap)
                pu = np.resize(pu, cap)
                step = np.resize(step, cap)
                lower = np.resize(lower, (cap, d))
                means = np.resize(means, (cap, Ngrid))
                counts = np.resize(counts, (cap, Ngrid))
                lv = levels; fc = first_child; vis = visits
                lo_v = plo; up_v = pu; st_v = step
                low_v = lower; mean_v = means; cnt_v = counts

            base = n_nodes
            half = ldexp(1.0, -(k + 1))
            for code in range(n_children):
                child = base + code
                lv[child] = k + 1
                fc[child] = -1
                vis[child] = 0
                lo_v[child] = c_plo
                up_v[child] = c_pu
                st_v[child] = (c_pu - c_plo) / (Ngrid - 1)
                for i in range(d):
                    bit = (code >> (d - 1 - i)) & 1
                    low_v[child, i] = low_v[node, i] + bit * half
                for i in range(Ngrid):
                    mean_v[child, i] = 0.0
                    cnt_v[child, i] = 0
            fc[node] = base
            n_nodes += n_children

            # Descend into the child containing X_t and re-run the decision.
            code = 0
            for i in range(d):
                mid = low_v[node, i] + half
                code = (code << 1) | (1 if X_v[t, i] >= mid else 0)
            node = fc[node] + code

        # Environment: mean reward, clairvoyant value, sampled reward.
        if env_id == ENV_WEIGHTED:
            c_coef = _weighted_coef(x0, x1)
            demand = _clamp01(1.0 - c_coef * price)
            fval = price * demand
            pstar = 1.0 / (2.0 * c_coef)
            if pstar > 1.0:
                pstar = 1.0
            best = 1.0 - c_coef * pstar
            if best < 0.0:
                best = 0.0
            fstar = pstar * best
            z = price if draws_v[t] < demand else 0.0
        elif env_id == ENV_NEAREST:
            c_coef = _nearest_coef(x0, x1)
            demand = _clamp01(1.0 - c_coef * price)
            fval = price * demand
            if c_coef == COEF0:
                fstar = 0.25
            elif c_coef == COEF1:
                fstar = 0.125
            else:
                fstar = 0.5
            z = price if draws_v[t] < demand else 0.0
        elif env_id == ENV_BOUNDARY:
            demand = _boundary_eval(x0, x1, price, &a_co, &b_co)
            fval = price * demand
            if b_co <= 0.0:
                pstar = 1.0
            else:
                pstar = a_co / (2.0 * b_co)
                if pstar > 1.0:
                    pstar = 1.0
            fstar = pstar * _boundary_eval(x0, x1, pstar, &a_co, &b_co)
            z = price if draws_v[t] < demand else 0.0
        else:
            g = _lb_peak(&X_v[t, 0], d, lb_m, &lb_w[0])
            fval = -price * price + 2.0 * price * g
            fstar = g * g
            z = fval + draws_v[t]

        # Update the explored grid point's running mean.
        if j >= 0:
            cnt = cnt_v[node, j]
            mean_v[node, j] = (cnt * mean_v[node, j] + z) / (cnt + 1)
            cnt_v[node, j] = cnt + 1

        regret += fstar - fval
        if ci < check_v.shape[0] and t + 1 == check_v[ci]:
            cum_v[ci] = regret
            ci += 1

    if not keep_state:
        return cum, None

    from .policy import policy_from_state
    state = {
        "first_child": first_child[:n_nodes].copy(),
        "visits": visits[:n_nodes].copy(),
        "p_l": plo[:n_nodes].copy(),
        "p_u": pu[:n_nodes].copy(),
        "means": means[:n_nodes].copy(),
        "counts": counts[:n_nodes].copy(),
    }
    return cum, policy_from_state(schedule, state)
