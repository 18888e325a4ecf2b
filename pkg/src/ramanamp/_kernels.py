"""Compiled numerical kernels: master-equation RHS, adaptive Dormand-Prince
integration with dense output, and the sequential atom-array cascade.

State layout: vec(rho) row-major in the (a, b, e) basis, 9 complex entries.
The kernels are convention-agnostic: they receive coupling matrix elements
``lam_s(t)`` (signal, complex) and ``lam_p`` (pump) directly; callers apply
the drive-amplitude conventions.

Integration is an embedded adaptive Runge-Kutta 5(4) pair (Dormand-Prince)
with the standard quartic dense-output interpolant.  The pump turn-on is an
exact breakpoint: the integrator lands on it and restarts the FSAL stage, so
step discontinuities are never smoothed over.  After every accepted step and
on every dense sample the known trace invariant is re-imposed by an equal
diagonal shift (the generator is exactly trace-preserving; this removes the
truncation-error drift of the conserved quantity).
"""

from __future__ import annotations

import numpy as np
from numba import njit

# Dormand-Prince 5(4) tableau.
_C2, _C3, _C4, _C5 = 0.2, 0.3, 0.8, 8.0 / 9.0
_A21 = 0.2
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = (19372.0 / 6561.0, -25360.0 / 2187.0,
                          64448.0 / 6561.0, -212.0 / 729.0)
_A61, _A62, _A63, _A64, _A65 = (9017.0 / 3168.0, -355.0 / 33.0,
                                46732.0 / 5247.0, 49.0 / 176.0,
                                -5103.0 / 18656.0)
_B1, _B3, _B4, _B5, _B6 = (35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0,
                           -2187.0 / 6784.0, 11.0 / 84.0)
_E1, _E3, _E4, _E5, _E6, _E7 = (71.0 / 57600.0, -71.0 / 16695.0, 71.0 / 1920.0,
                                -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0)
# Dense-output polynomial coefficients (columns multiply theta^1..theta^4).
_P = np.array([
    [1.0, -8048581381.0 / 2820520608.0, 8663915743.0 / 2820520608.0,
     -12715105075.0 / 11282082432.0],
    [0.0, 0.0, 0.0, 0.0],
    [0.0, 131558114200.0 / 32700410799.0, -68118460800.0 / 10900136933.0,
     87487479700.0 / 32700410799.0],
    [0.0, -1754552775.0 / 470086768.0, 14199869525.0 / 1410260304.0,
     -10690763975.0 / 1880347072.0],
    [0.0, 127303824393.0 / 49829197408.0, -318862633887.0 / 49829197408.0,
     701980252875.0 / 199316789632.0],
    [0.0, -282668133.0 / 205662961.0, 2019193451.0 / 616988883.0,
     -1453857185.0 / 822651844.0],
    [0.0, 40617522.0 / 29380423.0, -110615467.0 / 29380423.0,
     69997945.0 / 29380423.0],
])

STATUS_OK = 0
STATUS_STEP_UNDERFLOW = 1
STATUS_MAX_STEPS = 2

_MAX_STEPS = 4_000_000


@njit(cache=True)
def _rhs(y, out, lam_s, lam_p, d_b, d_e, gamma_e, g_deph, g_pop, branch_a):
    """d(vec rho)/dt for H = d_b|b><b| + d_e|e><e| + lam_s|e><a| + lam_p|e><b| + h.c.

    Dissipators: decay e->a and e->b with branching of gamma_e, plus the
    ground-state decoherence channels sqrt(g_deph)|b><b| (pure dephasing) and
    sqrt(g_pop)|a><b| (population transfer b->a); rho_ab decays at
    (g_deph + g_pop)/2 and neither channel touches rho_ae.
    """
    r00, r01, r02 = y[0], y[1], y[2]
    r10, r11, r12 = y[3], y[4], y[5]
    r20, r21, r22 = y[6], y[7], y[8]
    h02 = np.conj(lam_s)
    h12 = np.conj(lam_p)
    h20 = lam_s
    h21 = lam_p
    h11 = d_b + 0.0j
    h22 = d_e + 0.0j

    # commutator [H, rho]
    c00 = h02 * r20 - r02 * h20
    c01 = h02 * r21 - (r01 * h11 + r02 * h21)
    c02 = h02 * r22 - (r00 * h02 + r01 * h12 + r02 * h22)
    c10 = (h11 * r10 + h12 * r20) - r12 * h20
    c11 = (h11 * r11 + h12 * r21) - (r11 * h11 + r12 * h21)
    c12 = (h11 * r12 + h12 * r22) - (r10 * h02 + r11 * h12 + r12 * h22)
    c20 = (h20 * r00 + h21 * r10 + h22 * r20) - r22 * h20
    c21 = (h20 * r01 + h21 * r11 + h22 * r21) - (r21 * h11 + r22 * h21)
    c22 = (h20 * r02 + h21 * r12 + h22 * r22) - (r20 * h02 + r21 * h12 + r22 * h22)

    ga = branch_a * gamma_e
    gb = gamma_e - ga
    he = 0.5 * gamma_e
    hd = 0.5 * (g_deph + g_pop)

    out[0] = -1j * c00 + ga * r22 + g_pop * r11
    out[1] = -1j * c01 - hd * r01
    out[2] = -1j * c02 - he * r02
    out[3] = -1j * c10 - hd * r10
    out[4] = -1j * c11 + gb * r22 - g_pop * r11
    out[5] = -1j * c12 - (he + hd) * r12
    out[6] = -1j * c20 - he * r20
    out[7] = -1j * c21 - (he + hd) * r21
    out[8] = -1j * c22 - gamma_e * r22


@njit(cache=True)
def _signal_at(t, t0, dt, os_arr):
    """Linear interpolation of the sampled complex signal coupling."""
    n = os_arr.shape[0]
    if n == 1:
        return os_arr[0]
    x = (t - t0) / dt
    i = int(np.floor(x))
    if i < 0:
        i = 0
    elif i > n - 2:
        i = n - 2
    w = x - i
    return os_arr[i] * (1.0 - w) + os_arr[i + 1] * w


@njit(cache=True)
def _pump_at(t, lam_p_before, lam_p_after, t_on):
    return lam_p_after if t >= t_on else lam_p_before


@njit(cache=True)
def _drives_at(t, t0g, dtg, os_arr, lam_p_before, lam_p_after, t_on,
               g_deph, g_pop):
    """Instantaneous couplings and pump-gated decoherence rates.

    The ground-state decoherence is pump-induced scattering, so both its
    channels switch with the pump amplitude.
    """
    lam_s = _signal_at(t, t0g, dtg, os_arr)
    lam_p = _pump_at(t, lam_p_before, lam_p_after, t_on)
    if lam_p == 0.0:
        return lam_s, lam_p, 0.0, 0.0
    return lam_s, lam_p, g_deph, g_pop


@njit(cache=True)
def _project_trace(y):
    corr = (1.0 - (y[0].real + y[4].real + y[8].real)) / 3.0
    y[0] += corr
    y[4] += corr
    y[8] += corr


@njit(cache=True)
def integrate_adaptive(t_grid, os_arr, lam_p_before, lam_p_after, t_on,
                       d_b, d_e, gamma_e, g_deph, g_pop, branch_a,
                       y0, rtol, atol, out_rho):
    """Integrate the master equation over t_grid, dense-sampling every point.

    ``os_arr`` holds the complex signal coupling on t_grid (length n) or a
    single constant value (length 1).  The pump coupling switches from
    ``lam_p_before`` to ``lam_p_after`` exactly at ``t_on``.

    Fills out_rho (n, 9) and returns (status, t_fail).
    """
    n = t_grid.shape[0]
    t0g = t_grid[0]
    dtg = t_grid[1] - t_grid[0] if n > 1 else 1.0
    t_end = t_grid[n - 1]

    y = y0.copy()
    _project_trace(y)
    out_rho[0, :] = y
    if n == 1:
        return STATUS_OK, t0g
    gi = 1  # next grid index to fill

    k = np.empty((7, 9), np.complex128)
    ytmp = np.empty(9, np.complex128)
    y5 = np.empty(9, np.complex128)

    t = t0g
    # segment bound: stop exactly at the pump turn-on if it lies inside
    has_bp = (t_on > t0g) and (t_on < t_end)
    next_stop = t_on if has_bp else t_end

    scale0 = (abs(d_b) + abs(d_e) + gamma_e + g_deph
              + abs(lam_p_before) + abs(lam_p_after) + abs(os_arr[0]) + 1.0)
    h = 0.01 / scale0
    hmin = 1e-14 * (t_end - t0g)

    ls, lp, gd, gp = _drives_at(t, t0g, dtg, os_arr, lam_p_before,
                                lam_p_after, t_on, g_deph, g_pop)
    _rhs(y, k[0], ls, lp, d_b, d_e, gamma_e, gd, gp, branch_a)

    nsteps = 0
    while t < t_end:
        nsteps += 1
        if nsteps > _MAX_STEPS:
            return STATUS_MAX_STEPS, t
        clamped = False
        if t + h >= next_stop:
            h = next_stop - t
            clamped = True

        # stages 2..6
        for j in range(9):
            ytmp[j] = y[j] + h * _A21 * k[0, j]
        tt = t + _C2 * h
        ls, lp, gd, gp = _drives_at(tt, t0g, dtg, os_arr, lam_p_before,
                                    lam_p_after, t_on, g_deph, g_pop)
        _rhs(ytmp, k[1], ls, lp, d_b, d_e, gamma_e, gd, gp, branch_a)
        for j in range(9):
            ytmp[j] = y[j] + h * (_A31 * k[0, j] + _A32 * k[1, j])
        tt = t + _C3 * h
        ls, lp, gd, gp = _drives_at(tt, t0g, dtg, os_arr, lam_p_before,
                                    lam_p_after, t_on, g_deph, g_pop)
        _rhs(ytmp, k[2], ls, lp, d_b, d_e, gamma_e, gd, gp, branch_a)
        for j in range(9):
            ytmp[j] = y[j] + h * (_A41 * k[0, j] + _A42 * k[1, j] + _A43 * k[2, j])
        tt = t + _C4 * h
        ls, lp, gd, gp = _drives_at(tt, t0g, dtg, os_arr, lam_p_before,
                                    lam_p_after, t_on, g_deph, g_pop)
        _rhs(ytmp, k[3], ls, lp, d_b, d_e, gamma_e, gd, gp, branch_a)
        for j in range(9):
            ytmp[j] = y[j] + h * (_A51 * k[0, j] + _A52 * k[1, j]
                                  + _A53 * k[2, j] + _A54 * k[3, j])
        tt = t + _C5 * h
        ls, lp, gd, gp = _drives_at(tt, t0g, dtg, os_arr, lam_p_before,
                                    lam_p_after, t_on, g_deph, g_pop)
        _rhs(ytmp, k[4], ls, lp, d_b, d_e, gamma_e, gd, gp, branch_a)
        for j in range(9):
            ytmp[j] = y[j] + h * (_A61 * k[0, j] + _A62 * k[1, j] + _A63 * k[2, j]
                                  + _A64 * k[3, j] + _A65 * k[4, j])
        tt = t + h
        ls, lp, gd, gp = _drives_at(tt, t0g, dtg, os_arr, lam_p_before,
                                    lam_p_after, t_on, g_deph, g_pop)
        _rhs(ytmp, k[5], ls, lp, d_b, d_e, gamma_e, gd, gp, branch_a)
        # 5th-order solution and FSAL stage
        for j in range(9):
            y5[j] = y[j] + h * (_B1 * k[0, j] + _B3 * k[2, j] + _B4 * k[3, j]
                                + _B5 * k[4, j] + _B6 * k[5, j])
        ls, lp, gd, gp = _drives_at(tt, t0g, dtg, os_arr, lam_p_before,
                                    lam_p_after, t_on, g_deph, g_pop)
        _rhs(y5, k[6], ls, lp, d_b, d_e, gamma_e, gd, gp, branch_a)

        # embedded error estimate
        errsq = 0.0
        for j in range(9):
            e = h * (_E1 * k[0, j] + _E3 * k[2, j] + _E4 * k[3, j]
                     + _E5 * k[4, j] + _E6 * k[5, j] + _E7 * k[6, j])
            ay = abs(y[j])
            ay5 = abs(y5[j])
            sc = atol + rtol * (ay if ay > ay5 else ay5)
            q = abs(e) / sc
            errsq += q * q
        err = np.sqrt(errsq / 9.0)

        if err <= 1.0:
            t_new = next_stop if clamped else t + h
            # dense output on grid points inside (t, t_new]
            while gi < n and t_grid[gi] <= t_new + 1e-12 * dtg:
                theta = (t_grid[gi] - t) / h
                th2 = theta * theta
                th3 = th2 * theta
                th4 = th3 * theta
                for j in range(9):
                    acc = 0.0j
                    for s in range(7):
                        w = (_P[s, 0] * theta + _P[s, 1] * th2
                             + _P[s, 2] * th3 + _P[s, 3] * th4)
                        acc += w * k[s, j]
                    out_rho[gi, j] = y[j] + h * acc
                _project_trace(out_rho[gi])
                gi += 1
            for j in range(9):
                y[j] = y5[j]
            _project_trace(y)
            t = t_new
            if clamped:
                if next_stop < t_end:
                    next_stop = t_end
                # drive may be discontinuous across the stop: restart FSAL
                ls, lp, gd, gp = _drives_at(t, t0g, dtg, os_arr, lam_p_before,
                                            lam_p_after, t_on, g_deph, g_pop)
                _rhs(y, k[0], ls, lp, d_b, d_e, gamma_e, gd, gp, branch_a)
            else:
                for j in range(9):
                    k[0, j] = k[6, j]
            factor = 0.9 * err ** -0.2 if err > 1e-10 else 5.0
            if factor > 5.0:
                factor = 5.0
            h *= factor
        else:
            factor = 0.9 * err ** -0.2
            if factor < 0.2:
                factor = 0.2
            h *= factor
            if h < hmin:
                return STATUS_STEP_UNDERFLOW, t
    return STATUS_OK, t_end


@njit(cache=True)
def integrate_fixed_rk4(t_grid, os_arr, lam_p_before, lam_p_after, t_on,
                        d_b, d_e, gamma_e, g_deph, g_pop, branch_a,
                        y0, n_sub, out_rho):
    """Classical RK4 with n_sub substeps per grid interval (fallback path)."""
    n = t_grid.shape[0]
    t0g = t_grid[0]
    dtg = t_grid[1] - t_grid[0] if n > 1 else 1.0
    y = y0.copy()
    out_rho[0, :] = y
    k1 = np.empty(9, np.complex128)
    k2 = np.empty(9, np.complex128)
    k3 = np.empty(9, np.complex128)
    k4 = np.empty(9, np.complex128)
    ytmp = np.empty(9, np.complex128)
    for g in range(n - 1):
        ta, tb = t_grid[g], t_grid[g + 1]
        hh = (tb - ta) / n_sub
        for s in range(n_sub):
            t = ta + s * hh
            ls, lp, gd, gp = _drives_at(t, t0g, dtg, os_arr, lam_p_before,
                                        lam_p_after, t_on, g_deph, g_pop)
            _rhs(y, k1, ls, lp, d_b, d_e, gamma_e, gd, gp, branch_a)
            for j in range(9):
                ytmp[j] = y[j] + 0.5 * hh * k1[j]
            tm = t + 0.5 * hh
            ls, lp, gd, gp = _drives_at(tm, t0g, dtg, os_arr, lam_p_before,
                                        lam_p_after, t_on, g_deph, g_pop)
            _rhs(ytmp, k2, ls, lp, d_b, d_e, gamma_e, gd, gp, branch_a)
            for j in range(9):
                ytmp[j] = y[j] + 0.5 * hh * k2[j]
            ls, lp, gd, gp = _drives_at(tm, t0g, dtg, os_arr, lam_p_before,
                                        lam_p_after, t_on, g_deph, g_pop)
            _rhs(ytmp, k3, ls, lp, d_b, d_e, gamma_e, gd, gp, branch_a)
            for j in range(9):
                ytmp[j] = y[j] + hh * k3[j]
            te = t + hh
            ls, lp, gd, gp = _drives_at(te, t0g, dtg, os_arr, lam_p_before,
                                        lam_p_after, t_on, g_deph, g_pop)
            _rhs(ytmp, k4, ls, lp, d_b, d_e, gamma_e, gd, gp, branch_a)
            for j in range(9):
                y[j] += hh / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j])
        out_rho[g + 1, :] = y
    return STATUS_OK, t_grid[n - 1]


@njit(cache=True)
def cascade_kernel(t_grid, weights, lam_s_eff, od_eff, d_b_arr, d_e_arr,
                   lam_p_arr, gamma_e_arr, g_deph_arr, g_pop_arr, branch_a_arr,
                   t_on, n_atoms, y0, rtol, atol, eps_rel):
    """Propagate the signal through n_atoms identical composite sites.

    Each site carries the weighted species of a (possibly mixed) spin
    preparation; all species at a site see the same local field factor.  The
    site's amplitude transfer is exp(sum_sp w_sp * i od_sp/2 * chi_sp), and
    the local field factor multiplies up through the array.

    Returns (status, failing_atom, cum) where cum is the cumulative complex
    field factor at the array output on t_grid (launch amplitude divided out).
    """
    n = t_grid.shape[0]
    n_species = weights.shape[0]
    cum = np.ones(n, np.complex128)
    exponent = np.empty(n, np.complex128)
    os_buf = np.empty(n, np.complex128)
    out_rho = np.empty((n, 9), np.complex128)

    for atom in range(n_atoms):
        for i in range(n):
            exponent[i] = 0.0j
        for sp in range(n_species):
            for i in range(n):
                os_buf[i] = lam_s_eff[sp] * cum[i]
            status, t_fail = integrate_adaptive(
                t_grid, os_buf, 0.0j, lam_p_arr[sp], t_on,
                d_b_arr[sp], d_e_arr[sp], gamma_e_arr[sp], g_deph_arr[sp],
                g_pop_arr[sp], branch_a_arr[sp], y0, rtol, atol, out_rho)
            if status != STATUS_OK:
                return status, atom, cum
            thresh = eps_rel * lam_s_eff[sp]
            last = 0.0j
            wfac = 0.5j * weights[sp] * od_eff[sp]
            for i in range(n):
                dr = os_buf[i]
                if abs(dr) > thresh:
                    last = gamma_e_arr[sp] * out_rho[i, 2] / (2.0 * dr)
                exponent[i] += wfac * last
        for i in range(n):
            cum[i] = cum[i] * np.exp(exponent[i])
    return STATUS_OK, -1, cum
