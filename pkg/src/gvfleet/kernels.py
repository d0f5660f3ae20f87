"""Fused per-tick simulation loop with selectable execution backend.

The whole closed loop (coordinate exchange -> guidance -> optional barrier
filter -> regulators -> telemetry row -> RK4 step) is one self-contained
function written in scalar numpy so it can run either JIT-compiled by
numba (default) or as plain Python.  Select with the ``GVFLEET_BACKEND``
environment variable (``numba`` | ``numpy``; ``auto`` picks numba when
importable) or per call via ``backend=``.

Both backends execute the identical source; results agree to floating-point
rounding (the JIT may pick differently-rounded transcendental routines
inside vectorised loops, so bitwise equality across backends is not
guaranteed -- reruns on the *same* backend are byte-identical).  The numpy
path exists for environments without numba and as the reference in the
backend-equivalence tests; ``benchmarks/bench_backends.py`` compares their
throughput.

Telemetry field order (axis 2 of ``out``) matches
:data:`gvfleet.telemetry.FIELDS`.
"""

from __future__ import annotations

import math
import os

import numpy as np

BACKEND_ENV = "GVFLEET_BACKEND"

STATUS_OK = 0
STATUS_QP_INFEASIBLE = 1
STATUS_NONFINITE = 2
STATUS_DEGENERATE = 3

N_FIELDS = 29

_jitted_loop = None


def numba_available() -> bool:
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


def resolve_backend(explicit=None) -> str:
    """Pick 'numba' or 'numpy' from the argument, environment, or default."""
    choice = explicit or os.environ.get(BACKEND_ENV, "auto").strip().lower()
    if choice in ("", "auto"):
        choice = "numba" if numba_available() else "numpy"
    if choice not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {choice!r} (use 'numba' or 'numpy')")
    if choice == "numba" and not numba_available():
        raise RuntimeError("numba backend requested but numba is not importable")
    return choice


def get_loop(backend=None):
    """Return the tick-loop callable for the chosen backend."""
    global _jitted_loop
    if resolve_backend(backend) == "numpy":
        return _run_loop
    if _jitted_loop is None:
        import numba

        _jitted_loop = numba.njit(cache=True, fastmath=False)(_run_loop)
    return _jitted_loop


def _run_loop(dt, n_ticks,
              usv_gidx, usv_state, usv_eps, usv_k, usv_b, usv_lamf, usv_floor,
              usv_tau_max, usv_speed_cap, usv_off, usv_terms,
              uav_gidx, uav_state, uav_k, uav_b4, uav_lamf,
              uav_acc_max, uav_speed_cap, uav_off, uav_terms,
              c_all, adj, delta,
              lyap_on, omega_star0, lap,
              saf_on, saf_usv, saf_uav, saf_cross, saf_radius, saf_gamma,
              out, out_v, abort_info):
    n = usv_state.shape[0]
    m = uav_state.shape[0]
    big = n + m

    domain = np.empty(big, dtype=np.int64)   # 0 vessel, 1 aerial
    for i in range(n):
        domain[usv_gidx[i]] = 0
    for j in range(m):
        domain[uav_gidx[j]] = 1

    omega_all = np.empty(big)
    pos = np.zeros((big, 3))
    vel = np.zeros((big, 3))
    evec = np.zeros((big, 3))
    uom = np.empty(big)
    resmax = np.empty(big)
    consterm = np.empty(big)
    phis = np.zeros((big, 3))
    filt = np.zeros(big)
    wt = np.empty(big)
    est_prev = np.zeros((big, 3))
    est_val = np.zeros((big, 3))
    est_init = np.zeros(big, dtype=np.int64)
    ca = np.zeros((big, 3))
    cb = np.zeros(big)

    for tick in range(n_ticks):
        t = tick * dt

        # ------ divergence guard: states must be finite at tick start
        for i in range(n):
            for col in range(7):
                if not math.isfinite(usv_state[i, col]):
                    abort_info[0] = tick
                    abort_info[1] = usv_gidx[i]
                    return STATUS_NONFINITE
        for j in range(m):
            for col in range(7):
                if not math.isfinite(uav_state[j, col]):
                    abort_info[0] = tick
                    abort_info[1] = uav_gidx[j]
                    return STATUS_NONFINITE

        # ------ snapshot of coordinates, positions, inertial velocities
        for i in range(n):
            g = usv_gidx[i]
            omega_all[g] = usv_state[i, 6]
            pos[g, 0] = usv_state[i, 0]
            pos[g, 1] = usv_state[i, 1]
            pos[g, 2] = 0.0
            cp = math.cos(usv_state[i, 2])
            sp = math.sin(usv_state[i, 2])
            vel[g, 0] = usv_state[i, 3] * cp - usv_state[i, 4] * sp
            vel[g, 1] = usv_state[i, 3] * sp + usv_state[i, 4] * cp
            vel[g, 2] = 0.0
        for j in range(m):
            g = uav_gidx[j]
            omega_all[g] = uav_state[j, 6]
            for col in range(3):
                pos[g, col] = uav_state[j, col]
                vel[g, col] = uav_state[j, col + 3]

        # ------ coordinate exchange: weighted consensus term + worst residual
        for g in range(big):
            ssum = 0.0
            rmax = -1.0
            for k2 in range(big):
                a = adj[g, k2]
                if a > 0.0:
                    rr = omega_all[g] - omega_all[k2] - delta[g, k2]
                    ssum += a * rr
                    ar = abs(rr)
                    if ar > rmax:
                        rmax = ar
            consterm[g] = -c_all[g] * ssum
            resmax[g] = rmax if rmax >= 0.0 else np.nan

        # ------ guidance field, coordinate rate, optional speed cap
        for i in range(n):
            g = usv_gidx[i]
            w = usv_state[i, 6]
            ex = 0.0
            ey = 0.0
            uo = -1.0 + consterm[g]
            for axis in range(2):
                fj = usv_off[i, axis]
                dj = 0.0
                for tt in range(usv_terms.shape[2]):
                    amp = usv_terms[i, axis, tt, 0]
                    freq = usv_terms[i, axis, tt, 1]
                    arg = freq * w + usv_terms[i, axis, tt, 2]
                    fj += amp * math.cos(arg)
                    dj += -amp * freq * math.sin(arg)
                ph = usv_state[i, axis] - fj
                phis[g, axis] = ph
                comp = -dj - usv_k[i, axis] * ph
                uo += usv_k[i, axis] * ph * dj
                if axis == 0:
                    ex = comp
                else:
                    ey = comp
            phis[g, 2] = 0.0
            cap = usv_speed_cap[i]
            en = math.sqrt(ex * ex + ey * ey)
            if en > cap:
                ex *= cap / en
                ey *= cap / en
            evec[g, 0] = ex
            evec[g, 1] = ey
            evec[g, 2] = 0.0
            uom[g] = uo
        for j in range(m):
            g = uav_gidx[j]
            w = uav_state[j, 6]
            uo = -1.0 + consterm[g]
            for axis in range(3):
                fj = uav_off[j, axis]
                dj = 0.0
                for tt in range(uav_terms.shape[2]):
                    amp = uav_terms[j, axis, tt, 0]
                    freq = uav_terms[j, axis, tt, 1]
                    arg = freq * w + uav_terms[j, axis, tt, 2]
                    fj += amp * math.cos(arg)
                    dj += -amp * freq * math.sin(arg)
                ph = uav_state[j, axis] - fj
                phis[g, axis] = ph
                evec[g, axis] = -dj - uav_k[j, axis] * ph
                uo += uav_k[j, axis] * ph * dj
            cap = uav_speed_cap[j]
            en = math.sqrt(evec[g, 0] ** 2 + evec[g, 1] ** 2 + evec[g, 2] ** 2)
            if en > cap:
                s = cap / en
                evec[g, 0] *= s
                evec[g, 1] *= s
                evec[g, 2] *= s
            uom[g] = uo

        # ------ coordinate error against the anchored reference (rate -1)
        for g in range(big):
            wt[g] = omega_all[g] - (omega_star0[g] - t)

        # ------ energy diagnostic on the pre-step state
        if lyap_on == 1:
            vq = 0.0
            for i in range(n):
                g = usv_gidx[i]
                vq += usv_k[i, 0] * phis[g, 0] ** 2 + usv_k[i, 1] * phis[g, 1] ** 2
            for j in range(m):
                g = uav_gidx[j]
                for axis in range(3):
                    vq += uav_k[j, axis] * phis[g, axis] ** 2
            vw = 0.0
            for g in range(big):
                lw = 0.0
                for k2 in range(big):
                    lw += lap[g, k2] * wt[k2]
                vw += c_all[g] * wt[g] * lw
            out_v[tick] = 0.5 * (vq + vw)
        else:
            out_v[tick] = np.nan

        # ------ barrier filter on inertial velocity commands
        if saf_on == 1:
            act2 = (3.0 * saf_radius) * (3.0 * saf_radius)
            for g in range(big):
                nc = 0
                for h in range(big):
                    if h == g:
                        continue
                    if domain[h] == domain[g]:
                        if domain[g] == 0 and saf_usv == 0:
                            continue
                        if domain[g] == 1 and saf_uav == 0:
                            continue
                        planar = domain[g] == 0
                    else:
                        if saf_cross == 0:
                            continue
                        planar = True
                    dx0 = pos[g, 0] - pos[h, 0]
                    dx1 = pos[g, 1] - pos[h, 1]
                    dx2 = 0.0 if planar else pos[g, 2] - pos[h, 2]
                    d2 = dx0 * dx0 + dx1 * dx1 + dx2 * dx2
                    if d2 < 1e-18:
                        abort_info[0] = tick
                        abort_info[1] = g
                        return STATUS_DEGENERATE
                    if d2 >= act2:
                        continue
                    hval = d2 - saf_radius * saf_radius
                    ca[nc, 0] = 2.0 * dx0
                    ca[nc, 1] = 2.0 * dx1
                    ca[nc, 2] = 2.0 * dx2
                    vh2 = 0.0 if planar else vel[h, 2]
                    cb[nc] = (-saf_gamma * hval + ca[nc, 0] * vel[h, 0]
                              + ca[nc, 1] * vel[h, 1] + ca[nc, 2] * vh2)
                    nc += 1
                filt[g] = 0.0
                if nc == 0:
                    continue
                ux = evec[g, 0]
                uy = evec[g, 1]
                uz = evec[g, 2]
                feas = True
                for s in range(nc):
                    if ca[s, 0] * ux + ca[s, 1] * uy + ca[s, 2] * uz < cb[s] - 1e-9:
                        feas = False
                        break
                if feas:
                    continue
                filt[g] = 1.0
                # active-set enumeration: u = u_nom + sum lam_s a_s, lam >= 0
                best_obj = np.inf
                bx = 0.0
                by = 0.0
                bz = 0.0
                found = False
                for s1 in range(nc):
                    g11 = ca[s1, 0] ** 2 + ca[s1, 1] ** 2 + ca[s1, 2] ** 2
                    if g11 < 1e-18:
                        continue
                    r1 = cb[s1] - (ca[s1, 0] * ux + ca[s1, 1] * uy + ca[s1, 2] * uz)
                    lam1 = r1 / g11
                    if lam1 < -1e-12:
                        continue
                    cx = ux + lam1 * ca[s1, 0]
                    cy = uy + lam1 * ca[s1, 1]
                    cz = uz + lam1 * ca[s1, 2]
                    ok = True
                    for s in range(nc):
                        if ca[s, 0] * cx + ca[s, 1] * cy + ca[s, 2] * cz < cb[s] - 1e-9:
                            ok = False
                            break
                    if ok:
                        obj = (cx - ux) ** 2 + (cy - uy) ** 2 + (cz - uz) ** 2
                        if obj < best_obj:
                            best_obj = obj
                            bx = cx
                            by = cy
                            bz = cz
                            found = True
                for s1 in range(nc):
                    for s2 in range(s1 + 1, nc):
                        g11 = ca[s1, 0] ** 2 + ca[s1, 1] ** 2 + ca[s1, 2] ** 2
                        g22 = ca[s2, 0] ** 2 + ca[s2, 1] ** 2 + ca[s2, 2] ** 2
                        g12 = (ca[s1, 0] * ca[s2, 0] + ca[s1, 1] * ca[s2, 1]
                               + ca[s1, 2] * ca[s2, 2])
                        det = g11 * g22 - g12 * g12
                        if det * det <= 1e-24 * g11 * g22:
                            continue
                        r1 = cb[s1] - (ca[s1, 0] * ux + ca[s1, 1] * uy + ca[s1, 2] * uz)
                        r2 = cb[s2] - (ca[s2, 0] * ux + ca[s2, 1] * uy + ca[s2, 2] * uz)
                        lam1 = (g22 * r1 - g12 * r2) / det
                        lam2 = (g11 * r2 - g12 * r1) / det
                        if lam1 < -1e-12 or lam2 < -1e-12:
                            continue
                        cx = ux + lam1 * ca[s1, 0] + lam2 * ca[s2, 0]
                        cy = uy + lam1 * ca[s1, 1] + lam2 * ca[s2, 1]
                        cz = uz + lam1 * ca[s1, 2] + lam2 * ca[s2, 2]
                        ok = True
                        for s in range(nc):
                            if (ca[s, 0] * cx + ca[s, 1] * cy + ca[s, 2] * cz
                                    < cb[s] - 1e-9):
                                ok = False
                                break
                        if ok:
                            obj = (cx - ux) ** 2 + (cy - uy) ** 2 + (cz - uz) ** 2
                            if obj < best_obj:
                                best_obj = obj
                                bx = cx
                                by = cy
                                bz = cz
                                found = True
                for s1 in range(nc):
                    for s2 in range(s1 + 1, nc):
                        for s3 in range(s2 + 1, nc):
                            a11 = (ca[s1, 0] ** 2 + ca[s1, 1] ** 2 + ca[s1, 2] ** 2)
                            a22 = (ca[s2, 0] ** 2 + ca[s2, 1] ** 2 + ca[s2, 2] ** 2)
                            a33 = (ca[s3, 0] ** 2 + ca[s3, 1] ** 2 + ca[s3, 2] ** 2)
                            a12 = (ca[s1, 0] * ca[s2, 0] + ca[s1, 1] * ca[s2, 1]
                                   + ca[s1, 2] * ca[s2, 2])
                            a13 = (ca[s1, 0] * ca[s3, 0] + ca[s1, 1] * ca[s3, 1]
                                   + ca[s1, 2] * ca[s3, 2])
                            a23 = (ca[s2, 0] * ca[s3, 0] + ca[s2, 1] * ca[s3, 1]
                                   + ca[s2, 2] * ca[s3, 2])
                            det = (a11 * (a22 * a33 - a23 * a23)
                                   - a12 * (a12 * a33 - a23 * a13)
                                   + a13 * (a12 * a23 - a22 * a13))
                            scale = a11 * a22 * a33
                            if det * det <= 1e-24 * scale * scale / (a11 + a22 + a33 + 1e-30):
                                continue
                            r1 = cb[s1] - (ca[s1, 0] * ux + ca[s1, 1] * uy + ca[s1, 2] * uz)
                            r2 = cb[s2] - (ca[s2, 0] * ux + ca[s2, 1] * uy + ca[s2, 2] * uz)
                            r3 = cb[s3] - (ca[s3, 0] * ux + ca[s3, 1] * uy + ca[s3, 2] * uz)
                            # Cramer on the 3x3 gram
                            i11 = a22 * a33 - a23 * a23
                            i12 = a13 * a23 - a12 * a33
                            i13 = a12 * a23 - a13 * a22
                            i22 = a11 * a33 - a13 * a13
                            i23 = a12 * a13 - a11 * a23
                            i33 = a11 * a22 - a12 * a12
                            lam1 = (i11 * r1 + i12 * r2 + i13 * r3) / det
                            lam2 = (i12 * r1 + i22 * r2 + i23 * r3) / det
                            lam3 = (i13 * r1 + i23 * r2 + i33 * r3) / det
                            if lam1 < -1e-12 or lam2 < -1e-12 or lam3 < -1e-12:
                                continue
                            cx = ux + lam1 * ca[s1, 0] + lam2 * ca[s2, 0] + lam3 * ca[s3, 0]
                            cy = uy + lam1 * ca[s1, 1] + lam2 * ca[s2, 1] + lam3 * ca[s3, 1]
                            cz = uz + lam1 * ca[s1, 2] + lam2 * ca[s2, 2] + lam3 * ca[s3, 2]
                            ok = True
                            for s in range(nc):
                                if (ca[s, 0] * cx + ca[s, 1] * cy + ca[s, 2] * cz
                                        < cb[s] - 1e-9):
                                    ok = False
                                    break
                            if ok:
                                obj = (cx - ux) ** 2 + (cy - uy) ** 2 + (cz - uz) ** 2
                                if obj < best_obj:
                                    best_obj = obj
                                    bx = cx
                                    by = cy
                                    bz = cz
                                    found = True
                if not found:
                    abort_info[0] = tick
                    abort_info[1] = g
                    return STATUS_QP_INFEASIBLE
                evec[g, 0] = bx
                evec[g, 1] = by
                evec[g, 2] = bz

        # ------ vessels: regulator, telemetry row, RK4 step
        for i in range(n):
            g = usv_gidx[i]
            qx = usv_state[i, 0]
            qy = usv_state[i, 1]
            psi = usv_state[i, 2]
            u = usv_state[i, 3]
            v = usv_state[i, 4]
            r = usv_state[i, 5]
            w = usv_state[i, 6]
            e1 = usv_eps[i, 0]
            e2 = usv_eps[i, 1]
            e3 = usv_eps[i, 2]
            e4 = usv_eps[i, 3]
            e5 = usv_eps[i, 4]
            e6 = usv_eps[i, 5]
            e7 = usv_eps[i, 6]
            cp = math.cos(psi)
            sp = math.sin(psi)
            u_r = evec[g, 0] * cp + evec[g, 1] * sp
            v_r = -evec[g, 0] * sp + evec[g, 1] * cp
            floor = usv_floor[i]
            ure = u_r if u_r >= floor else floor
            lam = usv_lamf[i]
            if est_init[g] == 0:
                est_prev[g, 0] = ure
                est_prev[g, 1] = v_r
                du = 0.0
                dv = 0.0
            else:
                du = est_val[g, 0] + lam * dt * ((ure - est_prev[g, 0]) / dt - est_val[g, 0])
                est_prev[g, 0] = ure
                dv = est_val[g, 1] + lam * dt * ((v_r - est_prev[g, 1]) / dt - est_val[g, 1])
                est_prev[g, 1] = v_r
            est_val[g, 0] = du
            est_val[g, 1] = dv
            if abs(u) >= floor:
                ucl = u
            else:
                ucl = floor if u >= 0.0 else -floor
            rref = (-e6 * v + dv - usv_b[i, 2] * (v - v_r)) / (e7 * ucl)
            if est_init[g] == 0:
                est_prev[g, 2] = rref
                dr = 0.0
                est_init[g] = 1
            else:
                dr = est_val[g, 2] + lam * dt * ((rref - est_prev[g, 2]) / dt - est_val[g, 2])
                est_prev[g, 2] = rref
            est_val[g, 2] = dr
            tau_u = (du * u - e1 * ure * u - e2 * ure * v * r
                     - usv_b[i, 0] * u * (u - ure)) / (e3 * ure)
            tau_r = (-e4 * r - usv_b[i, 1] * (r - rref) + dr) / e5
            if tau_u > usv_tau_max[i, 0]:
                tau_u = usv_tau_max[i, 0]
            if tau_u < -usv_tau_max[i, 0]:
                tau_u = -usv_tau_max[i, 0]
            if tau_r > usv_tau_max[i, 1]:
                tau_r = usv_tau_max[i, 1]
            if tau_r < -usv_tau_max[i, 1]:
                tau_r = -usv_tau_max[i, 1]
            clamp = 1.0 if (u_r < floor or abs(u) < floor) else 0.0

            out[tick, g, 0] = qx
            out[tick, g, 1] = qy
            out[tick, g, 2] = np.nan
            out[tick, g, 3] = psi
            out[tick, g, 4] = u
            out[tick, g, 5] = v
            out[tick, g, 6] = r
            out[tick, g, 7] = np.nan
            out[tick, g, 8] = np.nan
            out[tick, g, 9] = np.nan
            out[tick, g, 10] = w
            out[tick, g, 11] = phis[g, 0]
            out[tick, g, 12] = phis[g, 1]
            out[tick, g, 13] = np.nan
            out[tick, g, 14] = u_r
            out[tick, g, 15] = v_r
            out[tick, g, 16] = np.nan
            out[tick, g, 17] = np.nan
            out[tick, g, 18] = np.nan
            out[tick, g, 19] = uom[g]
            out[tick, g, 20] = tau_u
            out[tick, g, 21] = tau_r
            out[tick, g, 22] = np.nan
            out[tick, g, 23] = np.nan
            out[tick, g, 24] = np.nan
            out[tick, g, 25] = resmax[g]
            out[tick, g, 26] = clamp
            out[tick, g, 27] = filt[g]
            out[tick, g, 28] = wt[g]

            # RK4 on (qx, qy, psi, u, v, r) with torques held over the step
            y0 = qx
            y1 = qy
            y2 = psi
            y3 = u
            y4 = v
            y5 = r
            a0 = y0
            a1 = y1
            a2 = y2
            a3 = y3
            a4 = y4
            a5 = y5
            s0 = 0.0
            s1 = 0.0
            s2 = 0.0
            s3 = 0.0
            s4 = 0.0
            s5 = 0.0
            for stage in range(4):
                c_ = math.cos(a2)
                s_ = math.sin(a2)
                d0 = a3 * c_ - a4 * s_
                d1 = a3 * s_ + a4 * c_
                d2 = a5
                d3 = e1 * a3 + e2 * a4 * a5 + e3 * tau_u
                d4 = e6 * a4 + e7 * a3 * a5
                d5 = e4 * a5 + e5 * tau_r
                wgt = 2.0 if stage == 1 or stage == 2 else 1.0
                s0 += wgt * d0
                s1 += wgt * d1
                s2 += wgt * d2
                s3 += wgt * d3
                s4 += wgt * d4
                s5 += wgt * d5
                h = 0.5 * dt if stage < 2 else dt
                a0 = y0 + h * d0
                a1 = y1 + h * d1
                a2 = y2 + h * d2
                a3 = y3 + h * d3
                a4 = y4 + h * d4
                a5 = y5 + h * d5
            sixth = dt / 6.0
            usv_state[i, 0] = y0 + sixth * s0
            usv_state[i, 1] = y1 + sixth * s1
            usv_state[i, 2] = y2 + sixth * s2
            usv_state[i, 3] = y3 + sixth * s3
            usv_state[i, 4] = y4 + sixth * s4
            usv_state[i, 5] = y5 + sixth * s5
            usv_state[i, 6] = w + dt * uom[g]

        # ------ aerial vehicles: regulator, telemetry row, RK4 step
        for j in range(m):
            g = uav_gidx[j]
            w = uav_state[j, 6]
            lam = uav_lamf[j]
            if est_init[g] == 0:
                for axis in range(3):
                    est_prev[g, axis] = evec[g, axis]
                    est_val[g, axis] = 0.0
                est_init[g] = 1
            else:
                for axis in range(3):
                    dpa = est_val[g, axis] + lam * dt * (
                        (evec[g, axis] - est_prev[g, axis]) / dt - est_val[g, axis])
                    est_prev[g, axis] = evec[g, axis]
                    est_val[g, axis] = dpa
            tx = -uav_b4[j] * (uav_state[j, 3] - evec[g, 0]) + est_val[g, 0]
            ty = -uav_b4[j] * (uav_state[j, 4] - evec[g, 1]) + est_val[g, 1]
            tz = -uav_b4[j] * (uav_state[j, 5] - evec[g, 2]) + est_val[g, 2]
            amax = uav_acc_max[j]
            if tx > amax:
                tx = amax
            if tx < -amax:
                tx = -amax
            if ty > amax:
                ty = amax
            if ty < -amax:
                ty = -amax
            if tz > amax:
                tz = amax
            if tz < -amax:
                tz = -amax

            out[tick, g, 0] = uav_state[j, 0]
            out[tick, g, 1] = uav_state[j, 1]
            out[tick, g, 2] = uav_state[j, 2]
            out[tick, g, 3] = np.nan
            out[tick, g, 4] = np.nan
            out[tick, g, 5] = np.nan
            out[tick, g, 6] = np.nan
            out[tick, g, 7] = uav_state[j, 3]
            out[tick, g, 8] = uav_state[j, 4]
            out[tick, g, 9] = uav_state[j, 5]
            out[tick, g, 10] = w
            out[tick, g, 11] = phis[g, 0]
            out[tick, g, 12] = phis[g, 1]
            out[tick, g, 13] = phis[g, 2]
            out[tick, g, 14] = np.nan
            out[tick, g, 15] = np.nan
            out[tick, g, 16] = evec[g, 0]
            out[tick, g, 17] = evec[g, 1]
            out[tick, g, 18] = evec[g, 2]
            out[tick, g, 19] = uom[g]
            out[tick, g, 20] = np.nan
            out[tick, g, 21] = np.nan
            out[tick, g, 22] = tx
            out[tick, g, 23] = ty
            out[tick, g, 24] = tz
            out[tick, g, 25] = resmax[g]
            out[tick, g, 26] = np.nan
            out[tick, g, 27] = filt[g]
            out[tick, g, 28] = wt[g]

            # RK4 on (q, p) with acceleration held over the step
            for axis in range(3):
                ta = tx if axis == 0 else (ty if axis == 1 else tz)
                yq = uav_state[j, axis]
                yp = uav_state[j, axis + 3]
                aq = yq
                ap = yp
                sq = 0.0
                sp2 = 0.0
                for stage in range(4):
                    dq = ap
                    dp = ta
                    wgt = 2.0 if stage == 1 or stage == 2 else 1.0
                    sq += wgt * dq
                    sp2 += wgt * dp
                    h = 0.5 * dt if stage < 2 else dt
                    aq = yq + h * dq
                    ap = yp + h * dp
                uav_state[j, axis] = yq + (dt / 6.0) * sq
                uav_state[j, axis + 3] = yp + (dt / 6.0) * sp2
            uav_state[j, 6] = w + dt * uom[g]

    return STATUS_OK
