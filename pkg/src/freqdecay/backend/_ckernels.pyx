# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled twin of py_kernels: identical formulas, per-triangle C loops.

Keep every expression in the same shape and order as the NumPy backend so
the two produce matching results (no reassociation, no fused operations).
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

name = "compiled"


def clip_table(double[:, ::1] vertices, int[:, ::1] triangles,
               double[::1] phi, svals, double d):
    cdef Py_ssize_t ntri = triangles.shape[0]
    cdef cnp.ndarray[double, ndim=2] out_arr = np.zeros((ntri, 3))
    cdef double[:, ::1] out = out_arr
    cdef bint has_s = svals is not None
    cdef double[::1] s
    if has_s:
        s = svals
    else:
        s = phi  # unused values; keeps the memoryview bound
    cdef Py_ssize_t t, a, b, c
    cdef int i0, i1, i2, va, vb, vc
    cdef int k
    cdef double x0, y0, x1, y1, x2, y2, f0, f1, f2, g0, g1, g2
    cdef double area, su, qu, full_is, full_is2
    cdef double ga, gb, gc, tau_ab, tau_ac, a_corner, ua, ub, uc
    cdef double c_is, c_is2, s0, s1, s2
    cdef bint in0, in1, in2

    for t in range(ntri):
        i0 = triangles[t, 0]; i1 = triangles[t, 1]; i2 = triangles[t, 2]
        x0 = vertices[i0, 0]; y0 = vertices[i0, 1]
        x1 = vertices[i1, 0]; y1 = vertices[i1, 1]
        x2 = vertices[i2, 0]; y2 = vertices[i2, 1]
        f0 = phi[i0]; f1 = phi[i1]; f2 = phi[i2]
        g0 = f0 - d; g1 = f1 - d; g2 = f2 - d
        in0 = g0 > 0.0; in1 = g1 > 0.0; in2 = g2 > 0.0
        k = (1 if in0 else 0) + (1 if in1 else 0) + (1 if in2 else 0)
        if k == 0:
            continue
        area = 0.5 * ((x1 - x0) * (y2 - y0) - (y1 - y0) * (x2 - x0))
        if has_s:
            s0 = s[i0]; s1 = s[i1]; s2 = s[i2]
        else:
            s0 = 0.0; s1 = 0.0; s2 = 0.0
        su = s0 + s1 + s2
        qu = s0 * s0 + s1 * s1 + s2 * s2
        full_is = area * (su / 3.0)
        full_is2 = area * ((su * su + qu) / 12.0)
        if k == 3:
            out[t, 0] = area
            out[t, 1] = full_is
            out[t, 2] = full_is2
            continue
        # odd vertex out: the unique inside vertex (k == 1) or outside (k == 2)
        if k == 1:
            a = 0 if in0 else (1 if in1 else 2)
        else:
            a = 0 if not in0 else (1 if not in1 else 2)
        b = (a + 1) % 3
        c = (a + 2) % 3
        ga = g0 if a == 0 else (g1 if a == 1 else g2)
        gb = g0 if b == 0 else (g1 if b == 1 else g2)
        gc = g0 if c == 0 else (g1 if c == 1 else g2)
        tau_ab = ga / (ga - gb)
        tau_ac = ga / (ga - gc)
        a_corner = area * (tau_ab * tau_ac)
        ua = s0 if a == 0 else (s1 if a == 1 else s2)
        ub = ua + tau_ab * ((s0 if b == 0 else (s1 if b == 1 else s2)) - ua)
        uc = ua + tau_ac * ((s0 if c == 0 else (s1 if c == 1 else s2)) - ua)
        su = ua + ub + uc
        qu = ua * ua + ub * ub + uc * uc
        c_is = a_corner * (su / 3.0)
        c_is2 = a_corner * ((su * su + qu) / 12.0)
        if k == 1:
            out[t, 0] = a_corner
            out[t, 1] = c_is
            out[t, 2] = c_is2
        else:
            out[t, 0] = area - a_corner
            out[t, 1] = full_is - c_is
            out[t, 2] = full_is2 - c_is2
    return out_arr


def level_chords(double[:, ::1] vertices, int[:, ::1] triangles,
                 double[::1] phi, double d):
    cdef Py_ssize_t ntri = triangles.shape[0]
    cdef Py_ssize_t t, m, a, b, c
    cdef int i0, i1, i2
    cdef int k
    cdef double g0, g1, g2, ga, gb, gc, tau_ab, tau_ac
    cdef bint in0, in1, in2

    # first pass: count cut triangles
    m = 0
    for t in range(ntri):
        g0 = phi[triangles[t, 0]] - d
        g1 = phi[triangles[t, 1]] - d
        g2 = phi[triangles[t, 2]] - d
        k = (1 if g0 > 0.0 else 0) + (1 if g1 > 0.0 else 0) + (1 if g2 > 0.0 else 0)
        if k == 1 or k == 2:
            m += 1
    cdef cnp.ndarray[cnp.int64_t, ndim=1] idx_arr = np.empty(m, dtype=np.int64)
    cdef cnp.ndarray[double, ndim=2] w0_arr = np.zeros((m, 3))
    cdef cnp.ndarray[double, ndim=2] w1_arr = np.zeros((m, 3))
    cdef cnp.int64_t[::1] idx = idx_arr
    cdef double[:, ::1] w0 = w0_arr
    cdef double[:, ::1] w1 = w1_arr

    m = 0
    for t in range(ntri):
        i0 = triangles[t, 0]; i1 = triangles[t, 1]; i2 = triangles[t, 2]
        g0 = phi[i0] - d; g1 = phi[i1] - d; g2 = phi[i2] - d
        in0 = g0 > 0.0; in1 = g1 > 0.0; in2 = g2 > 0.0
        k = (1 if in0 else 0) + (1 if in1 else 0) + (1 if in2 else 0)
        if k != 1 and k != 2:
            continue
        if k == 1:
            a = 0 if in0 else (1 if in1 else 2)
        else:
            a = 0 if not in0 else (1 if not in1 else 2)
        b = (a + 1) % 3
        c = (a + 2) % 3
        ga = g0 if a == 0 else (g1 if a == 1 else g2)
        gb = g0 if b == 0 else (g1 if b == 1 else g2)
        gc = g0 if c == 0 else (g1 if c == 1 else g2)
        tau_ab = ga / (ga - gb)
        tau_ac = ga / (ga - gc)
        idx[m] = t
        w0[m, a] = 1.0 - tau_ab
        w0[m, b] = tau_ab
        w1[m, a] = 1.0 - tau_ac
        w1[m, c] = tau_ac
        m += 1
    return idx_arr, w0_arr, w1_arr


def element_stiffness(double[:, ::1] vertices, int[:, ::1] triangles,
                      double[:, :, ::1] coefs):
    cdef Py_ssize_t ntri = triangles.shape[0]
    cdef cnp.ndarray[double, ndim=3] out_arr = np.empty((ntri, 3, 3))
    cdef double[:, :, ::1] out = out_arr
    cdef Py_ssize_t t
    cdef int i, j, jj, kk
    cdef int i0, i1, i2
    cdef double x0, y0, x1, y1, x2, y2, area, twoa
    cdef double gx[3]
    cdef double gy[3]
    cdef double px[3]
    cdef double py[3]
    cdef double c00, c01, c10, c11

    for t in range(ntri):
        i0 = triangles[t, 0]; i1 = triangles[t, 1]; i2 = triangles[t, 2]
        px[0] = vertices[i0, 0]; py[0] = vertices[i0, 1]
        px[1] = vertices[i1, 0]; py[1] = vertices[i1, 1]
        px[2] = vertices[i2, 0]; py[2] = vertices[i2, 1]
        area = 0.5 * ((px[1] - px[0]) * (py[2] - py[0]) - (py[1] - py[0]) * (px[2] - px[0]))
        twoa = 2.0 * area
        for i in range(3):
            jj = (i + 1) % 3
            kk = (i + 2) % 3
            gx[i] = -(py[kk] - py[jj]) / twoa
            gy[i] = (px[kk] - px[jj]) / twoa
        c00 = coefs[t, 0, 0]; c01 = coefs[t, 0, 1]
        c10 = coefs[t, 1, 0]; c11 = coefs[t, 1, 1]
        for i in range(3):
            for j in range(3):
                out[t, i, j] = area * (
                    gx[i] * (c00 * gx[j] + c01 * gy[j])
                    + gy[i] * (c10 * gx[j] + c11 * gy[j]))
    return out_arr
