"""NumPy implementations of the per-triangle kernels.

Semantics are shared with the compiled backend: every function receives raw
mesh arrays (vertices, triangles, per-vertex fields) and returns per-triangle
quantities; final reductions happen in the calling module so both backends
accumulate in the same order.  Expressions mirror the compiled code
operation for operation to keep results reproducible across backends.

The clipping primitive: the sub-level region {phi_h <= d} or super-level
region {phi_h > d} inside a triangle is either empty, the whole triangle,
or delimited by a chord cutting two edges at the "odd" vertex a (the unique
vertex on its own side).  With tau_ab = g_a/(g_a - g_b), g_i = phi_i - d,
the corner triangle at a has area A * tau_ab * tau_ac, which covers every
case by add/subtract against the full triangle.
"""

from __future__ import annotations

import numpy as np

_CHUNK = 1 << 19

name = "python"


def _tri_area(x0, y0, x1, y1, x2, y2):
    return 0.5 * ((x1 - x0) * (y2 - y0) - (y1 - y0) * (x2 - x0))


def _p1_moments(area, u0, u1, u2):
    """(integral of s, integral of s^2) of a linear field over a triangle."""
    s = u0 + u1 + u2
    q = u0 * u0 + u1 * u1 + u2 * u2
    return area * (s / 3.0), area * ((s * s + q) / 12.0)


def clip_table(vertices, triangles, phi, svals, d):
    """Per-triangle clipped area and P1 moments over {phi_h > d}.

    Returns (T, 3): columns are area, integral of s, integral of s^2 over
    the clipped polygon of each triangle (s linear with vertex values
    ``svals``; pass None to skip the moment columns).
    """
    ntri = triangles.shape[0]
    out = np.zeros((ntri, 3))
    has_s = svals is not None
    for lo in range(0, ntri, _CHUNK):
        tri = triangles[lo: lo + _CHUNK]
        px = vertices[tri, 0]
        py = vertices[tri, 1]
        f = phi[tri]
        s = svals[tri] if has_s else np.zeros_like(f)
        g = f - d
        inside = g > 0.0
        k = inside.sum(axis=1)

        area = _tri_area(px[:, 0], py[:, 0], px[:, 1], py[:, 1], px[:, 2], py[:, 2])
        full_is, full_is2 = _p1_moments(area, s[:, 0], s[:, 1], s[:, 2])

        block = out[lo: lo + _CHUNK]
        m3 = k == 3
        block[m3, 0] = area[m3]
        block[m3, 1] = full_is[m3]
        block[m3, 2] = full_is2[m3]

        cut = (k == 1) | (k == 2)
        if not cut.any():
            continue
        kc = k[cut]
        a = np.where(kc == 1, np.argmax(inside[cut], axis=1),
                     np.argmax(~inside[cut], axis=1))
        b = (a + 1) % 3
        c = (a + 2) % 3
        rows = np.arange(a.size)
        gcut = g[cut]
        scut = s[cut]
        ga, gb, gc = gcut[rows, a], gcut[rows, b], gcut[rows, c]
        tau_ab = ga / (ga - gb)
        tau_ac = ga / (ga - gc)
        a_corner = area[cut] * (tau_ab * tau_ac)
        ua = scut[rows, a]
        ub = ua + tau_ab * (scut[rows, b] - ua)
        uc = ua + tau_ac * (scut[rows, c] - ua)
        c_is, c_is2 = _p1_moments(a_corner, ua, ub, uc)

        one = kc == 1
        vals = np.where(one[:, None],
                        np.stack([a_corner, c_is, c_is2], axis=1),
                        np.stack([area[cut] - a_corner,
                                  full_is[cut] - c_is,
                                  full_is2[cut] - c_is2], axis=1))
        block[cut] = vals
    return out


def level_chords(vertices, triangles, phi, d):
    """Chord of {phi_h = d} in each cut triangle, as barycentric endpoints.

    Returns (idx, w0, w1): cut-triangle indices and the barycentric weights
    of the two chord endpoints (crossing towards vertex a+1 first, then
    towards a+2, with a the odd vertex out).
    """
    idx_parts, w0_parts, w1_parts = [], [], []
    ntri = triangles.shape[0]
    for lo in range(0, ntri, _CHUNK):
        tri = triangles[lo: lo + _CHUNK]
        g = phi[tri] - d
        inside = g > 0.0
        k = inside.sum(axis=1)
        cut = (k == 1) | (k == 2)
        if not cut.any():
            continue
        kc = k[cut]
        a = np.where(kc == 1, np.argmax(inside[cut], axis=1),
                     np.argmax(~inside[cut], axis=1))
        b = (a + 1) % 3
        c = (a + 2) % 3
        rows = np.arange(a.size)
        gcut = g[cut]
        ga, gb, gc = gcut[rows, a], gcut[rows, b], gcut[rows, c]
        tau_ab = ga / (ga - gb)
        tau_ac = ga / (ga - gc)
        w0 = np.zeros((a.size, 3))
        w1 = np.zeros((a.size, 3))
        w0[rows, a] = 1.0 - tau_ab
        w0[rows, b] = tau_ab
        w1[rows, a] = 1.0 - tau_ac
        w1[rows, c] = tau_ac
        idx_parts.append(lo + np.nonzero(cut)[0])
        w0_parts.append(w0)
        w1_parts.append(w1)
    if not idx_parts:
        return (np.empty(0, dtype=np.int64), np.empty((0, 3)), np.empty((0, 3)))
    return (np.concatenate(idx_parts).astype(np.int64),
            np.concatenate(w0_parts), np.concatenate(w1_parts))


def element_stiffness(vertices, triangles, coefs):
    """P1 element stiffness A * grad_i . (C grad_j), (T, 3, 3).

    ``coefs`` holds one symmetric 2x2 matrix per triangle (the assembled
    coefficient, e.g. gamma * sqrt(g) * G^{-1} at the centroid).
    """
    ntri = triangles.shape[0]
    out = np.empty((ntri, 3, 3))
    for lo in range(0, ntri, _CHUNK):
        tri = triangles[lo: lo + _CHUNK]
        px = vertices[tri, 0]
        py = vertices[tri, 1]
        area = _tri_area(px[:, 0], py[:, 0], px[:, 1], py[:, 1], px[:, 2], py[:, 2])
        twoa = 2.0 * area
        gx = np.empty_like(px)
        gy = np.empty_like(py)
        for i in range(3):
            j, k = (i + 1) % 3, (i + 2) % 3
            gx[:, i] = -(py[:, k] - py[:, j]) / twoa
            gy[:, i] = (px[:, k] - px[:, j]) / twoa
        c00 = coefs[lo: lo + _CHUNK, 0, 0]
        c01 = coefs[lo: lo + _CHUNK, 0, 1]
        c10 = coefs[lo: lo + _CHUNK, 1, 0]
        c11 = coefs[lo: lo + _CHUNK, 1, 1]
        block = out[lo: lo + _CHUNK]
        for i in range(3):
            for j in range(3):
                block[:, i, j] = area * (
                    gx[:, i] * (c00 * gx[:, j] + c01 * gy[:, j])
                    + gy[:, i] * (c10 * gx[:, j] + c11 * gy[:, j]))
    return out
