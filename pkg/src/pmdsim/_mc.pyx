# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled trajectory kernels: exact per-segment SU(2) maps.

Same contracts as the fallback module; the segment/trajectory loops run
without the GIL.
"""

from libc.math cimport cos, sin, sqrt

BACKEND = "cython"


cdef inline void _apply_su2(double complex* c1, double complex* c0,
                            double half, double n1, double n2, double n3) noexcept nogil:
    cdef double ct = cos(half)
    cdef double st = sin(half)
    cdef double complex u11 = ct - 1j * st * n3
    cdef double complex u12 = -st * n2 - 1j * st * n1
    cdef double complex u21 = st * n2 - 1j * st * n1
    cdef double complex u22 = ct + 1j * st * n3
    cdef double complex a = c1[0]
    cdef double complex b = c0[0]
    c1[0] = u11 * a + u12 * b
    c0[0] = u21 * a + u22 * b


def evolve_single_batch(double complex[:, :, ::1] c,
                        double[:, :, ::1] noise,
                        double[::1] f,
                        double dz):
    """c: (B, n, 2) in place; noise: (B, S, 3); f: (n,)."""
    cdef Py_ssize_t nb = c.shape[0]
    cdef Py_ssize_t nn = c.shape[1]
    cdef Py_ssize_t ns = noise.shape[1]
    cdef Py_ssize_t t, k, j
    cdef double b1, b2, b3, bn, n1, n2, n3
    with nogil:
        for t in range(nb):
            for k in range(ns):
                b1 = noise[t, k, 0]
                b2 = noise[t, k, 1]
                b3 = noise[t, k, 2]
                bn = sqrt(b1 * b1 + b2 * b2 + b3 * b3)
                if bn == 0.0:
                    continue
                n1 = b1 / bn
                n2 = b2 / bn
                n3 = b3 / bn
                for j in range(nn):
                    _apply_su2(&c[t, j, 0], &c[t, j, 1],
                               0.5 * f[j] * bn * dz, n1, n2, n3)


def evolve_two_batch(double complex[:, :, :, ::1] c,
                     double[:, :, ::1] noise_a,
                     double[:, :, ::1] noise_b,
                     double[::1] f_a,
                     double[::1] f_b,
                     double dz):
    """c: (B, P, 2, 2) in place; photon A acts on the left index."""
    cdef Py_ssize_t nb = c.shape[0]
    cdef Py_ssize_t np_ = c.shape[1]
    cdef Py_ssize_t ns = noise_a.shape[1]
    cdef Py_ssize_t t, k, p
    cdef double a1, a2, a3, an, na1, na2, na3
    cdef double g1, g2, g3, gn, nb1, nb2, nb3
    cdef double ha, hb, cta, sta, ctb, stb
    cdef double complex a11, a12, a21, a22
    cdef double complex b11, b12, b21, b22
    cdef double complex c00, c01, c10, c11, d00, d01, d10, d11
    with nogil:
        for t in range(nb):
            for k in range(ns):
                a1 = noise_a[t, k, 0]
                a2 = noise_a[t, k, 1]
                a3 = noise_a[t, k, 2]
                an = sqrt(a1 * a1 + a2 * a2 + a3 * a3)
                if an > 0.0:
                    na1 = a1 / an
                    na2 = a2 / an
                    na3 = a3 / an
                else:
                    na1 = na2 = na3 = 0.0
                g1 = noise_b[t, k, 0]
                g2 = noise_b[t, k, 1]
                g3 = noise_b[t, k, 2]
                gn = sqrt(g1 * g1 + g2 * g2 + g3 * g3)
                if gn > 0.0:
                    nb1 = g1 / gn
                    nb2 = g2 / gn
                    nb3 = g3 / gn
                else:
                    nb1 = nb2 = nb3 = 0.0
                for p in range(np_):
                    ha = 0.5 * f_a[p] * an * dz
                    hb = 0.5 * f_b[p] * gn * dz
                    cta = cos(ha)
                    sta = sin(ha)
                    ctb = cos(hb)
                    stb = sin(hb)
                    a11 = cta - 1j * sta * na3
                    a12 = -sta * na2 - 1j * sta * na1
                    a21 = sta * na2 - 1j * sta * na1
                    a22 = cta + 1j * sta * na3
                    b11 = ctb - 1j * stb * nb3
                    b12 = -stb * nb2 - 1j * stb * nb1
                    b21 = stb * nb2 - 1j * stb * nb1
                    b22 = ctb + 1j * stb * nb3
                    c00 = c[t, p, 0, 0]
                    c01 = c[t, p, 0, 1]
                    c10 = c[t, p, 1, 0]
                    c11 = c[t, p, 1, 1]
                    d00 = a11 * c00 + a12 * c10
                    d01 = a11 * c01 + a12 * c11
                    d10 = a21 * c00 + a22 * c10
                    d11 = a21 * c01 + a22 * c11
                    c[t, p, 0, 0] = d00 * b11 + d01 * b12
                    c[t, p, 0, 1] = d00 * b21 + d01 * b22
                    c[t, p, 1, 0] = d10 * b11 + d11 * b12
                    c[t, p, 1, 1] = d10 * b21 + d11 * b22
