# cython: language_level=3
# cython: boundscheck=False
# cython: wraparound=False
"""Compiled stepping kernels, a bit-for-bit twin of etseek._kernel.

Keep every expression in the same shape and order as the pure loop; the
build passes -ffp-contract=off so no operation fuses. Cross-backend tests
assert exact float equality, not closeness.
"""

from libc.math cimport fabs, sin, sqrt

BACKEND = "compiled"


def run_loop(double q_star, double h_star, double theta_star, double a,
             double omega, double epsilon, double gain_k, double sigma,
             double alpha, double theta_hat0, Py_ssize_t n_iters):
    """Step the true closed loop n_iters times from k = 0.

    Same contract as etseek._kernel.run_loop.
    """
    cdef double we = omega * epsilon
    cdef double root_sigma = sqrt(sigma)
    cdef double th = theta_hat0
    cdef double held = 0.0
    cdef double s, theta, d, y, g, e, u
    cdef bint fired
    cdef Py_ssize_t k
    rows = []
    events = []
    for k in range(n_iters):
        s = a * sin(we * k)
        theta = th + s
        d = theta - theta_star
        y = q_star + 0.5 * h_star * (d * d)
        g = s * y
        if k == 0:
            held = g
            events.append((0, g))
        e = held - g
        fired = root_sigma * fabs(g) - alpha * fabs(e) < 0.0
        if fired:
            held = g
            events.append((k, g))
        u = -gain_k * held
        rows.append((th, theta, y, g, e, u, fired))
        th = th + epsilon * u
    return rows, events


def avg_loop(double h_star, double c_g, double c_t, double sigma,
             double alpha, double theta_tilde0, Py_ssize_t n_iters):
    """Step the averaged closed loop n_iters times from k = 0.

    Same contract as etseek._kernel.avg_loop.
    """
    cdef double root_sigma = sqrt(sigma)
    cdef double rho0 = 1.0 - c_g
    cdef double g = h_star * theta_tilde0
    cdef double tt = theta_tilde0
    cdef double held = g
    cdef double e, e_post
    cdef bint fired
    cdef Py_ssize_t k
    rows = []
    events = [(0, g)]
    for k in range(n_iters):
        e = held - g
        fired = root_sigma * fabs(g) - alpha * fabs(e) < 0.0
        if fired:
            held = g
            events.append((k, g))
            e_post = 0.0
        else:
            e_post = e
        rows.append((g, tt, held, e, fired))
        g = rho0 * g - c_g * e_post
        tt = rho0 * tt - c_t * e_post
    return rows, events
