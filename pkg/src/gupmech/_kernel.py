"""Compiled Dormand-Prince 5(4) stepper for the GUP oscillator.

Kept separate so the numba compile cost is paid once per process (and cached
on disk).  The step size is clipped so that every output time is hit exactly;
the restoring stiffness may change between output intervals, which is how
oscillator frequency noise enters.
"""
import numpy as np
from numba import njit

# Dormand-Prince tableau
C2, C3, C4, C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
A21 = 1 / 5
A31, A32 = 3 / 40, 9 / 40
A41, A42, A43 = 44 / 45, -56 / 15, 32 / 9
A51, A52, A53, A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
A61, A62, A63, A64, A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
B1, B3, B4, B5, B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
E1, E3, E4, E5, E6, E7 = (71 / 57600, -71 / 16695, 71 / 1920, -17253 / 339200,
                          22 / 525, -1 / 40)

EPS = 2.220446049250313e-16

STATUS_OK = 0
STATUS_UNDERFLOW = 1
STATUS_MAXSTEPS = 2


@njit(cache=True)
def _f(x, p, m, w2, gamma, k3):
    return p / m + k3 * p * p * p, -m * w2 * x - gamma * p


@njit(cache=True)
def integrate_gup(x0, p0, times, w2, m, gamma, k3, rtol, xref, pref, hmin, max_steps):
    """Integrate and return (x, p, status, t_fail, n_steps).

    ``w2[i]`` is the squared angular frequency on ``[times[i], times[i+1])``.
    The error norm is relative to the reference amplitudes ``xref``/``pref``
    (plus the current magnitude), so steps do not collapse at zero crossings.
    """
    n = times.shape[0]
    xs = np.empty(n)
    ps = np.empty(n)
    xs[0] = x0
    ps[0] = p0
    x = x0
    p = p0
    t = times[0]
    h = (times[1] - times[0]) if n > 1 else 0.0
    steps = 0
    for i in range(n - 1):
        t_end = times[i + 1]
        wi = w2[i]
        k1x, k1p = _f(x, p, m, wi, gamma, k3)
        while t < t_end:
            if steps >= max_steps:
                xs[i + 1:] = np.nan
                ps[i + 1:] = np.nan
                return xs, ps, STATUS_MAXSTEPS, t, steps
            last = False
            if t + h >= t_end:
                h_try = t_end - t
                last = True
            else:
                h_try = h
            k2x, k2p = _f(x + h_try * A21 * k1x, p + h_try * A21 * k1p, m, wi, gamma, k3)
            k3x, k3p = _f(x + h_try * (A31 * k1x + A32 * k2x),
                          p + h_try * (A31 * k1p + A32 * k2p), m, wi, gamma, k3)
            k4x, k4p = _f(x + h_try * (A41 * k1x + A42 * k2x + A43 * k3x),
                          p + h_try * (A41 * k1p + A42 * k2p + A43 * k3p), m, wi, gamma, k3)
            k5x, k5p = _f(x + h_try * (A51 * k1x + A52 * k2x + A53 * k3x + A54 * k4x),
                          p + h_try * (A51 * k1p + A52 * k2p + A53 * k3p + A54 * k4p),
                          m, wi, gamma, k3)
            k6x, k6p = _f(x + h_try * (A61 * k1x + A62 * k2x + A63 * k3x + A64 * k4x + A65 * k5x),
                          p + h_try * (A61 * k1p + A62 * k2p + A63 * k3p + A64 * k4p + A65 * k5p),
                          m, wi, gamma, k3)
            xn = x + h_try * (B1 * k1x + B3 * k3x + B4 * k4x + B5 * k5x + B6 * k6x)
            pn = p + h_try * (B1 * k1p + B3 * k3p + B4 * k4p + B5 * k5p + B6 * k6p)
            k7x, k7p = _f(xn, pn, m, wi, gamma, k3)
            ex = h_try * (E1 * k1x + E3 * k3x + E4 * k4x + E5 * k5x + E6 * k6x + E7 * k7x)
            ep = h_try * (E1 * k1p + E3 * k3p + E4 * k4p + E5 * k5p + E6 * k6p + E7 * k7p)
            ax = max(abs(x), abs(xn))
            ap = max(abs(p), abs(pn))
            # a step cannot be more accurate than the rounding of the state itself
            ex = max(abs(ex), EPS * ax)
            ep = max(abs(ep), EPS * ap)
            sx = rtol * (xref + ax)
            sp = rtol * (pref + ap)
            err = np.sqrt(0.5 * ((ex / sx) ** 2 + (ep / sp) ** 2))
            steps += 1
            if err <= 1.0:
                t = t_end if last else t + h_try
                x = xn
                p = pn
                k1x = k7x
                k1p = k7p
                if err == 0.0:
                    fac = 5.0
                else:
                    fac = min(5.0, max(0.2, 0.9 * err ** -0.2))
                # a clipped final step says nothing about the natural step size
                if not last:
                    h = h_try * fac
            else:
                h = h_try * max(0.2, 0.9 * err ** -0.2)
                if h < hmin:
                    xs[i + 1:] = np.nan
                    ps[i + 1:] = np.nan
                    return xs, ps, STATUS_UNDERFLOW, t, steps
        xs[i + 1] = x
        ps[i + 1] = p
    return xs, ps, STATUS_OK, t, steps
