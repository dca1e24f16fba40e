"""Truncated lattice sums behind the theta evaluations.

Two implementations of every kernel: a numba loop (``*_jit``) and a
vectorized numpy version (``*_np``).  The public names dispatch on the
backend chosen in :mod:`ampletheta._accel`.

Each kernel returns the partial sum plus two rounding ingredients:
``abs_sum = sum |t_k|`` and ``arg_sum = sum a_k |t_k|`` where ``a_k`` bounds
the magnitude of the exponent pieces of term ``k`` (its absolute rounding
error is ``~ eps * a_k``).  The box sum is accumulated with compensated
summation in both backends, so its summation error is ``O(eps |S|)``.
"""

from __future__ import annotations

import math

import numpy as np

from ampletheta._accel import HAS_NUMBA, njit

TWO_PI_I = 2j * np.pi


# ---------------------------------------------------------------- g-dim box

def theta_box_np(tau, z, m, center, radius):
    g = tau.shape[0]
    axis = np.arange(-radius, radius + 1)
    grids = np.meshgrid(*([axis] * g), indexing="ij")
    q = np.stack([gr.ravel() for gr in grids], axis=1) + center[None, :]
    v = q + m[None, :]
    quad = 0.5 * np.einsum("ni,ij,nj->n", v, tau, v)
    lin = v @ z
    terms = np.exp(TWO_PI_I * (quad + lin))
    mag = np.abs(terms)
    pieces = 2 * np.pi * (0.5 * np.einsum("ni,ij,nj->n", np.abs(v), np.abs(tau), np.abs(v))
                          + np.abs(v) @ np.abs(z))
    total = complex(math.fsum(terms.real), math.fsum(terms.imag))
    return total, float(mag.sum()), float((pieces * mag).sum())


@njit(cache=True)
def theta_box_jit(tau, z, m, center, radius):
    g = tau.shape[0]
    offs = np.full(g, -radius, dtype=np.int64)
    v = np.empty(g)
    sr = 0.0
    si = 0.0
    cr = 0.0
    ci = 0.0
    abs_total = 0.0
    arg_total = 0.0
    while True:
        for i in range(g):
            v[i] = center[i] + offs[i] + m[i]
        acc = 0j
        a = 0.0
        for i in range(g):
            acc += v[i] * z[i]
            a += abs(v[i]) * abs(z[i])
            acc += 0.5 * v[i] * v[i] * tau[i, i]
            a += 0.5 * v[i] * v[i] * abs(tau[i, i])
            for j in range(i + 1, g):
                acc += v[i] * v[j] * tau[i, j]
                a += abs(v[i] * v[j]) * abs(tau[i, j])
        t = np.exp(2j * np.pi * acc)
        at = abs(t)
        abs_total += at
        arg_total += 2 * np.pi * a * at
        # Neumaier compensated summation, real and imaginary parts separately
        x = t.real
        s_new = sr + x
        if abs(sr) >= abs(x):
            cr += (sr - s_new) + x
        else:
            cr += (x - s_new) + sr
        sr = s_new
        x = t.imag
        s_new = si + x
        if abs(si) >= abs(x):
            ci += (si - s_new) + x
        else:
            ci += (x - s_new) + si
        si = s_new
        # odometer increment
        k = 0
        while k < g:
            offs[k] += 1
            if offs[k] <= radius:
                break
            offs[k] = -radius
            k += 1
        if k == g:
            break
    return complex(sr + cr, si + ci), abs_total, arg_total


# ------------------------------------------------------- one-variable family

def vartheta_grid_np(tau, zs, d, radius, deriv):
    """``out[n, k] = sum_q e(1/2 (q + k/d)^2 tau + (q + k/d) zs[n])`` (times
    ``2 pi i (q + k/d)`` when ``deriv``), box centred per ``(n, k)``."""
    zs = np.asarray(zs, dtype=complex)
    frac = np.arange(d) / d
    c = -zs.imag / tau.imag
    q0 = np.rint(c[:, None] - frac[None, :])
    offs = np.arange(-radius, radius + 1)
    v = q0[:, :, None] + offs[None, None, :] + frac[None, :, None]
    terms = np.exp(TWO_PI_I * (0.5 * v * v * tau + v * zs[:, None, None]))
    if deriv:
        terms = terms * (TWO_PI_I * v)
    mag = np.abs(terms)
    pieces = 2 * np.pi * (0.5 * v * v * abs(tau) + np.abs(v) * np.abs(zs)[:, None, None])
    return terms.sum(axis=2), mag.sum(axis=2), (pieces * mag).sum(axis=2)


@njit(cache=True)
def vartheta_grid_jit(tau, zs, d, radius, deriv):
    n = zs.shape[0]
    out = np.empty((n, d), dtype=np.complex128)
    abs_out = np.empty((n, d))
    arg_out = np.empty((n, d))
    lam = tau.imag
    atau = abs(tau)
    for a in range(n):
        z = zs[a]
        az = abs(z)
        c = -z.imag / lam
        for k in range(d):
            frac = k / d
            q0 = np.rint(c - frac)
            s = 0j
            sa = 0.0
            sg = 0.0
            for o in range(-radius, radius + 1):
                v = q0 + o + frac
                t = np.exp(2j * np.pi * (0.5 * v * v * tau + v * z))
                if deriv:
                    t = t * (2j * np.pi * v)
                s += t
                at = abs(t)
                sa += at
                sg += 2 * np.pi * (0.5 * v * v * atau + abs(v) * az) * at
            out[a, k] = s
            abs_out[a, k] = sa
            arg_out[a, k] = sg
    return out, abs_out, arg_out


def theta_box(tau, z, m, center, radius):
    """``(sum, sum |t|, sum a_k |t_k|)`` over the box ``center + [-radius, radius]^g``."""
    tau = np.ascontiguousarray(tau, dtype=np.complex128)
    z = np.ascontiguousarray(z, dtype=np.complex128)
    m = np.ascontiguousarray(m, dtype=np.float64)
    center = np.ascontiguousarray(center, dtype=np.int64)
    if HAS_NUMBA:
        return theta_box_jit(tau, z, m, center, int(radius))
    return theta_box_np(tau, z, m, center, int(radius))


def vartheta_grid(tau, zs, d, radius, deriv=False):
    """Arrays ``(values, abs_sums, arg_sums)`` of shape ``(len(zs), d)``."""
    zs = np.ascontiguousarray(np.atleast_1d(zs), dtype=np.complex128)
    if HAS_NUMBA:
        return vartheta_grid_jit(complex(tau), zs, int(d), int(radius), bool(deriv))
    return vartheta_grid_np(complex(tau), zs, int(d), int(radius), bool(deriv))
