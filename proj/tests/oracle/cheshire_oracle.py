#!/usr/bin/env python3
# Copyright 2026 The Cheshire Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Independent numpy oracle for the values frozen into the C++ tests.

Builds states with np.kron in spin (x) path order, then permutes into the
library's [up I, down I, up II, down II] order, so the arithmetic path is
unrelated to the C++ implementation.
"""

import numpy as np

up = np.array([1, 0], complex)
dn = np.array([0, 1], complex)
px = (up + dn) / np.sqrt(2)
mx = (up - dn) / np.sqrt(2)
pI = np.array([1, 0], complex)
pII = np.array([0, 1], complex)
sz = np.diag([1, -1]).astype(complex)
i2 = np.eye(2, dtype=complex)
PI = np.diag([1, 0]).astype(complex)
PII = np.diag([0, 1]).astype(complex)

# np.kron(spin, path) gives order [up I, up II, down I, down II].
perm = [0, 2, 1, 3]


def ket(spin, path):
    return np.kron(spin, path)[perm]


def op(s, p):
    m = np.kron(s, p)
    return m[np.ix_(perm, perm)]


psi_i = (ket(px, pI) + ket(mx, pII)) / np.sqrt(2)


def psi_f(chi):
    return np.kron(mx, (pI + np.exp(-1j * chi) * pII) / np.sqrt(2))[perm]


def h_states(chi):
    path = (pI - np.exp(-1j * chi) * pII) / np.sqrt(2)
    return [np.kron(up, path)[perm], np.kron(dn, path)[perm]]


def wv(pre, post, A):
    return np.vdot(post, A @ pre) / np.vdot(post, pre)


def absorber(T, path):
    P = PI if path == 1 else PII
    return op(i2, np.eye(2) - P + np.sqrt(T) * P)


def larmor(alpha, path):
    P = PI if path == 1 else PII
    U = np.diag([np.exp(1j * alpha / 2), np.exp(-1j * alpha / 2)])
    return op(U, P) + op(i2, np.eye(2) - P)


def o_rate(U, chi, flux):
    return flux * abs(np.vdot(psi_f(chi), U @ psi_i)) ** 2


def h_rate(U, chi, flux):
    return flux * sum(abs(np.vdot(h, U @ psi_i)) ** 2 for h in h_states(chi))


def extract_pop(iref, iabs, T):
    return (1 - iabs / iref) / (2 * (1 - np.sqrt(T)))


def extract_spin(iref, imag, alpha, path):
    a = alpha * alpha / 4
    r = imag / iref
    return (r - 1) / a if path == 1 else (r - 1 + a) / a


if __name__ == "__main__":
    print("psi_i", psi_i.real)
    print("psi_f(0)", psi_f(0).real)
    print("<f|i>", np.vdot(psi_f(0), psi_i))
    for name, A in [("Pi_I", op(i2, PI)), ("Pi_II", op(i2, PII)),
                    ("szPi_I", op(sz, PI)), ("szPi_II", op(sz, PII)),
                    ("sz", op(sz, i2))]:
        print(name, wv(psi_i, psi_f(0), A))
    print("szPi_I psi_i", op(sz, PI) @ psi_i)
    print("abs norm", np.linalg.norm(absorber(0.79, 1) @ psi_i) ** 2)
    al = np.deg2rad(20)
    print("alpha", al, "cos(a/2)", np.cos(al / 2))
    print("|<psi_i|U_I psi_i>|", abs(np.vdot(psi_i, larmor(al, 1) @ psi_i)))
    flux = 45.0
    ref = o_rate(np.eye(4), 0, flux)
    rates = {}
    for lab, U in [("REF", np.eye(4)), ("ABS_I", absorber(0.79, 1)),
                   ("ABS_II", absorber(0.79, 2)), ("MAG_I", larmor(al, 1)),
                   ("MAG_II", larmor(al, 2))]:
        rates[lab] = o_rate(U, 0, flux)
        print(lab, "O(0)", rates[lab], "ratio", rates[lab] / ref,
              "H(0)", h_rate(U, 0, flux), "H(pi/2)", h_rate(U, np.pi / 2, flux))
    s = np.sin(al / 2)
    print("MAG_I contrast", 2 * s / (1 + s * s))
    print("analytic estimates",
          extract_pop(ref, rates["ABS_I"], 0.79),
          extract_pop(ref, rates["ABS_II"], 0.79),
          extract_spin(ref, rates["MAG_I"], al, 1),
          extract_spin(ref, rates["MAG_II"], al, 2))
    print("measured-intensity estimates",
          extract_pop(11.25, 10.90, 0.79), extract_pop(11.25, 8.83, 0.79),
          extract_spin(11.25, 11.59, al, 1), extract_spin(11.25, 10.97, al, 2))

    # Monte-Carlo oracle for the propagated sigmas of the measured intensities.
    rng = np.random.default_rng(12345)
    n = 1_000_000
    iref = rng.normal(11.25, 0.05, n)
    for lab, iv, sv in [("ABS_I", 10.90, 0.09), ("ABS_II", 8.83, 0.08)]:
        x = extract_pop(iref, rng.normal(iv, sv, n), rng.normal(0.79, 0.01, n))
        print("MC sigma", lab, x.std())
    for lab, iv, sv, p in [("MAG_I", 11.59, 0.06, 1), ("MAG_II", 10.97, 0.06, 2)]:
        x = extract_spin(iref, rng.normal(iv, sv, n), al, p)
        print("MC sigma", lab, x.std())
    w = np.array([1 / 0.1**2, 1 / 0.3**2])
    print("aggregate", (w @ [1.0, 0.0]) / w.sum(), w.sum() ** -0.5)
