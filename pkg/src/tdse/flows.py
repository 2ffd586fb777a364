"""Complex-arithmetic helpers for AC quantities and their partials.

Everything works on polar bus voltages V = v * exp(j*theta).  The derivative
matrices follow the usual complex construction: for S = diag(V) conj(Y V),

    dS/dtheta = j diag(V) conj(diag(I) - Y diag(V))
    dS/dv     = diag(V) conj(Y diag(V/|V|)) + diag(conj(I)) diag(V/|V|)

with I = Y V.  Real parts give active-power rows, imaginary parts reactive.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .network import NetworkCase


def polar(v: np.ndarray, theta: np.ndarray) -> np.ndarray:
    return v * np.exp(1j * theta)


def bus_injections(y: np.ndarray, vc: np.ndarray) -> np.ndarray:
    """Complex nodal injections S = V conj(Y V)."""
    return vc * np.conj(y @ vc)


def injection_derivatives(y: np.ndarray, vc: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Return (dS/dv, dS/dtheta) as dense complex matrices."""
    i_bus = y @ vc
    diag_v = np.diag(vc)
    diag_i = np.diag(i_bus)
    diag_vnorm = np.diag(vc / np.abs(vc))
    ds_dvm = diag_v @ np.conj(y @ diag_vnorm) + np.conj(diag_i) @ diag_vnorm
    ds_dva = 1j * diag_v @ np.conj(diag_i - y @ diag_v)
    return ds_dvm, ds_dva


@dataclass(frozen=True)
class BranchTerms:
    """Per-branch complex pi-model current coefficients.

    Current at the from end is ``cff*V_f + cft*V_t``; at the to end it is
    ``ctf*V_f + ctt*V_t``.
    """

    from_bus: np.ndarray
    to_bus: np.ndarray
    cff: np.ndarray
    cft: np.ndarray
    ctf: np.ndarray
    ctt: np.ndarray


def branch_terms(case: NetworkCase) -> BranchTerms:
    nb = len(case.branches)
    fb = np.empty(nb, dtype=int)
    tb = np.empty(nb, dtype=int)
    cff = np.empty(nb, dtype=complex)
    cft = np.empty(nb, dtype=complex)
    ctf = np.empty(nb, dtype=complex)
    ctt = np.empty(nb, dtype=complex)
    for i, br in enumerate(case.branches):
        ys = br.y_series
        ysh = 0.5j * br.b_sh
        fb[i], tb[i] = br.from_bus, br.to_bus
        cff[i] = (ys + ysh) / (br.tap * br.tap)
        cft[i] = -ys / br.tap
        ctf[i] = -ys / br.tap
        ctt[i] = ys + ysh
    return BranchTerms(fb, tb, cff, cft, ctf, ctt)


def branch_current(terms: BranchTerms, vc: np.ndarray, branch: int, end: str) -> complex:
    f, t = terms.from_bus[branch], terms.to_bus[branch]
    if end == "from":
        return terms.cff[branch] * vc[f] + terms.cft[branch] * vc[t]
    return terms.ctf[branch] * vc[f] + terms.ctt[branch] * vc[t]


def branch_flow(terms: BranchTerms, vc: np.ndarray, branch: int, end: str) -> complex:
    """Complex power entering the branch at the metering end."""
    bus = terms.from_bus[branch] if end == "from" else terms.to_bus[branch]
    return vc[bus] * np.conj(branch_current(terms, vc, branch, end))


def branch_flow_partials(
    terms: BranchTerms, vc: np.ndarray, branch: int, end: str
) -> tuple[int, int, complex, complex, complex, complex]:
    """Partials of the complex end flow S w.r.t. (v_a, v_b, th_a, th_b).

    ``a`` is the metering-end bus, ``b`` the far bus.  With
    S = |V_a|^2 conj(c1) + V_a conj(c2 V_b):

        dS/dth_a = +j * cross,   dS/dth_b = -j * cross
        dS/dv_a  = 2 v_a conj(c1) + cross / v_a
        dS/dv_b  = cross / v_b

    where cross = V_a conj(c2 V_b).
    """
    f, t = terms.from_bus[branch], terms.to_bus[branch]
    if end == "from":
        a, b = f, t
        c1, c2 = terms.cff[branch], terms.cft[branch]
    else:
        a, b = t, f
        c1, c2 = terms.ctt[branch], terms.ctf[branch]
    va, vb = np.abs(vc[a]), np.abs(vc[b])
    cross = vc[a] * np.conj(c2 * vc[b])
    ds_dva = 2.0 * va * np.conj(c1) + cross / va
    ds_dvb = cross / vb
    ds_dtha = 1j * cross
    ds_dthb = -1j * cross
    return a, b, ds_dva, ds_dvb, ds_dtha, ds_dthb
