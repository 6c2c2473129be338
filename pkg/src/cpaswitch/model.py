"""Closed-form linear response of the two-sided atom-cavity system.

Everything here is vectorised over ``delta_p``: pass a scalar to get
scalars back, an array to get arrays of the same shape.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, SingularityError
from .params import ControlField, Dressing, DriveInputs, SystemParams

#: Below this |D| (in units of Gamma) the cavity denominator is treated as zero.
D_SINGULAR = 1e-14


@dataclass(frozen=True, eq=False)
class SusceptibilityTerms:
    d1: complex
    d2: complex
    sigma3: complex
    chi: complex


@dataclass(frozen=True, eq=False)
class FieldSolution:
    a: complex
    a_out_r: complex
    a_out_l: complex
    a_in_r: complex
    a_in_l: complex
    kappa_tau: float

    @property
    def i_in(self):
        i_in = np.maximum(np.abs(self.a_in_r) ** 2, np.abs(self.a_in_l) ** 2)
        if np.any(i_in == 0):
            raise InvalidInputError("normalised intensities need a nonzero input")
        return i_in

    @property
    def i_t_norm_r(self):
        return np.abs(self.a_out_r) ** 2 / self.i_in

    @property
    def i_t_norm_l(self):
        return np.abs(self.a_out_l) ** 2 / self.i_in

    @property
    def i_t_norm(self):
        """``(I_T/I_in)`` for the right and left output ports."""
        return self.i_t_norm_r, self.i_t_norm_l

    @property
    def i_cav_raw(self):
        return np.abs(self.a) ** 2 / self.i_in

    @property
    def i_cav_norm(self):
        """Intracavity intensity scaled by kappa*tau; equals 1 at perfect absorption."""
        return self.kappa_tau * self.i_cav_raw


def _check_nonzero(den, term: str):
    if np.any(den == 0):
        raise SingularityError(term, "zero-loss parameters at exact resonance")


def bare_responses(params: SystemParams, delta_p):
    """Undressed partial responses d1 and d2."""
    dp = np.asarray(delta_p, dtype=float)
    den1 = params.gamma13 - 2j * (dp + params.delta12)
    den2 = params.gamma23 - 2j * dp
    _check_nonzero(den1, "d1")
    _check_nonzero(den2, "d2")
    return 2.0 / den1, 2.0 / den2


def branch_responses(params: SystemParams, control: ControlField, delta_p):
    """Per-branch responses (r1, r2) after dressing, so chi = i g^2 N (r1 + r2).

    Also returns the bare (d1, d2) and the control term sigma3.
    """
    d1, d2 = bare_responses(params, delta_p)
    dp = np.asarray(delta_p, dtype=float)
    w2 = control.omega_sq
    if w2 == 0:
        zero = np.zeros_like(d1)
        return d1, d2, d1, d2, zero

    if control.dressing is Dressing.AS_PRINTED:
        den3 = params.gamma4 / 2 - 1j * (control.delta - dp) + w2 * d2
        _check_nonzero(den3, "sigma3")
        sigma3 = -np.conj(control.omega) * d2 / den3
        return d1, d2, d1, d2 + d2 * control.omega * sigma3, sigma3

    # control dresses |3>-|1>; written without the inner division so exact
    # two-photon resonance with gamma4 = 0 gives the finite limit r1 = 0
    two_photon = params.gamma4 - 2j * (dp - control.delta)
    den = two_photon * (params.gamma13 - 2j * (dp + params.delta12)) + 4 * w2
    _check_nonzero(den, "dressed d1")
    r1 = 2 * two_photon / den
    sigma3 = (r1 - d1) / (d1 * control.omega)
    return d1, d2, r1, d2, sigma3


def susceptibility(params: SystemParams, control: ControlField, delta_p) -> SusceptibilityTerms:
    """Atomic susceptibility chi (units of Gamma) and its partial terms."""
    if not np.all(np.isfinite(delta_p)):
        raise InvalidInputError("delta_p must be finite")
    d1, d2, r1, r2, sigma3 = branch_responses(params, control, delta_p)
    chi = 1j * params.g2n * (r1 + r2)
    return SusceptibilityTerms(d1=d1, d2=d2, sigma3=sigma3, chi=chi)


def cavity_denominator(params: SystemParams, control: ControlField, delta_p):
    """D = kappa + i(delta_c - delta_p) - i chi."""
    chi = susceptibility(params, control, delta_p).chi
    den = params.kappa + 1j * (params.delta_c - np.asarray(delta_p, dtype=float)) - 1j * chi
    if np.any(np.abs(den) < D_SINGULAR):
        raise SingularityError("cavity denominator D")
    return den


def steady_state_fields(params: SystemParams, control: ControlField,
                        drive: DriveInputs) -> FieldSolution:
    den = cavity_denominator(params, control, drive.delta_p)
    total_in = drive.a_in_r + drive.a_in_l
    stored = params.kappa * total_in / den
    a = np.sqrt(params.kappa / params.tau_rt) * total_in / den
    return FieldSolution(
        a=a,
        a_out_r=stored - drive.a_in_r,
        a_out_l=stored - drive.a_in_l,
        a_in_r=drive.a_in_r,
        a_in_l=drive.a_in_l,
        kappa_tau=params.kappa_tau,
    )


def normalized_spectrum_point(params: SystemParams, control: ControlField, delta_p):
    """(I_T/I_in, kappa*tau*|a|^2/I_in) for a symmetric unit drive."""
    den = cavity_denominator(params, control, delta_p)
    # symmetric unit drive: kappa*tau*|a|^2 = |2 kappa / D|^2 and a_out = 2 kappa/D - 1
    ratio = 2 * params.kappa / den
    return np.abs(ratio - 1) ** 2, np.abs(ratio) ** 2
