"""Domain types shared by every solver.

All rates and detunings are dimensionless, measured in units of the natural
linewidth Gamma (hbar = 1).  The only physical anchor is ``gamma_mhz``, used
when widths are converted to MHz and switching times to microseconds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace
from enum import Enum

import numpy as np

from .errors import InvalidInputError

#: Default single-atom coupling; only the collective coupling enters the
#: linear response, the split into g and N sets the saturation scale.
DEFAULT_G_SINGLE = 0.01
DEFAULT_MIRROR_T = 0.02


def _finite(name: str, value) -> None:
    if not np.all(np.isfinite(value)):
        raise InvalidInputError(f"{name} must be finite, got {value!r}")


class Dressing(str, Enum):
    """Which bare atomic response the control field dresses.

    ``AS_PRINTED`` attaches the control term to the |3>-|2> branch exactly as
    the susceptibility is usually written for this scheme; ``TRANSITION1``
    dresses the |3>-|1> branch, which is where the |4>-|1> control physically
    acts and what the amplitude equations of the nonlinear solver embody.
    """

    AS_PRINTED = "as_printed"
    TRANSITION1 = "transition1"

    @classmethod
    def parse(cls, text: str) -> "Dressing":
        key = text.strip().lower().replace("-", "_")
        aliases = {"asprinted": "as_printed", "transition_1": "transition1"}
        key = aliases.get(key, key)
        try:
            return cls(key)
        except ValueError:
            raise InvalidInputError(
                f"unknown dressing {text!r}; expected one of "
                + ", ".join(d.value for d in cls)
            ) from None


@dataclass(frozen=True)
class SystemParams:
    """Cavity and atom parameters.

    Exactly one of ``n_atoms`` / derived-from-``g_coll`` is authoritative:
    when ``n_atoms`` is omitted it is chosen as the integer nearest to
    ``(g_coll / g_single)**2`` and ``g_single`` is nudged so that
    ``g_coll`` is reproduced exactly.  Of ``kappa``, ``mirror_t`` and
    ``tau_rt`` any two determine the third (``kappa = mirror_t / tau_rt``).
    """

    kappa: float = 1.0
    delta12: float = 10.0
    delta_c: float = -5.0
    g_coll: float = 5.0
    g_single: float = DEFAULT_G_SINGLE
    n_atoms: int | None = None
    gamma13: float = 1.0
    gamma23: float = 1.0
    gamma4: float = 0.0
    mirror_t: float | None = None
    tau_rt: float | None = None
    gamma_mhz: float = 6.07
    gamma: float = field(default=1.0, init=False)

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if v is not None:
                _finite(f.name, v)

        if self.kappa <= 0:
            raise InvalidInputError("kappa must be > 0")
        if self.gamma_mhz <= 0:
            raise InvalidInputError("gamma_mhz must be > 0")
        for name in ("gamma13", "gamma23", "gamma4"):
            if getattr(self, name) < 0:
                raise InvalidInputError(f"{name} must be >= 0")
        if self.g_coll < 0:
            raise InvalidInputError("g_coll must be >= 0")
        if self.g_single < 0:
            raise InvalidInputError("g_single must be >= 0")

        self._resolve_mirror()
        self._resolve_atoms()

    def _resolve_mirror(self):
        k, t, tau = self.kappa, self.mirror_t, self.tau_rt
        if t is None and tau is None:
            t = DEFAULT_MIRROR_T
        if t is None:
            t = k * tau
        elif tau is None:
            tau = t / k
        if t <= 0:
            raise InvalidInputError("mirror_t must be > 0")
        if tau <= 0:
            raise InvalidInputError("tau_rt must be > 0")
        if abs(k - t / tau) > 1e-12 * k:
            raise InvalidInputError(
                f"kappa must equal mirror_t / tau_rt (got {k} vs {t / tau})"
            )
        object.__setattr__(self, "mirror_t", float(t))
        object.__setattr__(self, "tau_rt", float(tau))

    def _resolve_atoms(self):
        g, gn, n = self.g_single, self.g_coll, self.n_atoms
        if n is None:
            if gn == 0:
                object.__setattr__(self, "n_atoms", 1)
                object.__setattr__(self, "g_single", 0.0)
                return
            if g == 0:
                g = DEFAULT_G_SINGLE
            n = max(1, round((gn / g) ** 2))
            object.__setattr__(self, "n_atoms", int(n))
            object.__setattr__(self, "g_single", gn / math.sqrt(n))
            return
        if int(n) != n or n < 1:
            raise InvalidInputError("n_atoms must be a positive integer")
        object.__setattr__(self, "n_atoms", int(n))
        expected = g * g * n
        if abs(gn * gn - expected) > 1e-12 * max(expected, gn * gn, 1e-300):
            raise InvalidInputError(
                "g_coll**2 must equal g_single**2 * n_atoms "
                f"({gn**2} vs {expected})"
            )

    @classmethod
    def from_atoms(cls, g_single: float, n_atoms: int, **kwargs) -> "SystemParams":
        return cls(g_single=g_single, n_atoms=n_atoms,
                   g_coll=g_single * math.sqrt(n_atoms), **kwargs)

    def evolve(self, **changes) -> "SystemParams":
        """Copy with changes, re-deriving whatever the changes invalidate."""
        if "g_coll" in changes and "n_atoms" not in changes:
            changes["n_atoms"] = None
        if ("g_single" in changes and "n_atoms" not in changes
                and "g_coll" not in changes):
            changes["n_atoms"] = None
        if {"kappa", "tau_rt"} & changes.keys() and "mirror_t" not in changes:
            changes["mirror_t"] = None
        if "mirror_t" in changes and "tau_rt" not in changes and "kappa" not in changes:
            changes["tau_rt"] = None
        return replace(self, **changes)

    @property
    def g2n(self) -> float:
        """Collective coupling squared, g**2 N."""
        return self.g_coll * self.g_coll

    @property
    def kappa_tau(self) -> float:
        return self.kappa * self.tau_rt

    @property
    def unit_linewidth_decays(self) -> bool:
        return self.gamma13 == self.gamma and self.gamma23 == self.gamma

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self) if f.init}


@dataclass(frozen=True)
class ControlField:
    omega: complex = 0.0
    delta: float = 0.0
    dressing: Dressing = Dressing.AS_PRINTED

    def __post_init__(self):
        _finite("omega", self.omega)
        _finite("delta", self.delta)
        if not isinstance(self.dressing, Dressing):
            object.__setattr__(self, "dressing", Dressing.parse(str(self.dressing)))

    @property
    def omega_sq(self) -> float:
        return float(abs(self.omega)) ** 2

    @property
    def is_on(self) -> bool:
        return self.omega != 0

    def off(self) -> "ControlField":
        return replace(self, omega=0.0)

    def evolve(self, **changes) -> "ControlField":
        return replace(self, **changes)


@dataclass(frozen=True, eq=False)
class DriveInputs:
    """Input amplitudes at the two mirrors and the signal detuning.

    ``delta_p`` may be an array; amplitudes broadcast against it.
    """

    a_in_r: complex = 1.0
    a_in_l: complex = 1.0
    delta_p: float = 0.0

    def __post_init__(self):
        _finite("a_in_r", self.a_in_r)
        _finite("a_in_l", self.a_in_l)
        _finite("delta_p", self.delta_p)

    @property
    def i_in(self):
        """Reference input intensity: the larger of the two port intensities."""
        return np.maximum(np.abs(self.a_in_r) ** 2, np.abs(self.a_in_l) ** 2)

    def swapped(self) -> "DriveInputs":
        return DriveInputs(self.a_in_l, self.a_in_r, self.delta_p)
