"""Shared factories and frozen oracle values for the test suite.

Every constant in ``FROZEN`` was computed by an independent oracle (closed-form
geometric series, high-resolution Riemann sums, bisection localization of
extrema, direct evaluation of the published expressions) before being asserted
against the library; the tests check that the library reproduces them, not the
other way around.
"""
from __future__ import annotations

import math

import numpy as np

from qmemory import ModelParams, XState

# --- frozen oracle values ----------------------------------------------------

# Canonical parameter point used throughout: gamma=0.2, m=0.5, omega=0.8.
CANONICAL = ModelParams(gamma=0.2, m=0.5, omega=0.8)
N_CANONICAL = 0.2791824499586081          # interval-sum memory measure
N_CANONICAL_INTERVALS = 19
FIRST_GAIN = 0.2211461205366689           # first increase interval's gain
FIRST_GAIN_END = 3.620767488078661        # ... and the time it ends
N_OMEGA_01 = 5.845752310230492e-05        # omega = 0.1 (below 1e-3 threshold)
N_OMEGA_05 = 0.10302155415122126          # omega = 0.5
T_STAR = 1.9634954084936207               # pi / (2 omega): first distance zero
P_STAR = 0.13601546805850095              # both populations at t*, = (1 - e^{-pi/4})/4
E_PUBLISHED_T_STAR = 0.7829478427763598   # -2 p* log2 p*
E_SUBSYSTEM_T_STAR = 0.57370779479475     # binary entropy of p*
P_PLUS_T1 = 0.40779349894230055           # excited-start population at t = 1
P_MINUS_T1 = 0.08241998849109017          # ground-start population at t = 1
D_T1 = 0.3253735104512103                 # distance at t = 1
STEADY_PUBLISHED_M05 = 1.0                # -2 q log2 q at q = 1/4
STEADY_SUBSYSTEM_M05 = 0.8112781244591328  # binary entropy of 1/4
STEADY_SUBSYSTEM_M2 = 0.9709505944546686   # binary entropy of 0.4

# Maximization over product pairs at the canonical point: the winner is
# |10> vs |01>, whose distance curve is e^{-rate t} |cos 2 omega t|; the value
# is the truncated analytic series of its increase-interval gains.
N_MAXIMIZED_CANONICAL = 0.8643534521850287
MAXIMIZED_LABEL = "theta(0.0000,3.1416)/theta(3.1416,0.0000)"
MAXIMIZED_FIRST_START = math.pi / 3.2                     # pi / (4 omega)
MAXIMIZED_FIRST_END = (math.pi - math.atan(0.25)) / 1.6   # first peak after it
MAXIMIZED_FIRST_GAIN = 0.47026175746776266

# Published-solution probes (initial |10>, canonical parameters).
PUBLISHED_B0 = 1.5                        # printed formula at t = 0 (true: 1)
PUBLISHED_C0 = -0.5                       # printed formula at t = 0 (true: 0)
# Printed d(0) for b0=1, d0=0 is (2m+2)/(2m+1)^2 instead of 0:
PUBLISHED_D0 = {0.0: 2.0, 0.5: 0.75, 2.0: 0.24}
# At t = pi/omega the derived u = b - c completes one full 2*omega oscillation
# (value e^{-rate pi / omega}) while the printed formula, oscillating at
# omega, lands exactly on zero:
EXACT_U_AT_PI_OVER_OMEGA = 0.20787957635076193
PUBLISHED_U_AT_PI_OVER_OMEGA = 0.0


# --- deterministic random factories ------------------------------------------

def random_params(rng: np.random.Generator) -> ModelParams:
    """A random parameter set across the physically interesting ranges."""
    return ModelParams(
        gamma=float(rng.uniform(0.05, 1.0)),
        m=float(rng.uniform(0.0, 3.0)),
        omega=float(rng.uniform(0.0, 1.5)),
    )


def random_valid_xstate(rng: np.random.Generator, coherence_scale: float = 0.5) -> XState:
    """A random X state strictly inside the positivity region."""
    raw = rng.uniform(0.05, 1.0, 4)
    a, b, c, d = (raw / raw.sum()).tolist()
    z = complex(*rng.uniform(-1.0, 1.0, 2)) * coherence_scale * math.sqrt(b * c)
    w = complex(*rng.uniform(-1.0, 1.0, 2)) * coherence_scale * math.sqrt(a * d)
    return XState(a=a, b=b, c=c, d=d, z=z, w=w).validate()


def random_qubit_density(rng: np.random.Generator) -> np.ndarray:
    """A random single-qubit density matrix (mixed, full rank a.s.)."""
    mat = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    rho = mat @ mat.conj().T
    return rho / np.trace(rho).real


def random_density(rng: np.random.Generator, dim: int) -> np.ndarray:
    """A random full-rank density matrix of the given dimension."""
    mat = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = mat @ mat.conj().T
    return rho / np.trace(rho).real


def random_hermitian(rng: np.random.Generator, dim: int, scale: float = 1.0) -> np.ndarray:
    """A random Hermitian matrix with continuous spectrum (distinct a.s.)."""
    mat = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return scale * 0.5 * (mat + mat.conj().T)
