"""Standing-wave family and the exact radial exponential-sum function class.

States live on R^3 in the two-component split u ~ (u1, u2) = (Re u, Im u).
Each component is a finite sum

    sum_j  a_j * r**k_j * exp(-mu_j * r) / (4 pi r),      r = |x|,

with complex amplitudes a_j in C^2, complex rates mu_j (Re mu_j > 0 for
square-integrable states) and integer powers k_j >= 0.  The class is exact:
every function appearing in the analysis (wave profile, discrete and
generalized eigenfunctions, resolvent images, omega-derivatives) is a finite
sum of this form, and all pairings reduce to Gamma-function moments.

Conventions fixed here and used throughout the package:
  * J = [[0, 1], [-1, 0]]; multiplication of the physical field by i is -J.
  * (q, p) = q1 p1 + q2 p2 is the bilinear (unconjugated) charge pairing.
  * (u, v)_L2 = int u . conj(v) is Hermitian, linear in u.
  * Omega(u, v) = int (u2 v1 - u1 v2) is bilinear; for physical (real-pair)
    states it equals Im int u conj(v) of the complex scalar fields.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

FOURPI = 4.0 * math.pi

J_MAT = np.array([[0.0, 1.0], [-1.0, 0.0]])
I_MAT = -J_MAT  # multiplication by i of the physical complex field

_MERGE_TOL = 1e-13
_SIGMA_GUARD = 1e-6  # conditioning guard at the regime endpoints


class DomainError(ValueError):
    """Parameter outside the regime required by the requested operation."""


class NonIntegrableError(ValueError):
    """A pairing or norm does not converge for the given rates."""


class NumericalError(RuntimeError):
    """A numerical procedure failed to reach its tolerance."""


# ---------------------------------------------------------------------------
# parameters and charges
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ModelParams:
    """Nonlinearity power sigma in (0,1), coupling nu > 0, frequency omega > 0."""

    sigma: float
    nu: float = 1.0
    omega: float = 1.0

    def __post_init__(self):
        if not (0.0 < self.sigma < 1.0):
            raise DomainError(f"sigma must lie in (0, 1), got {self.sigma}")
        if self.nu <= 0.0:
            raise DomainError(f"nu must be positive, got {self.nu}")
        if self.omega <= 0.0:
            raise DomainError(f"omega must be positive, got {self.omega}")

    def require_internal_modes(self):
        """Reject parameters outside the purely-imaginary-eigenvalue regime."""
        s0 = 1.0 / math.sqrt(2.0)
        if not (s0 < self.sigma < 1.0):
            raise DomainError(
                f"sigma={self.sigma} outside ({s0:.6f}, 1): no internal modes")
        if self.sigma - s0 < _SIGMA_GUARD or 1.0 - self.sigma < _SIGMA_GUARD:
            raise DomainError(
                f"sigma={self.sigma} within {_SIGMA_GUARD} of a regime endpoint")

    def with_omega(self, omega: float) -> "ModelParams":
        return ModelParams(self.sigma, self.nu, omega)


@dataclass(frozen=True)
class Charge2:
    """Two-component complex charge with the bilinear pairing (q,p)=q1 p1+q2 p2."""

    q1: complex
    q2: complex

    @property
    def vec(self) -> np.ndarray:
        return np.array([self.q1, self.q2], dtype=complex)

    @staticmethod
    def from_vec(v) -> "Charge2":
        v = np.asarray(v, dtype=complex)
        return Charge2(complex(v[0]), complex(v[1]))

    def pair(self, other: "Charge2") -> complex:
        return self.q1 * other.q1 + self.q2 * other.q2

    def conj(self) -> "Charge2":
        return Charge2(np.conj(self.q1), np.conj(self.q2))

    def __add__(self, other):
        return Charge2(self.q1 + other.q1, self.q2 + other.q2)

    def __mul__(self, z):
        return Charge2(z * self.q1, z * self.q2)

    __rmul__ = __mul__


def charge_pair(q, p) -> complex:
    """Bilinear pairing of two charge vectors (arrays or Charge2)."""
    qv = q.vec if isinstance(q, Charge2) else np.asarray(q, dtype=complex)
    pv = p.vec if isinstance(p, Charge2) else np.asarray(p, dtype=complex)
    return complex(qv[0] * pv[0] + qv[1] * pv[1])


def re_pair(x, q) -> float:
    """Re sum_i x_i conj(q_i), the real pairing used in the expansions."""
    xv = x.vec if isinstance(x, Charge2) else np.asarray(x, dtype=complex)
    qv = q.vec if isinstance(q, Charge2) else np.asarray(q, dtype=complex)
    return float(np.real(xv[0] * np.conj(qv[0]) + xv[1] * np.conj(qv[1])))


# ---------------------------------------------------------------------------
# exponential sums
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Term:
    amp: np.ndarray  # shape (2,), complex
    mu: complex
    k: int


class RadialExpSum:
    """Finite sum of a * r^k * exp(-mu r) / (4 pi r) with C^2 amplitudes."""

    __slots__ = ("terms",)

    def __init__(self, terms: Iterable[Term] = (), merge: bool = True):
        ts = [Term(np.asarray(t.amp, dtype=complex).reshape(2), complex(t.mu), int(t.k))
              for t in terms]
        if merge:
            ts = _merge_terms(ts)
        object.__setattr__(self, "terms", tuple(ts))

    # -- constructors -------------------------------------------------------

    @staticmethod
    def point(amp, mu: complex, k: int = 0) -> "RadialExpSum":
        return RadialExpSum([Term(np.asarray(amp, dtype=complex), mu, k)])

    @staticmethod
    def zero() -> "RadialExpSum":
        return RadialExpSum([])

    # -- linear structure ----------------------------------------------------

    def __add__(self, other: "RadialExpSum") -> "RadialExpSum":
        return RadialExpSum(list(self.terms) + list(other.terms))

    def __sub__(self, other: "RadialExpSum") -> "RadialExpSum":
        return self + other.scale(-1.0)

    def scale(self, z: complex) -> "RadialExpSum":
        """Componentwise scalar multiple (the complexified z * u)."""
        return RadialExpSum([Term(z * t.amp, t.mu, t.k) for t in self.terms],
                            merge=False)

    def apply_matrix(self, m) -> "RadialExpSum":
        m = np.asarray(m)
        return RadialExpSum([Term(m @ t.amp, t.mu, t.k) for t in self.terms],
                            merge=False)

    def times_j(self) -> "RadialExpSum":
        return self.apply_matrix(J_MAT)

    def times_i(self) -> "RadialExpSum":
        """Multiplication of the physical field by the imaginary unit."""
        return self.apply_matrix(I_MAT)

    def star(self) -> "RadialExpSum":
        """Second-component flip (u1, u2) -> (u1, -u2)."""
        return RadialExpSum([Term(np.array([t.amp[0], -t.amp[1]]), t.mu, t.k)
                             for t in self.terms], merge=False)

    def conjugate(self) -> "RadialExpSum":
        """Termwise complex conjugation of amplitudes and rates."""
        return RadialExpSum([Term(np.conj(t.amp), np.conj(t.mu), t.k)
                             for t in self.terms], merge=False)

    # -- structure queries ---------------------------------------------------

    @property
    def is_square_integrable(self) -> bool:
        return all(t.mu.real > 0.0 for t in self.terms)

    def charge(self) -> Charge2:
        q = np.zeros(2, dtype=complex)
        for t in self.terms:
            if t.k == 0:
                q += t.amp
        return Charge2.from_vec(q)

    def regular_part_at_zero(self) -> np.ndarray:
        """phi(0) per component, phi = u - q G0 with G0 = 1/(4 pi r)."""
        val = np.zeros(2, dtype=complex)
        for t in self.terms:
            if t.k == 0:
                val += -t.amp * t.mu / FOURPI
            elif t.k == 1:
                val += t.amp / FOURPI
        return val

    def eval(self, r) -> np.ndarray:
        """Values on radii r; returns array of shape (2, len(r))."""
        r = np.atleast_1d(np.asarray(r, dtype=float))
        out = np.zeros((2, r.size), dtype=complex)
        for t in self.terms:
            out += t.amp[:, None] * (r ** t.k * np.exp(-t.mu * r) / (FOURPI * r))
        return out

    def __repr__(self):
        return f"RadialExpSum({len(self.terms)} terms)"


def _merge_terms(terms: Sequence[Term]) -> list[Term]:
    merged: list[Term] = []
    for t in terms:
        for i, s in enumerate(merged):
            if s.k == t.k and abs(s.mu - t.mu) <= _MERGE_TOL * (1.0 + abs(s.mu)):
                merged[i] = Term(s.amp + t.amp, s.mu, s.k)
                break
        else:
            merged.append(t)
    scale = max((float(np.max(np.abs(t.amp))) for t in merged), default=0.0)
    return [t for t in merged if np.max(np.abs(t.amp)) > 1e-300 + 0.0 * scale]


# ---------------------------------------------------------------------------
# pairings (closed-form Gamma moments)
# ---------------------------------------------------------------------------

def _moment(k: int, m: complex, allow_oscillatory: bool) -> complex:
    """int_0^inf r^k exp(-m r) dr = k! / m^(k+1)."""
    if m.real <= 0.0 and not (allow_oscillatory and m.real > -1e-12 and m != 0):
        raise NonIntegrableError(f"divergent moment: combined rate {m}")
    if m == 0:
        raise NonIntegrableError("divergent moment: zero combined rate")
    return math.factorial(k) / m ** (k + 1)


def l2_inner(u: RadialExpSum, v: RadialExpSum,
             allow_oscillatory: bool = False) -> complex:
    """Hermitian L2 pairing int u . conj(v) dx, linear in u."""
    acc = 0.0 + 0.0j
    for a in u.terms:
        for b in v.terms:
            w = a.amp @ np.conj(b.amp)
            if w != 0:
                acc += w * _moment(a.k + b.k, a.mu + np.conj(b.mu),
                                   allow_oscillatory) / FOURPI
    return complex(acc)


def l2_bilinear(u: RadialExpSum, v: RadialExpSum,
                allow_oscillatory: bool = False) -> complex:
    """Bilinear pairing <u, v> = int u . v dx (no conjugation)."""
    acc = 0.0 + 0.0j
    for a in u.terms:
        for b in v.terms:
            w = a.amp @ b.amp
            if w != 0:
                acc += w * _moment(a.k + b.k, a.mu + b.mu,
                                   allow_oscillatory) / FOURPI
    return complex(acc)


def omega_form(u: RadialExpSum, v: RadialExpSum,
               allow_oscillatory: bool = False) -> complex:
    """Bilinear symplectic form int (u2 v1 - u1 v2) dx."""
    acc = 0.0 + 0.0j
    for a in u.terms:
        for b in v.terms:
            w = a.amp[1] * b.amp[0] - a.amp[0] * b.amp[1]
            if w != 0:
                acc += w * _moment(a.k + b.k, a.mu + b.mu,
                                   allow_oscillatory) / FOURPI
    return complex(acc)


def symplectic_form(u: RadialExpSum, v: RadialExpSum) -> float:
    """Omega(u, v) = Im int u conj(v) for physical (real-pair) states."""
    return float(omega_form(u, v).real)


def l2_norm2(u: RadialExpSum) -> float:
    return float(l2_inner(u, u).real)


# ---------------------------------------------------------------------------
# standing-wave family
# ---------------------------------------------------------------------------

def q_omega(p: ModelParams) -> float:
    """Scalar charge of the wave profile, (sqrt(omega)/(4 pi nu))^(1/(2 sigma))."""
    return float((math.sqrt(p.omega) / (FOURPI * p.nu)) ** (1.0 / (2.0 * p.sigma)))


def q_omega_vec(p: ModelParams) -> Charge2:
    return Charge2(q_omega(p), 0.0)


def soliton(p: ModelParams) -> RadialExpSum:
    """Wave profile Phi_omega = q_omega exp(-sqrt(omega) r)/(4 pi r), first slot."""
    return RadialExpSum.point([q_omega(p), 0.0], math.sqrt(p.omega))


def _dq_domega(p: ModelParams) -> float:
    # d/domega of q_omega = q_omega / (4 sigma omega)
    return q_omega(p) / (4.0 * p.sigma * p.omega)


def soliton_domega(p: ModelParams) -> RadialExpSum:
    w = q_omega(p)
    dw = _dq_domega(p)
    root = math.sqrt(p.omega)
    return RadialExpSum([
        Term(np.array([dw, 0.0], dtype=complex), root, 0),
        Term(np.array([-w / (2.0 * root), 0.0], dtype=complex), root, 1),
    ])


def soliton_d2omega(p: ModelParams) -> RadialExpSum:
    w = q_omega(p)
    dw = _dq_domega(p)
    d2w = dw * (1.0 / (4.0 * p.sigma) - 1.0) / p.omega
    root = math.sqrt(p.omega)
    om = p.omega
    return RadialExpSum([
        Term(np.array([d2w, 0.0], dtype=complex), root, 0),
        Term(np.array([-dw / root, 0.0], dtype=complex), root, 1),
        Term(np.array([w / (4.0 * om ** 1.5), 0.0], dtype=complex), root, 1),
        Term(np.array([w / (4.0 * om), 0.0], dtype=complex), root, 2),
    ])


def xi(p: ModelParams) -> float:
    """Internal oscillation frequency 2 sigma sqrt(1 - sigma^2) omega."""
    return 2.0 * p.sigma * math.sqrt(1.0 - p.sigma ** 2) * p.omega


def alphas(p: ModelParams) -> tuple[float, float]:
    """Linearization strengths (alpha1, alpha2), both negative."""
    root = math.sqrt(p.omega)
    return (-(2.0 * p.sigma + 1.0) * root / FOURPI, -root / FOURPI)


def delta_mass(p: ModelParams, convention: str = "half_dnorm2") -> float:
    """Mass-slope constant of the wave family.

    Default is (1/2) d/domega of the squared L2 norm; convention="dnorm"
    switches to d/domega of the norm itself for sensitivity checks.
    """
    w2 = q_omega(p) ** 2
    half = w2 * (1.0 / (2.0 * p.sigma) - 0.5) / (16.0 * math.pi * p.omega ** 1.5)
    if convention == "half_dnorm2":
        return float(half)
    if convention == "dnorm":
        norm = math.sqrt(w2 / (8.0 * math.pi * math.sqrt(p.omega)))
        return float(half / norm)
    raise ValueError(f"unknown delta convention {convention!r}")


# ---------------------------------------------------------------------------
# Taylor forms of the point nonlinearity
# ---------------------------------------------------------------------------

def _as_vec(q) -> np.ndarray:
    return q.vec if isinstance(q, Charge2) else np.asarray(q, dtype=complex)


def n2_form(q1, q2, sigma: float, w: float) -> Charge2:
    """Symmetric quadratic Taylor form of the nonlinearity at charge w."""
    a, b = _as_vec(q1), _as_vec(q2)
    qw = np.array([w, 0.0], dtype=complex)
    ab = a @ b
    wa, wb = w * a[0], w * b[0]
    out = sigma * w ** (2.0 * (sigma - 1.0)) * (ab * qw + wa * b + wb * a) \
        + 2.0 * (sigma - 1.0) * sigma * w ** (2.0 * (sigma - 2.0)) * wa * wb * qw
    return Charge2.from_vec(out)


def n3_form(q1, q2, q3, sigma: float, w: float) -> Charge2:
    """Symmetric cubic Taylor form of the nonlinearity at charge w."""
    a, b, c = _as_vec(q1), _as_vec(q2), _as_vec(q3)
    qw = np.array([w, 0.0], dtype=complex)
    wa, wb, wc = w * a[0], w * b[0], w * c[0]
    ab, ac, bc = a @ b, a @ c, b @ c
    s = sigma
    out = s * w ** (2.0 * (s - 1.0)) * (ab * c + ac * b + bc * a) / 3.0 \
        + (2.0 / 3.0) * (s - 1.0) * s * w ** (2.0 * (s - 2.0)) \
        * (wa * wb * c + wa * wc * b + wb * wc * a) \
        + (2.0 / 3.0) * (s - 1.0) * s * w ** (2.0 * (s - 2.0)) \
        * (wa * bc + wb * ac + wc * ab) * qw \
        + (4.0 / 3.0) * (s - 2.0) * (s - 1.0) * s * w ** (2.0 * (s - 3.0)) \
        * wa * wb * wc * qw
    return Charge2.from_vec(out)


def n2(q1, q2, p: ModelParams) -> Charge2:
    return n2_form(q1, q2, p.sigma, q_omega(p))


def n3(q1, q2, q3, p: ModelParams) -> Charge2:
    return n3_form(q1, q2, q3, p.sigma, q_omega(p))


# ---------------------------------------------------------------------------
# energy
# ---------------------------------------------------------------------------

def _neg_laplacian_terms(t: Term) -> list[Term]:
    # -Delta [a r^k e^{-mu r}/(4 pi r)] away from the origin
    out = []
    k, mu = t.k, t.mu
    if k >= 2:
        out.append(Term(-t.amp * k * (k - 1), mu, k - 2))
    if k >= 1:
        out.append(Term(t.amp * 2.0 * mu * k, mu, k - 1))
    out.append(Term(-t.amp * mu ** 2, mu, k))
    return out


def grad_norm2(u: RadialExpSum) -> float:
    """Squared L2 norm of grad(phi) where u = phi + q G0, both components.

    Computed in closed form through <phi, -Delta phi>; the charge singularity
    is subtracted exactly.
    """
    if not u.is_square_integrable:
        raise NonIntegrableError("gradient norm requested for a non-decaying state")
    q = u.charge().vec
    # phi = u - q G0; G0 enters as a zero-rate term paired only against
    # decaying factors, so every moment below converges.
    minus_lap: list[Term] = []
    for t in u.terms:
        minus_lap.extend(_neg_laplacian_terms(t))
    acc = 0.0 + 0.0j
    for a in list(u.terms) + [Term(-q, 0.0, 0)]:
        for b in minus_lap:
            w = a.amp @ np.conj(b.amp)
            if w != 0:
                m = a.mu + np.conj(b.mu)
                acc += w * _moment(a.k + b.k, m, False) / FOURPI
    val = float(acc.real)
    if abs(acc.imag) > 1e-9 * (1.0 + abs(val)):
        raise NumericalError(f"gradient norm acquired imaginary part {acc.imag}")
    return val


def energy(u: RadialExpSum, p: ModelParams) -> float:
    """Total conserved energy (1/2)|grad phi|^2 - nu/(2 sigma + 2) |q|^(2 sigma + 2)."""
    q = u.charge().vec
    qmod2 = float(np.real(q @ np.conj(q)))
    return 0.5 * grad_norm2(u) - p.nu / (2.0 * p.sigma + 2.0) \
        * qmod2 ** (p.sigma + 1.0)
