"""Linearization machinery: eigenpairs, resolvent, projections, spectrum.

The linearized generator acts blockwise as L(u1, u2) = (L2 u2, -L1 u1) with
L_j = H_{alpha_j} + omega; this orientation is the one under which the
discrete eigenpair satisfies L Psi = i xi Psi componentwise.  Spectral
parameters on the essential-spectrum branches carry an explicit side tag
(+1/-1 for the limit from Re(lambda) = +-0); square roots follow the
prescription Im sqrt(-omega +- i lambda) > 0.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .model import (
    FOURPI,
    Charge2,
    DomainError,
    ModelParams,
    NumericalError,
    RadialExpSum,
    Term,
    alphas,
    delta_mass,
    l2_inner,
    omega_form,
    q_omega,
    soliton,
    soliton_domega,
    xi,
)

SIGMA_RES = 1.0 / math.sqrt(2.0)          # threshold-resonance power
SIGMA_BAND = (math.sqrt(3.0) + 1.0) / (2.0 * math.sqrt(2.0))  # 2 xi = omega

_DIR_PLUS = np.array([1.0, -1.0j])   # homogeneous direction paired with mu_plus
_DIR_MINUS = np.array([1.0, 1.0j])   # homogeneous direction paired with mu_minus


class SingularResolventError(NumericalError):
    """Resolvent requested at (numerically) an eigenvalue."""


# ---------------------------------------------------------------------------
# branch bookkeeping
# ---------------------------------------------------------------------------

def _sqrt_im_pos(z: complex) -> complex:
    s = cmath.sqrt(z)
    if s.imag < 0.0 or (s.imag == 0.0 and s.real < 0.0):
        s = -s
    return s


def on_branch_cut(lam: complex, p: ModelParams, tol: float = 1e-13) -> bool:
    return abs(lam.real) <= tol * max(1.0, abs(lam)) and abs(lam.imag) >= p.omega - tol


@dataclass(frozen=True)
class ResolventPoint:
    lam: complex
    side: int | None
    sp: complex   # sqrt(-omega + i lam), Im > 0 off the cuts
    sm: complex   # sqrt(-omega - i lam), Im > 0 off the cuts
    w: complex    # resolvent denominator W(lambda^2)

    @property
    def mu_plus(self) -> complex:
        return -1j * self.sp

    @property
    def mu_minus(self) -> complex:
        return -1j * self.sm


def branch_roots(lam: complex, p: ModelParams, side: int | None = None):
    """(sp, sm) at lam, using the side tag for on-cut evaluation."""
    lam = complex(lam)
    if on_branch_cut(lam, p):
        if side not in (+1, -1):
            raise ValueError("on-cut evaluation requires side=+1 or side=-1")
        eta = abs(lam.imag)
        root = math.sqrt(max(eta - p.omega, 0.0))
        if lam.imag >= 0.0:   # upper branch
            sp = 1j * math.sqrt(p.omega + eta)
            sm = -side * root
        else:                 # lower branch
            sp = side * root
            sm = 1j * math.sqrt(p.omega + eta)
        return sp, sm
    return _sqrt_im_pos(-p.omega + 1j * lam), _sqrt_im_pos(-p.omega - 1j * lam)


def w_function(lam: complex, p: ModelParams, side: int | None = None) -> ResolventPoint:
    """Resolvent denominator W(lambda^2) with its branch data."""
    sp, sm = branch_roots(lam, p, side)
    a1, a2 = alphas(p)
    w = 32.0 * math.pi ** 2 * a1 * a2 \
        - 4j * math.pi * (a1 + a2) * (sp + sm) - 2.0 * sp * sm
    return ResolventPoint(complex(lam), side, sp, sm, complex(w))


# ---------------------------------------------------------------------------
# discrete eigenpair
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EigenPair:
    xi: float
    psi: RadialExpSum
    kappa: complex
    bc_residual: float
    convention: str


def psi_rates(p: ModelParams) -> tuple[float, float]:
    """Decay rates (sqrt(omega - xi), sqrt(omega + xi)) of the eigenfunction."""
    x = xi(p)
    return math.sqrt(p.omega - x), math.sqrt(p.omega + x)


def psi_coefficient(sigma: float, convention: str) -> float:
    """Second-term coefficient B of the eigenfunction, A = 1.

    "bc" solves the boundary conditions exactly; "paper" reproduces the
    stated coefficient used in the closed-form chain (it does not satisfy
    the boundary conditions, which is the documented discrepancy).
    """
    s = math.sqrt(1.0 - sigma ** 2)
    if convention == "bc":
        return -(s + 1.0) / sigma
    if convention == "paper":
        return -(s - 1.0) / sigma
    raise ValueError(f"unknown psi convention {convention!r}")


def domain_bc_residual(u: RadialExpSum, p: ModelParams) -> float:
    """Scaled violation of the two point-interaction boundary conditions."""
    a1, a2 = alphas(p)
    q = u.charge().vec
    phi0 = u.regular_part_at_zero()
    scale = max(math.sqrt(p.omega) / FOURPI,
                float(np.max(np.abs(phi0))), float(np.max(np.abs(q))) / FOURPI)
    r1 = abs(phi0[0] - a1 * q[0])
    r2 = abs(phi0[1] - a2 * q[1])
    return float(max(r1, r2) / scale)


def psi(p: ModelParams, convention: str = "bc") -> EigenPair:
    """Eigenfunction of L at +i xi; two terms with C^2 amplitudes (1, +-i)."""
    p.require_internal_modes()
    m1, m2 = psi_rates(p)
    b = psi_coefficient(p.sigma, convention)
    fn = RadialExpSum([
        Term(np.array([1.0, 1.0j]), m1, 0),
        Term(np.array([b, -1.0j * b]), m2, 0),
    ])
    res = domain_bc_residual(fn, p)
    if convention == "bc" and res > 1e-11:
        raise NumericalError(f"eigenfunction boundary residual {res} too large")
    kap = omega_form(fn, fn.star())
    return EigenPair(xi(p), fn, complex(kap), res, convention)


def psi_star(p: ModelParams, convention: str = "bc") -> EigenPair:
    """Eigenfunction at -i xi, the second-component flip of psi."""
    pair = psi(p, convention)
    return EigenPair(-pair.xi, pair.psi.star(), pair.kappa, pair.bc_residual,
                     convention)


def psi_domega(p: ModelParams, convention: str = "bc") -> RadialExpSum:
    """d/domega of the eigenfunction (amplitudes are omega-independent)."""
    pair = psi(p, convention)
    terms = []
    for t in pair.psi.terms:
        # d mu / d omega = mu / (2 omega) for both rates
        terms.append(Term(-t.amp * t.mu / (2.0 * p.omega), t.mu, t.k + 1))
    return RadialExpSum(terms)


@dataclass(frozen=True)
class KappaResult:
    direct: complex        # -(Psi, J Psi)_L2 on the requested eigenfunction
    closed_form: complex   # literal closed formula (stated-coefficient chain)
    difference: float


def kappa_closed_form(p: ModelParams) -> complex:
    s = math.sqrt(1.0 - p.sigma ** 2)
    t = 2.0 * p.sigma * s
    beta2 = (s - 1.0) ** 2 / p.sigma ** 2
    return (1j / (FOURPI * math.sqrt(p.omega))) \
        * (1.0 / math.sqrt(1.0 - t) - beta2 / math.sqrt(1.0 + t))


def kappa(p: ModelParams, convention: str = "bc") -> KappaResult:
    """Symplectic normalization of the eigenpair, by two routes."""
    pair = psi(p, convention)
    direct = -l2_inner(pair.psi, pair.psi.times_j())
    cf = kappa_closed_form(p)
    return KappaResult(complex(direct), complex(cf), abs(direct - cf))


# ---------------------------------------------------------------------------
# linearized action and resolvent
# ---------------------------------------------------------------------------

def _helmholtz_scalar_inverse(a: complex, b: complex, k: int) -> list[tuple[complex, complex, int]]:
    """(coeff, rate, power) terms of (-Delta + a^2)^{-1}[r^k e^{-b r}/(4 pi r)].

    Solves -Q'' + 2 b Q' + (a^2 - b^2) Q = r^k for a polynomial Q and removes
    the induced point charge; the confluent case a ~ +-b uses the limiting
    polynomial of one higher degree (no subtraction needed).
    """
    c = a * a - b * b
    scale = max(abs(a) ** 2, abs(b) ** 2, 1.0)
    if abs(c) > 1e-8 * scale:
        q = [0.0 + 0.0j] * (k + 1)
        q[k] = 1.0 / c
        for j in range(k - 1, -1, -1):
            q[j] = ((j + 2) * (j + 1) * (q[j + 2] if j + 2 <= k else 0.0)
                    - 2.0 * b * (j + 1) * q[j + 1]) / c
        out = [(q[j], b, j) for j in range(k + 1) if q[j] != 0]
        if q[0] != 0:
            out.append((-q[0], a, 0))
        return out
    if abs(b) < 1e-12:
        raise NumericalError("helmholtz inverse needs a nonzero rate")
    s = [0.0 + 0.0j] * (k + 1)
    s[k] = 1.0 / (2.0 * b)
    for j in range(k - 1, -1, -1):
        s[j] = (j + 1) * s[j + 1] / (2.0 * b)
    # Q = int_0^r S, so Q(0) = 0 and the result carries no point charge.
    return [(s[j] / (j + 1), b, j + 1) for j in range(k + 1)]


def helmholtz_inverse(a: complex, f: RadialExpSum) -> RadialExpSum:
    """(-Delta + a^2)^{-1} f within the exponential-sum class (componentwise)."""
    terms = []
    for t in f.terms:
        for coeff, rate, power in _helmholtz_scalar_inverse(a, t.mu, t.k):
            terms.append(Term(t.amp * coeff, rate, power))
    return RadialExpSum(terms)


def linearized_apply(u: RadialExpSum, p: ModelParams, lam: complex = 0.0) -> RadialExpSum:
    """(L - lam) u computed from the differential action away from the origin."""
    def helm(comp_sel):
        terms = []
        for t in u.terms:
            amp = np.array([t.amp[comp_sel], 0.0]) if comp_sel == 0 \
                else np.array([0.0, t.amp[comp_sel]])
            k, mu = t.k, t.mu
            if k >= 2:
                terms.append(Term(-amp * k * (k - 1), mu, k - 2))
            if k >= 1:
                terms.append(Term(amp * 2.0 * mu * k, mu, k - 1))
            terms.append(Term(amp * (p.omega - mu ** 2), mu, k))
        return RadialExpSum(terms)

    h1 = helm(0)  # (-Delta + omega) u1, stored in slot 1
    h2 = helm(1)  # (-Delta + omega) u2, stored in slot 2
    swap = np.array([[0.0, 1.0], [0.0, 0.0]])
    neg_swap = np.array([[0.0, 0.0], [-1.0, 0.0]])
    lu = h2.apply_matrix(swap) + h1.apply_matrix(neg_swap)
    return lu + u.scale(-lam)


def _bc_matrix(rp: ResolventPoint, p: ModelParams) -> np.ndarray:
    a1, a2 = alphas(p)
    mp, mm = rp.mu_plus, rp.mu_minus
    return np.array([
        [-mp / FOURPI - a1, -mm / FOURPI - a1],
        [1j * (mp / FOURPI + a2), -1j * (mm / FOURPI + a2)],
    ])


def _bc_violation(u: RadialExpSum, p: ModelParams) -> np.ndarray:
    a1, a2 = alphas(p)
    q = u.charge().vec
    phi0 = u.regular_part_at_zero()
    return np.array([phi0[0] - a1 * q[0], phi0[1] - a2 * q[1]])


def _homogeneous_pair(rp: ResolventPoint) -> tuple[RadialExpSum, RadialExpSum]:
    hp = RadialExpSum([Term(_DIR_PLUS, rp.mu_plus, 0)])
    hm = RadialExpSum([Term(_DIR_MINUS, rp.mu_minus, 0)])
    return hp, hm


def _solve_bc(m: np.ndarray, rhs: np.ndarray, p: ModelParams,
              allow_singular: bool):
    scale = max(1.0, float(np.max(np.abs(m))))
    if abs(np.linalg.det(m)) > 1e-10 * scale ** 2:
        return np.linalg.solve(m, rhs)
    if not allow_singular:
        raise SingularResolventError(
            "resolvent evaluated at an eigenvalue of the linearization")
    coef, *_ = np.linalg.lstsq(m, rhs, rcond=None)
    resid = float(np.max(np.abs(m @ coef - rhs)))
    if resid > 1e-9 * max(1.0, float(np.max(np.abs(rhs)))):
        raise SingularResolventError(
            f"singular resolvent with incompatible source (residual {resid:.2e})")
    return coef


def resolvent_apply(lam: complex, f: RadialExpSum, p: ModelParams,
                    side: int | None = None,
                    allow_singular: bool = False) -> RadialExpSum:
    """(L - lam)^{-1} f within the exponential-sum class.

    The convolution part uses the closed Helmholtz inverses at the two
    branch rates; the finite-rank remainder is fixed by the two domain
    boundary conditions.  On-cut lam requires a side tag.  At an eigenvalue
    the solve is attempted in the least-squares sense only when
    allow_singular is set and the source is compatible.
    """
    rp = w_function(lam, p, side)
    f1 = RadialExpSum([Term(np.array([t.amp[0], 0.0]), t.mu, t.k) for t in f.terms])
    f2 = RadialExpSum([Term(np.array([0.0, t.amp[1]]), t.mu, t.k) for t in f.terms])
    kp1 = helmholtz_inverse(rp.mu_plus, f1)
    km1 = helmholtz_inverse(rp.mu_minus, f1)
    kp2 = helmholtz_inverse(rp.mu_plus, f2)
    km2 = helmholtz_inverse(rp.mu_minus, f2)
    # -lam G_hat = (i/2)(K+ - K-),  Gamma_hat = (1/2)(K+ + K-): no 1/lam anywhere.
    swap01 = np.array([[0.0, 1.0], [0.0, 0.0]])   # move slot-2 data to slot 1
    swap10 = np.array([[0.0, 0.0], [1.0, 0.0]])   # move slot-1 data to slot 2
    u1 = (kp1 - km1).scale(0.5j) - (kp2 + km2).scale(0.5).apply_matrix(swap01)
    u2 = (kp1 + km1).scale(0.5).apply_matrix(swap10) + (kp2 - km2).scale(0.5j)
    u_conv = u1 + u2
    m = _bc_matrix(rp, p)
    rhs = -_bc_violation(u_conv, p)
    coef = _solve_bc(m, rhs, p, allow_singular)
    hp, hm = _homogeneous_pair(rp)
    return u_conv + hp.scale(coef[0]) + hm.scale(coef[1])


def resolvent_charge_solve(lam: complex, h, p: ModelParams,
                           side: int | None = None,
                           allow_singular: bool = False) -> RadialExpSum:
    """Solve Q_L(u, v) - lam (u, v) + Re(h . conj(q_v)) = 0 for all v.

    The charge-vector source h shifts the boundary conditions:
    phi_1(0) - alpha_1 q_1 = -h_2 and phi_2(0) - alpha_2 q_2 = +h_1.
    """
    hv = h.vec if isinstance(h, Charge2) else np.asarray(h, dtype=complex)
    rp = w_function(lam, p, side)
    m = _bc_matrix(rp, p)
    rhs = np.array([-hv[1], hv[0]])
    coef = _solve_bc(m, rhs, p, allow_singular)
    hp, hm = _homogeneous_pair(rp)
    return hp.scale(coef[0]) + hm.scale(coef[1])


def finite_rank_kernel(lam: complex, p: ModelParams, side: int | None = None):
    """Matrix kernel of the finite-rank resolvent part.

    Returns (mu_plus, mu_minus, T) with T of shape (2, 2, 2, 2):
    T[a, i, b, j] is the coefficient of G_{mu_a}(x) e_i <G_{mu_b}, f_j>.
    """
    rp = w_function(lam, p, side)
    m = _bc_matrix(rp, p)
    if abs(np.linalg.det(m)) < 1e-12 * max(1.0, float(np.max(np.abs(m)))) ** 2:
        raise SingularResolventError("finite-rank kernel at an eigenvalue")
    minv = np.linalg.inv(m)
    # residual functionals of the convolution part: res_r = sum_{b,j} beta[r,b,j] <G_b, f_j>
    beta = np.zeros((2, 2, 2), dtype=complex)
    beta[0, 0, 0] = 0.5j
    beta[0, 1, 0] = -0.5j
    beta[0, 0, 1] = -0.5
    beta[0, 1, 1] = -0.5
    beta[1, 0, 0] = 0.5
    beta[1, 1, 0] = 0.5
    beta[1, 0, 1] = 0.5j
    beta[1, 1, 1] = -0.5j
    dirs = np.stack([_DIR_PLUS, _DIR_MINUS])  # (a, i)
    coef = -np.einsum("ar,rbj->abj", minv, beta)
    t = np.einsum("ai,abj->aibj", dirs, coef)
    return rp.mu_plus, rp.mu_minus, t


# ---------------------------------------------------------------------------
# symplectic projections
# ---------------------------------------------------------------------------

def projections(u: RadialExpSum, p: ModelParams, convention: str = "bc",
                delta_convention: str = "half_dnorm2",
                allow_oscillatory: bool = False):
    """(P0 u, P1 u, Pc u): symplectic projections onto the generalized kernel,
    the oscillatory eigenspace, and the continuous subspace."""
    phi = soliton(p)
    dphi = soliton_domega(p)
    jphi = phi.times_j()
    delta = delta_mass(p, delta_convention)
    om_dphi = omega_form(u, dphi, allow_oscillatory)
    om_jphi = omega_form(u, jphi, allow_oscillatory)
    p0 = jphi.scale(-om_dphi / delta) + dphi.scale(om_jphi / delta)

    pair = psi(p, convention)
    pstar = pair.psi.star()
    kap = pair.kappa
    om_psi = omega_form(u, pair.psi, allow_oscillatory)
    om_psistar = omega_form(u, pstar, allow_oscillatory)
    p1 = pair.psi.scale(om_psistar / kap) + pstar.scale(-om_psi / kap)

    pc = u - p0 - p1
    return p0, p1, pc


# ---------------------------------------------------------------------------
# generalized eigenfunctions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GeneralizedEigenfunction:
    eta: float
    branch: str
    a: complex
    c: complex
    d: complex
    psi: RadialExpSum
    bc_residual: float


def generalized_coefficients(eta: float, p: ModelParams) -> tuple[complex, complex]:
    """Stated coefficients (A, C) at D = 1 on the upper branch."""
    om = p.omega
    sg = p.sigma
    rw = math.sqrt(om)
    rp_ = math.sqrt(om + eta)
    rm = math.sqrt(max(eta - om, 0.0))
    rr = math.sqrt(max(eta * eta - om * om, 0.0))
    denom_c = -(2.0 * sg + 1.0) * om + (sg + 1.0) * rw * (1j * rm + rp_) - 1j * rr
    num_c = (2.0 * sg + 1.0) * om + (sg + 1.0) * rw * (1j * rm - rp_) - 1j * rr
    c = num_c / denom_c
    denom_a = rp_ - (sg + 1.0) * rw
    if abs(denom_a) < 1e-10 * rw:
        raise NumericalError(
            f"generalized eigenfunction amplitude degenerates at eta = "
            f"sigma (sigma + 2) omega = {sg * (sg + 2.0) * om:.6g} (got eta={eta:.6g})")
    a = sg * rw * (c + 1.0) / denom_a
    return complex(a), complex(c)


def generalized_eigenfunction(eta: float, branch: str,
                              p: ModelParams) -> GeneralizedEigenfunction:
    """Bounded generalized eigenfunction on a continuous-spectrum branch, D = 1."""
    if abs(eta) < p.omega:
        raise DomainError(f"|eta| must be >= omega, got eta={eta}")
    if abs(p.sigma - SIGMA_RES) < 1e-9 and abs(abs(eta) - p.omega) < 1e-9 * p.omega:
        raise DomainError(
            "threshold resonance: sigma = 1/sqrt(2) carries edge resonances")
    if branch == "+":
        if eta < p.omega:
            raise DomainError("branch '+' requires eta >= omega")
        a, c = generalized_coefficients(eta, p)
        rm = math.sqrt(max(eta - p.omega, 0.0))
        fn = RadialExpSum([
            Term(a * _DIR_PLUS, math.sqrt(p.omega + eta), 0),
            Term(c * _DIR_MINUS, 1j * rm, 0),
            Term(1.0 * _DIR_MINUS, -1j * rm, 0),
        ])
    elif branch == "-":
        if eta > -p.omega:
            raise DomainError("branch '-' requires eta <= -omega")
        a, c = generalized_coefficients(-eta, p)
        a, c = np.conj(a), np.conj(c)
        rm = math.sqrt(max(-eta - p.omega, 0.0))
        fn = RadialExpSum([
            Term(a * _DIR_MINUS, math.sqrt(p.omega - eta), 0),
            Term(c * _DIR_PLUS, 1j * rm, 0),
            Term(1.0 * _DIR_PLUS, -1j * rm, 0),
        ])
    else:
        raise ValueError("branch must be '+' or '-'")
    res = domain_bc_residual(fn, p)
    return GeneralizedEigenfunction(float(eta), branch, complex(a), complex(c),
                                    1.0 + 0.0j, fn, res)


# ---------------------------------------------------------------------------
# spectrum classification and the nondegeneracy pairing
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpectrumClassification:
    case: str
    discrete_eigenvalues: list
    multiplicities: dict = field(default_factory=dict)
    has_threshold_resonance: bool = False
    essential_spectrum: str = "Re(lambda)=0, |Im(lambda)| >= omega"


def classify_spectrum(sigma: float, omega: float = 1.0,
                      tol: float = 1e-12) -> SpectrumClassification:
    """Discrete spectrum of the linearization as a function of sigma."""
    if sigma <= 0.0:
        raise DomainError("sigma must be positive")
    if abs(sigma - SIGMA_RES) <= tol:
        return SpectrumClassification("c", [0.0], {0.0: 2}, True)
    if sigma < SIGMA_RES:
        return SpectrumClassification("b", [0.0], {0.0: 2})
    if abs(sigma - 1.0) <= tol:
        return SpectrumClassification("e", [0.0], {0.0: 4})
    if sigma < 1.0:
        ev = 2.0 * sigma * math.sqrt(1.0 - sigma ** 2) * omega
        return SpectrumClassification(
            "d", [0.0, 1j * ev, -1j * ev], {0.0: 2, 1j * ev: 1, -1j * ev: 1})
    ev = 2.0 * sigma * math.sqrt(sigma ** 2 - 1.0) * omega
    return SpectrumClassification(
        "f", [0.0, ev, -ev], {0.0: 2, ev: 1, -ev: 1})


def require_second_harmonic_in_band(p: ModelParams):
    """2 xi must lie inside the essential spectrum: sigma in (1/sqrt2, band edge)."""
    p.require_internal_modes()
    if p.sigma >= SIGMA_BAND:
        raise DomainError(
            f"sigma={p.sigma} >= {SIGMA_BAND:.6f}: second harmonic leaves the band")


def fgr_quantity(p: ModelParams, convention: str = "bc") -> complex:
    """Nondegeneracy pairing J N2(q_Psi, q_Psi) . conj(q of Psi_+(2 i xi))."""
    from .model import J_MAT, n2  # local import to keep module layering flat

    require_second_harmonic_in_band(p)
    pair = psi(p, convention)
    qpsi = pair.psi.charge()
    n2val = J_MAT @ n2(qpsi, qpsi, p).vec
    gen = generalized_eigenfunction(2.0 * xi(p), "+", p)
    qgen = gen.psi.charge().vec
    return complex(n2val @ np.conj(qgen))
