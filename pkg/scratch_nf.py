"""Prototype of the normal-form pipeline; exploration before freezing the module."""
import math
import numpy as np
from concnls import model as m, spectral as sp

# ---------------- poly engine: dict[(i,j)] -> coeff (complex scalar or C^2) ----
def padd(a, b):
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, 0) + v
    return out

def pscale(a, z):
    return {k: z * v for k, v in a.items()}

def pconj(a):
    # conjugate of the represented real-analytic quantity: z<->zbar, conj coeff
    return {(j, i): np.conj(v) for (i, j), v in a.items()}

def pmul(a, b, deg=3):
    out = {}
    for (i1, j1), v1 in a.items():
        for (i2, j2), v2 in b.items():
            i, j = i1 + i2, j1 + j2
            if i + j <= deg:
                out[(i, j)] = out.get((i, j), 0) + v1 * v2
    return out

def pbilinear_form(form, a, b, deg=3):
    """form(x, y) bilinear on C^2 applied to C^2-valued polys."""
    out = {}
    for (i1, j1), v1 in a.items():
        for (i2, j2), v2 in b.items():
            i, j = i1 + i2, j1 + j2
            if i + j <= deg:
                out[(i, j)] = out.get((i, j), 0) + form(v1, v2)
    return out

def ptrilinear_form(form, a, b, c, deg=3):
    out = {}
    for (i1, j1), v1 in a.items():
        for (i2, j2), v2 in b.items():
            for (i3, j3), v3 in c.items():
                i, j = i1 + i2 + i3, j1 + j2 + j3
                if i + j <= deg:
                    out[(i, j)] = out.get((i, j), 0) + form(v1, v2, v3)
    return out

def pdot_conj(a, w):
    """C^2-poly dotted with a fixed conj'd vector: sum_i a_i conj(w_i)."""
    return {k: v @ np.conj(w) for k, v in a.items()}

def pdt(a, zdot, deg=3):
    """d/dt of poly a given zdot-series (and conj for zbar)."""
    zbar_dot = pconj(zdot)
    out = {}
    for (i, j), v in a.items():
        if i >= 1:
            mono = {(i - 1, j): i * v}
            out = padd(out, pmul(mono, zdot, deg))
        if j >= 1:
            mono = {(i, j - 1): j * v}
            out = padd(out, pmul(mono, zbar_dot, deg))
    return out

def get(a, i, j):
    return a.get((i, j), 0.0)

# ---------------- pipeline at given params ----------------
def pipeline(p, convention="bc", verbose=True):
    s, om, w = p.sigma, p.omega, m.q_omega(p)
    x = m.xi(p)
    pair = sp.psi(p, convention)
    Psi = pair.psi
    Psis = Psi.star()
    kap = pair.kappa           # Omega(Psi, Psi*)
    psi_jpsi = -kap            # (Psi, J Psi)_H
    delta = m.delta_mass(p)
    phi = m.soliton(p)
    dphi = m.soliton_domega(p)
    d2phi = m.soliton_d2omega(p)
    dPsi = sp.psi_domega(p, convention)
    dPsis = dPsi.star()

    qPsi = Psi.charge().vec
    qPsis = np.conj(qPsi)

    # scalar pairings
    H = m.l2_inner
    PsiPsi = H(Psi, Psi)
    PsisPsi = H(Psis, Psi)
    Psi_dphi = H(Psi, dphi)        # (Psi, Phi')_H
    Psis_dphi = H(Psis, dphi)
    Psi_jphi = H(Psi, phi.times_j())
    Psis_jphi = H(Psis, phi.times_j())
    dPsi_JPsi = H(dPsi, Psi.times_j())
    dPsis_JPsi = H(dPsis, Psi.times_j())
    c0 = H(dphi.times_j(), Psi)    # (J Phi', Psi)_H
    om_Psi_d2 = m.omega_form(Psi, d2phi)
    om_Psis_d2 = m.omega_form(Psis, d2phi)
    om_Psi_jdphi = m.omega_form(Psi, dphi.times_j())
    om_Psis_jdphi = m.omega_form(Psis, dphi.times_j())

    if verbose:
        print(" symplectic orth checks: Om(Psi,Phi')=", m.omega_form(Psi, dphi),
              " Om(Psi,JPhi)=", m.omega_form(Psi, phi.times_j()))
        print(" (Psi,JPsi)=", psi_jpsi, " kappa=", kap)

    n2f = lambda a, b: m.n2(a, b, p).vec
    n3f = lambda a, b, c: m.n3(a, b, c, p).vec

    qpsi_poly = {(1, 0): qPsi, (0, 1): qPsis}
    X2 = pbilinear_form(n2f, qpsi_poly, qpsi_poly)      # N2(q_psi, q_psi)
    X3 = ptrilinear_form(n3f, qpsi_poly, qpsi_poly, qpsi_poly)
    X = padd(X2, X3)

    # (chi, .) pairing polys (f = 0)
    chi_Psi = {(1, 0): PsiPsi, (0, 1): PsisPsi}
    chi_dphi = {(1, 0): Psi_dphi, (0, 1): Psis_dphi}
    chi_jphi = {(1, 0): Psi_jphi, (0, 1): Psis_jphi}
    dpsi_JPsi = {(1, 0): dPsi_JPsi, (0, 1): dPsis_JPsi}
    om_chi_d2 = {(1, 0): om_Psi_d2, (0, 1): om_Psis_d2}
    om_chi_jdphi = {(1, 0): om_Psi_jdphi, (0, 1): om_Psis_jdphi}

    X1c = {k: v[0] for k, v in X.items()}
    X2c = {k: v[1] for k, v in X.items()}
    dw = w / (4.0 * s * om)

    # leading order
    omdot = pscale(X2c, w / delta)
    gamdot = pscale(X1c, -dw / delta)
    # one corrective iteration (cubic closure)
    for _ in range(2):
        omdot_new = pscale(
            padd(padd(pscale(X2c, w), pscale(pmul(gamdot, chi_jphi), -1.0)),
                 pmul(omdot, om_chi_jdphi)), 1.0 / delta)
        gamdot_new = pscale(
            padd(padd(pscale(X1c, -dw), pmul(omdot, om_chi_d2)),
                 pscale(pmul(gamdot, chi_dphi), -1.0)), 1.0 / delta)
        omdot, gamdot = omdot_new, gamdot_new

    zrhs = padd(
        padd(pscale(pmul(omdot, dpsi_JPsi), -1.0), pmul(gamdot, chi_Psi)),
        padd(pscale(omdot, c0), pdot_conj(X, qPsi)))
    zdot = pscale(zrhs, 1.0 / psi_jpsi)
    zdot[(1, 0)] = zdot.get((1, 0), 0.0) + 1j * x

    Z = {k: v for k, v in zdot.items() if k != (1, 0)}
    Om_ij = omdot
    Gam_ij = gamdot

    # H-vectors and a-solves
    Jm = m.J_MAT
    Xquad = {k: v for k, v in X2.items()}
    Hvec = {}
    for key in [(2, 0), (1, 1), (0, 2)]:
        src = m.RadialExpSum.point(Jm @ Xquad[key], math.sqrt(om))
        p0u, p1u, pcu = sp.projections(src, p, convention)
        # H_c = 8 pi sqrt(om) (Pc[...]_c, G)
        G = m.RadialExpSum.point([1.0, 0.0], math.sqrt(om))
        G2 = m.RadialExpSum.point([0.0, 1.0], math.sqrt(om))
        h1 = 8 * math.pi * math.sqrt(om) * m.l2_inner(pcu, G)
        h2 = 8 * math.pi * math.sqrt(om) * m.l2_inner(pcu, G2)
        Hvec[key] = np.array([h1, h2])
        # also unprojected F
    Fvec = {k: Jm @ v for k, v in Xquad.items()}

    a20 = sp.resolvent_charge_solve(2j * x, Hvec[(2, 0)], p, side=+1)
    a02 = sp.resolvent_charge_solve(-2j * x, Hvec[(0, 2)], p, side=+1)
    a11 = sp.resolvent_charge_solve(0.0, Hvec[(1, 1)], p, allow_singular=True)
    qa20, qa11, qa02 = a20.charge().vec, a11.charge().vec, a02.charge().vec

    # z'-functionals:  G10(q) = -(2/kappa) n2(qPsi, q) . conj(qPsi) etc.
    # as vectors V with G(q) = q . V
    e1, e2 = np.array([1.0, 0]), np.array([0, 1.0])
    V10 = np.array([n2f(qPsi, e1) @ np.conj(qPsi), n2f(qPsi, e2) @ np.conj(qPsi)])
    V10 = 2.0 * V10 / psi_jpsi
    V01 = np.array([n2f(qPsis, e1) @ np.conj(qPsi), n2f(qPsis, e2) @ np.conj(qPsi)])
    V01 = 2.0 * V01 / psi_jpsi

    # k-substitution: q_k(z,zbar) real-poly; z * (q_k . V10) + zbar * (q_k . V01)
    qk = {(2, 0): qa20, (1, 1): qa11, (0, 2): qa02}
    zf_terms = padd(pmul({(1, 0): 1.0}, pdot_conj({k: np.conj(v) for k, v in qk.items()}, np.conj(V10))),
                    pmul({(0, 1): 1.0}, pdot_conj({k: np.conj(v) for k, v in qk.items()}, np.conj(V01))))
    # note pdot_conj(a, conj(V)) = sum a_i V_i  (bilinear dot with V)
    Zp21 = get(zf_terms, 2, 1)
    Zp30 = get(zf_terms, 3, 0)
    Zp12 = get(zf_terms, 1, 2)
    Zp03 = get(zf_terms, 0, 3)

    # c-solves and K (generated)
    Zfull = dict(Z)
    for (i, j), v in zf_terms.items():
        Zfull[(i, j)] = Zfull.get((i, j), 0.0) + v
    c = {}
    for key in [(2, 0), (1, 1), (0, 2)]:
        i, j = key
        c[key] = -get(Zfull, i, j) / (1j * x * ((i - j) - 1))
    cross = {}
    quadZ = {k: get(Zfull, *k) for k in [(2, 0), (1, 1), (0, 2)]}
    conjZ = {k: np.conj(v) for k, v in quadZ.items()}
    for (pq, contrib) in [((3, 0), None)]:
        pass
    def cross_pq(pq):
        # sum over quadratic c_ij of dt-nonlinear parts hitting monomial pq
        out = 0.0
        for (i, j), cij in c.items():
            # i z^{i-1} zbar^j * (Z_ab z^a zbar^b)
            for (a, b), Zab in quadZ.items():
                if (i - 1 + a, j + b) == pq:
                    out += i * cij * Zab
            for (a, b), Zab in conjZ.items():
                # j z^i zbar^{j-1} * conj(Z_ab) zbar^a z^b
                if (i + b, j - 1 + a) == pq:
                    out += j * cij * Zab
        return out
    iK = get(Zfull, 2, 1) + cross_pq((2, 1))
    K = iK / 1j
    for key in [(3, 0), (1, 2), (0, 3)]:
        i, j = key
        c[key] = -(get(Zfull, i, j) + cross_pq(key)) / (1j * x * ((i - j) - 1))

    out = dict(Z=Zfull, Zq=Z, Om=Om_ij, Gam=Gam_ij, H=Hvec, F=Fvec,
               qa20=qa20, qa11=qa11, qa02=qa02, a20=a20, a11=a11, a02=a02,
               V10=V10, V01=V01, Zp21=Zp21, K=K, iK=iK, c=c, kappa=kap,
               delta=delta, x=x, psi_jpsi=psi_jpsi, pair=pair)
    return out


def f_sigma_literal(s):
    r = math.sqrt(1.0 - s * s)
    t4 = 4.0 * s * r       # 4 sigma sqrt(1-sigma^2)
    t2 = 2.0 * s * r
    sq4m = math.sqrt(t4 - 1.0)
    sq4p = math.sqrt(1.0 + t4)
    sq2m = math.sqrt(1.0 - t2)
    sq2p = math.sqrt(1.0 + t2)
    sq16 = math.sqrt(16.0 * s * s - 16.0 * s ** 4 - 1.0)
    beta_num = r - 1.0
    D = 1.0 / sq2m - beta_num ** 2 / (s * s * sq2p)
    b1 = ((2.0 * (1.0 + s) ** 2 + 2.0 * s * r) * sq4m
          - (2.0 + 3.0 * s) * sq4m * sq4p
          + (1.0 + beta_num / s) * ((-1.0 - s) * sq16
                                    + (1.0 + s + 2.0 * s * r) * sq4m))
    m1 = 1.0 / (2.0 * s - 1.0) \
        - (1.0 / (1.0 + sq2m) - beta_num / (s + s * sq2p)) ** 2 / D
    b2 = (1.0 + s + (1.0 + s - 2.0 * s * r) * sq4p
          + (1.0 + beta_num / s) * (-1.0 - 2.0 * s + (-4.0 * s - 4.0 * s * s) * r
                                    + (1.0 + 2.0 * s + 2.0 * s * r) * sq4p))
    m2 = 1.0 - (1.0 / (1.0 + sq2m) + beta_num / (s + s * sq2p)) ** 2 / D
    return b1 * m1 + b2 * m2


def re_zp21_paper_route(p):
    s, om, w = p.sigma, p.omega, m.q_omega(p)
    x = m.xi(p)
    a = math.sqrt(om + 2 * x)
    cc = math.sqrt(2 * x - om)
    d = 2j * (2 * s + 1) * om + 2 * (s + 1) * math.sqrt(om) * cc \
        - 2j * (s + 1) * math.sqrt(om) * a - 2 * a * cc
    kap = sp.kappa_closed_form(p)
    beta = (math.sqrt(1 - s * s) - 1.0) / s
    pref = 128.0 * math.pi * om ** 1.5 * w ** (4.0 * s - 2.0) / (1j * kap * abs(d) ** 2)
    return float((pref * s ** 2 * (1.0 - beta) ** 2 * f_sigma_literal(s)).real)


if __name__ == "__main__":
    p = m.ModelParams(0.8)
    res = pipeline(p, "bc")
    print("\n--- mechanical (bc) at sigma=0.8, omega=1, nu=1 ---")
    for k in [(2, 0), (1, 1), (0, 2), (2, 1)]:
        print(f" Z{k} = {get(res['Zq'], *k):.6e}")
    print(" Om11 =", get(res['Om'], 1, 1), "  Om20 =", get(res['Om'], 2, 0))
    print(" Gam11 =", get(res['Gam'], 1, 1))
    print(" H20 =", res['H'][(2, 0)])
    print(" H11 =", res['H'][(1, 1)])
    print(" F20 =", res['F'][(2, 0)])
    print(" qa20 =", res['qa20'], " qa11 =", res['qa11'])
    print(" Zp21 =", res['Zp21'])
    print(" iK =", res['iK'], "  Re(iK) =", res['iK'].real)
    print(" Re(q_a11 conj(V10_paperish)):",
          np.real(res['qa11'] @ np.conj(res['V10'])))
    print("\n f_sigma(0.8) =", f_sigma_literal(0.8))
    print(" re_zp21 paper-route(0.8) =", re_zp21_paper_route(p))
    res_p = pipeline(p, "paper", verbose=False)
    print(" mech-paper-conv Re(iK) =", res_p['iK'].real)
    print("\n scan:")
    for s_ in [0.712, 0.72, 0.75, 0.8, 0.85, 0.9, 0.94, 0.955]:
        pp = m.ModelParams(s_)
        r1 = pipeline(pp, "bc", verbose=False)
        r2 = pipeline(pp, "paper", verbose=False)
        print(f"  s={s_:.3f} f={f_sigma_literal(s_):+.4e} "
              f"paper-route={re_zp21_paper_route(pp):+.4e} "
              f"mech-bc={r1['iK'].real:+.4e} mech-paper={r2['iK'].real:+.4e}")
