"""Second prototype: corrected a-solves; sign/agreement scan."""
import math
import numpy as np
from concnls import model as m, spectral as sp
from scratch_nf import (padd, pscale, pconj, pmul, pbilinear_form,
                        ptrilinear_form, pdot_conj, pdt, get,
                        f_sigma_literal, re_zp21_paper_route)


def first_slot(u):
    return m.RadialExpSum([m.Term(np.array([t.amp[0], 0.0]), t.mu, t.k) for t in u.terms])


def pipeline2(p, convention="bc", source_model="projected"):
    s, om, w = p.sigma, p.omega, m.q_omega(p)
    x = m.xi(p)
    pair = sp.psi(p, convention)
    Psi, kap = pair.psi, pair.kappa
    Psis = Psi.star()
    psi_jpsi = -kap
    delta = m.delta_mass(p)
    phi = m.soliton(p)
    dphi = m.soliton_domega(p)
    d2phi = m.soliton_d2omega(p)
    jphi = phi.times_j()
    dPsi = sp.psi_domega(p, convention)
    dPsis = dPsi.star()
    dw = w / (4.0 * s * om)

    qPsi = Psi.charge().vec
    qPsis = np.conj(qPsi)

    H = m.l2_inner
    chi_Psi = {(1, 0): H(Psi, Psi), (0, 1): H(Psis, Psi)}
    chi_dphi = {(1, 0): H(Psi, dphi), (0, 1): H(Psis, dphi)}
    chi_jphi = {(1, 0): H(Psi, jphi), (0, 1): H(Psis, jphi)}
    dpsi_JPsi = {(1, 0): H(dPsi, Psi.times_j()), (0, 1): H(dPsis, Psi.times_j())}
    om_chi_d2 = {(1, 0): m.omega_form(Psi, d2phi), (0, 1): m.omega_form(Psis, d2phi)}
    om_chi_jdphi = {(1, 0): m.omega_form(Psi, dphi.times_j()),
                    (0, 1): m.omega_form(Psis, dphi.times_j())}
    c0 = H(dphi.times_j(), Psi)

    n2f = lambda a, b: m.n2(a, b, p).vec
    n3f = lambda a, b, c: m.n3(a, b, c, p).vec
    qpsi_poly = {(1, 0): qPsi, (0, 1): qPsis}
    X2 = pbilinear_form(n2f, qpsi_poly, qpsi_poly)
    X3 = ptrilinear_form(n3f, qpsi_poly, qpsi_poly, qpsi_poly)
    X = padd(X2, X3)
    X1c = {k: v[0] for k, v in X.items()}
    X2c = {k: v[1] for k, v in X.items()}

    omdot = pscale(X2c, w / delta)
    gamdot = pscale(X1c, -dw / delta)
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

    Jm = m.J_MAT
    Xquad = {(2, 0): n2f(qPsi, qPsi), (1, 1): 2.0 * n2f(qPsi, qPsis),
             (0, 2): n2f(qPsis, qPsis)}
    Fvec = {k: Jm @ v for k, v in Xquad.items()}

    # charge-pairing extraction (the literal H-vectors)
    G1 = m.RadialExpSum.point([1.0, 0.0], math.sqrt(om))
    G2 = m.RadialExpSum.point([0.0, 1.0], math.sqrt(om))
    Hvec = {}
    for key, jx in Fvec.items():
        src = m.RadialExpSum.point(jx, math.sqrt(om))
        _, _, pcu = sp.projections(src, p, convention)
        Hvec[key] = 8 * math.pi * math.sqrt(om) * np.array(
            [m.l2_inner(pcu, G1), m.l2_inner(pcu, G2)])

    def smooth_sources(jx):
        dphi1 = first_slot(dphi)
        s0 = jphi.scale(-dw * jx[1] / delta) + dphi1.scale(w * jx[0] / delta)
        qjpsi = Psi.times_j().charge().vec
        qjpsis = Psis.times_j().charge().vec
        s1 = Psi.scale(-(jx @ np.conj(qjpsi)) / kap) \
            + Psis.scale((jx @ np.conj(qjpsis)) / kap)
        return s0 + s1

    lam_of = {(2, 0): 2j * x, (1, 1): 0.0, (0, 2): -2j * x}
    a = {}
    for key, lam in lam_of.items():
        singular = (key == (1, 1))
        if source_model == "projected":
            jx = Fvec[key]
            a[key] = sp.resolvent_charge_solve(lam, jx, p, side=+1,
                                               allow_singular=singular) \
                + sp.resolvent_apply(lam, smooth_sources(jx), p, side=+1,
                                     allow_singular=singular)
        else:  # "literal": pure charge solve with the extracted H-vector
            a[key] = sp.resolvent_charge_solve(lam, Hvec[key], p, side=+1,
                                               allow_singular=singular)
    qa = {k: v.charge().vec for k, v in a.items()}

    e1, e2 = np.array([1.0, 0]), np.array([0, 1.0])
    V10 = 2.0 * np.array([n2f(qPsi, e1) @ np.conj(qPsi),
                          n2f(qPsi, e2) @ np.conj(qPsi)]) / psi_jpsi
    V01 = 2.0 * np.array([n2f(qPsis, e1) @ np.conj(qPsi),
                          n2f(qPsis, e2) @ np.conj(qPsi)]) / psi_jpsi

    qk = {(2, 0): qa[(2, 0)], (1, 1): qa[(1, 1)], (0, 2): qa[(0, 2)]}
    zf = padd(pmul({(1, 0): 1.0}, {k: v @ V10 for k, v in qk.items()}),
              pmul({(0, 1): 1.0}, {k: v @ V01 for k, v in qk.items()}))
    Zfull = dict(Z)
    for k2, v2 in zf.items():
        Zfull[k2] = Zfull.get(k2, 0.0) + v2

    c = {}
    for key in [(2, 0), (1, 1), (0, 2)]:
        i, j = key
        c[key] = -get(Zfull, i, j) / (1j * x * ((i - j) - 1))
    quadZ = {k: get(Zfull, *k) for k in [(2, 0), (1, 1), (0, 2)]}
    conjZ = {k: np.conj(v) for k, v in quadZ.items()}

    def cross_pq(pq):
        out = 0.0
        for (i, j), cij in c.items():
            if i + j != 2:
                continue
            for (aa, bb), Zab in quadZ.items():
                if (i - 1 + aa, j + bb) == pq and i >= 1:
                    out += i * cij * Zab
            for (aa, bb), Zab in conjZ.items():
                if (i + bb, j - 1 + aa) == pq and j >= 1:
                    out += j * cij * Zab
        return out

    iK = get(Zfull, 2, 1) + cross_pq((2, 1))
    for key in [(3, 0), (1, 2), (0, 3)]:
        i, j = key
        c[key] = -(get(Zfull, i, j) + cross_pq(key)) / (1j * x * ((i - j) - 1))

    return dict(Z=Zfull, Zq=Z, zf=zf, Om=omdot, Gam=gamdot, H=Hvec, F=Fvec,
                a=a, qa=qa, V10=V10, V01=V01, K=iK / 1j, iK=iK, c=c,
                kappa=kap, delta=delta, x=x, pair=pair)


if __name__ == "__main__":
    p = m.ModelParams(0.8)
    rb = pipeline2(p, "bc", "projected")
    rp = pipeline2(p, "paper", "literal")
    print("bc/projected:  Zp21 =", get(rb['zf'], 2, 1), " Re(iK) =", rb['iK'].real,
          " Im(K) =", rb['K'].imag)
    print("   q_a11 =", rb['qa'][(1, 1)])
    print("   Re(q_a11 . V10):", np.real(rb['qa'][(1, 1)] @ rb['V10']))
    print("paper/literal: Zp21 =", get(rp['zf'], 2, 1), " Re(iK) =", rp['iK'].real)
    print("route-(ii) literal:", re_zp21_paper_route(p))
    print()
    print("  sigma      f(s)      route-ii     mech-bc      mech-paper-lit")
    for s_ in [0.712, 0.72, 0.75, 0.8, 0.85, 0.9, 0.93, 0.955]:
        pp = m.ModelParams(s_)
        r1 = pipeline2(pp, "bc", "projected")
        r2 = pipeline2(pp, "paper", "literal")
        print(f"  {s_:.3f}  {f_sigma_literal(s_):+.3e}  {re_zp21_paper_route(pp):+.4e}"
              f"  {r1['iK'].real:+.4e}  {r2['iK'].real:+.4e}")
    for om_, nu_ in [(0.25, 1.0), (4.0, 1.0), (1.0, 0.3), (1.0, 3.0)]:
        pp = m.ModelParams(0.8, nu_, om_)
        r1 = pipeline2(pp, "bc", "projected")
        print(f"  om={om_} nu={nu_}: mech-bc Re(iK) = {r1['iK'].real:+.4e}, "
              f"route-ii = {re_zp21_paper_route(pp):+.4e}")
