#!/usr/bin/env python3
"""Independent oracle for the converter admittance surrogates.

Each control strategy is written as a flat set of linear small-signal
equations in named signals (powers, angles, internal EMF, currents) and
solved with mpmath at high precision for unit terminal-voltage
perturbations.  This does not use the A(s)/B(s) elimination that the C++
library performs, so agreement between the two is a real cross-check.

Usage:
    converter_oracle.py admittance <strategy> <f_hz> [ud uq id iq]
    converter_oracle.py sweep <strategy> <lg> <tau> [ud uq id iq]
"""
import sys
import mpmath as mp

mp.mp.dps = 40

OMEGA0 = 2 * mp.pi * 60

DEFAULTS = {
    "l_f": mp.mpf("0.1"), "r_f": mp.mpf("0.01"),
    "m_p": mp.mpf("0.05"), "m_q": mp.mpf("0.05"), "omega_f": 2 * mp.pi * 5,
    "t_j": mp.mpf(4), "d_p": mp.mpf(20),
    "eta": mp.mpf("0.05"), "alpha": mp.mpf(10),
    "kp": mp.mpf("0.25"), "ki": mp.mpf(50),
    "kp_v": mp.mpf("0.25"), "ki_v": mp.mpf(50),
    "kp_pll": mp.mpf("0.2"), "ki_pll": mp.mpf(42),
    "omega_i": 2 * mp.pi * 300,
    "omega_m": 2 * mp.pi * 20,
}


class System:
    def __init__(self):
        self.names = []
        self.rows = []

    def var(self, *names):
        for n in names:
            if n not in self.names:
                self.names.append(n)

    def eq(self, coefs, rhs=0):
        """sum(coef * var) = rhs"""
        for n in coefs:
            self.var(n)
        self.rows.append((coefs, rhs))

    def solve(self):
        n = len(self.names)
        assert len(self.rows) == n, (len(self.rows), n)
        a = mp.matrix(n, n)
        b = mp.matrix(n, 1)
        idx = {name: i for i, name in enumerate(self.names)}
        for r, (coefs, rhs) in enumerate(self.rows):
            for name, c in coefs.items():
                a[r, idx[name]] += c
            b[r] = rhs
        x = mp.lu_solve(a, b)
        return {name: x[idx[name]] for name in self.names}


def filter_eq(sys_, p, s, i_names, e_names, u_names):
    """l_f * Z_f(s) * I = E - U, Z_f = [[s/w0 + tf, -1], [1, s/w0 + tf]]."""
    lf = p["l_f"]
    zt = s / OMEGA0 + p["r_f"] / lf
    idn, iqn = i_names
    ed, eq = e_names
    ud, uq = u_names
    sys_.eq({idn: lf * zt, iqn: -lf, ed: -1, ud: 1})
    sys_.eq({idn: lf, iqn: lf * zt, eq: -1, uq: 1})


def power_eqs(sys_, op, i_names=("Id", "Iq")):
    ud0, uq0, id0, iq0 = op
    idn, iqn = i_names
    sys_.eq({"P": 1, "Ud": -id0, "Uq": -iq0, idn: -ud0, iqn: -uq0})
    sys_.eq({"Q": 1, "Ud": iq0, "Uq": -id0, idn: -uq0, iqn: ud0})


def internal_emf(p, op):
    ud0, uq0, id0, iq0 = op
    lf, rf = p["l_f"], p["r_f"]
    ed0 = ud0 + rf * id0 - lf * iq0
    eq0 = uq0 + lf * id0 + rf * iq0
    return ed0, eq0


def pll_eqs(sys_, p, s, op):
    ud0, uq0, _, _ = op
    umag = mp.sqrt(ud0 ** 2 + uq0 ** 2)
    c0, s0 = ud0 / umag, uq0 / umag
    # uqc = -s0 Ud + c0 Uq - |U0| thp
    sys_.eq({"uqc": 1, "Ud": s0, "Uq": -c0, "thp": umag})
    # s * thp = w0 (kp uqc + x); s x = ki uqc
    sys_.eq({"thp": s, "uqc": -OMEGA0 * p["kp_pll"], "xpll": -OMEGA0})
    sys_.eq({"xpll": s, "uqc": -p["ki_pll"]})
    return c0, s0


def droop_reference(sys_, p, s, op, kind):
    """Adds thE, Em, Ed_ref, Eq_ref for the droop-family laws."""
    ed0, eq0 = internal_emf(p, op)
    e0 = mp.sqrt(ed0 ** 2 + eq0 ** 2)
    ce, se = ed0 / e0, eq0 / e0
    lp = p["omega_f"] / (s + p["omega_f"])
    if kind in ("droop", "voc", "pll_gfm"):
        sys_.eq({"w": 1, "P": p["m_p"] * lp})
    elif kind == "vsg":
        sys_.eq({"w": p["t_j"] * s + p["d_p"], "P": 1})
    elif kind == "vfc":
        sys_.eq({"w": 1, "P": p["m_p"]})
    sys_.eq({"thE": s, "w": -OMEGA0})
    if kind in ("droop", "vsg", "pll_gfm"):
        sys_.eq({"Em": 1, "Q": p["m_q"] * lp})
    elif kind == "voc":
        sys_.eq({"Em": s + p["eta"] * p["alpha"], "Q": p["eta"]})
    elif kind == "vfc":
        sys_.eq({"Em": 1})
    sys_.eq({"Edr": 1, "Em": -ce, "thE": e0 * se})
    sys_.eq({"Eqr": 1, "Em": -se, "thE": -e0 * ce})
    return ed0, eq0


def admittance(kind, s, op, params=None):
    p = dict(DEFAULTS)
    if params:
        p.update({k: mp.mpf(v) for k, v in params.items()})
    op = tuple(mp.mpf(v) for v in op)
    ud0, uq0, id0, iq0 = op
    cols = []
    for ud_in, uq_in in ((1, 0), (0, 1)):
        sy = System()
        sy.eq({"Ud": 1}, ud_in)
        sy.eq({"Uq": 1}, uq_in)
        if kind == "static_admittance":
            g = p.get("g", mp.mpf(1))
            sy.eq({"Id": 1, "Ud": g})
            sy.eq({"Iq": 1, "Uq": g})
        elif kind == "ideal_source":
            sy.eq({"Ez": 1})
            filter_eq(sy, p, s, ("Id", "Iq"), ("Ez", "Ez"), ("Ud", "Uq"))
        elif kind in ("droop", "vsg", "voc", "vfc"):
            power_eqs(sy, op)
            droop_reference(sy, p, s, op, kind)
            filter_eq(sy, p, s, ("Id", "Iq"), ("Edr", "Eqr"), ("Ud", "Uq"))
        elif kind in ("pll_pq", "pll_pv"):
            power_eqs(sy, op)
            c0, s0 = pll_eqs(sy, p, s, op)
            pi_p = p["kp"] + p["ki"] / s
            lm = p["omega_m"] / (s + p["omega_m"])
            sy.eq({"idr": 1, "P": pi_p * lm})
            if kind == "pll_pq":
                sy.eq({"iqr": 1, "Q": -pi_p * lm})
            else:
                umag = mp.sqrt(ud0 ** 2 + uq0 ** 2)
                pi_v = p["kp_v"] + p["ki_v"] / s
                sy.eq({"um": 1, "Ud": -ud0 / umag, "Uq": -uq0 / umag})
                sy.eq({"iqr": 1, "um": -pi_v * lm})
            ti = p["omega_i"] / (s + p["omega_i"])
            sy.eq({"idc": 1, "idr": -ti})
            sy.eq({"iqc": 1, "iqr": -ti})
            sy.eq({"Id": 1, "idc": -c0, "iqc": s0, "thp": iq0})
            sy.eq({"Iq": 1, "idc": -s0, "iqc": -c0, "thp": -id0})
        elif kind == "pll_gfm":
            power_eqs(sy, op)
            c0, s0 = pll_eqs(sy, p, s, op)
            ed0, eq0 = droop_reference(sy, p, s, op, kind)
            # reference and terminal voltage seen in the PLL frame
            edc0 = c0 * ed0 + s0 * eq0
            eqc0 = -s0 * ed0 + c0 * eq0
            udc0 = c0 * ud0 + s0 * uq0
            uqc0 = -s0 * ud0 + c0 * uq0
            sy.eq({"Edc": 1, "Edr": -c0, "Eqr": -s0, "thp": -eqc0})
            sy.eq({"Eqc": 1, "Edr": s0, "Eqr": -c0, "thp": edc0})
            sy.eq({"Udc": 1, "Ud": -c0, "Uq": -s0, "thp": -uqc0})
            sy.eq({"Uqc": 1, "Ud": s0, "Uq": -c0, "thp": udc0})
            filter_eq(sy, p, s, ("idr", "iqr"), ("Edc", "Eqc"), ("Udc", "Uqc"))
            ti = p["omega_i"] / (s + p["omega_i"])
            sy.eq({"idc": 1, "idr": -ti})
            sy.eq({"iqc": 1, "iqr": -ti})
            sy.eq({"Id": 1, "idc": -c0, "iqc": s0, "thp": iq0})
            sy.eq({"Iq": 1, "idc": -s0, "iqc": -c0, "thp": -id0})
        else:
            raise ValueError(kind)
        x = sy.solve()
        # load convention: Y = -dI_out/dU
        cols.append((-x["Id"], -x["Iq"]))
    return mp.matrix([[cols[0][0], cols[1][0]], [cols[0][1], cols[1][1]]])


def line_z(s, tau):
    a = s / OMEGA0 + tau
    return mp.matrix([[a, -1], [1, a]])


def sensitivity(y, lg, tau, s):
    return mp.inverse(mp.eye(2) + lg * line_z(s, tau) * y)


def sigma_max(m):
    h = m.H * m
    ev = mp.eig(h, left=False, right=False)
    return mp.sqrt(max(mp.re(e) for e in ev))


def line_operating_point(p_export, lg, tau):
    """U = 1 angle 0 exporting p_export into a grid of magnitude 1."""
    c = 1 - lg * tau * p_export
    a = lg ** 2 * (1 + tau ** 2)
    b = 2 * lg
    cc = c ** 2 + (lg * p_export) ** 2 - 1
    iq = (-b + mp.sqrt(b * b - 4 * a * cc)) / (2 * a)
    return (1, 0, p_export, iq)


def main(argv):
    if argv[1] == "admittance":
        kind, f = argv[2], mp.mpf(argv[3])
        op = tuple(argv[4:8]) if len(argv) >= 8 else (1, 0, 0, 0)
        y = admittance(kind, 2j * mp.pi * f, op)
        for i in range(2):
            for j in range(2):
                print(f"Y[{i}][{j}] = {mp.nstr(y[i, j], 17)}")
    elif argv[1] == "sweep":
        kind, lg, tau = argv[2], mp.mpf(argv[3]), mp.mpf(argv[4])
        op = line_operating_point(mp.mpf("0.5"), lg, tau)
        for k in range(-4 * 4, 3 * 4 + 1):
            f = mp.mpf(10) ** (mp.mpf(k) / 4)
            s = 2j * mp.pi * f
            fi = sigma_max(sensitivity(admittance(kind, s, op), lg, tau, s))
            print(f"{mp.nstr(f, 6):>10} {mp.nstr(fi, 10)}")


if __name__ == "__main__":
    main(sys.argv)
