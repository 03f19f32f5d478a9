"""Brute-force reference values for the corrector triple sums and the Hamiltonian.

Independent of the C++ code: cutoffs are re-derived from their definitions and
the commutator symbol uses adaptive quadrature instead of Gauss-Legendre.
Output is pasted into tests/test_energies.cpp.
"""
import math
import cmath
from functools import lru_cache

from scipy.integrate import quad

L = 2 * math.pi
KMAX = 85  # field support on the n = 256 grid


def g(t):
    return math.exp(-1.0 / t) if t > 0 else 0.0


def eta(x):
    a = abs(x)
    if a <= 1:
        return 1.0
    if a >= 2:
        return 0.0
    p, q = g(2 - a), g(a - 1)
    return p / (p + q)


def eta_p(x):
    a = abs(x)
    if a <= 1 or a >= 2:
        return 0.0
    u, v = 2 - a, a - 1
    p, q = g(u), g(v)
    dp, dq = p / u**2, q / v**2  # d/da of g(2-a) is -dp; of g(a-1) is +dq
    d = (-dp * (p + q) - p * (-dp + dq)) / (p + q) ** 2
    return d if x > 0 else -d


def phi(x):
    return eta(x) - eta(2 * x)


def phi_p(x):
    return eta_p(x) - 2 * eta_p(2 * x)


def tphi(x):
    return eta(x / 2) - eta(4 * x)


def omega(x, a):
    return -x * abs(x) ** a


def Omega2(x1, x2, a):
    return omega(x1 + x2, a) - omega(x1, a) - omega(x2, a)


@lru_cache(maxsize=None)
def chi(x1, x2, N):
    v, _ = quad(lambda th: phi_p((th * x1 + x2) / N), 0, 1, epsabs=1e-15, epsrel=1e-13, limit=200)
    return -1j * v


def chi1(x1, x2, N, s):
    out = phi((x1 + x2) / N)
    if out == 0:
        return 0j
    w = (math.sqrt(1 + N * N) / N) ** (2 * s)
    inner = phi(x2 / N) + 0j
    t = tphi(x2 / N)
    if t != 0:
        inner += 2j * (x1 + x2) / N * chi(x1, x2, N) * t
    return w * inner * out


def field(j, salt):
    c = {}
    for k in range(1, KMAX + 1):
        amp = 0.5 / (1 + k) ** 0.6 * (1 + 0.5 * math.cos(k * (j + salt)))
        c[k] = amp * cmath.exp(1j * (0.37 * k * (j + 1) + 0.11 * (j + salt)))
    return c


def coeff(c, k):
    if k == 0:
        return 0j
    if abs(k) > KMAX:
        return 0j
    return c[k] if k > 0 else c[-k].conjugate()


def trilinear(a, b, cc, sym, weight, N):
    """L * Re sum_{k1 != 0, k2} sym * weight * a_k1^ll b_k2^sim c_{-k1-k2}^sim."""
    acc = 0j
    for k1 in range(-KMAX, KMAX + 1):
        if k1 == 0:
            continue
        wl = eta(32 * k1 / N)
        if wl == 0:
            continue
        for k2 in range(-KMAX, KMAX + 1):
            wb = tphi(k2 / N)
            if wb == 0:
                continue
            k3 = -k1 - k2
            wc = tphi(k3 / N)
            if wc == 0 or coeff(cc, k3) == 0:
                continue
            om = Omega2(k1, k2, ALPHA)
            if abs(om) <= 1e-10 * abs(k1) * N**ALPHA:
                continue
            acc += sym(k1, k2) / om * weight(k1, k2) * wl * coeff(a, k1) * wb * coeff(b, k2) * wc * coeff(cc, k3)
    return L * acc.real, L * acc.imag


ALPHA = 1.0
S = 0.3
SIGMA = -0.2
SCALES = (32, 64, 128)

if __name__ == "__main__":
    print("// E1_N(u_j), alpha = 1, s = 0.3; rows j = 0..9, columns N = 32, 64, 128")
    for j in range(10):
        u = field(j, 0)
        vals = []
        for N in SCALES:
            v, im = trilinear(u, u, u, lambda a, b: chi1(a, b, N, S), lambda a, b: a, N)
            vals.append(v)
        print("    {" + ", ".join(f"{v:.17g}" for v in vals) + "},")
    print("// E~2_N(z_j, w_j), sigma = -0.2; z = field(j, 0), w = field(j, 10)")
    for j in range(10):
        z, w = field(j, 0), field(j, 10)
        vals = []
        for N in SCALES:
            f = (1 + 1 / N**2) * (math.sqrt(1 + N * N) / N) ** (2 * SIGMA)
            v, im = trilinear(w, z, w, lambda a, b: f * phi((a + b) / N) ** 2, lambda a, b: a + b, N)
            vals.append(v)
        print("    {" + ", ".join(f"{v:.17g}" for v in vals) + "},")
    # Hamiltonian of 0.1 cos x + 0.05 cos 2x, alpha = 1/2: 1/2 L sum |xi|^alpha |c|^2 + 1/3 L sum c c c
    c = {1: 0.05, 2: 0.025}
    cf = lambda k: c.get(abs(k), 0.0)
    quadp = 0.5 * L * sum(abs(k) ** 0.5 * cf(k) ** 2 for k in range(-2, 3))
    cub = L * sum(cf(k1) * cf(k2) * cf(-k1 - k2) for k1 in range(-2, 3) for k2 in range(-2, 3)) / 3
    print(f"// hamiltonian oracle: {quadp + cub:.17g}")
