"""Reference values for the integration tests.

Everything here is computed with mpmath at 30 digits in the (theta, lambda)
parameterisation of the horseshoe: theta | lambda ~ N(0, lambda^2 tau^2),
lambda ~ half-Cauchy(0, 1).  Given lambda the model is conjugate, so each
posterior functional is a one-dimensional lambda integral of a Gaussian
closed form.  The crate itself works with the shrinkage weight z and the
integrals I_k, so the two routes share no code or formulas.

Run: python3 tools/derive_oracles.py
"""

import random

import mpmath as mp

mp.mp.dps = 30


def lam_weights(y, tau):
    """Unnormalised posterior density of lambda and the implied (mean, var) of theta."""
    y, tau = mp.mpf(y), mp.mpf(tau)

    def joint(lam):
        s = (lam * tau) ** 2
        v = 1 + s
        return 2 / (mp.pi * (1 + lam**2)) * mp.exp(-(y**2) / (2 * v)) / mp.sqrt(2 * mp.pi * v)

    def cond(lam):
        s = (lam * tau) ** 2
        w = s / (1 + s)
        return w * y, w

    return joint, cond


def lam_quad(f, tau):
    # Break the half-line where lambda * tau crosses the scales that matter.
    tau = mp.mpf(tau)
    pts = sorted({mp.mpf(0), mp.mpf(1), 1 / tau, 10 / tau, 100 / tau, 1e4 / tau})
    return mp.quad(f, pts + [mp.inf])


def marginal(y, tau):
    joint, _ = lam_weights(y, tau)
    return lam_quad(joint, tau)


def moments(y, tau):
    joint, cond = lam_weights(y, tau)
    z = lam_quad(joint, tau)
    m = lam_quad(lambda l: joint(l) * cond(l)[0], tau) / z
    second = lam_quad(lambda l: joint(l) * (cond(l)[1] + cond(l)[0] ** 2), tau) / z
    var = second - m**2

    def c4(l):
        mu, v = cond(l)
        d = mu - m
        return joint(l) * (d**4 + 6 * d**2 * v + 3 * v**2)

    fourth = lam_quad(c4, tau) / z
    return m, var, fourth


def cdf(y, tau, t):
    joint, cond = lam_weights(y, tau)
    z = lam_quad(joint, tau)

    def f(l):
        mu, v = cond(l)
        return joint(l) * mp.ncdf((t - mu) / mp.sqrt(v))

    return lam_quad(f, tau) / z


def quantile(y, tau, p, start):
    return mp.findroot(lambda t: cdf(y, tau, t) - p, start)


def i_k_direct(y, tau, k):
    y, tau, k = mp.mpf(y), mp.mpf(tau), mp.mpf(k)
    t2 = tau**2
    return mp.quad(lambda z: z**k / (t2 + (1 - t2) * z) * mp.exp(y**2 * z / 2), [0, 0.5, 1])


def main():
    print("I_{1/2}(3, 0.1)            =", mp.nstr(i_k_direct(3, 0.1, 0.5), 20))
    print("psi(0; tau=1)              =", mp.nstr(marginal(0, 1), 20))

    rng = random.Random(20170101)
    ys = [round(rng.gauss(0.0, 1.0), 6) for _ in range(50)]
    print("fixed sample               =", ys)
    print("loglik(sample; tau=0.2)    =", mp.nstr(mp.fsum(mp.log(marginal(y, 0.2)) for y in ys), 20))

    m, v, c4 = moments(1.5, 0.05)
    print("mean(1.5, 0.05)            =", mp.nstr(m, 20))
    print("var(1.5, 0.05)             =", mp.nstr(v, 20))
    _, _, c4 = moments(0, 1)
    print("fourth(0, 1)               =", mp.nstr(c4, 20))
    _, _, c4 = moments(1, 0.01)
    print("fourth(1, 0.01)            =", mp.nstr(c4, 20))

    vstar = mp.findroot(lambda v: v - mp.log(v) - mp.log(100), 6)
    print("kappa_threshold(0.01)      =", mp.nstr(mp.sqrt(2 * vstar), 20))

    h = mp.nsum(lambda m: 1 / (mp.factorial(m) * (m + mp.mpf(1) / 2)), [0, mp.inf])
    print("H_{1/2}(sqrt 2)            =", mp.nstr(h, 20))

    for y, t in [(0, 1e-4), ("zeta", 1e-4), (6, 1e-3)]:
        t = mp.mpf(t)
        yy = mp.sqrt(2 * mp.log(1 / t)) if y == "zeta" else mp.mpf(y)
        m = t * mp.diff(lambda s: mp.log(marginal(yy, s)), t)
        print(f"score m(y={y}, tau={mp.nstr(t, 3)})".ljust(27), "=", mp.nstr(m, 20))

    print("cdf(y=3, tau=0.1, t=1.5)   =", mp.nstr(cdf(3, 0.1, 1.5), 20))
    print("q975(y=4, tau=0.05)        =", mp.nstr(quantile(4, 0.05, 0.975, 5.5), 20))


if __name__ == "__main__":
    main()
