"""Acceptance criteria: one test per criterion, each printing a pass line
and enforcing its stated tolerance and runtime budget."""

import time
from fractions import Fraction

import numpy as np

from conespec import polytensor as pt
from conespec import verify
from conespec.closed_form import (gauge_exceptional_values,
                                  gauge_kernel_rates, modified_typeI_rates,
                                  typeI_eigenvalue, typeII_eigenvalue)
from conespec.expsum import (draw_discrete_instance, draw_expsum, ExpSum,
                             ExpTerm, three_interval, turan_discrete,
                             turan_integral)
from conespec.flat_kernel import (QuadraticField, divergence_free_nullspace,
                                  quadratic_flow_error,
                                  quadratic_lie_isomorphism)
from conespec.mode_ode import (degenerate_scan, empirical_l0,
                               indicial_spectrum, scalar_mode_system,
                               tensor_mode_system, three_annulus_verify)
from conespec.symbols import (gauged_reduction_value, lie_symbol,
                              linearized_obstruction_symbol,
                              linearized_scalar_symbol)

SEED = 42


def _report(num, label, t0, budget):
    dt = time.time() - t0
    print(f"[PASS] criterion {num}: {label} ({dt:.2f}s, budget {budget}s)")
    assert dt < budget


def test_criterion_1_closed_form_spectral_data():
    t0 = time.time()
    for n in range(3, 9):
        for j in range(1, 11):
            rp = gauge_kernel_rates(n, "typeI", j)
            alpha = Fraction(4 - n, 2)
            theta = Fraction(n - 2 + 2 * j, 2)
            assert rp.plus == alpha + theta and rp.minus == alpha - theta
            assert rp.plus == j + 1 and rp.minus == 3 - n - j
        for j in range(0, 11):
            rp = gauge_kernel_rates(n, "typeII", j)
            beta = Fraction(2 - n, 2)
            omega = Fraction(n - 2 + 2 * j, 2)
            assert rp.plus == beta + omega and rp.minus == beta - omega
            assert rp.plus == j and rp.minus == 2 - n - j
        E = gauge_exceptional_values(n, 10)
        assert all(isinstance(v, int) for v in E.values)
        assert 1 in E
    _report(1, "closed-form rates and exceptional sets, exact", t0, 1.0)


def test_criterion_2_probing_fidelity():
    t0 = time.time()
    assert verify.check_probed_displays()["passed"]
    for n in (3, 4, 6, 8):
        for t in np.linspace(-0.4, 0.4, 41):
            plus, _ = modified_typeI_rates(n, float(t), 1)
            assert abs((plus - 1) - 1) < 1e-12
    _report(2, "probed mode systems equal the displayed ODEs exactly",
            t0, 10.0)


def test_criterion_3_divergence_free_rigidity():
    t0 = time.time()
    pairs = [(3, 1)] + [(n, k) for n in (4, 6, 8) for k in range(1, n // 2)]
    for (n, k) in pairs:
        modes = ["degree1"]
        modes.append("log" if n == 2 * (k + 1) else "degree0")
        if n == 3:
            modes.append("n3_degree1")
        for mode in modes:
            rec = divergence_free_nullspace(n, k, mode)
            assert rec["dimension"] == 0, (n, k, mode)
    _report(3, "divergence-free homogeneous profiles vanish (exact)", t0, 10.0)


def test_criterion_4_symbol_checks():
    t0 = time.time()
    rng = np.random.default_rng(SEED)
    for _ in range(1000):
        n = int(rng.integers(3, 9))
        kmax = 1 if n == 3 else n // 2 - 1
        k = int(rng.integers(1, kmax + 1))
        xi = rng.standard_normal(n)
        xi /= np.linalg.norm(xi)
        v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        v /= np.linalg.norm(v)
        h = lie_symbol(xi, v)
        out = linearized_obstruction_symbol(n, k, xi, h)
        assert float(np.max(np.abs(out))) < 1e-12
        assert abs(linearized_scalar_symbol(n, xi, h)) < 1e-12
        # transverse traceless reduction
        g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        g = g + g.T
        g = g - np.outer(xi, xi @ g) - np.outer(g @ xi, xi) \
            + np.outer(xi, xi) * (xi @ g @ xi)
        g -= np.trace(g) * (np.eye(n) - np.outer(xi, xi)) / (n - 1)
        got = linearized_obstruction_symbol(n, k, xi, g)
        want = gauged_reduction_value(n, k, xi, g)
        scale = max(1.0, float(np.max(np.abs(g))))
        assert float(np.max(np.abs(got - want))) / scale < 1e-12
    _report(4, "symbol gauge invariance and transverse-traceless reduction",
            t0, 60.0)


def test_criterion_5_turan_suite():
    t0 = time.time()
    rng = np.random.default_rng(SEED)
    for _ in range(10000):
        z, c, m = draw_discrete_instance(rng, dmax=4, mmax=10)
        rec = turan_discrete(z, c, m)
        if rec["rhs"] == 0:
            continue
        assert rec["holds"]
    for _ in range(1000):
        d = int(rng.integers(1, 4))
        p = draw_expsum(rng, d)
        a = float(rng.uniform(0.05, 4.0))
        b = float(rng.uniform(a + 0.05, 5.0))
        rec = turan_integral(p, a, b, method="quad")
        assert rec["holds"] and rec["sup_form"]["holds"] \
            and rec["l2_form"]["holds"]
    for _ in range(1000):
        d = int(rng.integers(1, 4))
        budget = int(rng.integers(0, 6 - d))
        p = draw_expsum(rng, d, re_range=(0.05, 2.0))
        terms = list(p.terms)
        exps = p.distinct_exponents
        for _ in range(budget):
            zeta = exps[int(rng.integers(0, len(exps)))]
            pw = max(q.power for q in terms if q.exponent == zeta) + 1
            terms.append(ExpTerm(complex(rng.standard_normal(),
                                         rng.standard_normal()), zeta, pw))
        p = ExpSum(terms)
        assert p.big_m + p.d <= 5
        big_r = float(rng.uniform(0.2, 2.5))
        ell = int(rng.integers(1, 4))
        assert three_interval(p, big_r, ell, "growth")["holds"]
        pm = ExpSum([ExpTerm(q.coeff, -q.exponent.conjugate(), q.power)
                     for q in p.terms])
        assert three_interval(pm, big_r, ell, "decay")["holds"]
    _report(5, "power-sum inequality sweeps, zero violations", t0, 60.0)


def test_criterion_6_three_annulus():
    t0 = time.time()
    spectra = []
    for j in (1, 3):
        _, op = tensor_mode_system(4, 1, Fraction(0), j)
        spectra.append((f"gauged mode j={j}", indicial_spectrum(op)))
    _, op = scalar_mode_system(4, 1, 1)
    spectra.append(("scalar power s=1", indicial_spectrum(op)))
    for label, spec in spectra:
        beta = spec.beta
        assert beta is not None and not spec.partition()["zero"]
        rec = empirical_l0(spec, 0.45 * beta, trials=1000, seed=SEED)
        assert rec["L0"] is not None, label
        confirm = three_annulus_verify(spec, 0.45 * beta, rec["L0"],
                                       trials=1000, seed=SEED,
                                       turan_check=True)
        assert confirm["passed"], (label, confirm["failures"])
    _report(6, "annulus implications, dichotomy and pure-part bounds at "
               "the empirical threshold", t0, 120.0)


def test_criterion_7_degenerate_scan():
    t0 = time.time()
    tvals = [Fraction(1, 20), Fraction(-1, 20), Fraction(1, 10),
             Fraction(-1, 10)]
    rep = degenerate_scan(4, 1, tvals, 6)
    assert rep["findings"] == []
    rep0 = degenerate_scan(4, 1, [0], 2)
    assert any(w["j"] == 0 for w in rep0["witnesses_t0"])
    _report(7, "no divergence-compatible degenerate modes at small t; "
               "constant witness at t=0", t0, 300.0)


def test_criterion_8_companion_size():
    t0 = time.time()
    for (n, k) in [(4, 1), (6, 1), (6, 2)]:
        basis, op = tensor_mode_system(n, k, Fraction(1, 10), 2)
        spec = indicial_spectrum(op)
        assert len(basis) == 4
        assert spec.total_multiplicity == 8 * (k + 1)
    _report(8, "four-family mode systems carry total multiplicity 8(k+1)",
            t0, 120.0)


def test_criterion_9_bootstrap():
    t0 = time.time()
    from conespec.bootstrap import bootstrap_infinity, bootstrap_origin

    pairs = [(3, 1)] + [(n, k) for n in (4, 6, 8, 10)
                        for k in range(1, n // 2)]
    for (n, k) in pairs:
        terminal = n - 2 * k
        beta0 = 0.1
        while beta0 < terminal - 1e-9:
            assert bootstrap_infinity(n, k, beta0).order == terminal
            beta0 = round(beta0 + 0.1, 10)
        for sigma0 in (0.1, 0.5, 0.9, 1.3, 1.7):
            assert bootstrap_origin(n, k, sigma0).order == 2.0
    _report(9, "decay bootstrap terminates at the optimal orders", t0, 5.0)


def test_criterion_10_quadratic_field_facts():
    t0 = time.time()
    for n in range(2, 7):
        assert quadratic_lie_isomorphism(n)["invertible"]
    rng = np.random.default_rng(SEED)
    radii = [10 ** e for e in (-1.0, -1.5, -2.0, -2.5, -3.0)]
    for _ in range(5):
        X = QuadraticField.random(4, rng)
        rec = quadratic_flow_error(X, radii, rng=rng)
        assert rec["slope"] is not None
        assert abs(rec["slope"] - 2.0) <= 0.1
    _report(10, "quadratic Lie isomorphism and flow-error slope 2.0±0.1",
            t0, 60.0)
