#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "dirac/forward.hpp"
#include "dirac/fourier.hpp"
#include "dirac/gl.hpp"
#include "dirac/series.hpp"
#include "oracles.hpp"

using namespace dirac;

namespace {

GLFunction triangle_phi(double N, double halfwidth, double depth, Eigen::Index count = 801) {
    GridFunction1D g;
    g.lo = -2.0 * N;
    g.hi = 2.0 * N;
    g.samples.resize(count);
    for (Eigen::Index i = 0; i < count; ++i) {
        const double x = g.lo + (g.hi - g.lo) * double(i) / double(count - 1);
        g.samples[i] = -depth * std::max(0.0, 1.0 - std::abs(x) / halfwidth);
    }
    return GLFunction(N, g);
}

double sup_distance(const GLFunction& a, const GLFunction& b, double lo_abs, double hi_abs) {
    double sup = 0.0;
    const GridFunction1D& ga = a.grid();
    for (Eigen::Index i = 0; i < ga.count(); ++i) {
        const double t = ga.node(i);
        if (std::abs(t) < lo_abs || std::abs(t) > hi_abs) continue;
        sup = std::max(sup, std::abs(ga.samples[i] - b(t)));
    }
    return sup;
}

} // namespace

TEST_CASE("transform round trip pins the e^{izs} convention") {
    // Gaussian test function: effectively band-limited and compactly
    // supported at double precision, so both trapezoid sums are geometric
    GridFunction1D f;
    f.lo = -8.0;
    f.hi = 8.0;
    f.samples.resize(1601);
    for (Eigen::Index i = 0; i < f.count(); ++i) {
        const double x = f.node(i);
        f.samples[i] = Complex(std::exp(-x * x), 0.3 * x * std::exp(-x * x));
    }

    GridFunction1D fhat;
    fhat.lo = -30.0;
    fhat.hi = 30.0;
    fhat.samples.resize(2401);
    Eigen::VectorXd freq(fhat.count());
    for (Eigen::Index i = 0; i < fhat.count(); ++i) freq[i] = fhat.node(i);
    fhat.samples = spectral_transform(f, freq);

    // analytic sign check: with the e^{+itx} convention,
    //   hat{exp(-x^2)}(t) = sqrt(pi) e^{-t^2/4} and
    //   hat{0.3 i x exp(-x^2)}(t) = -0.3 (t/2) sqrt(pi) e^{-t^2/4}  (real!)
    const Complex at1 = fhat.value(1.0);
    const double expect = std::sqrt(M_PI) * std::exp(-0.25) * (1.0 - 0.15);
    CHECK(at1.real() == doctest::Approx(expect).epsilon(1e-9));
    CHECK(std::abs(at1.imag()) < 1e-9);

    const GridFunction1D back = inverse_spectral_transform(fhat, -4.0, 4.0, 801);
    double err = 0.0;
    for (Eigen::Index i = 0; i < back.count(); ++i)
        err = std::max(err, std::abs(back.samples[i] - f.value(back.node(i))));
    CHECK(err < 1e-10);
}

TEST_CASE("free field gives phi = 0") {
    const double N = 1.0;
    const GridFunction1D E = sample_db_function(DiracMeasure::zero(N), N, 12.0 * M_PI);
    const GLFunction phi = phi_from_E(E, N, 1025);
    double sup = 0.0;
    for (Eigen::Index i = 0; i < phi.grid().count(); ++i)
        sup = std::max(sup, std::abs(phi.grid().samples[i]));
    CHECK(sup < 1e-6);
}

TEST_CASE("phi from a smooth coefficient is admissible") {
    const double N = 1.0;
    const DiracMeasure mu = oracles::bump_measure(N, 0.6);
    const PhiFromDiracResult res = phi_from_dirac(mu, N);
    CHECK(res.max_det_deviation < 1e-9);

    // Hermitian symmetry is exact after construction
    const Eigen::Index n = res.phi.grid().count();
    for (Eigen::Index i = 0; i < n; ++i)
        CHECK(res.phi.grid().samples[i] ==
              std::conj(res.phi.grid().samples[n - 1 - i]));

    const PositivityReport rep = check_phi(res.phi, N, 129);
    CHECK(rep.passed);
    CHECK(rep.min_eigenvalue > 0.0);

    SUBCASE("min eigenvalue is stable under dim doubling") {
        const PositivityReport rep2 = check_phi(res.phi, N, 257);
        CHECK(std::abs(rep2.min_eigenvalue - rep.min_eigenvalue) <
              0.1 * std::abs(rep.min_eigenvalue));
    }
}

TEST_CASE("guards: coarse grid, vanishing E, unmet tail") {
    const double N = 1.0;
    GridFunction1D E;
    E.lo = -10.0;
    E.hi = 10.0;
    E.samples = Eigen::VectorXcd::Ones(21); // step 1 > pi/8
    CHECK_THROWS_AS(phi_from_E(E, N, 101), std::invalid_argument);

    const GridFunction1D good = sample_db_function(DiracMeasure::zero(N), N, 4.0 * M_PI);
    GridFunction1D bad = good;
    bad.samples[bad.count() / 3] = Complex(1e-9, 0.0);
    CHECK_THROWS_AS(phi_from_E(bad, N, 101), NumericalGuardError);

    GridFunction1D tail = good;
    tail.samples.setConstant(Complex(0.5, 0.0)); // g = 3 everywhere, tail unmet
    CHECK_THROWS_AS(phi_from_E(tail, N, 101), NumericalGuardError);
}

TEST_CASE("series route and E route produce the same phi") {
    const double N = 1.0;
    DiracMeasure mu = oracles::bump_measure(N, 0.12);
    // keep the series hypothesis comfortable
    REQUIRE(std::max(mu.variation(1, N), mu.variation(2, N)) < 0.125);

    const GridFunction1D E = sample_db_function(mu, N, 24.0);
    const GLFunction phi_E = phi_from_E(E, N, 1025);

    const CouplingMeasure P = coupling_measure(mu);
    auto rho_hat = [&](double t) {
        Complex acc = 0.0;
        for (int n = 1; n <= 4; ++n) acc += iterated_v(P, n, N, Complex(t, 0.0), 768);
        return 2.0 * acc;
    };
    const GLFunction phi_S =
        phi_from_series(rho_hat, N, E.hi, E.count(), 1025);

    CHECK(sup_distance(phi_E, phi_S, 0.0, 2.0 * N) < 1e-4);

    SUBCASE("g_hat from the series is real on the real axis") {
        double worst = 0.0;
        for (double t : {-20.0, -3.2, 0.0, 1.7, 19.0}) {
            const Complex r = rho_hat(t);
            const Complex ghat = r + std::conj(r) + r * std::conj(r);
            worst = std::max(worst, std::abs(ghat.imag()));
        }
        CHECK(worst <= 1e-12);
    }
}

TEST_CASE("phi_from_series trivial and guard cases") {
    const double N = 1.0;
    const GLFunction phi =
        phi_from_series([](double) { return Complex(0.0, 0.0); }, N, 20.0, 257, 257);
    double sup = 0.0;
    for (Eigen::Index i = 0; i < phi.grid().count(); ++i)
        sup = std::max(sup, std::abs(phi.grid().samples[i]));
    CHECK(sup < 1e-12);

    CHECK_THROWS_AS(phi_from_series([](double) { return Complex(-1.0, 0.0); }, N, 20.0,
                                    257, 257),
                    NumericalGuardError); // 1 + g_hat = 0
}

TEST_CASE("check_phi: zero kernel has minimum eigenvalue 1") {
    const PositivityReport rep = check_phi(GLFunction::zero(1.0), 1.0, 64);
    CHECK(rep.min_eigenvalue == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep.passed);
    CHECK_THROWS_AS(check_phi(GLFunction::zero(1.0), 1.0, 8), std::invalid_argument);
}

TEST_CASE("check_phi fails the deep triangle well and a witness confirms") {
    const double N = 1.0;
    const GLFunction bad = triangle_phi(N, 0.5, 4.0);
    const PositivityReport rep = check_phi(bad, N, 129);
    CHECK(!rep.passed);
    CHECK(rep.min_eigenvalue < 0.0);

    // brute-force witness: indicators of growing halfwidth, independent quadrature
    double best = 1e300;
    for (double b : {0.2, 0.4, 0.6, 0.8, 1.0}) {
        auto f = [b](double t) { return std::abs(t) <= b ? Complex(1.0, 0.0) : Complex(0.0, 0.0); };
        best = std::min(best, oracles::quadratic_form(bad, N, f));
    }
    CHECK(best < 0.0);

    // a shallow triangle stays admissible
    const PositivityReport ok = check_phi(triangle_phi(N, 0.5, 0.5), N, 129);
    CHECK(ok.passed);
}

TEST_CASE("mollified spectral route: free measure fades along the width ladder") {
    const double N = 1.0;
    double prev = 1e300;
    double last = 0.0;
    for (double W : {4.0, 8.0, 16.0}) {
        const SpectralMeasure rho =
            spectral_measure(DiracMeasure::zero(N), N, 0.0, -6.5 * W, 6.5 * W);
        const MollifiedGL m = phi_from_spectral_measure(rho, W, 1025);
        double sup = 0.0;
        for (Eigen::Index i = 0; i < m.phi.grid().count(); ++i) {
            const double t = m.phi.grid().node(i);
            if (std::abs(t) < 0.1 || std::abs(t) > 1.5) continue;
            sup = std::max(sup, std::abs(m.phi.grid().samples[i]));
        }
        CHECK(sup < prev);
        prev = sup;
        last = sup;
    }
    CHECK(last < 1e-6);
}

TEST_CASE("mollified spectral route agrees with the E route") {
    const double N = 1.0;
    // both coefficient components, so the spectral measure is asymmetric and
    // the imaginary part of phi pins the orientation of the transform
    const DiracMeasure mu = oracles::random_smooth_measure(N, 21, 0.5);
    const PhiFromDiracResult direct = phi_from_dirac(mu, N);

    const double W = 16.0;
    const SpectralMeasure rho = spectral_measure(mu, N, M_PI / 2.0, -6.5 * W, 6.5 * W);
    const MollifiedGL mol = phi_from_spectral_measure(rho, W, 1025);

    const double dist = sup_distance(mol.phi, direct.phi, 0.1, 1.5);
    CHECK(dist < 0.02);

    double im_scale = 0.0;
    for (Eigen::Index i = 0; i < direct.phi.grid().count(); ++i)
        im_scale = std::max(im_scale, std::abs(direct.phi.grid().samples[i].imag()));
    CHECK(im_scale > 5.0 * dist); // the agreement really constrains Im phi
}

TEST_CASE("mollified spectral route guards") {
    SpectralMeasure rho;
    rho.N = 1.0;
    rho.atoms = {SpectralAtom{-3.0, 1.0}, SpectralAtom{3.0, 1.0}};
    CHECK_THROWS_AS(phi_from_spectral_measure(rho, 8.0, 257), NumericalGuardError);
}
