#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "dirac/types.hpp"
#include "oracles.hpp"

using namespace dirac;

TEST_CASE("jump factor matches the generic matrix exponential") {
    std::mt19937 gen(11);
    std::uniform_real_distribution<double> wt(0.05, 5.0);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
    for (int trial = 0; trial < 50; ++trial) {
        const double t = wt(gen), a = angle(gen);
        const PointMass pm{0.5, t * std::cos(a), t * std::sin(a)};
        const Matrix2r Jmu = symplectic_j() * pm.matrix();

        const Matrix2r left = jump_factor(pm, JumpDirection::left_to_right);
        const Matrix2r right = jump_factor(pm, JumpDirection::right_to_left);
        const Matrix2r ref_left = oracles::expm_real(-Jmu);
        const Matrix2r ref_right = oracles::expm_real(Jmu);

        CHECK((left - ref_left).cwiseAbs().maxCoeff() < 1e-12 * std::exp(t));
        CHECK((right - ref_right).cwiseAbs().maxCoeff() < 1e-12 * std::exp(t));
        CHECK(std::abs(left.determinant() - 1.0) < 1e-13 * std::exp(2.0 * t));
        // inverse pair
        CHECK((left * right - Matrix2r::Identity()).cwiseAbs().maxCoeff() < 1e-13 * std::exp(2.0 * t));
    }
}

TEST_CASE("jump factor determinant stays at 1 for t in (0, 5)") {
    std::mt19937 gen(7);
    std::uniform_real_distribution<double> wt(1e-6, 5.0);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const double t = wt(gen), a = angle(gen);
        const PointMass pm{1.0, t * std::cos(a), t * std::sin(a)};
        const Matrix2r F = jump_factor(pm, JumpDirection::left_to_right);
        worst = std::max(worst, std::abs(F.determinant() - 1.0) / std::exp(2.0 * t));
    }
    CHECK(worst < 1e-13);
}

TEST_CASE("jump factor rejects a degenerate point mass") {
    CHECK_THROWS_AS(jump_factor(PointMass{0.5, 0.0, 0.0}, JumpDirection::left_to_right),
                    std::invalid_argument);
}

TEST_CASE("closed-form example: pure mu2 point mass") {
    const double s = 0.9;
    const PointMass pm{0.3, 0.0, s};
    const Matrix2r F = jump_factor(pm, JumpDirection::left_to_right);
    // cosh(s) I - sinh(s)/s * J [[0,s],[s,0]]
    Matrix2r Jm;
    Jm << -s, 0.0, 0.0, s;
    const Matrix2r expected = std::cosh(s) * Matrix2r::Identity() - std::sinh(s) / s * Jm;
    CHECK((F - expected).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("g_of agrees with the direct series") {
    CHECK((g_of(Matrix2r::Zero()) - Matrix2r::Identity()).cwiseAbs().maxCoeff() == 0.0);

    std::mt19937 gen(3);
    std::uniform_real_distribution<double> wt(0.05, 2.0);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
    for (int trial = 0; trial < 50; ++trial) {
        const double t = wt(gen), a = angle(gen);
        const PointMass pm{1.0, t * std::cos(a), t * std::sin(a)};
        const Matrix2r D = pm.matrix() * symplectic_j();
        CHECK((g_of(D) - oracles::g_series(D)).cwiseAbs().maxCoeff() < 1e-12);
    }

    // t = 0.7 spot value per the direct series
    const PointMass pm{1.0, 0.7 * std::cos(1.1), 0.7 * std::sin(1.1)};
    const Matrix2r D = pm.matrix() * symplectic_j();
    CHECK((g_of(D) - oracles::g_series(D)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("g_of limit near t = 0: I + D/2") {
    const double t = 1e-9;
    const PointMass pm{1.0, t, 0.0};
    const Matrix2r D = pm.matrix() * symplectic_j();
    const Matrix2r expected = Matrix2r::Identity() + 0.5 * D;
    CHECK((g_of(D) - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("small-t hyperbolic branches agree where both are valid") {
    // below ~1e-2 the Taylor truncation is < 1e-22 relative, so forcing each
    // branch via the cut parameter pins both against each other
    for (double t : {2e-4, 1e-3, 5e-3, 1e-2}) {
        const double taylor_s = sinhc(t, /*cut=*/1.0);
        const double direct_s = sinhc(t, /*cut=*/0.0);
        CHECK(taylor_s == doctest::Approx(direct_s).epsilon(1e-14));
        const double taylor_c = coshm1_over_t2(t, 1.0);
        const double direct_c = coshm1_over_t2(t, 0.0);
        CHECK(taylor_c == doctest::Approx(direct_c).epsilon(1e-14));
    }
}

TEST_CASE("GLFunction symmetrizes exactly") {
    const double N = 1.0;
    GridFunction1D raw;
    raw.lo = -2.0 * N;
    raw.hi = 2.0 * N;
    raw.samples.resize(201);
    std::mt19937 gen(5);
    std::normal_distribution<double> g(0.0, 1.0);
    for (Eigen::Index i = 0; i < raw.samples.size(); ++i)
        raw.samples[i] = Complex(g(gen), g(gen));

    const GLFunction phi(N, raw);
    const Eigen::Index n = phi.grid().count();
    for (Eigen::Index i = 0; i < n; ++i) {
        const Complex a = phi.grid().samples[i];
        const Complex b = phi.grid().samples[n - 1 - i];
        CHECK(a == std::conj(b)); // bitwise after construction
    }

    SUBCASE("antiderivative reflects exactly") {
        for (double x : {0.1, 0.37, 1.9}) {
            const Complex p = phi.antiderivative(x);
            const Complex m = phi.antiderivative(-x);
            CHECK(m == -std::conj(p));
        }
        CHECK(phi.antiderivative(0.0) == Complex(0.0, 0.0));
    }
}

TEST_CASE("GLFunction rejects an even sample count") {
    GridFunction1D raw;
    raw.lo = -2.0;
    raw.hi = 2.0;
    raw.samples = Eigen::VectorXcd::Zero(200);
    CHECK_THROWS_AS(GLFunction(1.0, raw), std::invalid_argument);
}

TEST_CASE("measure validation") {
    DiracMeasure mu = DiracMeasure::zero(1.0, 10);
    mu.point_masses.push_back(PointMass{0.5, 0.1, 0.0});
    mu.point_masses.push_back(PointMass{0.5, 0.2, 0.0});
    CHECK_THROWS_AS(mu.validate(), std::invalid_argument); // equal positions

    mu.point_masses[1].position = 0.4; // decreasing
    CHECK_THROWS_AS(mu.validate(), std::invalid_argument);

    mu.point_masses.pop_back();
    mu.point_masses[0].mu1 = 0.0; // zero weight
    CHECK_THROWS_AS(mu.validate(), std::invalid_argument);

    mu.point_masses.clear();
    mu.mu1[3] = std::nan("");
    CHECK_THROWS_AS(mu.validate(), std::invalid_argument);
}

TEST_CASE("variation sums density and atoms") {
    DiracMeasure mu = DiracMeasure::zero(2.0, 201);
    mu.mu2.setConstant(0.25); // integral over [0, 2] = 0.5
    mu.point_masses.push_back(PointMass{1.0, 0.0, -0.125});
    CHECK(mu.variation(2, 2.0) == doctest::Approx(0.625).epsilon(1e-12));
    CHECK(mu.variation(2, 0.5) == doctest::Approx(0.125).epsilon(1e-12));
    CHECK(mu.variation(1, 2.0) == doctest::Approx(0.0));
}

TEST_CASE("canonical system helpers") {
    CanonicalSystem H = CanonicalSystem::identity(1.0, 11);
    CHECK(H.max_det_deviation() == 0.0);
    CHECK(H.min_psd_margin() == 1.0);
    H.validate();

    H.h(1, 4) = 2.0; // det < 0 there
    CHECK_THROWS_AS(H.validate(), std::invalid_argument);
}
