#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "oracles/frozen.hpp"
#include "sigma2/concavity.hpp"

using namespace sigma2;

namespace {

Eigen::MatrixXcd random_hermitian(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> N;
    Eigen::MatrixXcd p(n, n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) p(i, k) = {N(rng), N(rng)};
    return 0.5 * (p + p.adjoint());
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

} // namespace

TEST_SUITE("concavity") {

TEST_CASE("assembly") {
    const ConcavityMatrix m = assemble(Spectrum{1.0, 1.0, 1.0});
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) CHECK(m.entries(i, k) == doctest::Approx(i == k ? 4.0 / 9.0 : 1.0 / 9.0));
    CHECK(m.entries == m.entries.transpose());
    CHECK(assemble(Spectrum{3.0, 2.0, 1.0}).entries(0, 0) ==
          doctest::Approx(frozen::kConcavity11_321).epsilon(1e-15));
    for (const Spectrum& eta : sample_gamma_k(5, 2, 20, 4)) {
        CHECK(assemble(eta).entries == -log_sigma2_jet(eta).hess_diag);
    }
    CHECK_THROWS_AS(assemble(Spectrum{2.0, -0.5}), ConeViolation);
}

TEST_CASE("quadratic form") {
    const Spectrum ones{1.0, 1.0, 1.0};
    CHECK(quad_form(ones, Eigen::MatrixXcd::Identity(3, 3)) == doctest::Approx(2.0));
    CHECK(quad_form(ones, Eigen::MatrixXcd::Zero(3, 3)) == 0.0);
    Eigen::MatrixXcd bad = Eigen::MatrixXcd::Zero(3, 3);
    bad(0, 1) = 1.0;
    CHECK_THROWS_AS(quad_form(ones, bad), InvalidArgument);
}

TEST_CASE("determinant identity examples") {
    const DetIdentity d = det_identity(Spectrum{1.0, 1.0, 1.0});
    CHECK(d.det == doctest::Approx(frozen::kDet_111).epsilon(1e-14));
    CHECK(d.predicted == doctest::Approx(frozen::kDet_111).epsilon(1e-14));
    CHECK(det_identity(Spectrum{1.0, 1.0}).predicted == doctest::Approx(1.0));
    CHECK(assemble(Spectrum{1.0, 1.0}).entries.isApprox(Eigen::Matrix2d::Identity()));
}

TEST_CASE("spectrum at the symmetric point") {
    const ConcavitySpectrum sp = spectral(assemble(Spectrum{1.0, 1.0, 1.0}));
    CHECK(sp.kappas[0] == doctest::Approx(frozen::kKappa1_111).epsilon(1e-13));
    CHECK(sp.kappas[1] == doctest::Approx(frozen::kKappa2_111).epsilon(1e-13));
    CHECK(sp.kappas[2] == doctest::Approx(frozen::kKappa2_111).epsilon(1e-13));
    CHECK(sp.simple(0));
    CHECK_FALSE(sp.simple(2));
    CHECK(sp.cluster[1] == sp.cluster[2]);
}

TEST_CASE("weyl envelope at the symmetric point") {
    const WeylEnvelope w = weyl_envelope(Spectrum{1.0, 1.0, 1.0});
    CHECK(w.a1 == doctest::Approx(12.0));
    CHECK(w.kappa1_lo == doctest::Approx(6.0 / 9.0));
    CHECK(w.kappa1_hi == doctest::Approx(15.0 / 9.0));
    CHECK(w.kappa_tail_hi == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("elimination eigenvector") {
    SUBCASE("degenerate symmetric point falls back to kernel extraction") {
        const Spectrum ones{1.0, 1.0, 1.0};
        const ConcavityMatrix m = assemble(ones);
        const double kappa = spectral(m).kappas[2];
        Eigen::VectorXd v;
        try {
            v = min_eigvec_elimination(ones, kappa).normalized();
        } catch (const EliminationDegenerate&) {
            v = kernel_vector(m.entries, kappa);
        }
        CHECK(std::abs(v.norm() - 1.0) < 1e-12);
        CHECK((m.entries * v - kappa * v).norm() <= 1e-9);
    }
    SUBCASE("closed-form oracle at a spread spectrum") {
        const Spectrum eta{10.0, 1.0, 0.5, 0.4};
        const ConcavityMatrix m = assemble(eta);
        const ConcavitySpectrum sp = spectral(m);
        CHECK(sp.kappas[3] == doctest::Approx(frozen::kKappa4_elim).epsilon(1e-12));
        const Eigen::VectorXd d = min_eigvec_elimination(eta, sp.kappas[3]);
        CHECK(d[0] == 1.0);
        CHECK((m.entries * d - sp.kappas[3] * d).norm() <= 1e-8 * d.norm());
        const Eigen::VectorXd u = d.normalized();
        for (int i = 0; i < 4; ++i) CHECK(std::abs(u[i] - frozen::kXi4_elim[static_cast<std::size_t>(i)]) < 1e-10);
    }
}

TEST_CASE("jacobi agrees with a reference eigensolver") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> N;
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 2 + trial % 7;
        Eigen::MatrixXd a(n, n);
        for (auto& x : a.reshaped()) x = N(rng);
        a = (0.5 * (a + a.transpose())).eval();
        const ConcavitySpectrum sp = spectral({a, 1.0});
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(a);
        const Eigen::VectorXd expect = ref.eigenvalues().reverse();
        CHECK((sp.kappas - expect).cwiseAbs().maxCoeff() <= 1e-12 * a.norm());
        for (int i = 0; i < n; ++i) {
            CHECK((a * sp.xis.col(i) - sp.kappas[i] * sp.xis.col(i)).norm() <= 1e-10 * a.norm());
        }
        CHECK((sp.xis.transpose() * sp.xis - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("tail decay: tail (1,1)") {
    const std::vector<double> grid = {10.0, 100.0, 1000.0};
    const auto fixed = tail_decay_profile(Spectrum{1.0, 1.0}, grid, TailFamily::fixed_tail);
    REQUIRE(fixed.size() == 3);
    double lo = INFINITY, hi = 0.0;
    for (const auto& r : fixed) {
        lo = std::min(lo, r.t2_kappa_n);
        hi = std::max(hi, r.t2_kappa_n);
    }
    CHECK(hi / lo <= 10.0);
    // In the fixed-tail family the xi tail decays like 1/t^2 and kappa_{n-1} like 1/t.
    for (std::size_t i = 1; i < fixed.size(); ++i) {
        CHECK(fixed[i].t2_xi_tail < fixed[i - 1].t2_xi_tail);
        CHECK(fixed[i].kappa_n_minus_1 * fixed[i].t == doctest::Approx(fixed[i - 1].kappa_n_minus_1 * fixed[i - 1].t).epsilon(0.1));
    }
    const auto bounded = tail_decay_profile(Spectrum{1.0, 1.0}, grid, TailFamily::bounded_sigma2);
    lo = INFINITY, hi = 0.0;
    for (const auto& r : bounded) {
        lo = std::min(lo, r.t2_kappa_n);
        hi = std::max(hi, r.t2_kappa_n);
        CHECK(r.kappa_n_minus_1 >= frozen::kBoundedKappaFloor);
        CHECK(r.t2_xi_tail <= frozen::kBoundedXiSup);
    }
    CHECK(hi / lo <= 10.0);
    CHECK_THROWS_AS(tail_decay_profile(Spectrum{20.0, 1.0}, grid), InvalidArgument);
    CHECK(tail_family_from_string(to_string(TailFamily::bounded_sigma2)) == TailFamily::bounded_sigma2);
}

TEST_CASE("csv row layout") {
    CHECK(concavity_csv_header(2) == "n,eta1,eta2,kappa1,kappa2,det,predicted_det");
    const std::string row = concavity_csv_row(Spectrum{1.0, 1.0});
    CHECK(row.rfind("2,1,1,", 0) == 0);
}

TEST_CASE("property: identities, positivity, envelope, elimination") {
    std::mt19937_64 rng(17);
    for (int n = 2; n <= 8; ++n) {
        for (const Spectrum& eta : sample_gamma_k(n, 2, 500, 40 + n)) {
            const DetIdentity d = det_identity(eta);
            CHECK(rel(d.det, d.predicted) <= 1e-10);
            const Decomposition dec = decomposition(eta);
            CHECK(rel(dec.sum_det_a, dec.predicted_sum_det_a) <= 1e-9);
            CHECK(rel(dec.det_m2, dec.predicted_det_m2) <= 1e-9);
            const ConcavityMatrix m = assemble(eta);
            const ConcavitySpectrum sp = spectral(m);
            CHECK(rel(sp.kappas.prod(), d.det) <= 1e-9);
            CHECK(sp.kappas[n - 1] > 0.0);
            CHECK(sp.kappas[n - 1] <= m.entries(0, 0) * (1 + 1e-12));
            const WeylEnvelope w = weyl_envelope(eta);
            const double slop = 1e-12 * m.entries.norm();
            CHECK(sp.kappas[0] >= w.kappa1_lo - slop);
            CHECK(sp.kappas[0] <= w.kappa1_hi + slop);
            for (int i = 1; i < n; ++i) CHECK(sp.kappas[i] <= w.kappa_tail_hi + slop);
            CHECK(quad_form(eta, random_hermitian(n, rng)) >= -1e-10);
            if (sp.simple(n - 1) && sp.kappas[n - 2] - sp.kappas[n - 1] > 1e-6 * sp.kappas[0]) {
                try {
                    const Eigen::VectorXd u = min_eigvec_elimination(eta, sp.kappas[n - 1]).normalized();
                    const Eigen::VectorXd xi = sp.xis.col(n - 1);
                    CHECK(std::min((u - xi).norm(), (u + xi).norm()) <= 1e-8);
                } catch (const EliminationDegenerate&) {
                    const Eigen::VectorXd v = kernel_vector(m.entries, sp.kappas[n - 1]);
                    CHECK((m.entries * v - sp.kappas[n - 1] * v).norm() <= 1e-9);
                }
            }
        }
    }
}

}
