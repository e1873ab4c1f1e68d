#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles/frozen.hpp"
#include "sigma2/symfun.hpp"

using namespace sigma2;

TEST_SUITE("symfun") {

TEST_CASE("sigma_k small examples") {
    const Spectrum eta{3.0, 2.0, 1.0};
    CHECK(sigma_k(eta, 1) == 6.0);
    CHECK(sigma_k(eta, 2) == frozen::kSigma2_321);
    CHECK(sigma_k(eta, 3) == 6.0);
    CHECK(sigma_k_excluding(eta, 1, 1) == 4.0);
    CHECK(sigma_k_excluding(eta, 2, 0) == frozen::kSigma2Excl_321_1);
    CHECK_THROWS_AS(sigma_k(eta, 0), InvalidArgument);
    CHECK_THROWS_AS(sigma_k(eta, 4), InvalidArgument);
    CHECK_THROWS_AS(sigma_k_excluding(eta, 1, 3), InvalidArgument);
}

TEST_CASE("spectrum is sorted descending at construction") {
    const Spectrum eta{1.0, 3.0, 2.0};
    CHECK(eta[0] == 3.0);
    CHECK(eta[2] == 1.0);
    CHECK_THROWS_AS(Spectrum({1.0, NAN}), InvalidArgument);
}

TEST_CASE("cone membership") {
    CHECK(in_gamma_k(Spectrum{1.0, 1.0, 1.0}, 2));
    CHECK_FALSE(in_gamma_k(Spectrum{2.0, -0.5}, 2));
    const Spectrum e{3.0, 1.0, -0.5};
    CHECK(sigma_k(e, 2) == doctest::Approx(frozen::kSigma2_31m05).epsilon(1e-15));
    CHECK(in_gamma_k(e, 2));
    CHECK_FALSE(in_gamma_k(e, 3));
    CHECK_FALSE(in_gamma_k(Spectrum{1.0, 1.0, 1.0}, 2, 3.0));
}

TEST_CASE("prefix recurrence agrees with enumeration") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(-1.0, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
        Eigen::VectorXd v(12);
        for (auto& x : v) x = U(rng);
        const Eigen::VectorXd e = elementary_symmetric(v);
        for (int k = 1; k <= 12; ++k) {
            const double direct = sigma_k(v, k);
            CHECK(std::abs(e[k] - direct) <= 1e-12 * std::max(1.0, std::abs(direct)));
        }
    }
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(20);
    CHECK(sigma_k(ones, 3) == doctest::Approx(1140.0));
}

TEST_CASE("sampler is deterministic and lands in the cone") {
    const auto a = sample_gamma_k(3, 2, 10, 7);
    const auto b = sample_gamma_k(3, 2, 10, 7);
    REQUIRE(a.size() == 10);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].values() == b[i].values());
        CHECK(in_gamma_k(a[i], 2));
    }
    for (const Spectrum& e : sample_gamma_k(2, 2, 100, 1)) {
        CHECK(e[0] * e[1] > 0.0);
        CHECK(e[0] + e[1] > 0.0);
    }
    CHECK_THROWS_AS(sample_gamma_k(8, 8, 5, 1, 3), SamplingFailure);
}

TEST_CASE("log sigma2 jet") {
    const auto jet = log_sigma2_jet(Spectrum{1.0, 1.0, 1.0});
    for (int i = 0; i < 3; ++i) CHECK(jet.grad[i] == doctest::Approx(2.0 / 3.0));
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k)
            CHECK(jet.hess_diag(i, k) == doctest::Approx(i == k ? -4.0 / 9.0 : -1.0 / 9.0));
    CHECK(jet.offdiag_coeff == doctest::Approx(-1.0 / 3.0));
    CHECK_THROWS_AS(log_sigma2_jet(Spectrum{2.0, -0.5}), ConeViolation);
}

TEST_CASE("gradient matches central differences of log sigma2") {
    for (const Spectrum& eta : sample_gamma_k(4, 2, 50, 11)) {
        const auto jet = log_sigma2_jet(eta);
        for (int i = 0; i < 4; ++i) {
            double errs[2];
            double h = 1e-3;
            for (double& e : errs) {
                Eigen::VectorXd p = eta.values(), m = eta.values();
                p[i] += h;
                m[i] -= h;
                const double fd = (std::log(sigma_k(p, 2)) - std::log(sigma_k(m, 2))) / (2 * h);
                e = std::abs(fd - jet.grad[i]);
                h *= 0.5;
            }
            // Second order: halving h cuts the error by about four, unless both are at round-off.
            CHECK((errs[0] < 1e-9 || errs[0] / errs[1] > 3.0));
        }
    }
}

TEST_CASE("slacks at the all-ones point") {
    const SlackRecord s = inequality_slacks(Spectrum{1.0, 1.0, 1.0});
    CHECK(s.eta1_sigma1_slack == 0.0);
    CHECK(s.maclaurin_sum_slack == doctest::Approx(frozen::kMaclaurinSlack_111).epsilon(1e-14));
    CHECK(s.sigma1_product_slack == doctest::Approx(3.0));
}

TEST_CASE("property: recursion, slacks, ratio floor, nesting") {
    for (int n = 2; n <= 8; ++n) {
        for (const Spectrum& eta : sample_gamma_k(n, 2, 2000, 100 + n)) {
            for (int i = 0; i < n; ++i) {
                for (int k = 1; k <= n; ++k) {
                    const double excl = k <= n - 1 ? sigma_k_excluding(eta, k, i) : 0.0;
                    const double lower = k == 1 ? 1.0 : sigma_k_excluding(eta, k - 1, i);
                    const double whole = sigma_k(eta, k);
                    CHECK(std::abs(whole - (excl + eta[i] * lower)) <=
                          1e-12 * std::max(1.0, std::abs(whole)));
                }
            }
            const SlackRecord s = inequality_slacks(eta);
            CHECK(s.maclaurin_sum_slack >= -1e-12);
            CHECK(s.eta1_sigma1_slack >= -1e-12);
            CHECK(s.sigma1_product_slack >= -1e-12);
            CHECK(s.min_grad_ratio >= frozen::kThetaFloor[static_cast<std::size_t>(n)]);
            for (int k = n; k >= 2; --k) {
                if (in_gamma_k(eta, k)) CHECK(in_gamma_k(eta, k - 1));
            }
        }
    }
}

}
