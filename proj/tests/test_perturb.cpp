#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles/frozen.hpp"
#include "sigma2/jacobi.hpp"
#include "sigma2/perturb.hpp"

using namespace sigma2;

namespace {

Eigen::MatrixXd mat2(double a, double b, double c, double d) {
    Eigen::MatrixXd m(2, 2);
    m << a, b, c, d;
    return m;
}

double top(const Eigen::MatrixXd& h) { return jacobi_eigen(h).values[0]; }

} // namespace

TEST_SUITE("perturb") {

TEST_CASE("eigensystem examples") {
    const RealHessianEig d = real_hessian_eig(mat2(2, 0, 0, 1));
    CHECK(d.lambdas[0] == 2.0);
    CHECK(d.lambdas[1] == 1.0);
    CHECK(std::abs(d.vees(0, 0)) == doctest::Approx(1.0));
    CHECK(real_hessian_eig(Eigen::MatrixXd::Zero(4, 4)).lambdas.isZero());
    const RealHessianEig s = real_hessian_eig(mat2(0, 1, 1, 0));
    CHECK(s.lambdas[0] == doctest::Approx(1.0));
    CHECK(s.lambdas[1] == doctest::Approx(-1.0));
    CHECK(std::abs(s.vees(0, 0)) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(s.vees(0, 0) * s.vees(1, 0) > 0.0);
    CHECK_THROWS_AS(real_hessian_eig(mat2(0, 1, 0, 0)), InvalidArgument);
    CHECK_THROWS_AS(real_hessian_eig(mat2(1, 0, 0, 1), mat2(2, 0, 0, 1)), UnsupportedMetric);
}

TEST_CASE("perturbed endomorphism") {
    const Eigen::MatrixXd h = mat2(2, 0, 0, 2);
    const PerturbedEndo e = build_phi(real_hessian_eig(h), h);
    const auto sp = jacobi_eigen(e.phi);
    CHECK(sp.values[0] == doctest::Approx(2.0));
    CHECK(sp.values[1] == doctest::Approx(1.0));
    const Eigen::MatrixXd h2 = mat2(2, 0, 0, 1);
    const auto sp2 = jacobi_eigen(build_phi(real_hessian_eig(h2), h2).phi);
    CHECK(sp2.values[0] == doctest::Approx(2.0));
    CHECK(sp2.values[1] == doctest::Approx(0.0));
}

TEST_CASE("first derivative examples") {
    CHECK(d_lambda1(real_hessian_eig(mat2(2, 0, 0, 1))).isApprox(mat2(1, 0, 0, 0)));
    const Eigen::MatrixXd g = d_lambda1(real_hessian_eig(mat2(0, 1, 1, 0)));
    CHECK((g.array() - 0.5).abs().maxCoeff() < 1e-14);
    CHECK(g.trace() == doctest::Approx(1.0));
    CHECK_THROWS_AS(d_lambda1(real_hessian_eig(mat2(1, 0, 0, 1))), MultiplicityError);
}

TEST_CASE("second derivative examples") {
    const RealHessianEig eig = real_hessian_eig(mat2(2, 0, 0, 1));
    CHECK(d2_lambda1_form(eig, mat2(0, 1, 1, 0)) == doctest::Approx(frozen::kD2Lambda1_example));
    const Eigen::VectorXd v1 = eig.vees.col(0);
    CHECK(d2_lambda1_form(eig, v1 * v1.transpose()) == doctest::Approx(0.0));
    CHECK_THROWS_AS(d2_lambda1_form(real_hessian_eig(mat2(1, 0, 0, 1)), mat2(0, 1, 1, 0)), MultiplicityError);
}

TEST_CASE("property: finite differences, convexity, top gap") {
    std::mt19937_64 rng(99);
    std::normal_distribution<double> N;
    for (int n = 2; n <= 4; ++n) {
        const int d = 2 * n;
        for (int s = 0; s < 100; ++s) {
            Eigen::MatrixXd a(d, d);
            for (auto& x : a.reshaped()) x = N(rng);
            Eigen::MatrixXd h = (0.5 * (a + a.transpose())).eval();
            for (auto& x : a.reshaped()) x = N(rng);
            Eigen::MatrixXd e = (0.5 * (a + a.transpose())).eval();
            e /= e.norm();
            const RealHessianEig eig = real_hessian_eig(h);
            for (int i = 0; i < d; ++i) {
                CHECK((h * eig.vees.col(i) - eig.lambdas[i] * eig.vees.col(i)).norm() <= 1e-10 * h.norm());
            }
            CHECK((eig.vees.transpose() * eig.vees - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff() <= 1e-10);
            const double gap = eig.lambdas[0] - eig.lambdas[1];
            const PerturbedEndo phi = build_phi(eig, h);
            const auto ps = jacobi_eigen(phi.phi);
            CHECK(ps.values[0] == doctest::Approx(eig.lambdas[0]).epsilon(1e-12));
            CHECK(ps.values[0] - ps.values[1] >= std::min(gap, 1.0) - 1e-10);
            if (gap < 0.5) continue;
            const double an2 = d2_lambda1_form(eig, e);
            CHECK(an2 >= 0.0);
            double errs[2];
            double step = 1e-2;
            for (double& err : errs) {
                const double fd = (top(h + step * e) - top(h - step * e)) / (2 * step);
                err = std::abs(fd - d_lambda1(eig).cwiseProduct(e).sum());
                step *= 0.5;
            }
            CHECK((errs[0] < 1e-10 || errs[0] / errs[1] > 3.0));
            const double h2 = 1e-3;
            const double fd2 = (top(h + h2 * e) - 2 * top(h) + top(h - h2 * e)) / (h2 * h2);
            CHECK(std::abs(fd2 - an2) <= 1e-4);
        }
    }
}

}
