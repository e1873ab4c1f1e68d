#include "sigma2/perturb.hpp"

#include <string>

#include "sigma2/errors.hpp"
#include "sigma2/jacobi.hpp"

namespace sigma2 {

namespace {

void require_symmetric(const Eigen::MatrixXd& a, const char* what) {
    if (a.rows() != a.cols()) throw InvalidArgument(std::string(what) + " must be square");
    if (!a.allFinite()) throw InvalidArgument(std::string(what) + " has non-finite entries");
    if ((a - a.transpose()).norm() > 1e-12 * std::max(1.0, a.norm())) {
        throw InvalidArgument(std::string(what) + " is not symmetric");
    }
}

void require_simple(const RealHessianEig& eig) {
    if (eig.lambdas.size() < 2) return;
    const double gap = eig.lambdas[0] - eig.lambdas[1];
    if (!(gap > kSimpleGap * eig.scale)) {
        throw MultiplicityError("lambda_1 is not simple (gap " + std::to_string(gap) +
                                "); perturb through build_phi first");
    }
}

} // namespace

RealHessianEig real_hessian_eig(const Eigen::MatrixXd& H, const Eigen::MatrixXd& g) {
    require_symmetric(H, "Hessian");
    if (g.rows() != H.rows() || g.cols() != H.cols()) {
        throw InvalidArgument("metric and Hessian sizes differ");
    }
    if (g != Eigen::MatrixXd::Identity(g.rows(), g.cols())) {
        throw UnsupportedMetric("only the identity metric is supported");
    }
    const auto eig = jacobi_eigen(H);
    return {eig.values, eig.vectors, H.norm()};
}

RealHessianEig real_hessian_eig(const Eigen::MatrixXd& H) {
    return real_hessian_eig(H, Eigen::MatrixXd::Identity(H.rows(), H.cols()));
}

PerturbedEndo build_phi(const RealHessianEig& eig, const Eigen::MatrixXd& H) {
    const Eigen::Index m = H.rows();
    if (eig.vees.rows() != m) throw InvalidArgument("build_phi: size mismatch");
    const Eigen::VectorXd v1 = eig.vees.col(0);
    PerturbedEndo out;
    out.bee = Eigen::MatrixXd::Identity(m, m) - v1 * v1.transpose();
    out.phi = H - out.bee;
    return out;
}

Eigen::MatrixXd d_lambda1(const RealHessianEig& eig) {
    require_simple(eig);
    const Eigen::VectorXd v1 = eig.vees.col(0);
    return v1 * v1.transpose();
}

double d2_lambda1_form(const RealHessianEig& eig, const Eigen::MatrixXd& E) {
    require_symmetric(E, "direction");
    if (E.rows() != eig.vees.rows()) throw InvalidArgument("direction size mismatch");
    require_simple(eig);
    const Eigen::VectorXd ev1 = E * eig.vees.col(0);
    double total = 0.0;
    for (Eigen::Index mu = 1; mu < eig.lambdas.size(); ++mu) {
        const double c = eig.vees.col(mu).dot(ev1);
        total += 2.0 * c * c / (eig.lambdas[0] - eig.lambdas[mu]);
    }
    return total;
}

} // namespace sigma2
