#include "sigma2/rhs.hpp"

#include <cmath>
#include <sstream>

namespace sigma2 {

std::string to_string(RhsKind kind) {
    switch (kind) {
    case RhsKind::constant: return "constant";
    case RhsKind::manufactured: return "manufactured";
    case RhsKind::fu_yau: return "fu_yau";
    }
    return "unknown";
}

RhsKind rhs_kind_from_string(const std::string& name) {
    if (name == "constant") return RhsKind::constant;
    if (name == "manufactured") return RhsKind::manufactured;
    if (name == "fu_yau") return RhsKind::fu_yau;
    throw InvalidArgument("unknown rhs kind '" + name + "'");
}

RhsModel RhsModel::constant(double c) {
    if (!std::isfinite(c)) throw InvalidArgument("constant rhs must be finite");
    RhsModel m;
    m.kind = RhsKind::constant;
    m.value = c;
    return m;
}

RhsModel RhsModel::manufactured(ScalarField F) {
    RhsModel m;
    m.kind = RhsKind::manufactured;
    m.sampled = std::move(F);
    return m;
}

RhsModel RhsModel::fu_yau(double alpha, ScalarField f, ScalarField mu) {
    require_same_grid(f.grid, mu.grid, "RhsModel::fu_yau");
    if (!std::isfinite(alpha)) throw InvalidArgument("fu_yau slope must be finite");
    RhsModel m;
    m.kind = RhsKind::fu_yau;
    m.alpha = alpha;
    m.f = std::move(f);
    m.mu = std::move(mu);
    return m;
}

namespace {

struct FuYauParts {
    Eigen::VectorXd E;
    Eigen::VectorXd E_r;
    Eigen::MatrixXcd E_p;
};

FuYauParts fu_yau_parts(double alpha, const ScalarField& f, const ScalarField& mu,
                        const ScalarField& phi, const FrameField& frame) {
    require_same_grid(f.grid, phi.grid, "fu_yau_rhs");
    require_same_grid(mu.grid, phi.grid, "fu_yau_rhs");
    const auto& g = phi.grid;
    const int n = g.n();
    const Eigen::MatrixXcd p = frame_derivatives(phi, frame);
    const Eigen::MatrixXcd fi = frame_derivatives(f, frame);
    const HermitianField fh = complex_hessian(f, frame);

    FuYauParts out{Eigen::VectorXd(g.size()), Eigen::VectorXd(g.size()),
                   Eigen::MatrixXcd(n, g.size())};
    const double a4 = 4.0 * alpha;
    for (Eigen::Index q = 0; q < g.size(); ++q) {
        const double ph = phi.samples[q];
        const double fv = f.samples[q];
        const double ep = std::exp(ph);
        const double em = std::exp(-ph);
        const double p2 = p.col(q).squaredNorm();
        const double lap = fh.at(q).trace().real();
        const double cross = (fi.col(q).array() * p.col(q).array().conjugate()).sum().real();
        const double inner = lap - 2.0 * cross;
        out.E[q] = ep * ep * (1.0 - a4 * em * p2) + a4 * fv * em * p2 + 2.0 * fv +
                   em * em * fv * fv - a4 * mu.samples[q] / (n - 1) + a4 * em * inner;
        out.E_r[q] = 2.0 * ep * ep - a4 * ep * p2 - a4 * fv * em * p2 - 2.0 * em * em * fv * fv -
                     a4 * em * inner;
        out.E_p.col(q) = (-a4 * ep + a4 * fv * em) * p.col(q).conjugate() -
                         a4 * em * fi.col(q).conjugate();
    }
    return out;
}

void require_admissible(const Eigen::VectorXd& E, const TorusGrid& g) {
    Eigen::Index worst = 0;
    const double low = E.minCoeff(&worst);
    if (!(low > 0.0)) {
        std::ostringstream os;
        os << "fu_yau_rhs: e^F = " << low << " is not positive at grid point " << worst << " (x =";
        const Eigen::VectorXd x = g.position(worst);
        for (Eigen::Index a = 0; a < x.size(); ++a) os << ' ' << x[a];
        os << ')';
        throw AdmissibilityError(os.str());
    }
}

} // namespace

ScalarField fu_yau_rhs(double alpha, const ScalarField& f, const ScalarField& mu,
                       const ScalarField& phi, const FrameField& frame) {
    const auto parts = fu_yau_parts(alpha, f, mu, phi, frame);
    require_admissible(parts.E, phi.grid);
    return ScalarField(phi.grid, parts.E.array().log().matrix());
}

RhsJet evaluate(const RhsModel& rhs, const ScalarField& phi, const FrameField& frame) {
    const auto& g = phi.grid;
    const Eigen::Index N = g.size();
    RhsJet jet{Eigen::VectorXd::Zero(N), Eigen::VectorXd::Zero(N),
               Eigen::MatrixXcd::Zero(g.n(), N)};
    switch (rhs.kind) {
    case RhsKind::constant:
        jet.F.setConstant(rhs.value);
        break;
    case RhsKind::manufactured:
        require_same_grid(rhs.sampled->grid, g, "manufactured rhs");
        jet.F = rhs.sampled->samples;
        break;
    case RhsKind::fu_yau: {
        const auto parts = fu_yau_parts(rhs.alpha, *rhs.f, *rhs.mu, phi, frame);
        require_admissible(parts.E, g);
        jet.F = parts.E.array().log().matrix();
        jet.F_r = parts.E_r.cwiseQuotient(parts.E);
        for (Eigen::Index q = 0; q < N; ++q) jet.F_p.col(q) = parts.E_p.col(q) / parts.E[q];
        break;
    }
    }
    return jet;
}

} // namespace sigma2
