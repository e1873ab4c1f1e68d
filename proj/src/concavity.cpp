#include "sigma2/concavity.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include "sigma2/extended.hpp"

namespace sigma2 {

double quad_form(const Spectrum& eta, const Eigen::MatrixXcd& P) {
    const Eigen::Index n = eta.size();
    if (P.rows() != n || P.cols() != n) {
        throw InvalidArgument("quad_form: P must be " + std::to_string(n) + "x" +
                              std::to_string(n));
    }
    const double skew = (P - P.adjoint()).norm();
    if (skew > 1e-12 * std::max(1.0, P.norm())) {
        throw InvalidArgument("quad_form: P is not Hermitian");
    }
    const auto m = assemble(eta);
    const Eigen::VectorXd d = P.diagonal().real();
    double off = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index k = 0; k < n; ++k)
            if (i != k) off += std::norm(P(i, k));
    return d.dot(m.entries * d) + off / m.sigma2;
}

DetIdentity det_identity(const Spectrum& eta) {
    const auto m = assemble(eta.values().cast<Extended>().eval());
    const Extended n(static_cast<int>(eta.size()));
    const Extended predicted = (n - 1) / pow(m.sigma2, static_cast<int>(eta.size()));
    return {static_cast<double>(determinant(m.entries)), static_cast<double>(predicted)};
}

Decomposition decomposition(const Spectrum& eta) {
    const Eigen::Index n = eta.size();
    const Vec<Extended> x = eta.values().cast<Extended>();
    const auto jet = log_sigma2_jet(x);
    const Extended s2 = jet.sigma2;
    const Vec<Extended>& s = jet.sigma1_excl;

    const Mat<Extended> m1 = s * s.transpose();
    const Mat<Extended> m2 = s2 * (Mat<Extended>::Ones(n, n) - Mat<Extended>::Identity(n, n));

    Extended sum_a(0);
    for (Eigen::Index i = 0; i < n; ++i) {
        Mat<Extended> a = -m2;
        a.col(i) = m1.col(i);
        sum_a += determinant(a);
    }
    const Extended s2n = pow(s2, static_cast<int>(n));
    const Extended nm1(static_cast<int>(n - 1));
    const Extended sign = (n - 1) % 2 == 0 ? Extended(1) : Extended(-1);

    Decomposition d{};
    d.sum_det_a = static_cast<double>(sum_a);
    d.predicted_sum_det_a = static_cast<double>(2 * nm1 * s2n);
    d.det_m2 = static_cast<double>(determinant(m2));
    d.predicted_det_m2 = static_cast<double>(sign * nm1 * s2n);
    d.det_full = static_cast<double>(determinant(Mat<Extended>(m1 - m2)));
    return d;
}

bool ConcavitySpectrum::simple(Eigen::Index i) const {
    const int label = cluster[static_cast<std::size_t>(i)];
    int count = 0;
    for (int c : cluster) count += (c == label);
    return count == 1;
}

ConcavitySpectrum spectral(const ConcavityMatrix& m) {
    if (!m.entries.allFinite()) throw InvalidArgument("spectral: matrix has non-finite entries");
    if (m.entries != m.entries.transpose()) throw InvalidArgument("spectral: matrix not symmetric");
    const auto eig = jacobi_eigen(m.entries);
    ConcavitySpectrum out{eig.values, eig.vectors, {}};
    const double tol = 1e-9 * m.entries.norm();
    int label = 0;
    for (Eigen::Index i = 0; i < out.kappas.size(); ++i) {
        if (i > 0 && out.kappas[i - 1] - out.kappas[i] > tol) ++label;
        out.cluster.push_back(label);
    }
    return out;
}

WeylEnvelope weyl_envelope(const Spectrum& eta) {
    const auto jet = log_sigma2_jet(eta);
    const double n = static_cast<double>(eta.size());
    const double s2 = jet.sigma2;
    WeylEnvelope w{};
    w.a1 = jet.sigma1_excl.squaredNorm();
    w.b1 = (n - 1.0) * s2;
    w.bn = -s2;
    w.kappa1_lo = (w.a1 - w.b1) / (s2 * s2);
    w.kappa1_hi = (w.a1 + s2) / (s2 * s2);
    w.kappa_tail_hi = 1.0 / s2;
    return w;
}

namespace {

template <typename Scalar>
void require_pivot(Scalar pivot, Scalar scale, const char* what) {
    using std::abs;
    if (!(abs(pivot) > Scalar(kPivotTolerance) * scale)) {
        throw EliminationDegenerate(std::string("min_eigvec_elimination: vanishing pivot (") +
                                    what + "); use kernel_vector instead");
    }
}

} // namespace

template <typename Scalar>
Vec<Scalar> min_eigvec_elimination(const BasicSpectrum<Scalar>& eta, Scalar kappa_n) {
    const Eigen::Index n = eta.size();
    const auto jet = log_sigma2_jet(eta.values());
    Mat<Scalar> a = -jet.hess_diag;
    a.diagonal().array() -= kappa_n;
    const Vec<Scalar>& s = jet.sigma1_excl;
    const Eigen::Index m = n - 1;
    Vec<Scalar> d(n);
    d[0] = Scalar(1);

    if (n == 2) {
        require_pivot(a(1, 1), a.row(1).cwiseAbs().maxCoeff(), "a_22");
        d[1] = -a(1, 0) / a(1, 1);
        return d;
    }

    // Step 1: clear the leading part of rows 1..n−1 against row n.
    require_pivot(s[m], s.cwiseAbs().maxCoeff(), "sigma1(eta|n)");
    for (Eigen::Index i = 0; i < m; ++i) a.row(i) -= (s[i] / s[m]) * a.row(m);
    // Step 2: rescale.
    for (Eigen::Index i = 0; i < m; ++i) a.row(i) *= s[m];
    // Step 3: cancel the off-diagonal mass of rows 2..n−1 with row 1.
    require_pivot(s[m] - s[0], eta.values().cwiseAbs().maxCoeff(), "eta_1 - eta_n");
    for (Eigen::Index i = 1; i < m; ++i) a.row(i) -= ((s[m] - s[i]) / (s[m] - s[0])) * a.row(0);
    // Step 4: reduce row n to columns 1 and n.
    for (Eigen::Index i = 1; i < m; ++i) {
        require_pivot(a(i, i), a.row(i).cwiseAbs().maxCoeff(), "a_ii");
        a.row(m) -= (a(m, i) / a(i, i)) * a.row(i);
    }
    require_pivot(a(m, m), a.row(m).cwiseAbs().maxCoeff(), "a_nn");

    d[m] = -a(m, 0) / a(m, m);
    for (Eigen::Index i = 1; i < m; ++i) d[i] = -(a(i, 0) + a(i, m) * d[m]) / a(i, i);
    return d;
}

template Vec<double> min_eigvec_elimination(const BasicSpectrum<double>&, double);
template Vec<Extended> min_eigvec_elimination(const BasicSpectrum<Extended>&, Extended);

Eigen::VectorXd min_eigvec_elimination(const Spectrum& eta, double kappa_n) {
    const auto d = min_eigvec_elimination(eta.cast<Extended>(), Extended(kappa_n));
    return d.cast<double>();
}

Eigen::VectorXd kernel_vector(const Eigen::MatrixXd& a, double kappa) {
    const Eigen::Index n = a.rows();
    if (a.cols() != n || n == 0) throw InvalidArgument("kernel_vector: matrix must be square");
    Eigen::MatrixXd b = a - kappa * Eigen::MatrixXd::Identity(n, n);
    const double tol = kPivotTolerance * std::max(b.cwiseAbs().maxCoeff(), 1e-300);

    std::vector<std::pair<Eigen::Index, Eigen::Index>> pivots;  // (row, column)
    std::vector<Eigen::Index> free_cols;
    Eigen::Index r = 0;
    for (Eigen::Index c = 0; c < n; ++c) {
        Eigen::Index p = r;
        if (r < n) b.col(c).segment(r, n - r).cwiseAbs().maxCoeff(&p);
        p += r;
        if (r >= n || std::abs(b(p, c)) <= tol) {
            free_cols.push_back(c);
            continue;
        }
        b.row(p).swap(b.row(r));
        for (Eigen::Index k = r + 1; k < n; ++k) b.row(k) -= (b(k, c) / b(r, c)) * b.row(r);
        pivots.emplace_back(r, c);
        ++r;
    }
    if (free_cols.empty()) {
        free_cols.push_back(pivots.back().second);
        pivots.pop_back();
    }

    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    x[free_cols.front()] = 1.0;
    for (auto it = pivots.rbegin(); it != pivots.rend(); ++it) {
        const auto [row, col] = *it;
        const double rest = b.row(row).tail(n - col - 1).dot(x.tail(n - col - 1));
        x[col] = -rest / b(row, col);
    }
    return x.normalized();
}

std::string to_string(TailFamily family) {
    return family == TailFamily::fixed_tail ? "fixed_tail" : "bounded_sigma2";
}

TailFamily tail_family_from_string(const std::string& name) {
    if (name == "fixed_tail") return TailFamily::fixed_tail;
    if (name == "bounded_sigma2") return TailFamily::bounded_sigma2;
    throw InvalidArgument("unknown tail family '" + name + "'");
}

std::vector<TailDecayRow> tail_decay_profile(const Spectrum& tail, const std::vector<double>& t_grid,
                                             TailFamily family) {
    if (tail.size() < 1) throw InvalidArgument("tail_decay_profile: empty tail");
    if (t_grid.empty()) throw InvalidArgument("tail_decay_profile: empty t grid");
    const Eigen::Index n = tail.size() + 1;
    std::vector<TailDecayRow> rows;
    double prev = -INFINITY;
    for (double t : t_grid) {
        if (!(t > prev)) throw InvalidArgument("tail_decay_profile: t grid must increase");
        prev = t;
        const Extended te(t);
        Vec<Extended> eta(n);
        eta[0] = te;
        for (Eigen::Index i = 0; i < tail.size(); ++i) {
            eta[i + 1] = family == TailFamily::fixed_tail ? Extended(tail[i]) : Extended(tail[i]) / te;
        }
        if (eta[1] > te) throw InvalidArgument("tail_decay_profile: t below max(tail)");
        const auto m = assemble(eta);  // throws ConeViolation outside Γ₂
        const auto sp = jacobi_eigen(m.entries);
        const Vec<Extended> xi = sp.vectors.col(n - 1);
        rows.push_back({t, static_cast<double>(te * te * sp.values[n - 1]),
                        static_cast<double>(te * te * xi.tail(n - 1).squaredNorm()),
                        static_cast<double>(sp.values[n - 2])});
    }
    return rows;
}

std::string concavity_csv_header(int n) {
    std::string h = "n";
    for (int i = 1; i <= n; ++i) h += ",eta" + std::to_string(i);
    for (int i = 1; i <= n; ++i) h += ",kappa" + std::to_string(i);
    return h + ",det,predicted_det";
}

std::string concavity_csv_row(const Spectrum& eta) {
    const auto sp = spectral(assemble(eta));
    const auto det = det_identity(eta);
    std::ostringstream os;
    os << std::setprecision(17) << eta.size();
    for (Eigen::Index i = 0; i < eta.size(); ++i) os << ',' << eta[i];
    for (Eigen::Index i = 0; i < eta.size(); ++i) os << ',' << sp.kappas[i];
    os << ',' << det.det << ',' << det.predicted;
    return os.str();
}

} // namespace sigma2
