#include "sigma2/audit.hpp"

#include <cmath>
#include <complex>
#include <limits>

#include "sigma2/concavity.hpp"
#include "sigma2/jacobi.hpp"
#include "sigma2/parallel.hpp"
#include "sigma2/perturb.hpp"

namespace sigma2 {

BarrierJet barrier_jet(double s, double K) {
    if (!(s >= 0.0) || !(s <= K)) {
        throw DomainError("barrier_jet: need 0 <= s <= K (s=" + std::to_string(s) +
                          ", K=" + std::to_string(K) + ")");
    }
    const double w = 1.0 + K - s;
    BarrierJet j{-0.5 * std::log(w), 0.5 / w, 0.0, K};
    j.d2 = 2.0 * j.d1 * j.d1;
    return j;
}

namespace {

using cd = std::complex<double>;

constexpr double kW1[5] = {1.0, -8.0, 0.0, 8.0, -1.0};
constexpr double kW2[5] = {-1.0, 16.0, -30.0, 16.0, -1.0};
constexpr double kW1Short[5] = {0.0, -6.0, 0.0, 6.0, 0.0};
constexpr double kW2Short[5] = {0.0, 12.0, -24.0, 12.0, 0.0};

// Local derivatives at one grid point of a pointwise quantity q(p): 4th order
// by default, 2nd order (radius one) when `short_stencil` is set.
template <typename Value, typename Fn>
Value local_d1(const TorusGrid& g, Fn&& q, Eigen::Index p, int a, bool short_stencil = false) {
    const double* w = short_stencil ? kW1Short : kW1;
    Value acc = w[1] * q(g.shift(p, a, -1));
    for (int k = -2; k <= 2; ++k) {
        if (w[k + 2] != 0.0 && k != -1) acc = acc + w[k + 2] * q(g.shift(p, a, k));
    }
    return acc * (1.0 / (12.0 * g.spacing()));
}

template <typename Fn>
double local_d2(const TorusGrid& g, Fn&& q, Eigen::Index p, int a, bool short_stencil = false) {
    const double* w = short_stencil ? kW2Short : kW2;
    double acc = 0.0;
    for (int k = -2; k <= 2; ++k) {
        if (w[k + 2] != 0.0) acc += w[k + 2] * q(g.shift(p, a, k));
    }
    return acc / (12.0 * g.spacing() * g.spacing());
}

Eigen::VectorXd column_of(const SymmetricField& h, Eigen::Index p) {
    return h.data.col(p);
}

// JV for J∂_{2k−1} = ∂_{2k}, J∂_{2k} = −∂_{2k−1}.
Eigen::VectorXd apply_J(const Eigen::VectorXd& v) {
    Eigen::VectorXd out(v.size());
    for (Eigen::Index k = 0; k + 1 < v.size(); k += 2) {
        out[k] = -v[k + 1];
        out[k + 1] = v[k];
    }
    return out;
}

} // namespace

QhatMax qhat_max(const ScalarField& phi, double A, const FrameField& frame) {
    if (!(A > 0.0)) throw DomainError("qhat_max: A must be positive");
    require_same_grid(phi.grid, frame.grid(), "qhat_max");
    const auto& g = phi.grid;
    const SymmetricField hess = real_hessian(phi);
    const Eigen::VectorXd s = grad_norm_sq(phi, frame).samples;
    QhatMax out;
    out.sup_grad_sq = s.maxCoeff();

    Eigen::VectorXd lambda1(g.size());
    parallel_for(static_cast<std::size_t>(g.size()), [&](std::size_t b, std::size_t e) {
        for (auto p = static_cast<Eigen::Index>(b); p < static_cast<Eigen::Index>(e); ++p) {
            lambda1[p] = jacobi_eigen(hess.at(p)).values[0];
        }
    });

    for (Eigen::Index p = 0; p < g.size(); ++p) {
        if (!(lambda1[p] > 0.0)) continue;
        const double q = std::log(lambda1[p]) + barrier_jet(s[p], out.sup_grad_sq).value +
                         std::exp(-A * phi.samples[p]);
        if (!out.found || q > out.qhat) {
            out.found = true;
            out.x0 = p;
            out.qhat = q;
        }
    }
    if (!out.found) return out;

    // λ₁(Φ) = λ₁(∇²φ) at x₀; Φ only matters when the top eigenvalue is not simple.
    RealHessianEig eig = real_hessian_eig(hess.at(out.x0));
    const PerturbedEndo endo = build_phi(eig, hess.at(out.x0));
    eig = real_hessian_eig(endo.phi);
    out.coords = g.coords(out.x0);
    out.lambda1 = eig.lambdas[0];
    out.V1 = eig.vees.col(0);
    return out;
}

AuditLedger ledger(const ScalarField& phi, double A, double eps, const SolverConfig& cfg) {
    if (!(eps > 0.0 && eps <= 0.5)) throw DomainError("ledger: eps must lie in (0, 1/2]");
    require_same_grid(phi.grid, cfg.grid(), "ledger");
    const auto& g = phi.grid;
    const int n = g.n();
    const int d = g.dim();
    const FrameField frame = FrameField::standard(g);

    const QhatMax qm = qhat_max(phi, A, frame);
    if (!qm.found) {
        throw DomainError("ledger: lambda_1 <= 0 everywhere (M+ empty), so lambda_1 is bounded "
                          "above by 0 and Q-hat has no maximum");
    }
    const Eigen::Index x0 = qm.x0;
    const SymmetricField hess = real_hessian(phi);
    const ScalarField s_field = grad_norm_sq(phi, frame);

    AuditLedger L;
    L.x0 = x0;
    L.coords = qm.coords;
    L.A = A;
    L.eps = eps;
    L.qhat = qm.qhat;
    L.barrier = barrier_jet(s_field.samples[x0], qm.sup_grad_sq);
    const double hp = L.barrier.d1;
    const double ephi = std::exp(-A * phi.samples[x0]);

    // Φ = ∇²φ − B at x₀ and its eigensystem.
    const Eigen::MatrixXd H0 = hess.at(x0);
    const RealHessianEig heig = real_hessian_eig(H0);
    const PerturbedEndo endo = build_phi(heig, H0);
    const RealHessianEig eig = real_hessian_eig(endo.phi);
    const double lam1 = eig.lambdas[0];
    L.lambda = eig.lambdas;
    const Eigen::MatrixXd& V = eig.vees;
    const Eigen::VectorXd V1 = V.col(0);

    // Unitary frame e'_q = Σ_i conj(U_iq) e_i in which g̃(x₀) is diagonal.
    const Eigen::MatrixXcd c0 = frame.at(0);
    Eigen::MatrixXcd gt = c0 * H0 * c0.adjoint();
    gt += cfg.chi.at(x0);
    gt = 0.5 * (gt + gt.adjoint()).eval();
    const auto geig = jacobi_eigen(gt);
    const Eigen::MatrixXcd U = geig.vectors;
    const Eigen::MatrixXcd c = U.adjoint() * c0;
    L.eta = geig.values;
    const auto jet = log_sigma2_jet(L.eta);  // throws ConeViolation outside Γ₂
    const Eigen::VectorXd& G = jet.grad;

    // Third derivatives: ∂_a ∇²φ at x₀ from differences of the Hessian field.
    std::vector<Eigen::MatrixXd> T(static_cast<std::size_t>(d));
    std::vector<Eigen::MatrixXcd> dchi(static_cast<std::size_t>(d));
    for (int a = 0; a < d; ++a) {
        const Eigen::VectorXd t = local_d1<Eigen::VectorXd>(
            g, [&](Eigen::Index p) { return column_of(hess, p); }, x0, a);
        T[static_cast<std::size_t>(a)] = Eigen::Map<const Eigen::MatrixXd>(t.data(), d, d);
        const Eigen::VectorXcd dc = local_d1<Eigen::VectorXcd>(
            g, [&](Eigen::Index p) { return Eigen::VectorXcd(cfg.chi.data.col(p)); }, x0, a);
        dchi[static_cast<std::size_t>(a)] = Eigen::Map<const Eigen::MatrixXcd>(dc.data(), n, n);
    }

    // e_i(φ_{V_α V₁}) = Σ_a c_ia V_αᵀ (∂_a ∇²φ) V₁.
    Eigen::MatrixXcd e_phi_va_v1 = Eigen::MatrixXcd::Zero(n, d);  // (i, α)
    for (int a = 0; a < d; ++a) {
        const Eigen::VectorXd tv1 = T[static_cast<std::size_t>(a)] * V1;
        for (int alpha = 0; alpha < d; ++alpha) {
            const double val = V.col(alpha).dot(tv1);
            for (int i = 0; i < n; ++i) e_phi_va_v1(i, alpha) += c(i, a) * val;
        }
    }

    // P_kl = V₁(g̃_{kl̄}) in the rotated frame.
    Eigen::MatrixXcd P = Eigen::MatrixXcd::Zero(n, n);
    Eigen::MatrixXd V1H = Eigen::MatrixXd::Zero(d, d);
    Eigen::MatrixXcd V1chi = Eigen::MatrixXcd::Zero(n, n);
    for (int a = 0; a < d; ++a) {
        V1H += V1[a] * T[static_cast<std::size_t>(a)];
        V1chi += V1[a] * dchi[static_cast<std::size_t>(a)];
    }
    P = c * V1H * c.adjoint() + U.adjoint() * V1chi * U;
    P = 0.5 * (P + P.adjoint()).eval();

    // Good terms I.
    double good = 0.0;
    for (int alpha = 1; alpha < d; ++alpha) {
        for (int i = 0; i < n; ++i) {
            good += G[i] * std::norm(e_phi_va_v1(i, alpha)) / (lam1 * (lam1 - L.lambda[alpha]));
        }
    }
    L.term_I = (2.0 - eps) * good + quad_form(Spectrum(L.eta), P) / lam1;

    // Bad term II and its split.
    Eigen::VectorXd bad_i(n);
    for (int i = 0; i < n; ++i) bad_i[i] = G[i] * std::norm(e_phi_va_v1(i, 0)) / (lam1 * lam1);
    const double tail = bad_i.tail(n - 1).sum();
    L.term_II = (1.0 + eps) * bad_i.sum();
    L.term_II1 = (1.0 + eps) * bad_i[0];
    L.term_II2 = 3.0 * eps * tail;
    L.term_II3 = (1.0 - 2.0 * eps) * tail;

    // ẽ = (V₁ − iJV₁)/√2 = Σ ν_q e'_q and JV₁ = Σ_{α>1} μ_α V_α.
    const Eigen::VectorXd JV1 = apply_J(V1);
    const Eigen::VectorXcd et =
        (V1.cast<cd>() - cd(0.0, 1.0) * JV1.cast<cd>()) / std::sqrt(2.0);
    L.nu = c.conjugate() * et;
    L.mu = V.rightCols(d - 1).transpose() * JV1;
    double lam_mu = 0.0;
    for (int alpha = 1; alpha < d; ++alpha) lam_mu += L.lambda[alpha] * L.mu[alpha - 1] * L.mu[alpha - 1];
    L.gamma = (lam1 - lam_mu) / (lam1 + lam_mu);

    // First derivatives in the rotated frame.
    const Eigen::VectorXd grad0 = local_d1<Eigen::VectorXd>(
        g, [&](Eigen::Index p) { return Eigen::VectorXd::Constant(1, phi.samples[p]); }, x0, 0);
    Eigen::VectorXd dphi(d), ds(d);
    for (int a = 0; a < d; ++a) {
        dphi[a] = local_d1<double>(g, [&](Eigen::Index p) { return phi.samples[p]; }, x0, a);
        ds[a] = local_d1<double>(g, [&](Eigen::Index p) { return s_field.samples[p]; }, x0, a);
    }
    (void)grad0;
    const Eigen::VectorXcd e_phi = c * dphi.cast<cd>();
    const Eigen::VectorXcd e_s = c * ds.cast<cd>();

    // Σ_k |e_i e_k φ|² + |e_i ē_k φ|² per i.
    const Eigen::MatrixXcd ee = c * H0 * c.transpose();
    const Eigen::MatrixXcd eeb = c * H0 * c.adjoint();
    Eigen::VectorXd second(n);
    for (int i = 0; i < n; ++i) second[i] = ee.row(i).squaredNorm() + eeb.row(i).squaredNorm();

    // Slacks.
    const double a2e2 = A * A * ephi * ephi;
    {
        const double bound = 2.0 * (1.0 + eps) * G[0] *
                             (a2e2 * std::norm(e_phi[0]) + hp * hp * std::norm(e_s[0]));
        L.slacks["lemma41_II1"] = {bound - L.term_II1, "ok"};
        double b2 = 0.0;
        for (int i = 1; i < n; ++i) {
            b2 += 12.0 * eps * a2e2 * G[i] * std::norm(e_phi[i]) +
                  2.0 * hp * hp * G[i] * std::norm(e_s[i]);
        }
        L.slacks["lemma41_II2"] = {b2 - L.term_II2, "ok"};
    }
    L.slacks["lemma42_nu"] = {lam1 * L.nu.tail(n - 1).cwiseAbs().maxCoeff(), "ok"};
    if (lam1 >= 1.0 / eps) {
        double worst = INFINITY;
        for (int i = 1; i < n; ++i) {
            worst = std::min(worst, (lam1 + lam_mu) / (2.0 * jet.sigma2) - (1.0 - eps) * G[i]);
        }
        L.slacks["lemma43_gii"] = {worst, "ok"};
    } else {
        L.slacks["lemma43_gii"] = {std::nullopt, "precondition-not-met"};
    }
    L.slacks["cor35_tail"] = {second.tail(n - 1).sum(), "ok"};
    L.slacks["cor35_lambda_eta_ratio"] = {lam1 / L.eta[0], "ok"};
    {
        const double eps0 = cfg.eps0();
        double total = L.term_I - L.term_II;
        for (int i = 0; i < n; ++i) {
            total += 0.25 * hp * G[i] * second[i] + L.barrier.d2 * G[i] * std::norm(e_s[i]) +
                     A * A * ephi * G[i] * std::norm(e_phi[i]);
        }
        total += eps0 * A * ephi * G.sum();
        L.slacks["prop34_total"] = {total, "ok"};
    }

    // Discrete first-order condition for Q̂_B(x) = log λ₁(∇²φ(x) − B) + h + e^{−Aφ}.
    const Eigen::MatrixXd B = endo.bee;
    auto qhat_b = [&](Eigen::Index p) {
        const double l1 = jacobi_eigen(Eigen::MatrixXd(hess.at(p) - B)).values[0];
        if (!(l1 > 0.0)) return std::numeric_limits<double>::quiet_NaN();
        return std::log(l1) + barrier_jet(s_field.samples[p], qm.sup_grad_sq).value +
               std::exp(-A * phi.samples[p]);
    };
    Eigen::VectorXd dq(d);
    Eigen::MatrixXd d2q(d, d);
    auto differentiate = [&](bool short_stencil) {
        for (int a = 0; a < d; ++a) {
            dq[a] = local_d1<double>(g, qhat_b, x0, a, short_stencil);
            d2q(a, a) = local_d2(g, qhat_b, x0, a, short_stencil);
            for (int b = 0; b < a; ++b) {
                d2q(a, b) = local_d1<double>(
                    g,
                    [&](Eigen::Index p) { return local_d1<double>(g, qhat_b, p, b, short_stencil); },
                    x0, a, short_stencil);
                d2q(b, a) = d2q(a, b);
            }
        }
    };
    // On coarse grids the wide stencil can leave M₊, where Q̂ is undefined.
    differentiate(false);
    L.first_order_stencil = 4;
    if (!dq.allFinite() || !d2q.allFinite()) {
        differentiate(true);
        L.first_order_stencil = 2;
    }
    if (!dq.allFinite() || !d2q.allFinite()) {
        L.first_order_ok = false;
        L.first_order_defect = NAN;
        L.first_order_tolerance = NAN;
    } else {
        const double h = g.spacing();
        const double absolute = 1e-8 * std::max(1.0, std::abs(L.qhat));
        bool ok = true;
        double tol_max = 0.0;
        for (int a = 0; a < d; ++a) {
            const double tol = 0.5 * h * d2q.row(a).cwiseAbs().sum() + absolute;
            tol_max = std::max(tol_max, tol);
            ok = ok && std::abs(dq[a]) <= tol;
        }
        L.first_order_defect = dq.cwiseAbs().maxCoeff();
        L.first_order_tolerance = tol_max;
        L.first_order_ok = ok;
    }
    return L;
}

} // namespace sigma2
