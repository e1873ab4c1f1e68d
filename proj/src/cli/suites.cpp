#include "suites.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

#include "sigma2/audit.hpp"
#include "sigma2/concavity.hpp"
#include "sigma2/jacobi.hpp"
#include "sigma2/perturb.hpp"
#include "sigma2/report.hpp"
#include "sigma2/solver.hpp"
#include "sigma2/symfun.hpp"

namespace sigma2::cli {

namespace {

namespace fs = std::filesystem;

std::vector<int> dimensions(const RunConfig& cfg, int lo, int hi) {
    if (cfg.n) {
        if (*cfg.n < lo || *cfg.n > hi) {
            throw InvalidArgument("--n must lie in [" + std::to_string(lo) + ", " +
                                  std::to_string(hi) + "] for this suite");
        }
        return {*cfg.n};
    }
    std::vector<int> ns;
    for (int n = lo; n <= hi; ++n) ns.push_back(n);
    return ns;
}

// Accumulates the worst value of one check across samples.
struct Tracker {
    std::string suite;
    std::string name;
    double threshold;
    bool upper;  // true: value ≤ threshold; false: value ≥ threshold
    double worst = NAN;
    bool passed = true;

    void see(double v) {
        const bool ok = upper ? v <= threshold : v >= threshold;
        passed = passed && ok;
        if (std::isnan(worst) || (upper ? v > worst : v < worst) || std::isnan(v)) worst = v;
    }
    Check done() const { return {suite, name, passed && !std::isnan(worst), worst, threshold}; }
};

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

Eigen::MatrixXcd random_hermitian(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> N;
    Eigen::MatrixXcd p(n, n);
    for (int i = 0; i < n; ++i) {
        p(i, i) = N(rng);
        for (int k = i + 1; k < n; ++k) {
            p(i, k) = {N(rng), N(rng)};
            p(k, i) = std::conj(p(i, k));
        }
    }
    return p;
}

std::vector<Check> symfun_suite(const RunConfig& cfg, std::vector<std::string>& outputs) {
    CsvTable table("n,sample,maclaurin_sum_slack,eta1_sigma1_slack,sigma1_product_slack,min_grad_ratio");
    Tracker slack{"symfun", "slacks_nonnegative", -1e-12, false};
    Tracker ratio{"symfun", "min_grad_ratio_positive", 0.0, false};
    Tracker recursion{"symfun", "sigma_k_recursion_rel_error", 1e-12, true};
    Tracker nesting{"symfun", "gamma_nesting_violations", 0.0, true};
    for (int n : dimensions(cfg, 2, 8)) {
        const auto spectra = sample_gamma_k(n, 2, cfg.samples, cfg.seed + static_cast<unsigned>(n));
        for (std::size_t s = 0; s < spectra.size(); ++s) {
            const Spectrum& eta = spectra[s];
            const SlackRecord r = inequality_slacks(eta);
            table.add(std::to_string(n) + ',' + std::to_string(s) + ',' + fmt(r.maclaurin_sum_slack) +
                      ',' + fmt(r.eta1_sigma1_slack) + ',' + fmt(r.sigma1_product_slack) + ',' +
                      fmt(r.min_grad_ratio));
            slack.see(std::min({r.maclaurin_sum_slack, r.eta1_sigma1_slack, r.sigma1_product_slack}));
            ratio.see(r.min_grad_ratio > 0.0 ? r.min_grad_ratio : -1.0);
            const Eigen::VectorXd mag = eta.values().cwiseAbs();
            for (int k = 2; k <= n; ++k) {
                for (Eigen::Index i = 0; i < n; ++i) {
                    const double lower = k - 1 == 0 ? 1.0 : sigma_k_excluding(eta, k - 1, i);
                    const double excl = k <= n - 1 ? sigma_k_excluding(eta, k, i) : 0.0;
                    const double err = std::abs(sigma_k(eta, k) - (excl + eta[i] * lower));
                    recursion.see(err / std::max(sigma_k(mag, k), 1e-300));
                }
            }
            int bad = 0;
            for (int k = 2; k <= n; ++k) {
                for (int j = 1; j < k; ++j) bad += in_gamma_k(eta, k) && !in_gamma_k(eta, j);
            }
            nesting.see(bad);
        }
    }
    table.write((fs::path(cfg.out_dir) / "verify_symfun.csv").string());
    outputs.push_back("verify_symfun.csv");
    return {slack.done(), ratio.done(), recursion.done(), nesting.done()};
}

std::vector<Check> concavity_suite(const RunConfig& cfg, std::vector<std::string>& outputs) {
    Tracker det{"concavity", "det_identity_rel_error", 1e-10, true};
    Tracker sum_a{"concavity", "sum_det_a_rel_error", 1e-9, true};
    Tracker m2{"concavity", "det_m2_rel_error", 1e-9, true};
    Tracker weyl{"concavity", "weyl_envelope_excess", 0.0, true};
    Tracker kappa_pos{"concavity", "kappa_n_positive", 0.0, false};
    Tracker kappa_top{"concavity", "kappa_n_minus_g11_excess", 0.0, true};
    Tracker quad{"concavity", "quad_form_min", -1e-10, false};
    Tracker elim{"concavity", "elimination_mismatch", 1e-8, true};
    std::mt19937_64 rng(cfg.seed ^ 0x5eedULL);
    for (int n : dimensions(cfg, 2, 8)) {
        CsvTable table(concavity_csv_header(n));
        const auto spectra = sample_gamma_k(n, 2, cfg.samples, cfg.seed + static_cast<unsigned>(n));
        for (const Spectrum& eta : spectra) {
            table.add(concavity_csv_row(eta));
            const DetIdentity d = det_identity(eta);
            det.see(rel(d.det, d.predicted));
            const Decomposition dec = decomposition(eta);
            sum_a.see(rel(dec.sum_det_a, dec.predicted_sum_det_a));
            m2.see(rel(dec.det_m2, dec.predicted_det_m2));
            const ConcavityMatrix m = assemble(eta);
            const ConcavitySpectrum sp = spectral(m);
            const WeylEnvelope w = weyl_envelope(eta);
            const double slop = 1e-12 * m.entries.norm();
            double excess = std::max(w.kappa1_lo - sp.kappas[0], sp.kappas[0] - w.kappa1_hi);
            for (Eigen::Index i = 1; i < n; ++i) excess = std::max(excess, sp.kappas[i] - w.kappa_tail_hi);
            weyl.see(excess > slop ? excess : 0.0);
            kappa_pos.see(sp.kappas[n - 1] > 0.0 ? sp.kappas[n - 1] : -1.0);
            const double top = sp.kappas[n - 1] - m.entries(0, 0);
            kappa_top.see(top > slop ? top : 0.0);
            quad.see(quad_form(eta, random_hermitian(n, rng)));
            if (n == 4 && sp.simple(n - 1)) {
                const double gap = sp.kappas[n - 2] - sp.kappas[n - 1];
                if (gap > 1e-6 * std::abs(sp.kappas[0])) {
                    try {
                        const Eigen::VectorXd v = min_eigvec_elimination(eta, sp.kappas[n - 1]);
                        const Eigen::VectorXd u = v.normalized();
                        const Eigen::VectorXd xi = sp.xis.col(n - 1);
                        const double mismatch = std::min((u - xi).norm(), (u + xi).norm());
                        const double residual =
                            (m.entries * v - sp.kappas[n - 1] * v).norm() / v.norm();
                        elim.see(std::max(mismatch, residual));
                    } catch (const EliminationDegenerate&) {
                        const Eigen::VectorXd v = kernel_vector(m.entries, sp.kappas[n - 1]);
                        elim.see((m.entries * v - sp.kappas[n - 1] * v).norm());
                    }
                }
            }
        }
        const std::string name = "verify_concavity_n" + std::to_string(n) + ".csv";
        table.write((fs::path(cfg.out_dir) / name).string());
        outputs.push_back(name);
    }
    std::vector<Check> out = {det.done(), sum_a.done(), m2.done(), weyl.done(),
                              kappa_pos.done(), kappa_top.done(), quad.done()};
    if (!std::isnan(elim.worst)) out.push_back(elim.done());
    return out;
}

std::vector<Check> perturb_suite(const RunConfig& cfg) {
    Tracker first{"perturb", "d_lambda1_fd_error", 1e-8, true};
    Tracker second{"perturb", "d2_lambda1_fd_error", 1e-4, true};
    Tracker convex{"perturb", "d2_lambda1_min", 0.0, false};
    Tracker phi_top{"perturb", "build_phi_top_shift", 0.0, true};
    std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
    std::normal_distribution<double> N;
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int n : dimensions(cfg, 2, 4)) {
        const int d = 2 * n;
        for (int s = 0; s < cfg.samples; ++s) {
            Eigen::MatrixXd g(d, d);
            for (int i = 0; i < d; ++i)
                for (int k = 0; k < d; ++k) g(i, k) = N(rng);
            const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ();
            Eigen::VectorXd lam(d);
            for (int i = 0; i < d; ++i) lam[i] = U(rng);
            std::sort(lam.data(), lam.data() + d, std::greater<>());
            lam[0] = lam[1] + 1.0 + 0.5 * (U(rng) + 1.0);
            Eigen::MatrixXd H = q * lam.asDiagonal() * q.transpose();
            H = 0.5 * (H + H.transpose()).eval();
            Eigen::MatrixXd E(d, d);
            for (int i = 0; i < d; ++i)
                for (int k = 0; k < d; ++k) E(i, k) = N(rng);
            E = (0.5 * (E + E.transpose())).eval();
            E /= E.norm();
            const RealHessianEig eig = real_hessian_eig(H);
            auto top = [&](double t) { return jacobi_eigen(Eigen::MatrixXd(H + t * E)).values[0]; };
            const double h1 = 1e-4;
            const double fd1 = (top(h1) - top(-h1)) / (2 * h1);
            first.see(std::abs(fd1 - d_lambda1(eig).cwiseProduct(E).sum()));
            const double h2 = 1e-3;
            const double fd2 = (top(h2) - 2 * top(0.0) + top(-h2)) / (h2 * h2);
            const double an2 = d2_lambda1_form(eig, E);
            second.see(std::abs(fd2 - an2));
            convex.see(an2);
            const PerturbedEndo endo = build_phi(eig, H);
            phi_top.see(std::abs(jacobi_eigen(endo.phi).values[0] - eig.lambdas[0]) /
                        std::max(1.0, std::abs(eig.lambdas[0])) > 1e-12 ? 1.0 : 0.0);
        }
    }
    return {first.done(), second.done(), convex.done(), phi_top.done()};
}

// φ = cos x₁ + ½ sin(x₂ + x₃) + 0.3 cos(x₁ − x₄) on T⁴ with its exact real Hessian.
double geometry_phi(const Eigen::VectorXd& x) {
    return std::cos(x[0]) + 0.5 * std::sin(x[1] + x[2]) + 0.3 * std::cos(x[0] - x[3]);
}

Eigen::Matrix4d geometry_hessian(const Eigen::VectorXd& x) {
    Eigen::Matrix4d h = Eigen::Matrix4d::Zero();
    h(0, 0) -= std::cos(x[0]);
    const double s = -0.5 * std::sin(x[1] + x[2]);
    h(1, 1) += s;
    h(2, 2) += s;
    h(1, 2) += s;
    h(2, 1) += s;
    const double c = -0.3 * std::cos(x[0] - x[3]);
    h(0, 0) += c;
    h(3, 3) += c;
    h(0, 3) -= c;
    h(3, 0) -= c;
    return h;
}

std::vector<Check> geometry_suite() {
    Tracker herm{"geometry", "complex_hessian_hermitian_defect", 1e-12, true};
    Tracker trace{"geometry", "trace_identity_defect", 1e-10, true};
    Tracker order{"geometry", "complex_hessian_error_ratio_res8_res16", 14.0, false};
    double err[2] = {0.0, 0.0};
    for (int r = 0; r < 2; ++r) {
        const TorusGrid g(2, r == 0 ? 8 : 16);
        const ScalarField phi = ScalarField::from_function(g, geometry_phi);
        const FrameField frame = FrameField::standard(g);
        const HermitianField cx = complex_hessian(phi, frame);
        const SymmetricField rh = real_hessian(phi);
        const Eigen::MatrixXcd c = frame.at(0);
        for (Eigen::Index p = 0; p < g.size(); ++p) {
            const Eigen::MatrixXcd m = cx.at(p);
            herm.see((m - m.adjoint()).cwiseAbs().maxCoeff());
            trace.see(std::abs(m.trace().real() - 0.5 * rh.at(p).trace()));
            const Eigen::MatrixXcd exact = c * geometry_hessian(g.position(p)) * c.adjoint();
            err[r] = std::max(err[r], (m - exact).cwiseAbs().maxCoeff());
        }
    }
    order.see(err[0] / err[1]);
    return {herm.done(), trace.done(), order.done()};
}

ScalarField smooth_direction(const TorusGrid& g, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    const int d = g.dim();
    std::vector<double> amp(3), phase(3);
    std::vector<int> axis(3);
    for (int k = 0; k < 3; ++k) {
        amp[static_cast<std::size_t>(k)] = U(rng);
        phase[static_cast<std::size_t>(k)] = std::numbers::pi * U(rng);
        axis[static_cast<std::size_t>(k)] = static_cast<int>((U(rng) + 1.0) * 0.5 * d) % d;
    }
    return ScalarField::from_function(g, [&](const Eigen::VectorXd& x) {
        double v = 0.0;
        for (std::size_t k = 0; k < 3; ++k) v += amp[k] * std::cos(x[axis[k]] + phase[k] + x[(axis[k] + 1) % d]);
        return v;
    });
}

/// Observed order of (R(φ+hu) − R(φ−hu))/2h → L(u) between h and h/2.
double frechet_order(const ScalarField& phi, const ScalarField& u, const SolverConfig& cfg) {
    const Eigen::VectorXd lu = linearized_apply(phi, u, cfg).samples;
    double errs[2];
    double h = 1e-2;
    for (double& e : errs) {
        const Eigen::VectorXd plus = residual(ScalarField(phi.grid, phi.samples + h * u.samples), cfg).samples;
        const Eigen::VectorXd minus = residual(ScalarField(phi.grid, phi.samples - h * u.samples), cfg).samples;
        e = ((plus - minus) / (2 * h) - lu).lpNorm<Eigen::Infinity>();
        h *= 0.5;
    }
    return std::log2(errs[0] / errs[1]);
}

double discrete_manufactured_error(int res, double delta) {
    const double h = 2 * std::numbers::pi / res;
    const double mu = (30 - 32 * std::cos(h) + 2 * std::cos(2 * h)) / (12 * h * h);
    return delta * std::abs(1 / mu - 1);
}

std::vector<Check> solver_suite(const RunConfig& cfg) {
    const double delta = 0.5;
    const ManufacturedCase mc = manufactured_case(2, 16, delta);
    const SolverReport rep = newton_solve(mc.cfg, ScalarField(mc.cfg.grid()));
    Tracker conv{"solver", "manufactured_residual_linf", mc.cfg.newton_tol, true};
    conv.see(rep.converged ? rep.residual_linf : INFINITY);
    Tracker err{"solver", "manufactured_error_vs_discrete_exact", 1e-8, true};
    const double e = (rep.phi.samples - mc.phi_star.samples).lpNorm<Eigen::Infinity>();
    err.see(std::abs(e - discrete_manufactured_error(16, delta)));
    Tracker cone{"solver", "min_sigma2_minus_margin", 0.0, false};
    cone.see(rep.min_sigma2 - mc.cfg.cone_margin);
    Tracker frechet{"solver", "frechet_order", 1.9, false};
    std::mt19937_64 rng(cfg.seed ^ 0xf7ec4e7ULL);
    const ManufacturedCase small = manufactured_case(2, 8, delta);
    for (int s = 0; s < std::min(cfg.samples, 10); ++s) {
        frechet.see(frechet_order(small.phi_star, smooth_direction(small.phi_star.grid, rng), small.cfg));
    }
    return {conv.done(), err.done(), cone.done(), frechet.done()};
}

std::vector<Check> audit_suite(const RunConfig& cfg) {
    const ManufacturedCase mc = manufactured_case(2, 16, 0.5);
    const SolverReport rep = newton_solve(mc.cfg, ScalarField(mc.cfg.grid()));
    const AuditLedger l = ledger(rep.phi, cfg.A, cfg.eps, mc.cfg);
    Tracker split{"audit", "II_split_rel_error", 1e-10, true};
    const double sum = l.term_II1 + l.term_II2 + l.term_II3;
    split.see(l.term_II == 0.0 ? std::abs(sum) : rel(sum, l.term_II));
    Tracker nu{"audit", "nu_norm_defect", 1e-8, true};
    nu.see(std::abs(l.nu.squaredNorm() - 1.0));
    Tracker mu{"audit", "mu_norm_defect", 1e-8, true};
    mu.see(std::abs(l.mu.squaredNorm() - 1.0));
    Tracker good{"audit", "term_I_min", -1e-8, false};
    good.see(l.term_I);
    Tracker barrier{"audit", "barrier_identity_defect", 0.0, true};
    barrier.see(std::abs(l.barrier.d2 - 2 * l.barrier.d1 * l.barrier.d1));
    Tracker first{"audit", "first_order_defect_minus_tolerance", 0.0, true};
    first.see(l.first_order_ok ? 0.0 : l.first_order_defect - l.first_order_tolerance);
    return {split.done(), nu.done(), mu.done(), good.done(), barrier.done(), first.done()};
}

} // namespace

std::vector<Check> run_suite(const std::string& suite, const RunConfig& cfg,
                             std::vector<std::string>& outputs) {
    if (suite == "all") {
        std::vector<Check> all;
        for (const auto& s : kSuites) {
            auto part = run_suite(s, cfg, outputs);
            all.insert(all.end(), part.begin(), part.end());
        }
        return all;
    }
    if (suite == "symfun") return symfun_suite(cfg, outputs);
    if (suite == "concavity") return concavity_suite(cfg, outputs);
    if (suite == "perturb") return perturb_suite(cfg);
    if (suite == "geometry") return geometry_suite();
    if (suite == "solver") return solver_suite(cfg);
    if (suite == "audit") return audit_suite(cfg);
    throw InvalidArgument("unknown suite '" + suite + "'");
}

} // namespace sigma2::cli
