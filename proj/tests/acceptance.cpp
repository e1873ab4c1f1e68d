// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "oracles/frozen.hpp"
#include "sigma2/audit.hpp"
#include "sigma2/concavity.hpp"
#include "sigma2/jacobi.hpp"
#include "sigma2/perturb.hpp"
#include "sigma2/solver.hpp"

using namespace sigma2;

namespace {

constexpr int kSamplesPerN = 10000;

struct Outcome {
    bool passed;
    std::string detail;
};

int failures = 0;

void report(int id, const char* name, double budget_s, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o{false, ""};
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool ok = o.passed && secs <= budget_s;
    if (!ok) ++failures;
    std::printf("%s %2d %s: %s time=%.1fs budget=%.0fs\n", ok ? "PASS" : "FAIL", id, name, o.detail.c_str(), secs,
                budget_s);
    std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

const std::vector<Spectrum>& samples(int n) {
    static std::vector<std::vector<Spectrum>> cache(9);
    auto& s = cache[static_cast<std::size_t>(n)];
    if (s.empty()) s = sample_gamma_k(n, 2, kSamplesPerN, 2024 + static_cast<std::uint64_t>(n));
    return s;
}

double discrete_error(int res, double delta) {
    const double h = 2 * std::numbers::pi / res;
    const double mu = (30 - 32 * std::cos(h) + 2 * std::cos(2 * h)) / (12 * h * h);
    return delta * std::abs(1 / mu - 1);
}

struct Solved {
    ManufacturedCase mc;
    SolverReport rep;
};

std::vector<Solved> solved;

Outcome det_identity_check() {
    double worst = 0;
    for (int n = 2; n <= 8; ++n)
        for (const Spectrum& eta : samples(n)) {
            const DetIdentity d = det_identity(eta);
            worst = std::max(worst, rel(d.det, d.predicted));
        }
    return {worst <= 1e-10, fmt("worst rel=%.3g bound=1e-10 samples=%.0f", worst, 7.0 * kSamplesPerN)};
}

Outcome decomposition_check() {
    double sum_a = 0, m2 = 0;
    for (int n = 2; n <= 8; ++n)
        for (const Spectrum& eta : samples(n)) {
            const Decomposition dec = decomposition(eta);
            sum_a = std::max(sum_a, rel(dec.sum_det_a, dec.predicted_sum_det_a));
            m2 = std::max(m2, rel(dec.det_m2, dec.predicted_det_m2));
        }
    return {sum_a <= 1e-9 && m2 <= 1e-9, fmt("sum det A_i rel=%.3g det M2 rel=%.3g bound=1e-9", sum_a, m2)};
}

Outcome weyl_check() {
    long outside = 0, above = 0, total = 0;
    for (int n = 2; n <= 8; ++n)
        for (const Spectrum& eta : samples(n)) {
            const ConcavityMatrix m = assemble(eta);
            const ConcavitySpectrum sp = spectral(m);
            const WeylEnvelope w = weyl_envelope(eta);
            const double slop = 1e-12 * m.entries.norm();
            bool in = sp.kappas[0] >= w.kappa1_lo - slop && sp.kappas[0] <= w.kappa1_hi + slop;
            for (int i = 1; i < n; ++i) in = in && sp.kappas[i] <= w.kappa_tail_hi + slop;
            outside += !in;
            above += sp.kappas[n - 1] > m.entries(0, 0) * (1 + 1e-12);
            ++total;
        }
    return {outside == 0 && above == 0,
            fmt("outside envelope=%.0f kappa_n above G11 term=%.0f of %.0f", double(outside), double(above),
                double(total))};
}

Outcome elimination_check() {
    int used = 0, degenerate = 0;
    double mismatch = 0, residual = 0;
    std::uint64_t seed = 77;
    while (used < 1000) {
        for (const Spectrum& eta : sample_gamma_k(4, 2, 500, seed++)) {
            const ConcavityMatrix m = assemble(eta);
            const ConcavitySpectrum sp = spectral(m);
            if (!sp.simple(3) || sp.kappas[2] - sp.kappas[3] <= 1e-6 * sp.kappas[0]) continue;
            ++used;
            try {
                const Eigen::VectorXd d = min_eigvec_elimination(eta, sp.kappas[3]);
                const Eigen::VectorXd u = d.normalized(), xi = sp.xis.col(3);
                mismatch = std::max(mismatch, std::min((u - xi).norm(), (u + xi).norm()));
                residual = std::max(residual, (m.entries * d - sp.kappas[3] * d).norm() / d.norm());
            } catch (const EliminationDegenerate&) {
                ++degenerate;
            }
        }
    }
    return {degenerate == 0 && mismatch <= 1e-8 && residual <= 1e-8,
            fmt("samples=%.0f mismatch=%.3g residual=%.3g degenerate=%.0f bound=1e-8", used, mismatch, residual,
                degenerate)};
}

Outcome tail_check() {
    const std::vector<double> grid(frozen::kTailGrid.begin(), frozen::kTailGrid.end());
    double fixed_k = 0, fixed_x = 0, fixed_floor = INFINITY;
    double bounded_k = 0, bounded_floor = INFINITY, bounded_xi = 0;
    for (const auto& t : frozen::kTails) {
        const Spectrum tail{t[0], t[1], t[2]};
        auto spread = [](const std::vector<TailDecayRow>& rows, double TailDecayRow::*f) {
            double lo = INFINITY, hi = 0;
            for (const auto& r : rows) {
                lo = std::min(lo, r.*f);
                hi = std::max(hi, r.*f);
            }
            return hi / lo;
        };
        const auto fixed = tail_decay_profile(tail, grid, TailFamily::fixed_tail);
        fixed_k = std::max(fixed_k, spread(fixed, &TailDecayRow::t2_kappa_n));
        fixed_x = std::max(fixed_x, spread(fixed, &TailDecayRow::t2_xi_tail));
        for (const auto& r : fixed) fixed_floor = std::min(fixed_floor, r.kappa_n_minus_1);
        const auto bounded = tail_decay_profile(tail, grid, TailFamily::bounded_sigma2);
        bounded_k = std::max(bounded_k, spread(bounded, &TailDecayRow::t2_kappa_n));
        for (const auto& r : bounded) {
            bounded_floor = std::min(bounded_floor, r.kappa_n_minus_1);
            bounded_xi = std::max(bounded_xi, r.t2_xi_tail);
        }
    }
    const bool fixed_ok = fixed_k <= 10 && fixed_x <= 10 && fixed_floor >= frozen::kFixedTailKappaFloor;
    const bool bounded_ok =
        bounded_k <= 10 && bounded_floor >= frozen::kBoundedKappaFloor && bounded_xi <= frozen::kBoundedXiSup;
    return {fixed_ok && bounded_ok,
            fmt("fixed tail: kappa spread=%.3g xi spread=%.3g min kappa_{n-1}=%.3g; ", fixed_k, fixed_x, fixed_floor) +
                fmt("bounded sigma2: kappa spread=%.3g min kappa_{n-1}=%.3g max xi tail=%.3g", bounded_k,
                    bounded_floor, bounded_xi)};
}

Outcome derivative_check() {
    std::mt19937_64 rng(6);
    std::normal_distribution<double> N;
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    double first = 0, second = 0;
    auto top = [](const Eigen::MatrixXd& h) { return jacobi_eigen(h).values[0]; };
    for (int n = 2; n <= 4; ++n) {
        const int d = 2 * n;
        for (int s = 0; s < 1000; ++s) {
            Eigen::MatrixXd g(d, d);
            for (auto& x : g.reshaped()) x = N(rng);
            const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ();
            Eigen::VectorXd lam(d);
            for (auto& x : lam) x = U(rng);
            std::sort(lam.data(), lam.data() + d, std::greater<>());
            lam[0] = lam[1] + 1.0 + 0.5 * (U(rng) + 1.0);
            Eigen::MatrixXd H = q * lam.asDiagonal() * q.transpose();
            H = (0.5 * (H + H.transpose())).eval();
            for (auto& x : g.reshaped()) x = N(rng);
            Eigen::MatrixXd E = (0.5 * (g + g.transpose())).eval();
            E /= E.norm();
            const RealHessianEig eig = real_hessian_eig(H);
            const double h1 = 1e-4, h2 = 1e-3;
            const double fd1 = (top(H + h1 * E) - top(H - h1 * E)) / (2 * h1);
            first = std::max(first, std::abs(fd1 - d_lambda1(eig).cwiseProduct(E).sum()));
            const double fd2 = (top(H + h2 * E) - 2 * top(H) + top(H - h2 * E)) / (h2 * h2);
            second = std::max(second, std::abs(fd2 - d2_lambda1_form(eig, E)));
        }
    }
    return {first <= 1e-8 && second <= 1e-4,
            fmt("first=%.3g (bound 1e-8) second=%.3g (bound 1e-4) instances=3000", first, second)};
}

Outcome slack_check() {
    double worst = INFINITY;
    for (int n = 2; n <= 8; ++n)
        for (const Spectrum& eta : samples(n)) {
            const SlackRecord s = inequality_slacks(eta);
            worst = std::min({worst, s.maclaurin_sum_slack, s.eta1_sigma1_slack, s.sigma1_product_slack});
        }
    double equality = 0;
    for (int n = 2; n <= 8; ++n) {
        equality = std::max(equality, std::abs(inequality_slacks(Spectrum(Eigen::VectorXd::Ones(n))).eta1_sigma1_slack));
    }
    return {worst >= -1e-12 && equality == 0.0,
            fmt("min slack=%.3g bound=-1e-12 equality-case slack=%.3g", worst, equality)};
}

Outcome manufactured_check() {
    const double delta = 0.5;
    double err[2];
    bool conv = true;
    int k = 0;
    for (int res : {16, 32}) {
        ManufacturedCase mc = manufactured_case(2, res, delta);
        SolverReport rep = newton_solve(mc.cfg, ScalarField(mc.cfg.grid()));
        conv = conv && rep.converged;
        err[k++] = (rep.phi.samples - mc.phi_star.samples).lpNorm<Eigen::Infinity>();
        solved.push_back({std::move(mc), std::move(rep)});
    }
    const double ratio = err[0] / err[1];
    return {conv && err[1] <= 1e-4 && ratio >= 8,
            fmt("n=2 converged=%.0f err16=%.4g err32=%.4g ratio=%.3g", conv, err[0], err[1], ratio) +
                fmt(" (discrete exact %.4g, %.4g)", discrete_error(16, delta), discrete_error(32, delta))};
}

Outcome manufactured_n3_check() {
    ManufacturedCase mc = manufactured_case(3, 8, 0.5);
    SolverReport rep = newton_solve(mc.cfg, ScalarField(mc.cfg.grid()));
    const bool ok = rep.converged && rep.residual_linf <= 1e-6;
    const std::string d = fmt("n=3 res=8 converged=%.0f residual=%.3g iters=%.0f", rep.converged, rep.residual_linf,
                              rep.iters);
    solved.push_back({std::move(mc), std::move(rep)});
    return {ok, d};
}

Outcome frechet_check() {
    const ManufacturedCase mc = manufactured_case(2, 8, 0.5);
    const TorusGrid g = mc.cfg.grid();
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    double worst = INFINITY;
    for (int s = 0; s < 100; ++s) {
        const double a = U(rng), b = U(rng), p = std::numbers::pi * U(rng);
        const int i = s % 4, j = (s / 4) % 4;
        const ScalarField u = ScalarField::from_function(g, [&](const Eigen::VectorXd& x) {
            return a * std::cos(x[i] + p) + b * std::sin(x[i] - x[j] + 2 * p);
        });
        const Eigen::VectorXd lu = linearized_apply(mc.phi_star, u, mc.cfg).samples;
        double errs[2];
        double h = 1e-2;
        for (double& e : errs) {
            const auto r = [&](double t) {
                return residual(ScalarField(g, mc.phi_star.samples + t * u.samples), mc.cfg).samples;
            };
            e = ((r(h) - r(-h)) / (2 * h) - lu).lpNorm<Eigen::Infinity>();
            h *= 0.5;
        }
        worst = std::min(worst, std::log2(errs[0] / errs[1]));
    }
    return {worst >= 1.9, fmt("min observed order=%.4g over 100 directions bound=1.9", worst)};
}

Outcome ledger_check() {
    if (solved.empty()) return {false, "no manufactured solutions available"};
    double split = 0, nu = 0, mu = 0, term_I = INFINITY, barrier = 0;
    bool first_order = true;
    for (const Solved& s : solved) {
        const AuditLedger l = ledger(s.rep.phi, 13.0, 0.08, s.mc.cfg);
        const double sum = l.term_II1 + l.term_II2 + l.term_II3;
        split = std::max(split, l.term_II == 0.0 ? std::abs(sum) : rel(sum, l.term_II));
        nu = std::max(nu, std::abs(l.nu.squaredNorm() - 1.0));
        mu = std::max(mu, std::abs(l.mu.squaredNorm() - 1.0));
        term_I = std::min(term_I, l.term_I);
        barrier = std::max(barrier, std::abs(l.barrier.d2 - 2 * l.barrier.d1 * l.barrier.d1));
        first_order = first_order && l.first_order_ok;
    }
    return {split <= 1e-10 && nu <= 1e-8 && mu <= 1e-8 && term_I >= -1e-8 && barrier == 0.0 && first_order,
            fmt("split rel=%.3g nu=%.3g mu=%.3g min term_I=%.3g", split, nu, mu, term_I) +
                fmt(" barrier defect=%.3g first order ok=%.0f cases=%.0f", barrier, first_order,
                    double(solved.size()))};
}

Outcome concavity_check() {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> N;
    double worst = INFINITY;
    int pairs = 0;
    while (pairs < 100000) {
        for (int n = 2; n <= 8 && pairs < 100000; ++n) {
            const Spectrum& eta = samples(n)[static_cast<std::size_t>(pairs / 7 % kSamplesPerN)];
            Eigen::MatrixXcd p(n, n);
            for (auto& z : p.reshaped()) z = {N(rng), N(rng)};
            p = (0.5 * (p + p.adjoint())).eval();
            worst = std::min(worst, quad_form(eta, p));
            ++pairs;
        }
    }
    double kappa = INFINITY;
    for (int n = 2; n <= 8; ++n)
        for (const Spectrum& eta : samples(n)) kappa = std::min(kappa, spectral(assemble(eta)).kappas[n - 1]);
    return {worst >= -1e-10 && kappa > 0.0,
            fmt("min quad form=%.3g bound=-1e-10 pairs=1e5 min kappa_n=%.3g", worst, kappa)};
}

} // namespace

int main() {
    report(1, "determinant identity", 60, det_identity_check);
    report(2, "determinant decomposition", 60, decomposition_check);
    report(3, "weyl envelope", 60, weyl_check);
    report(4, "elimination eigenvector", 60, elimination_check);
    report(5, "tail decay profile", 30, tail_check);
    report(6, "top eigenvalue derivatives", 60, derivative_check);
    report(7, "inequality slacks", 60, slack_check);
    report(8, "manufactured solve n=2", 120, manufactured_check);
    report(8, "manufactured solve n=3", 600, manufactured_n3_check);
    report(9, "linearization consistency", 120, frechet_check);
    report(10, "audit ledger", 120, ledger_check);
    report(11, "concavity", 60, concavity_check);
    std::printf("%s: %d failing\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
    return failures == 0 ? 0 : 1;
}
