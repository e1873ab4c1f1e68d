#include "sigma2/solver.hpp"

#include <cmath>
#include <sstream>

#include "sigma2/jacobi.hpp"
#include "sigma2/parallel.hpp"

namespace sigma2 {

std::string to_string(Gauge g) { return g == Gauge::sup_zero ? "sup_zero" : "mean_zero"; }

Gauge gauge_from_string(const std::string& name) {
    if (name == "sup_zero") return Gauge::sup_zero;
    if (name == "mean_zero") return Gauge::mean_zero;
    throw InvalidArgument("unknown gauge '" + name + "'");
}

SolverConfig::SolverConfig(int n_, int res_, RhsModel rhs_, HermitianField chi_)
    : n(n_), res(res_), rhs(std::move(rhs_)), chi(std::move(chi_)) {
    require_same_grid(chi.grid, grid(), "SolverConfig chi");
}

double SolverConfig::eps0() const {
    double low = INFINITY;
    for (Eigen::Index p = 0; p < chi.grid.size(); ++p) {
        const Eigen::MatrixXcd m = chi.at(p);
        if ((m - m.adjoint()).norm() > 1e-12 * std::max(1.0, m.norm())) {
            throw InvalidArgument("chi is not Hermitian at grid point " + std::to_string(p));
        }
        low = std::min(low, jacobi_eigen(m).values[n - 1]);
    }
    if (!(low > 0.0)) {
        throw InvalidArgument("chi must be positive definite (smallest eigenvalue " +
                              std::to_string(low) + ")");
    }
    return low;
}

SolverConfig default_config(int n, int res, RhsModel rhs) {
    const TorusGrid g(n, res);
    return SolverConfig(n, res, std::move(rhs),
                        HermitianField::constant(g, Eigen::MatrixXcd::Identity(n, n)));
}

namespace {

double log_binomial2(int n) { return std::log(0.5 * n * (n - 1)); }

// g̃ = χ + φ_{ij̄} for the standard frame, with σ₁ and σ₂ per point.
struct Metric {
    HermitianField gt;
    ConeFields cone;
};

Metric metric(const ScalarField& phi, const SolverConfig& cfg) {
    require_same_grid(phi.grid, cfg.grid(), "solver");
    const FrameField frame = FrameField::standard(phi.grid);
    HermitianField gt = complex_hessian(phi, frame);
    gt.data += cfg.chi.data;
    const Eigen::Index N = phi.grid.size();
    ConeFields cone{Eigen::VectorXd(N), Eigen::VectorXd(N)};
    parallel_for(static_cast<std::size_t>(N), [&](std::size_t b, std::size_t e) {
        for (auto p = static_cast<Eigen::Index>(b); p < static_cast<Eigen::Index>(e); ++p) {
            const auto a = gt.at(p);
            const double s1 = a.trace().real();
            cone.sigma1[p] = s1;
            cone.sigma2[p] = 0.5 * (s1 * s1 - a.squaredNorm());
        }
    });
    return {std::move(gt), std::move(cone)};
}

// Index of the point that is furthest outside Γ₂, or −1.
Eigen::Index worst_cone_point(const ConeFields& c, double margin) {
    Eigen::Index worst = -1;
    double depth = 0.0;
    for (Eigen::Index p = 0; p < c.sigma1.size(); ++p) {
        const double d = std::max(margin - c.sigma2[p], c.sigma1[p] > 0.0 ? -INFINITY : -c.sigma1[p]);
        const bool bad = !(c.sigma1[p] > 0.0) || !(c.sigma2[p] > margin);
        if (bad && (worst < 0 || d > depth)) {
            worst = p;
            depth = d;
        }
    }
    return worst;
}

[[noreturn]] void throw_cone(const ConeFields& c, Eigen::Index p, const TorusGrid& g,
                             const char* where) {
    std::ostringstream os;
    os << where << ": g~ leaves Gamma_2 at grid point " << p << " (x =";
    const Eigen::VectorXd x = g.position(p);
    for (Eigen::Index a = 0; a < x.size(); ++a) os << ' ' << x[a];
    os << ')';
    throw ConeViolation(os.str(), c.sigma1[p], c.sigma2[p]);
}

Eigen::VectorXd residual_of(const Metric& m, const RhsJet& jet, int n) {
    return (m.cone.sigma2.array().log() - log_binomial2(n)).matrix() - jet.F;
}

// Coefficients of L(u) = Σ_ab Ĝ^{ab}∂_a∂_b u + Σ_a β^a ∂_a u − F_r u.
struct LinearOperator {
    TorusGrid grid;
    Eigen::MatrixXd ghat;  // d² × N
    Eigen::MatrixXd beta;  // d × N
    Eigen::VectorXd f_r;

    // Coefficient rows that vanish identically are skipped.
    Eigen::MatrixXi live;  // (a, b): ghat row a*d+b nonzero; (a, d): beta row a nonzero

    void mark_live() {
        const int d = grid.dim();
        live = Eigen::MatrixXi::Zero(d, d + 1);
        for (int a = 0; a < d; ++a) {
            for (int b = 0; b < d; ++b) live(a, b) = ghat.row(a * d + b).cwiseAbs().maxCoeff() > 0.0;
            live(a, d) = beta.row(a).cwiseAbs().maxCoeff() > 0.0;
        }
    }

    Eigen::VectorXd apply(const Eigen::VectorXd& u) const {
        const int d = grid.dim();
        Eigen::VectorXd out = -f_r.cwiseProduct(u);
        for (int a = 0; a < d; ++a) {
            if (live(a, a)) out += ghat.row(a * d + a).transpose().cwiseProduct(diff2(grid, u, a));
        }
        for (int b = 0; b < d; ++b) {
            bool needed = live(b, d) != 0;
            for (int a = 0; a < b; ++a) needed = needed || live(a, b) != 0;
            if (!needed) continue;
            const Eigen::VectorXd grad_b = diff1(grid, u, b);
            if (live(b, d)) out += beta.row(b).transpose().cwiseProduct(grad_b);
            for (int a = 0; a < b; ++a) {
                if (live(a, b)) {
                    out += 2.0 * ghat.row(a * d + b).transpose().cwiseProduct(diff1(grid, grad_b, a));
                }
            }
        }
        return out;
    }

    Eigen::VectorXd diagonal() const {
        const int d = grid.dim();
        const double h = grid.spacing();
        Eigen::VectorXd diag = -f_r;
        for (int a = 0; a < d; ++a) diag += (-30.0 / (12.0 * h * h)) * ghat.row(a * d + a).transpose();
        return diag;
    }
};

LinearOperator linearize(const Metric& m, const RhsJet& jet) {
    const TorusGrid& g = m.gt.grid;
    const int n = g.n();
    const int d = g.dim();
    const Eigen::MatrixXcd c = FrameField::standard(g).at(0);
    LinearOperator op{g, Eigen::MatrixXd(d * d, g.size()), Eigen::MatrixXd(d, g.size()), jet.F_r, {}};
    parallel_for(static_cast<std::size_t>(g.size()), [&](std::size_t b, std::size_t e) {
        for (auto p = static_cast<Eigen::Index>(b); p < static_cast<Eigen::Index>(e); ++p) {
            const auto a = m.gt.at(p);
            // d log σ₂[U] = Σ_ij K_ij U_ji with K = (σ₁I − A)/σ₂.
            const Eigen::MatrixXcd k =
                (m.cone.sigma1[p] * Eigen::MatrixXcd::Identity(n, n) - a) / m.cone.sigma2[p];
            const Eigen::MatrixXcd x = c.transpose() * k.transpose() * c.conjugate();
            const Eigen::MatrixXd gh = 0.5 * (x + x.transpose()).real();
            op.ghat.col(p) = Eigen::Map<const Eigen::VectorXd>(gh.data(), d * d);
            op.beta.col(p) = -2.0 * (c.transpose() * jet.F_p.col(p)).real();
        }
    });
    op.mark_live();
    return op;
}

void apply_gauge(Eigen::VectorXd& phi, Gauge gauge) {
    if (gauge == Gauge::sup_zero) {
        phi.array() -= phi.maxCoeff();
    } else {
        phi.array() -= phi.sum() / static_cast<double>(phi.size());
    }
}

} // namespace

ConeFields cone_fields(const ScalarField& phi, const SolverConfig& cfg) {
    return metric(phi, cfg).cone;
}

ScalarField residual(const ScalarField& phi, const SolverConfig& cfg) {
    const Metric m = metric(phi, cfg);
    const Eigen::Index worst = worst_cone_point(m.cone, 0.0);
    if (worst >= 0) throw_cone(m.cone, worst, phi.grid, "residual");
    const RhsJet jet = evaluate(cfg.rhs, phi, FrameField::standard(phi.grid));
    return ScalarField(phi.grid, residual_of(m, jet, cfg.n));
}

ScalarField linearized_apply(const ScalarField& phi, const ScalarField& u, const SolverConfig& cfg) {
    require_same_grid(phi.grid, u.grid, "linearized_apply");
    const Metric m = metric(phi, cfg);
    const Eigen::Index worst = worst_cone_point(m.cone, 0.0);
    if (worst >= 0) throw_cone(m.cone, worst, phi.grid, "linearized_apply");
    const RhsJet jet = evaluate(cfg.rhs, phi, FrameField::standard(phi.grid));
    return ScalarField(phi.grid, linearize(m, jet).apply(u.samples));
}

BiCgStabResult bicgstab(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& apply,
                        const Eigen::VectorXd& inv_diag, const Eigen::VectorXd& b, double tol,
                        int max_iters) {
    const Eigen::Index N = b.size();
    BiCgStabResult out{Eigen::VectorXd::Zero(N), 0, 0.0, false};
    const double bnorm = b.norm();
    if (bnorm == 0.0) {
        out.converged = true;
        return out;
    }
    Eigen::VectorXd r = b;
    const Eigen::VectorXd r0 = b;
    Eigen::VectorXd p = Eigen::VectorXd::Zero(N);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(N);
    double rho = 1.0, alpha = 1.0, omega = 1.0;
    for (int it = 1; it <= max_iters; ++it) {
        out.iters = it;
        const double rho_new = r0.dot(r);
        if (rho_new == 0.0 || omega == 0.0) break;
        const double beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        p = r + beta * (p - omega * v);
        const Eigen::VectorXd y = inv_diag.cwiseProduct(p);
        v = apply(y);
        const double denom = r0.dot(v);
        if (denom == 0.0) break;
        alpha = rho / denom;
        out.x += alpha * y;
        const Eigen::VectorXd s = r - alpha * v;
        out.relative_residual = s.norm() / bnorm;
        if (out.relative_residual <= tol) {
            out.converged = true;
            return out;
        }
        const Eigen::VectorXd z = inv_diag.cwiseProduct(s);
        const Eigen::VectorXd t = apply(z);
        const double tt = t.squaredNorm();
        if (tt == 0.0) break;
        omega = t.dot(s) / tt;
        out.x += omega * z;
        r = s - omega * t;
        out.relative_residual = r.norm() / bnorm;
        if (out.relative_residual <= tol) {
            out.converged = true;
            return out;
        }
    }
    return out;
}

double c2_sup(const ScalarField& phi) {
    const SymmetricField h = real_hessian(phi);
    return h.data.colwise().norm().maxCoeff();
}

SolverReport newton_solve(const SolverConfig& cfg, const ScalarField& phi0) {
    require_same_grid(phi0.grid, cfg.grid(), "newton_solve");
    cfg.eps0();
    const TorusGrid g = cfg.grid();
    const Eigen::Index N = g.size();
    const FrameField frame = FrameField::standard(g);
    // With F independent of φ, constants lie in the kernel: solve for (δ, c) with
    // Lδ + c = −R and mean(δ) = 0, and fix the gauge after every step.
    const bool augmented = !cfg.rhs.depends_on_phi();

    Eigen::VectorXd phi = phi0.samples;
    if (augmented) apply_gauge(phi, cfg.gauge);

    Metric m = metric(ScalarField(g, phi), cfg);
    {
        const Eigen::Index worst = worst_cone_point(m.cone, cfg.cone_margin);
        if (worst >= 0) throw_cone(m.cone, worst, g, "newton_solve: initial iterate");
    }
    RhsJet jet = evaluate(cfg.rhs, ScalarField(g, phi), frame);
    Eigen::VectorXd R = residual_of(m, jet, cfg.n);

    SolverReport rep(ScalarField(g, phi));
    rep.status = "max_iters";
    for (int it = 1; it <= cfg.max_iters; ++it) {
        rep.iters = it;
        const double rnorm = R.lpNorm<Eigen::Infinity>();
        const double min_s2 = m.cone.sigma2.minCoeff();
        if (rnorm <= cfg.newton_tol) {
            rep.history.push_back({it, rnorm, 0.0, min_s2});
            rep.converged = true;
            rep.status = "converged";
            break;
        }

        const LinearOperator op = linearize(m, jet);
        Eigen::VectorXd delta;
        BiCgStabResult lin;
        if (augmented) {
            const Eigen::VectorXd inv_diag =
                (Eigen::VectorXd(N + 1) << op.diagonal().cwiseInverse(), 1.0).finished();
            auto apply = [&](const Eigen::VectorXd& x) {
                Eigen::VectorXd y(N + 1);
                y.head(N) = op.apply(x.head(N)).array() + x[N];
                y[N] = x.head(N).mean();
                return y;
            };
            const Eigen::VectorXd rhs = (Eigen::VectorXd(N + 1) << -R, 0.0).finished();
            lin = bicgstab(apply, inv_diag, rhs, cfg.krylov_tol, cfg.krylov_max_iters);
            delta = lin.x.head(N);
        } else {
            auto apply = [&](const Eigen::VectorXd& x) { return op.apply(x); };
            lin = bicgstab(apply, op.diagonal().cwiseInverse(), -R, cfg.krylov_tol,
                           cfg.krylov_max_iters);
            delta = lin.x;
        }
        rep.krylov_iters.push_back(lin.iters);

        double step = 1.0;
        bool accepted = false;
        while (step >= cfg.damping.min_step) {
            Eigen::VectorXd trial = phi + step * delta;
            if (augmented) apply_gauge(trial, cfg.gauge);
            const ScalarField trial_field(g, trial);
            Metric tm = metric(trial_field, cfg);
            if (worst_cone_point(tm.cone, cfg.cone_margin) < 0) {
                RhsJet tj;
                bool admissible = true;
                try {
                    tj = evaluate(cfg.rhs, trial_field, frame);
                } catch (const AdmissibilityError&) {
                    admissible = false;
                }
                if (admissible) {
                    Eigen::VectorXd tR = residual_of(tm, tj, cfg.n);
                    if (tR.lpNorm<Eigen::Infinity>() <= (1.0 - cfg.damping.armijo * step) * rnorm) {
                        phi = std::move(trial);
                        m = std::move(tm);
                        jet = std::move(tj);
                        R = std::move(tR);
                        accepted = true;
                        break;
                    }
                }
            }
            step *= cfg.damping.factor;
        }
        rep.history.push_back({it, rnorm, accepted ? step : 0.0, min_s2});
        if (!accepted) {
            rep.status = lin.converged ? "line_search_failed"
                                       : "line_search_failed_after_krylov_stagnation (relres " +
                                             std::to_string(lin.relative_residual) + ")";
            break;
        }
    }

    rep.phi = ScalarField(g, phi);
    rep.residual_linf = R.lpNorm<Eigen::Infinity>();
    rep.min_sigma1 = m.cone.sigma1.minCoeff();
    rep.min_sigma2 = m.cone.sigma2.minCoeff();
    rep.c2_sup = c2_sup(rep.phi);
    if (rep.status == "max_iters" && rep.residual_linf <= cfg.newton_tol) {
        rep.converged = true;
        rep.status = "converged";
    }
    return rep;
}

double manufactured_F(int n, double delta, double x1) {
    const double a = 1.0 - 0.5 * delta * std::cos(x1);
    const double rest = 0.5 * (n - 1) * (n - 2);
    return std::log((a * (n - 1) + rest) / (0.5 * n * (n - 1)));
}

ManufacturedCase manufactured_case(int n, int res, double delta) {
    if (!(delta > 0.0 && delta < 2.0)) {
        throw DomainError("manufactured_case: delta must lie in (0, 2), got " +
                          std::to_string(delta));
    }
    const TorusGrid g(n, res);
    ScalarField phi_star =
        ScalarField::from_function(g, [&](const Eigen::VectorXd& x) { return delta * std::cos(x[0]); });
    ScalarField F = ScalarField::from_function(
        g, [&](const Eigen::VectorXd& x) { return manufactured_F(n, delta, x[0]); });
    return {std::move(phi_star), default_config(n, res, RhsModel::manufactured(std::move(F)))};
}

} // namespace sigma2
