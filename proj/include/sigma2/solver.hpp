#pragma once

// Damped Newton solver for log σ₂(χ + ∂∂̄φ) = log C(n,2) + F(z, ∂φ, φ) on the flat torus.

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

#include "sigma2/geometry.hpp"
#include "sigma2/rhs.hpp"

namespace sigma2 {

enum class Gauge { sup_zero, mean_zero };

std::string to_string(Gauge g);
Gauge gauge_from_string(const std::string& name);

struct LineSearch {
    double factor = 0.5;
    double armijo = 1e-4;
    double min_step = 1e-8;
};

struct SolverConfig {
    int n = 2;
    int res = 16;
    RhsModel rhs;
    HermitianField chi;
    double newton_tol = 1e-10;
    int max_iters = 50;
    LineSearch damping;
    double cone_margin = 1e-8;
    Gauge gauge = Gauge::mean_zero;
    int krylov_max_iters = 2000;
    double krylov_tol = 1e-10;

    SolverConfig(int n, int res, RhsModel rhs, HermitianField chi);

    TorusGrid grid() const { return TorusGrid(n, res); }
    /// Smallest eigenvalue of χ over the grid (the recorded ε₀); throws unless positive.
    double eps0() const;
};

/// Identity χ and the given right-hand side.
SolverConfig default_config(int n, int res, RhsModel rhs);

struct HistoryRow {
    int iter;
    double residual_linf;
    double step;
    double min_sigma2;
};

struct SolverReport {
    explicit SolverReport(ScalarField start) : phi(std::move(start)) {}

    bool converged = false;
    int iters = 0;
    double residual_linf = 0.0;
    ScalarField phi;
    double min_sigma1 = 0.0;
    double min_sigma2 = 0.0;
    double c2_sup = 0.0;
    std::string status;
    std::vector<HistoryRow> history;
    std::vector<int> krylov_iters;
};

/// σ₁ and σ₂ of g̃ = χ + φ_{ij̄} at every point (no cone check).
struct ConeFields {
    Eigen::VectorXd sigma1;
    Eigen::VectorXd sigma2;
};
ConeFields cone_fields(const ScalarField& phi, const SolverConfig& cfg);

/// log σ₂(g̃) − log C(n,2) − F. Throws ConeViolation (worst point) outside Γ₂.
ScalarField residual(const ScalarField& phi, const SolverConfig& cfg);

/// Fréchet derivative of `residual` at φ applied to u.
ScalarField linearized_apply(const ScalarField& phi, const ScalarField& u, const SolverConfig& cfg);

SolverReport newton_solve(const SolverConfig& cfg, const ScalarField& phi0);

struct BiCgStabResult {
    Eigen::VectorXd x;
    int iters;
    double relative_residual;
    bool converged;
};

/// Right-preconditioned BiCGSTAB from a zero initial guess.
BiCgStabResult bicgstab(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& apply,
                        const Eigen::VectorXd& inv_diag, const Eigen::VectorXd& b, double tol,
                        int max_iters);

struct ManufacturedCase {
    ScalarField phi_star;
    SolverConfig cfg;
};

/// φ* = δ cos x₁ with χ = identity: g̃ = diag(1 − (δ/2)cos x₁, 1, …, 1).
double manufactured_F(int n, double delta, double x1);
ManufacturedCase manufactured_case(int n, int res, double delta);

/// Sup over the grid of |∇²φ| (Frobenius norm of the real Hessian).
double c2_sup(const ScalarField& phi);

} // namespace sigma2
