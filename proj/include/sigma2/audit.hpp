#pragma once

// Numerical evaluation of the maximum-principle quantities at the grid maximum
// x₀ of Q̂ = log λ₁(Φ) + h(|∂φ|²) + e^{−Aφ}.

#include <Eigen/Dense>

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sigma2/geometry.hpp"
#include "sigma2/solver.hpp"
#include "sigma2/symfun.hpp"

namespace sigma2 {

/// h(s) = −½ log(1 + K − s) and its first two derivatives.
struct BarrierJet {
    double value;
    double d1;
    double d2;
    double sup_grad_sq;
};

BarrierJet barrier_jet(double s, double K);

struct QhatMax {
    bool found = false;  // false: λ₁(∇²φ) ≤ 0 everywhere, so λ₁ is bounded by 0 directly
    Eigen::Index x0 = -1;
    std::vector<int> coords;
    double qhat = 0.0;
    double lambda1 = 0.0;
    Eigen::VectorXd V1;
    double sup_grad_sq = 0.0;  // K
};

QhatMax qhat_max(const ScalarField& phi, double A, const FrameField& frame);

/// A slack value, or the reason it was not evaluated.
struct Slack {
    std::optional<double> value;
    std::string status = "ok";
};

struct AuditLedger {
    Eigen::Index x0 = -1;
    std::vector<int> coords;
    double A = 0.0;
    double eps = 0.0;
    double qhat = 0.0;
    BarrierJet barrier{};
    Eigen::VectorXd lambda;  // eigenvalues of Φ at x₀, descending
    Eigen::VectorXd eta;     // eigenvalues of g̃ at x₀, descending
    Eigen::VectorXcd nu;     // ẽ = Σ ν_q e_q
    Eigen::VectorXd mu;      // JV₁ = Σ_{α>1} μ_α V_α (entry α−2 holds μ_α)
    double gamma = 0.0;
    double term_I = 0.0;
    double term_II = 0.0;  // (1+ε)Σ_i G^{iī}|e_i(φ_{V₁V₁})|²/λ₁²
    double term_II1 = 0.0;
    double term_II2 = 0.0;
    double term_II3 = 0.0;
    double first_order_defect = 0.0;     // max_a |∂_a Q̂(x₀)|
    double first_order_tolerance = 0.0;  // matching stencil tolerance
    bool first_order_ok = false;
    int first_order_stencil = 4;  // accuracy order of the stencil actually used
    std::map<std::string, Slack> slacks;
};

/// Throws DomainError when ε ∉ (0, ½] or when Q̂ has no maximum on M₊.
AuditLedger ledger(const ScalarField& phi, double A, double eps, const SolverConfig& cfg);

} // namespace sigma2
