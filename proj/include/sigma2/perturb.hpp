#pragma once

// Top eigenvalue λ₁ of a real Hessian: eigensystem, the perturbed endomorphism
// Φ = H − (I − V₁V₁ᵀ), and the first and second derivatives of λ₁.

#include <Eigen/Dense>

namespace sigma2 {

struct RealHessianEig {
    Eigen::VectorXd lambdas;  // descending
    Eigen::MatrixXd vees;     // column α is V_α
    double scale = 0.0;       // ‖H‖_F
};

/// Only the identity metric is accepted (normal coordinates at the point).
RealHessianEig real_hessian_eig(const Eigen::MatrixXd& H, const Eigen::MatrixXd& g);
RealHessianEig real_hessian_eig(const Eigen::MatrixXd& H);

struct PerturbedEndo {
    Eigen::MatrixXd phi;
    Eigen::MatrixXd bee;  // B = I − V₁V₁ᵀ
};

PerturbedEndo build_phi(const RealHessianEig& eig, const Eigen::MatrixXd& H);

/// Relative gap below which λ₁ counts as multiple.
inline constexpr double kSimpleGap = 1e-9;

/// ∂λ₁/∂H = V₁V₁ᵀ. Throws MultiplicityError unless λ₁ is simple.
Eigen::MatrixXd d_lambda1(const RealHessianEig& eig);

/// d²/dt² λ₁(H + tE) at t = 0.
double d2_lambda1_form(const RealHessianEig& eig, const Eigen::MatrixXd& E);

} // namespace sigma2
