#pragma once

// Right-hand sides F(z, ∂φ, φ) of log σ₂(g̃) = log C(n,2) + F and their first derivatives.

#include <Eigen/Dense>

#include <optional>
#include <string>

#include "sigma2/geometry.hpp"

namespace sigma2 {

enum class RhsKind { constant, manufactured, fu_yau };

std::string to_string(RhsKind kind);
RhsKind rhs_kind_from_string(const std::string& name);

struct RhsModel {
    RhsKind kind = RhsKind::constant;
    double value = 0.0;                  // constant: F ≡ value
    std::optional<ScalarField> sampled;  // manufactured: F(z)
    double alpha = 0.0;                  // fu_yau slope
    std::optional<ScalarField> f;
    std::optional<ScalarField> mu;

    static RhsModel constant(double c);
    static RhsModel manufactured(ScalarField F);
    static RhsModel fu_yau(double alpha, ScalarField f, ScalarField mu);

    /// True when F depends on φ or ∂φ.
    bool depends_on_phi() const { return kind == RhsKind::fu_yau; }
};

/// F, ∂F/∂r and ∂F/∂p_i (p_i = e_i φ) at every grid point.
struct RhsJet {
    Eigen::VectorXd F;
    Eigen::VectorXd F_r;
    Eigen::MatrixXcd F_p;  // n × points
};

RhsJet evaluate(const RhsModel& rhs, const ScalarField& phi, const FrameField& frame);

/// The Fu–Yau right-hand side F = log E. Throws AdmissibilityError when E ≤ 0.
ScalarField fu_yau_rhs(double alpha, const ScalarField& f, const ScalarField& mu,
                       const ScalarField& phi, const FrameField& frame);

} // namespace sigma2
