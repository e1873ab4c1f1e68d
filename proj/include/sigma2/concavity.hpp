#pragma once

// The matrix M = (−G^{iī,jj̄}) of log σ₂ in the eigenvalue variables, its
// determinant, spectrum, Weyl envelope and smallest eigenvector.

#include <Eigen/Dense>

#include <complex>
#include <string>
#include <vector>

#include "sigma2/jacobi.hpp"
#include "sigma2/symfun.hpp"

namespace sigma2 {

template <typename Scalar>
struct BasicConcavityMatrix {
    Mat<Scalar> entries;
    Scalar sigma2;
};
using ConcavityMatrix = BasicConcavityMatrix<double>;

/// M_ik = g_i g_k − (1−δ_ik)/σ₂ with g_i = σ₁(η|i)/σ₂. Symmetric by construction.
template <typename Derived>
BasicConcavityMatrix<typename Derived::Scalar> assemble(const Eigen::MatrixBase<Derived>& eta) {
    using Scalar = typename Derived::Scalar;
    const auto jet = log_sigma2_jet(eta);
    return {Mat<Scalar>(-jet.hess_diag), jet.sigma2};
}

inline ConcavityMatrix assemble(const Spectrum& eta) { return assemble(eta.values()); }

/// Negated second variation of log σ₂ at diag(η) in the Hermitian direction P.
double quad_form(const Spectrum& eta, const Eigen::MatrixXcd& P);

/// Determinant by elimination with partial pivoting.
template <typename Scalar>
Scalar determinant(const Mat<Scalar>& a) {
    return a.partialPivLu().determinant();
}

struct DetIdentity {
    double det;
    double predicted;  // (n−1)σ₂^{−n}
};

/// Evaluated in 113-bit precision and rounded; see `extended` below.
DetIdentity det_identity(const Spectrum& eta);

/// The pieces of −σ₂²G = M₁ − M₂ with M₁ = σ⃗σ⃗ᵀ, M₂ = σ₂(J − I).
struct Decomposition {
    double sum_det_a;            // Σ_i det A_i, A_i = −M₂ with column i taken from M₁
    double predicted_sum_det_a;  // 2(n−1)σ₂ⁿ
    double det_m2;
    double predicted_det_m2;     // (−1)^{n−1}(n−1)σ₂ⁿ
    double det_full;             // det(M₁ − M₂)
};

Decomposition decomposition(const Spectrum& eta);

struct ConcavitySpectrum {
    Eigen::VectorXd kappas;  // descending
    Eigen::MatrixXd xis;     // column i is ξ_i
    std::vector<int> cluster;  // equal labels: eigenvalues within 1e−9‖M‖

    bool simple(Eigen::Index i) const;
};

ConcavitySpectrum spectral(const ConcavityMatrix& m);

struct WeylEnvelope {
    double a1;
    double b1;
    double bn;
    double kappa1_lo;
    double kappa1_hi;
    double kappa_tail_hi;
};

WeylEnvelope weyl_envelope(const Spectrum& eta);

/// Pivot tolerance of the structured elimination, relative to the row scale.
inline constexpr double kPivotTolerance = 1e-9;

/// Kernel vector of (M − κI) by the four-step structured elimination, with d₁ = 1.
/// Throws EliminationDegenerate on a vanishing pivot.
template <typename Scalar>
Vec<Scalar> min_eigvec_elimination(const BasicSpectrum<Scalar>& eta, Scalar kappa_n);

Eigen::VectorXd min_eigvec_elimination(const Spectrum& eta, double kappa_n);

/// Generic kernel extraction of (a − κI) with partial pivoting; unit norm.
Eigen::VectorXd kernel_vector(const Eigen::MatrixXd& a, double kappa);

struct TailDecayRow {
    double t;
    double t2_kappa_n;
    double t2_xi_tail;  // t²Σ_{i≥2}|ξ_n^i|²
    double kappa_n_minus_1;
};

/// fixed_tail: η(t) = (t, tail). bounded_sigma2: η(t) = (t, tail/t), so σ₂(η(t))
/// stays bounded as t grows, as it does for solutions of the equation.
enum class TailFamily { fixed_tail, bounded_sigma2 };

std::string to_string(TailFamily family);
TailFamily tail_family_from_string(const std::string& name);

/// Computed in 113-bit precision: κ₁/κ_n grows like t⁴ in the bounded family.
std::vector<TailDecayRow> tail_decay_profile(const Spectrum& tail, const std::vector<double>& t_grid,
                                             TailFamily family = TailFamily::fixed_tail);

/// One CSV row "n,eta...,kappa...,det,predicted_det".
std::string concavity_csv_header(int n);
std::string concavity_csv_row(const Spectrum& eta);

} // namespace sigma2
