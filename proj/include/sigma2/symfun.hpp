#pragma once

// Elementary symmetric functions, Garding cone tests and the derivative jets
// of log σ₂ at a diagonal point.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <string>
#include <vector>

#include "sigma2/errors.hpp"

namespace sigma2 {

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Eigenvalues η₁ ≥ … ≥ ηₙ of g̃ at a point. Always stored in descending order.
template <typename Scalar>
class BasicSpectrum {
public:
    using Vector = Vec<Scalar>;

    explicit BasicSpectrum(Vector values) : values_(std::move(values)) {
        using std::isfinite;
        for (Eigen::Index i = 0; i < values_.size(); ++i) {
            if (!isfinite(values_[i])) {
                throw InvalidArgument("spectrum entries must be finite");
            }
        }
        std::sort(values_.data(), values_.data() + values_.size(), std::greater<Scalar>());
    }

    BasicSpectrum(std::initializer_list<Scalar> values)
        : BasicSpectrum(Vector::Map(values.begin(), static_cast<Eigen::Index>(values.size()))) {}

    Eigen::Index size() const noexcept { return values_.size(); }
    const Vector& values() const noexcept { return values_; }
    Scalar operator[](Eigen::Index i) const { return values_[i]; }

    template <typename Other>
    BasicSpectrum<Other> cast() const {
        return BasicSpectrum<Other>(values_.template cast<Other>());
    }

private:
    Vector values_;
};

using Spectrum = BasicSpectrum<double>;

namespace detail {

inline void check_order(Eigen::Index n, int k, int lo, Eigen::Index hi) {
    if (k < lo || k > hi) {
        throw InvalidArgument("order k=" + std::to_string(k) + " outside [" +
                              std::to_string(lo) + ", " + std::to_string(hi) +
                              "] for n=" + std::to_string(n));
    }
}

// Sum over k-subsets, visited in lexicographic order.
template <typename Derived>
typename Derived::Scalar sigma_k_enumerate(const Eigen::MatrixBase<Derived>& eta, int k) {
    using Scalar = typename Derived::Scalar;
    const int n = static_cast<int>(eta.size());
    std::vector<int> pick(k);
    for (int j = 0; j < k; ++j) pick[j] = j;
    Scalar total(0);
    while (true) {
        Scalar prod(1);
        for (int j : pick) prod *= eta[j];
        total += prod;
        int j = k - 1;
        while (j >= 0 && pick[j] == n - k + j) --j;
        if (j < 0) break;
        ++pick[j];
        for (int m = j + 1; m < k; ++m) pick[m] = pick[m - 1] + 1;
    }
    return total;
}

} // namespace detail

/// All of σ₀ = 1, σ₁, …, σₙ by the prefix-product recurrence
/// σ_k(η₁..η_j) = σ_k(η₁..η_{j−1}) + η_j σ_{k−1}(η₁..η_{j−1}).
template <typename Derived>
Vec<typename Derived::Scalar> elementary_symmetric(const Eigen::MatrixBase<Derived>& eta) {
    using Scalar = typename Derived::Scalar;
    const Eigen::Index n = eta.size();
    Vec<Scalar> e = Vec<Scalar>::Zero(n + 1);
    e[0] = Scalar(1);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index k = j + 1; k >= 1; --k) e[k] += eta[j] * e[k - 1];
    }
    return e;
}

/// Subset enumeration is used up to this length; the prefix recurrence beyond it.
inline constexpr Eigen::Index kEnumerationLimit = 12;

/// k-th elementary symmetric polynomial, 1 ≤ k ≤ n.
template <typename Derived>
typename Derived::Scalar sigma_k(const Eigen::MatrixBase<Derived>& eta, int k) {
    detail::check_order(eta.size(), k, 1, eta.size());
    if (eta.size() > kEnumerationLimit) return elementary_symmetric(eta)[k];
    return detail::sigma_k_enumerate(eta, k);
}

template <typename Scalar>
Scalar sigma_k(const BasicSpectrum<Scalar>& eta, int k) {
    return sigma_k(eta.values(), k);
}

/// σ_k(η|i): σ_k of η with entry i (0-based) removed, 1 ≤ k ≤ n−1.
template <typename Derived>
typename Derived::Scalar sigma_k_excluding(const Eigen::MatrixBase<Derived>& eta, int k,
                                           Eigen::Index i) {
    const Eigen::Index n = eta.size();
    detail::check_order(n, k, 1, n - 1);
    if (i < 0 || i >= n) {
        throw InvalidArgument("excluded index " + std::to_string(i) + " outside [0, " +
                              std::to_string(n) + ")");
    }
    Vec<typename Derived::Scalar> rest(n - 1);
    rest << eta.head(i), eta.tail(n - 1 - i);
    return sigma_k(rest, k);
}

template <typename Scalar>
Scalar sigma_k_excluding(const BasicSpectrum<Scalar>& eta, int k, Eigen::Index i) {
    return sigma_k_excluding(eta.values(), k, i);
}

/// σ_j(η) > margin for every j ≤ k. With margin = 0 this is strict membership in Γ_k.
template <typename Derived>
bool in_gamma_k(const Eigen::MatrixBase<Derived>& eta, int k,
                typename Derived::Scalar margin = typename Derived::Scalar(0)) {
    detail::check_order(eta.size(), k, 1, eta.size());
    for (int j = 1; j <= k; ++j) {
        if (!(sigma_k(eta, j) > margin)) return false;
    }
    return true;
}

template <typename Scalar>
bool in_gamma_k(const BasicSpectrum<Scalar>& eta, int k, Scalar margin = Scalar(0)) {
    return in_gamma_k(eta.values(), k, margin);
}

/// Seeded rejection sampler: uniform on the box [−1, n]ⁿ, kept when inside Γ_k.
/// Throws SamplingFailure after `budget` rejected-or-accepted trials.
std::vector<Spectrum> sample_gamma_k(int n, int k, int count, std::uint64_t seed,
                                     std::int64_t budget = 1'000'000);

/// σ₁, σ₂, σ₁(η|i) and the first/second derivatives of log σ₂ in the eigenvalue
/// variables, evaluated at a diagonal point η ∈ Γ₂.
template <typename Scalar>
struct Sigma2Jet {
    Scalar sigma1;
    Scalar sigma2;
    Vec<Scalar> sigma1_excl;   // σ₁(η|i)
    Vec<Scalar> grad;          // G^{iī} = σ₁(η|i)/σ₂
    Mat<Scalar> hess_diag;     // G^{iī,kk̄}
    Scalar offdiag_coeff;      // G^{ik̄,kī} = −1/σ₂
};

template <typename Scalar>
void require_gamma2(Scalar sigma1, Scalar sigma2, const char* where) {
    if (!(sigma1 > Scalar(0)) || !(sigma2 > Scalar(0))) {
        throw ConeViolation(std::string(where) + ": spectrum outside Gamma_2",
                            static_cast<double>(sigma1), static_cast<double>(sigma2));
    }
}

// σ₂ comes from the recurrence, not from ½(σ₁² − Σηᵢ²).
template <typename Derived>
Sigma2Jet<typename Derived::Scalar> log_sigma2_jet(const Eigen::MatrixBase<Derived>& eta) {
    using Scalar = typename Derived::Scalar;
    const Eigen::Index n = eta.size();
    if (n < 2) throw InvalidArgument("log_sigma2_jet needs n >= 2");
    Sigma2Jet<Scalar> jet;
    const auto e = elementary_symmetric(eta);
    jet.sigma1 = e[1];
    jet.sigma2 = e[2];
    require_gamma2(jet.sigma1, jet.sigma2, "log_sigma2_jet");

    jet.sigma1_excl = Vec<Scalar>::Constant(n, jet.sigma1) - eta;
    jet.grad = jet.sigma1_excl / jet.sigma2;
    const Scalar inv = Scalar(1) / jet.sigma2;
    jet.hess_diag = Mat<Scalar>(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index k = 0; k < n; ++k) {
            jet.hess_diag(i, k) = (i == k ? Scalar(0) : inv) - jet.grad[i] * jet.grad[k];
        }
    }
    jet.offdiag_coeff = -inv;
    return jet;
}

template <typename Scalar>
Sigma2Jet<Scalar> log_sigma2_jet(const BasicSpectrum<Scalar>& eta) {
    return log_sigma2_jet(eta.values());
}

/// Measured slack of the Maclaurin-type inequalities at η ∈ Γ₂.
struct SlackRecord {
    double maclaurin_sum_slack;   // Σ G^{iī} − (2(n−1)/n) σ₂^{−1/2}
    double eta1_sigma1_slack;     // η₁σ₁(η|1) − (2/n)σ₂
    double sigma1_product_slack;  // σ₁(η|1)σ₁ − σ₂
    double min_grad_ratio;        // min_{i≥2} G^{iī} / Σ_k G^{kk̄}
};

SlackRecord inequality_slacks(const Spectrum& eta);

} // namespace sigma2
