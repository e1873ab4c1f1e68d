#pragma once

// Flat tori T^{2n} = (ℝ/2πℤ)^{2n} sampled on uniform grids, with 4th-order
// periodic finite differences, complex frames and the complex Hessian.

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sigma2/errors.hpp"

namespace sigma2 {

/// Grid with `res` points on each of the 2n real axes. Points are indexed
/// row-major with x₁ varying slowest.
class TorusGrid {
public:
    /// Sample storage for res^{2n}·(n²+1) complex entries must stay below this.
    static constexpr std::uint64_t kMemoryBudget = std::uint64_t(8) << 30;

    TorusGrid(int n, int res);

    int n() const noexcept { return n_; }
    int res() const noexcept { return res_; }
    int dim() const noexcept { return 2 * n_; }
    double spacing() const noexcept { return spacing_; }
    Eigen::Index size() const noexcept { return size_; }

    Eigen::Index stride(int axis) const { return strides_[static_cast<std::size_t>(axis)]; }
    int coord(Eigen::Index p, int axis) const {
        return static_cast<int>((p / stride(axis)) % res_);
    }
    /// Index of the point `steps` grid steps from p along `axis`, wrapping.
    Eigen::Index shift(Eigen::Index p, int axis, int steps) const;
    Eigen::VectorXd position(Eigen::Index p) const;
    std::vector<int> coords(Eigen::Index p) const;

    bool operator==(const TorusGrid& o) const { return n_ == o.n_ && res_ == o.res_; }
    bool operator!=(const TorusGrid& o) const { return !(*this == o); }

private:
    int n_;
    int res_;
    double spacing_;
    Eigen::Index size_;
    std::vector<Eigen::Index> strides_;
};

void require_same_grid(const TorusGrid& a, const TorusGrid& b, const char* where);

struct ScalarField {
    TorusGrid grid;
    Eigen::VectorXd samples;

    ScalarField(TorusGrid g, Eigen::VectorXd values);
    explicit ScalarField(TorusGrid g);  // zero field

    static ScalarField from_function(const TorusGrid& g,
                                     const std::function<double(const Eigen::VectorXd&)>& f);
};

/// Complex vector fields Σ_a W^a ∂_a: column p holds the 2n coefficients at point p.
using VectorFieldC = Eigen::MatrixXcd;

/// Frame e_i = Σ_a c_{i,a} ∂_a. A constant frame stores one coefficient matrix (n × 2n);
/// a varying frame stores one per grid point.
class FrameField {
public:
    static FrameField standard(const TorusGrid& g);
    static FrameField constant(const TorusGrid& g, const Eigen::MatrixXcd& coeffs);
    static FrameField varying(const TorusGrid& g,
                              const std::function<Eigen::MatrixXcd(const Eigen::VectorXd&)>& f);

    const TorusGrid& grid() const noexcept { return grid_; }
    bool is_constant() const noexcept { return coeffs_.size() == 1; }
    const Eigen::MatrixXcd& at(Eigen::Index p) const {
        return coeffs_[is_constant() ? 0 : static_cast<std::size_t>(p)];
    }
    /// max_p ‖C Cᴴ − I‖_F: distance from g-unitarity.
    double unitarity_defect() const;

    /// e_i and ē_i as vector fields.
    VectorFieldC holomorphic(int i) const;
    VectorFieldC antiholomorphic(int i) const;

private:
    FrameField(TorusGrid g, std::vector<Eigen::MatrixXcd> c) : grid_(g), coeffs_(std::move(c)) {}
    TorusGrid grid_;
    std::vector<Eigen::MatrixXcd> coeffs_;
};

/// Symmetric real d×d matrix per point: column p stores the d² entries column-major.
struct SymmetricField {
    TorusGrid grid;
    int d;
    Eigen::MatrixXd data;
    Eigen::Map<const Eigen::MatrixXd> at(Eigen::Index p) const {
        return Eigen::Map<const Eigen::MatrixXd>(data.col(p).data(), d, d);
    }
};

/// Hermitian n×n matrix per point, stored like SymmetricField.
struct HermitianField {
    TorusGrid grid;
    int n;
    Eigen::MatrixXcd data;
    Eigen::Map<const Eigen::MatrixXcd> at(Eigen::Index p) const {
        return Eigen::Map<const Eigen::MatrixXcd>(data.col(p).data(), n, n);
    }
    static HermitianField constant(const TorusGrid& g, const Eigen::MatrixXcd& m);
};

// Periodic 4th-order stencils on sampled data.
Eigen::VectorXd diff1(const TorusGrid& g, const Eigen::VectorXd& f, int axis);
Eigen::VectorXd diff2(const TorusGrid& g, const Eigen::VectorXd& f, int axis);
Eigen::VectorXcd diff1(const TorusGrid& g, const Eigen::VectorXcd& f, int axis);

/// ∂_a φ for every axis, one row per axis.
Eigen::MatrixXd gradient(const ScalarField& phi);

/// Second partials; mixed ones are ½(∂_a∂_b + ∂_b∂_a) of composed first differences.
SymmetricField real_hessian(const ScalarField& phi);

/// [X, Y] = Σ_b (X(Y^b) − Y(X^b)) ∂_b.
VectorFieldC lie_bracket(const TorusGrid& g, const VectorFieldC& X, const VectorFieldC& Y);

/// W^{(0,1)} = ½(W + iJW) with J∂_{2k−1} = ∂_{2k}, J∂_{2k} = −∂_{2k−1}.
VectorFieldC project01(const VectorFieldC& W);

/// [e_i, ē_j]^{(0,1)}, 0-based i, j.
VectorFieldC frame_bracket(const FrameField& frame, int i, int j);

/// φ_{ij̄} = e_iē_j(φ) − [e_i, ē_j]^{(0,1)}(φ).
HermitianField complex_hessian(const ScalarField& phi, const FrameField& frame);

/// Σ_k |e_k(φ)|².
ScalarField grad_norm_sq(const ScalarField& phi, const FrameField& frame);

/// e_k(φ) for each k, one row per k.
Eigen::MatrixXcd frame_derivatives(const ScalarField& phi, const FrameField& frame);

// Binary "S2F1" (uint32 n, uint32 res, then res^{2n} little-endian doubles) and CSV.
void write_field_binary(const ScalarField& f, const std::string& path);
ScalarField read_field_binary(const std::string& path);
void write_field_csv(const ScalarField& f, const std::string& path);

} // namespace sigma2
