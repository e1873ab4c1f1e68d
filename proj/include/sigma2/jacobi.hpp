#pragma once

// Cyclic Jacobi eigensolver for small dense self-adjoint matrices (real symmetric
// or complex Hermitian). Fixed sweep order (p < q, row-major), descending output,
// phase convention: the first non-negligible component of every eigenvector is
// real and positive. Works for any scalar with Eigen NumTraits (double, float128,
// std::complex<double>).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <string>
#include <type_traits>
#include <vector>

#include "sigma2/errors.hpp"

namespace sigma2 {

template <typename Scalar>
struct SelfAdjointEigen {
    using Real = typename Eigen::NumTraits<Scalar>::Real;
    Eigen::Matrix<Real, Eigen::Dynamic, 1> values;           // descending
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> vectors;  // column j ↔ values[j]
    int sweeps = 0;
};

namespace detail {

template <typename T>
struct is_complex : std::false_type {};
template <typename T>
struct is_complex<std::complex<T>> : std::true_type {};

template <typename Real>
Real default_jacobi_tol() {
    if constexpr (std::is_same_v<Real, double>) {
        return 1e-14;
    } else {
        return Real(64) * Eigen::NumTraits<Real>::epsilon();
    }
}

} // namespace detail

/// Off-diagonal Frobenius mass below `tol`·‖M‖_F ends the iteration. Throws
/// NumericFailure when `max_sweeps` is exhausted.
template <typename Derived>
SelfAdjointEigen<typename Derived::Scalar> jacobi_eigen(
    const Eigen::MatrixBase<Derived>& input,
    typename Eigen::NumTraits<typename Derived::Scalar>::Real tol =
        detail::default_jacobi_tol<typename Eigen::NumTraits<typename Derived::Scalar>::Real>(),
    int max_sweeps = 100) {
    using Scalar = typename Derived::Scalar;
    using Real = typename Eigen::NumTraits<Scalar>::Real;
    using std::abs;
    using std::sqrt;
    constexpr bool complex_scalar = detail::is_complex<Scalar>::value;

    const Eigen::Index n = input.rows();
    if (input.cols() != n) throw InvalidArgument("jacobi_eigen: matrix must be square");

    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> a = input;
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> v =
        Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Identity(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if constexpr (complex_scalar) a(i, i) = Scalar(a(i, i).real(), 0);
    }

    auto off_mass = [&] {
        Real s(0);
        for (Eigen::Index p = 0; p < n; ++p)
            for (Eigen::Index q = 0; q < n; ++q)
                if (p != q) s += Eigen::numext::abs2(a(p, q));
        return sqrt(s);
    };

    const Real scale = sqrt(a.squaredNorm());
    SelfAdjointEigen<Scalar> out;
    int sweep = 0;
    while (off_mass() > tol * scale) {
        if (sweep == max_sweeps) {
            throw NumericFailure("jacobi_eigen: no convergence after " +
                                 std::to_string(max_sweeps) + " sweeps");
        }
        ++sweep;
        for (Eigen::Index p = 0; p + 1 < n; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const Real r = abs(a(p, q));
                if (r == Real(0)) continue;
                if constexpr (complex_scalar) {
                    // Unitary phase on index q makes a(p, q) real and positive.
                    const Scalar phase = a(p, q) / r;  // e^{iφ}
                    a.col(q) *= phase;
                    a.row(q) *= Eigen::numext::conj(phase);
                    v.col(q) *= phase;
                    a(p, q) = Scalar(r);
                    a(q, p) = Scalar(r);
                }
                Real apq = r;
                if constexpr (!complex_scalar) apq = a(p, q);
                const Real app = Eigen::numext::real(a(p, p));
                const Real aqq = Eigen::numext::real(a(q, q));
                const Real theta = (aqq - app) / (Real(2) * apq);
                const Real t = (theta >= Real(0) ? Real(1) : Real(-1)) /
                               (abs(theta) + sqrt(theta * theta + Real(1)));
                const Real c = Real(1) / sqrt(t * t + Real(1));
                const Real s = t * c;
                for (Eigen::Index k = 0; k < n; ++k) {
                    const Scalar akp = a(k, p);
                    const Scalar akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const Scalar apk = a(p, k);
                    const Scalar aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                a(p, q) = Scalar(0);
                a(q, p) = Scalar(0);
                for (Eigen::Index k = 0; k < n; ++k) {
                    const Scalar vkp = v(k, p);
                    const Scalar vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index(0));
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
        return Eigen::numext::real(a(x, x)) > Eigen::numext::real(a(y, y));
    });

    out.values.resize(n);
    out.vectors.resize(n, n);
    const Real negligible = Real(64) * Eigen::NumTraits<Real>::epsilon();
    for (Eigen::Index j = 0; j < n; ++j) {
        const Eigen::Index src = order[static_cast<std::size_t>(j)];
        out.values[j] = Eigen::numext::real(a(src, src));
        auto col = v.col(src).eval();
        col /= Scalar(col.norm());
        for (Eigen::Index k = 0; k < n; ++k) {
            const Real mag = abs(col[k]);
            if (mag > negligible) {
                col *= Eigen::numext::conj(col[k]) / mag;
                if constexpr (complex_scalar) col[k] = Scalar(mag, 0);
                break;
            }
        }
        out.vectors.col(j) = col;
    }
    out.sweeps = sweep;
    return out;
}

} // namespace sigma2
