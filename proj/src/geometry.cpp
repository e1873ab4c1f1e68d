#include "sigma2/geometry.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "sigma2/parallel.hpp"

namespace sigma2 {

TorusGrid::TorusGrid(int n, int res) : n_(n), res_(res) {
    if (n < 2) throw InvalidArgument("TorusGrid: complex dimension n must be >= 2");
    if (res < 4 || res % 2 != 0) throw InvalidArgument("TorusGrid: res must be even and >= 4");
    std::uint64_t points = 1;
    for (int a = 0; a < 2 * n; ++a) {
        points *= static_cast<std::uint64_t>(res);
        if (points > kMemoryBudget) break;
    }
    const std::uint64_t entries = static_cast<std::uint64_t>(n) * n + 1;
    if (points > kMemoryBudget || points * entries * 16 > kMemoryBudget) {
        throw InvalidArgument("TorusGrid: n=" + std::to_string(n) + ", res=" +
                              std::to_string(res) + " exceeds the 8 GiB sample budget");
    }
    size_ = static_cast<Eigen::Index>(points);
    spacing_ = 2.0 * std::numbers::pi / res;
    strides_.assign(static_cast<std::size_t>(2 * n), 1);
    for (int a = 2 * n - 2; a >= 0; --a) {
        strides_[static_cast<std::size_t>(a)] = strides_[static_cast<std::size_t>(a) + 1] * res;
    }
}

Eigen::Index TorusGrid::shift(Eigen::Index p, int axis, int steps) const {
    const int c = coord(p, axis);
    const int moved = ((c + steps) % res_ + res_) % res_;
    return p + static_cast<Eigen::Index>(moved - c) * stride(axis);
}

Eigen::VectorXd TorusGrid::position(Eigen::Index p) const {
    Eigen::VectorXd x(dim());
    for (int a = 0; a < dim(); ++a) x[a] = coord(p, a) * spacing_;
    return x;
}

std::vector<int> TorusGrid::coords(Eigen::Index p) const {
    std::vector<int> c(static_cast<std::size_t>(dim()));
    for (int a = 0; a < dim(); ++a) c[static_cast<std::size_t>(a)] = coord(p, a);
    return c;
}

void require_same_grid(const TorusGrid& a, const TorusGrid& b, const char* where) {
    if (a != b) {
        throw GridMismatch(std::string(where) + ": grids differ (n=" + std::to_string(a.n()) +
                           ", res=" + std::to_string(a.res()) + " vs n=" + std::to_string(b.n()) +
                           ", res=" + std::to_string(b.res()) + ")");
    }
}

ScalarField::ScalarField(TorusGrid g, Eigen::VectorXd values)
    : grid(g), samples(std::move(values)) {
    if (samples.size() != grid.size()) {
        throw GridMismatch("ScalarField: " + std::to_string(samples.size()) +
                           " samples for a grid of " + std::to_string(grid.size()));
    }
    if (!samples.allFinite()) throw InvalidArgument("ScalarField: non-finite samples");
}

ScalarField::ScalarField(TorusGrid g) : grid(g), samples(Eigen::VectorXd::Zero(g.size())) {}

ScalarField ScalarField::from_function(const TorusGrid& g,
                                       const std::function<double(const Eigen::VectorXd&)>& f) {
    Eigen::VectorXd v(g.size());
    parallel_for(static_cast<std::size_t>(g.size()), [&](std::size_t b, std::size_t e) {
        for (auto p = static_cast<Eigen::Index>(b); p < static_cast<Eigen::Index>(e); ++p) {
            v[p] = f(g.position(p));
        }
    });
    return ScalarField(g, std::move(v));
}

FrameField FrameField::standard(const TorusGrid& g) {
    const int n = g.n();
    const double r = 1.0 / std::sqrt(2.0);
    Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(n, 2 * n);
    for (int i = 0; i < n; ++i) {
        c(i, 2 * i) = {r, 0.0};
        c(i, 2 * i + 1) = {0.0, -r};
    }
    return constant(g, c);
}

FrameField FrameField::constant(const TorusGrid& g, const Eigen::MatrixXcd& coeffs) {
    if (coeffs.rows() != g.n() || coeffs.cols() != g.dim()) {
        throw InvalidArgument("FrameField: coefficient matrix must be n x 2n");
    }
    FrameField f(g, {coeffs});
    if (f.unitarity_defect() > 1e-10) throw InvalidArgument("FrameField: frame is not unitary");
    return f;
}

FrameField FrameField::varying(const TorusGrid& g,
                               const std::function<Eigen::MatrixXcd(const Eigen::VectorXd&)>& f) {
    std::vector<Eigen::MatrixXcd> c(static_cast<std::size_t>(g.size()));
    for (Eigen::Index p = 0; p < g.size(); ++p) {
        c[static_cast<std::size_t>(p)] = f(g.position(p));
        if (c[static_cast<std::size_t>(p)].rows() != g.n() ||
            c[static_cast<std::size_t>(p)].cols() != g.dim()) {
            throw InvalidArgument("FrameField: coefficient matrix must be n x 2n");
        }
    }
    return FrameField(g, std::move(c));
}

double FrameField::unitarity_defect() const {
    const int n = grid_.n();
    double worst = 0.0;
    for (const auto& c : coeffs_) {
        worst = std::max(worst, (c * c.adjoint() - Eigen::MatrixXcd::Identity(n, n)).norm());
    }
    return worst;
}

VectorFieldC FrameField::holomorphic(int i) const {
    VectorFieldC w(grid_.dim(), grid_.size());
    for (Eigen::Index p = 0; p < grid_.size(); ++p) w.col(p) = at(p).row(i).transpose();
    return w;
}

VectorFieldC FrameField::antiholomorphic(int i) const { return holomorphic(i).conjugate(); }

HermitianField HermitianField::constant(const TorusGrid& g, const Eigen::MatrixXcd& m) {
    if (m.rows() != g.n() || m.cols() != g.n()) {
        throw InvalidArgument("HermitianField: matrix must be n x n");
    }
    if ((m - m.adjoint()).norm() > 1e-12 * std::max(1.0, m.norm())) {
        throw InvalidArgument("HermitianField: matrix is not Hermitian");
    }
    Eigen::MatrixXcd data(g.n() * g.n(), g.size());
    const Eigen::Map<const Eigen::VectorXcd> flat(m.data(), m.size());
    for (Eigen::Index p = 0; p < g.size(); ++p) data.col(p) = flat;
    return {g, g.n(), std::move(data)};
}

namespace {

// Five-point periodic stencil along one axis: out = scale·Σ_k w_k f(p + k e_axis).
template <typename Vector>
Vector stencil5(const TorusGrid& g, const Vector& f, int axis, const double (&w)[5], double scale,
                const char* where) {
    if (f.size() != g.size()) throw GridMismatch(std::string(where) + ": sample count does not match grid");
    const int res = g.res();
    const Eigen::Index s = g.stride(axis);
    std::vector<std::array<Eigen::Index, 5>> offset(static_cast<std::size_t>(res));
    for (int c = 0; c < res; ++c) {
        for (int k = -2; k <= 2; ++k) {
            const int moved = ((c + k) % res + res) % res;
            offset[static_cast<std::size_t>(c)][static_cast<std::size_t>(k + 2)] = (moved - c) * s;
        }
    }
    Vector out(f.size());
    parallel_for(static_cast<std::size_t>(g.size()), [&](std::size_t b, std::size_t e) {
        for (auto p = static_cast<Eigen::Index>(b); p < static_cast<Eigen::Index>(e); ++p) {
            const auto& o = offset[static_cast<std::size_t>((p / s) % res)];
            out[p] = (w[0] * f[p + o[0]] + w[1] * f[p + o[1]] + w[2] * f[p] + w[3] * f[p + o[3]] +
                      w[4] * f[p + o[4]]) *
                     scale;
        }
    });
    return out;
}

constexpr double kFirst[5] = {1.0, -8.0, 0.0, 8.0, -1.0};
constexpr double kSecond[5] = {-1.0, 16.0, -30.0, 16.0, -1.0};

} // namespace

Eigen::VectorXd diff1(const TorusGrid& g, const Eigen::VectorXd& f, int axis) {
    return stencil5(g, f, axis, kFirst, 1.0 / (12.0 * g.spacing()), "diff1");
}

Eigen::VectorXcd diff1(const TorusGrid& g, const Eigen::VectorXcd& f, int axis) {
    return stencil5(g, f, axis, kFirst, 1.0 / (12.0 * g.spacing()), "diff1");
}

Eigen::VectorXd diff2(const TorusGrid& g, const Eigen::VectorXd& f, int axis) {
    return stencil5(g, f, axis, kSecond, 1.0 / (12.0 * g.spacing() * g.spacing()), "diff2");
}

Eigen::MatrixXd gradient(const ScalarField& phi) {
    const auto& g = phi.grid;
    Eigen::MatrixXd out(g.dim(), g.size());
    for (int a = 0; a < g.dim(); ++a) out.row(a) = diff1(g, phi.samples, a).transpose();
    return out;
}

SymmetricField real_hessian(const ScalarField& phi) {
    const auto& g = phi.grid;
    const int d = g.dim();
    const Eigen::MatrixXd grad = gradient(phi);
    SymmetricField h{g, d, Eigen::MatrixXd(d * d, g.size())};
    for (int a = 0; a < d; ++a) {
        h.data.row(a * d + a) = diff2(g, phi.samples, a).transpose();
        for (int b = a + 1; b < d; ++b) {
            const Eigen::VectorXd ab = diff1(g, Eigen::VectorXd(grad.row(b).transpose()), a);
            const Eigen::VectorXd ba = diff1(g, Eigen::VectorXd(grad.row(a).transpose()), b);
            const Eigen::RowVectorXd mixed = 0.5 * (ab + ba).transpose();
            h.data.row(a * d + b) = mixed;
            h.data.row(b * d + a) = mixed;
        }
    }
    return h;
}

VectorFieldC lie_bracket(const TorusGrid& g, const VectorFieldC& X, const VectorFieldC& Y) {
    const int d = g.dim();
    if (X.rows() != d || Y.rows() != d || X.cols() != g.size() || Y.cols() != g.size()) {
        throw GridMismatch("lie_bracket: vector field shape does not match grid");
    }
    VectorFieldC out = VectorFieldC::Zero(d, g.size());
    for (int b = 0; b < d; ++b) {
        const Eigen::VectorXcd yb = Y.row(b).transpose();
        const Eigen::VectorXcd xb = X.row(b).transpose();
        for (int a = 0; a < d; ++a) {
            const Eigen::VectorXcd dyb = diff1(g, yb, a);
            const Eigen::VectorXcd dxb = diff1(g, xb, a);
            out.row(b) += (X.row(a).array() * dyb.transpose().array() -
                           Y.row(a).array() * dxb.transpose().array())
                              .matrix();
        }
    }
    return out;
}

VectorFieldC project01(const VectorFieldC& W) {
    const std::complex<double> I(0.0, 1.0);
    VectorFieldC jw(W.rows(), W.cols());
    for (Eigen::Index k = 0; k + 1 < W.rows(); k += 2) {
        jw.row(k) = -W.row(k + 1);
        jw.row(k + 1) = W.row(k);
    }
    return 0.5 * (W + I * jw);
}

VectorFieldC frame_bracket(const FrameField& frame, int i, int j) {
    const int n = frame.grid().n();
    if (i < 0 || i >= n || j < 0 || j >= n) throw InvalidArgument("frame_bracket: bad index");
    if (frame.is_constant()) return VectorFieldC::Zero(frame.grid().dim(), frame.grid().size());
    return project01(lie_bracket(frame.grid(), frame.holomorphic(i), frame.antiholomorphic(j)));
}

Eigen::MatrixXcd frame_derivatives(const ScalarField& phi, const FrameField& frame) {
    require_same_grid(phi.grid, frame.grid(), "frame_derivatives");
    const auto& g = phi.grid;
    const Eigen::MatrixXd grad = gradient(phi);
    Eigen::MatrixXcd out(g.n(), g.size());
    for (Eigen::Index p = 0; p < g.size(); ++p) out.col(p) = frame.at(p) * grad.col(p);
    return out;
}

HermitianField complex_hessian(const ScalarField& phi, const FrameField& frame) {
    require_same_grid(phi.grid, frame.grid(), "complex_hessian");
    const auto& g = phi.grid;
    const int n = g.n();
    HermitianField out{g, n, Eigen::MatrixXcd(n * n, g.size())};

    if (frame.is_constant()) {
        const SymmetricField h = real_hessian(phi);
        const Eigen::MatrixXcd& c = frame.at(0);
        parallel_for(static_cast<std::size_t>(g.size()), [&](std::size_t b, std::size_t e) {
            for (auto p = static_cast<Eigen::Index>(b); p < static_cast<Eigen::Index>(e); ++p) {
                const Eigen::MatrixXcd m = c * h.at(p) * c.adjoint();
                for (int i = 0; i < n; ++i) {
                    out.data(i * n + i, p) = {m(i, i).real(), 0.0};
                    for (int j = i + 1; j < n; ++j) {
                        out.data(j * n + i, p) = m(i, j);
                        out.data(i * n + j, p) = std::conj(m(i, j));
                    }
                }
            }
        });
        return out;
    }

    const Eigen::MatrixXd grad = gradient(phi);
    for (int j = 0; j < n; ++j) {
        const VectorFieldC ebar = frame.antiholomorphic(j);
        Eigen::VectorXcd ebar_phi(g.size());
        for (Eigen::Index p = 0; p < g.size(); ++p) {
            ebar_phi[p] = (ebar.col(p).array() * grad.col(p).array().cast<std::complex<double>>()).sum();
        }
        std::vector<Eigen::VectorXcd> d_ebar_phi;
        for (int a = 0; a < g.dim(); ++a) d_ebar_phi.push_back(diff1(g, ebar_phi, a));
        for (int i = 0; i < n; ++i) {
            const VectorFieldC br = frame_bracket(frame, i, j);
            for (Eigen::Index p = 0; p < g.size(); ++p) {
                std::complex<double> v = 0.0;
                for (int a = 0; a < g.dim(); ++a) {
                    v += frame.at(p)(i, a) * d_ebar_phi[static_cast<std::size_t>(a)][p];
                    v -= br(a, p) * grad(a, p);
                }
                out.data(j * n + i, p) = v;
            }
        }
    }
    return out;
}

ScalarField grad_norm_sq(const ScalarField& phi, const FrameField& frame) {
    const Eigen::MatrixXcd e = frame_derivatives(phi, frame);
    return ScalarField(phi.grid, e.cwiseAbs2().colwise().sum().transpose());
}

} // namespace sigma2
