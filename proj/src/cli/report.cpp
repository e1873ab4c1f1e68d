#include "sigma2/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace sigma2 {

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

namespace {

Json vec(const Eigen::VectorXd& v) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(number(v[i]));
    return a;
}

Json cvec(const Eigen::VectorXcd& v) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        a.push_back(Json::array({number(v[i].real()), number(v[i].imag())}));
    }
    return a;
}

double get_or(const Json& j, const char* key, double fallback) {
    return j.contains(key) ? j.at(key).get<double>() : fallback;
}

int get_or(const Json& j, const char* key, int fallback) {
    return j.contains(key) ? j.at(key).get<int>() : fallback;
}

ScalarField field_or_constant(const Json& v, const TorusGrid& g, const char* name) {
    if (v.is_number()) {
        return ScalarField(g, Eigen::VectorXd::Constant(g.size(), v.get<double>()));
    }
    if (v.is_string()) {
        ScalarField f = read_field_binary(v.get<std::string>());
        require_same_grid(f.grid, g, name);
        return f;
    }
    throw InvalidArgument(std::string("config: rhs.") + name + " must be a number or a field path");
}

} // namespace

Json to_json(const SlackRecord& s) {
    return Json{{"maclaurin_sum_slack", number(s.maclaurin_sum_slack)},
                {"eta1_sigma1_slack", number(s.eta1_sigma1_slack)},
                {"sigma1_product_slack", number(s.sigma1_product_slack)},
                {"min_grad_ratio", number(s.min_grad_ratio)}};
}

Json to_json(const SolverReport& r) {
    Json hist = Json::array();
    for (const auto& h : r.history) {
        hist.push_back({{"iter", h.iter},
                        {"residual_linf", number(h.residual_linf)},
                        {"step", number(h.step)},
                        {"min_sigma2", number(h.min_sigma2)}});
    }
    return Json{{"converged", r.converged},
                {"iters", r.iters},
                {"residual_linf", number(r.residual_linf)},
                {"min_sigma1", number(r.min_sigma1)},
                {"min_sigma2", number(r.min_sigma2)},
                {"c2_sup", number(r.c2_sup)},
                {"status", r.status},
                {"krylov_iters", r.krylov_iters},
                {"history", hist},
                {"n", r.phi.grid.n()},
                {"res", r.phi.grid.res()}};
}

Json to_json(const AuditLedger& l) {
    Json slacks = Json::object();
    for (const auto& [name, s] : l.slacks) {
        slacks[name] = {{"value", s.value ? number(*s.value) : Json(nullptr)}, {"status", s.status}};
    }
    return Json{{"x0", l.x0},
                {"coords", l.coords},
                {"A", number(l.A)},
                {"eps", number(l.eps)},
                {"qhat", number(l.qhat)},
                {"barrier",
                 {{"value", number(l.barrier.value)},
                  {"d1", number(l.barrier.d1)},
                  {"d2", number(l.barrier.d2)},
                  {"sup_grad_sq", number(l.barrier.sup_grad_sq)}}},
                {"lambda", vec(l.lambda)},
                {"eta", vec(l.eta)},
                {"nu", cvec(l.nu)},
                {"mu", vec(l.mu)},
                {"gamma", number(l.gamma)},
                {"term_I", number(l.term_I)},
                {"term_II", number(l.term_II)},
                {"term_II1", number(l.term_II1)},
                {"term_II2", number(l.term_II2)},
                {"term_II3", number(l.term_II3)},
                {"first_order",
                 {{"defect", number(l.first_order_defect)},
                  {"tolerance", number(l.first_order_tolerance)},
                  {"ok", l.first_order_ok},
                  {"stencil_order", l.first_order_stencil}}},
                {"slacks", slacks}};
}

ParsedConfig solver_config_from_json(const Json& j) {
    if (!j.is_object()) throw InvalidArgument("config: top level must be an object");
    for (const char* key : {"n", "res", "rhs"}) {
        if (!j.contains(key)) throw InvalidArgument(std::string("config: missing '") + key + "'");
    }
    const int n = j.at("n").get<int>();
    const int res = j.at("res").get<int>();
    const TorusGrid g(n, res);
    const Json rhs = j.at("rhs");
    const Json chi = j.contains("chi") ? j.at("chi") : Json("identity");
    const std::string kind = rhs.at("kind").get<std::string>();

    double scale = 1.0;
    if (chi.is_object()) {
        scale = chi.at("scale").get<double>();
    } else if (!(chi.is_string() && chi.get<std::string>() == "identity")) {
        throw InvalidArgument("config: chi must be \"identity\" or {\"scale\": s}");
    }
    const HermitianField chi_field =
        HermitianField::constant(g, scale * Eigen::MatrixXcd::Identity(n, n));

    std::optional<ScalarField> phi_star;
    SolverConfig cfg = [&] {
        switch (rhs_kind_from_string(kind)) {
        case RhsKind::constant:
            return SolverConfig(n, res, RhsModel::constant(get_or(rhs, "value", 0.0)), chi_field);
        case RhsKind::manufactured: {
            if (scale != 1.0) throw InvalidArgument("config: the manufactured case needs chi = identity");
            ManufacturedCase mc = manufactured_case(n, res, rhs.at("delta").get<double>());
            phi_star = mc.phi_star;
            return mc.cfg;
        }
        case RhsKind::fu_yau:
            return SolverConfig(n, res,
                                RhsModel::fu_yau(rhs.at("alpha").get<double>(),
                                                 field_or_constant(rhs.at("f"), g, "f"),
                                                 field_or_constant(rhs.at("mu"), g, "mu")),
                                chi_field);
        }
        throw InvalidArgument("config: unknown rhs kind");
    }();

    cfg.newton_tol = get_or(j, "newton_tol", cfg.newton_tol);
    cfg.max_iters = get_or(j, "max_iters", cfg.max_iters);
    if (j.contains("damping")) {
        const Json& d = j.at("damping");
        cfg.damping.factor = get_or(d, "factor", cfg.damping.factor);
        cfg.damping.armijo = get_or(d, "armijo", cfg.damping.armijo);
        cfg.damping.min_step = get_or(d, "min_step", cfg.damping.min_step);
    }
    cfg.cone_margin = get_or(j, "cone_margin", cfg.cone_margin);
    if (j.contains("gauge")) cfg.gauge = gauge_from_string(j.at("gauge").get<std::string>());
    cfg.krylov_max_iters = get_or(j, "krylov_max_iters", cfg.krylov_max_iters);
    cfg.krylov_tol = get_or(j, "krylov_tol", cfg.krylov_tol);
    if (!(cfg.newton_tol > 0.0) || cfg.max_iters < 1 || !(cfg.cone_margin > 0.0) ||
        !(cfg.damping.factor > 0.0 && cfg.damping.factor < 1.0) || cfg.krylov_max_iters < 1 ||
        !(cfg.krylov_tol > 0.0)) {
        throw InvalidArgument("config: tolerances, margins and iteration caps must be positive");
    }
    const std::string phi0 = j.contains("phi0") ? j.at("phi0").get<std::string>() : "";
    return {std::move(cfg), rhs, chi, phi0, std::move(phi_star)};
}

Json to_json(const ParsedConfig& pc) {
    const SolverConfig& c = pc.cfg;
    Json j{{"n", c.n},
           {"res", c.res},
           {"rhs", pc.rhs},
           {"chi", pc.chi},
           {"newton_tol", c.newton_tol},
           {"max_iters", c.max_iters},
           {"damping",
            {{"factor", c.damping.factor}, {"armijo", c.damping.armijo}, {"min_step", c.damping.min_step}}},
           {"cone_margin", c.cone_margin},
           {"gauge", to_string(c.gauge)},
           {"krylov_max_iters", c.krylov_max_iters},
           {"krylov_tol", c.krylov_tol}};
    if (!pc.phi0_path.empty()) j["phi0"] = pc.phi0_path;
    return j;
}

std::string config_digest(const Json& j) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : j.dump()) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void write_json(const std::string& path, const Json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << j.dump(2) << '\n';
    if (!out) throw IoError("write failed for '" + path + "'");
}

void CsvTable::write(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << header_ << '\n';
    for (const auto& r : rows_) out << r << '\n';
    if (!out) throw IoError("write failed for '" + path + "'");
}

} // namespace sigma2
