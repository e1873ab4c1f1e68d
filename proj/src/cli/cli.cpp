#include "sigma2/cli.hpp"

#include <CLI11.hpp>
#include <Eigen/Core>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include "sigma2/audit.hpp"
#include "sigma2/concavity.hpp"
#include "sigma2/parallel.hpp"
#include "sigma2/report.hpp"
#include "sigma2/solver.hpp"
#include "suites.hpp"

namespace sigma2::cli {

namespace {

namespace fs = std::filesystem;

constexpr const char* kVersion = "1.0.0";

Json versions() {
    return Json{{"sigma2_lab", kVersion},
                {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                              "." + std::to_string(EIGEN_MINOR_VERSION)},
                {"compiler", __VERSION__}};
}

std::string path_in(const RunConfig& cfg, const std::string& name) {
    return (fs::path(cfg.out_dir) / name).string();
}

Json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        throw InvalidArgument("config '" + path + "' is not valid JSON: " + e.what());
    }
}

void write_manifest(const RunConfig& cfg, const Json& inputs, std::vector<std::string> outputs) {
    std::sort(outputs.begin(), outputs.end());
    outputs.push_back("manifest.json");
    write_json(path_in(cfg, "manifest.json"), Json{{"command", cfg.command},
                                                   {"seed", cfg.seed},
                                                   {"config_digest", config_digest(inputs)},
                                                   {"inputs", inputs},
                                                   {"outputs", outputs},
                                                   {"versions", versions()}});
}

int run_verify(const RunConfig& cfg) {
    Json inputs{{"suite", cfg.suite}, {"samples", cfg.samples}, {"seed", cfg.seed},
                {"n", cfg.n ? Json(*cfg.n) : Json(nullptr)}, {"A", cfg.A}, {"eps", cfg.eps}};
    if (cfg.samples < 1) throw InvalidArgument("--samples must be at least 1");
    std::vector<std::string> outputs;
    const std::vector<Check> checks = run_suite(cfg.suite, cfg, outputs);

    CsvTable table("suite,check,passed,worst,threshold");
    Json list = Json::array();
    bool all = true;
    for (const Check& c : checks) {
        table.add(c.suite + ',' + c.name + ',' + (c.passed ? "true" : "false") + ',' + fmt(c.worst) + ',' +
                  fmt(c.threshold));
        list.push_back({{"suite", c.suite}, {"check", c.name}, {"passed", c.passed},
                        {"worst", number(c.worst)}, {"threshold", number(c.threshold)}});
        all = all && c.passed;
        std::cout << (c.passed ? "PASS " : "FAIL ") << c.suite << '.' << c.name << " worst=" << fmt(c.worst)
                  << " threshold=" << fmt(c.threshold) << '\n';
    }
    table.write(path_in(cfg, "verify_checks.csv"));
    write_json(path_in(cfg, "verify.json"), Json{{"passed", all}, {"checks", list}});
    outputs.insert(outputs.end(), {"verify_checks.csv", "verify.json"});
    write_manifest(cfg, inputs, outputs);
    return all ? kExitOk : kExitFailed;
}

int run_solve(const RunConfig& cfg) {
    if (cfg.json_path.empty()) throw InvalidArgument("solve needs --config");
    ParsedConfig pc = solver_config_from_json(read_json(cfg.json_path));
    const Json inputs = to_json(pc);
    const ScalarField phi0 =
        pc.phi0_path.empty() ? ScalarField(pc.cfg.grid()) : read_field_binary(pc.phi0_path);
    require_same_grid(phi0.grid, pc.cfg.grid(), "solve: phi0");
    const SolverReport rep = newton_solve(pc.cfg, phi0);

    Json report = to_json(rep);
    if (pc.phi_star) {
        report["phi_star_error_linf"] =
            number((rep.phi.samples - pc.phi_star->samples).lpNorm<Eigen::Infinity>());
    }
    const bool consistent =
        !rep.converged || (rep.residual_linf <= pc.cfg.newton_tol && rep.min_sigma2 > pc.cfg.cone_margin);
    report["invariants_ok"] = consistent;
    write_json(path_in(cfg, "report.json"), report);

    CsvTable hist("iter,residual_linf,step,min_sigma2");
    for (const auto& h : rep.history) {
        hist.add(std::to_string(h.iter) + ',' + fmt(h.residual_linf) + ',' + fmt(h.step) + ',' +
                 fmt(h.min_sigma2));
    }
    hist.write(path_in(cfg, "history.csv"));
    write_field_binary(rep.phi, path_in(cfg, "phi.bin"));
    write_manifest(cfg, inputs, {"report.json", "history.csv", "phi.bin"});
    std::cout << "status=" << rep.status << " iters=" << rep.iters
              << " residual_linf=" << fmt(rep.residual_linf) << '\n';
    return rep.converged && consistent ? kExitOk : kExitFailed;
}

int run_audit(const RunConfig& cfg) {
    if (cfg.phi_path.empty()) throw InvalidArgument("audit needs --phi");
    const ScalarField phi = read_field_binary(cfg.phi_path);
    Json inputs{{"phi", cfg.phi_path}, {"A", cfg.A}, {"eps", cfg.eps}};
    SolverConfig scfg = default_config(phi.grid.n(), phi.grid.res(), RhsModel::constant(0.0));
    if (!cfg.json_path.empty()) {
        ParsedConfig pc = solver_config_from_json(read_json(cfg.json_path));
        inputs["config"] = to_json(pc);
        scfg = std::move(pc.cfg);
    }
    if (!(cfg.A > 0.0)) throw InvalidArgument("--A must be positive");
    if (!(cfg.eps > 0.0 && cfg.eps <= 0.5)) throw InvalidArgument("--eps must lie in (0, 1/2]");

    const QhatMax qm = qhat_max(phi, cfg.A, FrameField::standard(phi.grid));
    Json out;
    bool ok = true;
    if (!qm.found) {
        out = Json{{"status", "bounded-above-by-zero"},
                   {"found", false},
                   {"detail", "lambda_1(Hessian) <= 0 at every grid point; no maximum of Q-hat on M+"}};
    } else {
        const AuditLedger l = ledger(phi, cfg.A, cfg.eps, scfg);
        out = to_json(l);
        out["status"] = "ok";
        out["found"] = true;
        const double sum = l.term_II1 + l.term_II2 + l.term_II3;
        const double split = std::abs(sum - l.term_II) / std::max(std::abs(l.term_II), 1e-300);
        Json inv{{"II_split", l.term_II == 0.0 ? sum == 0.0 : split <= 1e-10},
                 {"nu_unit", std::abs(l.nu.squaredNorm() - 1.0) <= 1e-8},
                 {"mu_unit", std::abs(l.mu.squaredNorm() - 1.0) <= 1e-8},
                 {"term_I_nonnegative", l.term_I >= -1e-8},
                 {"barrier_identity", l.barrier.d2 == 2 * l.barrier.d1 * l.barrier.d1},
                 {"first_order", l.first_order_ok}};
        for (const auto& [k, v] : inv.items()) ok = ok && v.get<bool>();
        out["invariants"] = inv;
    }
    write_json(path_in(cfg, "ledger.json"), out);
    write_manifest(cfg, inputs, {"ledger.json"});
    std::cout << "status=" << out["status"].get<std::string>() << '\n';
    return ok ? kExitOk : kExitFailed;
}

int run_bench(const RunConfig& cfg) {
    if (cfg.samples < 1) throw InvalidArgument("--samples must be at least 1");
    const int n = cfg.n.value_or(4);
    if (n < 2 || n > 8) throw InvalidArgument("--n must lie in [2, 8] for bench");
    const Json inputs{{"n", n}, {"samples", cfg.samples}, {"seed", cfg.seed}};

    const auto t0 = std::chrono::steady_clock::now();
    CsvTable rows(concavity_csv_header(n));
    for (const Spectrum& eta : sample_gamma_k(n, 2, cfg.samples, cfg.seed)) rows.add(concavity_csv_row(eta));
    rows.write(path_in(cfg, "bench_concavity.csv"));
    const auto t1 = std::chrono::steady_clock::now();

    CsvTable tails("family,tail,t,t2_kappa_n,t2_xi_tail,kappa_n_minus_1");
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> U(0.1, 2.0);
    const std::vector<double> grid = {10.0, 1e2, 1e3, 1e4};
    for (int s = 0; s < 10; ++s) {
        Eigen::VectorXd tail(n - 1);
        for (Eigen::Index i = 0; i < tail.size(); ++i) tail[i] = U(rng);
        for (TailFamily fam : {TailFamily::fixed_tail, TailFamily::bounded_sigma2}) {
            for (const auto& r : tail_decay_profile(Spectrum(tail), grid, fam)) {
                tails.add(to_string(fam) + ',' + std::to_string(s) + ',' + fmt(r.t) + ',' + fmt(r.t2_kappa_n) +
                          ',' + fmt(r.t2_xi_tail) + ',' + fmt(r.kappa_n_minus_1));
            }
        }
    }
    tails.write(path_in(cfg, "bench_tail_decay.csv"));
    const auto t2 = std::chrono::steady_clock::now();
    write_manifest(cfg, inputs, {"bench_concavity.csv", "bench_tail_decay.csv"});
    std::cout << "concavity rows: " << cfg.samples << " in "
              << std::chrono::duration<double>(t1 - t0).count() << " s\n"
              << "tail profiles: 20 in " << std::chrono::duration<double>(t2 - t1).count() << " s\n"
              << "workers: " << worker_count() << '\n';
    return kExitOk;
}

} // namespace

int dispatch(const RunConfig& cfg) {
    try {
        fs::create_directories(cfg.out_dir);
        if (cfg.command == "verify") return run_verify(cfg);
        if (cfg.command == "solve") return run_solve(cfg);
        if (cfg.command == "audit") return run_audit(cfg);
        if (cfg.command == "bench") return run_bench(cfg);
        std::cerr << "unknown command '" << cfg.command << "'\n";
        return kExitUsage;
    } catch (const InvalidArgument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const Json::exception& e) {
        std::cerr << "error: config: " << e.what() << '\n';
        return kExitUsage;
    } catch (const GridMismatch& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << '\n';
        return kExitFailed;
    }
}

int main(int argc, char** argv) {
    CLI::App app{"Numerical laboratory for the 2nd Hessian equation: verify, solve, audit, bench"};
    app.require_subcommand(1, 1);
    RunConfig cfg;
    int n = 0;

    auto* verify = app.add_subcommand("verify", "run property checks of one suite or all");
    verify->add_option("--suite", cfg.suite, "symfun|concavity|perturb|geometry|solver|audit|all")
        ->check(CLI::IsMember({"symfun", "concavity", "perturb", "geometry", "solver", "audit", "all"}));
    verify->add_option("--n", n, "complex dimension (default: every supported n)");
    verify->add_option("--samples", cfg.samples, "samples per dimension");
    verify->add_option("--seed", cfg.seed, "random seed");
    verify->add_option("--A", cfg.A, "audit suite: A");
    verify->add_option("--eps", cfg.eps, "audit suite: epsilon");
    verify->add_option("--out", cfg.out_dir, "output directory");

    auto* solve = app.add_subcommand("solve", "damped Newton solve from a JSON config");
    solve->add_option("--config", cfg.json_path, "solver config JSON")->required();
    solve->add_option("--seed", cfg.seed, "recorded in the manifest");
    solve->add_option("--out", cfg.out_dir, "output directory");

    auto* audit = app.add_subcommand("audit", "maximum-principle ledger at the maximum of Q-hat");
    audit->add_option("--phi", cfg.phi_path, "S2F1 field")->required();
    audit->add_option("--A", cfg.A, "A > 0");
    audit->add_option("--eps", cfg.eps, "epsilon in (0, 1/2]");
    audit->add_option("--config", cfg.json_path, "solver config JSON supplying chi");
    audit->add_option("--seed", cfg.seed, "recorded in the manifest");
    audit->add_option("--out", cfg.out_dir, "output directory");

    auto* bench = app.add_subcommand("bench", "timed concavity and tail-decay dumps");
    bench->add_option("--n", n, "complex dimension (default 4)");
    bench->add_option("--samples", cfg.samples, "spectra to dump");
    bench->add_option("--seed", cfg.seed, "random seed");
    bench->add_option("--out", cfg.out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        std::cerr << app.help();
        return kExitUsage;
    }
    for (auto* sub : {verify, solve, audit, bench}) {
        if (sub->parsed()) cfg.command = sub->get_name();
    }
    for (auto* sub : {verify, bench}) {
        if (sub->parsed() && sub->count("--n") > 0) cfg.n = n;
    }
    return dispatch(cfg);
}

} // namespace sigma2::cli
