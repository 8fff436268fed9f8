// homog: command-line front end.
//
//   homog coeffs      --k 3 [--format rational|decimal]
//   homog exact       --env builtin:checkerboard4 [--xi 1,0]
//   homog spectrum    --env cell.txt [--mu 0.1 --k 2] [--out measure.csv]
//   homog estimate    (--env cell.txt | --law twopoint:1,4,0.5 --dim 2 --seed 7) --R 61 --L 20 --mu 0.05 --k 2
//   homog convergence --env builtin:checkerboard4 --k 1,2 --R 24,36,54 --out conv.csv
//   homog variance    --law twopoint:1,4,0.5 --sizes 16,32,64 --samples 100 --out samples.csv --summary summary.csv
//
// Any subcommand accepts --config FILE with key=value lines (flags win). The
// `#`-prefixed header of a CSV written by convergence or variance is itself
// a valid config file.
//
// Exit codes: 0 success, 1 numerical failure, 2 usage error.

#include "homog/cells.hpp"
#include "homog/convergence.hpp"
#include "homog/montecarlo.hpp"
#include "homog/scheme.hpp"
#include "homog/solver.hpp"
#include "homog/spectral.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace homog;

namespace {

constexpr int kExitNumerical = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

std::vector<std::string> split(const std::string& s, const std::string& seps) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (seps.find(ch) != std::string::npos) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

double parse_real(const std::string& s, const std::string& what) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size() || !std::isfinite(v)) throw UsageError("invalid " + what + " '" + s + "'");
    return v;
}

std::vector<int> parse_int_list(const std::string& s, const std::string& what) {
    std::vector<int> out;
    for (const auto& item : split(s, ",;")) {
        const double v = parse_real(item, what);
        if (v != std::floor(v) || std::abs(v) > 1e9) throw UsageError("invalid " + what + " '" + item + "'");
        out.push_back(static_cast<int>(v));
    }
    return out;
}

// "1,0", "0.6;0.8" or "e2".
Direction parse_direction(const std::string& s, int dim) {
    Direction xi;
    if (s.size() >= 2 && s[0] == 'e') {
        const int axis = static_cast<int>(parse_real(s.substr(1), "direction")) - 1;
        if (axis < 0 || axis >= dim) throw UsageError("direction " + s + " out of range for d = " + std::to_string(dim));
        return Direction::unit(dim, axis);
    }
    for (const auto& item : split(s, ",;")) xi.xi.push_back(parse_real(item, "direction component"));
    try {
        require_unit_direction(xi, dim);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    return xi;
}

// Reads key=value lines. A file whose first line starts with '#' is read as a
// CSV config echo: only the leading '#' block counts.
std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config file '" + path + "'");
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    bool echo = false, first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (first) echo = !line.empty() && line[0] == '#';
        first = false;
        if (echo) {
            if (line.empty() || line[0] != '#') break;
            line.erase(0, 1);
        } else {
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
        }
        const auto b = line.find_first_not_of(" \t");
        if (b == std::string::npos) continue;
        line = line.substr(b, line.find_last_not_of(" \t") + 1 - b);
        const auto eq = line.find('=');
        if (eq == std::string::npos || eq == 0) throw UsageError("config line without key=value: '" + line + "'");
        std::string key = line.substr(0, eq), value = line.substr(eq + 1);
        while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.pop_back();
        const auto vb = value.find_first_not_of(" \t");
        value = vb == std::string::npos ? "" : value.substr(vb);
        out.emplace_back(key, value);
    }
    return out;
}

// Shared options --------------------------------------------------------------

struct Common {
    std::string env;
    std::string law;
    int dim = 2;
    std::uint64_t seed = 0;
    std::string xi = "e1";
    double tol = 1e-12;
    int max_iter = 0;
    int threads = 1;

    SolveConfig solve() const {
        SolveConfig c;
        c.rel_tolerance = tol;
        c.max_iterations = max_iter;
        try {
            c.validate();
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
        return c;
    }
};


CLI::Option* last(CLI::Option* opt) {
    return opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
}

void add_env(CLI::App* sub, Common& c) {
    last(sub->add_option("--env", c.env, "environment file or builtin:<name>"));
}
void add_law(CLI::App* sub, Common& c) {
    last(sub->add_option("--law", c.law, "twopoint:a,b,p or uniform:alpha,beta"));
    last(sub->add_option("--dim", c.dim, "dimension of sampled environments"))->check(CLI::Range(1, 3));
    last(sub->add_option("--seed", c.seed, "64-bit seed"));
}
void add_solver(CLI::App* sub, Common& c) {
    last(sub->add_option("--xi", c.xi, "unit direction, e.g. e1 or 0.6,0.8"));
    last(sub->add_option("--tol", c.tol, "relative residual tolerance"));
    last(sub->add_option("--max-iter", c.max_iter, "CG iteration cap (0: automatic)"));
}
void add_threads(CLI::App* sub, Common& c) {
    last(sub->add_option("--threads", c.threads, "worker threads (1 for bit-reproducible runs)"))
        ->check(CLI::Range(1, 1024));
}

Environment load_env(const std::string& source) {
    try {
        return resolve_environment(source);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    } catch (const std::runtime_error& e) {
        throw UsageError(e.what());
    }
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot write '" + path + "'");
    return out;
}

// Subcommands -----------------------------------------------------------------

int run_coeffs(int k, const std::string& format) {
    if (k < 1 || k > kMaxSchemeOrder)
        throw UsageError("k must satisfy 1 <= k <= " + std::to_string(kMaxSchemeOrder) + ", got " + std::to_string(k));
    print_coefficients(std::cout, coefficients(k), format == "rational");
    return 0;
}

int run_exact(const Common& c) {
    if (c.env.empty()) throw UsageError("exact needs --env");
    const Environment env = load_env(c.env);
    if (env.geometry().topology() != Topology::Torus) throw UsageError("exact needs a periodic (torus) environment");
    const Direction xi = parse_direction(c.xi, env.dim());
    const SolveConfig cfg = c.solve();
    const HomogenizedResult r = exact_homogenized(env, xi, cfg);
    std::cout << "ahom=" << format_double(r.value) << '\n'
              << "xi=" << xi.to_string() << '\n'
              << "iterations=" << r.stats.iterations << '\n'
              << "residual=" << format_double(r.stats.rhs_norm > 0 ? r.stats.residual / r.stats.rhs_norm : 0.0)
              << '\n';
    return 0;
}

int run_spectrum(const Common& c, std::optional<double> mu, int k, const std::string& out_path) {
    if (c.env.empty()) throw UsageError("spectrum needs --env");
    const Environment env = load_env(c.env);
    if (env.geometry().topology() != Topology::Torus) throw UsageError("spectrum needs a periodic (torus) environment");
    if (env.size() > kMaxDenseSites)
        throw UsageError("spectrum: cell has " + std::to_string(env.size()) + " sites, dense oracle cap is " +
                         std::to_string(kMaxDenseSites));
    if (mu && !(*mu > 0.0)) throw UsageError("--mu must be positive");
    if (k < 1) throw UsageError("--k must be >= 1");
    const Direction xi = parse_direction(c.xi, env.dim());
    const SolveConfig cfg = c.solve();

    const SpectralMeasure m = spectral_measure(env, xi);
    const double via_corrector = exact_homogenized(env, xi, cfg).value;
    std::cout << "sites=" << env.size() << '\n'
              << "gap=" << format_double(m.gap()) << '\n'
              << "drift_square_mean=" << format_double(m.drift_square_mean) << '\n'
              << "total_weight=" << format_double(m.total_weight()) << '\n'
              << "zero_mode_weight=" << format_double(m.zero_mode_weight) << '\n'
              << "max_eigen_residual=" << format_double(m.max_eigen_residual) << '\n'
              << "ahom_spectral=" << format_double(ahom_spectral(m)) << '\n'
              << "ahom_corrector=" << format_double(via_corrector) << '\n';
    if (mu) {
        std::cout << "mu=" << format_double(*mu) << '\n'
                  << "k=" << k << '\n'
                  << "a_mu_k_spectral=" << format_double(a_mu_k_spectral(m, m.mean_energy, *mu, k)) << '\n'
                  << "systematic_error=" << format_double(systematic_error(m, *mu, k)) << '\n'
                  << "systematic_error_bound=" << format_double(systematic_error_bound(m, *mu, k)) << '\n';
    }
    if (!out_path.empty()) {
        auto out = open_out(out_path);
        out << "# subcommand=spectrum\n# env=" << c.env << "\n# xi=" << xi.to_string() << '\n';
        out << "lambda,weight\n";
        for (std::size_t i = 0; i < m.eigenvalues.size(); ++i)
            out << format_double(m.eigenvalues[i]) << ',' << format_double(m.weights[i]) << '\n';
    }
    return 0;
}

struct EstimateArgs {
    double mu = 0.0;
    int k = 1;
    int R = 0;
    double L = 0.0;
    std::string filter = "bump";
    std::string boundary = "dirichlet";
    std::uint64_t stream = 0;
    std::string format = "kv";
};

int run_estimate(const Common& c, const EstimateArgs& a) {
    if (c.env.empty() == c.law.empty()) throw UsageError("estimate needs exactly one of --env or --law");
    if (!(a.mu > 0.0)) throw UsageError("--mu must be positive");
    if (a.k < 1 || a.k > kMaxSchemeOrder) throw UsageError("--k out of range");
    if (!(a.L > 0.0)) throw UsageError("--L must be positive");
    if (a.boundary != "dirichlet" && a.boundary != "periodic") throw UsageError("--boundary must be dirichlet or periodic");
    Filter filter = Filter::smooth_bump();
    try {
        filter = Filter::parse(a.filter);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    const Topology topo = a.boundary == "dirichlet" ? Topology::Box : Topology::Torus;

    std::optional<Environment> env;
    if (!c.law.empty()) {
        if (a.R < 1) throw UsageError("--R is required with --law");
        if (a.L > a.R) throw UsageError("--L must not exceed --R");
        EnvironmentLaw law;
        try {
            law = EnvironmentLaw::parse(c.law, c.dim, c.seed);
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
        env = sample_environment(law, std::vector<int>(static_cast<std::size_t>(c.dim), a.R), topo, a.stream);
    } else {
        Environment src = load_env(c.env);
        if (src.geometry().topology() == Topology::Box) {
            const int side = src.geometry().extent(0);
            if (a.R != 0 && a.R != side) throw UsageError("--R does not match the box in --env");
            if (a.boundary != "dirichlet") throw UsageError("a box environment only supports --boundary dirichlet");
            if (a.L > side) throw UsageError("--L must not exceed --R");
            env = std::move(src);
        } else {
            if (a.R < 1) throw UsageError("--R is required with a periodic --env");
            if (a.L > a.R) throw UsageError("--L must not exceed --R");
            try {
                env = topo == Topology::Box ? src.restrict_to_box(a.R) : src.tile_to_torus(a.R);
            } catch (const std::invalid_argument& e) {
                throw UsageError(e.what());
            }
        }
    }
    const Direction xi = parse_direction(c.xi, env->dim());
    const SolveConfig cfg = c.solve();
    try {
        build_mask(filter, a.L, env->geometry());
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    const EstimateReport rep = estimate(*env, a.mu, a.k, a.L, filter, xi, cfg);
    if (a.format == "csv")
        std::cout << report_csv_header() << '\n' << report_csv_row(rep) << '\n';
    else
        write_report(std::cout, rep);
    return 0;
}

struct ConvergenceArgs {
    std::string ks = "1,2";
    std::string sizes = "24,36,54,81,122,183";
    std::string units = "cells";
    std::string mu = "250*R^-1.5";
    double L_fraction = 1.0 / 3.0;
    std::string filter = "bump";
    double floor = 1e-11;
    std::string out;
};

int run_convergence(const Common& c, const ConvergenceArgs& a) {
    if (c.env.empty()) throw UsageError("convergence needs --env (a periodic cell)");
    const Environment cell = load_env(c.env);
    if (cell.geometry().topology() != Topology::Torus)
        throw UsageError("convergence needs a periodic (torus) environment");
    ConvergenceConfig cfg;
    try {
        cfg.ks = parse_int_list(a.ks, "k");
        cfg.sizes = parse_int_list(a.sizes, "R");
        cfg.unit = parse_size_unit(a.units);
        cfg.mu_rule = PowerLaw::parse(a.mu);
        if (cfg.mu_rule.exponent != 0.0 && cfg.mu_rule.variable != 'R')
            throw UsageError("convergence --mu must be written in R, e.g. 250*R^-1.5");
        cfg.L_fraction = a.L_fraction;
        cfg.filter = Filter::parse(a.filter);
        cfg.xi = parse_direction(c.xi, cell.dim());
        cfg.floor = a.floor;
        cfg.solve = c.solve();
        cfg.threads = c.threads;
        cfg.validate();
        for (int R : cfg.sizes) {
            const double mu = cfg.mu_rule(R);
            if (!(mu > 0.0) || !std::isfinite(mu)) throw UsageError("mu rule gives a nonpositive value at R = " + std::to_string(R));
        }
    } catch (const UsageError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    const ConvergenceResult result = convergence_study(cell, cfg);

    if (!a.out.empty()) {
        auto out = open_out(a.out);
        write_convergence_csv(out, result, cfg, c.env);
    } else {
        write_convergence_csv(std::cout, result, cfg, c.env);
    }
    std::cerr << "ahom=" << format_double(result.ahom) << '\n';
    for (const auto& s : result.slopes) {
        if (s.defined)
            std::cerr << "slope k=" << s.k << ": " << format_double(s.slope) << " +- " << format_double(s.slope_stderr)
                      << " (" << s.points << " points above floor)\n";
        else
            std::cerr << "slope k=" << s.k << ": undefined (" << s.points << " points above floor)\n";
    }
    return 0;
}

struct VarianceArgs {
    int k = 1;
    std::string sizes = "16,32,64";
    int samples = 100;
    std::string mu = "L^-2";
    std::string filter = "bump";
    std::string out;
    std::string summary;
};

int run_variance(const Common& c, const VarianceArgs& a) {
    if (c.law.empty()) throw UsageError("variance needs --law");
    if (!c.env.empty()) throw UsageError("variance samples from --law; --env is not accepted");
    EnvironmentLaw law;
    StudyConfig cfg;
    try {
        law = EnvironmentLaw::parse(c.law, c.dim, c.seed);
        cfg.k = a.k;
        cfg.sizes = parse_int_list(a.sizes, "size");
        cfg.samples_per_size = a.samples;
        cfg.mu_rule = PowerLaw::parse(a.mu);
        if (cfg.mu_rule.exponent != 0.0 && cfg.mu_rule.variable != 'L')
            throw UsageError("variance --mu must be written in L, e.g. L^-2");
        cfg.filter = Filter::parse(a.filter);
        cfg.xi = parse_direction(c.xi, law.dim);
        cfg.solve = c.solve();
        cfg.threads = c.threads;
        cfg.validate();
        for (int L : cfg.sizes)
            if (!(cfg.mu_rule(L) > 0.0)) throw UsageError("mu rule gives a nonpositive value at L = " + std::to_string(L));
    } catch (const UsageError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    const StudyResult result = variance_study(law, cfg);

    if (!a.out.empty()) {
        auto out = open_out(a.out);
        write_samples_csv(out, result, law, cfg);
    }
    if (!a.summary.empty()) {
        auto out = open_out(a.summary);
        write_summary_csv(out, result, law, cfg);
    } else {
        write_summary_csv(std::cout, result, law, cfg);
    }
    std::cerr << "workers=" << result.workers << '\n' << "failed=" << result.failed << '\n';
    if (result.slope_defined)
        std::cerr << "variance_slope=" << format_double(result.variance_fit.slope) << " +- "
                  << format_double(result.variance_fit.slope_stderr) << '\n';
    else
        std::cerr << "variance_slope=undefined\n";
    return result.failed == 0 ? 0 : kExitNumerical;
}

const std::vector<std::string> kSubcommands{"coeffs", "exact", "spectrum", "estimate", "convergence", "variance"};

bool is_subcommand(const std::string& s) {
    for (const auto& n : kSubcommands)
        if (n == s) return true;
    return false;
}

// Pulls --config out of argv and splices its key=value pairs in right after
// the subcommand, so flags given on the command line come later and win.
std::vector<std::string> expand_config(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::optional<std::string> config_path;
    std::vector<std::string> rest;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw UsageError("--config needs a file");
            config_path = args[++i];
        } else if (args[i].rfind("--config=", 0) == 0) {
            config_path = args[i].substr(9);
        } else {
            rest.push_back(args[i]);
        }
    }
    if (!config_path) return rest;

    std::vector<std::string> injected;
    std::string config_sub;
    for (const auto& [key, value] : read_config(*config_path)) {
        if (key == "subcommand") {
            config_sub = value;
            continue;
        }
        std::string flag = key;
        for (char& ch : flag)
            if (ch == '_') ch = '-';
        injected.push_back("--" + flag + "=" + value);
    }
    std::size_t sub_pos = rest.size();
    for (std::size_t i = 0; i < rest.size(); ++i)
        if (is_subcommand(rest[i])) {
            sub_pos = i;
            break;
        }
    if (sub_pos == rest.size()) {
        if (config_sub.empty()) throw UsageError("no subcommand given on the command line or in the config file");
        if (!is_subcommand(config_sub)) throw UsageError("unknown subcommand '" + config_sub + "' in config file");
        rest.insert(rest.begin(), config_sub);
        sub_pos = 0;
    } else if (!config_sub.empty() && config_sub != rest[sub_pos]) {
        throw UsageError("config file is for '" + config_sub + "', not '" + rest[sub_pos] + "'");
    }
    rest.insert(rest.begin() + static_cast<std::ptrdiff_t>(sub_pos) + 1, injected.begin(), injected.end());
    return rest;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Approximation of homogenized coefficients of discrete elliptic operators"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "expand all help");

    Common common;

    int coeffs_k = 0;
    std::string coeffs_format = "rational";
    auto* coeffs = app.add_subcommand("coeffs", "print the exact c, a, eta, nu tables");
    last(coeffs->add_option("--k", coeffs_k, "scheme order"))->required();
    last(coeffs->add_option("--format", coeffs_format, "rational or decimal"))
        ->check(CLI::IsMember({"rational", "decimal"}));

    auto* exact = app.add_subcommand("exact", "exact homogenized coefficient of a periodic cell");
    add_env(exact, common);
    add_solver(exact, common);

    std::optional<double> spec_mu;
    int spec_k = 1;
    std::string spec_out;
    auto* spectrum = app.add_subcommand("spectrum", "spectral measure of the local drift on a periodic cell");
    add_env(spectrum, common);
    add_solver(spectrum, common);
    last(spectrum->add_option("--mu", spec_mu, "also report A_{mu,k} and its systematic error"));
    last(spectrum->add_option("--k", spec_k, "scheme order for --mu"));
    last(spectrum->add_option("--out", spec_out, "CSV of (lambda, weight)"));

    EstimateArgs est;
    auto* estimate_cmd = app.add_subcommand("estimate", "single estimate of xi.A_{mu,k,R,L}xi");
    add_env(estimate_cmd, common);
    add_law(estimate_cmd, common);
    add_solver(estimate_cmd, common);
    last(estimate_cmd->add_option("--mu", est.mu, "regularization mu"))->required();
    last(estimate_cmd->add_option("--k", est.k, "scheme order"));
    last(estimate_cmd->add_option("--R", est.R, "box (or torus) side in sites"));
    last(estimate_cmd->add_option("--L", est.L, "mask half-width in sites"))->required();
    last(estimate_cmd->add_option("--filter", est.filter, "bump or poly<p>"));
    last(estimate_cmd->add_option("--boundary", est.boundary, "dirichlet or periodic"));
    last(estimate_cmd->add_option("--stream", est.stream, "stream index for --law"));
    last(estimate_cmd->add_option("--format", est.format, "kv or csv"))
        ->check(CLI::IsMember({"kv", "csv"}));

    ConvergenceArgs conv;
    auto* convergence = app.add_subcommand("convergence", "error of A_{mu,k,R,L} against A_hom as R grows");
    add_env(convergence, common);
    add_solver(convergence, common);
    add_threads(convergence, common);
    last(convergence->add_option("--k", conv.ks, "orders, comma separated"));
    last(convergence->add_option("--R", conv.sizes, "ascending sizes, comma separated"));
    last(convergence->add_option("--units", conv.units, "cells (R periodic cells) or sites"));
    last(convergence->add_option("--mu", conv.mu, "rule c*R^e"));
    last(convergence->add_option("--L-fraction", conv.L_fraction, "L = fraction * R"));
    last(convergence->add_option("--filter", conv.filter, "bump or poly<p>"));
    last(convergence->add_option("--floor", conv.floor, "errors below are left out of the fit"));
    last(convergence->add_option("--out", conv.out, "CSV output (default stdout)"));

    VarianceArgs var;
    auto* variance = app.add_subcommand("variance", "Monte Carlo variance of A_{mu,k,L} on i.i.d. environments");
    add_law(variance, common);
    add_env(variance, common);
    add_solver(variance, common);
    add_threads(variance, common);
    last(variance->add_option("--k", var.k, "scheme order"));
    last(variance->add_option("--sizes", var.sizes, "ascending mask half-widths L"));
    last(variance->add_option("--samples", var.samples, "samples per size"));
    last(variance->add_option("--mu", var.mu, "rule c*L^e"));
    last(variance->add_option("--filter", var.filter, "bump or poly<p>"));
    last(variance->add_option("--out", var.out, "per-sample CSV"));
    last(variance->add_option("--summary", var.summary, "per-size CSV (default stdout)"));

    try {
        std::vector<std::string> args = expand_config(argc, argv);
        std::reverse(args.begin(), args.end());
        app.parse(args);

        if (*coeffs) return run_coeffs(coeffs_k, coeffs_format);
        if (*exact) return run_exact(common);
        if (*spectrum) return run_spectrum(common, spec_mu, spec_k, spec_out);
        if (*estimate_cmd) return run_estimate(common, est);
        if (*convergence) return run_convergence(common, conv);
        if (*variance) return run_variance(common, var);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const SolverError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    }
    return kExitUsage;
}
