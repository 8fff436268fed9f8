#include "homog/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace homog {

std::string to_string(SizeUnit u) { return u == SizeUnit::Cells ? "cells" : "sites"; }

SizeUnit parse_size_unit(const std::string& s) {
    if (s == "cells") return SizeUnit::Cells;
    if (s == "sites") return SizeUnit::Sites;
    throw std::invalid_argument("unknown size unit '" + s + "' (expected cells or sites)");
}

void ConvergenceConfig::validate() const {
    if (ks.empty()) throw std::invalid_argument("convergence: no orders k given");
    for (int k : ks)
        if (k < 1 || k > kMaxSchemeOrder) throw std::invalid_argument("convergence: k out of range");
    if (sizes.empty()) throw std::invalid_argument("convergence: no sizes given");
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        if (sizes[i] < 1) throw std::invalid_argument("convergence: sizes must be positive");
        if (i > 0 && sizes[i] <= sizes[i - 1]) throw std::invalid_argument("convergence: sizes must be ascending");
    }
    if (!(L_fraction > 0.0 && L_fraction <= 1.0)) throw std::invalid_argument("convergence: L fraction must lie in (0, 1]");
    if (!(floor >= 0.0)) throw std::invalid_argument("convergence: floor must be nonnegative");
    solve.validate();
}

const ConvergenceSlope& ConvergenceResult::slope_for(int k) const {
    for (const auto& s : slopes)
        if (s.k == k) return s;
    throw std::out_of_range("no slope for k = " + std::to_string(k));
}

ConvergenceSlope fit_convergence(int k, const std::vector<int>& sizes, const std::vector<double>& errors,
                                 double floor) {
    ConvergenceSlope out;
    out.k = k;
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < sizes.size() && i < errors.size(); ++i) {
        if (!(errors[i] >= floor) || !(errors[i] > 0.0)) break;
        xs.push_back(sizes[i]);
        ys.push_back(errors[i]);
    }
    out.points = xs.size();
    if (xs.size() >= 2) {
        const LinearFit fit = fit_loglog(xs, ys);
        out.defined = true;
        out.slope = fit.slope;
        out.slope_stderr = fit.slope_stderr;
    }
    return out;
}

ConvergenceResult convergence_study(const Environment& cell, const ConvergenceConfig& config) {
    config.validate();
    const Geometry& g = cell.geometry();
    if (g.topology() != Topology::Torus)
        throw std::invalid_argument("convergence requires a periodic (torus) environment");
    const int n = g.extent(0);
    for (int axis = 1; axis < g.dim(); ++axis)
        if (g.extent(axis) != n) throw std::invalid_argument("convergence requires a cubic periodic cell");
    require_unit_direction(config.xi, g.dim());

    ConvergenceResult result;
    result.ahom = exact_homogenized(cell, config.xi, config.solve).value;

    const int kmax = *std::max_element(config.ks.begin(), config.ks.end());
    const int scale = config.unit == SizeUnit::Cells ? n : 1;
    std::vector<std::vector<ConvergenceRow>> per_size(config.sizes.size());

    // Masks first: a size that cannot host its mask fails before any solve.
    std::vector<LatticeField> masks;
    for (int R : config.sizes) {
        const double mu = config.mu_rule(R);
        if (!(mu > 0.0) || !std::isfinite(mu)) throw std::invalid_argument("convergence: mu rule must give positive values");
        masks.push_back(build_mask(config.filter, config.L_fraction * R * scale,
                                   Geometry::centered_box(g.dim(), R * scale)));
    }

    parallel_for(config.sizes.size(), config.threads, [&](std::size_t idx) {
        const int R = config.sizes[idx];
        const Environment box = cell.restrict_to_box(R * scale);
        const double mu = config.mu_rule(R);
        const double L = config.L_fraction * R * scale;
        const LatticeField& mask = masks[idx];
        const CorrectorSet set = solve_corrector_set(box, mu, kmax, config.xi, config.solve);
        for (int k : config.ks) {
            const EstimateReport rep = assemble_estimate(box, set, coefficients(k), mask);
            ConvergenceRow row;
            row.k = k;
            row.R = R;
            row.side = box.geometry().extent(0);
            row.mu = mu;
            row.L = L;
            row.estimate = rep.estimate;
            row.error = std::abs(rep.estimate - result.ahom);
            row.max_residual = rep.max_residual;
            per_size[idx].push_back(row);
        }
    });

    for (auto& rows : per_size)
        for (auto& r : rows) result.rows.push_back(r);
    for (int k : config.ks) {
        std::vector<double> errors;
        for (const auto& r : result.rows)
            if (r.k == k) errors.push_back(r.error);
        result.slopes.push_back(fit_convergence(k, config.sizes, errors, config.floor));
    }
    return result;
}

void write_convergence_csv(std::ostream& out, const ConvergenceResult& result, const ConvergenceConfig& config,
                           const std::string& env_source) {
    auto join = [](const std::vector<int>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
        return s;
    };
    out << "# subcommand=convergence\n"
        << "# env=" << env_source << '\n'
        << "# k=" << join(config.ks) << '\n'
        << "# R=" << join(config.sizes) << '\n'
        << "# units=" << to_string(config.unit) << '\n'
        << "# mu=" << config.mu_rule.to_string() << '\n'
        << "# L_fraction=" << format_double(config.L_fraction) << '\n'
        << "# filter=" << config.filter.name() << '\n'
        << "# xi=" << config.xi.to_string() << '\n'
        << "# floor=" << format_double(config.floor) << '\n'
        << "# tol=" << format_double(config.solve.rel_tolerance) << '\n';
    out << "k,R,side,mu,L,estimate,ahom,error,max_residual\n";
    for (const auto& r : result.rows) {
        out << r.k << ',' << r.R << ',' << r.side << ',' << format_double(r.mu) << ',' << format_double(r.L) << ','
            << format_double(r.estimate) << ',' << format_double(result.ahom) << ',' << format_double(r.error) << ','
            << format_double(r.max_residual) << '\n';
    }
}

}  // namespace homog
