#include "homog/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace homog {

int SolveConfig::iteration_cap(std::size_t sites) const {
    if (max_iterations > 0) return max_iterations;
    return static_cast<int>(50.0 * std::sqrt(static_cast<double>(sites))) + 1000;
}

void SolveConfig::validate() const {
    if (!(rel_tolerance > 0.0 && rel_tolerance < 1.0))
        throw std::invalid_argument("solver tolerance must lie in (0, 1)");
    if (max_iterations < 0) throw std::invalid_argument("max_iterations must be >= 1");
}

StencilOperator::StencilOperator(const Environment& env, double mu)
    : degree_(2 * env.dim()), mu_(mu) {
    if (mu < 0.0) throw std::invalid_argument("operator shift mu must be nonnegative");
    const Geometry& g = env.geometry();
    const std::size_t n = g.size();
    diag_.assign(n, mu);
    nbr_.assign(n * static_cast<std::size_t>(degree_), Geometry::npos);
    weight_.assign(n * static_cast<std::size_t>(degree_), 0.0);
    for (std::size_t site = 0; site < n; ++site) {
        double* w = &weight_[site * degree_];
        std::size_t* nb = &nbr_[site * degree_];
        for (int axis = 0; axis < g.dim(); ++axis) {
            w[2 * axis] = env.forward(site, axis);
            nb[2 * axis] = g.forward(site, axis);
            w[2 * axis + 1] = env.backward(site, axis);
            nb[2 * axis + 1] = g.backward(site, axis);
            diag_[site] += w[2 * axis] + w[2 * axis + 1];
        }
    }
}

void StencilOperator::apply(std::span<const double> x, std::span<double> y) const {
    const std::size_t n = diag_.size();
    for (std::size_t site = 0; site < n; ++site) {
        const double* w = &weight_[site * degree_];
        const std::size_t* nb = &nbr_[site * degree_];
        double s = diag_[site] * x[site];
        for (int j = 0; j < degree_; ++j)
            if (nb[j] != Geometry::npos) s -= w[j] * x[nb[j]];
        y[site] = s;
    }
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

void remove_mean(std::span<double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    const double m = s / static_cast<double>(v.size());
    for (double& x : v) x -= m;
}

}  // namespace

CorrectorSolution conjugate_gradient(const StencilOperator& op, const LatticeField& rhs,
                                     const SolveConfig& config, bool project_mean) {
    config.validate();
    const std::size_t n = op.size();
    if (rhs.size() != n) throw GeometryError("conjugate_gradient: right-hand side size mismatch");

    std::vector<double> b(rhs.values().begin(), rhs.values().end());
    if (project_mean) remove_mean(b);

    SolveStats stats;
    stats.rhs_norm = std::sqrt(dot(b, b));
    LatticeField x(rhs.geometry());
    if (stats.rhs_norm == 0.0) {
        stats.restart_residuals.push_back(0.0);
        return {std::move(x), std::move(stats)};
    }

    const double target = config.rel_tolerance * stats.rhs_norm;
    const int cap = config.iteration_cap(n);
    const bool precondition = config.preconditioner == Preconditioner::Diagonal;
    const auto diag = op.diagonal();

    std::vector<double> r(n), z(n), p(n), q(n);
    std::span<double> xs = x.values();

    auto true_residual = [&] {
        op.apply(xs, q);
        for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i];
        if (project_mean) remove_mean(r);
        return std::sqrt(dot(r, r));
    };

    double res = true_residual();
    stats.restart_residuals.push_back(res);
    constexpr int max_cycles = 20;
    for (int cycle = 0; cycle < max_cycles && res > target && stats.iterations < cap; ++cycle) {
        // Aim a little below the target so the recomputed residual lands under it.
        const double inner_target = 0.5 * target;
        for (std::size_t i = 0; i < n; ++i) z[i] = precondition ? r[i] / diag[i] : r[i];
        p = z;
        double rz = dot(r, z);
        double rr = res;
        while (rr > inner_target && stats.iterations < cap) {
            op.apply(p, q);
            const double pq = dot(p, q);
            if (!(pq > 0.0)) break;
            const double step = rz / pq;
            for (std::size_t i = 0; i < n; ++i) {
                xs[i] += step * p[i];
                r[i] -= step * q[i];
            }
            if (project_mean) {
                remove_mean(xs);
                remove_mean(r);
            }
            ++stats.iterations;
            rr = std::sqrt(dot(r, r));
            for (std::size_t i = 0; i < n; ++i) z[i] = precondition ? r[i] / diag[i] : r[i];
            const double rz_next = dot(r, z);
            const double beta = rz_next / rz;
            rz = rz_next;
            for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
        }
        const double next = true_residual();
        stats.restart_residuals.push_back(next);
        if (!(next < res)) {
            res = std::min(res, next);
            break;  // stagnation at working precision
        }
        res = next;
    }
    stats.residual = res;

    if (!x.all_finite())
        throw SolverError("conjugate gradient produced non-finite values", stats);
    if (res > target) {
        throw SolverError("conjugate gradient did not converge: relative residual " +
                              std::to_string(res / stats.rhs_norm) + " after " +
                              std::to_string(stats.iterations) + " iterations",
                          stats);
    }
    return {std::move(x), std::move(stats)};
}

CorrectorSolution solve_modified_corrector(const Environment& env, double mu, const Direction& xi,
                                           const SolveConfig& config) {
    if (!(mu > 0.0)) throw std::invalid_argument("solve_modified_corrector: mu must be positive");
    const StencilOperator op(env, mu);
    return conjugate_gradient(op, local_drift(env, xi), config);
}

double CorrectorSet::max_relative_residual() const {
    double m = 0.0;
    for (const auto& s : stats)
        if (s.rhs_norm > 0.0) m = std::max(m, s.residual / s.rhs_norm);
    return m;
}

CorrectorSet solve_corrector_set(const Environment& env, double mu, int k, const Direction& xi,
                                 const SolveConfig& config) {
    if (!(mu > 0.0)) throw std::invalid_argument("solve_corrector_set: mu must be positive");
    if (k < 1) throw std::invalid_argument("solve_corrector_set: k must be >= 1");
    CorrectorSet set;
    set.mu = mu;
    set.k = k;
    set.xi = xi;
    const LatticeField drift = local_drift(env, xi);
    double level_mu = mu;
    for (int i = 0; i < k; ++i, level_mu *= 2.0) {
        const StencilOperator op(env, level_mu);
        try {
            auto sol = conjugate_gradient(op, drift, config);
            set.fields.push_back(std::move(sol.field));
            set.stats.push_back(std::move(sol.stats));
        } catch (const SolverError& e) {
            throw SolverError("corrector level " + std::to_string(i) + ": " + e.what(), e.stats(), i);
        }
    }
    return set;
}

HomogenizedResult exact_homogenized(const Environment& env, const Direction& xi, const SolveConfig& config) {
    if (env.geometry().topology() != Topology::Torus)
        throw std::invalid_argument("exact_homogenized requires a torus environment");
    const StencilOperator op(env, 0.0);
    auto sol = conjugate_gradient(op, local_drift(env, xi), config, true);
    const LatticeField uniform(env.geometry(), 1.0 / static_cast<double>(env.size()));
    const double value = energy_average(env, xi, sol.field, sol.field, uniform);
    return {value, std::move(sol.field), std::move(sol.stats)};
}

}  // namespace homog
