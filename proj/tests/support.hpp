#pragma once

#include "homog/lattice.hpp"
#include "homog/solver.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <vector>

namespace testing {

using namespace homog;

// Torus or box with i.i.d. Uniform(alpha, beta) conductances.
inline Environment random_env(std::vector<int> extents, std::uint64_t seed, double alpha = 1.0, double beta = 10.0,
                              Topology topo = Topology::Torus) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(alpha, beta);
    const Geometry g(extents, topo);
    std::vector<double> fwd(g.size() * static_cast<std::size_t>(g.dim()));
    for (double& w : fwd) w = u(rng);
    std::vector<double> inflow;
    if (topo == Topology::Box) {
        inflow.resize(fwd.size());
        for (double& w : inflow) w = u(rng);
    }
    return Environment(g, std::move(fwd), {alpha, beta}, std::move(inflow));
}

inline LatticeField random_field(const Geometry& g, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, 1.0);
    LatticeField f(g);
    for (std::size_t s = 0; s < g.size(); ++s) f[s] = n(rng);
    return f;
}

// Column-by-column matrix of u -> apply_operator(env, mu, u).
inline Eigen::MatrixXd operator_matrix(const Environment& env, double mu) {
    const auto n = static_cast<Eigen::Index>(env.size());
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        LatticeField e(env.geometry());
        e[static_cast<std::size_t>(j)] = 1.0;
        const LatticeField col = apply_operator(env, mu, e);
        for (Eigen::Index i = 0; i < n; ++i) m(i, j) = col[static_cast<std::size_t>(i)];
    }
    return m;
}

inline Eigen::VectorXd to_eigen(const LatticeField& f) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(f.size()));
    for (std::size_t i = 0; i < f.size(); ++i) v(static_cast<Eigen::Index>(i)) = f[i];
    return v;
}

inline LatticeField from_eigen(const Geometry& g, const Eigen::VectorXd& v) {
    LatticeField f(g);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = v(static_cast<Eigen::Index>(i));
    return f;
}

// Dense direct solve of (mu + L) phi = d.
inline LatticeField dense_corrector(const Environment& env, double mu, const Direction& xi) {
    const Eigen::MatrixXd m = operator_matrix(env, mu);
    const Eigen::VectorXd d = to_eigen(local_drift(env, xi));
    return from_eigen(env.geometry(), m.ldlt().solve(d));
}

// Dense periodic corrector: L phi = d on mean-zero fields, via L + 11^T/n.
inline LatticeField dense_periodic_corrector(const Environment& env, const Direction& xi) {
    Eigen::MatrixXd m = operator_matrix(env, 0.0);
    const double n = static_cast<double>(env.size());
    m.array() += 1.0 / n;
    const Eigen::VectorXd d = to_eigen(local_drift(env, xi));
    return from_eigen(env.geometry(), m.llt().solve(d));
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace testing
