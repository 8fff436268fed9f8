#pragma once

// Conjugate-gradient solvers for the modified corrector equation
// (mu + L) phi = d on boxes and tori, and for the periodic corrector at mu = 0.

#include "homog/lattice.hpp"

#include <stdexcept>
#include <vector>

namespace homog {

enum class Preconditioner { None, Diagonal };

struct SolveConfig {
    double rel_tolerance = 1e-12;
    int max_iterations = 0;  // 0: 50*sqrt(#sites) + 1000
    Preconditioner preconditioner = Preconditioner::Diagonal;

    int iteration_cap(std::size_t sites) const;
    void validate() const;
};

struct SolveStats {
    int iterations = 0;
    double residual = 0.0;      // ||b - A x||_2, recomputed from scratch
    double rhs_norm = 0.0;      // ||b||_2
    // True residual at the start of each CG cycle and at the end.
    std::vector<double> restart_residuals;
};

class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, SolveStats stats, int level = -1)
        : std::runtime_error(what), stats_(std::move(stats)), level_(level) {}
    const SolveStats& stats() const noexcept { return stats_; }
    // Index i of the failing regularization 2^i mu in a corrector set, or -1.
    int level() const noexcept { return level_; }

private:
    SolveStats stats_;
    int level_;
};

struct CorrectorSolution {
    LatticeField field;
    SolveStats stats;
};

// Sparse 2d+1 point representation of mu + L with precomputed neighbors.
class StencilOperator {
public:
    StencilOperator(const Environment& env, double mu);

    std::size_t size() const noexcept { return diag_.size(); }
    double mu() const noexcept { return mu_; }
    std::span<const double> diagonal() const noexcept { return diag_; }
    void apply(std::span<const double> x, std::span<double> y) const;

private:
    int degree_;
    double mu_;
    std::vector<double> diag_;
    std::vector<std::size_t> nbr_;  // npos for pinned (outside) neighbors
    std::vector<double> weight_;
};

// Solves (mu + L) phi = rhs. When `project_mean` is set (torus, mu = 0) the
// right-hand side and every iterate are kept in the mean-zero subspace.
CorrectorSolution conjugate_gradient(const StencilOperator& op, const LatticeField& rhs,
                                     const SolveConfig& config, bool project_mean = false);

// phi_mu: (mu + L) phi = div*(A xi), Dirichlet on boxes, periodic on tori.
CorrectorSolution solve_modified_corrector(const Environment& env, double mu, const Direction& xi,
                                           const SolveConfig& config = {});

struct CorrectorSet {
    double mu = 0.0;
    int k = 0;
    Direction xi;
    std::vector<LatticeField> fields;  // fields[i] = phi_{2^i mu}
    std::vector<SolveStats> stats;

    double max_relative_residual() const;
};

CorrectorSet solve_corrector_set(const Environment& env, double mu, int k, const Direction& xi,
                                 const SolveConfig& config = {});

struct HomogenizedResult {
    double value = 0.0;  // xi . A_hom xi
    LatticeField corrector;
    SolveStats stats;
};

// Periodic cell problem: L phi = d on mean-zero fields, value = <(xi+grad phi).A(xi+grad phi)>.
HomogenizedResult exact_homogenized(const Environment& env, const Direction& xi,
                                    const SolveConfig& config = {});

}  // namespace homog
