#pragma once

// Convergence study of A_{mu,k,R,L} towards A_hom for a periodic environment:
// the cell is tiled over a centered Dirichlet box Q_R, the estimator is
// evaluated with mu = rule(R) and L = fraction * R, and the absolute error
// against the exact cell value is fitted in log-log scale per order k.

#include "homog/lattice.hpp"
#include "homog/numerics.hpp"
#include "homog/scheme.hpp"
#include "homog/solver.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace homog {

enum class SizeUnit { Cells, Sites };

std::string to_string(SizeUnit u);
SizeUnit parse_size_unit(const std::string& s);

struct ConvergenceConfig {
    std::vector<int> ks{1, 2};
    std::vector<int> sizes{24, 36, 54, 81, 122, 183};  // R, ascending
    // Cells: R counts periodic cells (box side = R * cell side).
    // Sites: R is the box side in lattice sites.
    SizeUnit unit = SizeUnit::Cells;
    PowerLaw mu_rule{250.0, -1.5, 'R'};
    double L_fraction = 1.0 / 3.0;  // mask half-width L = fraction * R
    Filter filter = Filter::smooth_bump();
    Direction xi = Direction::unit(2, 0);
    double floor = 1e-11;  // errors below this are excluded from the fit
    SolveConfig solve;
    int threads = 1;

    void validate() const;
};

struct ConvergenceRow {
    int k = 0;
    int R = 0;
    int side = 0;      // box side in sites
    double mu = 0.0;   // lattice units
    double L = 0.0;    // mask half-width in sites
    double estimate = 0.0;
    double error = 0.0;  // |estimate - A_hom|
    double max_residual = 0.0;
};

struct ConvergenceSlope {
    int k = 0;
    bool defined = false;
    double slope = 0.0;
    double slope_stderr = 0.0;
    std::size_t points = 0;  // leading sizes whose error is at or above the floor
};

struct ConvergenceResult {
    double ahom = 0.0;
    std::vector<ConvergenceRow> rows;  // ordered by R, then k
    std::vector<ConvergenceSlope> slopes;

    const ConvergenceSlope& slope_for(int k) const;
};

// `cell` must be a torus whose extents are all equal.
ConvergenceResult convergence_study(const Environment& cell, const ConvergenceConfig& config);

// Fit over the leading run of (R, error) pairs with error >= floor.
ConvergenceSlope fit_convergence(int k, const std::vector<int>& sizes, const std::vector<double>& errors,
                                 double floor);

void write_convergence_csv(std::ostream& out, const ConvergenceResult& result, const ConvergenceConfig& config,
                           const std::string& env_source);

}  // namespace homog
