#pragma once

// Dense oracle on small periodic cells. L is assembled explicitly, fully
// diagonalized, and the local drift is projected on its eigenbasis, giving
// the discrete spectral measure e_d = sum_i w_i delta_{lambda_i}. Every
// quantity of the approximation scheme is then a finite sum over (lambda_i, w_i).

#include "homog/lattice.hpp"

#include <Eigen/Dense>

#include <utility>
#include <vector>

namespace homog {

inline constexpr std::size_t kMaxDenseSites = 4096;

// mu + L in the canonical site basis (torus only, at most kMaxDenseSites sites).
Eigen::MatrixXd assemble_dense(const Environment& env, double mu);

struct SpectralMeasure {
    // Nonzero part of the spectrum, ascending; weights w_i = <d, psi_i>^2 for
    // eigenvectors psi_i orthonormal in the site-average inner product.
    std::vector<double> eigenvalues;
    std::vector<double> weights;
    double zero_mode_weight = 0.0;

    double drift_square_mean = 0.0;   // <d^2>
    double mean_energy = 0.0;         // <xi.A xi>
    double mean_a_squared = 0.0;      // <|A|^2>, Frobenius norm of the diagonal A
    double alpha = 0.0;               // lower conductance bound of the cell
    double max_eigen_residual = 0.0;  // max_i ||L psi_i - lambda_i psi_i|| / ||L||

    double gap() const { return eigenvalues.empty() ? 0.0 : eigenvalues.front(); }
    double total_weight() const;
};

SpectralMeasure spectral_measure(const Environment& env, const Direction& xi);

// xi.A_hom xi = <xi.A xi> - sum_i w_i / lambda_i
double ahom_spectral(const SpectralMeasure& m);

// <xi.A xi> - sum_i w_i P_k(mu,lambda_i) / prod_{j<k} (2^j mu + lambda_i)^2
double a_mu_k_spectral(const SpectralMeasure& m, double mean_energy, double mu, int k);

// P_k(mu, lambda) from the positive coefficients of prod_j (lambda + 2^j mu)^2.
double scheme_polynomial(double mu, double lambda, int k);

// xi.(A_{mu,k} - A_hom)xi = sum_i w_i 2^{k(k-1)} mu^{2k} / (lambda_i prod_j (2^j mu + lambda_i)^2),
// evaluated directly (no cancellation).
double systematic_error(const SpectralMeasure& m, double mu, int k);

// 2^{k(k-1)} <|A|^2> / alpha * (mu / lambda_1)^{2k}: the a-priori bound with
// the measured spectral gap of the cell.
double systematic_error_bound(const SpectralMeasure& m, double mu, int k);

// <phi_mu^2> = sum_i w_i / (mu + lambda_i)^2
double corrector_square_mean(const SpectralMeasure& m, double mu);

struct ErrorCurve {
    std::vector<std::pair<double, double>> points;  // (mu, error)
    double slope = 0.0;                             // log-log least squares
    bool slope_defined = false;
};

ErrorCurve systematic_error_curve(const Environment& env, const Direction& xi, int k,
                                  const std::vector<double>& mu_grid);

// Spectral gap of the plain graph Laplacian on the torus of the given extents.
double torus_laplacian_gap(const Geometry& geometry);

}  // namespace homog
