#pragma once

// Coefficients of the order-k approximations A_{mu,k} and their assembly from
// modified correctors phi_mu, phi_{2mu}, ..., phi_{2^{k-1}mu}:
//
//   xi.A_{mu,k}xi = <<(xi+grad phi_mu).A(xi+grad phi_mu)>>
//                 + mu sum_i eta_{k,i} <<phi_{2^i mu}^2>>
//                 + mu sum_{i<j} nu_{k,i,j} <<phi_{2^i mu} phi_{2^j mu}>>
//
// where <<.>> is a masked average. All coefficient tables are generated in
// exact rational arithmetic.

#include "homog/lattice.hpp"
#include "homog/solver.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace homog {

using Rational = boost::multiprecision::cpp_rational;

inline constexpr int kMaxSchemeOrder = 12;

struct SchemeCoefficients {
    int k = 0;
    std::vector<Rational> c;    // c_1..c_k  (c[m-1] = c_m)
    std::vector<Rational> a;    // a_{k,i},   i = 0..k-1
    std::vector<Rational> eta;  // eta_{k,i}, i = 0..k-1
    std::vector<Rational> nu;   // nu_{k,i,j} stored densely at i*k + j, only i < j used

    const Rational& nu_at(int i, int j) const { return nu.at(static_cast<std::size_t>(i * k + j)); }
};

// Exact tables for 1 <= k <= kMaxSchemeOrder.
SchemeCoefficients coefficients(int k);

std::string format_rational(const Rational& r);
double to_double(const Rational& r);

// Prints the c, a, eta, nu tables (`rational` or `decimal` format).
void print_coefficients(std::ostream& out, const SchemeCoefficients& coeffs, bool rational);

// mu^{k-1} d_{mu,k} = sum_i a_{k,i} phi_{2^i mu}
LatticeField dmuk_set(const CorrectorSet& correctors, const SchemeCoefficients& coeffs);

class Filter {
public:
    enum class Kind { Polynomial, SmoothBump };

    static Filter polynomial(int order);
    static Filter smooth_bump() { return Filter(Kind::SmoothBump, 0); }
    // "bump", "poly<p>" (e.g. poly0, poly2)
    static Filter parse(const std::string& name);

    Kind kind() const noexcept { return kind_; }
    int order() const noexcept { return order_; }
    std::string name() const;

    // Unnormalized profile on (-1, 1), zero outside.
    double profile(double x) const;

private:
    Filter(Kind kind, int order) : kind_(kind), order_(order) {}
    Kind kind_;
    int order_;
};

// mask(x) = prod_i profile(c_i / L) at lattice points with |c_i| < L
// (centered coordinates), normalized so the lattice sum is 1.
LatticeField build_mask(const Filter& filter, double L, const Geometry& geometry);

// Uniform weights 1/#sites over the whole geometry.
LatticeField uniform_mask(const Geometry& geometry);

struct EstimateReport {
    double mu = 0.0;
    int k = 0;
    int R = 0;            // side of the box or torus (first extent)
    double L = 0.0;       // mask half-width; 0 for the uniform full-cell mask
    std::string filter;
    Direction xi;

    double estimate = 0.0;
    double energy_term = 0.0;
    double eta_term = 0.0;
    double nu_term = 0.0;
    double mask_sum = 0.0;
    double max_residual = 0.0;  // max relative solver residual over the k solves
    std::vector<int> iterations;
};

// Assembly from precomputed correctors (first `coeffs.k` levels are used).
EstimateReport assemble_estimate(const Environment& env, const CorrectorSet& correctors,
                                 const SchemeCoefficients& coeffs, const LatticeField& mask);

// Solves the k correctors on `env` and assembles xi.A_{mu,k,R,L}xi with the given mask.
EstimateReport estimate_with_mask(const Environment& env, double mu, int k, const LatticeField& mask,
                                  const Direction& xi, const SolveConfig& config = {});

// As above with build_mask(filter, L, env.geometry()); requires L <= R.
EstimateReport estimate(const Environment& env, double mu, int k, double L, const Filter& filter,
                        const Direction& xi, const SolveConfig& config = {});

void write_report(std::ostream& out, const EstimateReport& report);  // key=value block
std::string report_csv_header();
std::string report_csv_row(const EstimateReport& report);

// Shortest decimal form that reads back to the same double.
std::string format_double(double v);

}  // namespace homog
