#include "homog/scheme.hpp"

#include "homog/numerics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace homog {

namespace {

using boost::multiprecision::cpp_int;

Rational pow2(int e) {
    if (e >= 0) return Rational(cpp_int(1) << e);
    return Rational(cpp_int(1), cpp_int(1) << (-e));
}

}  // namespace

SchemeCoefficients coefficients(int k) {
    if (k < 1) throw std::invalid_argument("scheme order k must be >= 1");
    if (k > kMaxSchemeOrder)
        throw std::invalid_argument("scheme order k must be <= " + std::to_string(kMaxSchemeOrder));

    // Order 1: a_{1,0} = 1, eta_{1,0} = 0, c_1 = 1, no nu.
    std::vector<Rational> c{Rational(1)};
    std::vector<Rational> a{Rational(1)};
    std::vector<Rational> eta{Rational(0)};
    std::vector<std::vector<Rational>> nu(1, std::vector<Rational>(1, Rational(0)));

    for (int m = 1; m < k; ++m) {
        // m -> m+1
        const Rational& cm = c[m - 1];
        const Rational shift = pow2(1 - m);
        std::vector<Rational> a_next(static_cast<std::size_t>(m + 1));
        a_next[0] = cm * a[0];
        for (int i = 1; i < m; ++i) a_next[i] = cm * a[i] - shift * cm * a[i - 1];
        a_next[m] = -shift * cm * a[m - 1];

        const int mm = m * (m - 1);
        const int m2 = m * m;
        std::vector<Rational> eta_next(static_cast<std::size_t>(m + 1));
        for (int i = 0; i < m; ++i) eta_next[i] = eta[i] + (pow2(mm + i) - pow2(m2 + 1)) * a_next[i] * a_next[i];
        eta_next[m] = -pow2(m2) * a_next[m] * a_next[m];

        std::vector<std::vector<Rational>> nu_next(static_cast<std::size_t>(m + 1),
                                                   std::vector<Rational>(static_cast<std::size_t>(m + 1)));
        for (int j = 1; j < m; ++j)
            for (int i = 0; i < j; ++i)
                nu_next[i][j] = nu[i][j] + (pow2(mm) * (pow2(i) + pow2(j)) - pow2(m2 + 2)) * a_next[i] * a_next[j];
        for (int i = 0; i < m; ++i) nu_next[i][m] = (pow2(mm + i) - 3 * pow2(m2)) * a_next[i] * a_next[m];

        c.push_back(Rational(1) / (Rational(2) / cm + 1));
        a = std::move(a_next);
        eta = std::move(eta_next);
        nu = std::move(nu_next);
    }

    SchemeCoefficients out;
    out.k = k;
    out.c = std::move(c);
    out.a = std::move(a);
    out.eta = std::move(eta);
    out.nu.assign(static_cast<std::size_t>(k * k), Rational(0));
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) out.nu[static_cast<std::size_t>(i * k + j)] = nu[i][j];
    return out;
}

std::string format_rational(const Rational& r) {
    const auto num = boost::multiprecision::numerator(r);
    const auto den = boost::multiprecision::denominator(r);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

std::string format_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void print_coefficients(std::ostream& out, const SchemeCoefficients& coeffs, bool rational) {
    auto fmt = [rational](const Rational& r) { return rational ? format_rational(r) : format_double(to_double(r)); };
    out << "k = " << coeffs.k << '\n';
    for (int m = 1; m <= coeffs.k; ++m) out << "c[" << m << "] = " << fmt(coeffs.c[m - 1]) << '\n';
    for (int i = 0; i < coeffs.k; ++i) out << "a[" << i << "] = " << fmt(coeffs.a[i]) << '\n';
    for (int i = 0; i < coeffs.k; ++i) out << "eta[" << i << "] = " << fmt(coeffs.eta[i]) << '\n';
    for (int i = 0; i < coeffs.k; ++i)
        for (int j = i + 1; j < coeffs.k; ++j)
            out << "nu[" << i << "][" << j << "] = " << fmt(coeffs.nu_at(i, j)) << '\n';
}

LatticeField dmuk_set(const CorrectorSet& correctors, const SchemeCoefficients& coeffs) {
    if (correctors.k != coeffs.k || static_cast<int>(correctors.fields.size()) != coeffs.k)
        throw std::invalid_argument("dmuk_set: corrector set and coefficient orders differ");
    LatticeField out(correctors.fields.front().geometry());
    for (int i = 0; i < coeffs.k; ++i) {
        const double ai = to_double(coeffs.a[i]);
        const LatticeField& phi = correctors.fields[i];
        for (std::size_t s = 0; s < out.size(); ++s) out[s] += ai * phi[s];
    }
    return out;
}

// ---------------------------------------------------------------------------
// Filters and masks
// ---------------------------------------------------------------------------

Filter Filter::polynomial(int order) {
    if (order < 0) throw std::invalid_argument("polynomial filter order must be >= 0");
    return Filter(Kind::Polynomial, order);
}

Filter Filter::parse(const std::string& name) {
    if (name == "bump") return smooth_bump();
    if (name.rfind("poly", 0) == 0 && name.size() > 4) {
        std::size_t used = 0;
        const int p = std::stoi(name.substr(4), &used);
        if (used == name.size() - 4) return polynomial(p);
    }
    throw std::invalid_argument("unknown filter '" + name + "' (expected bump or poly<p>)");
}

std::string Filter::name() const {
    return kind_ == Kind::SmoothBump ? "bump" : "poly" + std::to_string(order_);
}

double Filter::profile(double x) const {
    const double ax = std::abs(x);
    if (!(ax < 1.0)) return 0.0;
    const double t = (1.0 - ax) * (1.0 + ax);
    if (kind_ == Kind::SmoothBump) return std::exp(-1.0 / t);
    return std::pow(t, order_);
}

LatticeField build_mask(const Filter& filter, double L, const Geometry& geometry) {
    if (!(L > 0.0)) throw std::invalid_argument("mask half-width L must be positive");
    // Largest |c| with |c| < L.
    const int reach = static_cast<int>(std::ceil(L)) - 1;
    for (int axis = 0; axis < geometry.dim(); ++axis) {
        const int n = geometry.extent(axis);
        const int lo = n / 2, hi = n - 1 - n / 2;
        if (reach > std::min(lo, hi))
            throw std::invalid_argument("mask half-width L is too large for the geometry");
    }
    LatticeField mask(geometry);
    CompensatedSum total;
    for (std::size_t site = 0; site < geometry.size(); ++site) {
        double w = 1.0;
        for (int axis = 0; axis < geometry.dim() && w != 0.0; ++axis) {
            const int c = geometry.centered_coordinate(site, axis);
            w *= filter.profile(static_cast<double>(std::abs(c)) / L);
        }
        mask[site] = w;
        total += w;
    }
    const double sum = total.value();
    if (!(sum > 0.0)) throw std::invalid_argument("mask has empty support");
    for (std::size_t site = 0; site < geometry.size(); ++site) mask[site] /= sum;
    return mask;
}

LatticeField uniform_mask(const Geometry& geometry) {
    return LatticeField(geometry, 1.0 / static_cast<double>(geometry.size()));
}

// ---------------------------------------------------------------------------
// Estimator
// ---------------------------------------------------------------------------

EstimateReport assemble_estimate(const Environment& env, const CorrectorSet& correctors,
                                 const SchemeCoefficients& coeffs, const LatticeField& mask) {
    const int k = coeffs.k;
    if (static_cast<int>(correctors.fields.size()) < k)
        throw std::invalid_argument("assemble_estimate: not enough corrector levels");
    require_same_geometry(env.geometry(), mask.geometry(), "assemble_estimate");
    require_normalized_mask(mask);

    EstimateReport rep;
    rep.mu = correctors.mu;
    rep.k = k;
    rep.R = env.geometry().extent(0);
    rep.xi = correctors.xi;
    CompensatedSum ms;
    for (double m : mask.values()) ms += m;
    rep.mask_sum = ms.value();

    const auto& phi = correctors.fields;
    rep.energy_term = energy_average(env, correctors.xi, phi[0], phi[0], mask);
    CompensatedSum eta_sum, nu_sum;
    for (int i = 0; i < k; ++i) {
        const double eta = to_double(coeffs.eta[i]);
        if (eta != 0.0) eta_sum += eta * product_average(phi[i], phi[i], mask);
        for (int j = i + 1; j < k; ++j)
            nu_sum += to_double(coeffs.nu_at(i, j)) * product_average(phi[i], phi[j], mask);
    }
    rep.eta_term = correctors.mu * eta_sum.value();
    rep.nu_term = correctors.mu * nu_sum.value();
    rep.estimate = rep.energy_term + rep.eta_term + rep.nu_term;
    for (int i = 0; i < k; ++i) {
        const SolveStats& s = correctors.stats[i];
        if (s.rhs_norm > 0.0) rep.max_residual = std::max(rep.max_residual, s.residual / s.rhs_norm);
        rep.iterations.push_back(s.iterations);
    }
    return rep;
}

EstimateReport estimate_with_mask(const Environment& env, double mu, int k, const LatticeField& mask,
                                  const Direction& xi, const SolveConfig& config) {
    if (!(mu > 0.0)) throw std::invalid_argument("estimate: mu must be positive");
    require_unit_direction(xi, env.dim());
    const SchemeCoefficients coeffs = coefficients(k);
    const CorrectorSet set = solve_corrector_set(env, mu, k, xi, config);
    EstimateReport rep = assemble_estimate(env, set, coeffs, mask);
    rep.filter = "uniform";
    return rep;
}

EstimateReport estimate(const Environment& env, double mu, int k, double L, const Filter& filter,
                        const Direction& xi, const SolveConfig& config) {
    const int R = env.geometry().extent(0);
    if (!(L > 0.0)) throw std::invalid_argument("estimate: L must be positive");
    if (L > R) throw std::invalid_argument("estimate: L must not exceed R");
    const LatticeField mask = build_mask(filter, L, env.geometry());
    EstimateReport rep = estimate_with_mask(env, mu, k, mask, xi, config);
    rep.L = L;
    rep.filter = filter.name();
    return rep;
}

void write_report(std::ostream& out, const EstimateReport& r) {
    out << "mu=" << format_double(r.mu) << '\n'
        << "k=" << r.k << '\n'
        << "R=" << r.R << '\n'
        << "L=" << format_double(r.L) << '\n'
        << "filter=" << r.filter << '\n'
        << "xi=" << r.xi.to_string() << '\n'
        << "estimate=" << format_double(r.estimate) << '\n'
        << "energy_term=" << format_double(r.energy_term) << '\n'
        << "eta_term=" << format_double(r.eta_term) << '\n'
        << "nu_term=" << format_double(r.nu_term) << '\n'
        << "mask_sum=" << format_double(r.mask_sum) << '\n'
        << "max_residual=" << format_double(r.max_residual) << '\n';
    out << "iterations=";
    for (std::size_t i = 0; i < r.iterations.size(); ++i) out << (i ? ";" : "") << r.iterations[i];
    out << '\n';
}

std::string report_csv_header() {
    return "mu,k,R,L,filter,xi,estimate,energy_term,eta_term,nu_term,max_residual";
}

std::string report_csv_row(const EstimateReport& r) {
    std::ostringstream os;
    os << format_double(r.mu) << ',' << r.k << ',' << r.R << ',' << format_double(r.L) << ',' << r.filter << ','
       << r.xi.to_string() << ',' << format_double(r.estimate) << ',' << format_double(r.energy_term) << ','
       << format_double(r.eta_term) << ',' << format_double(r.nu_term) << ',' << format_double(r.max_residual);
    return os.str();
}

}  // namespace homog
