#include "homog/spectral.hpp"

#include "homog/numerics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace homog {

Eigen::MatrixXd assemble_dense(const Environment& env, double mu) {
    const Geometry& g = env.geometry();
    if (g.topology() != Topology::Torus) throw std::invalid_argument("assemble_dense: torus environment required");
    if (g.size() > kMaxDenseSites) throw std::invalid_argument("assemble_dense: cell exceeds the dense oracle size cap");
    if (mu < 0.0) throw std::invalid_argument("assemble_dense: mu must be nonnegative");
    const auto n = static_cast<Eigen::Index>(g.size());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    // Each edge contributes w*(e_x - e_y)(e_x - e_y)^T; symmetric by construction.
    for (std::size_t site = 0; site < g.size(); ++site) {
        m(site, site) += mu;
        for (int axis = 0; axis < g.dim(); ++axis) {
            const std::size_t nb = g.forward(site, axis);
            const double w = env.forward(site, axis);
            if (nb == site) continue;  // extent 1: self loop carries no energy
            m(site, site) += w;
            m(nb, nb) += w;
            m(site, nb) -= w;
            m(nb, site) -= w;
        }
    }
    return m;
}

double SpectralMeasure::total_weight() const {
    CompensatedSum s;
    for (double w : weights) s += w;
    s += zero_mode_weight;
    return s.value();
}

SpectralMeasure spectral_measure(const Environment& env, const Direction& xi) {
    const Eigen::MatrixXd op = assemble_dense(env, 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(op);
    if (eig.info() != Eigen::Success) throw std::runtime_error("spectral_measure: eigensolver did not converge");

    const LatticeField drift = local_drift(env, xi);
    const auto n = static_cast<Eigen::Index>(env.size());
    Eigen::VectorXd d(n);
    for (Eigen::Index i = 0; i < n; ++i) d(i) = drift[static_cast<std::size_t>(i)];

    const Eigen::VectorXd& lambda = eig.eigenvalues();
    const Eigen::MatrixXd& vecs = eig.eigenvectors();
    const Eigen::VectorXd proj = vecs.transpose() * d;

    SpectralMeasure m;
    const double nd = static_cast<double>(n);
    // Euclidean-orthonormal v_i  ->  psi_i = sqrt(n) v_i, so <d, psi_i> = (v_i . d) / sqrt(n).
    m.zero_mode_weight = proj(0) * proj(0) / nd;
    for (Eigen::Index i = 1; i < n; ++i) {
        m.eigenvalues.push_back(lambda(i));
        m.weights.push_back(proj(i) * proj(i) / nd);
    }
    m.drift_square_mean = d.squaredNorm() / nd;

    const double op_norm = std::max(std::abs(lambda(0)), std::abs(lambda(n - 1)));
    const Eigen::MatrixXd resid = op * vecs - vecs * lambda.asDiagonal();
    m.max_eigen_residual = op_norm > 0.0 ? resid.colwise().norm().maxCoeff() / op_norm : 0.0;

    CompensatedSum energy, asq;
    for (std::size_t site = 0; site < env.size(); ++site) {
        for (int axis = 0; axis < env.dim(); ++axis) {
            const double w = env.forward(site, axis);
            energy += w * xi.xi[axis] * xi.xi[axis];
            asq += w * w;
        }
    }
    m.mean_energy = energy.value() / nd;
    m.mean_a_squared = asq.value() / nd;
    m.alpha = env.bounds().alpha;
    return m;
}

double ahom_spectral(const SpectralMeasure& m) {
    CompensatedSum s;
    for (std::size_t i = 0; i < m.eigenvalues.size(); ++i) s += m.weights[i] / m.eigenvalues[i];
    return m.mean_energy - s.value();
}

double scheme_polynomial(double mu, double lambda, int k) {
    if (k < 1) throw std::invalid_argument("scheme_polynomial: k must be >= 1");
    // coef[m] multiplies lambda^m in prod_{j<k} (lambda + 2^j mu)^2; every coefficient is positive.
    std::vector<double> coef{1.0};
    double shift = mu;
    for (int j = 0; j < k; ++j, shift *= 2.0) {
        for (int rep = 0; rep < 2; ++rep) {
            std::vector<double> next(coef.size() + 1, 0.0);
            for (std::size_t m = 0; m < coef.size(); ++m) {
                next[m] += shift * coef[m];
                next[m + 1] += coef[m];
            }
            coef = std::move(next);
        }
    }
    // Drop the constant 2^{k(k-1)} mu^{2k} and divide by lambda.
    double p = 0.0;
    for (std::size_t m = coef.size() - 1; m >= 1; --m) p = p * lambda + coef[m];
    return p;
}

namespace {

double shifted_product(double mu, double lambda, int k) {
    double prod = 1.0, shift = mu;
    for (int j = 0; j < k; ++j, shift *= 2.0) prod *= (shift + lambda) * (shift + lambda);
    return prod;
}

void require_valid(const SpectralMeasure& m) {
    for (std::size_t i = 0; i < m.eigenvalues.size(); ++i)
        if (!(m.eigenvalues[i] > 0.0) && m.weights[i] > 1e-14 * std::max(1.0, m.drift_square_mean))
            throw std::invalid_argument("spectral measure carries weight on a zero eigenvalue");
}

}  // namespace

double a_mu_k_spectral(const SpectralMeasure& m, double mean_energy, double mu, int k) {
    if (!(mu > 0.0)) throw std::invalid_argument("a_mu_k_spectral: mu must be positive");
    if (k < 1) throw std::invalid_argument("a_mu_k_spectral: k must be >= 1");
    require_valid(m);
    CompensatedSum s;
    for (std::size_t i = 0; i < m.eigenvalues.size(); ++i) {
        if (m.weights[i] == 0.0) continue;
        const double lam = m.eigenvalues[i];
        s += m.weights[i] * scheme_polynomial(mu, lam, k) / shifted_product(mu, lam, k);
    }
    return mean_energy - s.value();
}

double systematic_error(const SpectralMeasure& m, double mu, int k) {
    if (!(mu > 0.0)) throw std::invalid_argument("systematic_error: mu must be positive");
    require_valid(m);
    const double scale = std::ldexp(std::pow(mu, 2 * k), k * (k - 1));
    CompensatedSum s;
    for (std::size_t i = 0; i < m.eigenvalues.size(); ++i) {
        if (m.weights[i] == 0.0) continue;
        const double lam = m.eigenvalues[i];
        s += m.weights[i] * scale / (lam * shifted_product(mu, lam, k));
    }
    return s.value();
}

double systematic_error_bound(const SpectralMeasure& m, double mu, int k) {
    if (m.eigenvalues.empty() || !(m.gap() > 0.0)) throw std::invalid_argument("systematic_error_bound: no spectral gap");
    return std::ldexp(1.0, k * (k - 1)) * m.mean_a_squared / m.alpha * std::pow(mu / m.gap(), 2 * k);
}

double corrector_square_mean(const SpectralMeasure& m, double mu) {
    CompensatedSum s;
    for (std::size_t i = 0; i < m.eigenvalues.size(); ++i) {
        const double t = mu + m.eigenvalues[i];
        s += m.weights[i] / (t * t);
    }
    return s.value();
}

ErrorCurve systematic_error_curve(const Environment& env, const Direction& xi, int k,
                                  const std::vector<double>& mu_grid) {
    if (mu_grid.empty()) throw std::invalid_argument("systematic_error_curve: empty mu grid");
    const SpectralMeasure m = spectral_measure(env, xi);
    ErrorCurve curve;
    std::vector<double> xs, ys;
    for (double mu : mu_grid) {
        const double e = systematic_error(m, mu, k);
        curve.points.emplace_back(mu, e);
        if (e > 0.0) {
            xs.push_back(mu);
            ys.push_back(e);
        }
    }
    if (xs.size() >= 2 && xs.size() == mu_grid.size()) {
        curve.slope = fit_loglog(xs, ys).slope;
        curve.slope_defined = true;
    }
    return curve;
}

double torus_laplacian_gap(const Geometry& geometry) {
    double gap = 0.0;
    bool found = false;
    for (int axis = 0; axis < geometry.dim(); ++axis) {
        const int n = geometry.extent(axis);
        if (n < 2) continue;
        const double v = 2.0 * (1.0 - std::cos(2.0 * std::numbers::pi / n));
        if (!found || v < gap) gap = v;
        found = true;
    }
    return gap;
}

}  // namespace homog
