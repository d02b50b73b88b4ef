#include "qfidyn/spectral.hpp"

#include "qfidyn/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace qfidyn {

double SpectralDecomposition::width() const {
    if (energies.size() == 0) return 0.0;
    return energies(energies.size() - 1) - energies(0);
}

double SpectralDecomposition::scale() const {
    if (energies.size() == 0) return 1.0;
    return std::max(1.0, energies.cwiseAbs().maxCoeff());
}

SpectralDecomposition diagonalize(const HermitianOperator& h, std::optional<double> degeneracy_tol) {
    if (h.dim() == 0) throw DomainError("diagonalize: empty operator");
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h.matrix());
    if (solver.info() != Eigen::Success) {
        throw NumericError("diagonalize: eigensolver did not converge");
    }

    SpectralDecomposition out;
    out.energies = solver.eigenvalues();
    out.vectors = solver.eigenvectors();

    const double norm = out.scale();
    const Matrix r = h.matrix() * out.vectors - out.vectors * out.energies.asDiagonal();
    out.residual = r.cwiseAbs().maxCoeff() / norm;
    if (!(out.residual <= 1e-10)) {
        std::ostringstream msg;
        msg << "diagonalize: eigen residual " << out.residual << " exceeds 1e-10 relative";
        throw NumericError(msg.str());
    }

    out.degeneracy_tol = degeneracy_tol.value_or(1e-9 * norm);
    if (out.degeneracy_tol < 0.0) throw DomainError("diagonalize: negative degeneracy tolerance");

    const Index dim = out.dim();
    out.group_of.assign(static_cast<std::size_t>(dim), 0);
    out.degeneracy_groups.push_back({0});
    for (Index n = 1; n < dim; ++n) {
        if (out.energies(n) - out.energies(n - 1) > out.degeneracy_tol) {
            out.degeneracy_groups.emplace_back();
        }
        out.degeneracy_groups.back().push_back(n);
        out.group_of[static_cast<std::size_t>(n)] =
            static_cast<Index>(out.degeneracy_groups.size() - 1);
    }
    return out;
}

// --------------------------------------------------------------------------

ThermalEnsemble::ThermalEnsemble(std::shared_ptr<const SpectralDecomposition> spectral, double beta,
                                 Eigen::VectorXd weights)
    : spectral_(std::move(spectral)), beta_(beta), weights_(std::move(weights)) {
    if (!spectral_) throw DomainError("thermal ensemble needs a spectral decomposition");
    if (weights_.size() != spectral_->dim()) {
        throw DomainError("thermal ensemble: weight count does not match dimension");
    }
    if (std::isnan(beta_) || beta_ < 0.0) {
        throw DomainError("inverse temperature must be >= 0");
    }
    if (weights_.size() > 0 && weights_.minCoeff() < 0.0) {
        throw DomainError("thermal ensemble: negative weight");
    }
    if (std::abs(weights_.sum() - 1.0) > 1e-12) {
        throw DomainError("thermal ensemble: weights do not sum to 1");
    }
}

double ThermalEnsemble::temperature() const {
    if (is_ground_state()) return 0.0;
    if (beta_ == 0.0) return std::numeric_limits<double>::infinity();
    return 1.0 / beta_;
}

Matrix ThermalEnsemble::density_matrix() const {
    const Matrix& v = spectral_->vectors;
    return v * weights_.cast<Complex>().asDiagonal() * v.adjoint();
}

double ThermalEnsemble::half_phase(double omega) const {
    if (is_ground_state()) {
        if (omega == 0.0) return 0.0;
        return omega > 0.0 ? kInfiniteBeta : -kInfiniteBeta;
    }
    return 0.5 * beta_ * omega;
}

double ThermalEnsemble::pair_half_phase(Index m, Index n) const {
    const auto& s = *spectral_;
    const double omega = s.energies(m) - s.energies(n);
    if (is_ground_state()) {
        if (s.group_of[static_cast<std::size_t>(m)] == s.group_of[static_cast<std::size_t>(n)]) {
            return 0.0;
        }
        return omega > 0.0 ? kInfiniteBeta : -kInfiniteBeta;
    }
    return 0.5 * beta_ * omega;
}

ThermalEnsemble gibbs_weights(std::shared_ptr<const SpectralDecomposition> spectral, double beta) {
    if (!spectral) throw DomainError("gibbs_weights: null spectral decomposition");
    if (std::isnan(beta) || beta < 0.0) {
        throw DomainError("gibbs_weights: inverse temperature must be >= 0");
    }
    const Index dim = spectral->dim();
    Eigen::VectorXd p = Eigen::VectorXd::Zero(dim);
    if (beta == kInfiniteBeta) {
        const auto& ground = spectral->degeneracy_groups.front();
        for (Index n : ground) p(n) = 1.0 / static_cast<double>(ground.size());
    } else {
        const double e0 = spectral->energies(0);
        for (Index n = 0; n < dim; ++n) p(n) = std::exp(-beta * (spectral->energies(n) - e0));
        p /= p.sum();
    }
    return ThermalEnsemble(std::move(spectral), beta, std::move(p));
}

Operator to_eigenbasis(const Operator& o, const SpectralDecomposition& spectral) {
    if (o.dim() != spectral.dim()) throw DomainError("to_eigenbasis: dimension mismatch");
    return Operator(spectral.vectors.adjoint() * o.matrix() * spectral.vectors);
}

Operator from_eigenbasis(const Operator& o_eig, const SpectralDecomposition& spectral) {
    if (o_eig.dim() != spectral.dim()) throw DomainError("from_eigenbasis: dimension mismatch");
    return Operator(spectral.vectors * o_eig.matrix() * spectral.vectors.adjoint());
}

Complex thermal_expectation(const Operator& o, const ThermalEnsemble& ensemble) {
    if (o.dim() != ensemble.dim()) throw DomainError("thermal_expectation: dimension mismatch");
    const Matrix& v = ensemble.spectral().vectors;
    const Matrix ov = o.matrix() * v;
    Complex sum{0.0, 0.0};
    for (Index n = 0; n < ensemble.dim(); ++n) {
        if (ensemble.weight(n) == 0.0) continue;
        sum += ensemble.weight(n) * v.col(n).dot(ov.col(n));
    }
    return sum;
}

double thermal_expectation(const HermitianOperator& o, const ThermalEnsemble& ensemble) {
    return thermal_expectation(static_cast<const Operator&>(o), ensemble).real();
}

// --------------------------------------------------------------------------

double default_frequency_tol(const SpectralDecomposition& spectral) {
    return 1e-8 * std::max(1.0, spectral.width());
}

std::vector<BohrCluster> cluster_bohr_frequencies(const SpectralDecomposition& spectral,
                                                  double tau_omega) {
    if (!(tau_omega >= 0.0)) throw DomainError("frequency tolerance must be >= 0");
    const Index dim = spectral.dim();
    const auto& e = spectral.energies;

    struct Entry {
        double omega;
        EigenPair pair;
    };
    std::vector<Entry> all;
    all.reserve(static_cast<std::size_t>(dim * dim));
    for (Index m = 0; m < dim; ++m) {
        for (Index n = 0; n < dim; ++n) all.push_back({e(m) - e(n), {m, n}});
    }
    std::sort(all.begin(), all.end(), [](const Entry& a, const Entry& b) {
        if (a.omega != b.omega) return a.omega < b.omega;
        if (a.pair.m != b.pair.m) return a.pair.m < b.pair.m;
        return a.pair.n < b.pair.n;
    });

    std::vector<BohrCluster> clusters;
    double sum = 0.0;
    bool has_diagonal = false;
    auto close_cluster = [&]() {
        auto& c = clusters.back();
        c.omega = has_diagonal ? 0.0 : sum / static_cast<double>(c.pairs.size());
    };
    for (std::size_t i = 0; i < all.size(); ++i) {
        if (i == 0 || all[i].omega - all[i - 1].omega > tau_omega) {
            if (i != 0) close_cluster();
            clusters.emplace_back();
            sum = 0.0;
            has_diagonal = false;
        }
        clusters.back().pairs.push_back(all[i].pair);
        sum += all[i].omega;
        has_diagonal = has_diagonal || all[i].pair.m == all[i].pair.n;
    }
    if (!clusters.empty()) close_cluster();
    return clusters;
}

}  // namespace qfidyn
