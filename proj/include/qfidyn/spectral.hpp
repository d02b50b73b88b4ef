#pragma once

// Hermitian eigendecomposition, Gibbs ensembles and Bohr-frequency clustering.

#include "qfidyn/operators.hpp"

#include <Eigen/Dense>

#include <limits>
#include <memory>
#include <optional>
#include <vector>

namespace qfidyn {

inline constexpr double kInfiniteBeta = std::numeric_limits<double>::infinity();

// Pairs with p_n + p_m below this floor are skipped in spectral double sums.
inline constexpr double kPairWeightFloor = 1e-15;

struct SpectralDecomposition {
    Eigen::VectorXd energies;  // ascending
    Matrix vectors;            // eigenvectors as columns
    std::vector<std::vector<Index>> degeneracy_groups;
    std::vector<Index> group_of;  // eigen index -> degeneracy group
    double degeneracy_tol = 0.0;
    double residual = 0.0;  // max |H V - V E| / max(1, |H|)

    Index dim() const noexcept { return energies.size(); }
    double width() const;
    double scale() const;  // max(1, max |E_n|)
};

// Degeneracy groups are formed greedily on sorted energies: a new group starts
// when the gap to the previous level exceeds degeneracy_tol (default
// 1e-9 * max(1, |H|)). Throws NumericError if the eigensolver fails or the
// reconstruction residual is not small.
SpectralDecomposition diagonalize(const HermitianOperator& h,
                                  std::optional<double> degeneracy_tol = std::nullopt);

class ThermalEnsemble {
public:
    ThermalEnsemble(std::shared_ptr<const SpectralDecomposition> spectral, double beta,
                    Eigen::VectorXd weights);

    double beta() const noexcept { return beta_; }
    bool is_ground_state() const noexcept { return beta_ == kInfiniteBeta; }
    double temperature() const;  // 0 for beta = inf, inf for beta = 0
    const Eigen::VectorXd& weights() const noexcept { return weights_; }
    double weight(Index n) const { return weights_(n); }
    const SpectralDecomposition& spectral() const noexcept { return *spectral_; }
    const std::shared_ptr<const SpectralDecomposition>& spectral_ptr() const noexcept {
        return spectral_;
    }
    Index dim() const noexcept { return weights_.size(); }

    Matrix density_matrix() const;

    // x = beta * omega / 2; +-inf at beta = inf for omega != 0.
    double half_phase(double omega) const;
    // x for the eigen pair (m, n) with omega = E_m - E_n. At beta = inf pairs
    // inside one degeneracy group give 0.
    double pair_half_phase(Index m, Index n) const;

private:
    std::shared_ptr<const SpectralDecomposition> spectral_;
    double beta_;
    Eigen::VectorXd weights_;
};

// p_n = exp(-beta (E_n - E_min)) / sum_m exp(-beta (E_m - E_min)); beta = inf
// puts uniform weight on the ground degeneracy group.
ThermalEnsemble gibbs_weights(std::shared_ptr<const SpectralDecomposition> spectral, double beta);

Operator to_eigenbasis(const Operator& o, const SpectralDecomposition& spectral);
Operator from_eigenbasis(const Operator& o_eig, const SpectralDecomposition& spectral);

Complex thermal_expectation(const Operator& o, const ThermalEnsemble& ensemble);
double thermal_expectation(const HermitianOperator& o, const ThermalEnsemble& ensemble);

// --------------------------------------------------------------------------
// Bohr frequencies omega_mn = E_m - E_n

struct EigenPair {
    Index m = 0;
    Index n = 0;
    friend bool operator==(const EigenPair&, const EigenPair&) = default;
};

struct BohrCluster {
    double omega = 0.0;
    std::vector<EigenPair> pairs;
};

// 1e-8 * max(1, spectral width)
double default_frequency_tol(const SpectralDecomposition& spectral);

// All dim^2 pairs, sorted by omega and clustered greedily: a new cluster
// starts when the gap to the previous omega exceeds tau_omega. Clusters come
// out in increasing omega; the cluster holding diagonal pairs has omega = 0.
std::vector<BohrCluster> cluster_bohr_frequencies(const SpectralDecomposition& spectral,
                                                  double tau_omega);

}  // namespace qfidyn
