#pragma once

// Dynamical symmetries: eigenoperators A of H with [H, A] = omega A.
//
// Sign convention: [H, A] = omega A throughout. An operator written in the
// other convention, [A, H] = omega A, is the adjoint A^dag here at the same
// omega.
//
// Thermal correlators are <X> = Tr(X rho_beta). A block of symmetries sharing
// one frequency is summarized by its Gram matrix V_ij = <A_i^dag A_j> and
// overlaps a_j = <A_j^dag O>; the Mazur weight is D = a^dag V^+ a.

#include "qfidyn/operators.hpp"
#include "qfidyn/spectral.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qfidyn {

inline constexpr double kDefaultDynamicalTol = 1e-9;
inline constexpr double kDefaultRankTol = 1e-12;

struct FrequencyFit {
    double omega = 0.0;
    double residual = 0.0;  // |[H,A] - omega A|_HS / |A|_HS
};

// Least-squares eigenfrequency omega = Re<A, [H,A]> / <A, A>.
FrequencyFit fit_frequency(const Operator& h, const Operator& a);

struct DynamicalSymmetry {
    std::string label;
    Operator op;
    double omega = 0.0;
    double residual = 0.0;
};

// Fits omega and rejects the operator if the residual exceeds tau_dyn.
DynamicalSymmetry make_symmetry(const Operator& h, Operator a, std::string label,
                                double tau_dyn = kDefaultDynamicalTol);

// Symmetries sharing one frequency. Explicit members are dense operators;
// pairs stand for |E_m><E_n| in the eigenbasis of H and are never
// materialized. Gram and overlap entries are ordered members first, then pairs.
struct SymmetryBlock {
    double omega = 0.0;
    double omega_tol = 0.0;
    std::vector<DynamicalSymmetry> members;
    std::vector<EigenPair> pairs;

    std::size_t size() const noexcept { return members.size() + pairs.size(); }
    bool implicit_only() const noexcept { return members.empty(); }
};

// Groups symmetries into blocks by clustering their frequencies (greedy on
// sorted omega with gap tau_omega).
std::vector<SymmetryBlock> group_into_blocks(std::vector<DynamicalSymmetry> symmetries,
                                             double tau_omega);

// One block per Bohr-frequency cluster; dim^2 pairs in total.
std::vector<SymmetryBlock> trivial_complete_set(const SpectralDecomposition& spectral,
                                                std::optional<double> tau_omega = std::nullopt);

// The omega = 0 block of the trivial set: energy projectors plus the
// off-diagonal units inside degenerate levels.
SymmetryBlock complete_conserved_block(const SpectralDecomposition& spectral,
                                       std::optional<double> tau_omega = std::nullopt);

bool is_trivial_complete(std::span<const SymmetryBlock> blocks, Index dim);

struct BlockGram {
    Matrix gram;               // V_ij = <A_i^dag A_j>
    Eigen::VectorXcd overlaps; // a_j = <A_j^dag O>
};

BlockGram block_gram(const SymmetryBlock& block, const ThermalEnsemble& ensemble, const Operator& o);

// a^dag V^+ a with eigenvalues of V below rank_tol * lambda_max dropped.
// Throws NumericError when V has an eigenvalue below -1e-10 * lambda_max.
double mazur_weight(const BlockGram& g, double rank_tol = kDefaultRankTol);
double mazur_weight(const SymmetryBlock& block, const ThermalEnsemble& ensemble, const Operator& o,
                    double rank_tol = kDefaultRankTol);

// Evaluates blocks against a fixed ensemble and list of generators, working
// in the eigenbasis of H. Explicit members are restricted to the eigen pairs
// on their frequency shell, which removes rounding noise in entries that
// vanish for an exact eigenoperator.
class BlockEvaluator {
public:
    // Maps a half phase x = beta omega / 2 to a per-mode coefficient.
    using Coefficient = std::function<double(double)>;

    BlockEvaluator(const ThermalEnsemble& ensemble, std::span<const Operator> generators,
                   double rank_tol = kDefaultRankTol);
    BlockEvaluator(const ThermalEnsemble& ensemble, const Operator& generator,
                   double rank_tol = kDefaultRankTol);

    const ThermalEnsemble& ensemble() const noexcept { return ensemble_; }
    std::size_t generator_count() const noexcept { return generators_eig_.size(); }
    const Matrix& generator_eig(std::size_t a) const { return generators_eig_.at(a); }

    BlockGram gram(const SymmetryBlock& block, std::size_t generator = 0) const;

    // [D]_{ab} = a_b^dag V^+ a_a (Hermitian, d x d).
    Matrix mazur_matrix(const SymmetryBlock& block) const;

    // sum over modes of coef(x) times the mode's Mazur matrix. Implicit-only
    // blocks use each pair's own half phase; other blocks use the block's.
    Matrix weighted_mazur_matrix(const SymmetryBlock& block, const Coefficient& coef) const;

    double mazur_weight(const SymmetryBlock& block) const;

private:
    struct Shell {
        std::vector<EigenPair> pairs;
        Matrix members;  // shell entries of each block member, one column each
    };
    Shell build_shell(const SymmetryBlock& block) const;
    void check_pairs(const SymmetryBlock& block) const;

    const ThermalEnsemble& ensemble_;
    std::vector<Matrix> generators_eig_;
    double rank_tol_;
};

// Mazur bound with conserved quantities Q_j ([H, Q_j] = 0). Throws DomainError
// naming the first member whose commutator residual exceeds tau_dyn.
double conserved_mazur_bound(std::span<const Operator> conserved, const ThermalEnsemble& ensemble,
                             const Operator& o, double tau_dyn = kDefaultDynamicalTol);
double conserved_mazur_bound(const SymmetryBlock& conserved, const ThermalEnsemble& ensemble,
                             const Operator& o);

struct LocalCapReport {
    int first_site = 0;
    int last_site = 0;
    int range = 0;         // r = last - first
    double cap = 0.0;      // (r + 1)^2 / 4
    double value = 0.0;    // |<A^dag O>|^2 / <A^dag A>
    double exterior = 0.0; // |<A^dag O_out>| for the terms outside the support
    bool holds = false;    // value <= cap + 1e-9
};

// Checks the strictly-local cap for A against O = sum of local_terms. Each term
// must act on one site, have spectral width 1 and zero thermal mean. The cap
// argument assumes A is uncorrelated with terms outside its support; the
// report carries that exterior overlap.
LocalCapReport local_cap(const Operator& a_loc, std::span<const HermitianOperator> local_terms,
                         const ThermalEnsemble& ensemble, int n_sites);

}  // namespace qfidyn
