#pragma once

// Quantum Fisher information, generalized variances and their
// dynamical-symmetry lower bounds.
//
// Every bound has the form sum_k c(beta omega_k / 2) D_k(O) with a per-mode
// coefficient c:
//   QFI                 4 tanh^2(x)
//   skew info I_{1/2}   1 - sech(x)
//   quantum variance    1 - tanh(x) / x
// Blocks of the trivial complete set apply c to each eigen pair's own
// frequency; that is what makes them saturate.

#include "qfidyn/dynsym.hpp"
#include "qfidyn/operators.hpp"
#include "qfidyn/spectral.hpp"

#include <span>
#include <vector>

namespace qfidyn {

inline constexpr double kWitnessTol = 1e-9;
inline constexpr double kCommutingTol = 1e-10;

// Per-mode coefficients, defined for x = +-inf.
double qfi_coefficient(double x);
double skew_coefficient(double x);
double qv_coefficient(double x);

// sum_{p_n + p_m >= 1e-15} 2 (p_n - p_m)^2 / (p_n + p_m) |O_mn|^2
double qfi_spectral(const HermitianOperator& o, const ThermalEnsemble& ensemble);

struct FrequencyContribution {
    double omega = 0.0;
    double d = 0.0;             // Mazur weight D_k(O)
    double contribution = 0.0;  // coefficient-weighted D_k
};

struct QfiReport {
    double value = 0.0;  // spectral F_Q
    double bound = 0.0;  // sum of contributions
    std::vector<FrequencyContribution> per_frequency;  // increasing omega
    bool saturated = false;  // |value - bound| <= 1e-9 max(1, value)
};

// Throws DomainError if a block does not belong to the ensemble's Hamiltonian.
QfiReport qfi_from_dynsym(std::span<const SymmetryBlock> blocks, const ThermalEnsemble& ensemble,
                          const HermitianOperator& o);

// sum_{mn} |O_mn|^2 (p_n - p_n^alpha p_m^{1-alpha}), 0 < alpha < 1
double skew_information(const HermitianOperator& o, const ThermalEnsemble& ensemble,
                        double alpha = 0.5);
double skew_lower_bound(std::span<const SymmetryBlock> blocks, const ThermalEnsemble& ensemble,
                        const HermitianOperator& o);

// int_0^1 I_alpha d alpha in closed form (logarithmic mean of p_n, p_m).
double quantum_variance(const HermitianOperator& o, const ThermalEnsemble& ensemble);
// The same integral by 64-node Gauss-Legendre quadrature over alpha.
double quantum_variance_by_quadrature(const HermitianOperator& o, const ThermalEnsemble& ensemble);
double qv_lower_bound(std::span<const SymmetryBlock> blocks, const ThermalEnsemble& ensemble,
                      const HermitianOperator& o);

// sum_k coef(x) D_k(O) for an arbitrary per-mode coefficient.
double weighted_bound(std::span<const SymmetryBlock> blocks, const ThermalEnsemble& ensemble,
                      const HermitianOperator& o, const BlockEvaluator::Coefficient& coef);

struct QfiMatrix {
    Eigen::MatrixXd values;
    bool commuting = true;  // false when some [O_a, O_b] != 0; values still computed
};

QfiMatrix qfi_matrix(std::span<const HermitianOperator> generators, const ThermalEnsemble& ensemble);
QfiMatrix qfi_matrix_from_dynsym(std::span<const SymmetryBlock> blocks,
                                 const ThermalEnsemble& ensemble,
                                 std::span<const HermitianOperator> generators);

// 4 (<O^2> - <O>^2) for the canonical ensemble.
double eth_qfi(const HermitianOperator& o, const ThermalEnsemble& ensemble);
// (1/pi) int S(omega) d omega summed over the structure-factor comb.
double eth_qfi_via_comb(const HermitianOperator& o, const ThermalEnsemble& ensemble);

struct EthBound {
    double dynamical = 0.0;             // sum_{k != 0} 4 D_k
    double conserved_correction = 0.0;  // 4 (D_0 - <O>^2), D_0 from the omega = 0 blocks
};

EthBound eth_lower_bound(std::span<const SymmetryBlock> blocks, const ThermalEnsemble& ensemble,
                         const HermitianOperator& o);

struct EthGapReport {
    double bound = 0.0;       // sum_{k != 0} 4 D_k / cosh^2(beta omega_k / 2)
    double actual_gap = 0.0;  // eth_qfi - qfi_spectral
    bool holds = false;       // actual_gap >= bound - 1e-9
};

EthGapReport eth_thermal_gap(std::span<const SymmetryBlock> blocks, const ThermalEnsemble& ensemble,
                             const HermitianOperator& o);

struct WitnessReport {
    int sites = 0;
    double f_q = 0.0;
    int depth = 1;
};

// f_Q = F_Q / N; depth = 1 + max{kappa >= 0 : f_Q > kappa + eps}, at least 1
// and at most N.
WitnessReport entanglement_depth(double qfi, int sites, double eps = kWitnessTol);

}  // namespace qfidyn
