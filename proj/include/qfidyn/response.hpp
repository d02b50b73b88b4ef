#pragma once

// Delta-comb response functions of a finite system.
//
// A comb stores the Kronecker-side weights w_k at the clustered Bohr
// frequencies omega_k. Dirac-side conventions:
//   G(omega)   = sum_k g_k delta_{omega, omega_k}
//   S(omega)   = 2 pi sum_k s_k delta(omega - omega_k)
//   chi''(w)   = 2 pi sum_k x_k delta(omega - omega_k),  x_k = tanh(beta omega_k / 2) s_k
// so (1/pi) int d omega f(omega) S(omega) = 2 sum_k f(omega_k) s_k.
//
// Inside a cluster the reported frequency is the weight-averaged Bohr
// frequency (plain average when the cluster carries no weight), which keeps
// smooth functions of omega accurate to second order in the cluster spread.

#include "qfidyn/dynsym.hpp"
#include "qfidyn/operators.hpp"
#include "qfidyn/spectral.hpp"

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qfidyn {

enum class CombKind { Response, Structure, Susceptibility, Cross };

std::string to_string(CombKind k);

struct CombEntry {
    double omega = 0.0;
    Complex weight{0.0, 0.0};
};

struct FrequencyComb {
    CombKind kind = CombKind::Response;
    std::vector<CombEntry> entries;  // increasing omega
    std::size_t clamped = 0;         // tiny negative weights set to 0

    Complex total() const;
    // Entry whose frequency is closest to omega, or nullptr if none is within tol.
    const CombEntry* find(double omega, double tol) const;
};

// g_k = sum_{(m,n) in cluster k} p_n |O_mn|^2; sum_k g_k = <O^2>.
FrequencyComb response_comb(const HermitianOperator& o, const ThermalEnsemble& ensemble,
                            std::optional<double> tau_omega = std::nullopt);

// s_k = g_k + g_{-k} for omega_k != 0, s_0 = 2 g_0 - 2 <O>^2.
FrequencyComb structure_factor_comb(const HermitianOperator& o, const ThermalEnsemble& ensemble,
                                    std::optional<double> tau_omega = std::nullopt);

// x_k = tanh(beta omega_k / 2) s_k.
FrequencyComb susceptibility_comb(const HermitianOperator& o, const ThermalEnsemble& ensemble,
                                  std::optional<double> tau_omega = std::nullopt);

// w_k = sum_{(m,n) in cluster k} p_n (O_a)_mn (O_b)_nm.
FrequencyComb cross_response_comb(const HermitianOperator& oa, const HermitianOperator& ob,
                                  const ThermalEnsemble& ensemble,
                                  std::optional<double> tau_omega = std::nullopt);

// (1/pi) int tanh^2(beta omega/2) S(omega) d omega
double qfi_from_structure_factor(const FrequencyComb& s, const ThermalEnsemble& ensemble);
// (1/pi) int tanh(beta omega/2) chi''(omega) d omega
double qfi_from_susceptibility(const FrequencyComb& x, const ThermalEnsemble& ensemble);
// (1/pi) int S(omega) d omega = 4 (<O^2> - <O>^2)
double integrate_structure_factor(const FrequencyComb& s);

struct CombBoundEntry {
    double omega = 0.0;
    double g = 0.0;
    double d = 0.0;
};

struct CombBoundReport {
    std::vector<CombBoundEntry> entries;     // one per block, block order
    std::vector<CombBoundEntry> violations;  // g < D - tol
    bool holds = true;
    bool saturated = false;  // trivial complete set and g = D everywhere

    std::string describe() const;
};

// Checks g(omega_k) >= D_k(O) - tol for every block. The comb must be
// response-kind and computed for the same ensemble and operator.
CombBoundReport comb_bound_check(const FrequencyComb& comb, std::span<const SymmetryBlock> blocks,
                                 const ThermalEnsemble& ensemble, const HermitianOperator& o,
                                 double tol = 1e-10);

// CSV with header omega,weight_re,weight_im,kind (%.12e).
void write_comb_csv(std::ostream& out, const FrequencyComb& comb, bool header = true);

}  // namespace qfidyn
