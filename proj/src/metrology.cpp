#include "qfidyn/metrology.hpp"

#include "qfidyn/errors.hpp"
#include "qfidyn/response.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace qfidyn {

namespace {

void check_dims(const HermitianOperator& o, const ThermalEnsemble& ensemble, const char* where) {
    if (o.dim() != ensemble.dim()) throw DomainError(std::string(where) + ": dimension mismatch");
}

bool is_zero_block(const SymmetryBlock& block, const SpectralDecomposition& s) {
    for (const auto& p : block.pairs) {
        if (p.m == p.n) return true;
    }
    const double tol = std::max(block.omega_tol, default_frequency_tol(s)) *
                       std::max<double>(1.0, static_cast<double>(block.size()));
    return std::abs(block.omega) <= tol;
}

// Logarithmic mean (x - y) / (ln x - ln y), with L(x, x) = x and L(x, 0) = 0.
double log_mean(double x, double y) {
    if (x <= 0.0 || y <= 0.0) return 0.0;
    const double u = std::log(x / y);
    if (std::abs(u) < 1e-6) return y * (1.0 + u / 2.0 + u * u / 6.0);
    return (x - y) / u;
}

struct GaussLegendre {
    std::array<double, 64> nodes{};    // on [0, 1]
    std::array<double, 64> weights{};  // sum to 1
};

const GaussLegendre& gauss_legendre_64() {
    static const GaussLegendre rule = [] {
        GaussLegendre r;
        constexpr int n = 64;
        for (int i = 0; i < n; ++i) {
            double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
            double dp = 0.0;
            for (int iter = 0; iter < 100; ++iter) {
                double p0 = 1.0, p1 = x;
                for (int k = 2; k <= n; ++k) {
                    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                const double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-16) break;
            }
            r.nodes[static_cast<std::size_t>(i)] = 0.5 * (1.0 - x);
            r.weights[static_cast<std::size_t>(i)] = 1.0 / ((1.0 - x * x) * dp * dp);
        }
        return r;
    }();
    return rule;
}

}  // namespace

double qfi_coefficient(double x) {
    if (std::isinf(x)) return 4.0;
    const double t = std::tanh(x);
    return 4.0 * t * t;
}

double skew_coefficient(double x) {
    if (std::isinf(x)) return 1.0;
    return 1.0 - 1.0 / std::cosh(x);
}

double qv_coefficient(double x) {
    if (std::isinf(x)) return 1.0;
    if (std::abs(x) < 1e-4) return x * x / 3.0;
    return 1.0 - std::tanh(x) / x;
}

double qfi_spectral(const HermitianOperator& o, const ThermalEnsemble& ensemble) {
    check_dims(o, ensemble, "qfi_spectral");
    const Matrix oe = to_eigenbasis(o, ensemble.spectral()).matrix();
    const auto& p = ensemble.weights();
    double sum = 0.0;
    for (Index m = 0; m < ensemble.dim(); ++m) {
        for (Index n = 0; n < ensemble.dim(); ++n) {
            const double s = p(n) + p(m);
            if (s < kPairWeightFloor) continue;
            const double d = p(n) - p(m);
            sum += 2.0 * d * d / s * std::norm(oe(m, n));
        }
    }
    return sum;
}

double weighted_bound(std::span<const SymmetryBlock> blocks, const ThermalEnsemble& ensemble,
                      const HermitianOperator& o, const BlockEvaluator::Coefficient& coef) {
    check_dims(o, ensemble, "weighted_bound");
    const BlockEvaluator eval(ensemble, o);
    double sum = 0.0;
    for (const auto& block : blocks) sum += eval.weighted_mazur_matrix(block, coef)(0, 0).real();
    return sum;
}

QfiReport qfi_from_dynsym(std::span<const SymmetryBlock> blocks, const ThermalEnsemble& ensemble,
                          const HermitianOperator& o) {
    check_dims(o, ensemble, "qfi_from_dynsym");
    const BlockEvaluator eval(ensemble, o);
    QfiReport rep;
    rep.value = qfi_spectral(o, ensemble);
    for (const auto& block : blocks) {
        FrequencyContribution c;
        c.omega = block.omega;
        c.d = eval.mazur_weight(block);
        c.contribution = std::max(0.0, eval.weighted_mazur_matrix(block, qfi_coefficient)(0, 0).real());
        rep.bound += c.contribution;
        rep.per_frequency.push_back(c);
    }
    std::stable_sort(rep.per_frequency.begin(), rep.per_frequency.end(),
                     [](const auto& a, const auto& b) { return a.omega < b.omega; });
    rep.saturated = std::abs(rep.value - rep.bound) <= 1e-9 * std::max(1.0, rep.value);
    return rep;
}

double skew_information(const HermitianOperator& o, const ThermalEnsemble& ensemble, double alpha) {
    check_dims(o, ensemble, "skew_information");
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("skew_information: alpha must lie in (0, 1)");
    const Matrix oe = to_eigenbasis(o, ensemble.spectral()).matrix();
    const auto& p = ensemble.weights();
    const Index dim = ensemble.dim();
    Eigen::VectorXd pa(dim), pb(dim);
    for (Index n = 0; n < dim; ++n) {
        pa(n) = std::pow(p(n), alpha);
        pb(n) = std::pow(p(n), 1.0 - alpha);
    }
    double sum = 0.0;
    for (Index m = 0; m < dim; ++m) {
        for (Index n = 0; n < dim; ++n) {
            if (m == n) continue;  // diagonal terms cancel exactly
            sum += std::norm(oe(m, n)) * (p(n) - pa(n) * pb(m));
        }
    }
    return sum;
}

double skew_lower_bound(std::span<const SymmetryBlock> blocks, const ThermalEnsemble& ensemble,
                        const HermitianOperator& o) {
    return weighted_bound(blocks, ensemble, o, skew_coefficient);
}

double quantum_variance(const HermitianOperator& o, const ThermalEnsemble& ensemble) {
    check_dims(o, ensemble, "quantum_variance");
    const Matrix oe = to_eigenbasis(o, ensemble.spectral()).matrix();
    const auto& p = ensemble.weights();
    double sum = 0.0;
    for (Index m = 0; m < ensemble.dim(); ++m) {
        for (Index n = 0; n < ensemble.dim(); ++n) {
            if (m == n) continue;
            sum += std::norm(oe(m, n)) * (p(n) - log_mean(p(n), p(m)));
        }
    }
    return sum;
}

double quantum_variance_by_quadrature(const HermitianOperator& o, const ThermalEnsemble& ensemble) {
    const auto& rule = gauss_legendre_64();
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        sum += rule.weights[i] * skew_information(o, ensemble, rule.nodes[i]);
    }
    return sum;
}

double qv_lower_bound(std::span<const SymmetryBlock> blocks, const ThermalEnsemble& ensemble,
                      const HermitianOperator& o) {
    return weighted_bound(blocks, ensemble, o, qv_coefficient);
}

// --------------------------------------------------------------------------

QfiMatrix qfi_matrix(std::span<const HermitianOperator> generators, const ThermalEnsemble& ensemble) {
    const auto d = static_cast<Index>(generators.size());
    QfiMatrix out;
    out.values = Eigen::MatrixXd::Zero(d, d);
    std::vector<Matrix> eig;
    for (const auto& g : generators) {
        check_dims(g, ensemble, "qfi_matrix");
        eig.push_back(to_eigenbasis(g, ensemble.spectral()).matrix());
    }
    for (Index a = 0; a < d; ++a) {
        for (Index b = a + 1; b < d; ++b) {
            const auto& ga = generators[static_cast<std::size_t>(a)];
            const auto& gb = generators[static_cast<std::size_t>(b)];
            const double c = commutator(ga, gb).hs_norm();
            if (c > kCommutingTol * std::max(1.0, ga.hs_norm() * gb.hs_norm())) out.commuting = false;
        }
    }
    const auto& p = ensemble.weights();
    for (Index m = 0; m < ensemble.dim(); ++m) {
        for (Index n = 0; n < ensemble.dim(); ++n) {
            const double s = p(n) + p(m);
            if (s < kPairWeightFloor) continue;
            const double diff = p(n) - p(m);
            const double w = 2.0 * diff * diff / s;
            if (w == 0.0) continue;
            for (Index a = 0; a < d; ++a) {
                for (Index b = a; b < d; ++b) {
                    const Complex x = eig[static_cast<std::size_t>(a)](m, n) *
                                      eig[static_cast<std::size_t>(b)](n, m);
                    out.values(a, b) += w * x.real();
                }
            }
        }
    }
    out.values.triangularView<Eigen::StrictlyLower>() = out.values.transpose();
    return out;
}

QfiMatrix qfi_matrix_from_dynsym(std::span<const SymmetryBlock> blocks,
                                 const ThermalEnsemble& ensemble,
                                 std::span<const HermitianOperator> generators) {
    std::vector<Operator> ops(generators.begin(), generators.end());
    const BlockEvaluator eval(ensemble, std::span<const Operator>(ops));
    const auto d = static_cast<Index>(ops.size());
    QfiMatrix out;
    out.values = Eigen::MatrixXd::Zero(d, d);
    for (Index a = 0; a < d; ++a) {
        for (Index b = a + 1; b < d; ++b) {
            const double c = commutator(ops[static_cast<std::size_t>(a)], ops[static_cast<std::size_t>(b)]).hs_norm();
            if (c > kCommutingTol * std::max(1.0, ops[static_cast<std::size_t>(a)].hs_norm() *
                                                      ops[static_cast<std::size_t>(b)].hs_norm())) {
                out.commuting = false;
            }
        }
    }
    for (const auto& block : blocks) {
        out.values += eval.weighted_mazur_matrix(block, qfi_coefficient).real();
    }
    out.values = 0.5 * (out.values + out.values.transpose()).eval();
    return out;
}

// --------------------------------------------------------------------------

double eth_qfi(const HermitianOperator& o, const ThermalEnsemble& ensemble) {
    check_dims(o, ensemble, "eth_qfi");
    const double mean = thermal_expectation(o, ensemble);
    const double sq = thermal_expectation(Operator(o.matrix() * o.matrix()), ensemble).real();
    return 4.0 * std::max(0.0, sq - mean * mean);
}

double eth_qfi_via_comb(const HermitianOperator& o, const ThermalEnsemble& ensemble) {
    return integrate_structure_factor(structure_factor_comb(o, ensemble));
}

EthBound eth_lower_bound(std::span<const SymmetryBlock> blocks, const ThermalEnsemble& ensemble,
                         const HermitianOperator& o) {
    check_dims(o, ensemble, "eth_lower_bound");
    const BlockEvaluator eval(ensemble, o);
    const auto& s = ensemble.spectral();
    EthBound out;
    double d0 = 0.0;
    for (const auto& block : blocks) {
        if (is_zero_block(block, s)) {
            d0 += eval.mazur_weight(block);
        } else {
            out.dynamical += 4.0 * eval.mazur_weight(block);
        }
    }
    const double mean = thermal_expectation(o, ensemble);
    out.conserved_correction = 4.0 * (d0 - mean * mean);
    return out;
}

EthGapReport eth_thermal_gap(std::span<const SymmetryBlock> blocks, const ThermalEnsemble& ensemble,
                             const HermitianOperator& o) {
    check_dims(o, ensemble, "eth_thermal_gap");
    const BlockEvaluator eval(ensemble, o);
    const auto& s = ensemble.spectral();
    const auto sech2 = [](double x) {
        if (std::isinf(x)) return 0.0;
        const double c = std::cosh(x);
        return 4.0 / (c * c);
    };
    EthGapReport rep;
    for (const auto& block : blocks) {
        if (is_zero_block(block, s)) continue;
        rep.bound += std::max(0.0, eval.weighted_mazur_matrix(block, sech2)(0, 0).real());
    }
    rep.actual_gap = eth_qfi(o, ensemble) - qfi_spectral(o, ensemble);
    rep.holds = rep.actual_gap >= rep.bound - 1e-9;
    return rep;
}

WitnessReport entanglement_depth(double qfi, int sites, double eps) {
    if (sites < 1) throw DomainError("entanglement_depth: need at least one site");
    if (!(qfi >= 0.0)) throw DomainError("entanglement_depth: QFI must be >= 0");
    WitnessReport rep;
    rep.sites = sites;
    rep.f_q = qfi / sites;
    const double excess = rep.f_q - eps;
    int kappa = -1;  // largest integer strictly below f_Q - eps
    if (excess > 0.0) kappa = static_cast<int>(std::ceil(excess)) - 1;
    rep.depth = std::clamp(1 + kappa, 1, sites);
    return rep;
}

}  // namespace qfidyn
