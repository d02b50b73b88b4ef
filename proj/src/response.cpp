#include "qfidyn/response.hpp"

#include "qfidyn/errors.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace qfidyn {

namespace {

struct ClusterSums {
    double omega_mean = 0.0;  // plain cluster frequency
    double weight = 0.0;      // sum p_n |O_mn|^2
    double weighted_omega = 0.0;
    bool zero = false;
};

std::vector<ClusterSums> accumulate(const HermitianOperator& o, const ThermalEnsemble& ensemble,
                                    std::optional<double> tau_omega) {
    if (o.dim() != ensemble.dim()) throw DomainError("response comb: dimension mismatch");
    const auto& s = ensemble.spectral();
    const double tau = tau_omega.value_or(default_frequency_tol(s));
    const Matrix oe = to_eigenbasis(o, s).matrix();
    const auto clusters = cluster_bohr_frequencies(s, tau);
    std::vector<ClusterSums> out(clusters.size());
    for (std::size_t k = 0; k < clusters.size(); ++k) {
        auto& c = out[k];
        c.omega_mean = clusters[k].omega;
        for (const auto& p : clusters[k].pairs) {
            if (p.m == p.n) c.zero = true;
            const double w = ensemble.weight(p.n) * std::norm(oe(p.m, p.n));
            c.weight += w;
            c.weighted_omega += w * (s.energies(p.m) - s.energies(p.n));
        }
    }
    return out;
}

double clamp_weight(double w, double scale, std::size_t& clamped) {
    if (w >= 0.0) return w;
    if (w < -1e-10 * std::max(1.0, scale)) {
        std::ostringstream msg;
        msg << "comb weight " << w << " is negative beyond rounding";
        throw NumericError(msg.str());
    }
    ++clamped;
    return 0.0;
}

double thermal_mean(const HermitianOperator& o, const ThermalEnsemble& ensemble) {
    return thermal_expectation(o, ensemble);
}

}  // namespace

std::string to_string(CombKind k) {
    switch (k) {
    case CombKind::Response: return "response";
    case CombKind::Structure: return "structure";
    case CombKind::Susceptibility: return "susceptibility";
    case CombKind::Cross: return "cross";
    }
    return "?";
}

Complex FrequencyComb::total() const {
    Complex sum{0.0, 0.0};
    for (const auto& e : entries) sum += e.weight;
    return sum;
}

const CombEntry* FrequencyComb::find(double omega, double tol) const {
    const CombEntry* best = nullptr;
    double best_gap = tol;
    for (const auto& e : entries) {
        const double gap = std::abs(e.omega - omega);
        if (gap <= best_gap) {
            best = &e;
            best_gap = gap;
        }
    }
    return best;
}

FrequencyComb response_comb(const HermitianOperator& o, const ThermalEnsemble& ensemble,
                            std::optional<double> tau_omega) {
    const auto sums = accumulate(o, ensemble, tau_omega);
    FrequencyComb comb;
    comb.kind = CombKind::Response;
    comb.entries.reserve(sums.size());
    for (const auto& c : sums) {
        double omega = c.omega_mean;
        if (!c.zero && c.weight > 0.0) omega = c.weighted_omega / c.weight;
        comb.entries.push_back({omega, Complex(c.weight, 0.0)});
    }
    return comb;
}

FrequencyComb structure_factor_comb(const HermitianOperator& o, const ThermalEnsemble& ensemble,
                                    std::optional<double> tau_omega) {
    const auto sums = accumulate(o, ensemble, tau_omega);
    const double mean = thermal_mean(o, ensemble);
    FrequencyComb comb;
    comb.kind = CombKind::Structure;
    comb.entries.reserve(sums.size());
    const std::size_t count = sums.size();
    for (std::size_t k = 0; k < count; ++k) {
        // Bohr frequencies come in +- pairs, so cluster k mirrors count-1-k.
        const auto& c = sums[k];
        const auto& partner = sums[count - 1 - k];
        double s = 0.0;
        double omega = 0.0;
        if (c.zero) {
            s = clamp_weight(2.0 * c.weight - 2.0 * mean * mean, 2.0 * c.weight, comb.clamped);
        } else {
            s = c.weight + partner.weight;
            omega = s > 0.0 ? (c.weighted_omega - partner.weighted_omega) / s
                            : 0.5 * (c.omega_mean - partner.omega_mean);
        }
        comb.entries.push_back({omega, Complex(s, 0.0)});
    }
    return comb;
}

FrequencyComb susceptibility_comb(const HermitianOperator& o, const ThermalEnsemble& ensemble,
                                  std::optional<double> tau_omega) {
    FrequencyComb comb = structure_factor_comb(o, ensemble, tau_omega);
    comb.kind = CombKind::Susceptibility;
    for (auto& e : comb.entries) {
        const double x = e.omega == 0.0 ? 0.0 : std::tanh(ensemble.half_phase(e.omega));
        e.weight *= x;
    }
    return comb;
}

FrequencyComb cross_response_comb(const HermitianOperator& oa, const HermitianOperator& ob,
                                  const ThermalEnsemble& ensemble, std::optional<double> tau_omega) {
    if (oa.dim() != ensemble.dim() || ob.dim() != ensemble.dim()) {
        throw DomainError("cross_response_comb: dimension mismatch");
    }
    const auto& s = ensemble.spectral();
    const double tau = tau_omega.value_or(default_frequency_tol(s));
    const Matrix a = to_eigenbasis(oa, s).matrix();
    const Matrix b = to_eigenbasis(ob, s).matrix();
    FrequencyComb comb;
    comb.kind = CombKind::Cross;
    for (const auto& cluster : cluster_bohr_frequencies(s, tau)) {
        Complex w{0.0, 0.0};
        for (const auto& p : cluster.pairs) w += ensemble.weight(p.n) * a(p.m, p.n) * b(p.n, p.m);
        comb.entries.push_back({cluster.omega, w});
    }
    return comb;
}

double qfi_from_structure_factor(const FrequencyComb& s, const ThermalEnsemble& ensemble) {
    if (s.kind != CombKind::Structure) throw DomainError("expected a structure-factor comb");
    double sum = 0.0;
    for (const auto& e : s.entries) {
        if (e.omega == 0.0) continue;
        const double t = std::tanh(ensemble.half_phase(e.omega));
        sum += t * t * e.weight.real();
    }
    return 2.0 * sum;
}

double qfi_from_susceptibility(const FrequencyComb& x, const ThermalEnsemble& ensemble) {
    if (x.kind != CombKind::Susceptibility) throw DomainError("expected a susceptibility comb");
    double sum = 0.0;
    for (const auto& e : x.entries) {
        if (e.omega == 0.0) continue;
        sum += std::tanh(ensemble.half_phase(e.omega)) * e.weight.real();
    }
    return 2.0 * sum;
}

double integrate_structure_factor(const FrequencyComb& s) {
    if (s.kind != CombKind::Structure) throw DomainError("expected a structure-factor comb");
    return 2.0 * s.total().real();
}

// --------------------------------------------------------------------------

std::string CombBoundReport::describe() const {
    std::ostringstream out;
    out << (holds ? "bound holds" : "bound violated") << (saturated ? " (saturated)" : "") << "\n";
    for (const auto& v : violations) {
        out << "  omega=" << v.omega << " g=" << v.g << " D=" << v.d << "\n";
    }
    return out.str();
}

CombBoundReport comb_bound_check(const FrequencyComb& comb, std::span<const SymmetryBlock> blocks,
                                 const ThermalEnsemble& ensemble, const HermitianOperator& o,
                                 double tol) {
    if (comb.kind != CombKind::Response) throw DomainError("comb_bound_check needs a response comb");
    CombBoundReport rep;
    const auto& s = ensemble.spectral();
    const BlockEvaluator eval(ensemble, o);
    bool equal = true;
    for (const auto& block : blocks) {
        const double match_tol = std::max(block.omega_tol > 0.0 ? block.omega_tol : 0.0,
                                          default_frequency_tol(s)) *
                                 std::max<double>(1.0, static_cast<double>(block.size()));
        const CombEntry* e = comb.find(block.omega, match_tol);
        CombBoundEntry entry{block.omega, e ? e->weight.real() : 0.0, eval.mazur_weight(block)};
        if (entry.g < entry.d - tol) {
            rep.violations.push_back(entry);
            rep.holds = false;
        }
        if (std::abs(entry.g - entry.d) > tol) equal = false;
        rep.entries.push_back(entry);
    }
    rep.saturated = rep.holds && equal && is_trivial_complete(blocks, ensemble.dim());
    return rep;
}

void write_comb_csv(std::ostream& out, const FrequencyComb& comb, bool header) {
    if (header) out << "omega,weight_re,weight_im,kind\n";
    char buf[128];
    const std::string kind = to_string(comb.kind);
    for (const auto& e : comb.entries) {
        std::snprintf(buf, sizeof buf, "%.12e,%.12e,%.12e,", e.omega, e.weight.real(), e.weight.imag());
        out << buf << kind << "\n";
    }
}

}  // namespace qfidyn
