#include "qfidyn/dynsym.hpp"

#include "qfidyn/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qfidyn {

namespace {

// a^dag V^+ b for Hermitian PSD V (columns of a, b index generators).
Matrix pinv_quadratic(const Matrix& v, const Matrix& a, const Matrix& b, double rank_tol) {
    Matrix out = Matrix::Zero(a.cols(), b.cols());
    if (v.rows() == 0) return out;
    Eigen::SelfAdjointEigenSolver<Matrix> solver(v);
    if (solver.info() != Eigen::Success) {
        throw NumericError("Gram matrix eigensolver did not converge");
    }
    const Eigen::VectorXd& lambda = solver.eigenvalues();
    const double lmax = lambda.cwiseAbs().maxCoeff();
    if (lmax == 0.0) return out;
    if (lambda.minCoeff() < -1e-10 * lmax) {
        std::ostringstream msg;
        msg << "Gram matrix is indefinite: eigenvalue " << lambda.minCoeff() << " vs max " << lmax;
        throw NumericError(msg.str());
    }
    const Matrix& u = solver.eigenvectors();
    const Matrix ua = u.adjoint() * a;
    const Matrix ub = u.adjoint() * b;
    for (Index i = 0; i < lambda.size(); ++i) {
        if (lambda(i) <= rank_tol * lmax) continue;
        out += ua.row(i).adjoint() * ub.row(i) / lambda(i);
    }
    return out;
}

double effective_tol(const SymmetryBlock& block, const SpectralDecomposition& spectral) {
    const double base = block.omega_tol > 0.0 ? block.omega_tol : default_frequency_tol(spectral);
    return base * std::max<double>(1.0, static_cast<double>(block.size()));
}

}  // namespace

// --------------------------------------------------------------------------

FrequencyFit fit_frequency(const Operator& h, const Operator& a) {
    if (h.dim() != a.dim()) throw DomainError("fit_frequency: dimension mismatch");
    const double norm2 = a.matrix().squaredNorm();
    if (norm2 == 0.0) throw DomainError("fit_frequency: zero operator has no frequency");
    const Matrix c = h.matrix() * a.matrix() - a.matrix() * h.matrix();
    FrequencyFit fit;
    fit.omega = a.matrix().cwiseProduct(c.conjugate()).sum().real() / norm2;
    fit.residual = (c - fit.omega * a.matrix()).norm() / std::sqrt(norm2);
    return fit;
}

DynamicalSymmetry make_symmetry(const Operator& h, Operator a, std::string label, double tau_dyn) {
    const FrequencyFit fit = fit_frequency(h, a);
    if (!(fit.residual <= tau_dyn)) {
        std::ostringstream msg;
        msg << "'" << label << "' is not a dynamical symmetry: residual " << fit.residual
            << " exceeds " << tau_dyn;
        throw DomainError(msg.str());
    }
    return DynamicalSymmetry{std::move(label), std::move(a), fit.omega, fit.residual};
}

std::vector<SymmetryBlock> group_into_blocks(std::vector<DynamicalSymmetry> symmetries,
                                             double tau_omega) {
    std::stable_sort(symmetries.begin(), symmetries.end(),
                     [](const auto& x, const auto& y) { return x.omega < y.omega; });
    std::vector<SymmetryBlock> blocks;
    for (std::size_t i = 0; i < symmetries.size(); ++i) {
        if (i == 0 || symmetries[i].omega - symmetries[i - 1].omega > tau_omega) {
            blocks.emplace_back();
            blocks.back().omega_tol = tau_omega;
        }
        blocks.back().members.push_back(std::move(symmetries[i]));
    }
    for (auto& b : blocks) {
        double sum = 0.0;
        for (const auto& m : b.members) sum += m.omega;
        b.omega = sum / static_cast<double>(b.members.size());
    }
    return blocks;
}

std::vector<SymmetryBlock> trivial_complete_set(const SpectralDecomposition& spectral,
                                                std::optional<double> tau_omega) {
    const double tau = tau_omega.value_or(default_frequency_tol(spectral));
    auto clusters = cluster_bohr_frequencies(spectral, tau);
    std::vector<SymmetryBlock> blocks;
    blocks.reserve(clusters.size());
    for (auto& c : clusters) {
        SymmetryBlock b;
        b.omega = c.omega;
        b.omega_tol = tau;
        b.pairs = std::move(c.pairs);
        blocks.push_back(std::move(b));
    }
    return blocks;
}

SymmetryBlock complete_conserved_block(const SpectralDecomposition& spectral,
                                       std::optional<double> tau_omega) {
    auto blocks = trivial_complete_set(spectral, tau_omega);
    for (auto& b : blocks) {
        const bool has_diag = std::any_of(b.pairs.begin(), b.pairs.end(),
                                          [](const EigenPair& p) { return p.m == p.n; });
        if (has_diag) return std::move(b);
    }
    throw NumericError("no zero-frequency cluster found");
}

bool is_trivial_complete(std::span<const SymmetryBlock> blocks, Index dim) {
    std::vector<bool> seen(static_cast<std::size_t>(dim * dim), false);
    std::size_t count = 0;
    for (const auto& b : blocks) {
        if (!b.implicit_only()) return false;
        for (const auto& p : b.pairs) {
            if (p.m < 0 || p.n < 0 || p.m >= dim || p.n >= dim) return false;
            const auto k = static_cast<std::size_t>(p.m * dim + p.n);
            if (seen[k]) return false;
            seen[k] = true;
            ++count;
        }
    }
    return count == static_cast<std::size_t>(dim * dim);
}

// --------------------------------------------------------------------------

BlockEvaluator::BlockEvaluator(const ThermalEnsemble& ensemble, std::span<const Operator> generators,
                               double rank_tol)
    : ensemble_(ensemble), rank_tol_(rank_tol) {
    generators_eig_.reserve(generators.size());
    for (const auto& g : generators) {
        if (g.dim() != ensemble.dim()) throw DomainError("generator dimension does not match ensemble");
        generators_eig_.push_back(to_eigenbasis(g, ensemble.spectral()).matrix());
    }
}

BlockEvaluator::BlockEvaluator(const ThermalEnsemble& ensemble, const Operator& generator,
                               double rank_tol)
    : BlockEvaluator(ensemble, std::span<const Operator>(&generator, 1), rank_tol) {}

void BlockEvaluator::check_pairs(const SymmetryBlock& block) const {
    const auto& s = ensemble_.spectral();
    const Index dim = s.dim();
    const double tol = effective_tol(block, s);
    for (const auto& p : block.pairs) {
        if (p.m < 0 || p.n < 0 || p.m >= dim || p.n >= dim) {
            throw DomainError("eigen pair index out of range for this Hamiltonian");
        }
        const double w = s.energies(p.m) - s.energies(p.n);
        if (std::abs(w - block.omega) > tol) {
            std::ostringstream msg;
            msg << "eigen pair (" << p.m << "," << p.n << ") has frequency " << w
                << ", not the block frequency " << block.omega;
            throw DomainError(msg.str());
        }
    }
}

BlockEvaluator::Shell BlockEvaluator::build_shell(const SymmetryBlock& block) const {
    const auto& s = ensemble_.spectral();
    const Index dim = s.dim();
    const auto& e = s.energies;
    const double tol = effective_tol(block, s);
    check_pairs(block);

    Shell shell;
    if (block.implicit_only()) {
        shell.pairs = block.pairs;
        shell.members = Matrix::Identity(static_cast<Index>(block.pairs.size()),
                                         static_cast<Index>(block.pairs.size()));
        return shell;
    }

    for (Index a = 0; a < dim; ++a) {
        for (Index b = 0; b < dim; ++b) {
            if (std::abs(e(a) - e(b) - block.omega) <= tol) shell.pairs.push_back({a, b});
        }
    }
    const auto n_shell = static_cast<Index>(shell.pairs.size());
    shell.members = Matrix::Zero(n_shell, static_cast<Index>(block.size()));

    Index col = 0;
    for (const auto& member : block.members) {
        if (member.op.dim() != dim) {
            throw DomainError("symmetry '" + member.label + "' has the wrong dimension");
        }
        const Matrix a_eig = to_eigenbasis(member.op, s).matrix();
        const double norm = a_eig.norm();
        if (norm == 0.0) throw DomainError("symmetry '" + member.label + "' is the zero operator");
        double res2 = 0.0;
        for (Index a = 0; a < dim; ++a) {
            for (Index b = 0; b < dim; ++b) {
                const double d = e(a) - e(b) - member.omega;
                res2 += d * d * std::norm(a_eig(a, b));
            }
        }
        const double residual = std::sqrt(res2) / norm;
        const double allowed =
            std::max(kDefaultDynamicalTol, 2.0 * member.residual) + 1e-12 * s.scale();
        if (residual > allowed) {
            std::ostringstream msg;
            msg << "symmetry '" << member.label << "' does not belong to this Hamiltonian "
                << "(residual " << residual << ")";
            throw DomainError(msg.str());
        }
        for (Index k = 0; k < n_shell; ++k) {
            const auto& p = shell.pairs[static_cast<std::size_t>(k)];
            shell.members(k, col) = a_eig(p.m, p.n);
        }
        ++col;
    }
    for (const auto& pair : block.pairs) {
        const auto it = std::find(shell.pairs.begin(), shell.pairs.end(), pair);
        shell.members(static_cast<Index>(it - shell.pairs.begin()), col) = 1.0;
        ++col;
    }
    return shell;
}

BlockGram BlockEvaluator::gram(const SymmetryBlock& block, std::size_t generator) const {
    const Shell shell = build_shell(block);
    const auto n_shell = static_cast<Index>(shell.pairs.size());
    Eigen::VectorXcd weights(n_shell);
    Eigen::VectorXcd o(n_shell);
    const Matrix& g = generators_eig_.at(generator);
    for (Index k = 0; k < n_shell; ++k) {
        const auto& p = shell.pairs[static_cast<std::size_t>(k)];
        weights(k) = ensemble_.weight(p.n);
        o(k) = g(p.m, p.n);
    }
    BlockGram out;
    out.gram = shell.members.adjoint() * weights.asDiagonal() * shell.members;
    out.overlaps = shell.members.adjoint() * weights.asDiagonal() * o;
    return out;
}

Matrix BlockEvaluator::mazur_matrix(const SymmetryBlock& block) const {
    return weighted_mazur_matrix(block, [](double) { return 1.0; });
}

Matrix BlockEvaluator::weighted_mazur_matrix(const SymmetryBlock& block,
                                             const Coefficient& coef) const {
    const auto d = static_cast<Index>(generators_eig_.size());
    Matrix out = Matrix::Zero(d, d);

    if (block.implicit_only()) {
        check_pairs(block);
        Eigen::VectorXcd u(d);
        for (const auto& p : block.pairs) {
            const double w = ensemble_.weight(p.n);
            if (w == 0.0) continue;
            const double c = coef(ensemble_.pair_half_phase(p.m, p.n));
            if (c == 0.0) continue;
            for (Index a = 0; a < d; ++a) u(a) = generators_eig_[static_cast<std::size_t>(a)](p.m, p.n);
            out.noalias() += (c * w) * (u * u.adjoint());
        }
        return out;
    }

    const bool zero_freq = std::abs(block.omega) <= effective_tol(block, ensemble_.spectral());
    const double c = coef(zero_freq ? 0.0 : ensemble_.half_phase(block.omega));
    const Shell shell = build_shell(block);  // validates members even when c = 0
    if (c == 0.0) return out;

    const auto n_shell = static_cast<Index>(shell.pairs.size());
    Eigen::VectorXd weights(n_shell);
    Matrix o(n_shell, d);
    for (Index k = 0; k < n_shell; ++k) {
        const auto& p = shell.pairs[static_cast<std::size_t>(k)];
        weights(k) = ensemble_.weight(p.n);
        for (Index a = 0; a < d; ++a) o(k, a) = generators_eig_[static_cast<std::size_t>(a)](p.m, p.n);
    }
    const Matrix pw = weights.cast<Complex>().asDiagonal() * shell.members;
    const Matrix v = shell.members.adjoint() * pw;
    const Matrix overlaps = pw.adjoint() * o;  // (members x d)
    // (a^dag V^+ a)^T gives [D]_{ab} = a_b^dag V^+ a_a
    out = c * pinv_quadratic(v, overlaps, overlaps, rank_tol_).transpose();
    return out;
}

double BlockEvaluator::mazur_weight(const SymmetryBlock& block) const {
    if (generators_eig_.empty()) throw DomainError("mazur_weight: no generator");
    return std::max(0.0, mazur_matrix(block)(0, 0).real());
}

BlockGram block_gram(const SymmetryBlock& block, const ThermalEnsemble& ensemble, const Operator& o) {
    return BlockEvaluator(ensemble, o).gram(block);
}

double mazur_weight(const BlockGram& g, double rank_tol) {
    if (g.gram.rows() != g.overlaps.size()) throw DomainError("mazur_weight: Gram size mismatch");
    const Matrix a = g.overlaps;
    return std::max(0.0, pinv_quadratic(g.gram, a, a, rank_tol)(0, 0).real());
}

double mazur_weight(const SymmetryBlock& block, const ThermalEnsemble& ensemble, const Operator& o,
                    double rank_tol) {
    return BlockEvaluator(ensemble, o, rank_tol).mazur_weight(block);
}

// --------------------------------------------------------------------------

double conserved_mazur_bound(std::span<const Operator> conserved, const ThermalEnsemble& ensemble,
                             const Operator& o, double tau_dyn) {
    const auto& s = ensemble.spectral();
    SymmetryBlock block;
    block.omega = 0.0;
    block.omega_tol = default_frequency_tol(s);
    for (std::size_t j = 0; j < conserved.size(); ++j) {
        const Operator& q = conserved[j];
        if (q.dim() != s.dim()) throw DomainError("conserved quantity has the wrong dimension");
        const Matrix q_eig = to_eigenbasis(q, s).matrix();
        const double norm = q_eig.norm();
        if (norm == 0.0) throw DomainError("conserved quantity #" + std::to_string(j) + " is zero");
        double res2 = 0.0;
        for (Index a = 0; a < s.dim(); ++a) {
            for (Index b = 0; b < s.dim(); ++b) {
                const double d = s.energies(a) - s.energies(b);
                res2 += d * d * std::norm(q_eig(a, b));
            }
        }
        const double residual = std::sqrt(res2) / norm;
        if (residual > tau_dyn) {
            std::ostringstream msg;
            msg << "conserved quantity #" << j << " does not commute with H (residual " << residual
                << ")";
            throw DomainError(msg.str());
        }
        block.members.push_back({"Q" + std::to_string(j), q, 0.0, residual});
    }
    if (block.members.empty()) return 0.0;
    return BlockEvaluator(ensemble, o).mazur_weight(block);
}

double conserved_mazur_bound(const SymmetryBlock& conserved, const ThermalEnsemble& ensemble,
                             const Operator& o) {
    if (std::abs(conserved.omega) > effective_tol(conserved, ensemble.spectral())) {
        throw DomainError("conserved block has nonzero frequency");
    }
    return BlockEvaluator(ensemble, o).mazur_weight(conserved);
}

// --------------------------------------------------------------------------

namespace {

// tr(X Y) without forming the product.
Complex trace_product(const Matrix& x, const Matrix& y) { return x.cwiseProduct(y.transpose()).sum(); }

}  // namespace

LocalCapReport local_cap(const Operator& a_loc, std::span<const HermitianOperator> local_terms,
                         const ThermalEnsemble& ensemble, int n_sites) {
    if (a_loc.dim() != ensemble.dim()) throw DomainError("local_cap: dimension mismatch");
    const auto support = operator_support(a_loc, n_sites);
    if (support.empty()) throw DomainError("local_cap: operator acts trivially on every site");
    for (std::size_t i = 1; i < support.size(); ++i) {
        if (support[i] != support[i - 1] + 1) {
            throw DomainError("local_cap: support is not a contiguous range of sites");
        }
    }

    LocalCapReport rep;
    rep.first_site = support.front();
    rep.last_site = support.back();
    rep.range = rep.last_site - rep.first_site;
    rep.cap = 0.25 * static_cast<double>((rep.range + 1) * (rep.range + 1));

    const Matrix rho = ensemble.density_matrix();
    const Index dim = ensemble.dim();
    Matrix inside = Matrix::Zero(dim, dim);
    Matrix outside = Matrix::Zero(dim, dim);
    for (std::size_t t = 0; t < local_terms.size(); ++t) {
        const auto& term = local_terms[t];
        if (term.dim() != dim) throw DomainError("local_cap: term dimension mismatch");
        const auto term_support = operator_support(term, n_sites);
        if (term_support.size() != 1) {
            throw DomainError("local_cap: term #" + std::to_string(t) + " is not single-site");
        }
        // A single-site term is I x tau x I; tau sits in the rows and columns
        // where every other site is |up>.
        const Index bit = Index{1} << (n_sites - 1 - term_support.front());
        Eigen::Matrix2cd tau;
        tau << term(0, 0), term(0, bit), term(bit, 0), term(bit, bit);
        const Eigen::Vector2d ev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd>(tau).eigenvalues();
        const double width = ev(1) - ev(0);
        if (std::abs(width - 1.0) > 1e-9) {
            throw DomainError("local_cap: term #" + std::to_string(t) + " does not have unit width");
        }
        const double mean = trace_product(term.matrix(), rho).real();
        if (std::abs(mean) > 1e-9) {
            throw DomainError("local_cap: term #" + std::to_string(t) + " has nonzero thermal mean");
        }
        const int site = term_support.front();
        if (site >= rep.first_site && site <= rep.last_site) {
            inside += term.matrix();
        } else {
            outside += term.matrix();
        }
    }

    const Matrix ad = a_loc.matrix().adjoint();
    const Matrix ad_rho = rho * ad;  // tr(A^dag X rho) = tr(X rho A^dag)
    const double norm_aa = trace_product(a_loc.matrix(), ad_rho).real();
    const double scale = a_loc.matrix().squaredNorm() / static_cast<double>(dim);
    if (!(norm_aa > 1e-14 * scale)) throw DomainError("local_cap: <A^dag A> vanishes");
    const Complex overlap = trace_product(inside + outside, ad_rho);
    rep.value = std::norm(overlap) / norm_aa;
    rep.exterior = std::abs(trace_product(outside, ad_rho));
    rep.holds = rep.value <= rep.cap + 1e-9;
    return rep;
}

}  // namespace qfidyn
