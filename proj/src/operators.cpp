#include "qfidyn/operators.hpp"

#include "qfidyn/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace qfidyn {

namespace {

void require_same_dim(const Operator& a, const Operator& b, const char* where) {
    if (a.dim() != b.dim()) {
        throw DomainError(std::string(where) + ": dimension mismatch (" + std::to_string(a.dim()) +
                          " vs " + std::to_string(b.dim()) + ")");
    }
}

void require_site(int site, int n_sites) {
    if (n_sites < 1 || n_sites > 30) {
        throw DomainError("number of sites must be in [1, 30], got " + std::to_string(n_sites));
    }
    if (site < 0 || site >= n_sites) {
        throw DomainError("site " + std::to_string(site) + " out of range for " +
                          std::to_string(n_sites) + " sites");
    }
}

// Action of one Pauli factor on a single basis bit. Returns false when the
// factor annihilates the state.
bool apply_factor(Axis axis, int& bit, Complex& amp) {
    switch (axis) {
        case Axis::I:
            return true;
        case Axis::X:
            bit ^= 1;
            return true;
        case Axis::Y:
            amp *= (bit == 0) ? Complex(0.0, 1.0) : Complex(0.0, -1.0);
            bit ^= 1;
            return true;
        case Axis::Z:
            if (bit == 1) amp = -amp;
            return true;
        case Axis::Plus:  // |up><down|
            if (bit == 0) return false;
            bit = 0;
            return true;
        case Axis::Minus:  // |down><up|
            if (bit == 1) return false;
            bit = 1;
            return true;
    }
    return false;
}

}  // namespace

// --------------------------------------------------------------------------

Operator::Operator(Matrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) {
        throw DomainError("operator matrix must be square");
    }
}

Operator Operator::zero(Index dim) { return Operator(Matrix::Zero(dim, dim)); }

Operator Operator::identity(Index dim) { return Operator(Matrix::Identity(dim, dim)); }

Operator Operator::adjoint() const { return Operator(m_.adjoint()); }

bool Operator::is_hermitian(double rel_tol) const {
    if (m_.size() == 0) return true;
    const double scale = m_.cwiseAbs().maxCoeff();
    if (scale == 0.0) return true;
    return (m_ - m_.adjoint()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

Operator& Operator::operator+=(const Operator& other) {
    require_same_dim(*this, other, "operator+");
    m_ += other.m_;
    return *this;
}

Operator& Operator::operator-=(const Operator& other) {
    require_same_dim(*this, other, "operator-");
    m_ -= other.m_;
    return *this;
}

Operator& Operator::operator*=(Complex c) {
    m_ *= c;
    return *this;
}

Operator operator+(Operator a, const Operator& b) { return a += b; }
Operator operator-(Operator a, const Operator& b) { return a -= b; }

Operator operator*(const Operator& a, const Operator& b) {
    require_same_dim(a, b, "operator*");
    return Operator(a.matrix() * b.matrix());
}

Operator operator*(Complex c, Operator a) { return a *= c; }

HermitianOperator::HermitianOperator(Operator op) : Operator(std::move(op)) {
    if (!is_hermitian()) {
        throw DomainError("operator is not Hermitian");
    }
}

HermitianOperator HermitianOperator::identity(Index dim) {
    return HermitianOperator(Operator::identity(dim));
}

HermitianOperator operator+(const HermitianOperator& a, const HermitianOperator& b) {
    return HermitianOperator(static_cast<const Operator&>(a) + b);
}

HermitianOperator operator-(const HermitianOperator& a, const HermitianOperator& b) {
    return HermitianOperator(static_cast<const Operator&>(a) - b);
}

HermitianOperator operator*(double c, const HermitianOperator& a) {
    return HermitianOperator(Complex(c, 0.0) * static_cast<const Operator&>(a));
}

// --------------------------------------------------------------------------

Axis parse_axis(std::string_view s) {
    std::string t(s);
    std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
    if (t == "i") return Axis::I;
    if (t == "x") return Axis::X;
    if (t == "y") return Axis::Y;
    if (t == "z") return Axis::Z;
    if (t == "+" || t == "plus") return Axis::Plus;
    if (t == "-" || t == "minus") return Axis::Minus;
    throw DomainError("unknown Pauli axis '" + std::string(s) + "'");
}

std::string to_string(Axis a) {
    switch (a) {
        case Axis::I: return "I";
        case Axis::X: return "x";
        case Axis::Y: return "y";
        case Axis::Z: return "z";
        case Axis::Plus: return "+";
        case Axis::Minus: return "-";
    }
    return "?";
}

Operator pauli_site(Axis axis, int site, int n_sites) {
    PauliString ps;
    ps.factors.push_back({site, axis});
    return to_operator(ps, n_sites);
}

Operator to_operator(const PauliString& ps, int n_sites) {
    std::vector<bool> seen(static_cast<std::size_t>(std::max(n_sites, 0)), false);
    for (const auto& f : ps.factors) {
        require_site(f.site, n_sites);
        if (seen[static_cast<std::size_t>(f.site)]) {
            throw DomainError("Pauli string repeats site " + std::to_string(f.site));
        }
        seen[static_cast<std::size_t>(f.site)] = true;
    }
    if (n_sites < 1 || n_sites > 30) {
        throw DomainError("number of sites must be in [1, 30]");
    }

    const Index dim = Index{1} << n_sites;
    Matrix m = Matrix::Zero(dim, dim);
    for (Index col = 0; col < dim; ++col) {
        Index row = col;
        Complex amp = ps.coefficient;
        bool alive = true;
        for (const auto& f : ps.factors) {
            const int pos = n_sites - 1 - f.site;
            int bit = static_cast<int>((row >> pos) & 1);
            if (!apply_factor(f.axis, bit, amp)) {
                alive = false;
                break;
            }
            row = (row & ~(Index{1} << pos)) | (Index{bit} << pos);
        }
        if (alive) m(row, col) += amp;
    }
    return Operator(std::move(m));
}

Operator pauli_sum(std::span<const PauliString> terms, int n_sites) {
    if (n_sites < 1 || n_sites > 30) {
        throw DomainError("number of sites must be in [1, 30]");
    }
    Operator out = Operator::zero(Index{1} << n_sites);
    for (const auto& t : terms) out += to_operator(t, n_sites);
    return out;
}

Operator embed(const Matrix& local, int first, int n_sites) {
    if (local.rows() != local.cols()) throw DomainError("embed: local matrix must be square");
    const int k = sites_for_dim(local.rows());
    if (first < 0 || k < 1 || first + k > n_sites) {
        throw DomainError("embed: local block does not fit into the chain");
    }
    const Index left = Index{1} << first;
    const Index right = Index{1} << (n_sites - first - k);
    const Index ld = local.rows();
    const Index dim = left * ld * right;
    Matrix m = Matrix::Zero(dim, dim);
    for (Index l = 0; l < left; ++l) {
        for (Index r = 0; r < right; ++r) {
            for (Index a = 0; a < ld; ++a) {
                for (Index b = 0; b < ld; ++b) {
                    m((l * ld + a) * right + r, (l * ld + b) * right + r) = local(a, b);
                }
            }
        }
    }
    return Operator(std::move(m));
}

// --------------------------------------------------------------------------

void validate(const SpinChainSpec& spec) {
    if (spec.sites < 2) {
        throw DomainError("spin chain needs at least 2 sites, got " + std::to_string(spec.sites));
    }
    if (spec.sites > spec.max_sites) {
        throw DomainError("spin chain with " + std::to_string(spec.sites) +
                          " sites exceeds the cap of " + std::to_string(spec.max_sites) +
                          " (raise max_sites to override)");
    }
    if (!std::isfinite(spec.coupling) || !std::isfinite(spec.field)) {
        throw DomainError("coupling and field must be finite");
    }
}

HermitianOperator build_xx_hamiltonian(const SpinChainSpec& spec) {
    validate(spec);
    const int n = spec.sites;
    std::vector<PauliString> terms;
    auto add_bond = [&](int i, int j) {
        terms.push_back({Complex(spec.coupling, 0.0), {{i, Axis::X}, {j, Axis::X}}});
        terms.push_back({Complex(spec.coupling, 0.0), {{i, Axis::Y}, {j, Axis::Y}}});
    };
    for (int i = 0; i + 1 < n; ++i) add_bond(i, i + 1);
    if (spec.boundary == Boundary::Periodic && n > 2) add_bond(n - 1, 0);
    for (int i = 0; i < n; ++i) {
        terms.push_back({Complex(spec.field, 0.0), {{i, Axis::Z}}});
    }
    return HermitianOperator(pauli_sum(terms, n));
}

GeneratorKind parse_generator_kind(std::string_view s) {
    if (s == "antisymmetric-x") return GeneratorKind::AntisymmetricX;
    if (s == "staggered-x") return GeneratorKind::StaggeredX;
    if (s == "uniform-x") return GeneratorKind::UniformX;
    if (s == "uniform-z") return GeneratorKind::UniformZ;
    throw DomainError("unknown generator kind '" + std::string(s) + "'");
}

std::string to_string(GeneratorKind k) {
    switch (k) {
        case GeneratorKind::AntisymmetricX: return "antisymmetric-x";
        case GeneratorKind::StaggeredX: return "staggered-x";
        case GeneratorKind::UniformX: return "uniform-x";
        case GeneratorKind::UniformZ: return "uniform-z";
    }
    return "?";
}

std::vector<HermitianOperator> local_generator_terms(GeneratorKind kind, int n_sites) {
    if (kind == GeneratorKind::AntisymmetricX && n_sites != 2) {
        throw DomainError("antisymmetric-x generator is defined for 2 sites only");
    }
    if (n_sites < 1) throw DomainError("generator needs at least one site");
    std::vector<HermitianOperator> out;
    out.reserve(static_cast<std::size_t>(n_sites));
    for (int i = 0; i < n_sites; ++i) {
        double sign = 1.0;
        Axis axis = Axis::X;
        switch (kind) {
            case GeneratorKind::AntisymmetricX:
            case GeneratorKind::StaggeredX:
                sign = (i % 2 == 0) ? 1.0 : -1.0;
                break;
            case GeneratorKind::UniformX:
                break;
            case GeneratorKind::UniformZ:
                axis = Axis::Z;
                break;
        }
        out.emplace_back(Complex(0.5 * sign, 0.0) * pauli_site(axis, i, n_sites));
    }
    return out;
}

HermitianOperator local_generator(GeneratorKind kind, int n_sites) {
    const auto terms = local_generator_terms(kind, n_sites);
    Operator sum = Operator::zero(terms.front().dim());
    for (const auto& t : terms) sum += t;
    return HermitianOperator(std::move(sum));
}

HermitianOperator local_generator(std::span<const PauliString> terms, int n_sites) {
    return HermitianOperator(pauli_sum(terms, n_sites));
}

// --------------------------------------------------------------------------

Operator commutator(const Operator& a, const Operator& b) {
    require_same_dim(a, b, "commutator");
    return Operator(a.matrix() * b.matrix() - b.matrix() * a.matrix());
}

HermitianOperator anticommutator(const HermitianOperator& a, const HermitianOperator& b) {
    require_same_dim(a, b, "anticommutator");
    return HermitianOperator(Operator(a.matrix() * b.matrix() + b.matrix() * a.matrix()));
}

Complex hs_inner(const Operator& a, const Operator& b) {
    require_same_dim(a, b, "hs_inner");
    return (a.matrix().adjoint() * b.matrix()).trace();
}

std::vector<NamedOperator> two_qubit_dynamical_symmetries() {
    const Operator lower = pauli_site(Axis::Minus, 0, 2);
    const Operator tail = pauli_site(Axis::Z, 0, 2) * pauli_site(Axis::Minus, 1, 2);
    const Operator a1 = lower - tail;
    const Operator a3 = lower + tail;
    return {{"A1", a1}, {"A2", a1.adjoint()}, {"A3", a3}, {"A4", a3.adjoint()}};
}

int sites_for_dim(Index dim) {
    int n = 0;
    while ((Index{1} << n) < dim) ++n;
    if ((Index{1} << n) != dim) {
        throw DomainError("dimension " + std::to_string(dim) + " is not a power of 2");
    }
    return n;
}

std::vector<int> operator_support(const Operator& a, int n_sites, double atol) {
    if (a.dim() != (Index{1} << n_sites)) {
        throw DomainError("operator_support: dimension does not match 2^n_sites");
    }
    const Matrix& m = a.matrix();
    const Index dim = a.dim();
    std::vector<int> support;
    for (int site = 0; site < n_sites; ++site) {
        const Index mask = Index{1} << (n_sites - 1 - site);
        bool trivial = true;
        for (Index c = 0; c < dim && trivial; ++c) {
            for (Index r = 0; r < dim; ++r) {
                if ((r & mask) != (c & mask)) {
                    if (std::abs(m(r, c)) > atol) {
                        trivial = false;
                        break;
                    }
                } else if ((r & mask) == 0) {
                    if (std::abs(m(r, c) - m(r | mask, c | mask)) > atol) {
                        trivial = false;
                        break;
                    }
                }
            }
        }
        if (!trivial) support.push_back(site);
    }
    return support;
}

}  // namespace qfidyn
