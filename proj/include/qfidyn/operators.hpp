#pragma once

// Dense many-body operators on spin-1/2 chains.
//
// Basis convention: site 0 is the most significant qubit of the basis index
// and |up> (sigma^z = +1) is bit value 0. For two sites the basis order is
// |uu>, |ud>, |du>, |dd>. Storage is Eigen's column-major complex matrix.

#include <Eigen/Dense>

#include <complex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qfidyn {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Index = Eigen::Index;

inline constexpr int kDefaultMaxSites = 12;
inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kSupportTol = 1e-10;

class Operator {
public:
    Operator() = default;
    explicit Operator(Matrix m);

    static Operator zero(Index dim);
    static Operator identity(Index dim);

    Index dim() const noexcept { return m_.rows(); }
    const Matrix& matrix() const noexcept { return m_; }
    Complex operator()(Index row, Index col) const { return m_(row, col); }

    Operator adjoint() const;
    bool is_hermitian(double rel_tol = kHermitianTol) const;
    double hs_norm() const { return m_.norm(); }

    Operator& operator+=(const Operator& other);
    Operator& operator-=(const Operator& other);
    Operator& operator*=(Complex c);

private:
    Matrix m_;
};

Operator operator+(Operator a, const Operator& b);
Operator operator-(Operator a, const Operator& b);
Operator operator*(const Operator& a, const Operator& b);
Operator operator*(Complex c, Operator a);

// Operator whose entries were checked to equal their conjugate transpose.
class HermitianOperator : public Operator {
public:
    HermitianOperator() = default;
    // Throws DomainError if `op` is not Hermitian within kHermitianTol relative.
    explicit HermitianOperator(Operator op);

    static HermitianOperator identity(Index dim);
};

HermitianOperator operator+(const HermitianOperator& a, const HermitianOperator& b);
HermitianOperator operator-(const HermitianOperator& a, const HermitianOperator& b);
HermitianOperator operator*(double c, const HermitianOperator& a);

// --------------------------------------------------------------------------
// Pauli strings

enum class Axis { I, X, Y, Z, Plus, Minus };

Axis parse_axis(std::string_view s);
std::string to_string(Axis a);

struct PauliFactor {
    int site = 0;
    Axis axis = Axis::I;
};

struct PauliString {
    Complex coefficient{1.0, 0.0};
    std::vector<PauliFactor> factors;
};

// I x ... x sigma^axis x ... x I on 2^n_sites; sigma^{+-} = (sigma^x +- i sigma^y)/2.
Operator pauli_site(Axis axis, int site, int n_sites);
Operator to_operator(const PauliString& ps, int n_sites);
Operator pauli_sum(std::span<const PauliString> terms, int n_sites);

// I_{2^first} x local x I, where local acts on consecutive sites starting at `first`.
Operator embed(const Matrix& local, int first, int n_sites);

// --------------------------------------------------------------------------
// Models

enum class Boundary { Open, Periodic };

struct SpinChainSpec {
    int sites = 2;
    double coupling = 1.0;  // J
    double field = 0.0;     // h
    Boundary boundary = Boundary::Open;
    int max_sites = kDefaultMaxSites;
};

void validate(const SpinChainSpec& spec);

// H = J sum_i (sx_i sx_{i+1} + sy_i sy_{i+1}) + h sum_i sz_i
HermitianOperator build_xx_hamiltonian(const SpinChainSpec& spec);

enum class GeneratorKind { AntisymmetricX, StaggeredX, UniformX, UniformZ };

GeneratorKind parse_generator_kind(std::string_view s);
std::string to_string(GeneratorKind k);

// Single-site terms o_i with eigenvalues +-1/2; local_generator is their sum.
std::vector<HermitianOperator> local_generator_terms(GeneratorKind kind, int n_sites);
HermitianOperator local_generator(GeneratorKind kind, int n_sites);
HermitianOperator local_generator(std::span<const PauliString> terms, int n_sites);

struct NamedOperator {
    std::string label;
    Operator op;
};

// Two-site XX model eigenoperators (sites 0 and 1 of a 2-site system):
//   A1 = s1^- - s1^z s2^-,  A2 = A1^dag,  A3 = s1^- + s1^z s2^-,  A4 = A3^dag
// with [H, A] = omega A at omega = -2(1+h), 2(1+h), 2(1-h), -2(1-h) (J = 1).
std::vector<NamedOperator> two_qubit_dynamical_symmetries();

// --------------------------------------------------------------------------
// Algebra

Operator commutator(const Operator& a, const Operator& b);
HermitianOperator anticommutator(const HermitianOperator& a, const HermitianOperator& b);

// Tr(a^dag b)
Complex hs_inner(const Operator& a, const Operator& b);

// Sites on which `a` does not act as the identity, ascending.
std::vector<int> operator_support(const Operator& a, int n_sites, double atol = kSupportTol);

int sites_for_dim(Index dim);

}  // namespace qfidyn
