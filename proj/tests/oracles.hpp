#pragma once

// Independent dense-matrix reference implementations. They work from the
// density matrix exp(-beta H)/Z (Pade matrix exponential) and never touch
// the library's eigenbasis machinery.

#include "qfidyn/operators.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <random>
#include <vector>

namespace oracle {

using qfidyn::Complex;
using qfidyn::Matrix;

inline Matrix random_hermitian(int dim, std::mt19937& rng, double scale = 1.0) {
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix a(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) a(i, j) = Complex(g(rng), g(rng));
    return scale * 0.5 * (a + a.adjoint());
}

inline Matrix random_matrix(int dim, std::mt19937& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix a(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) a(i, j) = Complex(g(rng), g(rng));
    return a;
}

inline Matrix random_unitary(int dim, std::mt19937& rng) {
    Eigen::HouseholderQR<Matrix> qr(random_matrix(dim, rng));
    return qr.householderQ();
}

// exp(-beta (H - E0)) / Z; only the scalar E0 comes from an eigensolver.
inline Matrix gibbs_rho(const Matrix& h, double beta) {
    const double shift = Eigen::SelfAdjointEigenSolver<Matrix>(h, Eigen::EigenvaluesOnly).eigenvalues()(0);
    const Matrix shifted = h - shift * Matrix::Identity(h.rows(), h.cols());
    Matrix rho = (-beta * shifted).exp();
    rho /= rho.trace();
    return 0.5 * (rho + rho.adjoint());
}

// rho^a = exp(-a beta (H - E0)) / Z^a, exact for tiny populations where
// powers of rho's own eigenvalues would amplify rounding noise.
inline Matrix gibbs_rho_power(const Matrix& h, double beta, double a) {
    const double shift = Eigen::SelfAdjointEigenSolver<Matrix>(h, Eigen::EigenvaluesOnly).eigenvalues()(0);
    const Matrix shifted = h - shift * Matrix::Identity(h.rows(), h.cols());
    const double z = Matrix((-beta * shifted).exp()).trace().real();
    Matrix r = Matrix((-a * beta * shifted).exp()) / std::pow(z, a);
    return 0.5 * (r + r.adjoint());
}

inline Complex expect(const Matrix& x, const Matrix& rho) { return (x * rho).trace(); }

// QFI from the eigendecomposition of rho itself.
inline double qfi(const Matrix& o, const Matrix& rho) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
    const Eigen::VectorXd p = es.eigenvalues().cwiseMax(0.0);
    const Matrix oe = es.eigenvectors().adjoint() * o * es.eigenvectors();
    double f = 0.0;
    for (int m = 0; m < p.size(); ++m)
        for (int n = 0; n < p.size(); ++n) {
            if (p(m) + p(n) < 1e-15) continue;
            f += 2.0 * std::pow(p(n) - p(m), 2) / (p(n) + p(m)) * std::norm(oe(m, n));
        }
    return f;
}

// Hermitian matrix power through rho's eigenbasis.
inline Matrix rho_power(const Matrix& rho, double a) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
    Eigen::VectorXd p = es.eigenvalues().cwiseMax(0.0);
    for (int i = 0; i < p.size(); ++i) p(i) = p(i) > 0.0 ? std::pow(p(i), a) : 0.0;
    return es.eigenvectors() * p.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

// -tr([O, rho^a][O, rho^{1-a}]) / 2
inline double skew_of(const Matrix& o, const Matrix& ra, const Matrix& rb) {
    const Matrix c1 = o * ra - ra * o, c2 = o * rb - rb * o;
    return -0.5 * (c1 * c2).trace().real();
}

inline double skew(const Matrix& o, const Matrix& rho, double a) {
    return skew_of(o, rho_power(rho, a), rho_power(rho, 1.0 - a));
}

inline double skew(const Matrix& o, const Matrix& h, double beta, double a) {
    return skew_of(o, gibbs_rho_power(h, beta, a), gibbs_rho_power(h, beta, 1.0 - a));
}

inline double variance(const Matrix& o, const Matrix& rho) {
    const double m = expect(o, rho).real();
    return expect(o * o, rho).real() - m * m;
}

// D = sum_j |<Aj_perp^dag O>|^2 / <Aj_perp^dag Aj_perp> after Gram-Schmidt in
// the thermal inner product (X, Y) = tr(rho X^dag Y).
inline double mazur_gram_schmidt(const std::vector<Matrix>& members, const Matrix& o,
                                 const Matrix& rho, double drop = 1e-12) {
    std::vector<Matrix> basis;
    std::vector<double> norms;
    double scale = 0.0;
    for (const auto& a : members) scale = std::max(scale, expect(a.adjoint() * a, rho).real());
    double d = 0.0;
    for (const auto& a : members) {
        Matrix v = a;
        for (std::size_t k = 0; k < basis.size(); ++k) {
            const Complex c = expect(basis[k].adjoint() * v, rho) / norms[k];
            v -= c * basis[k];
        }
        const double nv = expect(v.adjoint() * v, rho).real();
        if (nv <= drop * scale) continue;
        basis.push_back(v);
        norms.push_back(nv);
        d += std::norm(expect(v.adjoint() * o, rho)) / nv;
    }
    return d;
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline Matrix sx() { Matrix m(2, 2); m << 0, 1, 1, 0; return m; }
inline Matrix sy() { Matrix m(2, 2); m << 0, Complex(0, -1), Complex(0, 1), 0; return m; }
inline Matrix sz() { Matrix m(2, 2); m << 1, 0, 0, -1; return m; }
inline Matrix id2() { return Matrix::Identity(2, 2); }

// Hand-assembled two-site XX Hamiltonian.
inline Matrix xx_two_site(double h) {
    return kron(sx(), sx()) + kron(sy(), sy()) + h * (kron(sz(), id2()) + kron(id2(), sz()));
}

}  // namespace oracle
