#pragma once

#include <stdexcept>
#include <string>

namespace qfidyn {

// Bad input: out-of-range sites, dimension mismatch, non-Hermitian where a
// Hermitian operator is required, symmetry that does not belong to H, ...
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// Numerical failure: eigensolver did not converge, indefinite Gram matrix.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qfidyn
