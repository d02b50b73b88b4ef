#pragma once

#include "qfidyn/operators.hpp"
#include "qfidyn/spectral.hpp"

#include <memory>

namespace support {

using namespace qfidyn;

inline std::shared_ptr<const SpectralDecomposition> spectral_of(const Matrix& h) {
    return std::make_shared<const SpectralDecomposition>(diagonalize(HermitianOperator(Operator(h))));
}

inline ThermalEnsemble ensemble_of(const Matrix& h, double beta) {
    return gibbs_weights(spectral_of(h), beta);
}

inline HermitianOperator herm(const Matrix& m) { return HermitianOperator(Operator(m)); }

inline double rel_gap(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace support
