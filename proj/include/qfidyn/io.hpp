#pragma once

// JSON input/output.
//
// Pauli-string sums are lists of records
//   {"coefficient": [re, im], "factors": [{"site": 0, "axis": "x"}, ...]}
// with 0-based sites and axis one of i, x, y, z, +, - (also "plus", "minus").
// A coefficient may also be a plain number. A labeled operator is
//   {"label": "A1", "terms": [...]}
// and a symmetry file is either {"sites": N, "operators": [...]} or a bare
// array of labeled operators.

#include "qfidyn/dynsym.hpp"
#include "qfidyn/errors.hpp"
#include "qfidyn/metrology.hpp"
#include "qfidyn/operators.hpp"
#include "qfidyn/spectral.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qfidyn {

// Malformed input. line() is 1-based, 0 when the position is unknown.
class ParseError : public DomainError {
public:
    ParseError(const std::string& what, int line) : DomainError(what), line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

struct LabeledOperator {
    std::string label;
    std::vector<PauliString> terms;
};

struct SymmetryFile {
    std::optional<int> sites;
    std::vector<LabeledOperator> operators;
};

std::vector<PauliString> pauli_terms_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PauliString& ps);

// Accepts a bare term list or a labeled operator.
LabeledOperator parse_operator_json(std::string_view text);
SymmetryFile parse_symmetry_json(std::string_view text);

std::string read_text_file(const std::string& path);

// Largest site index + 1 over all terms (0 if there are none).
int max_site_count(const SymmetryFile& file);

nlohmann::json to_json(const QfiReport& report);
nlohmann::json to_json(const QfiMatrix& m);

// {"beta": b | "inf", "energies": [...], "weights": [...]}
nlohmann::json ensemble_to_json(const ThermalEnsemble& ensemble);
// The result lives in its own eigenbasis (eigenvectors are the identity).
ThermalEnsemble ensemble_from_json(const nlohmann::json& j);

struct VerificationEntry {
    std::string label;
    double omega = 0.0;
    double residual = 0.0;
    std::vector<int> support;
    std::optional<LocalCapReport> cap;
    bool passed = false;  // residual <= tau_dyn
};

nlohmann::json to_json(const VerificationEntry& entry);

}  // namespace qfidyn
