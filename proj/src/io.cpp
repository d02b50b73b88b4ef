#include "qfidyn/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

namespace qfidyn {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ParseError(path + ": " + what, 0);
}

json parse_text(std::string_view text) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        const auto end = std::min<std::size_t>(e.byte, text.size());
        const int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + end, '\n'));
        std::ostringstream msg;
        msg << "line " << line << ": " << e.what();
        throw ParseError(msg.str(), line);
    }
}

bool blank(std::string_view text) {
    return std::all_of(text.begin(), text.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
}

Complex parse_coefficient(const json& j, const std::string& path) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
        return {j[0].get<double>(), j[1].get<double>()};
    }
    fail(path, "coefficient must be a number or [re, im]");
}

std::vector<PauliString> parse_terms(const json& j, const std::string& path) {
    if (!j.is_array()) fail(path, "expected an array of Pauli-string terms");
    std::vector<PauliString> out;
    for (std::size_t t = 0; t < j.size(); ++t) {
        const std::string tp = path + "[" + std::to_string(t) + "]";
        const json& term = j[t];
        if (!term.is_object()) fail(tp, "term must be an object");
        PauliString ps;
        if (term.contains("coefficient")) ps.coefficient = parse_coefficient(term["coefficient"], tp + ".coefficient");
        if (!term.contains("factors")) fail(tp, "missing \"factors\"");
        const json& factors = term["factors"];
        if (!factors.is_array()) fail(tp + ".factors", "expected an array");
        for (std::size_t f = 0; f < factors.size(); ++f) {
            const std::string fp = tp + ".factors[" + std::to_string(f) + "]";
            const json& fj = factors[f];
            if (!fj.is_object() || !fj.contains("site") || !fj.contains("axis")) {
                fail(fp, "factor needs \"site\" and \"axis\"");
            }
            if (!fj["site"].is_number_integer() || fj["site"].get<long long>() < 0) {
                fail(fp + ".site", "site must be a nonnegative integer");
            }
            if (!fj["axis"].is_string()) fail(fp + ".axis", "axis must be a string");
            PauliFactor pf;
            pf.site = fj["site"].get<int>();
            try {
                pf.axis = parse_axis(fj["axis"].get<std::string>());
            } catch (const DomainError& e) {
                fail(fp + ".axis", e.what());
            }
            ps.factors.push_back(pf);
        }
        out.push_back(std::move(ps));
    }
    return out;
}

LabeledOperator parse_labeled(const json& j, const std::string& path, std::size_t index) {
    LabeledOperator op;
    if (j.is_array()) {
        op.label = "op" + std::to_string(index);
        op.terms = parse_terms(j, path);
        return op;
    }
    if (!j.is_object()) fail(path, "expected an operator object");
    if (j.contains("label")) {
        if (!j["label"].is_string()) fail(path + ".label", "label must be a string");
        op.label = j["label"].get<std::string>();
    } else {
        op.label = "op" + std::to_string(index);
    }
    if (!j.contains("terms")) fail(path, "missing \"terms\"");
    op.terms = parse_terms(j["terms"], path + ".terms");
    return op;
}

json double_or_inf(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return x;
}

}  // namespace

std::vector<PauliString> pauli_terms_from_json(const json& j) { return parse_terms(j, "terms"); }

json to_json(const PauliString& ps) {
    json factors = json::array();
    for (const auto& f : ps.factors) factors.push_back({{"site", f.site}, {"axis", to_string(f.axis)}});
    return {{"coefficient", {ps.coefficient.real(), ps.coefficient.imag()}}, {"factors", factors}};
}

LabeledOperator parse_operator_json(std::string_view text) {
    if (blank(text)) throw ParseError("empty operator file", 1);
    return parse_labeled(parse_text(text), "operator", 0);
}

SymmetryFile parse_symmetry_json(std::string_view text) {
    SymmetryFile out;
    if (blank(text)) return out;
    const json j = parse_text(text);
    const json* ops = &j;
    if (j.is_object()) {
        if (j.contains("sites")) {
            if (!j["sites"].is_number_integer() || j["sites"].get<int>() < 1) {
                fail("sites", "must be a positive integer");
            }
            out.sites = j["sites"].get<int>();
        }
        if (!j.contains("operators")) fail("root", "missing \"operators\"");
        ops = &j["operators"];
    }
    if (!ops->is_array()) fail("operators", "expected an array");
    for (std::size_t i = 0; i < ops->size(); ++i) {
        out.operators.push_back(parse_labeled((*ops)[i], "operators[" + std::to_string(i) + "]", i));
    }
    return out;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DomainError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int max_site_count(const SymmetryFile& file) {
    int n = 0;
    for (const auto& op : file.operators) {
        for (const auto& t : op.terms) {
            for (const auto& f : t.factors) n = std::max(n, f.site + 1);
        }
    }
    return n;
}

json to_json(const QfiReport& report) {
    json rows = json::array();
    for (const auto& c : report.per_frequency) {
        rows.push_back({{"omega", c.omega}, {"D", c.d}, {"contribution", c.contribution}});
    }
    return {{"value", report.value},
            {"bound", report.bound},
            {"saturated", report.saturated},
            {"per_frequency", rows}};
}

json to_json(const QfiMatrix& m) {
    json rows = json::array();
    for (Index a = 0; a < m.values.rows(); ++a) {
        json row = json::array();
        for (Index b = 0; b < m.values.cols(); ++b) row.push_back(m.values(a, b));
        rows.push_back(row);
    }
    return {{"values", rows}, {"commuting", m.commuting}};
}

json ensemble_to_json(const ThermalEnsemble& ensemble) {
    const auto& e = ensemble.spectral().energies;
    return {{"beta", double_or_inf(ensemble.beta())},
            {"energies", std::vector<double>(e.data(), e.data() + e.size())},
            {"weights", std::vector<double>(ensemble.weights().data(),
                                            ensemble.weights().data() + ensemble.dim())}};
}

ThermalEnsemble ensemble_from_json(const json& j) {
    if (!j.is_object() || !j.contains("beta") || !j.contains("energies") || !j.contains("weights")) {
        fail("ensemble", "needs \"beta\", \"energies\" and \"weights\"");
    }
    double beta = 0.0;
    if (j["beta"].is_string() && j["beta"].get<std::string>() == "inf") {
        beta = kInfiniteBeta;
    } else if (j["beta"].is_number()) {
        beta = j["beta"].get<double>();
    } else {
        fail("ensemble.beta", "must be a number or \"inf\"");
    }
    std::vector<double> energies, weights;
    try {
        energies = j["energies"].get<std::vector<double>>();
        weights = j["weights"].get<std::vector<double>>();
    } catch (const json::exception&) {
        fail("ensemble", "energies and weights must be arrays of numbers");
    }
    if (energies.size() != weights.size() || energies.empty()) {
        fail("ensemble", "energies and weights must be nonempty and of equal length");
    }
    if (!std::is_sorted(energies.begin(), energies.end())) fail("ensemble.energies", "must be ascending");
    const auto dim = static_cast<Index>(energies.size());
    Eigen::VectorXd e = Eigen::Map<const Eigen::VectorXd>(energies.data(), dim);
    Eigen::VectorXd p = Eigen::Map<const Eigen::VectorXd>(weights.data(), dim);
    Matrix h = e.cast<Complex>().asDiagonal();
    auto spectral = std::make_shared<SpectralDecomposition>(diagonalize(HermitianOperator(Operator(h))));
    spectral->energies = e;
    spectral->vectors = Matrix::Identity(dim, dim);
    return ThermalEnsemble(std::move(spectral), beta, std::move(p));
}

json to_json(const VerificationEntry& entry) {
    json j{{"label", entry.label},
           {"omega", entry.omega},
           {"residual", entry.residual},
           {"support", entry.support},
           {"passed", entry.passed}};
    if (entry.cap) {
        j["cap"] = {{"range", entry.cap->range},
                    {"cap", entry.cap->cap},
                    {"value", entry.cap->value},
                    {"exterior", entry.cap->exterior},
                    {"holds", entry.cap->holds}};
    }
    return j;
}

}  // namespace qfidyn
