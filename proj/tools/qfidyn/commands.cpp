#include "qfidyn/commands.hpp"

#include "qfidyn/dynsym.hpp"
#include "qfidyn/errors.hpp"
#include "qfidyn/io.hpp"
#include "qfidyn/metrology.hpp"
#include "qfidyn/operators.hpp"
#include "qfidyn/response.hpp"
#include "qfidyn/spectral.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <variant>

namespace qfidyn::cli {

namespace {

using nlohmann::json;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct VerifyFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// --------------------------------------------------------------------------
// Tables

using Cell = std::variant<double, long long, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12e", x);
    return buf;
}

std::string format_cell(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
    if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
    return std::get<std::string>(c);
}

nlohmann::ordered_json cell_json(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) {
        if (std::isnan(*d)) return "nan";
        if (std::isinf(*d)) return *d > 0 ? "inf" : "-inf";
        return *d;
    }
    if (const auto* i = std::get_if<long long>(&c)) return *i;
    return std::get<std::string>(c);
}

void write_table(std::ostream& out, const Table& t, const std::string& format) {
    if (format == "json") {
        // ordered_json keeps the column order of the CSV form
        auto rows = nlohmann::ordered_json::array();
        for (const auto& r : t.rows) {
            auto row = nlohmann::ordered_json::object();
            for (std::size_t i = 0; i < t.columns.size(); ++i) row[t.columns[i]] = cell_json(r[i]);
            rows.push_back(row);
        }
        out << rows.dump(2) << "\n";
        return;
    }
    for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
    out << "\n";
    for (const auto& r : t.rows) {
        for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << format_cell(r[i]);
        out << "\n";
    }
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw UsageError("cannot write '" + path.string() + "'");
    f << content;
}

// Writes to --out if given, else to the command's stdout.
void emit(const Table& t, const std::string& format, const std::string& out_path, std::ostream& out) {
    if (out_path.empty()) {
        write_table(out, t, format);
        return;
    }
    std::ostringstream ss;
    write_table(ss, t, format);
    write_file(out_path, ss.str());
}

// --------------------------------------------------------------------------
// Configuration

struct ModelOptions {
    std::string preset = "two-qubit";
    int sites = 0;  // 0: preset default
    double field = 0.0;
    bool field_set = false;
    double coupling = 1.0;
    std::string boundary = "open";
    int max_sites = 0;  // 0: environment or built-in default
    std::string generator;
};

struct GridOptions {
    std::vector<std::string> betas;
    std::string temp_grid = "0.05:5:100";
    std::string scale = "log";
    bool ground_state = false;
};

struct Model {
    SpinChainSpec spec;
    HermitianOperator h;
    std::shared_ptr<const SpectralDecomposition> spectral;
    HermitianOperator generator;
    std::vector<HermitianOperator> generator_terms;  // empty if not all terms are Hermitian
};

int site_cap(int flag_value) {
    if (flag_value > 0) return flag_value;
    if (const char* env = std::getenv("QFIDYN_MAX_SITES"); env && *env) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (*end != '\0' || v < 2) throw UsageError("QFIDYN_MAX_SITES must be an integer >= 2");
        return static_cast<int>(v);
    }
    return kDefaultMaxSites;
}

SpinChainSpec resolve_spec(const ModelOptions& o) {
    SpinChainSpec spec;
    if (o.preset == "two-qubit") {
        if (o.sites != 0 && o.sites != 2) throw UsageError("the two-qubit preset has exactly 2 sites");
        spec.sites = 2;
        spec.field = o.field_set ? o.field : 0.5;
    } else if (o.preset == "xx-chain") {
        spec.sites = o.sites != 0 ? o.sites : 7;
        spec.field = o.field_set ? o.field : 0.0;
    } else {
        throw UsageError("unknown preset '" + o.preset + "' (expected two-qubit or xx-chain)");
    }
    spec.coupling = o.coupling;
    if (o.boundary == "open") {
        spec.boundary = Boundary::Open;
    } else if (o.boundary == "periodic") {
        spec.boundary = Boundary::Periodic;
    } else {
        throw UsageError("unknown boundary '" + o.boundary + "' (expected open or periodic)");
    }
    spec.max_sites = site_cap(o.max_sites);
    if (spec.sites < 2) throw UsageError("need at least 2 sites");
    if (spec.sites > spec.max_sites) {
        throw UsageError("N=" + std::to_string(spec.sites) + " exceeds the site cap " +
                         std::to_string(spec.max_sites) +
                         "; raise it with --max-sites or QFIDYN_MAX_SITES");
    }
    return spec;
}

Model build_model(const ModelOptions& o, const std::string& default_generator) {
    Model m;
    m.spec = resolve_spec(o);
    m.h = build_xx_hamiltonian(m.spec);
    m.spectral = std::make_shared<const SpectralDecomposition>(diagonalize(m.h));

    const std::string gen = o.generator.empty() ? default_generator : o.generator;
    const bool is_file = gen.find(".json") != std::string::npos || std::filesystem::exists(gen);
    if (!is_file) {
        GeneratorKind kind;
        try {
            kind = parse_generator_kind(gen);
        } catch (const DomainError& e) {
            throw UsageError(e.what());
        }
        try {
            m.generator_terms = local_generator_terms(kind, m.spec.sites);
            m.generator = local_generator(kind, m.spec.sites);
        } catch (const DomainError& e) {
            throw UsageError(e.what());
        }
        return m;
    }
    const LabeledOperator op = parse_operator_json(read_text_file(gen));
    m.generator = local_generator(op.terms, m.spec.sites);
    for (const auto& t : op.terms) {
        const Operator term = to_operator(t, m.spec.sites);
        if (!term.is_hermitian()) {
            m.generator_terms.clear();
            break;
        }
        m.generator_terms.emplace_back(term);
    }
    return m;
}

double parse_beta(const std::string& s) {
    if (s == "inf") return kInfiniteBeta;
    std::size_t used = 0;
    double b = 0.0;
    try {
        b = std::stod(s, &used);
    } catch (const std::exception&) {
        throw UsageError("bad --beta value '" + s + "'");
    }
    if (used != s.size() || !(b >= 0.0)) throw UsageError("bad --beta value '" + s + "'");
    return b;
}

TemperaturePoint from_beta(double beta) {
    if (beta == kInfiniteBeta) return {0.0, beta};
    if (beta == 0.0) return {std::numeric_limits<double>::infinity(), 0.0};
    return {1.0 / beta, beta};
}

std::vector<TemperaturePoint> resolve_grid(const GridOptions& g) {
    std::vector<TemperaturePoint> pts;
    if (!g.betas.empty()) {
        for (const auto& b : g.betas) pts.push_back(from_beta(parse_beta(b)));
    } else {
        if (g.scale != "log" && g.scale != "lin") throw UsageError("--grid-scale must be log or lin");
        try {
            pts = parse_temperature_grid(g.temp_grid, g.scale == "log");
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
    }
    if (g.ground_state) pts.push_back({0.0, kInfiniteBeta});
    std::stable_sort(pts.begin(), pts.end(),
                     [](const auto& a, const auto& b) { return a.temperature < b.temperature; });
    return pts;
}

void add_model_options(CLI::App* sub, ModelOptions& m, const std::string& preset_default) {
    m.preset = preset_default;
    sub->add_option("--preset", m.preset, "model preset: two-qubit | xx-chain");
    sub->add_option("--sites", m.sites, "number of sites N");
    sub->add_option_function<double>(
        "--field", [&m](double v) { m.field = v; m.field_set = true; }, "field h");
    sub->add_option("--coupling", m.coupling, "coupling J");
    sub->add_option("--boundary", m.boundary, "open | periodic");
    sub->add_option("--max-sites", m.max_sites, "site cap (overrides QFIDYN_MAX_SITES)");
    sub->add_option("--generator", m.generator,
                    "antisymmetric-x | staggered-x | uniform-x | uniform-z | JSON file");
}

void add_grid_options(CLI::App* sub, GridOptions& g) {
    sub->add_option("--beta", g.betas, "inverse temperature(s); 'inf' for the ground state");
    sub->add_option("--temp-grid", g.temp_grid, "temperature grid min:max:count");
    sub->add_option("--grid-scale", g.scale, "log | lin");
    sub->add_flag("--ground-state", g.ground_state, "add the beta = inf row");
}

// --------------------------------------------------------------------------
// Symmetry sets

std::vector<DynamicalSymmetry> analytic_symmetries(const Model& m, bool figure_convention,
                                                   const std::vector<std::string>& labels) {
    if (m.spec.sites != 2) throw UsageError("analytic symmetries exist only for the two-qubit model");
    std::vector<DynamicalSymmetry> out;
    for (const auto& named : two_qubit_dynamical_symmetries()) {
        if (std::find(labels.begin(), labels.end(), named.label) == labels.end()) continue;
        // The figure labels refer to the [A, H] = omega A convention, i.e. A^dag here.
        Operator op = figure_convention ? named.op.adjoint() : named.op;
        try {
            out.push_back(make_symmetry(m.h, std::move(op), named.label));
        } catch (const DomainError& e) {
            throw VerifyFailure(e.what());
        }
    }
    return out;
}

double tau_omega_for(const Model& m, double flag) {
    return flag > 0.0 ? flag : default_frequency_tol(*m.spectral);
}

std::vector<DynamicalSymmetry> file_symmetries(const Model& m, const std::string& path, double tau_dyn) {
    const SymmetryFile file = parse_symmetry_json(read_text_file(path));
    if (file.sites && *file.sites != m.spec.sites) {
        throw UsageError("symmetry file is for " + std::to_string(*file.sites) + " sites, model has " +
                         std::to_string(m.spec.sites));
    }
    if (max_site_count(file) > m.spec.sites) throw UsageError("symmetry file references a site beyond N");
    std::vector<DynamicalSymmetry> out;
    for (const auto& op : file.operators) {
        try {
            out.push_back(make_symmetry(m.h, pauli_sum(op.terms, m.spec.sites), op.label, tau_dyn));
        } catch (const DomainError& e) {
            throw VerifyFailure(e.what());
        }
    }
    return out;
}

// --------------------------------------------------------------------------
// qfi

struct QfiOptions {
    ModelOptions model;
    GridOptions grid;
    std::string symmetries = "trivial";
    double omega_tol = 0.0;
    double dyn_tol = kDefaultDynamicalTol;
    std::string out;
    std::string format = "csv";
};

std::string default_generator(const ModelOptions& o) {
    return o.preset == "xx-chain" ? "staggered-x" : "antisymmetric-x";
}

void check_format(const std::string& format) {
    if (format != "csv" && format != "json") throw UsageError("--format must be csv or json");
}

void run_qfi(const QfiOptions& o, std::ostream& out) {
    check_format(o.format);
    const Model m = build_model(o.model, default_generator(o.model));
    const auto grid = resolve_grid(o.grid);
    const double tau = tau_omega_for(m, o.omega_tol);
    const int n = m.spec.sites;

    Table t;
    t.columns = {"T", "beta", "F_Q", "f_Q"};
    std::vector<std::vector<DynamicalSymmetry>> sets;
    std::vector<std::vector<SymmetryBlock>> fixed_blocks;
    bool trivial = false;
    if (o.symmetries == "trivial") {
        trivial = true;
        t.columns.push_back("bound_trivial");
    } else if (o.symmetries == "analytic") {
        sets.push_back(analytic_symmetries(m, false, {"A1", "A2", "A3", "A4"}));
        sets.push_back(analytic_symmetries(m, true, {"A1", "A4"}));
        sets.push_back(analytic_symmetries(m, true, {"A3"}));
        sets.push_back(analytic_symmetries(m, false, {"A1", "A4"}));
        sets.push_back(analytic_symmetries(m, false, {"A3"}));
        for (const char* c : {"bound_all", "bound_A1A4", "bound_A3", "bound_A1A4_literal",
                              "bound_A3_literal"}) {
            t.columns.push_back(c);
        }
    } else {
        sets.push_back(file_symmetries(m, o.symmetries, o.dyn_tol));
        t.columns.push_back("bound_file");
    }
    for (const auto& s : sets) fixed_blocks.push_back(group_into_blocks(s, tau));
    t.columns.push_back("depth");

    const auto trivial_blocks = trivial ? trivial_complete_set(*m.spectral, tau) : std::vector<SymmetryBlock>{};
    for (const auto& pt : grid) {
        const ThermalEnsemble ens = gibbs_weights(m.spectral, pt.beta);
        const double f = qfi_spectral(m.generator, ens);
        std::vector<Cell> row{pt.temperature, pt.beta, f, f / n};
        if (trivial) row.emplace_back(qfi_from_dynsym(trivial_blocks, ens, m.generator).bound);
        for (const auto& blocks : fixed_blocks) row.emplace_back(qfi_from_dynsym(blocks, ens, m.generator).bound);
        row.emplace_back(static_cast<long long>(entanglement_depth(f, n).depth));
        t.rows.push_back(std::move(row));
    }
    emit(t, o.format, o.out, out);
}

// --------------------------------------------------------------------------
// fig1

struct Fig1Options {
    std::vector<double> fields{0.5, 1.5};
    GridOptions grid;
    std::string out = ".";
    std::string format = "csv";
};

struct Fig1Point {
    double f_q = 0.0;
    double bound = 0.0;
    double bound_literal = 0.0;
};

// Densities (per site) for the two-qubit model at field h; the bound set is
// {A1, A4} below h = 1 and {A3} above.
class Fig1Model {
public:
    explicit Fig1Model(double h) {
        ModelOptions mo;
        mo.field = h;
        mo.field_set = true;
        model_ = build_model(mo, "antisymmetric-x");
        const bool low = h <= 1.0;
        const std::vector<std::string> labels = low ? std::vector<std::string>{"A1", "A4"}
                                                    : std::vector<std::string>{"A3"};
        const double tau = default_frequency_tol(*model_.spectral);
        figure_ = group_into_blocks(analytic_symmetries(model_, true, labels), tau);
        literal_ = group_into_blocks(analytic_symmetries(model_, false, labels), tau);
        set_ = low ? "A1A4" : "A3";
    }

    Fig1Point at(double beta) const {
        const ThermalEnsemble ens = gibbs_weights(model_.spectral, beta);
        Fig1Point p;
        p.f_q = qfi_spectral(model_.generator, ens) / 2.0;
        p.bound = qfi_from_dynsym(figure_, ens, model_.generator).bound / 2.0;
        p.bound_literal = qfi_from_dynsym(literal_, ens, model_.generator).bound / 2.0;
        return p;
    }

    const std::string& set() const { return set_; }

private:
    Model model_;
    std::vector<SymmetryBlock> figure_;
    std::vector<SymmetryBlock> literal_;
    std::string set_;
};

std::filesystem::path prepare_dir(const std::string& dir) {
    std::filesystem::path p(dir);
    std::error_code ec;
    std::filesystem::create_directories(p, ec);
    if (ec) throw UsageError("cannot create output directory '" + dir + "'");
    return p;
}

void save(const std::filesystem::path& dir, const std::string& stem, const Table& t,
          const std::string& format, std::ostream& out) {
    std::ostringstream ss;
    write_table(ss, t, format);
    const auto path = dir / (stem + (format == "json" ? ".json" : ".csv"));
    write_file(path, ss.str());
    out << "wrote " << path.string() << " (" << t.rows.size() << " rows)\n";
}

void run_fig1(const Fig1Options& o, std::ostream& out, std::ostream& err) {
    check_format(o.format);
    const auto grid = resolve_grid(o.grid);
    const auto dir = prepare_dir(o.out);

    Table curve;
    curve.columns = {"h", "T", "f_Q", "bound", "bound_literal", "set"};
    for (double h : o.fields) {
        if (h == 1.0) err << "warning: at h = 1 the A3/A4 frequency is 0 and their bound vanishes\n";
        const Fig1Model fm(h);
        for (const auto& pt : grid) {
            const Fig1Point p = fm.at(pt.beta);
            curve.rows.push_back({h, pt.temperature, p.f_q, p.bound, p.bound_literal, fm.set()});
        }
    }

    Table heat_fq, heat_low, heat_high;
    heat_fq.columns = {"h", "T", "f_Q"};
    heat_low.columns = {"h", "T", "f_Q", "bound"};
    heat_high.columns = {"h", "T", "f_Q", "bound"};
    for (int i = 0; i <= 20; ++i) {
        if (i == 10) continue;
        const double h = 0.1 * i;
        const Fig1Model fm(h);
        for (const auto& pt : grid) {
            const Fig1Point p = fm.at(pt.beta);
            heat_fq.rows.push_back({h, pt.temperature, p.f_q});
            (i < 10 ? heat_low : heat_high).rows.push_back({h, pt.temperature, p.f_q, p.bound});
        }
    }
    save(dir, "fig1_curve", curve, o.format, out);
    save(dir, "fig1_heatmap_fq", heat_fq, o.format, out);
    save(dir, "fig1_heatmap_bound_low", heat_low, o.format, out);
    save(dir, "fig1_heatmap_bound_high", heat_high, o.format, out);
}

// --------------------------------------------------------------------------
// fig2

struct Fig2Options {
    ModelOptions model;
    GridOptions grid;
    double temperature = 1.0;
    double omega_tol = 0.0;
    std::string out = ".";
    std::string format = "csv";
};

void run_fig2(const Fig2Options& o, std::ostream& out) {
    check_format(o.format);
    if (!(o.temperature > 0.0)) throw UsageError("--temperature must be > 0");
    const Model m = build_model(o.model, default_generator(o.model));
    const auto grid = resolve_grid(o.grid);
    const auto dir = prepare_dir(o.out);
    const double tau = tau_omega_for(m, o.omega_tol);
    const int n = m.spec.sites;
    const auto blocks = trivial_complete_set(*m.spectral, tau);

    const ThermalEnsemble ens = gibbs_weights(m.spectral, 1.0 / o.temperature);
    const FrequencyComb g = response_comb(m.generator, ens, tau);
    const BlockEvaluator eval(ens, m.generator);

    Table comb;
    comb.columns = {"omega", "g", "D", "kind"};
    for (const auto& b : blocks) {
        const CombEntry* e = g.find(b.omega, tau * std::max<double>(1.0, static_cast<double>(b.size())));
        const bool zero = std::any_of(b.pairs.begin(), b.pairs.end(), [](const EigenPair& p) { return p.m == p.n; });
        comb.rows.push_back({b.omega, e ? e->weight.real() : 0.0, eval.mazur_weight(b),
                             std::string(zero ? "msr" : "dmsr")});
    }

    Table curve;
    curve.columns = {"T", "beta", "F_Q", "f_Q", "bound_trivial", "depth"};
    for (const auto& pt : grid) {
        const ThermalEnsemble e = gibbs_weights(m.spectral, pt.beta);
        const QfiReport r = qfi_from_dynsym(blocks, e, m.generator);
        curve.rows.push_back({pt.temperature, pt.beta, r.value, r.value / n, r.bound,
                              static_cast<long long>(entanglement_depth(r.value, n).depth)});
    }

    const QfiReport at_t = qfi_from_dynsym(blocks, ens, m.generator);
    Table decomposition;
    decomposition.columns = {"omega", "D", "contribution"};
    for (const auto& c : at_t.per_frequency) decomposition.rows.push_back({c.omega, c.d, c.contribution});

    std::ostringstream raw;
    if (o.format == "json") {
        json entries = json::array();
        for (const auto& e : g.entries) {
            entries.push_back({{"omega", e.omega}, {"weight_re", e.weight.real()},
                               {"weight_im", e.weight.imag()}, {"kind", to_string(g.kind)}});
        }
        raw << entries.dump(2) << "\n";
        write_file(dir / "fig2_response_comb.json", raw.str());
        out << "wrote " << (dir / "fig2_response_comb.json").string() << "\n";
    } else {
        write_comb_csv(raw, g);
        write_file(dir / "fig2_response_comb.csv", raw.str());
        out << "wrote " << (dir / "fig2_response_comb.csv").string() << "\n";
    }
    save(dir, "fig2_mazur", comb, o.format, out);
    save(dir, "fig2_qfi_vs_T", curve, o.format, out);
    save(dir, "fig2_decomposition", decomposition, o.format, out);

    const double o2 = thermal_expectation(Operator(m.generator.matrix() * m.generator.matrix()), ens).real();
    out << "N=" << n << " T=" << format_double(o.temperature) << "\n";
    out << "sum_g=" << format_double(g.total().real()) << " <O^2>=" << format_double(o2) << "\n";
    out << "F_Q=" << format_double(at_t.value) << " decomposition_sum=" << format_double(at_t.bound) << "\n";
}

// --------------------------------------------------------------------------
// verify

struct VerifyOptions {
    ModelOptions model;
    std::string symmetries;
    std::string beta = "0";
    double dyn_tol = kDefaultDynamicalTol;
    std::string out;
    std::string format = "csv";
};

int run_verify(const VerifyOptions& o, std::ostream& out, std::ostream& err) {
    check_format(o.format);
    const Model m = build_model(o.model, default_generator(o.model));
    const SymmetryFile file = parse_symmetry_json(read_text_file(o.symmetries));
    if (file.sites && *file.sites != m.spec.sites) {
        throw UsageError("symmetry file is for " + std::to_string(*file.sites) + " sites, model has " +
                         std::to_string(m.spec.sites));
    }
    if (max_site_count(file) > m.spec.sites) throw UsageError("symmetry file references a site beyond N");
    const ThermalEnsemble ens = gibbs_weights(m.spectral, parse_beta(o.beta));

    std::vector<VerificationEntry> entries;
    for (const auto& op : file.operators) {
        const Operator a = pauli_sum(op.terms, m.spec.sites);
        VerificationEntry e;
        e.label = op.label;
        if (a.hs_norm() == 0.0) {
            e.residual = std::numeric_limits<double>::infinity();
            err << op.label << ": zero operator\n";
        } else {
            const FrequencyFit fit = fit_frequency(m.h, a);
            e.omega = fit.omega;
            e.residual = fit.residual;
            e.support = operator_support(a, m.spec.sites);
            if (!m.generator_terms.empty()) {
                try {
                    e.cap = local_cap(a, m.generator_terms, ens, m.spec.sites);
                } catch (const DomainError& ex) {
                    err << op.label << ": cap not evaluated: " << ex.what() << "\n";
                }
            }
        }
        e.passed = e.residual <= o.dyn_tol;
        entries.push_back(std::move(e));
    }

    std::ostringstream ss;
    if (o.format == "json") {
        json arr = json::array();
        for (const auto& e : entries) arr.push_back(to_json(e));
        ss << arr.dump(2) << "\n";
    } else {
        Table t;
        t.columns = {"label", "omega", "residual", "support", "cap_range", "cap", "cap_value",
                     "cap_holds", "passed"};
        for (const auto& e : entries) {
            std::string support;
            for (std::size_t i = 0; i < e.support.size(); ++i) {
                support += (i ? " " : "") + std::to_string(e.support[i]);
            }
            std::vector<Cell> row{e.label, e.omega, e.residual, support};
            if (e.cap) {
                row.emplace_back(static_cast<long long>(e.cap->range));
                row.emplace_back(e.cap->cap);
                row.emplace_back(e.cap->value);
                row.emplace_back(std::string(e.cap->holds ? "yes" : "no"));
            } else {
                for (int i = 0; i < 4; ++i) row.emplace_back(std::string("n/a"));
            }
            row.emplace_back(std::string(e.passed ? "yes" : "no"));
            t.rows.push_back(std::move(row));
        }
        write_table(ss, t, "csv");
    }
    if (o.out.empty()) {
        out << ss.str();
    } else {
        write_file(o.out, ss.str());
    }
    const bool ok = std::all_of(entries.begin(), entries.end(), [](const auto& e) { return e.passed; });
    return ok ? kExitOk : kExitVerifyFailed;
}

}  // namespace

std::vector<TemperaturePoint> parse_temperature_grid(const std::string& spec, bool log_scale) {
    const auto c1 = spec.find(':');
    const auto c2 = c1 == std::string::npos ? std::string::npos : spec.find(':', c1 + 1);
    if (c2 == std::string::npos) throw std::invalid_argument("temperature grid must be min:max:count");
    double lo = 0.0, hi = 0.0;
    long count = 0;
    try {
        std::size_t used = 0;
        const std::string a = spec.substr(0, c1), b = spec.substr(c1 + 1, c2 - c1 - 1), c = spec.substr(c2 + 1);
        lo = std::stod(a, &used);
        if (used != a.size()) throw std::invalid_argument("");
        hi = std::stod(b, &used);
        if (used != b.size()) throw std::invalid_argument("");
        count = std::stol(c, &used);
        if (used != c.size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
        throw std::invalid_argument("malformed temperature grid '" + spec + "'");
    }
    if (count < 1) throw std::invalid_argument("temperature grid needs count >= 1");
    if (!(lo > 0.0) || !(hi >= lo) || std::isinf(hi)) {
        throw std::invalid_argument("temperature grid needs 0 < min <= max < inf");
    }
    std::vector<TemperaturePoint> out;
    for (long i = 0; i < count; ++i) {
        const double f = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
        double t = log_scale ? lo * std::pow(hi / lo, f) : lo + (hi - lo) * f;
        if (i == count - 1 && count > 1) t = hi;
        out.push_back({t, 1.0 / t});
    }
    return out;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"qfidyn: quantum Fisher information and dynamical-symmetry bounds for spin chains"};
    app.require_subcommand(1);

    QfiOptions qfi;
    auto* qfi_cmd = app.add_subcommand("qfi", "F_Q, f_Q and symmetry bounds over a temperature grid");
    add_model_options(qfi_cmd, qfi.model, "two-qubit");
    add_grid_options(qfi_cmd, qfi.grid);
    qfi_cmd->add_option("--symmetries", qfi.symmetries, "trivial | analytic | JSON file");
    qfi_cmd->add_option("--omega-tol", qfi.omega_tol, "frequency clustering tolerance");
    qfi_cmd->add_option("--dyn-tol", qfi.dyn_tol, "residual tolerance for file symmetries");
    qfi_cmd->add_option("--out", qfi.out, "output file (default stdout)");
    qfi_cmd->add_option("--format", qfi.format, "csv | json");

    Fig1Options fig1;
    auto* fig1_cmd = app.add_subcommand("fig1", "two-qubit f_Q vs the A1A4 / A3 bounds, plus heatmaps");
    fig1_cmd->add_option("--field", fig1.fields, "field value(s) for the curve table");
    add_grid_options(fig1_cmd, fig1.grid);
    fig1_cmd->add_option("--out", fig1.out, "output directory");
    fig1_cmd->add_option("--format", fig1.format, "csv | json");

    Fig2Options fig2;
    auto* fig2_cmd = app.add_subcommand("fig2", "XX chain response comb, Mazur weights and QFI vs T");
    add_model_options(fig2_cmd, fig2.model, "xx-chain");
    add_grid_options(fig2_cmd, fig2.grid);
    fig2_cmd->add_option("--temperature", fig2.temperature, "temperature of the comb and decomposition");
    fig2_cmd->add_option("--omega-tol", fig2.omega_tol, "frequency clustering tolerance");
    fig2_cmd->add_option("--out", fig2.out, "output directory");
    fig2_cmd->add_option("--format", fig2.format, "csv | json");

    VerifyOptions verify;
    auto* verify_cmd = app.add_subcommand("verify", "check candidate dynamical symmetries from a JSON file");
    add_model_options(verify_cmd, verify.model, "two-qubit");
    verify_cmd->add_option("--symmetries", verify.symmetries, "JSON file")->required();
    verify_cmd->add_option("--beta", verify.beta, "ensemble for the local cap check");
    verify_cmd->add_option("--dyn-tol", verify.dyn_tol, "residual tolerance");
    verify_cmd->add_option("--out", verify.out, "output file (default stdout)");
    verify_cmd->add_option("--format", verify.format, "csv | json");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*qfi_cmd) run_qfi(qfi, out);
        if (*fig1_cmd) run_fig1(fig1, out, err);
        if (*fig2_cmd) run_fig2(fig2, out);
        if (*verify_cmd) return run_verify(verify, out, err);
        return kExitOk;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const VerifyFailure& e) {
        err << "verification failed: " << e.what() << "\n";
        return kExitVerifyFailed;
    } catch (const NumericError& e) {
        err << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}

}  // namespace qfidyn::cli
