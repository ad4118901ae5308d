// config.cpp — Parsing and checking of model configuration documents

#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "adiael/oracles.hpp"

namespace adiael::cli {

using nlohmann::json;

// ---- line index ------------------------------------------------------------

namespace {

class LineIndexer {
public:
    explicit LineIndexer(const std::string& text) : s_(text) {}

    std::map<std::string, int> run()
    {
        value("");
        return std::move(lines_);
    }

private:
    void ws()
    {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) {
            if (s_[pos_] == '\n') ++line_;
            ++pos_;
        }
    }

    std::string string_token()
    {
        std::string out;
        ++pos_;  // opening quote
        while (pos_ < s_.size() && s_[pos_] != '"') {
            if (s_[pos_] == '\\' && pos_ + 1 < s_.size()) {
                out += s_[pos_ + 1];
                pos_ += 2;
                continue;
            }
            out += s_[pos_++];
        }
        ++pos_;  // closing quote
        return out;
    }

    static std::string escape(const std::string& key)
    {
        std::string out;
        for (char c : key) {
            if (c == '~') {
                out += "~0";
            } else if (c == '/') {
                out += "~1";
            } else {
                out += c;
            }
        }
        return out;
    }

    void value(const std::string& path)
    {
        ws();
        if (pos_ >= s_.size()) return;
        lines_[path] = line_;
        const char c = s_[pos_];
        if (c == '{') {
            ++pos_;
            ws();
            if (pos_ < s_.size() && s_[pos_] == '}') {
                ++pos_;
                return;
            }
            while (pos_ < s_.size()) {
                ws();
                const std::string key = string_token();
                ws();
                ++pos_;  // ':'
                value(path + "/" + escape(key));
                ws();
                if (pos_ < s_.size() && s_[pos_++] == '}') return;
            }
        } else if (c == '[') {
            ++pos_;
            ws();
            if (pos_ < s_.size() && s_[pos_] == ']') {
                ++pos_;
                return;
            }
            for (int i = 0; pos_ < s_.size(); ++i) {
                value(path + "/" + std::to_string(i));
                ws();
                if (pos_ < s_.size() && s_[pos_++] == ']') return;
            }
        } else if (c == '"') {
            string_token();
        } else {
            while (pos_ < s_.size() && s_[pos_] != ',' && s_[pos_] != '}' && s_[pos_] != ']' &&
                   !std::isspace(static_cast<unsigned char>(s_[pos_]))) {
                ++pos_;
            }
        }
    }

    const std::string& s_;
    std::size_t pos_ = 0;
    int line_ = 1;
    std::map<std::string, int> lines_;
};

std::string display_path(const std::string& pointer)
{
    if (pointer.empty()) return "(document)";
    std::string out;
    std::size_t i = 1;
    while (i <= pointer.size()) {
        const std::size_t j = std::min(pointer.find('/', i), pointer.size());
        const std::string part = pointer.substr(i, j - i);
        const bool index = !part.empty() && part.find_first_not_of("0123456789") == std::string::npos;
        if (index) {
            out += "[" + part + "]";
        } else {
            if (!out.empty()) out += ".";
            out += part;
        }
        i = j + 1;
    }
    return out;
}

class Checker {
public:
    Checker(std::map<std::string, int> lines, std::string name)
        : lines_(std::move(lines)), name_(std::move(name))
    {
    }

    [[noreturn]] void fail(const std::string& pointer, const std::string& problem) const
    {
        std::ostringstream os;
        os << name_ << ":" << line_of(pointer) << ": " << display_path(pointer) << ": " << problem;
        throw ConfigError(os.str());
    }

    int line_of(std::string pointer) const
    {
        for (;;) {
            const auto it = lines_.find(pointer);
            if (it != lines_.end()) return it->second;
            if (pointer.empty()) return 1;
            pointer = pointer.substr(0, pointer.rfind('/'));
        }
    }

    void object(const json& j, const std::string& ptr, const std::set<std::string>& allowed,
                const std::set<std::string>& required) const
    {
        if (!j.is_object()) fail(ptr, "expected an object");
        for (const auto& [key, _] : j.items()) {
            if (!allowed.count(key)) fail(ptr + "/" + key, "unknown key '" + key + "'");
        }
        for (const std::string& key : required) {
            if (!j.contains(key)) fail(ptr, "missing required key '" + key + "'");
        }
    }

    double number(const json& j, const std::string& ptr) const
    {
        if (!j.is_number()) fail(ptr, "expected a number");
        const double v = j.get<double>();
        if (!std::isfinite(v)) fail(ptr, "must be finite");
        return v;
    }

    double positive(const json& j, const std::string& ptr) const
    {
        const double v = number(j, ptr);
        if (!(v > 0.0)) fail(ptr, "must be > 0");
        return v;
    }

    double nonnegative(const json& j, const std::string& ptr) const
    {
        const double v = number(j, ptr);
        if (!(v >= 0.0)) fail(ptr, "must be >= 0");
        return v;
    }

    long integer(const json& j, const std::string& ptr, long lo, long hi) const
    {
        if (!j.is_number_integer()) fail(ptr, "expected an integer");
        const long v = j.get<long>();
        if (v < lo || v > hi) {
            fail(ptr, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
        }
        return v;
    }

    Matrix matrix(const json& j, const std::string& ptr, Eigen::Index dim) const
    {
        Matrix M;
        try {
            M = matrix_from_json(j);
        } catch (const std::invalid_argument& e) {
            fail(ptr, e.what());
        }
        if (M.rows() != dim || M.cols() != dim) {
            fail(ptr, "expected a " + std::to_string(dim) + "x" + std::to_string(dim) + " matrix");
        }
        return M;
    }

private:
    std::map<std::string, int> lines_;
    std::string name_;
};

} // namespace

std::map<std::string, int> index_lines(const std::string& text)
{
    return LineIndexer(text).run();
}

Matrix matrix_from_json(const json& j)
{
    if (!j.is_array() || j.empty()) throw std::invalid_argument("expected a non-empty array of rows");
    const auto rows = static_cast<Eigen::Index>(j.size());
    if (!j[0].is_array() || j[0].empty()) throw std::invalid_argument("rows must be non-empty arrays");
    const auto cols = static_cast<Eigen::Index>(j[0].size());
    Matrix M(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const json& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
            throw std::invalid_argument("rows must all have the same length");
        }
        for (Eigen::Index c = 0; c < cols; ++c) {
            const json& e = row[static_cast<std::size_t>(c)];
            if (e.is_number()) {
                M(r, c) = e.get<double>();
            } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
                M(r, c) = cplx(e[0].get<double>(), e[1].get<double>());
            } else {
                throw std::invalid_argument("entries must be numbers or [re, im] pairs");
            }
        }
    }
    if (!M.allFinite()) throw std::invalid_argument("matrix entries must be finite");
    return M;
}

ModelConfig parse_config(const std::string& text, const std::string& source_name)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        // locate the byte offset reported by the parser
        const std::size_t at = std::min<std::size_t>(e.byte, text.size());
        const long line = 1 + std::count(text.begin(), text.begin() + static_cast<long>(at), '\n');
        std::ostringstream os;
        os << source_name << ":" << line << ": syntax error: " << e.what();
        throw ConfigError(os.str());
    }
    const Checker ck(index_lines(text), source_name);

    ck.object(doc, "",
              {"schema_version", "dims", "hamiltonian_A", "lindblad_B", "couplings", "g", "solver",
               "order"},
              {"schema_version", "dims", "hamiltonian_A", "lindblad_B", "couplings", "g"});
    if (ck.integer(doc["schema_version"], "/schema_version", 1, 1000) != kConfigSchemaVersion) {
        ck.fail("/schema_version", "unsupported version (expected " +
                                       std::to_string(kConfigSchemaVersion) + ")");
    }

    const json& dims = doc["dims"];
    ck.object(dims, "/dims", {"A", "B"}, {"A", "B"});
    const auto dA = static_cast<Eigen::Index>(ck.integer(dims["A"], "/dims/A", 1, 64));
    const auto dB = static_cast<Eigen::Index>(ck.integer(dims["B"], "/dims/B", 2, 200));

    ModelConfig cfg;
    BipartiteModel& m = cfg.model;

    const json& lb = doc["lindblad_B"];
    ck.object(lb, "/lindblad_B", {"omega_B", "kappa", "kappa_phi", "n_th", "fock_cutoff"},
              {"omega_B", "kappa", "fock_cutoff"});
    const double omega_B = ck.number(lb["omega_B"], "/lindblad_B/omega_B");
    const double kappa = ck.positive(lb["kappa"], "/lindblad_B/kappa");
    const double kappa_phi =
        lb.contains("kappa_phi") ? ck.nonnegative(lb["kappa_phi"], "/lindblad_B/kappa_phi") : 0.0;
    const double n_th = lb.contains("n_th") ? ck.nonnegative(lb["n_th"], "/lindblad_B/n_th") : 0.0;
    const long cutoff = ck.integer(lb["fock_cutoff"], "/lindblad_B/fock_cutoff", 2, 200);
    if (cutoff != dB) ck.fail("/lindblad_B/fock_cutoff", "must equal dims.B");
    m.bath = damped_oscillator(omega_B, kappa, kappa_phi, n_th, static_cast<int>(cutoff));
    m.fock_cutoff = static_cast<int>(cutoff);

    const QubitOps q = qubit_ops();
    const json& ha = doc["hamiltonian_A"];
    if (!ha.is_object()) ck.fail("/hamiltonian_A", "expected an object");
    if (ha.contains("preset")) {
        ck.object(ha, "/hamiltonian_A", {"preset", "omega_eg"}, {"preset", "omega_eg"});
        if (ha["preset"] != "qubit_sigma_z") {
            ck.fail("/hamiltonian_A/preset", "unknown preset (expected \"qubit_sigma_z\")");
        }
        if (dA != 2) ck.fail("/hamiltonian_A/preset", "qubit_sigma_z requires dims.A = 2");
        const double w = ck.number(ha["omega_eg"], "/hamiltonian_A/omega_eg");
        m.H_A = -0.5 * w * q.sigma_z;
    } else {
        ck.object(ha, "/hamiltonian_A", {"matrix"}, {"matrix"});
        m.H_A = ck.matrix(ha["matrix"], "/hamiltonian_A/matrix", dA);
        if (!is_hermitian(m.H_A, 1e-12)) ck.fail("/hamiltonian_A/matrix", "must be Hermitian");
    }

    const json& cs = doc["couplings"];
    if (!cs.is_array()) ck.fail("/couplings", "expected an array");
    const BosonOps b = boson_ops(static_cast<int>(dB));
    for (std::size_t i = 0; i < cs.size(); ++i) {
        const std::string ptr = "/couplings/" + std::to_string(i);
        const json& c = cs[i];
        if (!c.is_object()) ck.fail(ptr, "expected an object");
        if (c.contains("preset")) {
            ck.object(c, ptr, {"preset"}, {"preset"});
            if (dA != 2) ck.fail(ptr + "/preset", "coupling presets require dims.A = 2");
            if (c["preset"] == "jaynes_cummings") {
                m.couplings.push_back({q.sigma_plus, b.b});
                m.couplings.push_back({q.sigma_minus, b.b_dag});
            } else if (c["preset"] == "dipolar_sigma_x") {
                m.couplings.push_back({q.sigma_x, Operator(b.b + b.b_dag)});
            } else {
                ck.fail(ptr + "/preset",
                        "unknown preset (expected \"jaynes_cummings\" or \"dipolar_sigma_x\")");
            }
        } else {
            ck.object(c, ptr, {"A", "B"}, {"A", "B"});
            m.couplings.push_back({ck.matrix(c["A"], ptr + "/A", dA), ck.matrix(c["B"], ptr + "/B", dB)});
        }
    }
    m.g = ck.nonnegative(doc["g"], "/g");

    if (doc.contains("solver")) {
        const json& s = doc["solver"];
        ck.object(s, "/solver", {"method", "tol", "decay_folds", "max_panels", "nodes"}, {});
        if (s.contains("method")) {
            if (!s["method"].is_string()) ck.fail("/solver/method", "expected a string");
            try {
                cfg.method = parse_sylvester_method(s["method"].get<std::string>());
            } catch (const std::invalid_argument&) {
                ck.fail("/solver/method", "must be \"direct\" or \"quadrature\"");
            }
        }
        if (s.contains("tol")) cfg.quadrature.tol = ck.positive(s["tol"], "/solver/tol");
        if (s.contains("decay_folds")) {
            cfg.quadrature.decay_folds = ck.positive(s["decay_folds"], "/solver/decay_folds");
        }
        if (s.contains("max_panels")) {
            cfg.quadrature.max_panels = static_cast<int>(ck.integer(s["max_panels"], "/solver/max_panels", 1, 1 << 20));
        }
        if (s.contains("nodes")) {
            cfg.quadrature.nodes = static_cast<int>(ck.integer(s["nodes"], "/solver/nodes", 2, 64));
        }
    }
    if (doc.contains("order")) {
        cfg.order = static_cast<int>(ck.integer(doc["order"], "/order", 0, kMaxOrder));
    }

    try {
        m.validate();
    } catch (const std::invalid_argument& e) {
        ck.fail("", e.what());
    }
    return cfg;
}

ModelConfig load_config(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path + ": cannot open config file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path);
}

} // namespace adiael::cli
