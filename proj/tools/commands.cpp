// commands.cpp — reduce, validate and oracle subcommands

#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "config.hpp"
#include "serialize.hpp"

namespace adiael::cli {

namespace {

/// Input error raised after parsing (bad flag values, unwritable outputs).
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

void write_file(const std::string& path, const std::string& content)
{
    std::ofstream f(path, std::ios::binary);
    if (!f) throw UsageError(path + ": cannot open for writing");
    f << content;
    if (!f) throw UsageError(path + ": write failed");
}

std::string strip_suffix(std::string s, const std::string& suffix)
{
    if (s.size() > suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0) {
        s.resize(s.size() - suffix.size());
    }
    return s;
}

} // namespace

std::vector<double> parse_range(const std::string& spec, bool logarithmic)
{
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
    if (parts.size() != 3) throw UsageError("range '" + spec + "' must be start:stop:count");
    double a = 0.0, b = 0.0;
    long n = 0;
    try {
        std::size_t used = 0;
        a = std::stod(parts[0], &used);
        if (used != parts[0].size()) throw std::invalid_argument("trailing characters");
        b = std::stod(parts[1], &used);
        if (used != parts[1].size()) throw std::invalid_argument("trailing characters");
        n = std::stol(parts[2], &used);
        if (used != parts[2].size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
        throw UsageError("range '" + spec + "' has a malformed field");
    }
    if (!std::isfinite(a) || !std::isfinite(b) || n < 1) {
        throw UsageError("range '" + spec + "' needs finite bounds and count >= 1");
    }
    if (logarithmic && !(a > 0.0 && b > 0.0)) {
        throw UsageError("logarithmic range '" + spec + "' needs positive bounds");
    }
    std::vector<double> out;
    for (long k = 0; k < n; ++k) {
        const double f = n == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(n - 1);
        out.push_back(logarithmic ? a * std::pow(b / a, f) : a + (b - a) * f);
    }
    if (n > 1) out.back() = b;
    return out;
}

unsigned resolve_threads(std::optional<unsigned> flag)
{
    if (flag) return std::max(1u, *flag);
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("ADIAEL_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
    }
    return n;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Adiabatic elimination of a fast dissipative subsystem"};
    app.require_subcommand(1);

    // reduce
    std::string config_path, out_path;
    std::optional<int> order_flag;
    std::string method_flag;
    auto* reduce = app.add_subcommand("reduce", "Compute reduced generators and corrections");
    reduce->add_option("config", config_path, "Model configuration (JSON)")->required();
    reduce->add_option("out", out_path, "Output document (JSON)")->required();
    reduce->add_option("--order", order_flag, "Override the expansion order");
    reduce->add_option("--method", method_flag, "Override the Sylvester method (direct|quadrature)");

    // validate
    std::string g_sweep, times_spec = "0:50:11";
    std::uint64_t seed = 0;
    std::optional<unsigned> threads_flag;
    bool no_spectra = false;
    auto* validate = app.add_subcommand("validate", "Compare reduced and full dynamics");
    validate->add_option("config", config_path, "Model configuration (JSON)")->required();
    validate->add_option("out", out_path, "Output base path; writes <out>.csv and <out>.json")->required();
    validate->add_option("--g-sweep", g_sweep, "Log-spaced g values start:stop:count");
    validate->add_option("--times", times_spec, "Linear time grid start:stop:count")->capture_default_str();
    validate->add_option("--seed", seed, "Seed for the random initial state")->capture_default_str();
    validate->add_option("--threads", threads_flag, "Worker threads (overrides ADIAEL_THREADS)");
    validate->add_option("--order", order_flag, "Override the expansion order");
    validate->add_option("--method", method_flag, "Override the Sylvester method (direct|quadrature)");
    validate->add_flag("--no-spectra", no_spectra, "Skip slow-spectrum comparisons and fits");

    // oracle
    std::string example;
    double kappa = 1.0, kappa_phi = 0.0, delta = 0.0, n_th = 0.0, g = 0.1, omega_B = 0.0, omega_eg = 0.0;
    std::string oracle_out;
    auto* oracle = app.add_subcommand("oracle", "Print a closed-form reduced model");
    oracle->add_option("example", example, "jc or labframe")->required()->check(CLI::IsMember({"jc", "labframe"}));
    oracle->add_option("--kappa", kappa)->capture_default_str();
    oracle->add_option("--kappa-phi", kappa_phi)->capture_default_str();
    oracle->add_option("--delta", delta, "Detuning (jc)")->capture_default_str();
    oracle->add_option("--n-th", n_th)->capture_default_str();
    oracle->add_option("--g", g)->capture_default_str();
    oracle->add_option("--omega-B", omega_B, "Oscillator frequency (labframe)")->capture_default_str();
    oracle->add_option("--omega-eg", omega_eg, "Qubit frequency (labframe)")->capture_default_str();
    oracle->add_option("--out", oracle_out, "Write to a file instead of stdout");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    }

    try {
        if (*reduce || *validate) {
            ModelConfig cfg = load_config(config_path);
            if (order_flag) {
                if (*order_flag < 0 || *order_flag > kMaxOrder) {
                    throw UsageError("--order must lie in [0, " + std::to_string(kMaxOrder) + "]");
                }
                cfg.order = *order_flag;
            }
            if (!method_flag.empty()) cfg.method = parse_sylvester_method(method_flag);

            if (*reduce) {
                const ReducedModel red = Eliminator(cfg.model).reduce(cfg.order, cfg.method, cfg.quadrature);
                write_file(out_path, dump(reduced_json(red)));
                for (const std::string& w : red.warnings) err << "warning: " << w << "\n";
                return kExitOk;
            }

            SweepConfig sweep;
            sweep.g_values = g_sweep.empty() ? std::vector<double>{cfg.model.g} : parse_range(g_sweep, true);
            sweep.times = parse_range(times_spec, false);
            sweep.order = cfg.order;
            sweep.method = cfg.method;
            sweep.quadrature = cfg.quadrature;
            sweep.seed = seed;
            sweep.threads = resolve_threads(threads_flag);
            sweep.spectra = !no_spectra;
            const BipartiteModel base = cfg.model;
            const ValidationReport report = validate_sweep(
                [&base](double gv) {
                    BipartiteModel m = base;
                    m.g = gv;
                    return m;
                },
                sweep);
            const std::string stem = strip_suffix(strip_suffix(out_path, ".json"), ".csv");
            std::ostringstream csv;
            write_sweep_csv(csv, report);
            write_file(stem + ".csv", csv.str());
            write_file(stem + ".json", dump(report_json(report, sweep)));
            for (const std::string& w : report.warnings) err << "warning: " << w << "\n";
            return kExitOk;
        }

        nlohmann::json doc;
        if (example == "jc") {
            doc = jc_oracle_json(JCParams{kappa, kappa_phi, delta, n_th, g});
        } else {
            doc = labframe_oracle_json(LabFrameParams{kappa, kappa_phi, omega_B, omega_eg, n_th, g});
        }
        if (oracle_out.empty()) {
            out << dump(doc);
        } else {
            write_file(oracle_out, dump(doc));
        }
        return kExitOk;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
}

} // namespace adiael::cli
