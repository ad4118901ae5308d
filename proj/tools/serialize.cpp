// serialize.cpp — Output documents for the command-line tool

#include "serialize.hpp"

#include <charconv>
#include <system_error>

namespace adiael::cli {

using nlohmann::json;

std::string format_double(double x)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    if (res.ec != std::errc()) return "nan";
    return std::string(buf, res.ptr);
}

std::string dump(const json& j)
{
    return j.dump(2) + "\n";
}

json to_json(cplx z)
{
    return json::array({z.real(), z.imag()});
}

json to_json(const Matrix& M)
{
    json rows = json::array();
    for (Eigen::Index r = 0; r < M.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < M.cols(); ++c) row.push_back(to_json(M(r, c)));
        rows.push_back(std::move(row));
    }
    return rows;
}

json real_matrix_json(const Eigen::MatrixXd& M)
{
    json rows = json::array();
    for (Eigen::Index r = 0; r < M.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace {

json model_json(const BipartiteModel& m)
{
    return json{{"dims", {{"A", m.dimA()}, {"B", m.dimB()}}},
                {"g", m.g},
                {"epsilon", m.epsilon()},
                {"fock_cutoff", m.fock_cutoff},
                {"couplings", m.couplings.size()}};
}

json fit_json(const ScalingFit& f)
{
    json pts = json::array();
    for (const ScalingPoint& p : f.points) pts.push_back({{"g", p.g}, {"defect", p.defect}});
    return json{{"order", f.order},           {"slope", f.slope},
                {"intercept", f.intercept},   {"slope_stderr", f.slope_stderr},
                {"inconclusive", f.inconclusive}, {"points", pts},
                {"warnings", f.warnings}};
}

json pairing_json(const SpectrumPairing& p)
{
    json pairs = json::array();
    for (const EigenPair& e : p.pairs) {
        pairs.push_back({{"full", to_json(e.full)}, {"reduced", to_json(e.reduced)}, {"distance", e.distance}});
    }
    return json{{"max_distance", p.max_distance},
                {"slowest_fast_rate", p.slowest_fast_rate},
                {"largest_slow_rate", p.largest_slow_rate},
                {"pairs", pairs}};
}

} // namespace

json reduced_json(const ReducedModel& r)
{
    json orders = json::array();
    for (int j = 0; j <= r.max_order(); ++j) {
        const ReducedOrder& o = r.orders[static_cast<std::size_t>(j)];
        orders.push_back({{"order", j},
                          {"method", to_string(o.method)},
                          {"generator", to_json(o.generator)},
                          {"correction", to_json(o.correction)},
                          {"invariance_residual", o.invariance_residual},
                          {"gauge_residual", o.gauge_residual}});
    }
    return json{{"schema_version", kOutputSchemaVersion},
                {"kind", "reduced_model"},
                {"model", model_json(r.model)},
                {"bath_state", to_json(r.bath_state)},
                {"warnings", r.warnings},
                {"orders", orders}};
}

json report_json(const ValidationReport& r, const SweepConfig& cfg)
{
    json points = json::array();
    for (const SweepPoint& p : r.points) {
        json pt{{"g", p.g},
                {"epsilon", p.epsilon},
                {"max_discrepancy_manifold", p.manifold.max_discrepancy},
                {"max_discrepancy_product", p.product.max_discrepancy},
                {"warnings", p.warnings}};
        if (p.pairing) {
            pt["spectrum"] = pairing_json(*p.pairing);
            pt["spectrum_order0"] = pairing_json(*p.pairing_zero);
        }
        points.push_back(std::move(pt));
    }
    json fits = json::object();
    if (r.fit) fits["requested_order"] = fit_json(*r.fit);
    if (r.fit_zero) fits["order0"] = fit_json(*r.fit_zero);
    return json{{"schema_version", kOutputSchemaVersion},
                {"kind", "validation_summary"},
                {"model", r.model_summary},
                {"seed", r.seed},
                {"rho_s0", to_json(r.rho_s0)},
                {"order", cfg.order},
                {"method", to_string(cfg.method)},
                {"times", cfg.times},
                {"points", points},
                {"fits", fits},
                {"warnings", r.warnings}};
}

json jc_oracle_json(const JCParams& p)
{
    const JCCoefficients c = jc_coefficients(p);
    return json{{"schema_version", kOutputSchemaVersion},
                {"kind", "oracle_jc"},
                {"params",
                 {{"kappa", p.kappa}, {"kappa_phi", p.kappa_phi}, {"delta", p.delta},
                  {"n_th", p.n_th}, {"g", p.g}}},
                {"coefficients",
                 {{"sigma_z_shift", c.shift}, {"decay_rate", c.decay}, {"excitation_rate", c.excitation}}},
                {"generator", to_json(jc_reduced(p))}};
}

json labframe_oracle_json(const LabFrameParams& p)
{
    const LabFrameReduced red = labframe_reduced(p);
    const BlochForm b = bloch_form(p);
    Eigen::JacobiSVD<Eigen::Matrix2cd> svd(red.X);
    const double top = svd.singularValues()(0);
    const int rank = top == 0.0 ? 0 : (svd.singularValues()(1) > 1e-12 * top ? 2 : 1);
    return json{{"schema_version", kOutputSchemaVersion},
                {"kind", "oracle_labframe"},
                {"params",
                 {{"kappa", p.kappa}, {"kappa_phi", p.kappa_phi}, {"omega_B", p.omega_B},
                  {"omega_eg", p.omega_eg}, {"n_th", p.n_th}, {"g", p.g}}},
                {"X", to_json(Matrix(red.X))},
                {"Y", red.Y},
                {"det_X", red.X.determinant().real()},
                {"trace_X", red.X.trace().real()},
                {"rank_X", rank},
                {"generator", to_json(red.generator)},
                {"bloch",
                 {{"drift", real_matrix_json(b.drift)},
                  {"affine", {b.affine(0), b.affine(1), b.affine(2)}},
                  {"z_bar", b.z_bar},
                  {"r_z", b.r_z}}}};
}

void write_sweep_csv(std::ostream& os, const ValidationReport& r)
{
    os << "g,epsilon,t,discrepancy_manifold,discrepancy_product\r\n";
    for (const SweepPoint& p : r.points) {
        for (std::size_t k = 0; k < p.manifold.times.size(); ++k) {
            os << format_double(p.g) << ',' << format_double(p.epsilon) << ','
               << format_double(p.manifold.times[k]) << ','
               << format_double(p.manifold.discrepancy[k]) << ','
               << format_double(p.product.discrepancy[k]) << "\r\n";
        }
    }
}

} // namespace adiael::cli
