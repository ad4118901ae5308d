// validation.cpp — Full-model trajectories, slow spectra and scaling fits

#include "adiael/validation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

namespace adiael {

namespace {

void require_grid(const std::vector<double>& times)
{
    if (times.empty()) throw std::invalid_argument("time grid is empty");
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (!std::isfinite(times[k]) || times[k] < 0.0) {
            throw std::invalid_argument("time grid entries must be finite and >= 0");
        }
        if (k > 0 && !(times[k] > times[k - 1])) {
            throw std::invalid_argument("time grid must be strictly increasing");
        }
    }
}

/// Runs fn(i) for i in [0, n) on up to `threads` workers. The first exception
/// by index is rethrown after all workers finish.
template <class F>
void parallel_for(std::size_t n, unsigned threads, F&& fn)
{
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned count = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
    if (count == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < count; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

double min_hermitian_eigenvalue(const Operator& rho)
{
    const Operator h = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

Comparison compare_with(const GeneratorFlow& full, const ReducedModel& reduced,
                        const Operator& rho_s0, const std::vector<double>& times,
                        Initialization init)
{
    const BipartiteModel& m = reduced.model;
    const Eigen::Index dA = m.dimA(), dB = m.dimB();
    if (rho_s0.rows() != dA || rho_s0.cols() != dA) {
        throw std::invalid_argument("compare_reduced: rho_s0 has wrong dimension");
    }
    Operator start;
    if (init == Initialization::manifold) {
        start = unvectorize(Vector(reduced.correction() * vectorize(rho_s0)), dA * dB);
    } else {
        start = tensor(rho_s0, reduced.bath_state);
    }
    const std::vector<Operator> full_states = full.evolve(start, times);
    const GeneratorFlow slow(reduced.generator());
    const std::vector<Operator> slow_states = slow.evolve(rho_s0, times);

    Comparison c;
    c.init = init;
    c.times = times;
    for (std::size_t k = 0; k < times.size(); ++k) {
        const double d = trace_norm(partial_trace_B(full_states[k], dA, dB) - slow_states[k]);
        c.discrepancy.push_back(d);
        c.max_discrepancy = std::max(c.max_discrepancy, d);
    }
    return c;
}

} // namespace

void require_density(const Operator& rho, const std::string& what)
{
    if (rho.rows() != rho.cols() || rho.rows() == 0) {
        throw std::invalid_argument(what + ": density operator must be square and non-empty");
    }
    if (!rho.allFinite()) throw std::invalid_argument(what + ": density operator is not finite");
    if (hermiticity_defect(rho) > kDensityTol) {
        throw std::invalid_argument(what + ": density operator is not Hermitian");
    }
    const cplx tr = rho.trace();
    if (std::abs(tr - 1.0) > kDensityTol) {
        std::ostringstream os;
        os << what << ": density operator has trace " << tr.real() << " (expected 1)";
        throw std::invalid_argument(os.str());
    }
    const double lo = min_hermitian_eigenvalue(rho);
    if (lo < -kDensityTol) {
        std::ostringstream os;
        os << what << ": density operator has negative eigenvalue " << lo;
        throw std::invalid_argument(os.str());
    }
}

Operator random_density(Eigen::Index dim, std::mt19937_64& rng)
{
    if (dim < 1) throw std::invalid_argument("random_density: dim must be >= 1");
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix G(dim, dim);
    for (Eigen::Index j = 0; j < dim; ++j) {
        for (Eigen::Index i = 0; i < dim; ++i) G(i, j) = cplx(normal(rng), normal(rng));
    }
    Operator rho = G * G.adjoint();
    rho /= rho.trace().real();
    return 0.5 * (rho + rho.adjoint());
}

// ---- trajectories ----------------------------------------------------------

GeneratorFlow::GeneratorFlow(const Superoperator& L)
    : prop_(L)
{
}

std::vector<Operator> GeneratorFlow::evolve(const Operator& rho0, const std::vector<double>& times) const
{
    require_grid(times);
    const Eigen::Index d = rho0.rows();
    if (d * d != prop_.generator().rows()) {
        throw std::invalid_argument("evolve: state dimension does not match the generator");
    }
    const Vector v0 = vectorize(rho0);
    std::vector<Operator> out;
    out.reserve(times.size());
    if (const auto y = prop_.expansion(v0)) {
        for (double t : times) {
            out.push_back(t == 0.0 ? rho0 : unvectorize(Vector(prop_.from_expansion(t, *y)), d));
        }
        return out;
    }
    // March with dense steps, one Padé per distinct step length.
    std::vector<std::pair<double, Matrix>> steps;
    Vector v = v0;
    double now = 0.0;
    for (double t : times) {
        const double dt = t - now;
        if (dt > 0.0) {
            auto hit = std::find_if(steps.begin(), steps.end(),
                                    [dt](const auto& s) { return s.first == dt; });
            if (hit == steps.end()) {
                steps.emplace_back(dt, expm_pade(dt * prop_.generator()));
                hit = steps.end() - 1;
            }
            v = hit->second * v;
            now = t;
        }
        out.push_back(unvectorize(v, d));
    }
    return out;
}

Trajectory integrate_full(const BipartiteModel& model, const Operator& rho0,
                          const std::vector<double>& times)
{
    model.validate();
    if (rho0.rows() != model.dim()) {
        throw std::invalid_argument("integrate_full: rho0 must act on H_A ⊗ H_B");
    }
    require_density(rho0, "integrate_full");
    const GeneratorFlow flow(model.full_lindbladian());

    Trajectory tr;
    tr.times = times;
    tr.states = flow.evolve(rho0, times);
    tr.min_eigenvalue = std::numeric_limits<double>::infinity();
    for (const Operator& rho : tr.states) {
        tr.max_trace_error = std::max(tr.max_trace_error, std::abs(rho.trace() - 1.0));
        tr.min_eigenvalue = std::min(tr.min_eigenvalue, min_hermitian_eigenvalue(rho));
    }
    return tr;
}

std::string to_string(Initialization init)
{
    return init == Initialization::manifold ? "manifold" : "product";
}

Comparison compare_reduced(const BipartiteModel& model, const ReducedModel& reduced,
                           const Operator& rho_s0, const std::vector<double>& times,
                           Initialization init)
{
    if (reduced.orders.empty()) throw std::invalid_argument("compare_reduced: empty reduced model");
    if (model.dimA() != reduced.model.dimA() || model.dimB() != reduced.model.dimB()) {
        throw std::invalid_argument("compare_reduced: reduced model does not match the model");
    }
    const GeneratorFlow full(model.full_lindbladian());
    return compare_with(full, reduced, rho_s0, times, init);
}

// ---- spectra ---------------------------------------------------------------

std::vector<Eigen::Index> pair_eigenvalues(const Vector& a, const Vector& b)
{
    if (a.size() != b.size()) throw std::invalid_argument("pair_eigenvalues: size mismatch");
    const Eigen::Index n = a.size();
    struct Candidate {
        double d;
        Eigen::Index i, j;
    };
    std::vector<Candidate> all;
    all.reserve(static_cast<std::size_t>(n * n));
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) all.push_back({std::abs(a(i) - b(j)), i, j});
    }
    std::stable_sort(all.begin(), all.end(),
                     [](const Candidate& x, const Candidate& y) { return x.d < y.d; });
    std::vector<Eigen::Index> partner(n, -1);
    std::vector<bool> taken(n, false);
    for (const Candidate& c : all) {
        if (partner[c.i] < 0 && !taken[c.j]) {
            partner[c.i] = c.j;
            taken[c.j] = true;
        }
    }
    // conflict resolution: swap partners while that lowers the worse distance
    auto dist = [&](Eigen::Index i, Eigen::Index j) { return std::abs(a(i) - b(j)); };
    for (bool changed = true; changed;) {
        changed = false;
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index k = i + 1; k < n; ++k) {
                const double now = std::max(dist(i, partner[i]), dist(k, partner[k]));
                const double swapped = std::max(dist(i, partner[k]), dist(k, partner[i]));
                if (swapped < now * (1.0 - 1e-12)) {
                    std::swap(partner[i], partner[k]);
                    changed = true;
                }
            }
        }
    }
    return partner;
}

SpectrumPairing slow_spectrum_compare(const Vector& full_spectrum, const Superoperator& reduced,
                                      Eigen::Index dimA)
{
    const Eigen::Index n = dimA * dimA;
    if (reduced.rows() != n || reduced.cols() != n) {
        throw std::invalid_argument("slow_spectrum_compare: reduced generator has wrong size");
    }
    if (full_spectrum.size() < n) {
        throw std::invalid_argument("slow_spectrum_compare: full spectrum too small");
    }
    std::vector<Eigen::Index> order(static_cast<std::size_t>(full_spectrum.size()));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
        return std::abs(full_spectrum(x).real()) < std::abs(full_spectrum(y).real());
    });

    SpectrumPairing out;
    out.full_slow.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) out.full_slow(i) = full_spectrum(order[i]);
    out.largest_slow_rate = std::abs(out.full_slow(n - 1).real());
    out.slowest_fast_rate = full_spectrum.size() > n
                                ? std::abs(full_spectrum(order[n]).real())
                                : std::numeric_limits<double>::infinity();
    if (out.slowest_fast_rate < kSlowGapRatio * out.largest_slow_rate) {
        std::ostringstream os;
        os << "slow spectrum not separated: slowest fast rate " << out.slowest_fast_rate
           << " < " << kSlowGapRatio << " x largest slow rate " << out.largest_slow_rate;
        throw SeparationError(os.str());
    }

    out.reduced = eigenvalues(reduced);
    const std::vector<Eigen::Index> partner = pair_eigenvalues(out.full_slow, out.reduced);
    for (Eigen::Index i = 0; i < n; ++i) {
        EigenPair p{out.full_slow(i), out.reduced(partner[i]), 0.0};
        p.distance = std::abs(p.full - p.reduced);
        out.max_distance = std::max(out.max_distance, p.distance);
        out.pairs.push_back(p);
    }
    return out;
}

SpectrumPairing slow_spectrum_compare(const BipartiteModel& model, const ReducedModel& reduced,
                                      int order)
{
    if (order < 0 || order > reduced.max_order()) {
        throw std::invalid_argument("slow_spectrum_compare: order not available");
    }
    return slow_spectrum_compare(eigenvalues(model.full_lindbladian()), reduced.generator(order),
                                 model.dimA());
}

// ---- scaling ---------------------------------------------------------------

ScalingFit fit_scaling(const std::vector<ScalingPoint>& points, int order)
{
    ScalingFit fit;
    fit.order = order;
    for (const ScalingPoint& p : points) {
        if (!(p.g > 0.0)) continue;  // log singularity at g = 0
        if (!(p.defect > 0.0)) {
            std::ostringstream os;
            os << "defect at g = " << p.g << " is zero; point dropped from the fit";
            fit.warnings.push_back(os.str());
            continue;
        }
        fit.points.push_back(p);
    }
    const auto n = static_cast<double>(fit.points.size());
    if (fit.points.size() < 5) {
        throw std::invalid_argument("scaling fit needs at least 5 positive g values (got " +
                                    std::to_string(fit.points.size()) + ")");
    }
    double gmin = fit.points[0].g, gmax = gmin;
    for (const ScalingPoint& p : fit.points) {
        gmin = std::min(gmin, p.g);
        gmax = std::max(gmax, p.g);
    }
    if (std::log10(gmax / gmin) < 1.0 - 1e-9) {
        throw std::invalid_argument("scaling fit g values must span at least one decade");
    }
    double sx = 0.0, sy = 0.0;
    for (const ScalingPoint& p : fit.points) {
        sx += std::log(p.g);
        sy += std::log(p.defect);
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0;
    for (const ScalingPoint& p : fit.points) {
        const double dx = std::log(p.g) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(p.defect) - my);
    }
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ssr = 0.0;
    for (const ScalingPoint& p : fit.points) {
        const double r = std::log(p.defect) - (fit.intercept + fit.slope * std::log(p.g));
        ssr += r * r;
    }
    fit.slope_stderr = std::sqrt(ssr / (n - 2.0) / sxx);
    if (fit.slope_stderr > kInconclusiveSlope) {
        fit.inconclusive = true;
        std::ostringstream os;
        os << "inconclusive fit: slope standard error " << fit.slope_stderr << " exceeds "
           << kInconclusiveSlope;
        fit.warnings.push_back(os.str());
    }
    return fit;
}

ScalingFit scaling_study(const ModelFamily& family, const std::vector<double>& g_values,
                         int order, SylvesterMethod method, unsigned threads)
{
    if (g_values.size() < 5) throw std::invalid_argument("scaling_study: need at least 5 g values");
    std::vector<ScalingPoint> points(g_values.size());
    parallel_for(g_values.size(), threads, [&](std::size_t i) {
        const BipartiteModel model = family(g_values[i]);
        points[i].g = g_values[i];
        if (!(g_values[i] > 0.0)) return;
        const ReducedModel red = Eliminator(model).reduce(order, method);
        points[i].defect = slow_spectrum_compare(model, red, order).max_distance;
    });
    return fit_scaling(points, order);
}

// ---- sweeps ----------------------------------------------------------------

std::string describe(const BipartiteModel& model)
{
    std::ostringstream os;
    os << "d_A=" << model.dimA() << " d_B=" << model.dimB() << " couplings="
       << model.couplings.size() << " g=" << model.g << " epsilon=" << model.epsilon();
    if (model.fock_cutoff > 0) os << " fock_cutoff=" << model.fock_cutoff;
    return os.str();
}

ValidationReport validate_sweep(const ModelFamily& family, const SweepConfig& cfg)
{
    if (cfg.g_values.empty()) throw std::invalid_argument("validate_sweep: no g values");
    if (cfg.order < 0 || cfg.order > kMaxOrder) {
        throw std::invalid_argument("validate_sweep: order out of range");
    }
    require_grid(cfg.times);
    cfg.quadrature.validate();

    ValidationReport report;
    report.seed = cfg.seed;
    const BipartiteModel first = family(cfg.g_values.front());
    report.model_summary = describe(first);
    std::mt19937_64 rng(cfg.seed);
    report.rho_s0 = random_density(first.dimA(), rng);

    report.points.resize(cfg.g_values.size());
    parallel_for(cfg.g_values.size(), cfg.threads, [&](std::size_t i) {
        SweepPoint& pt = report.points[i];
        const BipartiteModel model = family(cfg.g_values[i]);
        pt.g = model.g;
        pt.epsilon = model.epsilon();
        const Eliminator elim(model);
        const ReducedModel red = elim.reduce(cfg.order, cfg.method, cfg.quadrature);
        pt.warnings = red.warnings;
        const GeneratorFlow full(model.full_lindbladian());
        pt.manifold = compare_with(full, red, report.rho_s0, cfg.times, Initialization::manifold);
        pt.product = compare_with(full, red, report.rho_s0, cfg.times, Initialization::product);
        if (!cfg.spectra) return;
        const Vector& spectrum = full.propagator().eigenvalues();
        try {
            pt.pairing = slow_spectrum_compare(spectrum, red.generator(cfg.order), model.dimA());
            pt.pairing_zero = slow_spectrum_compare(spectrum, red.generator(0), model.dimA());
        } catch (const SeparationError& e) {
            pt.warnings.emplace_back(e.what());
        }
    });

    if (cfg.spectra) {
        std::vector<ScalingPoint> sp, sp0;
        for (const SweepPoint& pt : report.points) {
            if (!pt.pairing) continue;
            sp.push_back({pt.g, pt.pairing->max_distance});
            sp0.push_back({pt.g, pt.pairing_zero->max_distance});
        }
        try {
            report.fit = fit_scaling(sp, cfg.order);
            report.fit_zero = fit_scaling(sp0, 0);
            for (const auto& w : report.fit->warnings) report.warnings.push_back(w);
            for (const auto& w : report.fit_zero->warnings) report.warnings.push_back(w);
        } catch (const std::invalid_argument& e) {
            report.warnings.push_back(std::string("no scaling fit: ") + e.what());
        }
    }
    return report;
}

} // namespace adiael
