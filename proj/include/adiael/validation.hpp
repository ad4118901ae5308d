// validation.hpp — Brute-force checks of reduced models against the full
// bipartite master equation: trajectories, slow spectra and g-scaling fits.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "adiael/elimination.hpp"

namespace adiael {

/// Raised when the slow eigenvalues of the full generator are not separated
/// from the fast ones.
class SeparationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Tolerances on input density operators.
inline constexpr double kDensityTol = 1e-10;

/// Throws std::invalid_argument unless rho is Hermitian, trace one and has no
/// eigenvalue below -kDensityTol.
void require_density(const Operator& rho, const std::string& what);

/// (G G^†) / Tr(G G^†) with G a complex Gaussian matrix.
Operator random_density(Eigen::Index dim, std::mt19937_64& rng);

struct Trajectory {
    std::vector<double> times;
    std::vector<Operator> states;
    double max_trace_error = 0.0;
    double min_eigenvalue = 0.0;  // over the whole trajectory
};

/// e^{tL} applied to a fixed start vector at many times. The generator is
/// decomposed once; if the start vector cannot be expanded in its eigenbasis
/// the propagator for each distinct time step is formed by Padé instead.
class GeneratorFlow {
public:
    explicit GeneratorFlow(const Superoperator& L);

    /// States e^{t_k L}(rho0) for an increasing grid t_k >= 0.
    std::vector<Operator> evolve(const Operator& rho0, const std::vector<double>& times) const;

    const ExpPropagator& propagator() const { return prop_; }

private:
    ExpPropagator prop_;
};

/// Exact solution of the full master equation on a time grid.
Trajectory integrate_full(const BipartiteModel& model, const Operator& rho0,
                          const std::vector<double>& times);

enum class Initialization { manifold, product };
std::string to_string(Initialization init);

struct Comparison {
    Initialization init = Initialization::manifold;
    std::vector<double> times;
    std::vector<double> discrepancy;  // ‖Tr_B rho_full(t) − rho_s(t)‖_trace
    double max_discrepancy = 0.0;
};

/// Evolves rho_s0 under the reduced generator (all computed orders) and the
/// full model from K(rho_s0) (manifold) or rho_s0 ⊗ rho_B (product).
Comparison compare_reduced(const BipartiteModel& model, const ReducedModel& reduced,
                           const Operator& rho_s0, const std::vector<double>& times,
                           Initialization init = Initialization::manifold);

struct EigenPair {
    cplx full;
    cplx reduced;
    double distance = 0.0;
};

struct SpectrumPairing {
    Vector full_slow;
    Vector reduced;
    std::vector<EigenPair> pairs;
    double max_distance = 0.0;
    double slowest_fast_rate = 0.0;  // smallest |Re| outside the slow block
    double largest_slow_rate = 0.0;  // largest |Re| inside the slow block
};

/// Slow block separation required by slow_spectrum_compare.
inline constexpr double kSlowGapRatio = 5.0;

/// Pairs the d_A^2 eigenvalues of the full generator nearest the imaginary axis
/// with those of Σ_{j <= order} generator_j. Throws SeparationError when the
/// slowest fast rate is below kSlowGapRatio times the largest slow rate.
SpectrumPairing slow_spectrum_compare(const BipartiteModel& model, const ReducedModel& reduced,
                                      int order);

/// Same, with an explicitly supplied full spectrum (avoids recomputation).
SpectrumPairing slow_spectrum_compare(const Vector& full_spectrum, const Superoperator& reduced,
                                      Eigen::Index dimA);

/// Greedy nearest pairing followed by pairwise swaps that lower the larger of
/// the two distances involved. Returns, for each entry of `a`, the index of its
/// partner in `b`.
std::vector<Eigen::Index> pair_eigenvalues(const Vector& a, const Vector& b);

struct ScalingPoint {
    double g = 0.0;
    double defect = 0.0;
};

struct ScalingFit {
    int order = 0;
    std::vector<ScalingPoint> points;  // g > 0 only
    double slope = 0.0;
    double intercept = 0.0;  // log(defect) at log(g) = 0
    double slope_stderr = 0.0;
    bool inconclusive = false;
    std::vector<std::string> warnings;
};

/// Slope standard error above which a fit is reported as inconclusive.
inline constexpr double kInconclusiveSlope = 0.5;

/// Least-squares line through (log g, log defect). Points with g <= 0 are
/// dropped; requires at least 5 remaining values spanning a decade.
ScalingFit fit_scaling(const std::vector<ScalingPoint>& points, int order);

using ModelFamily = std::function<BipartiteModel(double g)>;

/// Spectral generator defect of the order-`order` truncation for each g.
ScalingFit scaling_study(const ModelFamily& family, const std::vector<double>& g_values,
                         int order, SylvesterMethod method = SylvesterMethod::direct,
                         unsigned threads = 1);

// ---- sweeps and reports ----------------------------------------------------

struct SweepConfig {
    std::vector<double> g_values;
    std::vector<double> times;
    int order = 2;
    SylvesterMethod method = SylvesterMethod::direct;
    QuadratureConfig quadrature;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    bool spectra = true;
};

struct SweepPoint {
    double g = 0.0;
    double epsilon = 0.0;
    Comparison manifold;
    Comparison product;
    std::optional<SpectrumPairing> pairing;      // at the requested order
    std::optional<SpectrumPairing> pairing_zero; // order-0 truncation
    std::vector<std::string> warnings;
};

struct ValidationReport {
    std::string model_summary;
    std::uint64_t seed = 0;
    Operator rho_s0;
    std::vector<SweepPoint> points;
    std::optional<ScalingFit> fit;       // requested order
    std::optional<ScalingFit> fit_zero;  // order 0
    std::vector<std::string> warnings;
};

/// Runs compare_reduced (both initializations) and, if requested, the slow
/// spectrum comparison at every g. Points are distributed over `threads`
/// workers; results do not depend on the thread count.
ValidationReport validate_sweep(const ModelFamily& family, const SweepConfig& cfg);

/// Short description of a model's dimensions and parameters.
std::string describe(const BipartiteModel& model);

} // namespace adiael
