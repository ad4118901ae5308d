// quadrature.hpp — Composite Gauss–Legendre integration over [0, T] for
// matrix-valued integrands sampled by marching along uniform panels.

#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "adiael/operator_core.hpp"

namespace adiael {

struct QuadratureConfig {
    double tol = 1e-9;          // relative tolerance on the integral
    double decay_folds = 40.0;  // horizon T = decay_folds / decay rate
    int max_panels = 512;
    int nodes = 16;             // Gauss–Legendre nodes per panel

    void validate() const;
};

class QuadratureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Gauss–Legendre nodes and weights mapped to [a, b].
struct GaussLegendreRule {
    std::vector<double> x;
    std::vector<double> w;
};

GaussLegendreRule gauss_legendre(int n, double a = -1.0, double b = 1.0);

/// Produces integrand values while marching along [0, T] in uniform steps.
/// The integrator calls reset() once per refinement level, then alternates
/// sample()/advance(). Each panel spans two steps; the offsets are the nodes of
/// the half-panel rule followed by those of the full-panel rule, so the
/// full-panel offsets of one level are the half-panel offsets of the previous
/// one.
class PanelSampler {
public:
    virtual ~PanelSampler() = default;
    virtual void reset(double step, std::span<const double> offsets) = 0;
    /// Values at (current position + offsets[j]) for j < count.
    virtual void sample(std::vector<Matrix>& out, std::size_t count) = 0;
    virtual void advance() = 0;
};

/// Adapter for integrands that can be evaluated at arbitrary t directly.
template <class F>
class FunctionSampler final : public PanelSampler {
public:
    explicit FunctionSampler(F f) : f_(std::move(f)) {}

    void reset(double step, std::span<const double> offsets) override
    {
        step_ = step;
        offsets_.assign(offsets.begin(), offsets.end());
        start_ = 0.0;
    }
    void sample(std::vector<Matrix>& out, std::size_t count) override
    {
        out.resize(count);
        for (std::size_t j = 0; j < count; ++j) out[j] = f_(start_ + offsets_[j]);
    }
    void advance() override { start_ += step_; }

private:
    F f_;
    double step_ = 0.0;
    double start_ = 0.0;
    std::vector<double> offsets_;
};

struct QuadratureResult {
    Matrix value;
    double error_estimate = 0.0;
    int panels = 0;
    double horizon = 0.0;
};

/// Integrate over [0, horizon]. Each panel is evaluated with the full-width
/// rule and with two half-width rules; the panel count doubles until the summed
/// difference is below cfg.tol relative to the integral. Throws QuadratureError
/// when cfg.max_panels is exhausted.
QuadratureResult integrate_panels(PanelSampler& sampler, double horizon, int initial_panels,
                                  const QuadratureConfig& cfg);

/// Initial panel count resolving roughly one oscillation period per panel.
int initial_panel_count(double horizon, double max_frequency, const QuadratureConfig& cfg);

} // namespace adiael
