// quadrature.cpp — Gauss–Legendre panels with half-panel error control

#include "adiael/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace adiael {

void QuadratureConfig::validate() const
{
    if (!(tol > 0.0)) throw std::invalid_argument("quadrature: tol must be positive");
    if (!(decay_folds > 0.0)) throw std::invalid_argument("quadrature: decay_folds must be positive");
    if (max_panels < 1) throw std::invalid_argument("quadrature: max_panels must be >= 1");
    if (nodes < 2) throw std::invalid_argument("quadrature: need at least 2 nodes per panel");
}

GaussLegendreRule gauss_legendre(int n, double a, double b)
{
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
    GaussLegendreRule rule;
    rule.x.resize(n);
    rule.w.resize(n);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const int m = (n + 1) / 2;
    for (int i = 1; i <= m; ++i) {
        double z = std::cos(std::numbers::pi * (i - 0.25) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 1; j <= n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) < 1e-15) break;
        }
        rule.x[i - 1] = mid - half * z;
        rule.x[n - i] = mid + half * z;
        rule.w[i - 1] = 2.0 * half / ((1.0 - z * z) * pp * pp);
        rule.w[n - i] = rule.w[i - 1];
    }
    return rule;
}

int initial_panel_count(double horizon, double max_frequency, const QuadratureConfig& cfg)
{
    const double periods = horizon * max_frequency / (2.0 * std::numbers::pi);
    const double want = std::max(4.0, std::ceil(periods));
    return static_cast<int>(std::min<double>(want, cfg.max_panels));
}

QuadratureResult integrate_panels(PanelSampler& sampler, double horizon, int initial_panels,
                                  const QuadratureConfig& cfg)
{
    cfg.validate();
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
        throw std::invalid_argument("integrate_panels: horizon must be positive and finite");
    }
    int panels = std::clamp(initial_panels, 1, cfg.max_panels);
    const int n = cfg.nodes;

    for (;;) {
        const double width = horizon / panels;
        const GaussLegendreRule full = gauss_legendre(n, 0.0, width);
        const GaussLegendreRule half = gauss_legendre(n, 0.0, 0.5 * width);

        std::vector<double> offsets;
        offsets.reserve(2 * n);
        offsets.insert(offsets.end(), half.x.begin(), half.x.end());
        offsets.insert(offsets.end(), full.x.begin(), full.x.end());

        sampler.reset(0.5 * width, offsets);
        std::vector<Matrix> first, second;
        Matrix total;
        double err = 0.0;
        for (int p = 0; p < panels; ++p) {
            sampler.sample(first, 2 * n);
            sampler.advance();
            sampler.sample(second, n);
            Matrix coarse = full.w[0] * first[n];
            Matrix fine = half.w[0] * (first[0] + second[0]);
            for (int j = 1; j < n; ++j) {
                coarse += full.w[j] * first[n + j];
                fine += half.w[j] * (first[j] + second[j]);
            }
            err += (fine - coarse).norm();
            if (p == 0) {
                total = std::move(fine);
            } else {
                total += fine;
            }
            if (p + 1 < panels) sampler.advance();
        }

        const double scale = total.norm();
        if (err <= cfg.tol * scale || scale == 0.0) {
            return QuadratureResult{std::move(total), err, panels, horizon};
        }
        if (2 * panels > cfg.max_panels) {
            std::ostringstream os;
            os << "quadrature: estimated relative error " << err / scale << " exceeds tol "
               << cfg.tol << " with " << panels << " panels (max_panels = " << cfg.max_panels
               << ")";
            throw QuadratureError(os.str());
        }
        panels *= 2;
    }
}

} // namespace adiael
