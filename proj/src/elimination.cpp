// elimination.cpp — Reduced generators and invariant-manifold corrections

#include "adiael/elimination.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace adiael {

std::string to_string(SylvesterMethod m)
{
    return m == SylvesterMethod::direct ? "direct" : "quadrature";
}

std::string to_string(Ls2Method m)
{
    return m == Ls2Method::adjoint_quadrature ? "adjoint_quadrature" : "from_k1";
}

SylvesterMethod parse_sylvester_method(const std::string& s)
{
    if (s == "direct") return SylvesterMethod::direct;
    if (s == "quadrature") return SylvesterMethod::quadrature;
    throw std::invalid_argument("unknown Sylvester method '" + s + "'");
}

Superoperator ReducedModel::generator(int upto) const
{
    if (orders.empty()) throw std::logic_error("ReducedModel: no orders computed");
    const int last = upto < 0 ? max_order() : std::min(upto, max_order());
    Superoperator sum = orders[0].generator;
    for (int j = 1; j <= last; ++j) sum += orders[j].generator;
    return sum;
}

RectangularMap ReducedModel::correction(int upto) const
{
    if (orders.empty()) throw std::logic_error("ReducedModel: no orders computed");
    const int last = upto < 0 ? max_order() : std::min(upto, max_order());
    RectangularMap sum = orders[0].correction;
    for (int j = 1; j <= last; ++j) sum += orders[j].correction;
    return sum;
}

Operator centered_coupling(const Operator& B, const Operator& rho_B)
{
    return B - (B * rho_B).trace() * identity(B.rows());
}

Operator a_minus(const Operator& A, const Operator& H_A, double t)
{
    if (!is_hermitian(H_A, 1e-12)) {
        throw std::invalid_argument("a_minus: H_A must be Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(H_A);
    const Matrix& V = es.eigenvectors();
    const Vector phase = (cplx(0.0, -t) * es.eigenvalues().cast<cplx>()).array().exp();
    // V diag(e^{-itE}) V^† A V diag(e^{itE}) V^†
    Matrix inner = V.adjoint() * A * V;
    inner = phase.asDiagonal() * inner * phase.conjugate().asDiagonal();
    return V * inner * V.adjoint();
}

Operator b_heisenberg(const Operator& B, const LindbladSpec& spec, double t)
{
    if (t < 0.0) throw std::invalid_argument("b_heisenberg: t must be >= 0");
    if (t == 0.0) return B;
    return unvectorize(Vector(expm(adjoint_lindbladian(spec), t) * vectorize(B)), B.rows());
}

// ---- Eliminator -----------------------------------------------------------

namespace {

BipartiteModel validated(BipartiteModel m)
{
    m.validate();
    return m;
}

double gap_of(const ExpPropagator& p)
{
    return decay_rate_from_spectrum(p.eigenvalues(), p.eigenvalues().cwiseAbs().maxCoeff());
}

} // namespace

Eliminator::Eliminator(BipartiteModel model)
    : model_(validated(std::move(model))),
      L_B_(lindbladian(model_.bath)),
      rho_B_(steady_state(L_B_)),
      H_I_(model_.interaction()),
      bath_prop_(std::make_shared<const ExpPropagator>(L_B_)),
      bath_gap_(gap_of(*bath_prop_)),
      free_(model_.H_A, L_B_),
      // The free generator is singular on {X ⊗ rho_B}; shifting that invariant
      // block by the bath gap leaves the gauge-fixed solution unchanged.
      deflated_(model_.H_A, L_B_, bath_gap_, rho_B_),
      trace_B_(partial_trace_B_map(model_.dimA(), model_.dimB())),
      embed_(append_state_map(rho_B_, model_.dimA()))
{
    if (model_.fock_cutoff > 0) {
        const double tail = fock_tail_mass(rho_B_, 2);
        if (tail >= kFockTailLimit) {
            std::ostringstream os;
            os << "fock cutoff " << model_.fock_cutoff << " inadequate: steady-state population "
               << "of the top two levels is " << tail << " (limit " << kFockTailLimit << ")";
            warnings_.push_back(os.str());
        }
    }
}

Matrix Eliminator::apply_free(const Matrix& cols) const
{
    return free_.apply(cols);
}

Matrix Eliminator::apply_coupling(const Matrix& cols) const
{
    const Eigen::Index D = model_.dim();
    if (cols.rows() != D * D) throw std::invalid_argument("apply_coupling: dimension mismatch");
    Matrix out(D * D, cols.cols());
    const cplx factor = -I_unit * model_.g;
    for (Eigen::Index c = 0; c < cols.cols(); ++c) {
        const Eigen::Map<const Matrix> X(cols.col(c).data(), D, D);
        Eigen::Map<Matrix>(out.col(c).data(), D, D) = factor * (H_I_ * X - X * H_I_);
    }
    return out;
}

Superoperator Eliminator::free_generator() const
{
    return free_.dense();
}

Superoperator Eliminator::coupling_generator() const
{
    return apply_coupling(identity(model_.dim() * model_.dim()));
}

Superoperator Eliminator::generator0() const
{
    return -I_unit * commutator(model_.H_A);
}

RectangularMap Eliminator::correction0() const
{
    return embed_;
}

Superoperator Eliminator::ls1() const
{
    const Eigen::Index dA = model_.dimA();
    Superoperator L = Superoperator::Zero(dA * dA, dA * dA);
    for (const Coupling& c : model_.couplings) {
        const cplx mean = (c.B * rho_B_).trace();
        L += (-I_unit * model_.g * mean) * commutator(c.A);
    }
    return L;
}

Superoperator Eliminator::generator_from(const RectangularMap& previous) const
{
    const Eigen::Index dA = model_.dimA(), dB = model_.dimB(), D = dA * dB;
    if (previous.rows() != D * D || previous.cols() != dA * dA) {
        throw std::invalid_argument("generator_from: correction has wrong shape");
    }
    Superoperator L = Superoperator::Zero(dA * dA, dA * dA);
    if (model_.g == 0.0) return L;
    std::vector<Operator> lifted;
    for (const Coupling& c : model_.couplings) lifted.push_back(tensor(identity(dA), c.B));
    for (Eigen::Index col = 0; col < previous.cols(); ++col) {
        const Eigen::Map<const Matrix> K(previous.col(col).data(), D, D);
        Operator out = Operator::Zero(dA, dA);
        for (std::size_t k = 0; k < lifted.size(); ++k) {
            const Operator reduced = partial_trace_B(lifted[k] * K, dA, dB);
            const Operator& A = model_.couplings[k].A;
            out += A * reduced - reduced * A;
        }
        L.col(col) = vectorize((-I_unit * model_.g) * out);
    }
    return L;
}

RectangularMap Eliminator::solve_correction(const RectangularMap& known, SylvesterMethod method,
                                            const QuadratureConfig& q) const
{
    const RectangularMap C = known - embed_ * (trace_B_ * known);
    const Superoperator B = I_unit * commutator(model_.H_A);
    if (method == SylvesterMethod::direct) {
        return solve_sylvester_direct(deflated_, B, C);
    }
    const BipartiteFreeFlow flow(model_.H_A, bath_prop_);
    return solve_sylvester_quadrature(flow, B, C, q);
}

RectangularMap Eliminator::k1(SylvesterMethod method, const QuadratureConfig& q) const
{
    const Eigen::Index dA = model_.dimA(), D = model_.dim();
    if (model_.g == 0.0 || model_.couplings.empty()) {
        return RectangularMap::Zero(D * D, dA * dA);
    }
    const RectangularMap known = embed_ * ls1() - apply_coupling(embed_);
    return solve_correction(known, method, q);
}

Correlations Eliminator::correlations(double t) const
{
    if (t < 0.0) throw std::invalid_argument("correlations: t must be >= 0");
    const auto K = static_cast<Eigen::Index>(model_.couplings.size());
    const Eigen::Index dB = model_.dimB();
    Matrix heis(dB * dB, K), w(dB * dB, K), w_tilde(dB * dB, K);
    for (Eigen::Index k = 0; k < K; ++k) {
        const Operator& B = model_.couplings[k].B;
        const Operator B0 = centered_coupling(B, rho_B_);
        heis.col(k) = vectorize(B);
        w.col(k) = vectorize(Operator((B0 * rho_B_).transpose()));
        w_tilde.col(k) = vectorize(Operator((rho_B_ * B0).transpose()));
    }
    if (t > 0.0) heis = bath_prop_->adjoint().apply(t, heis);
    return Correlations{w.transpose() * heis, w_tilde.transpose() * heis};
}

namespace {

/// Samples c_{kl}(t) A_k^-(t) and c~_{kl}(t) A_k^-(t) for all (k, l), stacked
/// horizontally: block k*K + l holds the c part, K^2 + k*K + l the c~ part.
///
/// The Heisenberg-evolved couplings are marched in the eigen-coordinates of
/// the adjoint bath generator when their expansion is benign, so each sample
/// costs a diagonal scaling; otherwise dense propagators are used.
class CorrelationIntegrand final : public PanelSampler {
public:
    CorrelationIntegrand(const BipartiteModel& model, const Operator& rho_B, ExpPropagator heisenberg)
        : prop_(std::move(heisenberg))
    {
        K_ = static_cast<Eigen::Index>(model.couplings.size());
        dA_ = model.dimA();
        const Eigen::Index dB = model.dimB();
        start_.resize(dB * dB, K_);
        Matrix w(dB * dB, K_), w_tilde(dB * dB, K_);
        for (Eigen::Index k = 0; k < K_; ++k) {
            const Operator& B = model.couplings[k].B;
            const Operator B0 = centered_coupling(B, rho_B);
            start_.col(k) = vectorize(B);
            w.col(k) = vectorize(Operator((B0 * rho_B).transpose()));
            w_tilde.col(k) = vectorize(Operator((rho_B * B0).transpose()));
        }
        if (auto y = prop_.expansion(start_)) {
            coords_ = true;
            y0_ = std::move(*y);
            w_ = w.transpose() * prop_.eigenvectors();
            w_tilde_ = w_tilde.transpose() * prop_.eigenvectors();
        } else {
            w_ = w.transpose();
            w_tilde_ = w_tilde.transpose();
        }
        Eigen::SelfAdjointEigenSolver<Matrix> es(model.H_A);
        energies_ = es.eigenvalues();
        basis_ = es.eigenvectors();
        for (const Coupling& c : model.couplings) {
            rotated_.push_back(basis_.adjoint() * c.A * basis_);
        }
    }

    /// Largest frequency the integrand actually contains.
    double frequency() const
    {
        const double spread = energies_.maxCoeff() - energies_.minCoeff();
        if (!coords_) return prop_.eigenvalues().imag().cwiseAbs().maxCoeff() + spread;
        const Eigen::VectorXd weight = y0_.cwiseAbs().rowwise().maxCoeff();
        const double cut = 1e-13 * weight.maxCoeff();
        double f = 0.0;
        for (Eigen::Index i = 0; i < weight.size(); ++i) {
            if (weight(i) > cut) f = std::max(f, std::abs(prop_.eigenvalues()(i).imag()));
        }
        return f + spread;
    }

    void reset(double step, std::span<const double> offsets) override
    {
        offsets_.assign(offsets.begin(), offsets.end());
        t0_ = 0.0;
        step_ = step;
        if (coords_) {
            const Vector& ev = prop_.eigenvalues();
            step_phase_ = (step * ev).array().exp();
            node_phase_.resize(ev.size(), offsets.size());
            for (std::size_t j = 0; j < offsets.size(); ++j) {
                node_phase_.col(j) = (offsets[j] * ev).array().exp();
            }
            current_ = y0_;
            return;
        }
        step_matrix_ = prop_.at(step);
        // Offsets repeat between refinement levels; reuse their propagators.
        std::vector<std::pair<double, Matrix>> nodes;
        for (double d : offsets) {
            auto hit = std::find_if(nodes_.begin(), nodes_.end(),
                                    [d](const auto& e) { return e.first == d; });
            nodes.emplace_back(d, hit != nodes_.end() ? std::move(hit->second) : prop_.at(d));
        }
        nodes_ = std::move(nodes);
        current_ = start_;
    }

    void sample(std::vector<Matrix>& out, std::size_t count) override
    {
        out.resize(count);
        Matrix c, ct;
        for (std::size_t j = 0; j < count; ++j) {
            if (coords_) {
                const Matrix y = node_phase_.col(j).asDiagonal() * current_;
                c.noalias() = w_ * y;
                ct.noalias() = w_tilde_ * y;
            } else {
                const Matrix heis = nodes_[j].second * current_;
                c.noalias() = w_ * heis;
                ct.noalias() = w_tilde_ * heis;
            }
            const double t = t0_ + offsets_[j];
            Matrix& value = out[j];
            value.resize(dA_, 2 * K_ * K_ * dA_);
            for (Eigen::Index k = 0; k < K_; ++k) {
                const Operator Am = a_minus_at(k, t);
                for (Eigen::Index l = 0; l < K_; ++l) {
                    value.middleCols((k * K_ + l) * dA_, dA_) = c(k, l) * Am;
                    value.middleCols((K_ * K_ + k * K_ + l) * dA_, dA_) = ct(k, l) * Am;
                }
            }
        }
    }

    void advance() override
    {
        if (coords_) {
            current_ = step_phase_.asDiagonal() * current_;
        } else {
            current_ = step_matrix_ * current_;
        }
        t0_ += step_;
    }

private:
    Operator a_minus_at(Eigen::Index k, double t) const
    {
        const Vector phase = (cplx(0.0, -t) * energies_.cast<cplx>()).array().exp();
        return basis_ * (phase.asDiagonal() * rotated_[k] * phase.conjugate().asDiagonal()) *
               basis_.adjoint();
    }

    ExpPropagator prop_;
    bool coords_ = false;
    Eigen::Index K_ = 0;
    Eigen::Index dA_ = 0;
    Matrix start_, y0_, w_, w_tilde_;
    Eigen::VectorXd energies_;
    Matrix basis_;
    std::vector<Matrix> rotated_;
    std::vector<double> offsets_;
    double t0_ = 0.0;
    double step_ = 0.0;
    Matrix current_;
    // eigen-coordinate marching
    Vector step_phase_;
    Matrix node_phase_;
    // dense marching
    Matrix step_matrix_;
    std::vector<std::pair<double, Matrix>> nodes_;
};

} // namespace

Superoperator Eliminator::ls2(Ls2Method method, const QuadratureConfig& q,
                              SylvesterMethod k1_method) const
{
    const Eigen::Index dA = model_.dimA();
    if (model_.g == 0.0 || model_.couplings.empty()) {
        return Superoperator::Zero(dA * dA, dA * dA);
    }
    if (method == Ls2Method::from_k1) {
        return generator_from(k1(k1_method, q));
    }

    q.validate();
    CorrelationIntegrand integrand(model_, rho_B_, bath_prop_->adjoint());
    const double horizon = q.decay_folds / bath_gap_;
    const QuadratureResult r = integrate_panels(
        integrand, horizon, initial_panel_count(horizon, integrand.frequency(), q), q);

    const auto K = static_cast<Eigen::Index>(model_.couplings.size());
    Superoperator L = Superoperator::Zero(dA * dA, dA * dA);
    for (Eigen::Index k = 0; k < K; ++k) {
        for (Eigen::Index l = 0; l < K; ++l) {
            const Operator M = r.value.middleCols((k * K + l) * dA, dA);
            const Operator Mt = r.value.middleCols((K * K + k * K + l) * dA, dA);
            const Superoperator Al = commutator(model_.couplings[l].A);
            L += Al * (left_mult(M) - right_mult(Mt));
        }
    }
    return -(model_.g * model_.g) * L;
}

double Eliminator::gauge_residual(const RectangularMap& K) const
{
    return (trace_B_ * K).norm();
}

double Eliminator::invariance_residual(const std::vector<ReducedOrder>& orders, int j) const
{
    if (j < 0 || j >= static_cast<int>(orders.size())) {
        throw std::out_of_range("invariance_residual: order not computed");
    }
    std::vector<Matrix> terms;
    terms.push_back(apply_free(orders[j].correction));
    Matrix lhs = terms.back();
    if (j >= 1) {
        terms.push_back(apply_coupling(orders[j - 1].correction));
        lhs += terms.back();
    }
    Matrix rhs = Matrix::Zero(lhs.rows(), lhs.cols());
    for (int i = 0; i <= j; ++i) {
        terms.push_back(orders[i].correction * orders[j - i].generator);
        rhs += terms.back();
    }
    // Floor: size of the free generator acting on K_j, for orders where every
    // term vanishes (e.g. H_A = 0 at order zero).
    const double free_scale =
        L_B_.norm() / static_cast<double>(model_.dimB()) + 2.0 * model_.H_A.norm();
    double scale = free_scale * orders[j].correction.norm();
    for (const Matrix& t : terms) scale = std::max(scale, t.norm());
    const double diff = (lhs - rhs).norm();
    return scale > 0.0 ? diff / scale : diff;
}

ReducedModel Eliminator::reduce(int max_order, SylvesterMethod method,
                                const QuadratureConfig& q) const
{
    if (max_order < 0) throw std::invalid_argument("reduce: order must be >= 0");
    if (max_order > kMaxOrder) {
        throw std::invalid_argument("reduce: order " + std::to_string(max_order) +
                                    " exceeds the supported maximum " + std::to_string(kMaxOrder));
    }
    ReducedModel out;
    out.model = model_;
    out.bath_state = rho_B_;
    out.warnings = warnings_;

    ReducedOrder zero;
    zero.generator = generator0();
    zero.correction = embed_;
    zero.method = method;
    zero.gauge_residual = (trace_B_ * embed_ - identity(model_.dimA() * model_.dimA())).norm();
    out.orders.push_back(std::move(zero));
    out.orders[0].invariance_residual = invariance_residual(out.orders, 0);

    for (int n = 1; n <= max_order; ++n) {
        ReducedOrder next;
        next.method = method;
        next.generator = generator_from(out.orders[n - 1].correction);
        RectangularMap known = embed_ * next.generator - apply_coupling(out.orders[n - 1].correction);
        for (int m = 1; m <= n - 1; ++m) {
            known += out.orders[m].correction * out.orders[n - m].generator;
        }
        next.correction = solve_correction(known, method, q);
        next.gauge_residual = gauge_residual(next.correction);
        out.orders.push_back(std::move(next));
        out.orders[n].invariance_residual = invariance_residual(out.orders, n);
        if (out.orders[n].invariance_residual > 1e-8) {
            std::ostringstream os;
            os << "order " << n << " invariance residual " << out.orders[n].invariance_residual
               << " exceeds 1e-8";
            out.warnings.push_back(os.str());
        }
    }
    return out;
}

// ---- free functions -------------------------------------------------------

Superoperator ls1(const BipartiteModel& model)
{
    return Eliminator(model).ls1();
}

RectangularMap k1(const BipartiteModel& model, SylvesterMethod method, const QuadratureConfig& q)
{
    return Eliminator(model).k1(method, q);
}

Superoperator ls2(const BipartiteModel& model, Ls2Method method, const QuadratureConfig& q)
{
    return Eliminator(model).ls2(method, q);
}

Correlations correlation_coeffs(const BipartiteModel& model, double t)
{
    return Eliminator(model).correlations(t);
}

ReducedModel reduce(const BipartiteModel& model, int max_order, SylvesterMethod method,
                    const QuadratureConfig& q)
{
    return Eliminator(model).reduce(max_order, method, q);
}

} // namespace adiael
