// sylvester.cpp — Schur/back-substitution and integral-form Sylvester solvers

#include "adiael/sylvester.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace adiael {

namespace {

std::string format_cplx(cplx z)
{
    std::ostringstream os;
    os.precision(6);
    os << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
    return os.str();
}

/// Bartels–Stewart on the small side: Schur-reduce B, then solve one shifted
/// system (A + t_jj) y_j = (C U)_j - Σ_{i<j} t_ij y_i per column.
template <class ShiftSolve>
Matrix bartels_stewart(const Matrix& B, const Matrix& C, ShiftSolve&& solve)
{
    Eigen::ComplexSchur<Matrix> schur(B);
    const Matrix& T = schur.matrixT();
    const Matrix& U = schur.matrixU();
    const Matrix CU = C * U;
    Matrix Y(C.rows(), C.cols());
    for (Eigen::Index j = 0; j < B.rows(); ++j) {
        Matrix rhs = CU.col(j);
        for (Eigen::Index i = 0; i < j; ++i) {
            rhs -= T(i, j) * Y.col(i);
        }
        Y.col(j) = solve(T(j, j), rhs);
    }
    return Y * U.adjoint();
}

void check_sylvester_shapes(Eigen::Index n, const Matrix& B, const Matrix& C)
{
    if (B.rows() != B.cols()) throw std::invalid_argument("sylvester: B must be square");
    if (C.rows() != n || C.cols() != B.rows()) {
        throw std::invalid_argument("sylvester: C must be rows(A) x rows(B)");
    }
    if (!B.allFinite() || !C.allFinite()) {
        throw std::invalid_argument("sylvester: non-finite input");
    }
}

} // namespace

RectangularMap solve_sylvester_direct(const Matrix& A, const Matrix& B, const Matrix& C)
{
    if (A.rows() != A.cols()) throw std::invalid_argument("sylvester: A must be square");
    if (!A.allFinite()) throw std::invalid_argument("sylvester: non-finite input");
    check_sylvester_shapes(A.rows(), B, C);

    const double scale = std::max({A.norm(), B.norm(), std::numeric_limits<double>::min()});
    const double same_shift = 1e-14 * scale;

    // One LU per distinct diagonal entry of T.
    std::vector<std::pair<cplx, Eigen::PartialPivLU<Matrix>>> factors;
    auto factor_for = [&](cplx beta) -> const Eigen::PartialPivLU<Matrix>& {
        for (const auto& [shift, lu] : factors) {
            if (std::abs(shift - beta) <= same_shift) return lu;
        }
        Matrix shifted = A;
        shifted.diagonal().array() += beta;
        Eigen::PartialPivLU<Matrix> lu(shifted);
        if (!(lu.rcond() > kSylvesterGapThreshold)) {
            Eigen::ComplexEigenSolver<Matrix> es(A, false);
            const Vector& ev = es.eigenvalues();
            Eigen::Index best = 0;
            (ev.array() + beta).abs().minCoeff(&best);
            std::ostringstream os;
            os << "sylvester: spectra of A and -B are not disjoint: eigenvalue "
               << format_cplx(ev(best)) << " of A vs eigenvalue " << format_cplx(-beta)
               << " of -B (gap " << std::abs(ev(best) + beta) << ", scale " << scale << ")";
            throw SingularityError(os.str());
        }
        factors.emplace_back(beta, std::move(lu));
        return factors.back().second;
    };
    return bartels_stewart(B, C, [&](cplx beta, const Matrix& rhs) -> Matrix {
        return factor_for(beta).solve(rhs);
    });
}

// ---- BipartiteGenerator ---------------------------------------------------

BipartiteGenerator::BipartiteGenerator(const Operator& H_A, const Superoperator& L_B,
                                       double deflation, const Operator& sigma)
    : dimA_(H_A.rows()), H_A_(H_A), L_B_(L_B)
{
    if (H_A.rows() != H_A.cols() || H_A.rows() == 0) {
        throw std::invalid_argument("BipartiteGenerator: H_A must be square and non-empty");
    }
    if (!is_hermitian(H_A, 1e-12)) {
        throw std::invalid_argument("BipartiteGenerator: H_A must be Hermitian");
    }
    const auto dB = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(L_B.rows()))));
    if (dB * dB != L_B.rows() || L_B.rows() != L_B.cols()) {
        throw std::invalid_argument("BipartiteGenerator: L_B must be a square superoperator");
    }
    dimB_ = dB;
    block_ = L_B;
    if (deflation != 0.0) {
        if (sigma.rows() != dB || sigma.cols() != dB) {
            throw std::invalid_argument("BipartiteGenerator: deflation state has wrong dimension");
        }
        block_.noalias() -= deflation * (vectorize(sigma) * vectorize(identity(dB)).transpose());
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(H_A);
    energies_ = es.eigenvalues();
    basis_ = es.eigenvectors();
    rotation_ = tensor(basis_, identity(dB));
}

Matrix BipartiteGenerator::to_blocks(const Matrix& cols) const
{
    const Eigen::Index dA = dimA_, dB = dimB_, D = dA * dB;
    if (cols.rows() != D * D) throw std::invalid_argument("BipartiteGenerator: dimension mismatch");
    Matrix blocks(dB * dB, dA * dA * cols.cols());
    Matrix X(D, D);
    for (Eigen::Index c = 0; c < cols.cols(); ++c) {
        X.noalias() = rotation_.adjoint() * Eigen::Map<const Matrix>(cols.col(c).data(), D, D) * rotation_;
        for (Eigen::Index ap = 0; ap < dA; ++ap) {
            for (Eigen::Index a = 0; a < dA; ++a) {
                Eigen::Map<Matrix>(blocks.col((c * dA + ap) * dA + a).data(), dB, dB) =
                    X.block(a * dB, ap * dB, dB, dB);
            }
        }
    }
    return blocks;
}

Matrix BipartiteGenerator::from_blocks(const Matrix& blocks, Eigen::Index ncols) const
{
    const Eigen::Index dA = dimA_, dB = dimB_, D = dA * dB;
    Matrix out(D * D, ncols);
    Matrix X(D, D);
    for (Eigen::Index c = 0; c < ncols; ++c) {
        for (Eigen::Index ap = 0; ap < dA; ++ap) {
            for (Eigen::Index a = 0; a < dA; ++a) {
                X.block(a * dB, ap * dB, dB, dB) =
                    Eigen::Map<const Matrix>(blocks.col((c * dA + ap) * dA + a).data(), dB, dB);
            }
        }
        Eigen::Map<Matrix>(out.col(c).data(), D, D) = rotation_ * X * rotation_.adjoint();
    }
    return out;
}

Matrix BipartiteGenerator::apply(const Matrix& cols) const
{
    const Eigen::Index dA = dimA_;
    const Matrix blocks = to_blocks(cols);
    Matrix out = block_ * blocks;
    for (Eigen::Index j = 0; j < blocks.cols(); ++j) {
        const Eigen::Index a = j % dA, ap = (j / dA) % dA;
        out.col(j) -= I_unit * (energies_(a) - energies_(ap)) * blocks.col(j);
    }
    return from_blocks(out, cols.cols());
}

Superoperator BipartiteGenerator::dense() const
{
    return apply(identity(dim()));
}

const Eigen::PartialPivLU<Matrix>& BipartiteGenerator::factor(cplx shift) const
{
    const double scale = std::max({block_.norm(), std::abs(shift), 1e-300});
    for (const auto& [s, lu] : factors_) {
        if (std::abs(s - shift) <= 1e-14 * scale) return *lu;
    }
    Matrix M = block_;
    M.diagonal().array() += shift;
    auto lu = std::make_shared<Eigen::PartialPivLU<Matrix>>(M);
    if (!(lu->rcond() > kSylvesterGapThreshold)) {
        Eigen::ComplexEigenSolver<Matrix> es(block_, false);
        const Vector& ev = es.eigenvalues();
        Eigen::Index best = 0;
        (ev.array() + shift).abs().minCoeff(&best);
        std::ostringstream os;
        os << "sylvester: bath block eigenvalue " << format_cplx(ev(best))
           << " cancels the shift " << format_cplx(shift) << " (gap "
           << std::abs(ev(best) + shift) << ", scale " << scale << ")";
        throw SingularityError(os.str());
    }
    factors_.emplace_back(shift, lu);
    return *factors_.back().second;
}

Matrix BipartiteGenerator::solve_shifted(cplx beta, const Matrix& rhs) const
{
    const Eigen::Index dA = dimA_;
    Matrix blocks = to_blocks(rhs);
    for (Eigen::Index j = 0; j < blocks.cols(); ++j) {
        const Eigen::Index a = j % dA, ap = (j / dA) % dA;
        const cplx shift = beta - I_unit * (energies_(a) - energies_(ap));
        blocks.col(j) = factor(shift).solve(Vector(blocks.col(j)));
    }
    return from_blocks(blocks, rhs.cols());
}

RectangularMap solve_sylvester_direct(const BipartiteGenerator& A, const Matrix& B, const Matrix& C)
{
    check_sylvester_shapes(A.dim(), B, C);
    return bartels_stewart(B, C, [&](cplx beta, const Matrix& rhs) -> Matrix {
        return A.solve_shifted(beta, rhs);
    });
}

double sylvester_residual(const Matrix& A, const Matrix& B, const Matrix& C, const Matrix& X)
{
    return (A * X + X * B - C).norm();
}

double decay_rate_from_spectrum(const Vector& eigenvalues, double scale)
{
    const double tiny = 1e-10 * std::max(scale, 1e-300);
    double mu = std::numeric_limits<double>::infinity();
    for (const cplx& z : eigenvalues) {
        if (z.real() > tiny) {
            throw DivergenceError("quadrature: generator has a growing direction (Re λ = " +
                                  std::to_string(z.real()) + ")");
        }
        if (z.real() < -tiny) mu = std::min(mu, -z.real());
    }
    if (!std::isfinite(mu)) {
        throw DivergenceError("quadrature: no decaying direction detected");
    }
    return mu;
}

// ---- DenseFlow ------------------------------------------------------------

DenseFlow::DenseFlow(const Matrix& A)
    : prop_(std::make_shared<ExpPropagator>(A))
{
}

LinearFlow::Applier DenseFlow::propagator(double t) const
{
    if (prop_->diagonalized()) {
        auto prop = prop_;
        return [prop, t](const Matrix& v) { return prop->apply(t, v); };
    }
    Matrix E = expm_pade(t * prop_->generator());
    return [E = std::move(E)](const Matrix& v) { return (E * v).eval(); };
}

double DenseFlow::decay_rate() const
{
    return decay_rate_from_spectrum(prop_->eigenvalues(), prop_->generator().norm());
}

double DenseFlow::max_frequency() const
{
    return prop_->eigenvalues().imag().cwiseAbs().maxCoeff();
}

// ---- BipartiteFreeFlow ----------------------------------------------------

BipartiteFreeFlow::BipartiteFreeFlow(const Operator& H_A, const Superoperator& L_B)
    : BipartiteFreeFlow(H_A, std::make_shared<const ExpPropagator>(L_B))
{
}

BipartiteFreeFlow::BipartiteFreeFlow(const Operator& H_A, std::shared_ptr<const ExpPropagator> bath)
    : dimA_(H_A.rows()), bath_(std::move(bath))
{
    if (!bath_) throw std::invalid_argument("BipartiteFreeFlow: missing bath propagator");
    const Eigen::Index n = bath_->generator().rows();
    const auto dB = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(n))));
    if (dB * dB != n) {
        throw std::invalid_argument("BipartiteFreeFlow: L_B must be a square superoperator");
    }
    if (!is_hermitian(H_A, 1e-12)) {
        throw std::invalid_argument("BipartiteFreeFlow: H_A must be Hermitian");
    }
    dimB_ = dB;
    Eigen::SelfAdjointEigenSolver<Matrix> es(H_A);
    energies_ = es.eigenvalues();
    basis_ = es.eigenvectors();
}

Eigen::Index BipartiteFreeFlow::dim() const
{
    const Eigen::Index D = dimA_ * dimB_;
    return D * D;
}

LinearFlow::Applier BipartiteFreeFlow::propagator(double t) const
{
    const Eigen::Index dA = dimA_, dB = dimB_, D = dA * dB;
    const Vector phases = (cplx(0.0, -t) * energies_.cast<cplx>()).array().exp();
    const Matrix U = basis_ * phases.asDiagonal() * basis_.adjoint();
    // vec(U M U^dag) = (conj(U) x U) vec(M); acts on the dA x dA block layout of one column.
    const Matrix T = tensor(U.conjugate(), U).transpose();
    auto bath = bath_;
    // Padé fallback, formed on first need only.
    auto dense = std::make_shared<Matrix>();

    return [=](const Matrix& cols) {
        const Eigen::Index m = cols.cols(), nA = dA * dA;
        // Gather every dB x dB block of every column, apply e^{tL_B} in one product.
        Matrix blocks(dB * dB, nA * m);
        for (Eigen::Index c = 0; c < m; ++c) {
            const Eigen::Map<const Matrix> X(cols.col(c).data(), D, D);
            for (Eigen::Index ap = 0; ap < dA; ++ap) {
                for (Eigen::Index a = 0; a < dA; ++a) {
                    Eigen::Map<Matrix>(blocks.col((c * dA + ap) * dA + a).data(), dB, dB) =
                        X.block(a * dB, ap * dB, dB, dB);
                }
            }
            // the A-side rotation commutes with the bath evolution
            blocks.middleCols(c * nA, nA) = (blocks.middleCols(c * nA, nA) * T).eval();
        }
        Matrix evolved;
        if (const auto y = bath->expansion(blocks)) {
            evolved = bath->from_expansion(t, *y);
        } else {
            if (dense->size() == 0) *dense = expm_pade(t * bath->generator());
            evolved = *dense * blocks;
        }
        Matrix out(D * D, m);
        for (Eigen::Index c = 0; c < m; ++c) {
            Eigen::Map<Matrix> X(out.col(c).data(), D, D);
            for (Eigen::Index ap = 0; ap < dA; ++ap) {
                for (Eigen::Index a = 0; a < dA; ++a) {
                    X.block(a * dB, ap * dB, dB, dB) =
                        Eigen::Map<const Matrix>(evolved.col((c * dA + ap) * dA + a).data(), dB, dB);
                }
            }
        }
        return out;
    };
}

double BipartiteFreeFlow::decay_rate() const
{
    // The A-side conjugation is unitary; decay comes from L_B alone.
    const Vector& ev = bath_->eigenvalues();
    return decay_rate_from_spectrum(ev, ev.cwiseAbs().maxCoeff());
}

double BipartiteFreeFlow::max_frequency() const
{
    const double spread = energies_.size() ? energies_.maxCoeff() - energies_.minCoeff() : 0.0;
    return bath_->eigenvalues().imag().cwiseAbs().maxCoeff() + spread;
}

// ---- quadrature solver ----------------------------------------------------

namespace {

/// Samples e^{tA} C e^{tB} while marching W = e^{sA} C e^{sB} along the grid.
class SylvesterIntegrand final : public PanelSampler {
public:
    SylvesterIntegrand(const LinearFlow& flow, const Matrix& B, const Matrix& C)
        : flow_(flow), C_(C), Bprop_(B)
    {
    }

    void reset(double step, std::span<const double> offsets) override
    {
        step_A_ = flow_.propagator(step);
        step_B_ = Bprop_.at(step);
        // Offsets repeat between refinement levels; reuse their propagators.
        std::vector<std::pair<double, LinearFlow::Applier>> nodes;
        node_B_.clear();
        for (double d : offsets) {
            auto hit = std::find_if(node_A_.begin(), node_A_.end(),
                                    [d](const auto& e) { return e.first == d; });
            nodes.emplace_back(d, hit != node_A_.end() ? hit->second : flow_.propagator(d));
            node_B_.push_back(Bprop_.at(d));
        }
        node_A_ = std::move(nodes);
        W_ = C_;
    }

    void sample(std::vector<Matrix>& out, std::size_t count) override
    {
        out.resize(count);
        for (std::size_t j = 0; j < count; ++j) {
            out[j] = node_A_[j].second(W_) * node_B_[j];
        }
    }

    void advance() override { W_ = step_A_(W_) * step_B_; }

private:
    const LinearFlow& flow_;
    Matrix C_;
    ExpPropagator Bprop_;
    LinearFlow::Applier step_A_;
    Matrix step_B_;
    std::vector<std::pair<double, LinearFlow::Applier>> node_A_;
    std::vector<Matrix> node_B_;
    Matrix W_;
};

} // namespace

RectangularMap solve_sylvester_quadrature(const LinearFlow& A, const Matrix& B, const Matrix& C,
                                          const QuadratureConfig& q)
{
    q.validate();
    if (B.rows() != B.cols() || C.rows() != A.dim() || C.cols() != B.rows()) {
        throw std::invalid_argument("sylvester quadrature: inconsistent dimensions");
    }
    if (C.isZero(0.0)) {
        return Matrix::Zero(C.rows(), C.cols());
    }
    const double mu = A.decay_rate();
    const double horizon = q.decay_folds / mu;
    Eigen::ComplexEigenSolver<Matrix> esB(B, false);
    const double freq = A.max_frequency() + esB.eigenvalues().imag().cwiseAbs().maxCoeff();

    SylvesterIntegrand integrand(A, B, C);
    QuadratureResult r = integrate_panels(integrand, horizon, initial_panel_count(horizon, freq, q), q);
    return -r.value;
}

RectangularMap solve_sylvester_quadrature(const Matrix& A, const Matrix& B, const Matrix& C,
                                          const QuadratureConfig& q)
{
    if (A.rows() != A.cols()) {
        throw std::invalid_argument("sylvester quadrature: A must be square");
    }
    DenseFlow flow(A);
    return solve_sylvester_quadrature(flow, B, C, q);
}

} // namespace adiael
