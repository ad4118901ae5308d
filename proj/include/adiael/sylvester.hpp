// sylvester.hpp — Two independent solvers for A X + X B = C
//
// The direct solver reduces B to Schur form and solves one shifted linear
// system per column (Bartels–Stewart with the large side kept dense, or
// handled block by block when A is a bipartite free generator). The
// quadrature solver evaluates X = -∫_0^∞ e^{tA} C e^{tB} dt on a truncated
// horizon, propagating the A side through a LinearFlow so that structured
// generators never need their full propagator formed.

#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "adiael/operator_core.hpp"
#include "adiael/quadrature.hpp"

namespace adiael {

/// Relative spectral-gap threshold below which the direct solver reports
/// a singular equation.
inline constexpr double kSylvesterGapThreshold = 1e-10;

RectangularMap solve_sylvester_direct(const Matrix& A, const Matrix& B, const Matrix& C);

/// ‖A X + X B − C‖_F
double sylvester_residual(const Matrix& A, const Matrix& B, const Matrix& C, const Matrix& X);

/// G = -i (H_A ⊗ I)^× + I ⊗ L_B − deflation · (X -> Tr_B(X) ⊗ sigma), acting on
/// vectorized operators over H_A ⊗ H_B. In the eigenbasis of H_A every
/// d_B x d_B block evolves on its own, so shifted solves need only d_B^2
/// sized factorizations.
class BipartiteGenerator {
public:
    BipartiteGenerator(const Operator& H_A, const Superoperator& L_B, double deflation = 0.0,
                       const Operator& sigma = Operator());

    Eigen::Index dimA() const { return dimA_; }
    Eigen::Index dimB() const { return dimB_; }
    Eigen::Index dim() const { return dimA_ * dimA_ * dimB_ * dimB_; }

    /// G applied to each column.
    Matrix apply(const Matrix& cols) const;
    /// Dense (d_A d_B)^2 square matrix of G.
    Superoperator dense() const;
    /// Solves (G + beta) x = rhs column by column. Throws SingularityError when
    /// a block system is numerically singular.
    Matrix solve_shifted(cplx beta, const Matrix& rhs) const;

    const Operator& hamiltonian() const { return H_A_; }
    const Superoperator& bath_generator() const { return L_B_; }

private:
    /// Splits each column into the d_B x d_B blocks of U^† X U, U the H_A eigenbasis.
    Matrix to_blocks(const Matrix& cols) const;
    Matrix from_blocks(const Matrix& blocks, Eigen::Index ncols) const;
    const Eigen::PartialPivLU<Matrix>& factor(cplx shift) const;

    Eigen::Index dimA_;
    Eigen::Index dimB_;
    Operator H_A_;
    Superoperator L_B_;
    Superoperator block_;  // L_B − deflation vec(sigma) vec(I)^T
    Eigen::VectorXd energies_;
    Matrix basis_;
    Matrix rotation_;  // basis ⊗ I_B
    mutable std::vector<std::pair<cplx, std::shared_ptr<Eigen::PartialPivLU<Matrix>>>> factors_;
};

RectangularMap solve_sylvester_direct(const BipartiteGenerator& A, const Matrix& B, const Matrix& C);

/// The semigroup t -> e^{tA}, applied to blocks of column vectors.
class LinearFlow {
public:
    using Applier = std::function<Matrix(const Matrix&)>;

    virtual ~LinearFlow() = default;
    virtual Eigen::Index dim() const = 0;
    /// Returns a callable applying e^{tA}; it may be invoked many times.
    virtual Applier propagator(double t) const = 0;
    /// Slowest decay rate among directions with strictly negative real part.
    /// Throws DivergenceError when there is none or when a direction grows.
    virtual double decay_rate() const = 0;
    /// Largest oscillation frequency present in the flow.
    virtual double max_frequency() const = 0;
};

/// Flow of an arbitrary dense generator.
class DenseFlow final : public LinearFlow {
public:
    explicit DenseFlow(const Matrix& A);

    Eigen::Index dim() const override { return prop_->generator().rows(); }
    Applier propagator(double t) const override;
    double decay_rate() const override;
    double max_frequency() const override;

private:
    std::shared_ptr<const ExpPropagator> prop_;
};

/// Flow of -i (H_A ⊗ I_B)^× + I_A ⊗ L_B on operators over H_A ⊗ H_B.
/// Propagation conjugates by e^{-itH_A} and applies e^{tL_B} block by block.
class BipartiteFreeFlow final : public LinearFlow {
public:
    BipartiteFreeFlow(const Operator& H_A, const Superoperator& L_B);
    BipartiteFreeFlow(const Operator& H_A, std::shared_ptr<const ExpPropagator> bath);

    Eigen::Index dim() const override;
    Applier propagator(double t) const override;
    double decay_rate() const override;
    double max_frequency() const override;

private:
    Eigen::Index dimA_;
    Eigen::Index dimB_;
    Eigen::VectorXd energies_;
    Matrix basis_;
    std::shared_ptr<const ExpPropagator> bath_;
};

/// Decay rate of a generator from its spectrum: the smallest |Re λ| among
/// eigenvalues with Re λ < -tiny. Throws DivergenceError if an eigenvalue has
/// Re λ > tiny or no eigenvalue decays.
double decay_rate_from_spectrum(const Vector& eigenvalues, double scale);

RectangularMap solve_sylvester_quadrature(const Matrix& A, const Matrix& B, const Matrix& C,
                                          const QuadratureConfig& q = {});

RectangularMap solve_sylvester_quadrature(const LinearFlow& A, const Matrix& B, const Matrix& C,
                                          const QuadratureConfig& q = {});

} // namespace adiael
