// operator_core.hpp — Dense operator algebra on bipartite Hilbert spaces
//
// Conventions used throughout the library:
//   * Joint index ordering is A-major: (a, b) -> a * dimB + b.
//   * Vectorization is column stacking, so vec(A X B) = (B^T ⊗ A) vec(X).
//     Every superoperator matrix in the library is written in this convention.

#pragma once

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace adiael {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;

inline constexpr cplx I_unit{0.0, 1.0};

// Operators, superoperators (d^2 x d^2) and rectangular maps between operator
// spaces (d_out^2 x d_in^2) are all stored as dense complex matrices; the
// aliases name the role a matrix plays.
using Operator = Matrix;
using Superoperator = Matrix;
using RectangularMap = Matrix;

/// Raised when a linear system or Sylvester equation is numerically singular.
class SingularityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when an improper integral cannot be truncated (no decaying direction).
class DivergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---- basic constructions -------------------------------------------------

Matrix identity(Eigen::Index d);

/// Kronecker product with A-major ordering.
Matrix tensor(const Matrix& A, const Matrix& B);

/// Contract the B factor of an operator on H_A ⊗ H_B.
Operator partial_trace_B(const Operator& X, Eigen::Index dimA, Eigen::Index dimB);

/// Contract the A factor of an operator on H_A ⊗ H_B.
Operator partial_trace_A(const Operator& X, Eigen::Index dimA, Eigen::Index dimB);

Vector vectorize(const Operator& X);
Operator unvectorize(const Vector& v);
Operator unvectorize(const Vector& v, Eigen::Index dim);

/// Apply a superoperator (or rectangular map) to an operator.
Operator apply_map(const Matrix& S, const Operator& X);

// ---- superoperator builders ----------------------------------------------

/// X -> A X
Superoperator left_mult(const Operator& A);
/// X -> X B
Superoperator right_mult(const Operator& B);
/// X -> A X B
Superoperator sandwich(const Operator& A, const Operator& B);
/// X -> [H, X]
Superoperator commutator(const Operator& H);
/// X -> L X L^† - ½{L^†L, X}
Superoperator dissipator(const Operator& L);

/// Lift S acting on B-operators to I_A ⊗ S on the joint space.
Superoperator lift_B(const Superoperator& S, Eigen::Index dimA, Eigen::Index dimB);
/// Lift S acting on A-operators to S ⊗ I_B on the joint space.
Superoperator lift_A(const Superoperator& S, Eigen::Index dimA, Eigen::Index dimB);

/// Superoperator matrix of the partial trace, (dimA dimB)^2 -> dimA^2.
RectangularMap partial_trace_B_map(Eigen::Index dimA, Eigen::Index dimB);
/// Superoperator matrix of rho_s -> rho_s ⊗ sigma.
RectangularMap append_state_map(const Operator& sigma, Eigen::Index dimA);

// ---- norms and predicates ------------------------------------------------

double frobenius(const Matrix& M);
double trace_norm(const Matrix& M);
double hermiticity_defect(const Matrix& M);
bool is_hermitian(const Matrix& M, double tol = 1e-12);
bool all_finite(const Matrix& M);

// ---- spectra and the matrix exponential ----------------------------------

/// Eigenvalues of a square matrix; decoupled diagonal blocks (up to a
/// permutation) are handled separately.
Vector eigenvalues(const Matrix& M);

/// e^{tM}. Uses the eigendecomposition when the eigenvector matrix has
/// condition number below 1e8, scaling and squaring with a [13/13] Padé kernel
/// otherwise.
Matrix expm(const Matrix& M, double t);

/// Scaling-and-squaring path only.
Matrix expm_pade(const Matrix& M);

/// Reusable e^{tM} for many t. Decomposes once.
///
/// The eigenvector factors are kept even when their condition number exceeds
/// kEigenConditionLimit: the action e^{tM} v is still evaluated through them
/// when the expansion of v itself is benign (see expansion()).
class ExpPropagator {
public:
    explicit ExpPropagator(const Matrix& M);

    Matrix at(double t) const;
    /// e^{tM} v, through the eigenbasis when possible, Padé otherwise.
    Matrix apply(double t, const Matrix& v) const;
    /// Eigen-coordinates y with v = V y, or nullopt when the expansion
    /// cancels by more than kEigenConditionLimit (Σ_i |y_i| ‖V_i‖ / ‖v‖).
    std::optional<Matrix> expansion(const Matrix& v) const;
    /// V (e^{t λ} ∘ y)
    Matrix from_expansion(double t, const Matrix& y) const;
    /// Propagator of M^† sharing this decomposition.
    ExpPropagator adjoint() const;

    bool diagonalized() const { return diagonal_; }
    bool has_factors() const { return factors_; }
    double condition() const { return condition_; }
    const Vector& eigenvalues() const { return values_; }
    const Matrix& eigenvectors() const { return V_; }
    const Matrix& generator() const { return M_; }

    /// Diagonal block of V on a decoupled index set of M.
    struct Block {
        std::vector<Eigen::Index> index;
        Matrix V;
        Matrix Vinv;
    };

private:
    ExpPropagator() = default;

    // F y for block diagonal F, one factor per Block
    Matrix blockwise(const Matrix& y, bool inverse) const;

    Matrix M_;
    bool diagonal_ = false;
    bool factors_ = false;
    double condition_ = 0.0;
    Vector values_;
    Matrix V_;
    Matrix Vinv_;
    Eigen::VectorXd column_norms_;
    std::vector<Block> blocks_;
};

/// Condition number threshold above which expm falls back to Padé.
inline constexpr double kEigenConditionLimit = 1e8;

} // namespace adiael
