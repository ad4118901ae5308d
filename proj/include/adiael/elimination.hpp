// elimination.hpp — Order-by-order adiabatic elimination with fast unitary
// dynamics on the retained subsystem.
//
// All generators and correction maps are stored with their powers of the
// timescale ratio already absorbed (the physical g and rates appear
// explicitly), so the reduced dynamics is simply Σ_j generator_j.
//
// Coordinates follow the partial trace gauge: rho_s = Tr_B(K(rho_s)), so every
// correction beyond order zero has vanishing partial trace.

#pragma once

#include <memory>
#include <string>
#include <vector>

#include "adiael/lindblad.hpp"
#include "adiael/quadrature.hpp"
#include "adiael/sylvester.hpp"

namespace adiael {

enum class SylvesterMethod { direct, quadrature };
enum class Ls2Method { adjoint_quadrature, from_k1 };

std::string to_string(SylvesterMethod m);
std::string to_string(Ls2Method m);
SylvesterMethod parse_sylvester_method(const std::string& s);

/// Highest supported expansion order.
inline constexpr int kMaxOrder = 6;

struct ReducedOrder {
    Superoperator generator;    // on H_A, d_A^2 x d_A^2
    RectangularMap correction;  // H_A -> H_A ⊗ H_B, (d_A d_B)^2 x d_A^2
    SylvesterMethod method = SylvesterMethod::direct;
    double invariance_residual = 0.0;  // relative to the largest term at this order
    double gauge_residual = 0.0;       // ‖Tr_B ∘ correction‖_F
};

struct ReducedModel {
    BipartiteModel model;
    Operator bath_state;
    std::vector<ReducedOrder> orders;
    std::vector<std::string> warnings;

    int max_order() const { return static_cast<int>(orders.size()) - 1; }
    /// Σ_{j <= upto} generator_j (all orders when upto < 0).
    Superoperator generator(int upto = -1) const;
    /// Σ_{j <= upto} correction_j (all orders when upto < 0).
    RectangularMap correction(int upto = -1) const;
};

/// B_k - Tr(B_k rho_B) I
Operator centered_coupling(const Operator& B, const Operator& rho_B);

/// e^{-itH_A} A e^{itH_A}, evaluated in the eigenbasis of H_A.
Operator a_minus(const Operator& A, const Operator& H_A, double t);

/// e^{t L_B^*}(B)
Operator b_heisenberg(const Operator& B, const LindbladSpec& spec, double t);

struct Correlations {
    Matrix c;        // c(k, l) = Tr(B_l(t) B_{0,k} rho_B)
    Matrix c_tilde;  // c_tilde(k, l) = Tr(B_l(t) rho_B B_{0,k})
};

/// Holds the model and everything derived once from it (bath steady state,
/// free generator, gauge projector) so the per-order steps share them.
class Eliminator {
public:
    explicit Eliminator(BipartiteModel model);

    const BipartiteModel& model() const { return model_; }
    const Operator& bath_state() const { return rho_B_; }
    const std::vector<std::string>& warnings() const { return warnings_; }

    Superoperator generator0() const;
    RectangularMap correction0() const;
    Superoperator ls1() const;
    RectangularMap k1(SylvesterMethod method, const QuadratureConfig& q = {}) const;
    Correlations correlations(double t) const;
    Superoperator ls2(Ls2Method method, const QuadratureConfig& q = {},
                      SylvesterMethod k1_method = SylvesterMethod::direct) const;
    ReducedModel reduce(int max_order, SylvesterMethod method,
                        const QuadratureConfig& q = {}) const;

    /// eps^n L_{s,n} from eps^{n-1} K_{n-1}.
    Superoperator generator_from(const RectangularMap& previous_correction) const;

    /// Solve the order-n correction equation for a known right-hand side.
    /// `known` is the sum of all terms not involving K_n; its partial trace is
    /// projected out before solving.
    RectangularMap solve_correction(const RectangularMap& known, SylvesterMethod method,
                                    const QuadratureConfig& q) const;

    /// Relative residual of the order-j invariance condition given orders 0..j.
    double invariance_residual(const std::vector<ReducedOrder>& orders, int j) const;

    /// ‖Tr_B ∘ K‖_F
    double gauge_residual(const RectangularMap& K) const;

    /// -i(H_A ⊗ I)^× + I ⊗ L_B applied to the columns of a map into the joint space.
    Matrix apply_free(const Matrix& cols) const;
    /// -i g [H_I, .] applied column by column.
    Matrix apply_coupling(const Matrix& cols) const;
    /// Dense joint-space forms of the two generators above (for small models).
    Superoperator free_generator() const;
    Superoperator coupling_generator() const;

    const Superoperator& bath_generator() const { return L_B_; }
    double bath_gap() const { return bath_gap_; }

private:
    BipartiteModel model_;
    Superoperator L_B_;
    Operator rho_B_;
    Operator H_I_;
    std::shared_ptr<const ExpPropagator> bath_prop_;
    double bath_gap_ = 0.0;
    BipartiteGenerator free_;
    BipartiteGenerator deflated_;  // free part shifted by the bath gap on {X ⊗ rho_B}
    RectangularMap trace_B_;
    RectangularMap embed_;  // rho_s -> rho_s ⊗ rho_B
    std::vector<std::string> warnings_;
};

// Free-function forms of the individual steps.
Superoperator ls1(const BipartiteModel& model);
RectangularMap k1(const BipartiteModel& model, SylvesterMethod method,
                  const QuadratureConfig& q = {});
Superoperator ls2(const BipartiteModel& model, Ls2Method method, const QuadratureConfig& q = {});
Correlations correlation_coeffs(const BipartiteModel& model, double t);
ReducedModel reduce(const BipartiteModel& model, int max_order,
                    SylvesterMethod method = SylvesterMethod::direct,
                    const QuadratureConfig& q = {});

} // namespace adiael
