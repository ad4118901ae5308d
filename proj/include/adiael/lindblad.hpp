// lindblad.hpp — Lindblad generators, steady states and bipartite models

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "adiael/operator_core.hpp"

namespace adiael {

struct Channel {
    double rate = 0.0;  // inverse-time units
    Operator jump;
};

/// rho -> -i[H, rho] + Σ rate (L rho L^† - ½{L^†L, rho})
struct LindbladSpec {
    Operator H;
    std::vector<Channel> channels;

    Eigen::Index dim() const { return H.rows(); }
    /// Throws std::invalid_argument on a non-Hermitian H, negative rate or
    /// mismatched jump dimension.
    void validate() const;
};

class DegenerateSteadyStateError : public std::runtime_error {
public:
    DegenerateSteadyStateError(const std::string& what, int kernel_dim)
        : std::runtime_error(what), kernel_dimension(kernel_dim)
    {
    }
    int kernel_dimension;
};

Superoperator lindbladian(const LindbladSpec& spec);

/// Heisenberg-picture generator, dual to lindbladian() under Tr(X L(rho)).
Superoperator adjoint_lindbladian(const LindbladSpec& spec);

/// Unique trace-one fixed point of L, from the null right-singular vector.
Operator steady_state(const Superoperator& L);

struct ThermalState {
    Operator rho;
    double discarded_tail = 0.0;  // weight of levels >= N in the untruncated distribution
};

/// Geometric occupation n_th^n / (n_th+1)^{n+1} on levels 0..N-1, renormalized.
ThermalState thermal_state(double n_th, int N);

/// Population of the top `levels` Fock levels of a density operator.
double fock_tail_mass(const Operator& rho, int levels = 2);

/// Adequacy threshold for the Fock cutoff.
inline constexpr double kFockTailLimit = 1e-8;

struct BosonOps {
    Operator b;
    Operator b_dag;
    Operator number;
};

/// Truncated ladder operators, b|n> = sqrt(n)|n-1>.
BosonOps boson_ops(int N);

/// Qubit operators in the ordered basis (|g>, |e>).
/// sigma_z = |g><g| - |e><e| (ground-state positive), sigma_minus = |g><e|,
/// sigma_y chosen so that sigma_x sigma_y = i sigma_z.
struct QubitOps {
    Operator sigma_minus;
    Operator sigma_plus;
    Operator sigma_x;
    Operator sigma_y;
    Operator sigma_z;
};

QubitOps qubit_ops();

/// -i omega [b^†b, .] + kappa(1+n_th) D[b] + kappa n_th D[b^†] + kappa_phi D[b^†b]
LindbladSpec damped_oscillator(double omega, double kappa, double kappa_phi, double n_th, int N);

struct Coupling {
    Operator A;  // acts on H_A
    Operator B;  // acts on H_B
};

/// L = -i(H_A ⊗ I)^× + I ⊗ L_B - i g [Σ_k A_k ⊗ B_k, .]
struct BipartiteModel {
    Operator H_A;
    LindbladSpec bath;
    std::vector<Coupling> couplings;
    double g = 0.0;
    /// Fock cutoff when the bath is a truncated oscillator; 0 otherwise.
    int fock_cutoff = 0;

    Eigen::Index dimA() const { return H_A.rows(); }
    Eigen::Index dimB() const { return bath.dim(); }
    Eigen::Index dim() const { return dimA() * dimB(); }

    void validate() const;

    /// Σ_k A_k ⊗ B_k
    Operator interaction() const;
    /// Largest bath channel rate.
    double reference_rate() const;
    /// Diagnostic timescale ratio g / reference_rate().
    double epsilon() const;
    Superoperator full_lindbladian() const;
};

} // namespace adiael
