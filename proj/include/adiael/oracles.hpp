// oracles.hpp — Closed-form reduced models for a qubit coupled to a damped
// harmonic oscillator, and the matching bipartite model presets.
//
// Pauli coordinates: rho = (I + x sigma_x + y sigma_y + z sigma_z) / 2 with
// x_i = Tr(sigma_i rho), ordered (x, y, z).

#pragma once

#include <array>
#include <optional>

#include "adiael/lindblad.hpp"

namespace adiael {

/// Rotating-frame exchange coupling (Jaynes–Cummings).
struct JCParams {
    double kappa = 1.0;
    double kappa_phi = 0.0;
    double delta = 0.0;  // oscillator detuning
    double n_th = 0.0;
    double g = 0.0;

    void validate() const;
    /// kappa + kappa_phi + 2 i delta
    cplx gamma() const;
};

/// Lab-frame dipolar coupling sigma_x ⊗ (b + b^†).
struct LabFrameParams {
    double kappa = 1.0;
    double kappa_phi = 0.0;
    double omega_B = 0.0;
    double omega_eg = 0.0;
    double n_th = 0.0;
    double g = 0.0;

    void validate() const;
    /// kappa + kappa_phi + 2 i (omega_B ± omega_eg)
    cplx gamma_plus() const;
    cplx gamma_minus() const;
};

/// Second-order reduced generator of the exchange model. With A_lower set,
/// sigma_minus is replaced by A and the sigma_z/2 Hamiltonian by
/// n_th A A^† - (1 + n_th) A^† A.
Superoperator jc_reduced(const JCParams& p, const std::optional<Operator>& A_lower = std::nullopt);

struct JCCoefficients {
    double shift;      // coefficient of -i[sigma_z/2, .]
    double decay;      // rate of D[sigma_minus]
    double excitation; // rate of D[sigma_plus]
};

JCCoefficients jc_coefficients(const JCParams& p);

struct LabFrameReduced {
    Superoperator generator;  // includes the bare -i[-omega_eg sigma_z/2, .] term
    Eigen::Matrix2cd X;       // indexed (+, -) x (+, -)
    double Y = 0.0;
};

LabFrameReduced labframe_reduced(const LabFrameParams& p);

/// Bare qubit frame term -i[-omega_eg sigma_z / 2, .].
Superoperator labframe_frame_term(double omega_eg);

struct BlochForm {
    Eigen::Matrix3d drift;
    Eigen::Vector3d affine;
    double z_bar = 0.0;
    double r_z = 0.0;
};

/// Affine Bloch equations d/dt (x, y, z) = drift (x, y, z) + affine.
BlochForm bloch_form(const LabFrameParams& p);

/// Pauli-coordinate image of a qubit generator (must preserve trace).
BlochForm bloch_from_generator(const Superoperator& L);

/// Keep only the components of a qubit-space superoperator that commute with
/// rotation under H (time average in the frame of H).
Superoperator secular_part(const Superoperator& S, const Operator& H);

// ---- bipartite model presets ------------------------------------------------

/// H_A = 0, H_I = sigma_+ ⊗ b + sigma_- ⊗ b^†, bath detuned by delta.
BipartiteModel jc_model(const JCParams& p, int fock_cutoff);

/// H_A = -omega_eg sigma_z / 2, H_I = sigma_x ⊗ (b + b^†).
BipartiteModel labframe_model(const LabFrameParams& p, int fock_cutoff);

} // namespace adiael
