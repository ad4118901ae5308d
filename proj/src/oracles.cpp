// oracles.cpp — Closed-form second-order generators and Bloch equations

#include "adiael/oracles.hpp"

#include <cmath>

namespace adiael {

namespace {

void require_rates(double kappa, double kappa_phi, double n_th, double g)
{
    if (!(kappa > 0.0) || !std::isfinite(kappa)) {
        throw std::invalid_argument("oracle: kappa must be positive");
    }
    if (!(kappa_phi >= 0.0)) throw std::invalid_argument("oracle: kappa_phi must be >= 0");
    if (!(n_th >= 0.0)) throw std::invalid_argument("oracle: n_th must be >= 0");
    if (!(g >= 0.0)) throw std::invalid_argument("oracle: g must be >= 0");
}

} // namespace

void JCParams::validate() const
{
    require_rates(kappa, kappa_phi, n_th, g);
    if (!std::isfinite(delta)) throw std::invalid_argument("oracle: delta must be finite");
}

cplx JCParams::gamma() const
{
    return {kappa + kappa_phi, 2.0 * delta};
}

void LabFrameParams::validate() const
{
    require_rates(kappa, kappa_phi, n_th, g);
    if (!std::isfinite(omega_B) || !std::isfinite(omega_eg)) {
        throw std::invalid_argument("oracle: frequencies must be finite");
    }
}

cplx LabFrameParams::gamma_plus() const
{
    return {kappa + kappa_phi, 2.0 * (omega_B + omega_eg)};
}

cplx LabFrameParams::gamma_minus() const
{
    return {kappa + kappa_phi, 2.0 * (omega_B - omega_eg)};
}

JCCoefficients jc_coefficients(const JCParams& p)
{
    p.validate();
    const double scale = 4.0 * p.g * p.g / std::norm(p.gamma());
    const double width = p.kappa + p.kappa_phi;
    return JCCoefficients{(1.0 + 2.0 * p.n_th) * p.delta * scale,
                          (1.0 + p.n_th) * width * scale,
                          p.n_th * width * scale};
}

Superoperator jc_reduced(const JCParams& p, const std::optional<Operator>& A_lower)
{
    p.validate();
    const double scale = 4.0 * p.g * p.g / std::norm(p.gamma());
    const double width = p.kappa + p.kappa_phi;
    const Operator A = A_lower ? *A_lower : qubit_ops().sigma_minus;
    if (A.rows() != A.cols()) throw std::invalid_argument("jc_reduced: A must be square");
    const Operator Ad = A.adjoint();
    const Operator H = p.delta * scale * (p.n_th * A * Ad - (1.0 + p.n_th) * Ad * A);
    return -I_unit * commutator(H) + (1.0 + p.n_th) * width * scale * dissipator(A) +
           p.n_th * width * scale * dissipator(Ad);
}

Superoperator labframe_frame_term(double omega_eg)
{
    return -I_unit * commutator(Operator(-0.5 * omega_eg * qubit_ops().sigma_z));
}

LabFrameReduced labframe_reduced(const LabFrameParams& p)
{
    p.validate();
    const QubitOps q = qubit_ops();
    const cplx gp = p.gamma_plus(), gm = p.gamma_minus();
    // index 0 -> '+', 1 -> '-'
    const std::array<cplx, 2> r{2.0 * (1.0 + p.n_th) / gp, 2.0 * (1.0 + p.n_th) / gm};
    const std::array<cplx, 2> e{2.0 * p.n_th / std::conj(gm), 2.0 * p.n_th / std::conj(gp)};
    const std::array<Operator, 2> sigma{q.sigma_plus, q.sigma_minus};

    LabFrameReduced out;
    for (int l = 0; l < 2; ++l) {
        for (int lp = 0; lp < 2; ++lp) {
            out.X(l, lp) = r[lp] + std::conj(r[l]) + e[lp] + std::conj(e[l]);
        }
    }
    out.Y = (r[0] + e[0]).imag() - (r[1] + e[1]).imag();

    const double g2 = p.g * p.g;
    Superoperator L = labframe_frame_term(p.omega_eg);
    L += (-I_unit * g2 * out.Y) * commutator(Operator(0.5 * q.sigma_z));
    for (int l = 0; l < 2; ++l) {
        for (int lp = 0; lp < 2; ++lp) {
            const Operator& jump = sigma[lp];
            const Operator partner = sigma[l].adjoint();
            const Operator prod = partner * jump;
            L += g2 * out.X(l, lp) *
                 (sandwich(jump, partner) - 0.5 * (left_mult(prod) + right_mult(prod)));
        }
    }
    out.generator = std::move(L);
    return out;
}

BlochForm bloch_form(const LabFrameParams& p)
{
    p.validate();
    const LabFrameReduced red = labframe_reduced(p);
    const double g2 = p.g * p.g;
    const double n = p.n_th;
    const double gp2 = std::norm(p.gamma_plus());
    const double gm2 = std::norm(p.gamma_minus());

    BlochForm b;
    b.r_z = 4.0 * (p.kappa + p.kappa_phi) * (1.0 / gp2 + 1.0 / gm2);
    b.z_bar = (gp2 - gm2) / ((gp2 + gm2) * (1.0 + 2.0 * n));
    const double relax = g2 * (1.0 + 2.0 * n) * b.r_z;

    b.drift.setZero();
    // x is untouched by the sigma_x coupling; the Lamb shift only enters d/dt y.
    b.drift(0, 1) = p.omega_eg;
    b.drift(1, 0) = -p.omega_eg + 2.0 * g2 * red.Y;
    b.drift(1, 1) = -relax;
    b.drift(2, 2) = -relax;
    b.affine = Eigen::Vector3d(0.0, 0.0, relax * b.z_bar);
    return b;
}

BlochForm bloch_from_generator(const Superoperator& L)
{
    if (L.rows() != 4 || L.cols() != 4) {
        throw std::invalid_argument("bloch_from_generator: expected a qubit superoperator");
    }
    const QubitOps q = qubit_ops();
    const std::array<Operator, 3> pauli{q.sigma_x, q.sigma_y, q.sigma_z};
    BlochForm b;
    const Operator id_image = apply_map(L, identity(2));
    for (int i = 0; i < 3; ++i) {
        b.affine(i) = 0.5 * (pauli[i] * id_image).trace().real();
        for (int j = 0; j < 3; ++j) {
            b.drift(i, j) = 0.5 * (pauli[i] * apply_map(L, pauli[j])).trace().real();
        }
    }
    b.r_z = -b.drift(2, 2);
    b.z_bar = b.r_z != 0.0 ? b.affine(2) / b.r_z : 0.0;
    return b;
}

Superoperator secular_part(const Superoperator& S, const Operator& H)
{
    const Eigen::Index d = H.rows();
    if (S.rows() != d * d || S.cols() != d * d) {
        throw std::invalid_argument("secular_part: dimension mismatch");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(H);
    const Matrix& V = es.eigenvectors();
    const Eigen::VectorXd& w = es.eigenvalues();
    // vec(V^† X V) = (V^T ⊗ V^†) vec(X)
    const Matrix W = tensor(V.transpose(), V.adjoint());
    Matrix Se = W * S * W.adjoint();
    const double tol = 1e-9 * std::max(1.0, w.cwiseAbs().maxCoeff());
    for (Eigen::Index col = 0; col < d * d; ++col) {
        const double fc = w(col % d) - w(col / d);
        for (Eigen::Index row = 0; row < d * d; ++row) {
            const double fr = w(row % d) - w(row / d);
            if (std::abs(fr - fc) > tol) Se(row, col) = 0.0;
        }
    }
    return W.adjoint() * Se * W;
}

BipartiteModel jc_model(const JCParams& p, int fock_cutoff)
{
    p.validate();
    const QubitOps q = qubit_ops();
    const BosonOps b = boson_ops(fock_cutoff);
    BipartiteModel m;
    m.H_A = Operator::Zero(2, 2);
    m.bath = damped_oscillator(p.delta, p.kappa, p.kappa_phi, p.n_th, fock_cutoff);
    m.couplings = {{q.sigma_plus, b.b}, {q.sigma_minus, b.b_dag}};
    m.g = p.g;
    m.fock_cutoff = fock_cutoff;
    return m;
}

BipartiteModel labframe_model(const LabFrameParams& p, int fock_cutoff)
{
    p.validate();
    const QubitOps q = qubit_ops();
    const BosonOps b = boson_ops(fock_cutoff);
    BipartiteModel m;
    m.H_A = -0.5 * p.omega_eg * q.sigma_z;
    m.bath = damped_oscillator(p.omega_B, p.kappa, p.kappa_phi, p.n_th, fock_cutoff);
    m.couplings = {{q.sigma_x, Operator(b.b + b.b_dag)}};
    m.g = p.g;
    m.fock_cutoff = fock_cutoff;
    return m;
}

} // namespace adiael
