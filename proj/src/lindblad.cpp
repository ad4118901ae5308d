// lindblad.cpp — Lindbladian assembly, steady states and operator factories

#include "adiael/lindblad.hpp"

#include <cmath>
#include <sstream>

namespace adiael {

void LindbladSpec::validate() const
{
    if (H.rows() == 0 || H.rows() != H.cols()) {
        throw std::invalid_argument("lindblad spec: Hamiltonian must be a non-empty square matrix");
    }
    if (!H.allFinite() || !is_hermitian(H, 1e-12)) {
        throw std::invalid_argument("lindblad spec: Hamiltonian is not Hermitian");
    }
    for (std::size_t k = 0; k < channels.size(); ++k) {
        const Channel& c = channels[k];
        if (!(c.rate >= 0.0) || !std::isfinite(c.rate)) {
            throw std::invalid_argument("lindblad spec: channel " + std::to_string(k) +
                                        " has a negative or non-finite rate");
        }
        if (c.jump.rows() != H.rows() || c.jump.cols() != H.cols()) {
            throw std::invalid_argument("lindblad spec: channel " + std::to_string(k) +
                                        " jump operator dimension differs from H");
        }
    }
}

Superoperator lindbladian(const LindbladSpec& spec)
{
    spec.validate();
    Superoperator L = -I_unit * commutator(spec.H);
    for (const Channel& c : spec.channels) {
        if (c.rate != 0.0) L += c.rate * dissipator(c.jump);
    }
    return L;
}

Superoperator adjoint_lindbladian(const LindbladSpec& spec)
{
    spec.validate();
    Superoperator L = I_unit * commutator(spec.H);
    for (const Channel& c : spec.channels) {
        if (c.rate == 0.0) continue;
        const Operator& J = c.jump;
        const Operator JdJ = J.adjoint() * J;
        L += c.rate * (sandwich(J.adjoint(), J) - 0.5 * (left_mult(JdJ) + right_mult(JdJ)));
    }
    return L;
}

Operator steady_state(const Superoperator& L)
{
    if (L.rows() != L.cols()) {
        throw std::invalid_argument("steady_state: generator must be square");
    }
    Eigen::BDCSVD<Matrix> svd(L, Eigen::ComputeFullV);
    const Eigen::VectorXd& s = svd.singularValues();
    const double cutoff = 1e-10 * std::max(s(0), 1e-300);
    int kernel = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s(i) < cutoff) ++kernel;
    }
    if (kernel != 1) {
        std::ostringstream os;
        os << "steady_state: generator kernel has dimension " << kernel << " (expected 1)";
        throw DegenerateSteadyStateError(os.str(), kernel);
    }
    Operator rho = unvectorize(Vector(svd.matrixV().col(s.size() - 1)));
    const cplx tr = rho.trace();
    if (std::abs(tr) < 1e-300) {
        throw DegenerateSteadyStateError("steady_state: null vector is traceless", kernel);
    }
    rho /= tr;
    rho = 0.5 * (rho + rho.adjoint()).eval();
    rho /= rho.trace().real();
    return rho;
}

ThermalState thermal_state(double n_th, int N)
{
    if (N < 1) throw std::invalid_argument("thermal_state: cutoff must be >= 1");
    if (!(n_th >= 0.0)) throw std::invalid_argument("thermal_state: n_th must be >= 0");
    ThermalState out;
    out.rho = Operator::Zero(N, N);
    const double ratio = n_th / (n_th + 1.0);
    double weight = 1.0 / (n_th + 1.0);
    double kept = 0.0;
    for (int n = 0; n < N; ++n) {
        out.rho(n, n) = weight;
        kept += weight;
        weight *= ratio;
    }
    out.discarded_tail = std::pow(ratio, N);
    out.rho /= kept;
    return out;
}

double fock_tail_mass(const Operator& rho, int levels)
{
    const Eigen::Index n = rho.rows();
    double mass = 0.0;
    for (Eigen::Index i = std::max<Eigen::Index>(0, n - levels); i < n; ++i) {
        mass += rho(i, i).real();
    }
    return mass;
}

BosonOps boson_ops(int N)
{
    if (N < 2) throw std::invalid_argument("boson_ops: cutoff must be >= 2");
    BosonOps ops;
    ops.b = Operator::Zero(N, N);
    for (int n = 1; n < N; ++n) {
        ops.b(n - 1, n) = std::sqrt(static_cast<double>(n));
    }
    ops.b_dag = ops.b.adjoint();
    ops.number = ops.b_dag * ops.b;
    return ops;
}

QubitOps qubit_ops()
{
    QubitOps q;
    q.sigma_minus = Operator::Zero(2, 2);
    q.sigma_minus(0, 1) = 1.0;
    q.sigma_plus = q.sigma_minus.adjoint();
    q.sigma_x = q.sigma_minus + q.sigma_plus;
    q.sigma_y = Operator::Zero(2, 2);
    q.sigma_y(0, 1) = -I_unit;
    q.sigma_y(1, 0) = I_unit;
    q.sigma_z = Operator::Zero(2, 2);
    q.sigma_z(0, 0) = 1.0;
    q.sigma_z(1, 1) = -1.0;
    return q;
}

LindbladSpec damped_oscillator(double omega, double kappa, double kappa_phi, double n_th, int N)
{
    if (!(kappa >= 0.0) || !(kappa_phi >= 0.0) || !(n_th >= 0.0)) {
        throw std::invalid_argument("damped_oscillator: rates and n_th must be nonnegative");
    }
    const BosonOps ops = boson_ops(N);
    LindbladSpec spec;
    spec.H = omega * ops.number;
    spec.channels.push_back({kappa * (1.0 + n_th), ops.b});
    if (n_th > 0.0) spec.channels.push_back({kappa * n_th, ops.b_dag});
    if (kappa_phi > 0.0) spec.channels.push_back({kappa_phi, ops.number});
    return spec;
}

void BipartiteModel::validate() const
{
    if (H_A.rows() == 0 || H_A.rows() != H_A.cols()) {
        throw std::invalid_argument("model: H_A must be a non-empty square matrix");
    }
    if (!is_hermitian(H_A, 1e-12)) {
        throw std::invalid_argument("model: H_A is not Hermitian");
    }
    bath.validate();
    if (!(g >= 0.0) || !std::isfinite(g)) {
        throw std::invalid_argument("model: coupling g must be nonnegative and finite");
    }
    for (std::size_t k = 0; k < couplings.size(); ++k) {
        if (couplings[k].A.rows() != dimA() || couplings[k].A.cols() != dimA() ||
            couplings[k].B.rows() != dimB() || couplings[k].B.cols() != dimB()) {
            throw std::invalid_argument("model: coupling " + std::to_string(k) +
                                        " has inconsistent dimensions");
        }
    }
    if (!couplings.empty() && !is_hermitian(interaction(), 1e-12)) {
        throw std::invalid_argument("model: interaction Σ A_k ⊗ B_k is not Hermitian");
    }
}

Operator BipartiteModel::interaction() const
{
    Operator H = Operator::Zero(dim(), dim());
    for (const Coupling& c : couplings) {
        H += tensor(c.A, c.B);
    }
    return H;
}

double BipartiteModel::reference_rate() const
{
    double r = 0.0;
    for (const Channel& c : bath.channels) r = std::max(r, c.rate);
    return r;
}

double BipartiteModel::epsilon() const
{
    const double r = reference_rate();
    return r > 0.0 ? g / r : std::numeric_limits<double>::infinity();
}

Superoperator BipartiteModel::full_lindbladian() const
{
    const Eigen::Index dA = dimA(), dB = dimB();
    Superoperator L = lift_A(-I_unit * commutator(H_A), dA, dB);
    L += lift_B(lindbladian(bath), dA, dB);
    if (g != 0.0 && !couplings.empty()) {
        L += (-I_unit * g) * commutator(interaction());
    }
    return L;
}

} // namespace adiael
