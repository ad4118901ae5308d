// support.hpp — Seeded random instances shared by the test binaries

#pragma once

#include <cmath>
#include <random>

#include "adiael/lindblad.hpp"

namespace testing_support {

using adiael::cplx;
using adiael::Matrix;

inline constexpr std::uint64_t kSeed = 20240611;

class Gen {
public:
    explicit Gen(std::uint64_t seed = kSeed) : rng_(seed) {}

    double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng_); }
    int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng_); }
    double normal() { return normal_(rng_); }
    std::mt19937_64& engine() { return rng_; }

    Matrix matrix(Eigen::Index r, Eigen::Index c)
    {
        Matrix M(r, c);
        for (Eigen::Index i = 0; i < r; ++i)
            for (Eigen::Index j = 0; j < c; ++j) M(i, j) = cplx(normal(), normal());
        return M;
    }
    Matrix square(Eigen::Index d) { return matrix(d, d); }

    Matrix hermitian(Eigen::Index d)
    {
        const Matrix G = square(d);
        return (G + G.adjoint()) / 2.0;
    }

    Matrix unitary(Eigen::Index d)
    {
        Eigen::HouseholderQR<Matrix> qr(square(d));
        return qr.householderQ() * Matrix::Identity(d, d);
    }

    /// Normal matrix with eigenvalues in the box [-2, 2] x [-2, 2].
    Matrix normal_matrix(Eigen::Index d)
    {
        const Matrix U = unitary(d);
        adiael::Vector lam(d);
        for (Eigen::Index i = 0; i < d; ++i) lam(i) = cplx(uniform(-2, 2), uniform(-2, 2));
        return U * lam.asDiagonal() * U.adjoint();
    }

    /// Random spectrum with Re < -0.2, similarity-transformed by a mild matrix.
    Matrix stable(Eigen::Index d)
    {
        Matrix S = Matrix::Identity(d, d) + 0.3 * square(d) / std::sqrt(double(d));
        adiael::Vector lam(d);
        for (Eigen::Index i = 0; i < d; ++i) lam(i) = cplx(uniform(-3.0, -0.2), uniform(-2, 2));
        return S * lam.asDiagonal() * S.inverse();
    }

    Matrix density(Eigen::Index d)
    {
        const Matrix G = square(d);
        const Matrix R = G * G.adjoint();
        return R / R.trace();
    }

    /// Random Lindblad spec with `channels` random jumps; rates in [0.2, 1.5].
    adiael::LindbladSpec spec(Eigen::Index d, int channels)
    {
        adiael::LindbladSpec s;
        s.H = hermitian(d);
        for (int k = 0; k < channels; ++k) s.channels.push_back({uniform(0.2, 1.5), square(d)});
        return s;
    }

    /// Small bipartite model: random H_A and couplings, damped oscillator bath.
    adiael::BipartiteModel model(Eigen::Index dimA, int N)
    {
        adiael::BipartiteModel m;
        m.H_A = hermitian(dimA);
        m.bath = adiael::damped_oscillator(uniform(-1, 1), uniform(0.5, 1.5), uniform(0.0, 0.5),
                                           uniform(0.0, 0.3), N);
        m.fock_cutoff = N;
        const adiael::BosonOps bo = adiael::boson_ops(N);
        const Matrix A = square(dimA);
        const cplx alpha(normal(), normal());
        // A ⊗ (b + alpha) + h.c. keeps H_I Hermitian with a non-centered bath factor.
        m.couplings.push_back({A, bo.b + alpha * Matrix::Identity(N, N)});
        m.couplings.push_back({A.adjoint(), bo.b_dag + std::conj(alpha) * Matrix::Identity(N, N)});
        if (integer(0, 1) == 1) {
            const Matrix Hz = hermitian(dimA);
            m.couplings.push_back({Hz, bo.number});
        }
        m.g = uniform(0.02, 0.08);
        return m;
    }

private:
    std::mt19937_64 rng_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

inline double rel(const Matrix& a, const Matrix& b)
{
    const double s = std::max(b.norm(), 1e-300);
    return (a - b).norm() / s;
}

} // namespace testing_support
