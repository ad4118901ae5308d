// test_operator_core.cpp — tensor, partial trace, vectorization, expm

#include <doctest.h>

#include <algorithm>
#include <limits>
#include <vector>

#include "adiael/lindblad.hpp"
#include "adiael/operator_core.hpp"
#include "support.hpp"

using namespace adiael;
using testing_support::Gen;
using testing_support::rel;

namespace {

// Kronecker product written out entry by entry, independent of tensor().
Matrix kron_oracle(const Matrix& A, const Matrix& B)
{
    Matrix K(A.rows() * B.rows(), A.cols() * B.cols());
    for (Eigen::Index a = 0; a < A.rows(); ++a)
        for (Eigen::Index b = 0; b < B.rows(); ++b)
            for (Eigen::Index c = 0; c < A.cols(); ++c)
                for (Eigen::Index d = 0; d < B.cols(); ++d)
                    K(a * B.rows() + b, c * B.cols() + d) = A(a, c) * B(b, d);
    return K;
}

// Truncated Taylor series, good for small-norm matrices only.
Matrix taylor_expm(const Matrix& M)
{
    Matrix term = Matrix::Identity(M.rows(), M.cols());
    Matrix sum = term;
    for (int k = 1; k < 60; ++k) {
        term = term * M / double(k);
        sum += term;
    }
    return sum;
}

} // namespace

TEST_CASE("tensor")
{
    CHECK(tensor(identity(2), identity(3)).isApprox(identity(6)));

    Matrix sz = Matrix::Zero(2, 2);
    sz(0, 0) = 1.0;
    sz(1, 1) = -1.0;
    Matrix expect = Matrix::Zero(4, 4);
    expect.diagonal() << 1.0, 1.0, -1.0, -1.0;
    CHECK((tensor(sz, identity(2)) - expect).norm() == 0.0);

    Gen gen;
    const Matrix A = gen.square(2), B = gen.square(3);
    CHECK(rel(tensor(A, identity(3)) * tensor(identity(2), B), tensor(A, B)) < 1e-14);
    CHECK(rel(tensor(A, B), kron_oracle(A, B)) == 0.0);

    const Matrix R = gen.matrix(2, 3), S = gen.matrix(4, 2);
    CHECK(tensor(R, S).rows() == 8);
    CHECK(tensor(R, S).cols() == 6);
    CHECK(rel(tensor(R, S), kron_oracle(R, S)) == 0.0);
}

TEST_CASE("partial traces")
{
    Gen gen;
    const Matrix rho_s = gen.density(3), rho_b = gen.density(4);
    CHECK(rel(partial_trace_B(tensor(rho_s, rho_b), 3, 4), rho_s) < 1e-14);
    CHECK(rel(partial_trace_A(tensor(rho_s, rho_b), 3, 4), rho_b) < 1e-14);

    // maximally entangled (|00> + |11>)/sqrt2
    Vector psi = Vector::Zero(4);
    psi(0) = psi(3) = 1.0 / std::sqrt(2.0);
    const Matrix P = psi * psi.adjoint();
    CHECK(rel(partial_trace_B(P, 2, 2), identity(2) / 2.0) < 1e-15);

    Matrix sx = Matrix::Zero(2, 2);
    sx(0, 1) = sx(1, 0) = 1.0;
    CHECK(partial_trace_B(tensor(sx, sx), 2, 2).norm() == 0.0);

    CHECK_THROWS_AS(partial_trace_B(gen.square(5), 2, 3), std::invalid_argument);

    // matrix form agrees with the direct contraction
    const Matrix X = gen.square(6);
    CHECK(rel(apply_map(partial_trace_B_map(2, 3), X), partial_trace_B(X, 2, 3)) < 1e-14);
    CHECK(rel(apply_map(append_state_map(rho_b, 3), rho_s), tensor(rho_s, rho_b)) < 1e-14);
}

TEST_CASE("vectorization")
{
    const Vector v = vectorize(identity(2));
    CHECK(v.size() == 4);
    CHECK(v(0) == cplx(1.0));
    CHECK(v(1) == cplx(0.0));
    CHECK(v(2) == cplx(0.0));
    CHECK(v(3) == cplx(1.0));

    Gen gen;
    const Matrix X = gen.square(3);
    CHECK((unvectorize(vectorize(X)) - X).norm() == 0.0);
    CHECK((unvectorize(vectorize(X), 3) - X).norm() == 0.0);

    for (int trial = 0; trial < 5; ++trial) {
        const Matrix A = gen.square(2), Y = gen.square(2), B = gen.square(2);
        const Vector lhs = vectorize(A * Y * B);
        const Vector rhs = kron_oracle(B.transpose(), A) * vectorize(Y);
        CHECK((lhs - rhs).norm() <= 1e-14 * lhs.norm());
        CHECK(rel(apply_map(sandwich(A, B), Y), A * Y * B) < 1e-14);
    }

    CHECK_THROWS_AS(unvectorize(Vector::Ones(5)), std::invalid_argument);
    CHECK_THROWS_AS(unvectorize(Vector::Ones(4), 3), std::invalid_argument);
}

TEST_CASE("superoperator builders")
{
    Gen gen;
    const Matrix H = gen.hermitian(3), L = gen.square(3), X = gen.square(3);
    CHECK(rel(apply_map(commutator(H), X), H * X - X * H) < 1e-14);
    CHECK(rel(apply_map(left_mult(L), X), L * X) < 1e-14);
    CHECK(rel(apply_map(right_mult(L), X), X * L) < 1e-14);
    const Matrix LdL = L.adjoint() * L;
    const Matrix D = L * X * L.adjoint() - 0.5 * (LdL * X + X * LdL);
    CHECK(rel(apply_map(dissipator(L), X), D) < 1e-14);

    const Matrix SB = commutator(gen.hermitian(2));
    const Matrix SA = commutator(gen.hermitian(3));
    const Matrix Y = gen.square(6);
    // lifted maps act factorwise on product operators
    const Matrix P = gen.square(3), Q = gen.square(2);
    CHECK(rel(apply_map(lift_B(SB, 3, 2), tensor(P, Q)), tensor(P, apply_map(SB, Q))) < 1e-13);
    CHECK(rel(apply_map(lift_A(SA, 3, 2), tensor(P, Q)), tensor(apply_map(SA, P), Q)) < 1e-13);
    CHECK(apply_map(lift_A(SA, 3, 2), Y).rows() == 6);
}

TEST_CASE("expm")
{
    CHECK(rel(expm(Matrix::Zero(3, 3), 2.5), identity(3)) == 0.0);

    Matrix N = Matrix::Zero(2, 2);
    N(0, 1) = 1.0;
    Matrix expect = identity(2);
    expect(0, 1) = 1.0;
    CHECK(rel(expm(N, 1.0), expect) < 1e-14);

    Gen gen;
    SUBCASE("conjugation identity")
    {
        const Matrix H = gen.hermitian(3), X = gen.square(3);
        const double theta = 0.7;
        const Matrix U = expm(-I_unit * H, theta);
        const Matrix lhs = apply_map(expm(-I_unit * commutator(H), theta), X);
        CHECK(rel(lhs, U * X * U.adjoint()) < 1e-12);
    }
    SUBCASE("eigen and Pade paths agree on normal matrices")
    {
        for (int trial = 0; trial < 10; ++trial) {
            const Matrix M = gen.normal_matrix(5);
            CHECK(rel(expm(M, 1.3), expm_pade(1.3 * M)) < 1e-10);
        }
    }
    SUBCASE("Pade agrees with Taylor for small norm")
    {
        const Matrix M = 0.2 * gen.square(4);
        CHECK(rel(expm_pade(M), taylor_expm(M)) < 1e-13);
    }
    SUBCASE("group property")
    {
        const Matrix M = gen.stable(6);
        CHECK(rel(expm(M, 0.4) * expm(M, 0.9), expm(M, 1.3)) < 1e-10);
    }
    SUBCASE("defective input takes the Pade path")
    {
        Matrix J = Matrix::Zero(3, 3);
        J.diagonal().setConstant(-1.0);
        J(0, 1) = J(1, 2) = 1.0;
        const ExpPropagator P(J);
        CHECK_FALSE(P.diagonalized());
        // e^{tJ} = e^{-t}(I + tN + t^2 N^2 / 2)
        const double t = 2.0;
        Matrix Nn = J + identity(3);
        const Matrix exact = std::exp(-t) * (identity(3) + t * Nn + t * t * Nn * Nn / 2.0);
        CHECK(rel(P.at(t), exact) < 1e-12);
        CHECK(rel(expm(J, t), exact) < 1e-12);
    }
    SUBCASE("non-finite input")
    {
        Matrix M = identity(2);
        M(0, 1) = std::numeric_limits<double>::quiet_NaN();
        CHECK_THROWS_AS(expm(M, 1.0), std::invalid_argument);
        M(0, 1) = std::numeric_limits<double>::infinity();
        CHECK_THROWS_AS(ExpPropagator{M}, std::invalid_argument);
    }
}

TEST_CASE("ExpPropagator actions")
{
    Gen gen;
    const Matrix M = gen.stable(7);
    const ExpPropagator P(M);
    const Matrix v = gen.matrix(7, 3);
    for (double t : {0.0, 0.5, 3.0}) {
        CHECK(rel(P.apply(t, v), expm_pade(t * M) * v) < 1e-11);
    }
    const std::optional<Matrix> y = P.expansion(v);
    REQUIRE(y.has_value());
    CHECK(rel(P.from_expansion(1.7, *y), expm_pade(1.7 * M) * v) < 1e-11);

    const ExpPropagator Pa = P.adjoint();
    CHECK(rel(Pa.generator(), M.adjoint()) == 0.0);
    CHECK(rel(Pa.at(0.8), expm_pade(0.8 * M.adjoint())) < 1e-11);
    CHECK(rel(Pa.apply(0.8, v), expm_pade(0.8 * M.adjoint()) * v) < 1e-11);

    // damped oscillator Liouvillian: ill-conditioned eigenvectors, benign actions
    const LindbladSpec spec = damped_oscillator(0.4, 1.0, 0.3, 0.5, 12);
    const Matrix L = lindbladian(spec);
    const ExpPropagator PL(L);
    const Vector rho = vectorize(gen.density(12));
    CHECK(rel(PL.apply(2.0, rho), expm_pade(2.0 * L) * rho) < 1e-9);
}

TEST_CASE("decoupled blocks")
{
    // two stable blocks interleaved by a permutation of the indices
    Gen gen;
    const Matrix S1 = gen.stable(3), S2 = gen.stable(4);
    const std::vector<Eigen::Index> p1{0, 2, 5}, p2{1, 3, 4, 6};
    Matrix M = Matrix::Zero(7, 7);
    M(p1, p1) = S1;
    M(p2, p2) = S2;

    Eigen::ComplexEigenSolver<Matrix> es(M, false);
    Vector mine = eigenvalues(M), ref = es.eigenvalues();
    auto by_value = [](const cplx& a, const cplx& b) {
        return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
    };
    std::sort(mine.begin(), mine.end(), by_value);
    std::sort(ref.begin(), ref.end(), by_value);
    CHECK((mine - ref).norm() < 1e-12);

    const ExpPropagator P(M);
    const Matrix v = gen.matrix(7, 2);
    CHECK(rel(P.apply(1.1, v), expm_pade(1.1 * M) * v) < 1e-11);
    CHECK(rel(P.at(0.6), expm_pade(0.6 * M)) < 1e-11);
    CHECK(rel(P.adjoint().apply(1.1, v), expm_pade(1.1 * M.adjoint()) * v) < 1e-11);
    // nothing leaks between the blocks
    const Matrix E = P.at(2.0);
    CHECK(E(p1, p2).norm() == 0.0);
}

TEST_CASE("norms and predicates")
{
    Gen gen;
    const Matrix H = gen.hermitian(4);
    CHECK(is_hermitian(H));
    CHECK(hermiticity_defect(H) < 1e-15);
    CHECK_FALSE(is_hermitian(H + I_unit * identity(4)));
    const Matrix rho = gen.density(4);
    CHECK(trace_norm(rho) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(trace_norm(-2.0 * rho) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(frobenius(identity(4)) == doctest::Approx(2.0));
    CHECK(all_finite(H));
}
