// test_sylvester.cpp — Gauss–Legendre panels and both Sylvester solvers

#include <doctest.h>

#include <cmath>

#include "adiael/lindblad.hpp"
#include "adiael/quadrature.hpp"
#include "adiael/sylvester.hpp"
#include "support.hpp"

using namespace adiael;
using testing_support::Gen;
using testing_support::rel;

namespace {

Matrix scalar(cplx z)
{
    Matrix m(1, 1);
    m(0, 0) = z;
    return m;
}

// Plain Kronecker-flattened solve, (I ⊗ A + B^T ⊗ I) vec X = vec C.
Matrix flattened_oracle(const Matrix& A, const Matrix& B, const Matrix& C)
{
    const Eigen::Index m = A.rows(), n = B.rows();
    Matrix K = Matrix::Zero(m * n, m * n);
    for (Eigen::Index j = 0; j < n; ++j) {
        K.block(j * m, j * m, m, m) += A;
        for (Eigen::Index l = 0; l < n; ++l) K.block(j * m, l * m, m, m) += B(l, j) * Matrix::Identity(m, m);
    }
    Vector c(m * n);
    for (Eigen::Index j = 0; j < n; ++j) c.segment(j * m, m) = C.col(j);
    const Vector x = K.partialPivLu().solve(c);
    Matrix X(m, n);
    for (Eigen::Index j = 0; j < n; ++j) X.col(j) = x.segment(j * m, m);
    return X;
}

} // namespace

TEST_CASE("Gauss-Legendre rule")
{
    const GaussLegendreRule r = gauss_legendre(8, 0.0, 2.0);
    REQUIRE(r.x.size() == 8);
    double w = 0.0, m15 = 0.0;
    for (std::size_t i = 0; i < r.x.size(); ++i) {
        w += r.w[i];
        m15 += r.w[i] * std::pow(r.x[i], 15);
    }
    CHECK(w == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(m15 == doctest::Approx(std::pow(2.0, 16) / 16.0).epsilon(1e-13));
    CHECK_THROWS(gauss_legendre(0));
}

TEST_CASE("panel integration")
{
    QuadratureConfig cfg;
    cfg.tol = 1e-12;
    auto f = [](double t) { return scalar(std::exp(-t) * std::cos(3.0 * t)); };
    FunctionSampler<decltype(f)> s(f);
    const QuadratureResult res = integrate_panels(s, 40.0, 4, cfg);
    // ∫_0^∞ e^{-t} cos 3t dt = 1/10, tail beyond 40 is below e^{-40}
    CHECK(std::abs(res.value(0, 0) - 0.1) < 1e-12);
    CHECK(res.panels >= 4);

    QuadratureConfig tight = cfg;
    tight.max_panels = 2;
    tight.tol = 1e-15;
    auto g = [](double t) { return scalar(std::cos(50.0 * t)); };
    FunctionSampler<decltype(g)> sg(g);
    CHECK_THROWS_AS(integrate_panels(sg, 40.0, 1, tight), QuadratureError);

    QuadratureConfig bad;
    bad.tol = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = QuadratureConfig{};
    bad.decay_folds = -1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("direct Sylvester solver")
{
    CHECK(solve_sylvester_direct(scalar(2.0), scalar(3.0), scalar(10.0))(0, 0).real() == doctest::Approx(2.0));
    CHECK(std::abs(solve_sylvester_direct(scalar(cplx(1, 1)), scalar(cplx(2, -3)), scalar(cplx(0, 5)))(0, 0) -
                   cplx(0, 5) / cplx(3, -2)) < 1e-15);

    Gen gen;
    const Matrix C = gen.matrix(3, 2);
    CHECK(rel(solve_sylvester_direct(-Matrix::Identity(3, 3), -Matrix::Identity(2, 2), C), -C / 2.0) < 1e-15);

    for (int trial = 0; trial < 5; ++trial) {
        const Matrix A = gen.stable(6);
        const Matrix Hb = gen.hermitian(3);
        const Matrix B = I_unit * Hb;  // anti-Hermitian
        const Matrix Cr = gen.matrix(6, 3);
        const Matrix X = solve_sylvester_direct(A, B, Cr);
        CHECK(sylvester_residual(A, B, Cr, X) <= 1e-10 * Cr.norm());
        CHECK(rel(X, flattened_oracle(A, B, Cr)) < 1e-10);
    }

    SUBCASE("singular pair is reported")
    {
        Matrix A = Matrix::Zero(2, 2);
        A.diagonal() << cplx(-1.0, 0.5), -2.0;
        Matrix B = Matrix::Zero(1, 1);
        B(0, 0) = cplx(1.0, -0.5);
        try {
            solve_sylvester_direct(A, B, gen.matrix(2, 1));
            FAIL("expected SingularityError");
        } catch (const SingularityError& e) {
            CHECK(std::string(e.what()).find("eigenvalue") != std::string::npos);
        }
    }
    CHECK_THROWS_AS(solve_sylvester_direct(gen.square(3), gen.square(2), gen.matrix(2, 2)),
                    std::invalid_argument);
}

TEST_CASE("quadrature Sylvester solver")
{
    // a = -1, b = 0, c = 2: a x + x b = c gives x = -2 = -∫ 2 e^{-t} dt
    CHECK(solve_sylvester_quadrature(scalar(-1.0), scalar(0.0), scalar(2.0))(0, 0).real() ==
          doctest::Approx(-2.0).epsilon(1e-10));

    Gen gen;
    const Matrix A = gen.stable(5);
    const Matrix B = I_unit * gen.hermitian(2);
    CHECK(solve_sylvester_quadrature(A, B, Matrix::Zero(5, 2)).norm() == 0.0);

    for (int trial = 0; trial < 5; ++trial) {
        const Matrix At = gen.stable(6);
        const Matrix Bt = I_unit * gen.hermitian(3);
        const Matrix C = gen.matrix(6, 3);
        const Matrix Xd = solve_sylvester_direct(At, Bt, C);
        const Matrix Xq = solve_sylvester_quadrature(At, Bt, C);
        CHECK(rel(Xq, Xd) < 1e-8);
    }

    Matrix grow = Matrix::Zero(2, 2);
    grow.diagonal() << -1.0, 0.5;
    CHECK_THROWS_AS(solve_sylvester_quadrature(grow, scalar(0.0), gen.matrix(2, 1)), DivergenceError);
    CHECK_THROWS_AS(solve_sylvester_quadrature(I_unit * gen.hermitian(2), scalar(0.0), gen.matrix(2, 1)),
                    DivergenceError);
}

TEST_CASE("bipartite generator structure")
{
    Gen gen;
    const Matrix H_A = gen.hermitian(3);
    const LindbladSpec spec = damped_oscillator(0.3, 1.0, 0.2, 0.4, 5);
    const Matrix L_B = lindbladian(spec);
    const Operator sigma = steady_state(L_B);
    const double gap = 0.7;

    const Matrix free_ref = -I_unit * lift_A(commutator(H_A), 3, 5) + lift_B(L_B, 3, 5);
    const BipartiteGenerator G0(H_A, L_B);
    CHECK(rel(G0.dense(), free_ref) < 1e-13);

    const Matrix defl = append_state_map(sigma, 3) * partial_trace_B_map(3, 5);
    const BipartiteGenerator G(H_A, L_B, gap, sigma);
    const Matrix dense = free_ref - gap * defl;
    CHECK(rel(G.dense(), dense) < 1e-13);

    const Matrix cols = gen.matrix(G.dim(), 3);
    CHECK(rel(G.apply(cols), dense * cols) < 1e-13);

    const cplx beta(0.1, 2.0);
    const Matrix x = G.solve_shifted(beta, cols);
    CHECK(rel((dense + beta * Matrix::Identity(G.dim(), G.dim())) * x, cols) < 1e-11);

    // structured and generic direct solves agree
    const Matrix B = I_unit * commutator(gen.hermitian(2));
    const Matrix C = gen.matrix(G.dim(), 4);
    const Matrix Xs = solve_sylvester_direct(G, B, C);
    const Matrix Xg = solve_sylvester_direct(dense, B, C);
    CHECK(rel(Xs, Xg) < 1e-10);
    CHECK(sylvester_residual(dense, B, C, Xs) <= 1e-10 * C.norm());

    // without deflation the steady direction is singular for a zero shift
    CHECK_THROWS_AS(G0.solve_shifted(0.0, cols), SingularityError);

    // structured flow matches the dense propagator
    const BipartiteFreeFlow flow(H_A, L_B);
    const Matrix v = gen.matrix(G.dim(), 2);
    CHECK(rel(flow.propagator(1.3)(v), expm_pade(1.3 * free_ref) * v) < 1e-10);
    const DenseFlow dflow(free_ref);
    CHECK(rel(dflow.propagator(1.3)(v), flow.propagator(1.3)(v)) < 1e-10);
    CHECK(flow.decay_rate() > 0.0);
    CHECK(dflow.decay_rate() == doctest::Approx(flow.decay_rate()).epsilon(1e-8));
}

TEST_CASE("decay rate from spectrum")
{
    Vector ev(3);
    ev << cplx(0.0, 1.0), cplx(-0.5, 2.0), cplx(-2.0, 0.0);
    CHECK(decay_rate_from_spectrum(ev, 1.0) == doctest::Approx(0.5));
    ev(0) = 0.1;
    CHECK_THROWS_AS(decay_rate_from_spectrum(ev, 1.0), DivergenceError);
    Vector flat(2);
    flat << cplx(0.0, 1.0), cplx(0.0, -1.0);
    CHECK_THROWS_AS(decay_rate_from_spectrum(flat, 1.0), DivergenceError);
}
