// operator_core.cpp — Tensor products, partial traces, vectorization and expm

#include "adiael/operator_core.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace adiael {

Matrix identity(Eigen::Index d)
{
    return Matrix::Identity(d, d);
}

Matrix tensor(const Matrix& A, const Matrix& B)
{
    const Eigen::Index ra = A.rows(), ca = A.cols();
    const Eigen::Index rb = B.rows(), cb = B.cols();
    Matrix out(ra * rb, ca * cb);
    for (Eigen::Index i = 0; i < ra; ++i) {
        for (Eigen::Index j = 0; j < ca; ++j) {
            out.block(i * rb, j * cb, rb, cb) = A(i, j) * B;
        }
    }
    return out;
}

namespace {

void require_bipartite(const Matrix& X, Eigen::Index dimA, Eigen::Index dimB)
{
    if (dimA <= 0 || dimB <= 0) {
        throw std::invalid_argument("partial trace: subsystem dimensions must be positive");
    }
    if (X.rows() != X.cols() || X.rows() != dimA * dimB) {
        std::ostringstream os;
        os << "partial trace: operator is " << X.rows() << "x" << X.cols()
           << " but dimA*dimB = " << dimA * dimB;
        throw std::invalid_argument(os.str());
    }
}

} // namespace

Operator partial_trace_B(const Operator& X, Eigen::Index dimA, Eigen::Index dimB)
{
    require_bipartite(X, dimA, dimB);
    Operator out = Operator::Zero(dimA, dimA);
    for (Eigen::Index a = 0; a < dimA; ++a) {
        for (Eigen::Index ap = 0; ap < dimA; ++ap) {
            out(a, ap) = X.block(a * dimB, ap * dimB, dimB, dimB).trace();
        }
    }
    return out;
}

Operator partial_trace_A(const Operator& X, Eigen::Index dimA, Eigen::Index dimB)
{
    require_bipartite(X, dimA, dimB);
    Operator out = Operator::Zero(dimB, dimB);
    for (Eigen::Index a = 0; a < dimA; ++a) {
        out += X.block(a * dimB, a * dimB, dimB, dimB);
    }
    return out;
}

Vector vectorize(const Operator& X)
{
    return Eigen::Map<const Vector>(X.data(), X.size());
}

Operator unvectorize(const Vector& v)
{
    const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
    if (d * d != v.size()) {
        throw std::invalid_argument("unvectorize: length " + std::to_string(v.size()) +
                                    " is not a perfect square");
    }
    return unvectorize(v, d);
}

Operator unvectorize(const Vector& v, Eigen::Index dim)
{
    if (dim * dim != v.size()) {
        throw std::invalid_argument("unvectorize: length does not match dim^2");
    }
    return Eigen::Map<const Matrix>(v.data(), dim, dim);
}

Operator apply_map(const Matrix& S, const Operator& X)
{
    if (S.cols() != X.size()) {
        throw std::invalid_argument("apply_map: superoperator column count does not match operator size");
    }
    return unvectorize(S * vectorize(X));
}

Superoperator left_mult(const Operator& A)
{
    return tensor(identity(A.rows()), A);
}

Superoperator right_mult(const Operator& B)
{
    return tensor(B.transpose(), identity(B.rows()));
}

Superoperator sandwich(const Operator& A, const Operator& B)
{
    return tensor(B.transpose(), A);
}

Superoperator commutator(const Operator& H)
{
    return left_mult(H) - right_mult(H);
}

Superoperator dissipator(const Operator& L)
{
    const Operator LdL = L.adjoint() * L;
    return sandwich(L, L.adjoint()) - 0.5 * (left_mult(LdL) + right_mult(LdL));
}

Superoperator lift_B(const Superoperator& S, Eigen::Index dimA, Eigen::Index dimB)
{
    if (S.rows() != dimB * dimB || S.cols() != dimB * dimB) {
        throw std::invalid_argument("lift_B: superoperator does not act on the B space");
    }
    const Eigen::Index D = dimA * dimB;
    Superoperator out = Superoperator::Zero(D * D, D * D);
    for (Eigen::Index a = 0; a < dimA; ++a) {
        for (Eigen::Index ap = 0; ap < dimA; ++ap) {
            for (Eigen::Index bp = 0; bp < dimB; ++bp) {
                for (Eigen::Index b = 0; b < dimB; ++b) {
                    const Eigen::Index row = (ap * dimB + bp) * D + a * dimB + b;
                    for (Eigen::Index cp = 0; cp < dimB; ++cp) {
                        for (Eigen::Index c = 0; c < dimB; ++c) {
                            const cplx s = S(bp * dimB + b, cp * dimB + c);
                            if (s != cplx{}) {
                                out(row, (ap * dimB + cp) * D + a * dimB + c) = s;
                            }
                        }
                    }
                }
            }
        }
    }
    return out;
}

Superoperator lift_A(const Superoperator& S, Eigen::Index dimA, Eigen::Index dimB)
{
    if (S.rows() != dimA * dimA || S.cols() != dimA * dimA) {
        throw std::invalid_argument("lift_A: superoperator does not act on the A space");
    }
    const Eigen::Index D = dimA * dimB;
    Superoperator out = Superoperator::Zero(D * D, D * D);
    for (Eigen::Index ap = 0; ap < dimA; ++ap) {
        for (Eigen::Index a = 0; a < dimA; ++a) {
            for (Eigen::Index cp = 0; cp < dimA; ++cp) {
                for (Eigen::Index c = 0; c < dimA; ++c) {
                    const cplx s = S(ap * dimA + a, cp * dimA + c);
                    if (s == cplx{}) continue;
                    for (Eigen::Index bp = 0; bp < dimB; ++bp) {
                        for (Eigen::Index b = 0; b < dimB; ++b) {
                            out((ap * dimB + bp) * D + a * dimB + b,
                                (cp * dimB + bp) * D + c * dimB + b) = s;
                        }
                    }
                }
            }
        }
    }
    return out;
}

RectangularMap partial_trace_B_map(Eigen::Index dimA, Eigen::Index dimB)
{
    const Eigen::Index D = dimA * dimB;
    RectangularMap out = RectangularMap::Zero(dimA * dimA, D * D);
    for (Eigen::Index ap = 0; ap < dimA; ++ap) {
        for (Eigen::Index a = 0; a < dimA; ++a) {
            for (Eigen::Index b = 0; b < dimB; ++b) {
                out(ap * dimA + a, (ap * dimB + b) * D + a * dimB + b) = 1.0;
            }
        }
    }
    return out;
}

RectangularMap append_state_map(const Operator& sigma, Eigen::Index dimA)
{
    const Eigen::Index dimB = sigma.rows();
    const Eigen::Index D = dimA * dimB;
    RectangularMap out = RectangularMap::Zero(D * D, dimA * dimA);
    for (Eigen::Index ap = 0; ap < dimA; ++ap) {
        for (Eigen::Index a = 0; a < dimA; ++a) {
            for (Eigen::Index bp = 0; bp < dimB; ++bp) {
                for (Eigen::Index b = 0; b < dimB; ++b) {
                    out((ap * dimB + bp) * D + a * dimB + b, ap * dimA + a) = sigma(b, bp);
                }
            }
        }
    }
    return out;
}

double frobenius(const Matrix& M)
{
    return M.norm();
}

double trace_norm(const Matrix& M)
{
    Eigen::JacobiSVD<Matrix> svd(M);
    return svd.singularValues().sum();
}

double hermiticity_defect(const Matrix& M)
{
    return (M - M.adjoint()).norm();
}

bool is_hermitian(const Matrix& M, double tol)
{
    if (M.rows() != M.cols()) return false;
    const double scale = std::max(1.0, M.norm());
    return hermiticity_defect(M) <= tol * scale;
}

bool all_finite(const Matrix& M)
{
    return M.allFinite();
}

// ---- matrix exponential --------------------------------------------------

namespace {

double norm1(const Matrix& M)
{
    return M.cwiseAbs().colwise().sum().maxCoeff();
}

struct EigenFactors {
    Vector values;
    Matrix V;
    Matrix Vinv;
    std::vector<ExpPropagator::Block> blocks;
    double condition = 0.0;
};

// Index sets of the connected components of the sparsity graph of M
// (i ~ j when M(i, j) or M(j, i) is nonzero). M is block diagonal up to a
// permutation with one block per component.
std::vector<std::vector<Eigen::Index>> components(const Matrix& M)
{
    const Eigen::Index n = M.rows();
    std::vector<Eigen::Index> parent(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) parent[static_cast<std::size_t>(i)] = i;
    auto find = [&parent](Eigen::Index i) {
        while (parent[static_cast<std::size_t>(i)] != i) {
            auto& p = parent[static_cast<std::size_t>(i)];
            p = parent[static_cast<std::size_t>(p)];
            i = p;
        }
        return i;
    };
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i) {
            if (M(i, j) == cplx(0.0)) continue;
            const Eigen::Index a = find(i), b = find(j);
            if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
        }
    std::vector<std::vector<Eigen::Index>> out;
    std::vector<Eigen::Index> slot(static_cast<std::size_t>(n), -1);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Index r = find(i);
        auto& s = slot[static_cast<std::size_t>(r)];
        if (s < 0) {
            s = static_cast<Eigen::Index>(out.size());
            out.emplace_back();
        }
        out[static_cast<std::size_t>(s)].push_back(i);
    }
    return out;
}

EigenFactors decompose(const Matrix& M)
{
    EigenFactors f;
    const Eigen::Index n = M.rows();
    f.values.resize(n);
    f.V = Matrix::Zero(n, n);
    f.Vinv = Matrix::Zero(n, n);
    // Decoupled blocks (e.g. the excitation-difference sectors of an
    // oscillator Liouvillian) are diagonalized separately.
    for (const std::vector<Eigen::Index>& idx : components(M)) {
        const Matrix block = M(idx, idx);
        Eigen::ComplexEigenSolver<Matrix> es(block, true);
        if (es.info() != Eigen::Success) {
            f.values.resize(0);
            f.condition = std::numeric_limits<double>::infinity();
            return f;
        }
        const Vector ev = es.eigenvalues();
        const Matrix Vb = es.eigenvectors();
        const Matrix Vbinv = Vb.partialPivLu().inverse();
        f.values(idx) = ev;
        f.V(idx, idx) = Vb;
        f.Vinv(idx, idx) = Vbinv;
        f.blocks.push_back({idx, Vb, Vbinv});
    }
    f.condition = norm1(f.V) * norm1(f.Vinv);
    if (!std::isfinite(f.condition)) {
        f.condition = std::numeric_limits<double>::infinity();
    }
    return f;
}

} // namespace

Vector eigenvalues(const Matrix& M)
{
    if (M.rows() != M.cols()) throw std::invalid_argument("eigenvalues: matrix must be square");
    Vector out(M.rows());
    for (const std::vector<Eigen::Index>& idx : components(M)) {
        Eigen::ComplexEigenSolver<Matrix> es(Matrix(M(idx, idx)), false);
        if (es.info() != Eigen::Success) throw std::runtime_error("eigenvalues: QR iteration failed");
        const Vector ev = es.eigenvalues();
        out(idx) = ev;
    }
    return out;
}

Matrix expm_pade(const Matrix& M)
{
    if (!M.allFinite()) {
        throw std::invalid_argument("expm: matrix has non-finite entries");
    }
    const Eigen::Index n = M.rows();
    const Matrix Id = identity(n);
    const double nrm = norm1(M);

    static constexpr std::array<double, 4> b3{120., 60., 12., 1.};
    static constexpr std::array<double, 6> b5{30240., 15120., 3360., 420., 30., 1.};
    static constexpr std::array<double, 8> b7{17297280., 8648640., 1995840., 277200.,
                                              25200.,    1512.,    56.,      1.};
    static constexpr std::array<double, 10> b9{17643225600., 8821612800., 2075673600.,
                                               302702400.,   30270240.,   2162160.,
                                               110880.,      3960.,       90.,
                                               1.};
    static constexpr std::array<double, 14> b13{
        64764752532480000., 32382376266240000., 7771770303897600., 1187353796428800.,
        129060195264000.,   10559470521600.,    670442572800.,     33522128640.,
        1323241920.,        40840800.,          960960.,           16380.,
        182.,               1.};

    auto low_order = [&](const auto& b) {
        const std::size_t m = b.size() - 1;
        const Matrix A2 = M * M;
        Matrix power = Id;
        Matrix U = Matrix::Zero(n, n);
        Matrix V = Matrix::Zero(n, n);
        for (std::size_t k = 0; k <= m; k += 2) {
            V += b[k] * power;
            if (k + 1 <= m) U += b[k + 1] * power;
            power = power * A2;
        }
        U = M * U;
        return Eigen::PartialPivLU<Matrix>(V - U).solve(V + U).eval();
    };

    if (nrm <= 1.495585217958292e-2) return low_order(b3);
    if (nrm <= 2.539398330063230e-1) return low_order(b5);
    if (nrm <= 9.504178996162932e-1) return low_order(b7);
    if (nrm <= 2.097847961257068e0) return low_order(b9);

    constexpr double theta13 = 5.371920351148152;
    int s = 0;
    if (nrm > theta13) {
        s = static_cast<int>(std::ceil(std::log2(nrm / theta13)));
    }
    const Matrix A = M / std::ldexp(1.0, s);
    const Matrix A2 = A * A;
    const Matrix A4 = A2 * A2;
    const Matrix A6 = A4 * A2;
    const Matrix U = A * (A6 * (b13[13] * A6 + b13[11] * A4 + b13[9] * A2) + b13[7] * A6 +
                          b13[5] * A4 + b13[3] * A2 + b13[1] * Id);
    const Matrix V = A6 * (b13[12] * A6 + b13[10] * A4 + b13[8] * A2) + b13[6] * A6 +
                     b13[4] * A4 + b13[2] * A2 + b13[0] * Id;
    Matrix R = Eigen::PartialPivLU<Matrix>(V - U).solve(V + U);
    for (int k = 0; k < s; ++k) {
        R = R * R;
    }
    return R;
}

Matrix expm(const Matrix& M, double t)
{
    if (!M.allFinite() || !std::isfinite(t)) {
        throw std::invalid_argument("expm: non-finite input");
    }
    if (M.rows() != M.cols()) {
        throw std::invalid_argument("expm: matrix must be square");
    }
    if (t == 0.0 || M.isZero(0.0)) {
        return identity(M.rows());
    }
    const EigenFactors f = decompose(M);
    if (f.condition < kEigenConditionLimit) {
        const Vector phase = (t * f.values).array().exp();
        return f.V * phase.asDiagonal() * f.Vinv;
    }
    return expm_pade(t * M);
}

ExpPropagator::ExpPropagator(const Matrix& M)
    : M_(M)
{
    if (!M.allFinite()) {
        throw std::invalid_argument("ExpPropagator: non-finite input");
    }
    if (M.rows() != M.cols()) {
        throw std::invalid_argument("ExpPropagator: matrix must be square");
    }
    EigenFactors f = decompose(M);
    condition_ = f.condition;
    if (f.values.size() == M.rows()) {
        values_ = std::move(f.values);
        if (std::isfinite(f.condition)) {
            factors_ = true;
            diagonal_ = f.condition < kEigenConditionLimit;
            V_ = std::move(f.V);
            Vinv_ = std::move(f.Vinv);
            blocks_ = std::move(f.blocks);
            column_norms_ = V_.colwise().norm().transpose();
        }
    } else {
        Eigen::ComplexEigenSolver<Matrix> es(M, false);
        values_ = es.eigenvalues();
    }
}

ExpPropagator ExpPropagator::adjoint() const
{
    ExpPropagator out;
    out.M_ = M_.adjoint();
    out.diagonal_ = diagonal_;
    out.factors_ = factors_;
    out.condition_ = condition_;
    out.values_ = values_.conjugate();
    if (factors_) {
        // M^† = (V^{-1})^† diag(conj λ) V^†
        out.V_ = Vinv_.adjoint();
        out.Vinv_ = V_.adjoint();
        for (const Block& b : blocks_) out.blocks_.push_back({b.index, b.Vinv.adjoint(), b.V.adjoint()});
        out.column_norms_ = out.V_.colwise().norm().transpose();
    }
    return out;
}

std::optional<Matrix> ExpPropagator::expansion(const Matrix& v) const
{
    if (!factors_) return std::nullopt;
    if (diagonal_) return blockwise(v, true);
    // explicit inverse is not backward stable at this conditioning
    Matrix y(v.rows(), v.cols());
    for (const Block& b : blocks_) {
        const Matrix rhs = v(b.index, Eigen::all);
        const Matrix yb = b.V.partialPivLu().solve(rhs);
        y(b.index, Eigen::all) = yb;
    }
    const Matrix recon = blockwise(y, false);
    for (Eigen::Index c = 0; c < v.cols(); ++c) {
        const double nv = v.col(c).norm();
        if (nv == 0.0) continue;
        const double spread = (y.col(c).cwiseAbs().cwiseProduct(column_norms_)).sum();
        // also catch inaccurate coordinates through the reconstruction error
        const double back = (recon.col(c) - v.col(c)).norm();
        if (!(spread < kEigenConditionLimit * nv) || !(back < 1e-12 * spread + 1e-14 * nv)) {
            return std::nullopt;
        }
    }
    return y;
}

Matrix ExpPropagator::from_expansion(double t, const Matrix& y) const
{
    const Vector phase = (t * values_).array().exp();
    return blockwise(phase.asDiagonal() * y, false);
}

Matrix ExpPropagator::blockwise(const Matrix& y, bool inverse) const
{
    if (blocks_.size() <= 1) return inverse ? Matrix(Vinv_ * y) : Matrix(V_ * y);
    Matrix out(y.rows(), y.cols());
    for (const Block& b : blocks_) {
        const Matrix yb = y(b.index, Eigen::all);
        const Matrix ob = (inverse ? b.Vinv : b.V) * yb;
        out(b.index, Eigen::all) = ob;
    }
    return out;
}

Matrix ExpPropagator::at(double t) const
{
    if (diagonal_) {
        const Vector phase = (t * values_).array().exp();
        return V_ * phase.asDiagonal() * Vinv_;
    }
    return expm_pade(t * M_);
}

Matrix ExpPropagator::apply(double t, const Matrix& v) const
{
    if (const auto y = expansion(v)) return from_expansion(t, *y);
    return expm_pade(t * M_) * v;
}

} // namespace adiael
