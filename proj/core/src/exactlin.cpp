#include "kobst/exactlin.hpp"

#include <sstream>
#include <stdexcept>

namespace kobst {

IntMatrix::IntMatrix(int rows, int cols, std::vector<Int> entries)
    : rows_(rows), cols_(cols), e_(std::move(entries)) {
    if (e_.size() != size_t(rows) * cols)
        throw std::invalid_argument("IntMatrix: entry count != rows*cols");
}

IntMatrix IntMatrix::identity(int n) {
    IntMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1;
    return m;
}

IntMatrix IntMatrix::fromRows(const std::vector<std::vector<long>>& rows) {
    int r = int(rows.size());
    int c = r == 0 ? 0 : int(rows[0].size());
    IntMatrix m(r, c);
    for (int i = 0; i < r; ++i) {
        if (int(rows[i].size()) != c) throw std::invalid_argument("fromRows: ragged rows");
        for (int j = 0; j < c; ++j) m(i, j) = rows[i][j];
    }
    return m;
}

bool IntMatrix::isZero() const {
    for (const Int& x : e_)
        if (x != 0) return false;
    return true;
}

IntMatrix IntMatrix::transposed() const {
    IntMatrix t(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

std::vector<Int> IntMatrix::column(int j) const {
    std::vector<Int> v(rows_);
    for (int i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
    return v;
}

std::vector<Int> IntMatrix::row(int i) const {
    std::vector<Int> v(cols_);
    for (int j = 0; j < cols_; ++j) v[j] = (*this)(i, j);
    return v;
}

void IntMatrix::setColumn(int j, const std::vector<Int>& v) {
    for (int i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
}

IntMatrix IntMatrix::hcat(const IntMatrix& a, const IntMatrix& b) {
    if (a.rows() != b.rows()) throw std::invalid_argument("hcat: row mismatch");
    IntMatrix m(a.rows(), a.cols() + b.cols());
    for (int i = 0; i < a.rows(); ++i) {
        for (int j = 0; j < a.cols(); ++j) m(i, j) = a(i, j);
        for (int j = 0; j < b.cols(); ++j) m(i, a.cols() + j) = b(i, j);
    }
    return m;
}

IntMatrix IntMatrix::vcat(const IntMatrix& a, const IntMatrix& b) {
    if (a.cols() != b.cols()) throw std::invalid_argument("vcat: col mismatch");
    IntMatrix m(a.rows() + b.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) m(i, j) = a(i, j);
    for (int i = 0; i < b.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) m(a.rows() + i, j) = b(i, j);
    return m;
}

std::string IntMatrix::toString() const {
    std::ostringstream os;
    os << "[";
    for (int i = 0; i < rows_; ++i) {
        os << (i ? ",[" : "[");
        for (int j = 0; j < cols_; ++j) os << (j ? "," : "") << (*this)(i, j).get_str();
        os << "]";
    }
    os << "]";
    return os.str();
}

IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("matmul: dim mismatch");
    IntMatrix m(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int k = 0; k < a.cols(); ++k) {
            const Int& aik = a(i, k);
            if (aik == 0) continue;
            for (int j = 0; j < b.cols(); ++j)
                if (b(k, j) != 0) m(i, j) += aik * b(k, j);
        }
    return m;
}

std::vector<Int> operator*(const IntMatrix& a, const std::vector<Int>& v) {
    if (a.cols() != int(v.size())) throw std::invalid_argument("matvec: dim mismatch");
    std::vector<Int> r(a.rows());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            if (a(i, j) != 0 && v[j] != 0) r[i] += a(i, j) * v[j];
    return r;
}

IntMatrix operator+(const IntMatrix& a, const IntMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("add: dim mismatch");
    IntMatrix m(a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) m(i, j) = a(i, j) + b(i, j);
    return m;
}

IntMatrix operator-(const IntMatrix& a, const IntMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("sub: dim mismatch");
    IntMatrix m(a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) m(i, j) = a(i, j) - b(i, j);
    return m;
}

IntMatrix operator*(const Int& c, const IntMatrix& a) {
    IntMatrix m(a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) m(i, j) = c * a(i, j);
    return m;
}

namespace {

// Elementary operations applied simultaneously to A and the transform
// accumulators.  U tracks row ops, V tracks column ops.

void swapRows(IntMatrix& A, IntMatrix& U, int i, int j) {
    if (i == j) return;
    for (int k = 0; k < A.cols(); ++k) std::swap(A(i, k), A(j, k));
    for (int k = 0; k < U.cols(); ++k) std::swap(U(i, k), U(j, k));
}

void swapCols(IntMatrix& A, IntMatrix& V, int i, int j) {
    if (i == j) return;
    for (int k = 0; k < A.rows(); ++k) std::swap(A(k, i), A(k, j));
    for (int k = 0; k < V.rows(); ++k) std::swap(V(k, i), V(k, j));
}

// row i -= q * row j
void addRow(IntMatrix& A, IntMatrix& U, int i, int j, const Int& q) {
    if (q == 0) return;
    for (int k = 0; k < A.cols(); ++k) A(i, k) -= q * A(j, k);
    for (int k = 0; k < U.cols(); ++k) U(i, k) -= q * U(j, k);
}

// col i -= q * col j
void addCol(IntMatrix& A, IntMatrix& V, int i, int j, const Int& q) {
    if (q == 0) return;
    for (int k = 0; k < A.rows(); ++k) A(k, i) -= q * A(k, j);
    for (int k = 0; k < V.rows(); ++k) V(k, i) -= q * V(k, j);
}

void negateRow(IntMatrix& A, IntMatrix& U, int i) {
    for (int k = 0; k < A.cols(); ++k) A(i, k) = -A(i, k);
    for (int k = 0; k < U.cols(); ++k) U(i, k) = -U(i, k);
}

}  // namespace

SnfResult smithNormalForm(const IntMatrix& A0) {
    IntMatrix A = A0;
    const int m = A.rows(), n = A.cols();
    IntMatrix U = IntMatrix::identity(m);
    IntMatrix V = IntMatrix::identity(n);

    int t = 0;
    const int bound = std::min(m, n);
    while (t < bound) {
        // Pivot: smallest |entry| != 0 in the trailing submatrix,
        // ties broken by lowest (row, col).
        int pi = -1, pj = -1;
        Int best;
        for (int i = t; i < m; ++i)
            for (int j = t; j < n; ++j) {
                if (A(i, j) == 0) continue;
                Int a = abs(A(i, j));
                if (pi < 0 || a < best) {
                    best = a;
                    pi = i;
                    pj = j;
                }
            }
        if (pi < 0) break;  // trailing submatrix is zero
        swapRows(A, U, t, pi);
        swapCols(A, V, t, pj);
        if (A(t, t) < 0) negateRow(A, U, t);

        // Clear row and column t; restart if a remainder becomes the
        // new, smaller pivot.
        bool clean = true;
        for (int i = t + 1; i < m; ++i) {
            if (A(i, t) == 0) continue;
            Int q;
            mpz_fdiv_q(q.get_mpz_t(), A(i, t).get_mpz_t(), A(t, t).get_mpz_t());
            addRow(A, U, i, t, q);
            if (A(i, t) != 0) clean = false;
        }
        for (int j = t + 1; j < n; ++j) {
            if (A(t, j) == 0) continue;
            Int q;
            mpz_fdiv_q(q.get_mpz_t(), A(t, j).get_mpz_t(), A(t, t).get_mpz_t());
            addCol(A, V, j, t, q);
            if (A(t, j) != 0) clean = false;
        }
        if (!clean) continue;

        // Divisibility fixup: pivot must divide every remaining entry.
        bool divides = true;
        for (int i = t + 1; i < m && divides; ++i)
            for (int j = t + 1; j < n && divides; ++j)
                if (A(i, j) % A(t, t) != 0) {
                    addRow(A, U, t, i, Int(-1));  // row t += row i
                    divides = false;
                }
        if (!divides) continue;
        ++t;
    }

    SnfResult r;
    r.U = std::move(U);
    r.V = std::move(V);
    r.rank = t;
    for (int i = 0; i < t; ++i) r.invariantFactors.push_back(A(i, i));
    r.D = std::move(A);
    return r;
}

DiophantineSolver::DiophantineSolver(IntMatrix A) : A_(std::move(A)), snf_(smithNormalForm(A_)) {
    // Kernel basis: columns of V past the rank.
    for (int j = snf_.rank; j < A_.cols(); ++j) kernel_.push_back(snf_.V.column(j));
}

std::optional<std::vector<Int>> DiophantineSolver::solve(const std::vector<Int>& b) const {
    if (int(b.size()) != A_.rows()) throw std::invalid_argument("solve: dimension mismatch");
    std::vector<Int> c = snf_.U * b;
    std::vector<Int> y(A_.cols());
    for (int i = 0; i < A_.rows(); ++i) {
        if (i < snf_.rank) {
            const Int& d = snf_.D(i, i);
            if (c[i] % d != 0) return std::nullopt;
            y[i] = c[i] / d;
        } else if (c[i] != 0) {
            return std::nullopt;
        }
    }
    return snf_.V * y;
}

std::optional<std::vector<Rat>> DiophantineSolver::solveRational(const std::vector<Rat>& b) const {
    if (int(b.size()) != A_.rows()) throw std::invalid_argument("solveRational: dimension mismatch");
    std::vector<Rat> c(A_.rows());
    for (int i = 0; i < A_.rows(); ++i)
        for (int j = 0; j < A_.rows(); ++j)
            if (snf_.U(i, j) != 0 && b[j] != 0) c[i] += Rat(snf_.U(i, j)) * b[j];
    std::vector<Rat> y(A_.cols());
    for (int i = 0; i < A_.rows(); ++i) {
        if (i < snf_.rank) {
            y[i] = c[i] / Rat(snf_.D(i, i));
        } else if (c[i] != 0) {
            return std::nullopt;
        }
    }
    std::vector<Rat> x(A_.cols());
    for (int i = 0; i < A_.cols(); ++i)
        for (int j = 0; j < A_.cols(); ++j)
            if (snf_.V(i, j) != 0 && y[j] != 0) x[i] += Rat(snf_.V(i, j)) * y[j];
    return x;
}

std::optional<std::vector<Rat>> DiophantineSolver::solveLocal(const std::vector<Rat>& b,
                                                              const std::vector<long>& s) const {
    // Clear denominators with an S-unit, solve, divide back.  A
    // denominator outside S cannot be cleared this way, so reject it
    // unless it divides away during reduction.
    Int unit = 1;
    for (const Rat& x : b) {
        Int den = x.get_den();
        for (long p : s)
            while (den % p == 0) {
                den /= p;
                unit *= p;  // rough over-estimate is fine, stays an S-unit
            }
        if (den != 1) return std::nullopt;
    }
    std::vector<Int> bi(b.size());
    for (size_t i = 0; i < b.size(); ++i) {
        Rat scaled = b[i] * Rat(unit);
        if (scaled.get_den() != 1) return std::nullopt;
        bi[i] = scaled.get_num();
    }
    // Solve A x = unit*b over Z[1/S]: via SNF, y_i = c_i / d_i must be
    // S-integral.
    std::vector<Int> c = snf_.U * bi;
    std::vector<Rat> y(A_.cols());
    for (int i = 0; i < A_.rows(); ++i) {
        if (i < snf_.rank) {
            Rat q(c[i], snf_.D(i, i));
            q.canonicalize();
            Int den = q.get_den();
            for (long p : s)
                while (den % p == 0) den /= p;
            if (den != 1) return std::nullopt;
            y[i] = q;
        } else if (c[i] != 0) {
            return std::nullopt;
        }
    }
    std::vector<Rat> x(A_.cols());
    for (int i = 0; i < A_.cols(); ++i)
        for (int j = 0; j < A_.cols(); ++j)
            if (snf_.V(i, j) != 0 && y[j] != 0) x[i] += Rat(snf_.V(i, j)) * y[j];
    for (Rat& v : x) v /= Rat(unit);
    return x;
}

std::optional<DiophantineSolution> solveLinearDiophantine(const IntMatrix& A, const std::vector<Int>& b) {
    DiophantineSolver solver(A);
    auto x = solver.solve(b);
    if (!x) return std::nullopt;
    return DiophantineSolution{*x, solver.kernelBasis()};
}

std::vector<std::vector<Int>> integerKernelBasis(const IntMatrix& A) {
    SnfResult s = smithNormalForm(A);
    std::vector<std::vector<Int>> basis;
    for (int j = s.rank; j < A.cols(); ++j) basis.push_back(s.V.column(j));
    return basis;
}

IntMatrix unimodularInverse(const IntMatrix& U) {
    if (U.rows() != U.cols()) throw std::invalid_argument("unimodularInverse: not square");
    DiophantineSolver solver(U);
    IntMatrix inv(U.rows(), U.cols());
    for (int j = 0; j < U.cols(); ++j) {
        std::vector<Int> e(U.rows());
        e[j] = 1;
        auto x = solver.solve(e);
        if (!x) throw std::invalid_argument("unimodularInverse: matrix is not unimodular");
        inv.setColumn(j, *x);
    }
    return inv;
}

}  // namespace kobst
