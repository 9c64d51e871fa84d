#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <vector>

// Exact linear algebra over Z and Q: Smith normal form, Diophantine
// solving, kernels.  All entries are arbitrary-precision; nothing here
// ever rounds.

namespace kobst {

using Int = mpz_class;
using Rat = mpq_class;

class IntMatrix {
public:
    IntMatrix() : rows_(0), cols_(0) {}
    IntMatrix(int rows, int cols) : rows_(rows), cols_(cols), e_(size_t(rows) * cols) {}
    IntMatrix(int rows, int cols, std::vector<Int> entries);

    static IntMatrix identity(int n);
    static IntMatrix zero(int rows, int cols) { return IntMatrix(rows, cols); }
    // Row-major initializer, e.g. fromRows({{2,4},{6,8}}).
    static IntMatrix fromRows(const std::vector<std::vector<long>>& rows);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    Int& operator()(int i, int j) { return e_[size_t(i) * cols_ + j]; }
    const Int& operator()(int i, int j) const { return e_[size_t(i) * cols_ + j]; }

    bool isZero() const;
    bool operator==(const IntMatrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_ && e_ == o.e_; }

    IntMatrix transposed() const;
    std::vector<Int> column(int j) const;
    std::vector<Int> row(int i) const;
    void setColumn(int j, const std::vector<Int>& v);

    // Stacks/concatenates; dimensions must agree.
    static IntMatrix hcat(const IntMatrix& a, const IntMatrix& b);
    static IntMatrix vcat(const IntMatrix& a, const IntMatrix& b);

    std::string toString() const;

private:
    int rows_, cols_;
    std::vector<Int> e_;
};

IntMatrix operator*(const IntMatrix& a, const IntMatrix& b);
std::vector<Int> operator*(const IntMatrix& a, const std::vector<Int>& v);
IntMatrix operator+(const IntMatrix& a, const IntMatrix& b);
IntMatrix operator-(const IntMatrix& a, const IntMatrix& b);
IntMatrix operator*(const Int& c, const IntMatrix& a);

struct SnfResult {
    IntMatrix U;  // unimodular, rows x rows
    IntMatrix D;  // diagonal, rows x cols
    IntMatrix V;  // unimodular, cols x cols
    std::vector<Int> invariantFactors;  // positive, d1 | d2 | ...
    int rank = 0;
};

// U*A*V = D with the divisibility chain.  Pivot choice: smallest
// absolute value among nonzero candidates, ties broken by lowest
// (row, col), so the transforms are deterministic.
SnfResult smithNormalForm(const IntMatrix& A);

struct DiophantineSolution {
    std::vector<Int> particular;
    std::vector<std::vector<Int>> kernelBasis;
};

// Solves A x = b over Z.  Returns nullopt when unsolvable over Z.
// The kernel basis is a Z-basis of { x : A x = 0 }.
std::optional<DiophantineSolution> solveLinearDiophantine(const IntMatrix& A, const std::vector<Int>& b);

// A basis of the integer kernel of A (columns as vectors).
std::vector<std::vector<Int>> integerKernelBasis(const IntMatrix& A);

// Factored form: one SNF, many right-hand sides.
class DiophantineSolver {
public:
    explicit DiophantineSolver(IntMatrix A);

    const IntMatrix& matrix() const { return A_; }
    // Integer solution of A x = b, if any.
    std::optional<std::vector<Int>> solve(const std::vector<Int>& b) const;
    // Rational solution of A x = b, if any (no integrality constraint).
    std::optional<std::vector<Rat>> solveRational(const std::vector<Rat>& b) const;
    // Solution with denominators supported in the prime list `s`
    // (solving over the localization Z[1/p : p in s]).
    std::optional<std::vector<Rat>> solveLocal(const std::vector<Rat>& b, const std::vector<long>& s) const;
    const std::vector<std::vector<Int>>& kernelBasis() const { return kernel_; }

private:
    IntMatrix A_;
    SnfResult snf_;
    std::vector<std::vector<Int>> kernel_;
};

// Inverse of a unimodular matrix (|det| = 1); throws otherwise.
IntMatrix unimodularInverse(const IntMatrix& U);

}  // namespace kobst
