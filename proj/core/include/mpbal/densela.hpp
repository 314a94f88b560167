#pragma once
//
// Dense kernels executed under an emulated precision.
//
// Every scalar multiply, add, divide and square root is rounded to the
// context format. Accumulations run sequentially left to right; there is no
// blocking. The fp64 context runs natively.
//

#include <cstddef>
#include <span>
#include <vector>

#include <mpbal/dense.hpp>
#include <mpbal/fpemu.hpp>

namespace mpbal {

struct PrecisionContext
{
    FloatFormat  fmt = fp64();

    static PrecisionContext  of ( const FloatFormat &  f ) { return { f }; }
};

//
// products
//

DenseMatrix  matmul ( const DenseMatrix &  A, const DenseMatrix &  B,
                      const PrecisionContext &  ctx, RoundingEvents *  events = nullptr );

Vector       matvec ( const DenseMatrix &  A, std::span< const double >  x,
                      const PrecisionContext &  ctx, RoundingEvents *  events = nullptr );

// sum of squares and square root, all rounded
double       norm2  ( std::span< const double >  x, const PrecisionContext &  ctx );

//
// LU with partial pivoting
//

struct LuFactors
{
    DenseMatrix                 lu;     // unit lower L below the diagonal, U on and above
    std::vector< std::size_t >  perm;   // row i of PA is row perm[i] of A
    FloatFormat                 fmt;

    std::size_t  n () const { return lu.rows(); }
};

// throws SingularPivot if a pivot is (or rounds to) zero
LuFactors    lu_factor ( const DenseMatrix &  A, const PrecisionContext &  ctx, RoundingEvents *  events = nullptr );

// solve A x = b by substitution with arithmetic in ctx
Vector       lu_solve  ( const LuFactors &  f, std::span< const double >  b, const PrecisionContext &  ctx );

DenseMatrix  lu_lower  ( const LuFactors &  f );
DenseMatrix  lu_upper  ( const LuFactors &  f );
DenseMatrix  permute_rows ( const DenseMatrix &  A, std::span< const std::size_t >  perm );

// number of nonzero entries in L + U (unit diagonal of L not counted twice)
std::size_t  lu_nnz    ( const LuFactors &  f );

//
// Householder QR
//

struct QrFactors
{
    DenseMatrix  qr;        // R on and above the diagonal, reflector tails below
    Vector       beta;      // H_j = I - beta_j v_j v_j^T, v_j(j) = 1 implicit
    FloatFormat  fmt;
};

QrFactors    qr_householder ( const DenseMatrix &  A, const PrecisionContext &  ctx, RoundingEvents *  events = nullptr );

DenseMatrix  qr_r        ( const QrFactors &  f );
// thin Q (m x n)
DenseMatrix  qr_thin_q   ( const QrFactors &  f, const PrecisionContext &  ctx );
// b <- Q^T b
void         qr_apply_qt ( const QrFactors &  f, std::span< double >  b, const PrecisionContext &  ctx );
// min ||b - A x||_2
Vector       qr_least_squares ( const QrFactors &  f, std::span< const double >  b, const PrecisionContext &  ctx );

//
// Cholesky, A = C^T C with C upper triangular
//

// throws NotPositiveDefinite on a nonpositive pivot
DenseMatrix  chol ( const DenseMatrix &  A, const PrecisionContext &  ctx, RoundingEvents *  events = nullptr );

//
// triangular solves
//

enum class Side  { left, right };
enum class Uplo  { upper, lower };
enum class Trans { no, yes };

// left:  op(T) X = B,   right: X op(T) = B
DenseMatrix  solve_triangular ( const DenseMatrix &  T, const DenseMatrix &  B,
                                Side  side, Uplo  uplo, Trans  trans,
                                const PrecisionContext &  ctx );

Vector       solve_triangular ( const DenseMatrix &  T, std::span< const double >  b,
                                Uplo  uplo, Trans  trans, const PrecisionContext &  ctx );

//
// fp64 decompositions
//

struct SvdResult
{
    DenseMatrix  U;      // m x p, p = min(m,n)
    Vector       sigma;  // nonincreasing, nonnegative
    DenseMatrix  V;      // n x p
};

struct SvdOptions
{
    int   max_sweeps = 30;
    bool  compute_v  = true;
};

// one-sided Jacobi SVD; throws NoConvergence after max_sweeps
SvdResult  svd ( const DenseMatrix &  A, const SvdOptions &  opts = {} );

struct EigResult
{
    Vector       values;     // nonincreasing
    DenseMatrix  vectors;    // columns
};

// cyclic Jacobi for symmetric A
EigResult  sym_eig ( const DenseMatrix &  A, int  max_sweeps = 50 );

//
// norms and condition numbers (fp64, desk scale)
//

// upper bound on n for explicit inverses; MPBAL_DENSE_CAP overrides the default 4096
std::size_t  dense_cap ();

DenseMatrix  inverse ( const DenseMatrix &  A );

// power iteration on A^T A: 100 iterations or relative change < 1e-10
double       spectral_norm ( const DenseMatrix &  A );

double       cond_inf  ( const DenseMatrix &  A );
// || |A^-1| |A| ||_2
double       cond2_abs ( const DenseMatrix &  A );

}// namespace mpbal
