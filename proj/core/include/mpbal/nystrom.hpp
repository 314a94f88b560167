#pragma once
//
// Single-pass randomized Nystrom approximation with the sketch product in a
// separate precision u_p.
//

#include <cstddef>
#include <cstdint>
#include <span>

#include <mpbal/dense.hpp>
#include <mpbal/fpemu.hpp>

namespace mpbal {

struct NystromConfig
{
    std::size_t    k    = 1;
    FloatFormat    u_p  = fp64();      // product Y = A Omega and storage of A
    FloatFormat    u    = fp64();      // everything else
    std::uint64_t  seed = 0;
    std::size_t    runs = 1;           // used by the experiment driver
    // Cholesky retries, each multiplying the shift by 10
    std::size_t    max_shift_retries = 1;

    void  validate ( std::size_t  n ) const;
};

struct NystromResult
{
    DenseMatrix  U;                 // n x k, orthonormal columns
    Vector       theta;             // k, nonincreasing, nonnegative
    double       nu         = 0.0;  // shift finally used
    std::size_t  shift_retries = 0;
};

// n x k standard Gaussian, generated column by column so that the first j
// columns do not depend on k
DenseMatrix  gaussian_matrix ( std::size_t  n, std::size_t  k, std::uint64_t  seed );

//
// Omega and Y = A Omega for the largest rank of interest; the leading j columns
// of both equal those of a sketch computed for rank j, so one sketch serves a
// whole range of k
//
struct NystromSketch
{
    DenseMatrix  omega;     // orthonormal (fp64 thin QR of the Gaussian)
    DenseMatrix  Y;         // A Omega, every operation in u_p
    FloatFormat  u_p;
};

// A is rounded to u_p before the product
NystromSketch  nystrom_sketch ( const DenseMatrix &  A, std::size_t  kmax, const FloatFormat &  u_p,
                                std::uint64_t  seed );

// shift, Cholesky, triangular solve and SVD on the leading k columns, in u.
// throws NotPositiveDefinite after max_shift_retries failed retries
NystromResult  nystrom_finalize ( const NystromSketch &  s, std::size_t  k, const FloatFormat &  u,
                                  std::size_t  max_shift_retries = 1 );

// A symmetric positive semidefinite
NystromResult  nystrom_single_pass ( const DenseMatrix &  A, const NystromConfig &  cfg );

// || A - U diag(theta) U^T ||_F in fp64
double  nystrom_error ( const DenseMatrix &  A, const NystromResult &  r );

// max { k : u <= lambda_k / (sqrt(n) lambda_1) }, 0 if none; lambda nonincreasing, lambda_1 > 0
std::size_t  precision_heuristic ( std::span< const double >  lambda, std::size_t  n, const FloatFormat &  fmt );

// ||Omega||_F ||(W1^T Omega)^+||_2; throws RankDeficientSketch when W1^T Omega is numerically singular
double  kappa_tilde ( const DenseMatrix &  omega, const DenseMatrix &  W1 );

}// namespace mpbal
