#pragma once
//
// Sparse approximate inverse M ~ A^-1 built column by column in a low
// precision u_s (Grote-Huckle pattern adaptation).
//

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include <mpbal/densela.hpp>
#include <mpbal/sparse.hpp>

namespace mpbal {

// per-column sorted row indices
using SparsityPattern = std::vector< std::vector< std::size_t > >;

struct SpaiConfig
{
    double       tau                      = 0.1;
    FloatFormat  u_s                      = fp32();
    std::size_t  max_pattern_growth_steps = 10;
    std::size_t  candidates_per_step      = 5;
    std::size_t  max_nnz_per_column       = 50;

    // throws ConfigError
    void  validate () const;
};

enum class SpaiFailure : std::uint8_t { none, no_candidates, qr_breakdown, caps_reached, nonfinite };

const char *  to_string ( SpaiFailure  f );

struct SpaiColumn
{
    std::vector< std::size_t >  rows;       // pattern of m_k
    Vector                      values;     // m_k on the pattern, representable in u_s
    double                      residual  = 0.0;    // ||e_k - A m_k||_2 as computed in u_s
    std::vector< double >       residual_history;   // one entry per least-squares solve
    std::size_t                 growth_steps = 0;
    bool                        success   = false;
    SpaiFailure                 failure   = SpaiFailure::none;
};

struct SpaiResult
{
    SparseMatrixCSC          M;
    std::vector< double >    residuals;
    std::vector< bool >      success;
    std::vector< SpaiFailure >  failures;
    RoundingEvents           events;        // from rounding A to u_s

    std::size_t  failed_columns () const;
};

//
// As is A rounded to u_s and AsT its transpose. Pure: columns may be built in
// any order or concurrently.
//
SpaiColumn  spai_column ( const SparseMatrixCSC &  As, const SparseMatrixCSC &  AsT,
                          std::size_t  k, const SpaiConfig &  cfg );

SpaiResult  spai_build  ( const SparseMatrixCSC &  A, const SpaiConfig &  cfg );

//
// candidate indices j not in J with A(i,j) != 0 for some i where r_i != 0
// (r is a dense length-n residual), sorted ascending
//
std::vector< std::size_t >  spai_candidates ( const SparseMatrixCSC &  AT, std::span< const std::size_t >  J,
                                              std::span< const double >  r );

// one-dimensional residual estimate rho_j^2 = ||r||^2 - (r^T A e_j)^2 / ||A e_j||^2, arithmetic in ctx
double  spai_rho2 ( const SparseMatrixCSC &  A, std::size_t  j, std::span< const double >  r,
                    const PrecisionContext &  ctx );

//
// J extended by up to s candidates with the smallest rho_j^2 (ties by index),
// returned sorted; throws NoCandidates when the residual support yields none
//
std::vector< std::size_t >  pattern_grow ( const SparseMatrixCSC &  A, const SparseMatrixCSC &  AT,
                                           std::span< const std::size_t >  J, std::span< const double >  r,
                                           std::size_t  s, const PrecisionContext &  ctx );

struct SpaiFeasibility
{
    bool    heuristic_ok;       // u_s * cond2_abs(A) <= tau
    double  cond2_abs_value;
    double  heuristic_value;    // u_s * cond2_abs(A)
    double  rigorous_lhs;       // max_k n^3 u_s || |e_k| + |A||m_k| ||_2, NaN without M
};

// dense diagnostics, n limited by dense_cap()
SpaiFeasibility  spai_feasibility ( const SparseMatrixCSC &  A, const FloatFormat &  u_s, double  tau,
                                    const SparseMatrixCSC *  M = nullptr );

struct PosterioriCheck
{
    std::size_t  checked    = 0;
    std::size_t  violations = 0;
    double       max_ratio  = 0.0;   // max over checked columns of lhs / rhs
};

//
// for every successful column: ||e_k - A m_k||_2 <= tau + n^3 u_s || |e_k| + |A||m_k| ||_2
// evaluated in fp64 with the unrounded A
//
PosterioriCheck  spai_posteriori_check ( const SparseMatrixCSC &  A, const SpaiResult &  res,
                                         double  tau, const FloatFormat &  u_s );

}// namespace mpbal
