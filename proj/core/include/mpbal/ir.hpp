#pragma once
//
// Three-precision iterative refinement with a pluggable correction solver,
// and the error metrics used to trace it.
//

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <mpbal/dense.hpp>
#include <mpbal/fpemu.hpp>
#include <mpbal/spai.hpp>
#include <mpbal/sparse.hpp>

namespace mpbal {

// factorization, working and residual precisions; u_r <= u <= u_f by unit roundoff
struct PrecisionTriple
{
    FloatFormat  u_f = fp64();
    FloatFormat  u   = fp64();
    FloatFormat  u_r = fp64();

    // throws ConfigError when the ordering is violated
    void  validate () const;
};

enum class CorrectionSolver { lu_direct, gmres_lu, gmres_spai };

const char *      to_string        ( CorrectionSolver  s );
CorrectionSolver  parse_solver     ( std::string_view  name );

struct SolverParams
{
    double                        gmres_tol   = 1e-6;
    std::size_t                   gmres_maxit = 0;         // 0: n
    SpaiConfig                    spai;                    // spai.u_s is overridden by u_s_override or u_f
    std::optional< FloatFormat >  u_s;                     // SPAI precision, defaults to triple.u_f
};

struct StepRecord
{
    std::size_t  step             = 0;
    double       ferr             = 0.0;
    double       nbe              = 0.0;
    double       cbe              = 0.0;
    std::size_t  inner_iterations = 0;   // GMRES iterations spent producing this iterate
};

enum class RefineStatus { converged, max_iterations, no_progress };

const char *  to_string ( RefineStatus  s );

struct RefinementTrace
{
    std::vector< StepRecord >  steps;
    RefineStatus               status      = RefineStatus::max_iterations;
    bool                       converged   = false;
    std::size_t                precond_nnz = 0;     // nnz(L+U) or nnz(M); 0 for LU-direct without GMRES
    std::size_t                spai_failed_columns = 0;

    std::size_t  total_inner_iterations () const;
};

struct RefineResult
{
    Vector           x;
    RefinementTrace  trace;
};

//
// x_0 from the u_f factorization (or SPAI-preconditioned GMRES), then
// r_i = b - A x_i in u_r, correction solve, x_{i+1} = x_i + d_i in u.
// Stops when nbe <= n u and the correction is negligible or no longer
// contracting, when nbe fails to improve for 3 steps (no_progress), or at maxit.
// x_ref defaults to reference_solution(A, b).
//
RefineResult  refine ( const SparseMatrixCSC &  A, std::span< const double >  b,
                       const PrecisionTriple &  triple, CorrectionSolver  solver,
                       const SolverParams &  params = {}, std::size_t  maxit = 20,
                       const Vector *  x_ref = nullptr );

struct WilkinsonCheck
{
    bool    satisfied;   // value < 1
    double  value;       // 3 n u kappa_inf(A)
};

WilkinsonCheck  wilkinson_criterion ( const DenseMatrix &  A, const FloatFormat &  u );
WilkinsonCheck  wilkinson_criterion ( std::size_t  n, double  kappa_inf, const FloatFormat &  u );

struct ErrorMetrics
{
    double  ferr;
    double  nbe;
    double  cbe;
};

// residuals evaluated with compensated dot products
ErrorMetrics  error_metrics ( const SparseMatrixCSC &  A, std::span< const double >  b,
                              std::span< const double >  x, std::span< const double >  x_ref );

// b - A x with compensated accumulation per row
Vector        residual_compensated ( const SparseMatrixCSC &  A, std::span< const double >  b,
                                     std::span< const double >  x );

// fp64 LU solve plus 3 refinement steps with compensated residuals
Vector        reference_solution ( const SparseMatrixCSC &  A, std::span< const double >  b );

}// namespace mpbal
