#pragma once
//
// Left-preconditioned GMRES (modified Gram-Schmidt Arnoldi, no restart).
//

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <mpbal/dense.hpp>
#include <mpbal/densela.hpp>
#include <mpbal/sparse.hpp>

namespace mpbal {

using VectorMap = std::function< Vector ( std::span< const double > ) >;

struct LinearOperator
{
    std::size_t  n = 0;
    VectorMap    apply;        // v -> A v
    VectorMap    precond;      // v -> M v; empty means M = I
};

struct GmresReport
{
    std::size_t            iterations = 0;
    std::vector< double >  relative_residual_history;   // ||M(b - A x_j)|| / ||M b||, entry 0 is 1
    bool                   converged  = false;
    bool                   breakdown  = false;          // happy breakdown ended the iteration
};

struct GmresResult
{
    Vector       x;
    GmresReport  report;
};

// subdiagonal Arnoldi entries at or below this end the iteration
inline constexpr double  gmres_breakdown_floor = 1e-300;

//
// Solves M A x = M b from x0 = 0 with every inner vector operation rounded to
// ctx. op.apply and op.precond are responsible for their own precision.
// maxit = 0 means n. converged = false is returned, not raised.
//
GmresResult  gmres ( const LinearOperator &  op, std::span< const double >  rhs,
                     double  tol, std::size_t  maxit, const PrecisionContext &  ctx );

// y = A x with each product and each sum rounded to ctx (column order)
Vector  spmv ( const SparseMatrixCSC &  A, std::span< const double >  x, const PrecisionContext &  ctx );

// operator wrappers; the callables keep references to their matrix arguments
LinearOperator  make_operator ( const SparseMatrixCSC &  A, const PrecisionContext &  ctx );
// M v = U^-1 L^-1 P v, factors as stored, substitution arithmetic in ctx
VectorMap       lu_preconditioner   ( const LuFactors &  f, const PrecisionContext &  ctx );
VectorMap       sparse_preconditioner ( const SparseMatrixCSC &  M, const PrecisionContext &  ctx );

}// namespace mpbal
