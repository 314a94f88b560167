#include <mpbal/ir.hpp>
#include <mpbal/densela.hpp>
#include <mpbal/errors.hpp>
#include <mpbal/krylov.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

namespace mpbal {

void
PrecisionTriple::validate () const
{
    if ( !( u_r.unit_roundoff() <= u.unit_roundoff() && u.unit_roundoff() <= u_f.unit_roundoff() ) )
        throw ConfigError( "precision triple must satisfy u_r <= u <= u_f (got u_f=" + u_f.name +
                           ", u=" + u.name + ", u_r=" + u_r.name + ")" );
}

const char *
to_string ( CorrectionSolver  s )
{
    switch ( s )
    {
        case CorrectionSolver::lu_direct:  return "lu-direct";
        case CorrectionSolver::gmres_lu:   return "gmres-lu";
        case CorrectionSolver::gmres_spai: return "gmres-spai";
    }
    return "unknown";
}

CorrectionSolver
parse_solver ( std::string_view  name )
{
    std::string  s( name );

    std::transform( s.begin(), s.end(), s.begin(), [] ( unsigned char  c ) { return char( std::tolower( c ) ); } );

    if ( s == "lu" || s == "lu-direct" )
        return CorrectionSolver::lu_direct;
    if ( s == "gmres-lu" )
        return CorrectionSolver::gmres_lu;
    if ( s == "gmres-spai" || s == "spai" )
        return CorrectionSolver::gmres_spai;

    throw ConfigError( "unknown solver '" + std::string( name ) + "' (expected lu-direct, gmres-lu or gmres-spai)" );
}

const char *
to_string ( RefineStatus  s )
{
    switch ( s )
    {
        case RefineStatus::converged:      return "converged";
        case RefineStatus::max_iterations: return "max_iterations";
        case RefineStatus::no_progress:    return "no_progress";
    }
    return "unknown";
}

std::size_t
RefinementTrace::total_inner_iterations () const
{
    std::size_t  s = 0;

    for ( const auto &  r : steps )
        s += r.inner_iterations;

    return s;
}

////////////////////////////////////////////////////////////////////////////////
//
// compensated residuals and metrics
//
////////////////////////////////////////////////////////////////////////////////

namespace
{

// error-free transformations
inline void
two_sum ( double  a, double  b, double &  s, double &  e )
{
    s = a + b;

    const double  z = s - a;

    e = ( a - ( s - z ) ) + ( b - z );
}

inline void
two_prod ( double  a, double  b, double &  p, double &  e )
{
    p = a * b;
    e = std::fma( a, b, -p );
}

Vector
residual_rows ( const SparseMatrixCSC &  AT, std::span< const double >  b, std::span< const double >  x )
{
    Vector  r( AT.cols() );

    for ( std::size_t  i = 0; i < AT.cols(); ++i )
    {
        const auto  cols = AT.col_rows( i );
        const auto  vals = AT.col_values( i );
        double      s    = b[i];
        double      c    = 0.0;

        for ( std::size_t  p = 0; p < cols.size(); ++p )
        {
            double  h, e1, e2;

            two_prod( vals[p], x[ cols[p] ], h, e1 );
            two_sum( s, -h, s, e2 );
            c += e2 - e1;
        }

        r[i] = s + c;
    }

    return r;
}

Vector
reference_solve ( const SparseMatrixCSC &  A, const SparseMatrixCSC &  AT, const LuFactors &  F,
                  std::span< const double >  b )
{
    auto  x = lu_solve( F, b, {} );

    for ( int  it = 0; it < 3; ++it )
    {
        const auto  r = residual_rows( AT, b, x );
        const auto  d = lu_solve( F, r, {} );

        for ( std::size_t  i = 0; i < x.size(); ++i )
            x[i] += d[i];
    }

    (void) A;
    return x;
}

}// namespace anonymous

Vector
residual_compensated ( const SparseMatrixCSC &  A, std::span< const double >  b, std::span< const double >  x )
{
    if ( b.size() != A.rows() || x.size() != A.cols() )
        throw std::invalid_argument( "residual_compensated: dimension mismatch" );

    return residual_rows( A.transposed(), b, x );
}

ErrorMetrics
error_metrics ( const SparseMatrixCSC &  A, std::span< const double >  b, std::span< const double >  x,
                std::span< const double >  x_ref )
{
    const auto  r  = residual_compensated( A, b, x );
    const auto  ax = A.abs_multiply( x );

    ErrorMetrics  m{};

    double  dmax = 0.0;

    for ( std::size_t  i = 0; i < x.size(); ++i )
        dmax = std::max( dmax, std::fabs( x[i] - x_ref[i] ) );

    const double  xr = norm_inf( x_ref );

    m.ferr = xr == 0.0 ? ( dmax == 0.0 ? 0.0 : std::numeric_limits< double >::infinity() ) : dmax / xr;

    const double  den = norm_inf( A ) * norm_inf( x ) + norm_inf( b );
    const double  rn  = norm_inf( r );

    m.nbe = den == 0.0 ? ( rn == 0.0 ? 0.0 : std::numeric_limits< double >::infinity() ) : rn / den;

    m.cbe = 0.0;

    for ( std::size_t  i = 0; i < r.size(); ++i )
    {
        const double  num = std::fabs( r[i] );
        const double  d   = ax[i] + std::fabs( b[i] );

        if ( num == 0.0 )
            continue;       // 0/0 counts as 0

        m.cbe = std::max( m.cbe, d == 0.0 ? std::numeric_limits< double >::infinity() : num / d );
    }

    if ( ! std::isfinite( norm_inf( x ) ) )
        m.ferr = m.nbe = m.cbe = std::numeric_limits< double >::infinity();

    return m;
}

Vector
reference_solution ( const SparseMatrixCSC &  A, std::span< const double >  b )
{
    if ( A.rows() != A.cols() || b.size() != A.rows() )
        throw std::invalid_argument( "reference_solution: dimension mismatch" );

    const auto  F = lu_factor( A.to_dense(), {} );

    return reference_solve( A, A.transposed(), F, b );
}

WilkinsonCheck
wilkinson_criterion ( std::size_t  n, double  kappa_inf, const FloatFormat &  u )
{
    const double  v = 3.0 * double( n ) * u.unit_roundoff() * kappa_inf;

    return { v < 1.0, v };
}

WilkinsonCheck
wilkinson_criterion ( const DenseMatrix &  A, const FloatFormat &  u )
{
    return wilkinson_criterion( A.rows(), cond_inf( A ), u );
}

////////////////////////////////////////////////////////////////////////////////
//
// refinement
//
////////////////////////////////////////////////////////////////////////////////

RefineResult
refine ( const SparseMatrixCSC &  A, std::span< const double >  b, const PrecisionTriple &  triple,
         CorrectionSolver  solver, const SolverParams &  params, std::size_t  maxit, const Vector *  x_ref )
{
    triple.validate();

    const std::size_t  n = A.rows();

    if ( A.cols() != n || b.size() != n )
        throw ConfigError( "refine: A must be square and match b" );
    if ( maxit == 0 )
        throw ConfigError( "refine: maxit must be at least 1" );
    if ( n > dense_cap() )
        throw ConfigError( "refine: n = " + std::to_string( n ) + " exceeds the dense cap; raise MPBAL_DENSE_CAP" );

    const PrecisionContext  ctx_f{ triple.u_f }, ctx_u{ triple.u }, ctx_r{ triple.u_r };
    const Rounder           rnd_u( triple.u ), rnd_r( triple.u_r );
    const double            u = triple.u.unit_roundoff();

    Vector  xref_local;

    if ( ! x_ref )
    {
        xref_local = reference_solution( A, b );
        x_ref      = &xref_local;
    }

    RefineResult  res;
    auto &        trace = res.trace;

    const auto  Au = round_matrix( A, triple.u ).matrix;
    const auto  op_base = make_operator( Au, ctx_u );

    std::optional< LuFactors >        F;
    std::optional< SparseMatrixCSC >  M;
    LinearOperator                    op = op_base;
    std::size_t                       inner = 0;
    Vector &                          x = res.x;

    if ( solver == CorrectionSolver::gmres_spai )
    {
        auto  cfg = params.spai;

        cfg.u_s = params.u_s.value_or( triple.u_f );

        auto  s = spai_build( A, cfg );

        trace.spai_failed_columns = s.failed_columns();
        M                         = std::move( s.M );
        trace.precond_nnz         = M->nnz();
        op.precond                = sparse_preconditioner( *M, ctx_u );

        Vector  bu( b.begin(), b.end() );

        for ( auto &  v : bu )
            v = rnd_u( v );

        auto  g = gmres( op, bu, params.gmres_tol, params.gmres_maxit, ctx_u );

        x     = std::move( g.x );
        inner = g.report.iterations;
    }
    else
    {
        F                 = lu_factor( A.to_dense(), ctx_f );
        trace.precond_nnz = lu_nnz( *F );
        x                 = lu_solve( *F, b, ctx_f );

        if ( solver == CorrectionSolver::gmres_lu )
            op.precond = lu_preconditioner( *F, ctx_u );
    }

    for ( auto &  v : x )
        v = rnd_u( v );

    double       best_nbe   = std::numeric_limits< double >::infinity();
    std::size_t  stalled    = 0;
    double       prev_dnorm = -1.0;

    for ( std::size_t  i = 0; ; ++i )
    {
        const auto  m = error_metrics( A, b, x, *x_ref );

        trace.steps.push_back( { i, m.ferr, m.nbe, m.cbe, inner } );

        if ( ! std::isfinite( m.nbe ) )
        {
            trace.status = RefineStatus::no_progress;
            break;
        }

        if ( m.nbe > double( n ) * u )
        {
            stalled  = m.nbe < 0.5 * best_nbe ? 0 : stalled + 1;
            best_nbe = std::min( best_nbe, m.nbe );

            if ( stalled >= 3 )
            {
                trace.status = RefineStatus::no_progress;
                break;
            }
        }

        if ( i == maxit )
        {
            trace.status = RefineStatus::max_iterations;
            break;
        }

        // r = b - A x in u_r, stored in u
        auto  r = spmv( A, x, ctx_r );

        for ( std::size_t  k = 0; k < n; ++k )
            r[k] = rnd_u( rnd_r( b[k] - r[k] ) );

        Vector  d;

        inner = 0;

        if ( solver == CorrectionSolver::lu_direct )
        {
            // scale into range before the low-precision substitution
            const double  s = norm_inf( r );

            if ( s == 0.0 )
                d.assign( n, 0.0 );
            else
            {
                for ( auto &  v : r )
                    v /= s;

                d = lu_solve( *F, r, ctx_f );

                for ( auto &  v : d )
                    v = rnd_u( v * s );
            }
        }
        else
        {
            auto  g = gmres( op, r, params.gmres_tol, params.gmres_maxit, ctx_u );

            d     = std::move( g.x );
            inner = g.report.iterations;
        }

        const double  dnorm = norm_inf( d );
        const double  xnorm = norm_inf( x );
        const bool    small = dnorm <= 2.0 * u * xnorm;
        const bool    flat  = prev_dnorm >= 0.0 && dnorm > 0.5 * prev_dnorm;

        if ( m.nbe <= double( n ) * u && ( small || flat ) )
        {
            trace.status    = RefineStatus::converged;
            trace.converged = true;
            break;
        }

        prev_dnorm = dnorm;

        for ( std::size_t  k = 0; k < n; ++k )
            x[k] = rnd_u( x[k] + d[k] );
    }

    return res;
}

}// namespace mpbal
