#include <mpbal/krylov.hpp>

#include <cmath>
#include <stdexcept>

namespace mpbal {

namespace
{

double
dot ( std::span< const double >  a, std::span< const double >  b, const Rounder &  rnd )
{
    double  s = 0.0;

    for ( std::size_t  i = 0; i < a.size(); ++i )
        s = rnd( s + rnd( a[i] * b[i] ) );

    return s;
}

// y <- y + alpha x
void
axpy ( double  alpha, std::span< const double >  x, std::span< double >  y, const Rounder &  rnd )
{
    for ( std::size_t  i = 0; i < y.size(); ++i )
        y[i] = rnd( y[i] + rnd( alpha * x[i] ) );
}

Vector
apply_precond ( const LinearOperator &  op, Vector  v )
{
    return op.precond ? op.precond( v ) : v;
}

}// namespace anonymous

GmresResult
gmres ( const LinearOperator &  op, std::span< const double >  rhs, double  tol, std::size_t  maxit,
        const PrecisionContext &  ctx )
{
    const std::size_t  n = op.n;

    if ( n == 0 || rhs.size() != n )
        throw std::invalid_argument( "gmres: dimension mismatch" );
    if ( ! ( tol > 0.0 ) )
        throw std::invalid_argument( "gmres: tol must be positive" );

    if ( maxit == 0 || maxit > n )
        maxit = n;

    const Rounder  rnd( ctx.fmt );
    GmresResult    res;

    res.x.assign( n, 0.0 );

    Vector  r0( rhs.begin(), rhs.end() );

    for ( auto &  v : r0 )
        v = rnd( v );

    r0 = apply_precond( op, std::move( r0 ) );

    const double  beta = norm2( r0, ctx );

    res.report.relative_residual_history.push_back( beta == 0.0 ? 0.0 : 1.0 );

    if ( beta == 0.0 )
    {
        res.report.converged = true;
        return res;
    }

    std::vector< Vector >  V;                      // Krylov basis
    DenseMatrix            H( maxit + 1, maxit );  // Hessenberg, rotated in place to R
    Vector                 cs( maxit ), sn( maxit ), g( maxit + 1, 0.0 );

    V.reserve( maxit + 1 );
    V.emplace_back( n );

    for ( std::size_t  i = 0; i < n; ++i )
        V[0][i] = rnd( r0[i] / beta );

    g[0] = beta;

    std::size_t  k = 0;

    while ( k < maxit )
    {
        Vector  w = apply_precond( op, op.apply( V[k] ) );

        for ( auto &  v : w )
            v = rnd( v );

        // modified Gram-Schmidt
        for ( std::size_t  i = 0; i <= k; ++i )
        {
            H( i, k ) = dot( V[i], w, rnd );
            axpy( -H( i, k ), V[i], w, rnd );
        }

        const double  hnext = norm2( w, ctx );

        H( k + 1, k ) = hnext;

        // previous rotations on the new column
        for ( std::size_t  i = 0; i < k; ++i )
        {
            const double  a = H( i, k ), b = H( i + 1, k );

            H( i, k )     = rnd( rnd( cs[i] * a ) + rnd( sn[i] * b ) );
            H( i + 1, k ) = rnd( rnd( -sn[i] * a ) + rnd( cs[i] * b ) );
        }

        // new rotation zeroing H(k+1,k)
        {
            const double  a = H( k, k ), b = H( k + 1, k );
            const double  d = rnd( std::hypot( a, b ) );

            if ( d == 0.0 )
            {
                cs[k] = 1.0;
                sn[k] = 0.0;
            }
            else
            {
                cs[k] = rnd( a / d );
                sn[k] = rnd( b / d );
            }

            H( k, k )     = d;
            H( k + 1, k ) = 0.0;
            g[k + 1]      = rnd( -sn[k] * g[k] );
            g[k]          = rnd( cs[k] * g[k] );
        }

        ++k;

        const double  rel = std::fabs( g[k] ) / beta;

        res.report.relative_residual_history.push_back( rel );

        if ( rel <= tol )
        {
            res.report.converged = true;
            break;
        }

        if ( hnext <= gmres_breakdown_floor )
        {
            // the Krylov space is invariant: the least-squares solution is exact
            res.report.breakdown = true;
            res.report.converged = rel <= std::max( tol, 10.0 * rnd.unit_roundoff() );
            break;
        }

        V.emplace_back( n );

        for ( std::size_t  i = 0; i < n; ++i )
            V[k][i] = rnd( w[i] / hnext );
    }

    res.report.iterations = k;

    // back substitution R y = g
    Vector  y( k, 0.0 );

    for ( std::size_t  ii = k; ii-- > 0; )
    {
        double  s = g[ii];

        for ( std::size_t  j = ii + 1; j < k; ++j )
            s = rnd( s - rnd( H( ii, j ) * y[j] ) );

        y[ii] = H( ii, ii ) == 0.0 ? 0.0 : rnd( s / H( ii, ii ) );
    }

    for ( std::size_t  j = 0; j < k; ++j )
        axpy( y[j], V[j], res.x, rnd );

    return res;
}

Vector
spmv ( const SparseMatrixCSC &  A, std::span< const double >  x, const PrecisionContext &  ctx )
{
    const Rounder  rnd( ctx.fmt );

    if ( rnd.native() )
        return A.multiply( x );

    if ( x.size() != A.cols() )
        throw std::invalid_argument( "spmv: dimension mismatch" );

    Vector               y( A.rows(), 0.0 );
    std::vector< bool >  touched( A.rows(), false );

    for ( std::size_t  j = 0; j < A.cols(); ++j )
    {
        const auto  rows = A.col_rows( j );
        const auto  vals = A.col_values( j );

        for ( std::size_t  p = 0; p < rows.size(); ++p )
        {
            const auto    i    = rows[p];
            const double  prod = rnd( vals[p] * x[j] );

            y[i]       = touched[i] ? rnd( y[i] + prod ) : prod;
            touched[i] = true;
        }
    }

    return y;
}

LinearOperator
make_operator ( const SparseMatrixCSC &  A, const PrecisionContext &  ctx )
{
    if ( A.rows() != A.cols() )
        throw std::invalid_argument( "make_operator: matrix must be square" );

    return { A.rows(), [&A, ctx] ( std::span< const double >  v ) { return spmv( A, v, ctx ); }, {} };
}

VectorMap
lu_preconditioner ( const LuFactors &  f, const PrecisionContext &  ctx )
{
    return [&f, ctx] ( std::span< const double >  v ) { return lu_solve( f, v, ctx ); };
}

VectorMap
sparse_preconditioner ( const SparseMatrixCSC &  M, const PrecisionContext &  ctx )
{
    return [&M, ctx] ( std::span< const double >  v ) { return spmv( M, v, ctx ); };
}

}// namespace mpbal
