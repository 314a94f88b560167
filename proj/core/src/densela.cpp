#include <mpbal/densela.hpp>
#include <mpbal/errors.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <random>
#include <string>

namespace mpbal {

namespace
{

constexpr double  eps64 = std::numeric_limits< double >::epsilon();

void
require_square ( const DenseMatrix &  A, const char *  what )
{
    if ( ! A.square() )
        throw std::invalid_argument( std::string( what ) + ": matrix must be square" );
}

}// namespace anonymous

DenseMatrix
matmul ( const DenseMatrix &  A, const DenseMatrix &  B, const PrecisionContext &  ctx, RoundingEvents *  events )
{
    if ( A.cols() != B.rows() )
        throw std::invalid_argument( "matmul: inner dimensions differ" );

    const Rounder   rnd( ctx.fmt );
    RoundingEvents  ev;
    DenseMatrix     C( A.rows(), B.cols() );

    if ( rnd.native() )
        C = multiply( A, B );
    else
    {
        // c_ij accumulates p = 0, 1, ... in order, every product and sum rounded
        for ( std::size_t  j = 0; j < B.cols(); ++j )
        {
            auto  c = C.col( j );

            for ( std::size_t  p = 0; p < A.cols(); ++p )
            {
                const double  b = B( p, j );
                auto          a = A.col( p );

                if ( p == 0 )
                {
                    for ( std::size_t  i = 0; i < c.size(); ++i )
                        c[i] = rnd( a[i] * b, ev );
                }
                else
                {
                    for ( std::size_t  i = 0; i < c.size(); ++i )
                        c[i] = rnd( c[i] + rnd( a[i] * b, ev ), ev );
                }
            }
        }
    }

    if ( events )
        *events += ev;

    return C;
}

Vector
matvec ( const DenseMatrix &  A, std::span< const double >  x, const PrecisionContext &  ctx, RoundingEvents *  events )
{
    DenseMatrix  X( x.size(), 1 );

    std::copy( x.begin(), x.end(), X.col( 0 ).begin() );

    const auto  Y = matmul( A, X, ctx, events );

    return Vector( Y.col( 0 ).begin(), Y.col( 0 ).end() );
}

double
norm2 ( std::span< const double >  x, const PrecisionContext &  ctx )
{
    const Rounder  rnd( ctx.fmt );

    if ( rnd.native() )
        return norm_two( x );

    double  s = 0.0;

    for ( double  v : x )
        s = rnd( s + rnd( v * v ) );

    return rnd( std::sqrt( s ) );
}

////////////////////////////////////////////////////////////////////////////////
//
// LU
//
////////////////////////////////////////////////////////////////////////////////

LuFactors
lu_factor ( const DenseMatrix &  A, const PrecisionContext &  ctx, RoundingEvents *  events )
{
    require_square( A, "lu_factor" );

    const std::size_t  n = A.rows();
    const Rounder      rnd( ctx.fmt );
    RoundingEvents     ev;
    LuFactors          f{ A, std::vector< std::size_t >( n ), ctx.fmt };
    auto &             LU = f.lu;

    std::iota( f.perm.begin(), f.perm.end(), std::size_t( 0 ) );

    // factors live in the factorization precision
    if ( ! rnd.native() )
        for ( auto &  v : LU.values() )
            v = rnd( v, ev );

    for ( std::size_t  k = 0; k < n; ++k )
    {
        auto         ck  = LU.col( k );
        std::size_t  piv = k;

        for ( std::size_t  i = k + 1; i < n; ++i )
            if ( std::fabs( ck[i] ) > std::fabs( ck[piv] ) )
                piv = i;

        if ( ck[piv] == 0.0 || ! std::isfinite( ck[piv] ) )
            throw SingularPivot( "lu_factor: zero pivot in column " + std::to_string( k ) );

        if ( piv != k )
        {
            std::swap( f.perm[k], f.perm[piv] );

            for ( std::size_t  j = 0; j < n; ++j )
                std::swap( LU( k, j ), LU( piv, j ) );
        }

        const double  pivot = ck[k];

        for ( std::size_t  i = k + 1; i < n; ++i )
            ck[i] = rnd( ck[i] / pivot, ev );

        for ( std::size_t  j = k + 1; j < n; ++j )
        {
            auto          cj  = LU.col( j );
            const double  ukj = cj[k];

            if ( ukj == 0.0 )
                continue;

            for ( std::size_t  i = k + 1; i < n; ++i )
                cj[i] = rnd( cj[i] - rnd( ck[i] * ukj, ev ), ev );
        }
    }

    if ( events )
        *events += ev;

    return f;
}

Vector
lu_solve ( const LuFactors &  f, std::span< const double >  b, const PrecisionContext &  ctx )
{
    const std::size_t  n = f.n();

    if ( b.size() != n )
        throw std::invalid_argument( "lu_solve: dimension mismatch" );

    const Rounder  rnd( ctx.fmt );
    Vector         y( n );

    for ( std::size_t  i = 0; i < n; ++i )
        y[i] = rnd( b[ f.perm[i] ] );

    // forward, unit lower
    for ( std::size_t  j = 0; j < n; ++j )
    {
        const double  yj = y[j];

        if ( yj == 0.0 )
            continue;

        auto  c = f.lu.col( j );

        for ( std::size_t  i = j + 1; i < n; ++i )
            y[i] = rnd( y[i] - rnd( c[i] * yj ) );
    }

    // backward, upper
    for ( std::size_t  jj = n; jj-- > 0; )
    {
        auto  c = f.lu.col( jj );

        if ( c[jj] == 0.0 )
            throw SingularPivot( "lu_solve: zero diagonal" );

        y[jj] = rnd( y[jj] / c[jj] );

        const double  yj = y[jj];

        if ( yj == 0.0 )
            continue;

        for ( std::size_t  i = 0; i < jj; ++i )
            y[i] = rnd( y[i] - rnd( c[i] * yj ) );
    }

    return y;
}

DenseMatrix
lu_lower ( const LuFactors &  f )
{
    const std::size_t  n = f.n();
    DenseMatrix        L( n, n );

    for ( std::size_t  j = 0; j < n; ++j )
    {
        L( j, j ) = 1.0;

        for ( std::size_t  i = j + 1; i < n; ++i )
            L( i, j ) = f.lu( i, j );
    }

    return L;
}

DenseMatrix
lu_upper ( const LuFactors &  f )
{
    const std::size_t  n = f.n();
    DenseMatrix        U( n, n );

    for ( std::size_t  j = 0; j < n; ++j )
        for ( std::size_t  i = 0; i <= j; ++i )
            U( i, j ) = f.lu( i, j );

    return U;
}

DenseMatrix
permute_rows ( const DenseMatrix &  A, std::span< const std::size_t >  perm )
{
    DenseMatrix  P( A.rows(), A.cols() );

    for ( std::size_t  j = 0; j < A.cols(); ++j )
        for ( std::size_t  i = 0; i < A.rows(); ++i )
            P( i, j ) = A( perm[i], j );

    return P;
}

std::size_t
lu_nnz ( const LuFactors &  f )
{
    const std::size_t  n   = f.n();
    std::size_t        nnz = 0;

    for ( std::size_t  j = 0; j < n; ++j )
        for ( std::size_t  i = 0; i < n; ++i )
            if ( i == j || f.lu( i, j ) != 0.0 )
                ++nnz;

    return nnz;
}

////////////////////////////////////////////////////////////////////////////////
//
// Householder QR
//
////////////////////////////////////////////////////////////////////////////////

QrFactors
qr_householder ( const DenseMatrix &  A, const PrecisionContext &  ctx, RoundingEvents *  events )
{
    const std::size_t  m = A.rows();
    const std::size_t  n = A.cols();

    if ( m < n )
        throw std::invalid_argument( "qr_householder: need rows >= cols" );

    const Rounder   rnd( ctx.fmt );
    RoundingEvents  ev;
    QrFactors       f{ A, Vector( n, 0.0 ), ctx.fmt };
    auto &          QR = f.qr;

    if ( ! rnd.native() )
        for ( auto &  v : QR.values() )
            v = rnd( v, ev );

    for ( std::size_t  j = 0; j < n; ++j )
    {
        auto    cj  = QR.col( j );
        bool    any = false;

        for ( std::size_t  i = j + 1; i < m; ++i )
            if ( cj[i] != 0.0 ) { any = true; break; }

        if ( ! any )
        {
            f.beta[j] = 0.0;                        // H_j = I
            continue;
        }

        const double  x0    = cj[j];
        const double  nrm   = norm2( cj.subspan( j ), ctx );
        const double  rjj   = x0 >= 0.0 ? -nrm : nrm;
        const double  tau   = rnd( rnd( rjj - x0, ev ) / rjj, ev );
        const double  denom = rnd( x0 - rjj, ev );

        for ( std::size_t  i = j + 1; i < m; ++i )
            cj[i] = rnd( cj[i] / denom, ev );

        cj[j]     = rjj;
        f.beta[j] = tau;

        // apply H_j to the trailing columns
        for ( std::size_t  k = j + 1; k < n; ++k )
        {
            auto    ck = QR.col( k );
            double  s  = ck[j];

            for ( std::size_t  i = j + 1; i < m; ++i )
                s = rnd( s + rnd( cj[i] * ck[i], ev ), ev );

            s = rnd( tau * s, ev );

            if ( s == 0.0 )
                continue;

            ck[j] = rnd( ck[j] - s, ev );

            for ( std::size_t  i = j + 1; i < m; ++i )
                ck[i] = rnd( ck[i] - rnd( s * cj[i], ev ), ev );
        }
    }

    if ( events )
        *events += ev;

    return f;
}

DenseMatrix
qr_r ( const QrFactors &  f )
{
    const std::size_t  n = f.qr.cols();
    DenseMatrix        R( n, n );

    for ( std::size_t  j = 0; j < n; ++j )
        for ( std::size_t  i = 0; i <= j; ++i )
            R( i, j ) = f.qr( i, j );

    return R;
}

namespace
{

// x <- H_j x
void
apply_reflector ( const QrFactors &  f, std::size_t  j, std::span< double >  x, const Rounder &  rnd )
{
    const double  tau = f.beta[j];

    if ( tau == 0.0 )
        return;

    auto    v = f.qr.col( j );
    double  s = x[j];

    for ( std::size_t  i = j + 1; i < x.size(); ++i )
        s = rnd( s + rnd( v[i] * x[i] ) );

    s = rnd( tau * s );

    if ( s == 0.0 )
        return;

    x[j] = rnd( x[j] - s );

    for ( std::size_t  i = j + 1; i < x.size(); ++i )
        x[i] = rnd( x[i] - rnd( s * v[i] ) );
}

}// namespace anonymous

DenseMatrix
qr_thin_q ( const QrFactors &  f, const PrecisionContext &  ctx )
{
    const std::size_t  m = f.qr.rows();
    const std::size_t  n = f.qr.cols();
    const Rounder      rnd( ctx.fmt );
    DenseMatrix        Q( m, n );

    for ( std::size_t  k = 0; k < n; ++k )
    {
        auto  q = Q.col( k );

        q[k] = 1.0;

        // reflectors H_j with j > k leave e_k untouched
        for ( std::size_t  jj = std::min( k + 1, n ); jj-- > 0; )
            apply_reflector( f, jj, q, rnd );
    }

    return Q;
}

void
qr_apply_qt ( const QrFactors &  f, std::span< double >  b, const PrecisionContext &  ctx )
{
    const Rounder  rnd( ctx.fmt );

    for ( std::size_t  j = 0; j < f.qr.cols(); ++j )
        apply_reflector( f, j, b, rnd );
}

Vector
qr_least_squares ( const QrFactors &  f, std::span< const double >  b, const PrecisionContext &  ctx )
{
    const std::size_t  m = f.qr.rows();
    const std::size_t  n = f.qr.cols();

    if ( b.size() != m )
        throw std::invalid_argument( "qr_least_squares: dimension mismatch" );

    const Rounder  rnd( ctx.fmt );
    Vector         c( b.begin(), b.end() );

    for ( auto &  v : c )
        v = rnd( v );

    qr_apply_qt( f, c, ctx );

    // R x = c(0:n)
    Vector  x( c.begin(), c.begin() + n );

    for ( std::size_t  ii = n; ii-- > 0; )
    {
        double  s = x[ii];

        for ( std::size_t  j = ii + 1; j < n; ++j )
            s = rnd( s - rnd( f.qr( ii, j ) * x[j] ) );

        const double  d = f.qr( ii, ii );

        if ( d == 0.0 )
            throw SingularPivot( "qr_least_squares: zero diagonal in R" );

        x[ii] = rnd( s / d );
    }

    return x;
}

////////////////////////////////////////////////////////////////////////////////
//
// Cholesky
//
////////////////////////////////////////////////////////////////////////////////

DenseMatrix
chol ( const DenseMatrix &  A, const PrecisionContext &  ctx, RoundingEvents *  events )
{
    require_square( A, "chol" );

    const std::size_t  n = A.rows();
    const Rounder      rnd( ctx.fmt );
    RoundingEvents     ev;
    DenseMatrix        C( n, n );

    for ( std::size_t  j = 0; j < n; ++j )
    {
        auto    cj = C.col( j );
        double  s  = rnd( A( j, j ), ev );

        for ( std::size_t  k = 0; k < j; ++k )
            s = rnd( s - rnd( cj[k] * cj[k], ev ), ev );

        if ( ! ( s > 0.0 ) || ! std::isfinite( s ) )
            throw NotPositiveDefinite( "chol: nonpositive pivot at " + std::to_string( j ) );

        const double  d = rnd( std::sqrt( s ), ev );

        cj[j] = d;

        for ( std::size_t  i = j + 1; i < n; ++i )
        {
            auto    ci = C.col( i );
            double  t  = rnd( A( j, i ), ev );

            for ( std::size_t  k = 0; k < j; ++k )
                t = rnd( t - rnd( cj[k] * ci[k], ev ), ev );

            ci[j] = rnd( t / d, ev );
        }
    }

    if ( events )
        *events += ev;

    return C;
}

////////////////////////////////////////////////////////////////////////////////
//
// triangular solves
//
////////////////////////////////////////////////////////////////////////////////

Vector
solve_triangular ( const DenseMatrix &  T, std::span< const double >  b,
                   Uplo  uplo, Trans  trans, const PrecisionContext &  ctx )
{
    require_square( T, "solve_triangular" );

    const std::size_t  n = T.rows();

    if ( b.size() != n )
        throw std::invalid_argument( "solve_triangular: dimension mismatch" );

    const Rounder  rnd( ctx.fmt );
    Vector         x( b.begin(), b.end() );

    for ( auto &  v : x )
        v = rnd( v );

    // effective lower <=> forward substitution
    const bool  forward = ( uplo == Uplo::lower ) == ( trans == Trans::no );

    auto  entry = [&] ( std::size_t  i, std::size_t  j ) { return trans == Trans::no ? T( i, j ) : T( j, i ); };

    for ( std::size_t  s = 0; s < n; ++s )
    {
        const std::size_t  i = forward ? s : n - 1 - s;
        double             r = x[i];

        if ( forward )
        {
            for ( std::size_t  j = 0; j < i; ++j )
                r = rnd( r - rnd( entry( i, j ) * x[j] ) );
        }
        else
        {
            for ( std::size_t  j = i + 1; j < n; ++j )
                r = rnd( r - rnd( entry( i, j ) * x[j] ) );
        }

        const double  d = T( i, i );

        if ( d == 0.0 )
            throw SingularPivot( "solve_triangular: zero diagonal at " + std::to_string( i ) );

        x[i] = rnd( r / d );
    }

    return x;
}

DenseMatrix
solve_triangular ( const DenseMatrix &  T, const DenseMatrix &  B,
                   Side  side, Uplo  uplo, Trans  trans, const PrecisionContext &  ctx )
{
    if ( side == Side::left )
    {
        DenseMatrix  X( B.rows(), B.cols() );

        for ( std::size_t  j = 0; j < B.cols(); ++j )
        {
            const auto  x = solve_triangular( T, B.col( j ), uplo, trans, ctx );

            std::copy( x.begin(), x.end(), X.col( j ).begin() );
        }

        return X;
    }

    // X op(T) = B  <=>  op(T)^T X^T = B^T
    const auto  flipped = trans == Trans::no ? Trans::yes : Trans::no;
    const auto  Bt      = B.transposed();
    DenseMatrix X( B.rows(), B.cols() );

    for ( std::size_t  i = 0; i < B.rows(); ++i )
    {
        const auto  x = solve_triangular( T, Bt.col( i ), uplo, flipped, ctx );

        for ( std::size_t  j = 0; j < x.size(); ++j )
            X( i, j ) = x[j];
    }

    return X;
}

////////////////////////////////////////////////////////////////////////////////
//
// one-sided Jacobi SVD
//
////////////////////////////////////////////////////////////////////////////////

namespace
{

double
dot ( std::span< const double >  a, std::span< const double >  b )
{
    double  s = 0.0;

    for ( std::size_t  i = 0; i < a.size(); ++i )
        s += a[i] * b[i];

    return s;
}

void
rotate ( std::span< double >  a, std::span< double >  b, double  c, double  s )
{
    for ( std::size_t  i = 0; i < a.size(); ++i )
    {
        const double  x = a[i];
        const double  y = b[i];

        a[i] = c * x - s * y;
        b[i] = s * x + c * y;
    }
}

// W (m x n, m >= n) -> orthogonal columns; returns sweep count
int
jacobi_orthogonalize ( DenseMatrix &  W, DenseMatrix *  V, int  max_sweeps )
{
    const std::size_t  n = W.cols();
    Vector             nrm( n );

    for ( int  sweep = 1; sweep <= max_sweeps; ++sweep )
    {
        bool  rotated = false;

        for ( std::size_t  j = 0; j < n; ++j )
            nrm[j] = dot( W.col( j ), W.col( j ) );

        for ( std::size_t  p = 0; p + 1 < n; ++p )
        {
            for ( std::size_t  q = p + 1; q < n; ++q )
            {
                const double  alpha = nrm[p];
                const double  beta  = nrm[q];

                if ( alpha == 0.0 || beta == 0.0 )
                    continue;

                const double  gamma = dot( W.col( p ), W.col( q ) );

                if ( std::fabs( gamma ) <= eps64 * std::sqrt( alpha ) * std::sqrt( beta ) )
                    continue;

                rotated = true;

                const double  zeta = ( beta - alpha ) / ( 2.0 * gamma );
                const double  t    = std::copysign( 1.0, zeta ) / ( std::fabs( zeta ) + std::hypot( 1.0, zeta ) );
                const double  c    = 1.0 / std::hypot( 1.0, t );
                const double  s    = c * t;

                rotate( W.col( p ), W.col( q ), c, s );

                if ( V )
                    rotate( V->col( p ), V->col( q ), c, s );

                nrm[p] = alpha - t * gamma;
                nrm[q] = beta  + t * gamma;
            }
        }

        if ( ! rotated )
            return sweep;
    }

    throw NoConvergence( "svd: one-sided Jacobi did not converge in " + std::to_string( max_sweeps ) + " sweeps" );
}

// fill zero columns of U (given by mask) with unit vectors orthogonal to the rest
void
complete_basis ( DenseMatrix &  U, const std::vector< bool > &  filled )
{
    const std::size_t  m = U.rows();
    std::size_t        e = 0;

    for ( std::size_t  j = 0; j < U.cols(); ++j )
    {
        if ( filled[j] )
            continue;

        for ( ; e < m; ++e )
        {
            Vector  v( m, 0.0 );

            v[e] = 1.0;

            // two passes of modified Gram-Schmidt
            for ( int  pass = 0; pass < 2; ++pass )
                for ( std::size_t  k = 0; k < U.cols(); ++k )
                {
                    if ( k == j || ( ! filled[k] && k > j ) )
                        continue;

                    const double  h = dot( U.col( k ), v );

                    for ( std::size_t  i = 0; i < m; ++i )
                        v[i] -= h * U( i, k );
                }

            const double  nv = norm_two( v );

            if ( nv > 0.5 )
            {
                for ( std::size_t  i = 0; i < m; ++i )
                    U( i, j ) = v[i] / nv;
                ++e;
                break;
            }
        }
    }
}

}// namespace anonymous

SvdResult
svd ( const DenseMatrix &  A, const SvdOptions &  opts )
{
    const std::size_t  m = A.rows();
    const std::size_t  n = A.cols();

    if ( m < n )
    {
        auto  r = svd( A.transposed(), SvdOptions{ opts.max_sweeps, true } );

        return { std::move( r.V ), std::move( r.sigma ), std::move( r.U ) };
    }

    SvdResult  res;

    if ( n == 0 )
    {
        res.U = DenseMatrix( m, 0 );
        res.V = DenseMatrix( 0, 0 );
        return res;
    }

    // for tall matrices orthogonalize the triangular factor instead
    const bool   precondition = m > n + n / 4;
    QrFactors    qrf;
    DenseMatrix  W;

    if ( precondition )
    {
        qrf = qr_householder( A, PrecisionContext{} );
        W   = qr_r( qrf );
    }
    else
        W = A;

    DenseMatrix  V;

    if ( opts.compute_v )
        V = DenseMatrix::identity( n );

    jacobi_orthogonalize( W, opts.compute_v ? &V : nullptr, opts.max_sweeps );

    Vector                      sig( n );
    std::vector< std::size_t >  order( n );

    for ( std::size_t  j = 0; j < n; ++j )
        sig[j] = norm_two( W.col( j ) );

    std::iota( order.begin(), order.end(), std::size_t( 0 ) );
    std::stable_sort( order.begin(), order.end(), [&] ( auto  a, auto  b ) { return sig[a] > sig[b]; } );

    DenseMatrix         UW( W.rows(), n );
    std::vector< bool > filled( n, false );

    res.sigma.resize( n );

    if ( opts.compute_v )
        res.V = DenseMatrix( n, n );

    for ( std::size_t  k = 0; k < n; ++k )
    {
        const auto  j = order[k];

        res.sigma[k] = sig[j];

        if ( sig[j] > 0.0 )
        {
            for ( std::size_t  i = 0; i < W.rows(); ++i )
                UW( i, k ) = W( i, j ) / sig[j];
            filled[k] = true;
        }

        if ( opts.compute_v )
            std::copy( V.col( j ).begin(), V.col( j ).end(), res.V.col( k ).begin() );
    }

    complete_basis( UW, filled );

    if ( precondition )
    {
        // U = Q_thin * UW
        res.U = multiply( qr_thin_q( qrf, PrecisionContext{} ), UW );
    }
    else
        res.U = std::move( UW );

    return res;
}

////////////////////////////////////////////////////////////////////////////////
//
// symmetric Jacobi eigensolver
//
////////////////////////////////////////////////////////////////////////////////

EigResult
sym_eig ( const DenseMatrix &  A0, int  max_sweeps )
{
    require_square( A0, "sym_eig" );

    const std::size_t  n = A0.rows();
    DenseMatrix        A = A0;
    DenseMatrix        V = DenseMatrix::identity( n );

    // symmetrize
    for ( std::size_t  j = 0; j < n; ++j )
        for ( std::size_t  i = j + 1; i < n; ++i )
            A( i, j ) = A( j, i ) = 0.5 * ( A( i, j ) + A( j, i ) );

    bool  converged = n < 2;

    for ( int  sweep = 0; sweep < max_sweeps && ! converged; ++sweep )
    {
        bool  rotated = false;

        for ( std::size_t  p = 0; p + 1 < n; ++p )
        {
            for ( std::size_t  q = p + 1; q < n; ++q )
            {
                const double  apq = A( p, q );

                if ( apq == 0.0 )
                    continue;

                const double  app = A( p, p );
                const double  aqq = A( q, q );

                if ( std::fabs( apq ) <= eps64 * std::sqrt( std::fabs( app ) ) * std::sqrt( std::fabs( aqq ) ) )
                {
                    continue;
                }

                rotated = true;

                const double  theta = ( aqq - app ) / ( 2.0 * apq );
                const double  t     = std::copysign( 1.0, theta ) / ( std::fabs( theta ) + std::hypot( 1.0, theta ) );
                const double  c     = 1.0 / std::hypot( 1.0, t );
                const double  s     = c * t;

                // A <- A J on columns p, q
                rotate( A.col( p ), A.col( q ), c, s );

                // A <- J^T A on rows p, q
                for ( std::size_t  k = 0; k < n; ++k )
                {
                    const double  x = A( p, k );
                    const double  y = A( q, k );

                    A( p, k ) = c * x - s * y;
                    A( q, k ) = s * x + c * y;
                }

                A( p, q ) = A( q, p ) = 0.0;

                rotate( V.col( p ), V.col( q ), c, s );
            }
        }

        converged = ! rotated;
    }

    if ( ! converged )
        throw NoConvergence( "sym_eig: Jacobi did not converge" );

    std::vector< std::size_t >  order( n );

    std::iota( order.begin(), order.end(), std::size_t( 0 ) );
    std::stable_sort( order.begin(), order.end(), [&] ( auto  a, auto  b ) { return A( a, a ) > A( b, b ); } );

    EigResult  r{ Vector( n ), DenseMatrix( n, n ) };

    for ( std::size_t  k = 0; k < n; ++k )
    {
        r.values[k] = A( order[k], order[k] );
        std::copy( V.col( order[k] ).begin(), V.col( order[k] ).end(), r.vectors.col( k ).begin() );
    }

    return r;
}

////////////////////////////////////////////////////////////////////////////////
//
// norms and condition numbers
//
////////////////////////////////////////////////////////////////////////////////

std::size_t
dense_cap ()
{
    if ( const char *  env = std::getenv( "MPBAL_DENSE_CAP" ) )
    {
        char *  end = nullptr;
        auto    v   = std::strtoull( env, &end, 10 );

        if ( end != env && v > 0 )
            return std::size_t( v );
    }

    return 4096;
}

DenseMatrix
inverse ( const DenseMatrix &  A )
{
    require_square( A, "inverse" );

    if ( A.rows() > dense_cap() )
        throw ConfigError( "inverse: n = " + std::to_string( A.rows() ) + " exceeds the dense cap " +
                           std::to_string( dense_cap() ) + " (set MPBAL_DENSE_CAP to raise it)" );

    const PrecisionContext  ctx;
    const auto              f = lu_factor( A, ctx );
    const std::size_t       n = A.rows();
    DenseMatrix             X( n, n );
    Vector                  e( n, 0.0 );

    for ( std::size_t  j = 0; j < n; ++j )
    {
        e[j] = 1.0;

        const auto  x = lu_solve( f, e, ctx );

        std::copy( x.begin(), x.end(), X.col( j ).begin() );
        e[j] = 0.0;
    }

    return X;
}

double
spectral_norm ( const DenseMatrix &  A )
{
    const std::size_t  n = A.cols();

    if ( n == 0 || A.rows() == 0 )
        return 0.0;

    std::mt19937_64                           gen( 20240601 );
    std::uniform_real_distribution< double >  dist( 0.5, 1.5 );
    Vector                                    v( n );

    for ( auto &  x : v )
        x = dist( gen );

    {
        const double  nv = norm_two( v );

        for ( auto &  x : v )
            x /= nv;
    }

    const auto  At     = A.transposed();
    double      lambda = 0.0;

    for ( int  it = 0; it < 100; ++it )
    {
        const auto    w  = multiply( A, v );
        auto          z  = multiply( At, w );
        const double  nz = norm_two( z );

        if ( nz == 0.0 )
            return 0.0;

        const double  prev = lambda;

        lambda = nz;

        for ( std::size_t  i = 0; i < n; ++i )
            v[i] = z[i] / nz;

        if ( it > 0 && std::fabs( lambda - prev ) < 1e-10 * lambda )
            break;
    }

    return std::sqrt( lambda );
}

double
cond_inf ( const DenseMatrix &  A )
{
    return norm_inf( A ) * norm_inf( inverse( A ) );
}

double
cond2_abs ( const DenseMatrix &  A )
{
    return spectral_norm( multiply( abs( inverse( A ) ), abs( A ) ) );
}

}// namespace mpbal
