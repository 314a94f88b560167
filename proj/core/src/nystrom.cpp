#include <mpbal/nystrom.hpp>
#include <mpbal/densela.hpp>
#include <mpbal/errors.hpp>
#include <mpbal/rng.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace mpbal {

void
NystromConfig::validate ( std::size_t  n ) const
{
    if ( k < 1 || k > n )
        throw ConfigError( "nystrom: rank k must satisfy 1 <= k <= n (k=" + std::to_string( k ) +
                           ", n=" + std::to_string( n ) + ")" );
    if ( u.unit_roundoff() > u_p.unit_roundoff() )
        throw ConfigError( "nystrom: working precision " + u.name + " must be at least as precise as u_p=" + u_p.name );
    if ( runs < 1 )
        throw ConfigError( "nystrom: runs must be positive" );
}

DenseMatrix
gaussian_matrix ( std::size_t  n, std::size_t  k, std::uint64_t  seed )
{
    GaussianSource  g( seed );
    DenseMatrix     G( n, k );

    for ( auto &  v : G.values() )
        v = g();

    return G;
}

NystromSketch
nystrom_sketch ( const DenseMatrix &  A, std::size_t  kmax, const FloatFormat &  u_p, std::uint64_t  seed )
{
    if ( ! A.square() )
        throw ConfigError( "nystrom: matrix must be square" );
    if ( kmax < 1 || kmax > A.rows() )
        throw ConfigError( "nystrom: sketch size must satisfy 1 <= k <= n" );

    const auto  G = gaussian_matrix( A.rows(), kmax, seed );

    NystromSketch  s;

    s.u_p   = u_p;
    s.omega = qr_thin_q( qr_householder( G, {} ), {} );

    const auto  Ap = round_matrix( A, u_p ).matrix;
    const auto  Op = round_matrix( s.omega, u_p ).matrix;

    s.Y = matmul( Ap, Op, PrecisionContext::of( u_p ) );

    return s;
}

NystromResult
nystrom_finalize ( const NystromSketch &  s, std::size_t  k, const FloatFormat &  u, std::size_t  max_shift_retries )
{
    const std::size_t  n = s.Y.rows();

    if ( k < 1 || k > s.Y.cols() )
        throw ConfigError( "nystrom_finalize: k exceeds the sketch size" );

    const PrecisionContext  ctx{ u };
    const Rounder           rnd( u );
    const auto              Om = s.omega.leading_cols( k );
    const auto              Y  = s.Y.leading_cols( k );

    NystromResult  r;
    const double   ynorm = norm_fro( Y );

    if ( ynorm == 0.0 )
    {
        r.U = Om;
        r.theta.assign( k, 0.0 );
        return r;
    }

    r.nu = rnd( std::sqrt( double( n ) ) * u.unit_roundoff() * ynorm );

    const auto   OmT = Om.transposed();
    DenseMatrix  Ynu( n, k ), C;

    while ( true )
    {
        for ( std::size_t  j = 0; j < k; ++j )
            for ( std::size_t  i = 0; i < n; ++i )
                Ynu( i, j ) = rnd( Y( i, j ) + rnd( r.nu * Om( i, j ) ) );

        auto  B = matmul( OmT, Ynu, ctx );

        for ( std::size_t  j = 0; j < k; ++j )
            for ( std::size_t  i = 0; i < j; ++i )
                B( i, j ) = B( j, i ) = rnd( rnd( B( i, j ) + B( j, i ) ) * 0.5 );

        try
        {
            C = chol( B, ctx );
            break;
        }
        catch ( const NotPositiveDefinite & )
        {
            if ( r.shift_retries >= max_shift_retries )
                throw;

            ++r.shift_retries;
            r.nu = rnd( 10.0 * r.nu );
        }
    }

    const auto  F  = solve_triangular( C, Ynu, Side::right, Uplo::upper, Trans::no, ctx );
    auto        sv = svd( F );

    r.U = std::move( sv.U );
    r.theta.resize( k );

    for ( std::size_t  i = 0; i < k; ++i )
        r.theta[i] = std::max( 0.0, rnd( rnd( sv.sigma[i] * sv.sigma[i] ) - r.nu ) );

    if ( ! rnd.native() )
        r.U = round_matrix( r.U, u ).matrix;

    return r;
}

NystromResult
nystrom_single_pass ( const DenseMatrix &  A, const NystromConfig &  cfg )
{
    cfg.validate( A.rows() );

    return nystrom_finalize( nystrom_sketch( A, cfg.k, cfg.u_p, cfg.seed ), cfg.k, cfg.u, cfg.max_shift_retries );
}

double
nystrom_error ( const DenseMatrix &  A, const NystromResult &  r )
{
    DenseMatrix  UT = r.U;

    for ( std::size_t  j = 0; j < UT.cols(); ++j )
        for ( auto &  v : UT.col( j ) )
            v *= r.theta[j];

    return norm_fro( A - multiply( UT, r.U.transposed() ) );
}

std::size_t
precision_heuristic ( std::span< const double >  lambda, std::size_t  n, const FloatFormat &  fmt )
{
    if ( lambda.empty() || ! ( lambda[0] > 0.0 ) )
        throw ConfigError( "precision_heuristic: lambda_1 must be positive" );

    const double  scale = 1.0 / ( std::sqrt( double( n ) ) * lambda[0] );
    std::size_t   best  = 0;

    for ( std::size_t  k = 0; k < lambda.size(); ++k )
        if ( fmt.unit_roundoff() <= lambda[k] * scale )
            best = k + 1;

    return best;
}

double
kappa_tilde ( const DenseMatrix &  omega, const DenseMatrix &  W1 )
{
    if ( omega.rows() != W1.rows() )
        throw ConfigError( "kappa_tilde: row dimensions differ" );

    const auto  M  = multiply_tn( W1, omega );
    const auto  sv = svd( M, { 30, false } );

    const double  smax = sv.sigma.front();
    const double  smin = sv.sigma.back();
    const double  tol  = double( std::max( M.rows(), M.cols() ) ) * std::numeric_limits< double >::epsilon() * smax;

    if ( smin == 0.0 || smin <= tol )
        throw RankDeficientSketch( "kappa_tilde: W1^T Omega is numerically singular" );

    return norm_fro( omega ) / smin;
}

}// namespace mpbal
