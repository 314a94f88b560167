#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include <mpbal/errors.hpp>
#include <mpbal/krylov.hpp>

using namespace mpbal;

namespace {

SparseMatrixCSC
random_sparse ( std::size_t  n, double  density, double  shift, std::uint64_t  seed )
{
    std::mt19937_64                           gen( seed );
    std::uniform_real_distribution< double >  u( -1, 1 ), p( 0, 1 );
    std::vector< Triplet >                    t;

    for ( std::size_t  j = 0; j < n; ++j )
        for ( std::size_t  i = 0; i < n; ++i )
            if ( i == j )
                t.push_back( { i, j, shift + u( gen ) } );
            else if ( p( gen ) < density )
                t.push_back( { i, j, u( gen ) } );

    return SparseMatrixCSC::from_triplets( n, n, std::move( t ) );
}

Vector
ramp ( std::size_t  n )
{
    Vector  b( n );

    for ( std::size_t  i = 0; i < n; ++i )
        b[i] = 1.0 + 0.1 * double( i );

    return b;
}

}// namespace

TEST( Gmres, IdentityOneIteration )
{
    const auto  I = SparseMatrixCSC::identity( 7 );
    const auto  b = ramp( 7 );
    const auto  g = gmres( make_operator( I, {} ), b, 1e-12, 0, {} );

    EXPECT_TRUE( g.report.converged );
    EXPECT_EQ( g.report.iterations, 1u );

    for ( std::size_t  i = 0; i < 7; ++i )
        EXPECT_NEAR( g.x[i], b[i], 1e-15 * b[i] );
}

TEST( Gmres, DistinctEigenvaluesBoundIterations )
{
    // diagonal with k distinct values: the minimal polynomial has degree k
    for ( std::size_t  k : { 1u, 2u, 3u, 5u } )
    {
        std::vector< Triplet >  t;

        for ( std::size_t  i = 0; i < 40; ++i )
            t.push_back( { i, i, 1.0 + double( i % k ) } );

        const auto  D = SparseMatrixCSC::from_triplets( 40, 40, t );
        const auto  g = gmres( make_operator( D, {} ), ramp( 40 ), 1e-14, 0, {} );

        EXPECT_TRUE( g.report.converged ) << k;
        EXPECT_LE( g.report.iterations, k ) << k;
    }
}

TEST( Gmres, ExactLuPreconditionerNearIdentity )
{
    const auto  A  = random_sparse( 50, 0.1, 3.0, 1 );
    const auto  F  = lu_factor( A.to_dense(), {} );
    auto        op = make_operator( A, {} );

    op.precond = lu_preconditioner( F, {} );

    const auto  g = gmres( op, ramp( 50 ), 1e-6, 0, {} );

    EXPECT_TRUE( g.report.converged );
    EXPECT_LE( g.report.iterations, 2u );
}

TEST( Gmres, ResidualHistoryNonincreasingAndFiniteTermination )
{
    const std::size_t  n  = 60;
    const auto         A  = random_sparse( n, 0.08, 2.0, 2 );
    const auto         b  = ramp( n );
    const auto         g  = gmres( make_operator( A, {} ), b, 1e-12, 0, {} );
    const auto &       h  = g.report.relative_residual_history;

    EXPECT_TRUE( g.report.converged );
    EXPECT_LE( g.report.iterations, n );
    EXPECT_EQ( h.size(), g.report.iterations + 1 );

    for ( std::size_t  i = 1; i < h.size(); ++i )
        EXPECT_LE( h[i], h[i - 1] * ( 1 + 10 * 0x1p-53 ) );

    // the reported residual matches the true one
    auto    r  = A.multiply( g.x );
    double  rn = 0;

    for ( std::size_t  i = 0; i < n; ++i )
        rn += ( b[i] - r[i] ) * ( b[i] - r[i] );

    EXPECT_LE( std::sqrt( rn ) / norm_two( b ), 1e-11 );
}

TEST( Gmres, LowPrecisionHistoryWithinSlack )
{
    const auto    A   = random_sparse( 40, 0.1, 3.0, 3 );
    const auto    ctx = PrecisionContext::of( fp32() );
    const auto    g   = gmres( make_operator( A, ctx ), ramp( 40 ), 1e-5, 0, ctx );
    const auto &  h   = g.report.relative_residual_history;

    EXPECT_TRUE( g.report.converged );

    for ( std::size_t  i = 1; i < h.size(); ++i )
        EXPECT_LE( h[i], h[i - 1] + 10 * fp32().unit_roundoff() );

    for ( double  v : g.x )
        EXPECT_EQ( v, round_scalar( v, fp32() ) );
}

TEST( Gmres, Deterministic )
{
    const auto  A   = random_sparse( 30, 0.2, 2.0, 4 );
    const auto  ctx = PrecisionContext::of( bf16() );
    const auto  g1  = gmres( make_operator( A, ctx ), ramp( 30 ), 1e-2, 0, ctx );
    const auto  g2  = gmres( make_operator( A, ctx ), ramp( 30 ), 1e-2, 0, ctx );

    EXPECT_EQ( g1.x, g2.x );
    EXPECT_EQ( g1.report.relative_residual_history, g2.report.relative_residual_history );
}

TEST( Gmres, MaxitReportsNotConverged )
{
    const auto  A = random_sparse( 50, 0.2, 0.5, 5 );
    const auto  g = gmres( make_operator( A, {} ), ramp( 50 ), 1e-14, 3, {} );

    EXPECT_FALSE( g.report.converged );
    EXPECT_EQ( g.report.iterations, 3u );
}

TEST( Gmres, ZeroRhs )
{
    const auto  A = random_sparse( 10, 0.2, 2.0, 6 );
    const auto  g = gmres( make_operator( A, {} ), Vector( 10, 0.0 ), 1e-8, 0, {} );

    EXPECT_TRUE( g.report.converged );
    EXPECT_EQ( g.x, Vector( 10, 0.0 ) );
}

TEST( Spmv, MatchesDenseMatvecInFormat )
{
    const auto  A   = random_sparse( 20, 0.3, 1.0, 7 );
    const auto  x   = ramp( 20 );
    const auto  ctx = PrecisionContext::of( fp16() );
    const auto  ys  = spmv( A, x, ctx );
    const auto  yd  = multiply( A.to_dense(), x );

    for ( std::size_t  i = 0; i < 20; ++i )
    {
        EXPECT_EQ( ys[i], round_scalar( ys[i], fp16() ) );
        EXPECT_NEAR( ys[i], yd[i], 20 * fp16().unit_roundoff() * 20 );
    }
}
