#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include <mpbal/errors.hpp>
#include <mpbal/hodlr.hpp>
#include <mpbal/matrix_market.hpp>

using namespace mpbal;

namespace {

const std::vector< FloatFormat > &
full_menu ()
{
    static const std::vector< FloatFormat >  m = {
        fp64(), fp32(), bf16(), fp16(), find_format( "fp8-e4m3" ) };

    return m;
}

DenseMatrix
random_spd ( std::size_t  n, std::uint64_t  seed )
{
    std::mt19937_64                       gen( seed );
    std::normal_distribution< double >    g;
    DenseMatrix                           B( n, n );

    for ( auto &  v : B.values() )
        v = g( gen );

    auto  A = multiply_tn( B, B );

    for ( std::size_t  i = 0; i < n; ++i )
        A( i, i ) += double( n );

    return A;
}

// smooth kernel with decaying off-diagonal singular values
DenseMatrix
kernel_matrix ( std::size_t  n, double  scale )
{
    DenseMatrix  A( n, n );

    for ( std::size_t  j = 0; j < n; ++j )
        for ( std::size_t  i = 0; i < n; ++i )
            A( i, j ) = scale / ( 1.0 + std::fabs( double( i ) - double( j ) ) );

    return A;
}

}// namespace

TEST( HodlrPartition, EvenSplits )
{
    for ( std::size_t  n : { 16u, 17u, 1138u } )
        for ( int  level = 0; level <= 4; ++level )
        {
            const auto   p   = hodlr_partition( n, level );
            std::size_t  off = 0;
            std::size_t  lo  = n, hi = 0;

            ASSERT_EQ( p.size(), std::size_t( 1 ) << level );

            for ( const auto & [ o, m ] : p )
            {
                EXPECT_EQ( o, off );
                off += m;
                lo   = std::min( lo, m );
                hi   = std::max( hi, m );
            }

            EXPECT_EQ( off, n );
            EXPECT_LE( hi - lo, 1u );
        }
}

TEST( Truncation, Examples )
{
    const Vector  s = { 4.0, 2.0, 1.0, 0.0 };

    // ||s|| = sqrt(21)
    EXPECT_EQ( truncation_rank( s, 1e-8 ), 3u );
    EXPECT_EQ( truncation_rank( s, 1.0 / std::sqrt( 21.0 ) ), 2u );
    EXPECT_EQ( truncation_rank( s, std::sqrt( 5.0 / 21.0 ) ), 1u );
    EXPECT_EQ( truncation_rank( Vector{ 0.0, 0.0 }, 0.1 ), 0u );
    EXPECT_EQ( truncation_rank( Vector{}, 0.1 ), 0u );
}

TEST( Xi, IdentityIsZero )
{
    for ( double  x : xi_levels( DenseMatrix::identity( 32 ), 4 ) )
        EXPECT_EQ( x, 0.0 );
}

TEST( Xi, OnesMatrixClosedForm )
{
    const std::size_t  n = 64;
    const DenseMatrix  J( n, n, 1.0 );
    const auto         xi = xi_levels( J, 5 );

    for ( int  k = 1; k <= 5; ++k )
        EXPECT_DOUBLE_EQ( xi[k - 1], double( n >> k ) / double( n ) );
}

TEST( Xi, BoundedByOne )
{
    std::mt19937_64  gen( 5 );

    for ( int  trial = 0; trial < 20; ++trial )
    {
        std::uniform_int_distribution< std::size_t >  nd( 8, 60 );
        std::normal_distribution< double >            g;
        const std::size_t                             n = nd( gen );
        DenseMatrix                                   A( n, n );

        // occasionally concentrate the mass in one off-diagonal block
        for ( auto &  v : A.values() )
            v = trial % 3 == 0 ? 0.0 : g( gen );
        A( n - 1, 0 ) = 1.0;

        for ( double  x : xi_levels( A, 3 ) )
        {
            EXPECT_GE( x, 0.0 );
            EXPECT_LE( x, 1.0 );
        }
    }
}

TEST( HodlrBuild, BlockDiagonal )
{
    const std::size_t  n = 32;
    DenseMatrix        A( n, n );

    for ( std::size_t  b = 0; b < n; b += 4 )
        for ( std::size_t  i = 0; i < 4; ++i )
            for ( std::size_t  j = 0; j < 4; ++j )
                A( b + i, b + j ) = 1.0 + double( i == j ) + 0.1 * double( b );

    const auto  H = hodlr_build( A, 3, 1e-4, full_menu() );

    for ( double  x : H.xi )
        EXPECT_EQ( x, 0.0 );
    for ( const auto &  f : H.level_formats )
        EXPECT_EQ( f.name, "fp8-e4m3" );
    for ( const auto &  b : H.blocks )
        EXPECT_EQ( b.rank(), 0u );

    const auto  e = hodlr_reconstruct_error( A, H );

    EXPECT_EQ( e.error, 0.0 );
    EXPECT_LE( e.error, e.bound );
}

TEST( HodlrBuild, ExactRankOneOffDiagonal )
{
    const auto  A = DenseMatrix::from_rows( { { 4, 1, 2, 3 },
                                              { 1, 5, 4, 6 },
                                              { 1, 2, 6, 1 },
                                              { 3, 6, 2, 7 } } );
    const std::vector< FloatFormat >  menu = { fp64() };
    const auto  H = hodlr_build( A, 1, 1e-8, menu );

    ASSERT_EQ( H.blocks.size(), 2u );
    EXPECT_EQ( H.blocks[0].rank(), 1u );
    EXPECT_EQ( H.blocks[1].rank(), 1u );
    EXPECT_LE( hodlr_reconstruct_error( A, H ).error, 1e-15 );
}

TEST( HodlrBuild, RandomSpdWithinBound )
{
    const auto  A = random_spd( 64, 3 );
    const auto  H = hodlr_build( A, 3, 1e-4, full_menu() );
    const auto  e = hodlr_reconstruct_error( A, H );

    EXPECT_NEAR( e.bound, ( 2 * std::sqrt( 2.0 ) * 3 + 1 ) * 1e-4, 1e-15 );
    EXPECT_LE( e.error, e.bound );

    const std::vector< FloatFormat >  only64 = { fp64() };
    const auto                        H64    = hodlr_build( A, 3, 1e-4, only64 );

    EXPECT_LE( hodlr_reconstruct_error( A, H64 ).error, 3 * 1e-4 );
}

TEST( HodlrBuild, UniformDoubleEnvelope )
{
    const std::vector< FloatFormat >  only64 = { fp64() };

    for ( double  eps : { 1e-1, 1e-4, 1e-7 } )
        for ( int  levels = 1; levels <= 4; ++levels )
        {
            const auto  A = kernel_matrix( 96, 1.0 );
            const auto  H = hodlr_build( A, levels, eps, only64 );

            for ( const auto &  b : H.blocks )
                EXPECT_EQ( b.fmt.name, "fp64" );
            EXPECT_LE( hodlr_reconstruct_error( A, H ).error, levels * eps + 96 * fp64().unit_roundoff() );
        }
}

// property: the adaptive bound over assorted matrices, levels and tolerances
TEST( HodlrBuild, AdaptiveBoundHolds )
{
    std::vector< DenseMatrix >  mats = { random_spd( 80, 1 ), kernel_matrix( 100, 1e-3 ), kernel_matrix( 77, 5e4 ) };
    std::mt19937_64             gen( 9 );
    std::normal_distribution< double >  g;
    DenseMatrix                 R( 70, 70 );

    for ( auto &  v : R.values() )
        v = g( gen );
    mats.push_back( R );

    for ( const auto &  A : mats )
    {
        HodlrSvdCache  cache( A );

        for ( int  levels = 1; levels <= 4; ++levels )
            for ( double  eps : { 1e-1, 1e-2, 1e-4, 1e-7 } )
            {
                const auto  H = hodlr_build( A, levels, eps, full_menu(), &cache );
                const auto  e = hodlr_reconstruct_error( A, H );

                EXPECT_LE( e.error, e.bound ) << "n=" << A.rows() << " levels=" << levels << " eps=" << eps;
            }
    }
}

TEST( HodlrBuild, StoredFactorsRepresentable )
{
    const auto  A = kernel_matrix( 64, 1.0 );
    const auto  H = hodlr_build( A, 3, 1e-2, full_menu() );

    for ( const auto &  b : H.blocks )
    {
        for ( double  v : b.X.values() )
            ASSERT_EQ( round_scalar( v, b.fmt ), v );
        for ( double  v : b.Y.values() )
            ASSERT_EQ( round_scalar( v, b.fmt ), v );
    }
}

TEST( HodlrBuild, FormatsMonotoneInEps )
{
    const auto     A = random_spd( 64, 8 );
    HodlrSvdCache  cache( A );
    const auto     coarse = hodlr_build( A, 3, 1e-1, full_menu(), &cache );
    const auto     mid    = hodlr_build( A, 3, 1e-4, full_menu(), &cache );
    const auto     fine   = hodlr_build( A, 3, 1e-7, full_menu(), &cache );

    for ( int  k = 0; k < 3; ++k )
    {
        EXPECT_LE( fine.level_formats[k].unit_roundoff(), mid.level_formats[k].unit_roundoff() );
        EXPECT_LE( mid.level_formats[k].unit_roundoff(), coarse.level_formats[k].unit_roundoff() );
    }
}

TEST( HodlrBuild, OverflowPromotesBlock )
{
    // off-diagonal magnitudes beyond e4m3's range (448) force a finer format
    auto  A = kernel_matrix( 32, 1e6 );
    const std::vector< FloatFormat >  menu = { fp64(), find_format( "fp8-e4m3" ) };
    const auto  H = hodlr_build( A, 2, 1e-1, menu );

    bool  promoted = false;

    for ( const auto &  b : H.blocks )
    {
        promoted = promoted || b.promoted;
        for ( double  v : b.X.values() )
            ASSERT_TRUE( std::isfinite( v ) );
    }

    EXPECT_TRUE( promoted );
    EXPECT_LE( hodlr_reconstruct_error( A, H ).error, 1.0 );
}

TEST( HodlrBuild, MenuOrderIrrelevant )
{
    const auto  A = kernel_matrix( 48, 1.0 );
    auto        menu = full_menu();

    std::reverse( menu.begin(), menu.end() );

    const auto  a = hodlr_build( A, 2, 1e-3, full_menu() );
    const auto  b = hodlr_build( A, 2, 1e-3, menu );

    EXPECT_EQ( a.assemble(), b.assemble() );
}

TEST( HodlrBuild, RejectsBadConfig )
{
    const auto                        A    = kernel_matrix( 8, 1.0 );
    const std::vector< FloatFormat >  no64 = { fp32(), fp16() };

    EXPECT_THROW( hodlr_build( A, 4, 1e-3, full_menu() ), ConfigError );
    EXPECT_THROW( hodlr_build( A, 2, 0.0, full_menu() ), ConfigError );
    EXPECT_THROW( hodlr_build( A, 2, 1e-3, no64 ), ConfigError );
    EXPECT_THROW( hodlr_build( DenseMatrix( 8, 6 ), 1, 1e-3, full_menu() ), ConfigError );

    const auto     B = kernel_matrix( 8, 2.0 );
    HodlrSvdCache  cache( B );

    EXPECT_THROW( hodlr_build( A, 1, 1e-3, full_menu(), &cache ), ConfigError );
}

TEST( HodlrSvdCache, SymmetricReuseMatchesFreshSvd )
{
    const auto     A = random_spd( 40, 4 );
    HodlrSvdCache  shared( A );
    const auto     h1 = hodlr_build( A, 3, 1e-5, full_menu(), &shared );
    const auto     h2 = hodlr_build( A, 3, 1e-5, full_menu() );

    EXPECT_LE( norm_fro( h1.assemble() - h2.assemble() ), 1e-12 * norm_fro( A ) );
}

TEST( HodlrSvdCache, ZeroRowsAndColumnsDropped )
{
    DenseMatrix  A = DenseMatrix::identity( 8 );

    A( 1, 6 ) = 3.0;
    A( 6, 1 ) = 3.0;

    HodlrSvdCache  cache( A );
    const auto &   e = cache.get( 0, 4, 4, 4 );

    ASSERT_EQ( e.rows.size(), 1u );
    ASSERT_EQ( e.cols.size(), 1u );
    EXPECT_EQ( e.rows[0], 1u );
    EXPECT_EQ( e.cols[0], 2u );
    EXPECT_DOUBLE_EQ( e.sigma[0], 3.0 );
}

TEST( StorageReport, AllDoubleSavesNothing )
{
    const std::vector< FloatFormat >  only64 = { fp64() };
    const auto                        H      = hodlr_build( kernel_matrix( 40, 1.0 ), 3, 1e-6, only64 );
    const auto                        s      = storage_report( H );

    EXPECT_EQ( s.bits_adaptive, s.bits_uniform_double );
    EXPECT_EQ( s.savings_ratio, 0.0 );
}

TEST( StorageReport, HandCountedHalfPrecision )
{
    // ones matrix: every off-diagonal block has rank one
    //   level 1: 2 blocks of 8x8 -> 2 * (8 + 8) = 32 factor entries
    //   level 2: 4 blocks of 4x4 -> 4 * (4 + 4) = 32 factor entries
    //   leaves:  4 blocks of 4x4 -> 64 entries at 64 bits
    // uniform:  64 * 64 + 64 * 64 = 8192;  fp16: 64 * 16 + 64 * 64 = 5120
    const DenseMatrix                 J( 16, 16, 1.0 );
    const std::vector< FloatFormat >  menu = { fp64(), fp16() };
    const auto                        H    = hodlr_build( J, 2, 1e-3, menu );
    const auto                        s    = storage_report( H );

    for ( const auto &  b : H.blocks )
    {
        EXPECT_EQ( b.rank(), 1u );
        EXPECT_EQ( b.fmt.name, "fp16" );
    }

    EXPECT_EQ( s.bits_uniform_double, 8192u );
    EXPECT_EQ( s.bits_adaptive, 5120u );
    EXPECT_DOUBLE_EQ( s.savings_ratio, 1.0 - 5120.0 / 8192.0 );
    EXPECT_LE( hodlr_reconstruct_error( J, H ).error, 1e-15 );
}

TEST( StorageReport, SavingsGrowWithEps )
{
    const auto     h = load_matrix_market( std::string( MPBAL_DATA_DIR ) + "/nos7.mtx" );
    const auto &   A = *h.dense;
    HodlrSvdCache  cache( A );
    double         prev = -1.0;

    for ( double  eps : { 1e-7, 1e-4, 1e-1 } )
    {
        const auto  H = hodlr_build( A, 5, eps, full_menu(), &cache );
        const auto  s = storage_report( H );

        EXPECT_GT( s.savings_ratio, prev ) << eps;
        EXPECT_LT( s.savings_ratio, 1.0 );
        prev = s.savings_ratio;
    }

    EXPECT_GT( prev, 0.0 );
}

TEST( HodlrMatvec, Identity )
{
    const auto    H = hodlr_build( DenseMatrix::identity( 16 ), 2, 1e-4, full_menu() );
    const Vector  x = { 1, -2, 3, 0.5, 7, 0x1p-10, 2, 2, 1, 1, 4, 5, -6, 0, 9, 1.25 };
    const auto    r = hodlr_matvec( H, x, fp16() );

    EXPECT_EQ( r.y, x );
    EXPECT_EQ( r.backward_error_estimate, 0.0 );
}

TEST( HodlrMatvec, ZeroVector )
{
    const auto  H = hodlr_build( random_spd( 32, 2 ), 2, 1e-4, full_menu() );
    const auto  r = hodlr_matvec( H, Vector( 32, 0.0 ), fp32() );

    for ( double  v : r.y )
        EXPECT_EQ( v, 0.0 );
    EXPECT_EQ( r.backward_error_estimate, 0.0 );
}

TEST( HodlrMatvec, DoubleAgreesWithDenseAssembly )
{
    const auto  A = random_spd( 100, 6 );
    const auto  H = hodlr_build( A, 3, 1e-6, full_menu() );

    std::mt19937_64                      gen( 1 );
    std::normal_distribution< double >   g;
    Vector                               x( 100 );

    for ( auto &  v : x )
        v = g( gen );

    EXPECT_LE( hodlr_matvec( H, x, fp64() ).backward_error_estimate, 100 * fp64().unit_roundoff() );
}

TEST( HodlrMatvec, GuidelineWorkPrecision )
{
    const std::size_t  n   = 128;
    const double       eps = 1e-4;
    const auto         A   = random_spd( n, 12 );
    const auto         H   = hodlr_build( A, 3, eps, full_menu() );

    // fp32: u = 2^-24 <= eps / n
    ASSERT_LE( fp32().unit_roundoff(), eps / double( n ) );

    std::mt19937_64                           gen( 2 );
    std::uniform_real_distribution< double >  ud( -1, 1 );

    for ( int  trial = 0; trial < 20; ++trial )
    {
        Vector  x( n );

        for ( auto &  v : x )
            v = ud( gen );

        EXPECT_LE( hodlr_matvec( H, x, fp32() ).backward_error_estimate, 10 * eps );
    }
}

TEST( HodlrMatvec, DimensionMismatch )
{
    const auto  H = hodlr_build( DenseMatrix::identity( 8 ), 1, 1e-4, full_menu() );

    EXPECT_THROW( hodlr_matvec( H, Vector( 7, 1.0 ), fp64() ), ConfigError );
}
