#include <random>

#include <benchmark/benchmark.h>

#include <mpbal/densela.hpp>
#include <mpbal/fpemu.hpp>
#include <mpbal/hodlr.hpp>
#include <mpbal/matrix_market.hpp>
#include <mpbal/spai.hpp>

using namespace mpbal;

namespace {

DenseMatrix
gaussian ( std::size_t  m, std::size_t  n, std::uint64_t  seed )
{
    std::mt19937_64                     gen( seed );
    std::normal_distribution< double >  g;
    DenseMatrix                         A( m, n );

    for ( auto &  v : A.values() )
        v = g( gen );

    return A;
}

const char *  names[] = { "fp64", "fp32", "bf16", "fp16", "fp8-e4m3" };

}// namespace

// rounding throughput per format, 4096 values per iteration
void
BM_round_span ( benchmark::State &  state )
{
    const auto &  fmt = find_format( names[ state.range( 0 ) ] );
    const auto    src = gaussian( 4096, 1, 1 );
    Vector        buf( 4096 );

    for ( auto  _ : state )
    {
        std::copy( src.values().begin(), src.values().end(), buf.begin() );
        benchmark::DoNotOptimize( round_span( buf, fmt ) );
    }

    state.SetLabel( fmt.name );
    state.SetItemsProcessed( state.iterations() * 4096 );
}
BENCHMARK( BM_round_span )->DenseRange( 0, 4 );

void
BM_matmul_emulated ( benchmark::State &  state )
{
    const auto  n = std::size_t( state.range( 0 ) );
    const auto  A = gaussian( n, n, 2 );
    const auto  B = gaussian( n, n, 3 );

    for ( auto  _ : state )
        benchmark::DoNotOptimize( matmul( A, B, PrecisionContext::of( fp16() ) ) );

    state.SetComplexityN( state.range( 0 ) );
}
BENCHMARK( BM_matmul_emulated )->RangeMultiplier( 2 )->Range( 32, 256 )->Complexity( benchmark::oNCubed );

void
BM_spai_column ( benchmark::State &  state )
{
    const auto  h = load_matrix_market( MPBAL_DATA_DIR "/steam1.mtx" );
    SpaiConfig  cfg;
    const auto  As  = round_matrix( h.csc, cfg.u_s ).matrix;
    const auto  AsT = As.transposed();
    std::size_t k   = 0;

    for ( auto  _ : state )
    {
        benchmark::DoNotOptimize( spai_column( As, AsT, k, cfg ) );
        k = ( k + 1 ) % h.rows;
    }
}
BENCHMARK( BM_spai_column );

void
BM_hodlr_matvec ( benchmark::State &  state )
{
    const auto                        h    = load_matrix_market( MPBAL_DATA_DIR "/1138_bus.mtx" );
    const std::vector< FloatFormat >  menu = { fp64(), fp32(), bf16(), fp16() };
    const auto                        H    = hodlr_build( *h.dense, 6, 1e-4, menu );
    const Vector                      x( h.rows, 1.0 );

    for ( auto  _ : state )
        benchmark::DoNotOptimize( hodlr_matvec( H, x, fp64() ) );
}
BENCHMARK( BM_hodlr_matvec );
BENCHMARK_MAIN();
