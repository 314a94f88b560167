#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include <mpbal/errors.hpp>
#include <mpbal/harness.hpp>

using namespace mpbal;
namespace fs = std::filesystem;

namespace {

std::string
slurp ( const fs::path &  p )
{
    std::ifstream       f( p, std::ios::binary );
    std::ostringstream  s;

    s << f.rdbuf();

    return s.str();
}

// "# key=value" lines of a rendered CSV
std::map< std::string, std::string >
header_config ( const std::string &  csv )
{
    std::map< std::string, std::string >  cfg;
    std::istringstream                    in( csv );
    std::string                           line;

    while ( std::getline( in, line ) && line.starts_with( "# " ) )
    {
        const auto  eq = line.find( '=' );

        cfg[ line.substr( 2, eq - 2 ) ] = line.substr( eq + 1 );
    }

    return cfg;
}

}// namespace

TEST( Csv, RealRoundTripsExactly )
{
    std::mt19937_64                           gen( 4 );
    std::uniform_real_distribution< double >  e( -300, 300 );

    for ( int  i = 0; i < 10000; ++i )
    {
        const double  v = std::pow( 10.0, e( gen ) ) * ( i % 2 ? -1 : 1 );

        EXPECT_EQ( std::stod( csv_real( v ) ), v );
    }

    EXPECT_EQ( csv_real( 0.1 ), "1.0000000000000001e-01" );
    EXPECT_EQ( csv_real( std::nan( "" ) ), "nan" );
    EXPECT_EQ( csv_real( -INFINITY ), "-inf" );
}

TEST( Csv, FieldQuoting )
{
    EXPECT_EQ( csv_field( "fp16" ), "fp16" );
    EXPECT_EQ( csv_field( "a,b" ), "\"a,b\"" );
    EXPECT_EQ( csv_field( "say \"hi\"" ), "\"say \"\"hi\"\"\"" );
    EXPECT_EQ( csv_field( "two\nlines" ), "\"two\nlines\"" );
}

TEST( Csv, RenderLayout )
{
    CsvTable  t;

    t.add_config( "experiment", "demo" );
    t.add_config( "seed", "3" );
    t.columns = { "name", "value" };
    t.rows    = { { "x,y", "1" }, { "z", "2" } };

    EXPECT_EQ( render_csv( t ), "# schema=v1\n# experiment=demo\n# seed=3\nname,value\n\"x,y\",1\nz,2\n" );

    t.rows.push_back( { "short" } );
    EXPECT_THROW( render_csv( t ), std::logic_error );
}

TEST( Csv, AtomicWriteLeavesNoTemporary )
{
    const auto  dir = fs::temp_directory_path() / "mpbal_test_harness";

    fs::remove_all( dir );
    fs::create_directories( dir );

    write_file_atomic( dir / "a.csv", "old\n" );
    write_file_atomic( dir / "a.csv", "new\n" );

    EXPECT_EQ( slurp( dir / "a.csv" ), "new\n" );
    EXPECT_FALSE( fs::exists( dir / "a.csv.tmp" ) );

    fs::remove_all( dir );
}

TEST( Lists, Parsing )
{
    EXPECT_EQ( split_list( " a, b ,,c " ), ( std::vector< std::string >{ "a", "b", "c" } ) );
    EXPECT_EQ( parse_real_list( "1e-7, 0.5" ), ( std::vector< double >{ 1e-7, 0.5 } ) );
    EXPECT_THROW( parse_real_list( "1e-7,abc" ), ConfigError );
    EXPECT_THROW( parse_real_list( "2x" ), ConfigError );
    EXPECT_THROW( parse_real_list( "" ), ConfigError );
    EXPECT_EQ( parse_format_list( "fp16,bf16" ).at( 1 ).name, "bf16" );
    EXPECT_THROW( parse_format_list( "fp16,fp12" ), ConfigError );
}

TEST( Experiments, FormatsTable )
{
    const auto    r = run_formats();
    const auto &  t = r.outputs.at( 0 ).table;

    ASSERT_EQ( t.rows.size(), 7u );
    EXPECT_EQ( t.rows[0][0], "fp64" );
    EXPECT_EQ( t.rows[6][0], "fp8-e4m3" );
}

// the header echoes the configuration; feeding it back reproduces the file
TEST( Experiments, HeaderConfigRegeneratesHodlrCsv )
{
    HodlrExperiment  cfg;

    cfg.matrix        = MPBAL_DATA_DIR "/nos7.mtx";
    cfg.levels        = 4;
    cfg.eps           = { 1e-3, 1e-1 };
    cfg.seed          = 11;
    cfg.matvec_trials = 3;

    const auto  first = render_csv( run_hodlr( cfg ).outputs.at( 0 ).table );
    const auto  h     = header_config( first );

    HodlrExperiment  again;

    again.matrix        = h.at( "matrix" );
    again.levels        = std::stoi( h.at( "levels" ) );
    again.eps           = parse_real_list( h.at( "eps" ) );
    again.menu          = parse_format_list( h.at( "menu" ) );
    again.seed          = std::stoull( h.at( "seed" ) );
    again.matvec_trials = std::stoul( h.at( "matvec_trials" ) );

    EXPECT_EQ( render_csv( run_hodlr( again ).outputs.at( 0 ).table ), first );
}

TEST( Experiments, IrRejectsUnknownSolver )
{
    IrExperiment  cfg;

    cfg.matrix  = MPBAL_DATA_DIR "/steam1.mtx";
    cfg.solvers = { "cg" };

    EXPECT_THROW( run_ir( cfg ), Error );
}

TEST( Experiments, MissingMatrixIsConfigError )
{
    SpaiExperiment  cfg;

    EXPECT_THROW( run_spai( cfg ), ConfigError );
}
