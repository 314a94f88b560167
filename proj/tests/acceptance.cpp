//
// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
//
//   acceptance            run all criteria
//   acceptance 3 5        run a subset
//

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <mpbal/densela.hpp>
#include <mpbal/harness.hpp>
#include <mpbal/hodlr.hpp>
#include <mpbal/ir.hpp>
#include <mpbal/matrix_market.hpp>
#include <mpbal/nystrom.hpp>
#include <mpbal/spai.hpp>

#include "oracles/binary16.hpp"
#include "oracles/binary16_samples.hpp"

using namespace mpbal;
namespace fs = std::filesystem;

namespace {

struct Outcome
{
    bool         pass = false;
    std::string  detail;
};

std::string
fmt ( const char *  f, auto...  args )
{
    char  buf[512];

    std::snprintf( buf, sizeof( buf ), f, args... );

    return buf;
}

std::string
data ( const std::string &  name )
{
    return std::string( MPBAL_DATA_DIR ) + "/" + name + ".mtx";
}

// column index by header name
std::size_t
column ( const CsvTable &  t, const std::string &  name )
{
    for ( std::size_t  i = 0; i < t.columns.size(); ++i )
        if ( t.columns[i] == name )
            return i;

    throw std::runtime_error( "missing column " + name );
}

DenseMatrix
random_spd ( std::size_t  n, std::uint64_t  seed )
{
    std::mt19937_64                     gen( seed );
    std::normal_distribution< double >  g;
    DenseMatrix                         B( n, n );

    for ( auto &  v : B.values() )
        v = g( gen );

    auto  A = multiply_tn( B, B );

    for ( std::size_t  i = 0; i < n; ++i )
        A( i, i ) += double( n );

    return A;
}

//
// 1. format table
//
Outcome
criterion_formats ()
{
    // size, range exponent and u as printed in the reference table
    struct Row { const char *  name; int  bits; int  range; double  u; int  u_log2; };

    const Row  table[] = {
        { "fp64", 64, 308, 1e-16, -53 }, { "fp32", 32, 38, 6e-8, -24 }, { "tf32", 19, 38, 5e-4, -11 },
        { "fp16", 16, 5, 5e-4, -11 },    { "bf16", 16, 38, 4e-3, -8 },  { "fp8-e5m2", 8, 5, 1e-1, -3 },
        { "fp8-e4m3", 8, 2, 6e-2, -4 } };

    const auto    rep  = run_formats();
    const auto &  t    = rep.outputs.at( 0 ).table;
    std::size_t   bad  = 0;
    std::string   why;

    if ( t.rows.size() != 7 )
        return { false, "expected 7 formats" };

    for ( std::size_t  i = 0; i < 7; ++i )
    {
        const auto &  row  = t.rows[i];
        const double  u    = std::stod( row[ column( t, "unit_roundoff" ) ] );
        const double  lo   = std::stod( row[ column( t, "min_normal" ) ] );
        const double  hi   = std::stod( row[ column( t, "max_finite" ) ] );
        const int     bits = std::stoi( row[ column( t, "storage_bits" ) ] );

        // one significant digit
        const bool  u_ok     = std::stod( fmt( "%.0e", u ) ) == table[i].u;
        const bool  exact_ok = u == std::ldexp( 1.0, table[i].u_log2 );
        // the printed range 10^(+-e) matches if either endpoint rounds to exponent e
        const bool  range_ok = std::lround( std::log10( hi ) ) == table[i].range ||
                               std::lround( -std::log10( lo ) ) == table[i].range;

        if ( row[0] != table[i].name || bits != table[i].bits || ! u_ok || ! exact_ok || ! range_ok )
        {
            ++bad;
            why += " " + row[0];
        }
    }

    return { bad == 0, bad == 0 ? "7 formats match size, range and u; exact u = 2^-(t+1)" : "mismatch:" + why };
}

//
// 2. fp16 rounding against the bit-level oracle
//
Outcome
criterion_rounding ()
{
    const auto   xs = oracle::binary16_sample( 1000000, 2024 );
    std::size_t  mismatches = 0;

    for ( double  x : xs )
    {
        const double  a = round_scalar( x, fp16() );
        const double  b = oracle::round_binary16( x );

        if ( ! ( a == b && std::signbit( a ) == std::signbit( b ) ) && ! ( std::isnan( a ) && std::isnan( b ) ) )
            ++mismatches;
    }

    return { mismatches == 0, fmt( "%zu samples, %zu mismatches", xs.size(), mismatches ) };
}

//
// 3. GMRES-IR on steam1 with fp32 LU and fp32 SPAI
//
Outcome
criterion_gmres_ir ()
{
    const auto       h = load_matrix_market( data( "steam1" ) );
    const Vector     b( h.rows, 1.0 );
    PrecisionTriple  triple{ fp32(), fp64(), fp64() };
    SolverParams     params;

    params.gmres_tol = 1e-6;
    params.spai.tau  = 0.1;
    params.u_s       = fp32();

    const auto    xref  = reference_solution( h.csc, b );
    const double  kappa = cond_inf( *h.dense );
    const auto    lu    = refine( h.csc, b, triple, CorrectionSolver::gmres_lu, params, 20, &xref );
    const auto    sp    = refine( h.csc, b, triple, CorrectionSolver::gmres_spai, params, 20, &xref );

    bool  ok = true;

    for ( const auto *  r : { &lu, &sp } )
    {
        const auto &  last = r->trace.steps.back();

        ok = ok && r->trace.converged && last.nbe <= 1e-14 && last.cbe <= 1e-12 && last.ferr <= kappa * 1e-14;
    }

    ok = ok && sp.trace.precond_nnz < lu.trace.precond_nnz;
    ok = ok && sp.trace.total_inner_iterations() >= lu.trace.total_inner_iterations();

    const auto &  a = lu.trace.steps.back();
    const auto &  s = sp.trace.steps.back();

    return { ok, fmt( "LU: nbe %.1e cbe %.1e ferr %.1e its %zu nnz %zu | SPAI: nbe %.1e cbe %.1e ferr %.1e its %zu nnz %zu | kappa %.1e",
                      a.nbe, a.cbe, a.ferr, lu.trace.total_inner_iterations(), lu.trace.precond_nnz,
                      s.nbe, s.cbe, s.ferr, sp.trace.total_inner_iterations(), sp.trace.precond_nnz, kappa ) };
}

//
// 4. SPAI a posteriori feasibility on steam1
//
Outcome
criterion_spai_feasibility ()
{
    const auto  h = load_matrix_market( data( "steam1" ) );
    SpaiConfig  cfg;

    cfg.tau = 0.1;
    cfg.u_s = fp32();

    const auto  res = spai_build( h.csc, cfg );
    const auto  chk = spai_posteriori_check( h.csc, res, cfg.tau, cfg.u_s );

    return { chk.checked > 0 && chk.violations == 0,
             fmt( "%zu successful columns checked, %zu violations, max lhs/rhs %.3f", chk.checked, chk.violations,
                  chk.max_ratio ) };
}

//
// 5. Nystrom on bcsstm07
//
Outcome
criterion_nystrom ()
{
    NystromExperiment  cfg;

    cfg.matrix = data( "bcsstm07" );
    cfg.runs   = 5;
    cfg.seed   = 7;

    const auto    rep  = run_nystrom( cfg );
    const auto &  errs = rep.outputs.at( 0 ).table;
    const auto &  heur = rep.outputs.at( 1 ).table;

    std::vector< std::size_t >                  ks;
    std::map< std::string, std::vector< double > >  curve;

    for ( const auto &  row : errs.rows )
    {
        const auto  k = std::stoul( row[ column( errs, "k" ) ] );
        const auto  p = row[ column( errs, "precision" ) ];

        if ( p == "fp64" )
            ks.push_back( k );
        curve[p].push_back( std::stod( row[ column( errs, "mean_error" ) ] ) );
    }

    double       worst32 = 0.0;
    std::size_t  kstar   = 0;

    for ( std::size_t  i = 0; i < ks.size(); ++i )
    {
        worst32 = std::max( worst32, curve["fp32"][i] / curve["fp64"][i] );

        if ( kstar == 0 && ! ( curve["fp16"][i] <= 10 * curve["fp64"][i] ) )
            kstar = ks[i];
    }

    std::size_t  thr16 = 0;

    for ( const auto &  row : heur.rows )
        if ( row[0] == "fp16" )
            thr16 = std::stoul( row[ column( heur, "threshold_k" ) ] );

    const bool  a = worst32 <= 2.0 && ks.back() >= 300;
    const bool  b = kstar >= 120 && kstar <= 200;
    const bool  c = thr16 >= 120 && thr16 <= 200;

    return { a && b && c, fmt( "(a) max fp32/fp64 %.3f over k<=%zu %s; (b) fp16 departs at k*=%zu %s; (c) heuristic fp16 k<=%zu %s",
                               worst32, ks.back(), a ? "ok" : "FAIL", kstar, b ? "ok" : "FAIL", thr16, c ? "ok" : "FAIL" ) };
}

//
// 6. HODLR global error bound
//
Outcome
criterion_hodlr_bound ()
{
    const std::vector< FloatFormat >  menu = { fp64(), fp32(), bf16(), fp16(), find_format( "fp8-e4m3" ) };
    std::vector< std::pair< std::string, DenseMatrix > >  mats;

    for ( const char *  name : { "steam1", "bcsstm07", "nos7", "saylr3", "1138_bus" } )
        mats.emplace_back( name, *load_matrix_market( data( name ) ).dense );
    mats.emplace_back( "random_spd_256", random_spd( 256, 20240601 ) );

    std::size_t  builds = 0, violations = 0;
    double       worst  = 0.0;

    for ( const auto & [ name, A ] : mats )
    {
        HodlrSvdCache  cache( A );

        for ( int  levels = 2; levels <= 6; ++levels )
            for ( double  eps : { 1e-1, 1e-4, 1e-7 } )
            {
                const auto  H = hodlr_build( A, levels, eps, menu, &cache );
                const auto  e = hodlr_reconstruct_error( A, H );

                ++builds;
                worst = std::max( worst, e.error / e.bound );

                if ( ! ( e.error <= e.bound ) )
                {
                    ++violations;
                    std::printf( "  violation: %s levels=%d eps=%g error=%.3e bound=%.3e\n", name.c_str(), levels, eps,
                                 e.error, e.bound );
                }
            }
    }

    return { violations == 0, fmt( "%zu builds, %zu violations, max error/bound %.3f", builds, violations, worst ) };
}

//
// 7. storage savings ordering
//
Outcome
criterion_hodlr_savings ()
{
    std::vector< std::string >  paths = { data( "1138_bus" ), data( "saylr3" ), data( "nos7" ) };

    // optional, never bundled
    for ( const char *  p : { "psmigr_1", "suitesparse/psmigr_1" } )
        if ( fs::exists( data( p ) ) )
        {
            paths.push_back( data( p ) );
            break;
        }

    bool         ok = true;
    std::string  detail;

    for ( const auto &  path : paths )
    {
        HodlrExperiment  cfg;
        const auto       name = fs::path( path ).stem().string();

        cfg.matrix = path;
        cfg.levels = 8;
        cfg.eps    = { 1e-1, 1e-4, 1e-7 };

        const auto    rep = run_hodlr( cfg );
        const auto &  t   = rep.outputs.at( 0 ).table;
        double        s[3];

        for ( std::size_t  i = 0; i < 3; ++i )
            s[i] = std::stod( t.rows[i][ column( t, "savings_ratio" ) ] );

        const int  levels = std::stoi( t.rows[0][ column( t, "levels" ) ] );

        ok = ok && s[0] > s[1] && s[1] > s[2] && s[2] > 0.0;
        detail += fmt( "%s(l=%d) %.3f>%.3f>%.3f; ", name.c_str(), levels, s[0], s[1], s[2] );
    }

    return { ok, detail };
}

//
// 8. matvec working-precision guideline
//
Outcome
criterion_matvec ()
{
    const double                      eps  = 1e-4;
    const std::vector< FloatFormat >  menu = { fp64(), fp32(), bf16(), fp16(), find_format( "fp8-e4m3" ) };
    std::vector< std::pair< std::string, DenseMatrix > >  mats = {
        { "steam1", *load_matrix_market( data( "steam1" ) ).dense },
        { "bcsstm07", *load_matrix_market( data( "bcsstm07" ) ).dense },
        { "random_spd_128", random_spd( 128, 1 ) },
        { "random_spd_512", random_spd( 512, 2 ) } };

    std::size_t  trials = 0, failures = 0;
    double       worst  = 0.0;

    for ( const auto & [ name, A ] : mats )
    {
        const std::size_t  n = A.rows();

        // coarsest built-in format with u <= eps / n
        const FloatFormat *  work = &fp64();

        for ( const auto &  f : builtin_formats() )
            if ( f.unit_roundoff() <= eps / double( n ) && f.unit_roundoff() > work->unit_roundoff() )
                work = &f;

        HodlrSvdCache  cache( A );

        for ( int  levels : { 3, 5 } )
        {
            const auto  H = hodlr_build( A, levels, eps, menu, &cache );

            std::mt19937_64                           gen( 31 + n + std::size_t( levels ) );
            std::uniform_real_distribution< double >  ud( -1.0, 1.0 );
            Vector                                    x( n );

            for ( int  t = 0; t < 20; ++t )
            {
                for ( auto &  v : x )
                    v = ud( gen );

                const double  be = hodlr_matvec( H, x, *work ).backward_error_estimate;

                ++trials;
                worst = std::max( worst, be );
                failures += be <= 10 * eps ? 0 : 1;
            }
        }
    }

    return { failures == 0, fmt( "%zu trials, %zu above 10*eps, max backward error %.2e", trials, failures, worst ) };
}

//
// 9. classical IR limiting accuracy
//
Outcome
criterion_classical_ir ()
{
    const double                        u = fp64().unit_roundoff();
    std::mt19937_64                     gen( 99 );
    std::normal_distribution< double >  g;
    std::size_t                         accepted = 0, failures = 0, worst_steps = 0;

    while ( accepted < 50 )
    {
        DenseMatrix  A( 100, 100 );

        for ( auto &  v : A.values() )
            v = g( gen );

        if ( ! ( wilkinson_criterion( A, fp64() ).value < 0.1 ) )
            continue;

        ++accepted;

        Vector  b( 100 );

        for ( auto &  v : b )
            v = g( gen );

        const auto   S = SparseMatrixCSC::from_dense( A );
        const auto   r = refine( S, b, PrecisionTriple{ fp64(), fp64(), fp64() }, CorrectionSolver::lu_direct, {}, 3 );
        std::size_t  reached = 99;

        for ( const auto &  st : r.trace.steps )
            if ( st.step <= 3 && st.nbe <= 100 * u )
            {
                reached = st.step;
                break;
            }

        if ( reached > 3 )
            ++failures;
        else
            worst_steps = std::max( worst_steps, reached );
    }

    return { failures == 0, fmt( "%zu matrices, %zu failures, at most %zu steps needed", accepted, failures, worst_steps ) };
}

//
// 10. determinism of the command line tool
//
Outcome
criterion_determinism ()
{
    const fs::path  base = fs::temp_directory_path() / "mpbal_acceptance";

    fs::remove_all( base );

    const std::string  cli = MPBAL_CLI_PATH;
    const std::vector< std::pair< std::string, std::string > >  runs = {
        { "formats", "formats" },
        { "exp-ir", "--seed 3 exp-ir --matrix " + data( "steam1" ) + " --rhs random --solvers lu,gmres-lu,gmres-spai" },
        { "exp-spai", "exp-spai --matrix " + data( "steam1" ) },
        { "exp-nystrom", "--seed 7 exp-nystrom --matrix " + data( "bcsstm07" ) + " --runs 5" },
        { "exp-hodlr", "--seed 5 exp-hodlr --matrix " + data( "nos7" ) } };

    std::size_t  files = 0, differ = 0;
    std::string  bad;

    for ( const auto & [ name, args ] : runs )
    {
        for ( int  rep = 0; rep < 2; ++rep )
        {
            const auto         dir = base / ( name + "_" + std::to_string( rep ) );
            const std::string  cmd = "\"" + cli + "\" --out \"" + dir.string() + "\" " + args + " > /dev/null";

            if ( std::system( cmd.c_str() ) != 0 )
                return { false, name + ": command failed" };
        }

        for ( const auto &  e : fs::directory_iterator( base / ( name + "_0" ) ) )
        {
            const auto  other = base / ( name + "_1" ) / e.path().filename();
            auto        slurp = [] ( const fs::path &  p ) {
                std::ifstream       f( p, std::ios::binary );
                std::ostringstream  s;

                s << f.rdbuf();
                return s.str();
            };

            ++files;

            if ( ! fs::exists( other ) || slurp( e.path() ) != slurp( other ) )
            {
                ++differ;
                bad += " " + e.path().filename().string();
            }
        }
    }

    fs::remove_all( base );

    return { files > 0 && differ == 0, fmt( "%zu CSV files from 5 experiments compared, %zu differ", files, differ ) + bad };
}

}// namespace

int
main ( int  argc, char **  argv )
{
    struct Criterion
    {
        int                         id;
        const char *                name;
        double                      time_limit;   // seconds, 0: none
        std::function< Outcome () > run;
    };

    const std::vector< Criterion >  all = {
        { 1, "format table", 1.0, criterion_formats },
        { 2, "fp16 rounding oracle", 10.0, criterion_rounding },
        { 3, "GMRES-IR on steam1 (LU vs SPAI)", 30.0, criterion_gmres_ir },
        { 4, "SPAI a posteriori feasibility", 0.0, criterion_spai_feasibility },
        { 5, "Nystrom precision curves on bcsstm07", 120.0, criterion_nystrom },
        { 6, "HODLR global error bound", 120.0, criterion_hodlr_bound },
        { 7, "HODLR storage savings ordering", 300.0, criterion_hodlr_savings },
        { 8, "HODLR matvec guideline", 0.0, criterion_matvec },
        { 9, "classical IR limiting accuracy", 0.0, criterion_classical_ir },
        { 10, "CSV determinism", 0.0, criterion_determinism } };

    std::set< int >  only;

    for ( int  i = 1; i < argc; ++i )
        only.insert( std::atoi( argv[i] ) );

    int  failed = 0;

    for ( const auto &  c : all )
    {
        if ( ! only.empty() && ! only.count( c.id ) )
            continue;

        const auto  t0 = std::chrono::steady_clock::now();
        Outcome     o;

        try
        {
            o = c.run();
        }
        catch ( const std::exception &  e )
        {
            o = { false, std::string( "exception: " ) + e.what() };
        }

        const double  sec = std::chrono::duration< double >( std::chrono::steady_clock::now() - t0 ).count();

        if ( c.time_limit > 0 && sec >= c.time_limit )
        {
            o.pass    = false;
            o.detail += fmt( " [runtime %.1f s exceeds %.0f s]", sec, c.time_limit );
        }

        std::printf( "%s  %2d  %-38s %7.2f s  %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, sec, o.detail.c_str() );
        std::fflush( stdout );

        failed += o.pass ? 0 : 1;
    }

    return failed == 0 ? 0 : 1;
}
