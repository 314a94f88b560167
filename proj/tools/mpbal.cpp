#include <chrono>
#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include <mpbal/errors.hpp>
#include <mpbal/harness.hpp>

using namespace mpbal;

int
main ( int  argc, char **  argv )
{
    CLI::App  app{ "Mixed-precision error balancing experiments" };

    app.failure_message( CLI::FailureMessage::help );
    app.require_subcommand( 1 );

    std::string    out  = "results";
    std::uint64_t  seed = 0;

    app.add_option( "--out", out, "output directory for CSV files" )->capture_default_str();
    app.add_option( "--seed", seed, "base seed for all random streams" )->capture_default_str();

    //
    // formats
    //
    auto *  formats = app.add_subcommand( "formats", "list the emulated floating-point formats" );

    //
    // exp-ir
    //
    IrExperiment  ir;
    std::string   ir_uf = "fp32", ir_u = "fp64", ir_ur = "fp64", ir_solvers = "gmres-lu,gmres-spai";
    auto *        exp_ir = app.add_subcommand( "exp-ir", "iterative refinement trace (steps, ferr, nbe, cbe)" );

    exp_ir->add_option( "--matrix", ir.matrix, "Matrix Market file" )->required();
    exp_ir->add_option( "--uf", ir_uf, "factorization / preconditioner precision" )->capture_default_str();
    exp_ir->add_option( "--u", ir_u, "working precision" )->capture_default_str();
    exp_ir->add_option( "--ur", ir_ur, "residual precision" )->capture_default_str();
    exp_ir->add_option( "--solvers", ir_solvers, "lu, gmres-lu, gmres-spai (comma separated)" )->capture_default_str();
    exp_ir->add_option( "--tau", ir.tau, "SPAI residual tolerance" )->capture_default_str();
    exp_ir->add_option( "--us", ir.u_s, "SPAI precision (default: --uf)" );
    exp_ir->add_option( "--gmres-tol", ir.gmres_tol, "relative GMRES tolerance" )->capture_default_str();
    exp_ir->add_option( "--maxit", ir.maxit, "refinement steps" )->capture_default_str();
    exp_ir->add_option( "--rhs", ir.rhs, "right-hand side: ones or random" )->capture_default_str();

    //
    // exp-spai
    //
    SpaiExperiment  sp;
    std::string     sp_us = "fp32";
    auto *          exp_spai = app.add_subcommand( "exp-spai", "build a SPAI preconditioner and check feasibility" );

    exp_spai->add_option( "--matrix", sp.matrix, "Matrix Market file" )->required();
    exp_spai->add_option( "--tau", sp.tau, "column residual tolerance" )->capture_default_str();
    exp_spai->add_option( "--us", sp_us, "SPAI precision" )->capture_default_str();
    exp_spai->add_option( "--max-steps", sp.max_growth_steps, "pattern growth steps per column" )->capture_default_str();
    exp_spai->add_option( "--candidates", sp.candidates_per_step, "indices added per step" )->capture_default_str();
    exp_spai->add_option( "--max-nnz", sp.max_nnz_per_column, "nonzeros per column" )->capture_default_str();

    //
    // exp-nystrom
    //
    NystromExperiment  ny;
    std::string        ny_prec = "fp64,fp32,fp16", ny_u = "fp64";
    auto *             exp_ny = app.add_subcommand( "exp-nystrom", "single-pass Nystrom error against rank" );

    exp_ny->add_option( "--matrix", ny.matrix, "Matrix Market file (symmetric PSD)" )->required();
    exp_ny->add_option( "--kmin", ny.kmin, "smallest rank" )->capture_default_str();
    exp_ny->add_option( "--kmax", ny.kmax, "largest rank" )->capture_default_str();
    exp_ny->add_option( "--kstep", ny.kstep, "rank step" )->capture_default_str();
    exp_ny->add_option( "--precisions", ny_prec, "sketch precisions u_p" )->capture_default_str();
    exp_ny->add_option( "--u", ny_u, "working precision" )->capture_default_str();
    exp_ny->add_option( "--runs", ny.runs, "independent sketches averaged" )->capture_default_str();
    exp_ny->add_option( "--shift-retries", ny.max_shift_retries, "Cholesky retries, shift x10 each" )->capture_default_str();

    //
    // exp-hodlr
    //
    HodlrExperiment  hd;
    std::string      hd_eps = "1e-7,1e-4,1e-1";
    std::string      hd_menu = "fp64,fp32,bf16,fp16,fp8-e4m3";
    auto *           exp_hd = app.add_subcommand( "exp-hodlr", "adaptive-precision HODLR storage and error" );

    hd.matvec_trials = 20;
    exp_hd->add_option( "--matrix", hd.matrix, "Matrix Market file" )->required();
    exp_hd->add_option( "--levels", hd.levels, "tree depth (reduced if n < 2^levels)" )->capture_default_str();
    exp_hd->add_option( "--eps", hd_eps, "truncation tolerances" )->capture_default_str();
    exp_hd->add_option( "--menu", hd_menu, "storage formats available" )->capture_default_str();
    exp_hd->add_option( "--matvec-trials", hd.matvec_trials, "random vectors for the matvec check, 0 to skip" )
        ->capture_default_str();

    CLI11_PARSE( app, argc, argv );

    try
    {
        const auto        t0 = std::chrono::steady_clock::now();
        ExperimentReport  rep;

        if ( formats->parsed() )
            rep = run_formats();
        else if ( exp_ir->parsed() )
        {
            ir.u_f     = find_format( ir_uf );
            ir.u       = find_format( ir_u );
            ir.u_r     = find_format( ir_ur );
            ir.solvers = split_list( ir_solvers );
            ir.seed    = seed;
            rep        = run_ir( ir );
        }
        else if ( exp_spai->parsed() )
        {
            sp.u_s = find_format( sp_us );
            rep    = run_spai( sp );
        }
        else if ( exp_ny->parsed() )
        {
            ny.precisions = parse_format_list( ny_prec );
            ny.u          = find_format( ny_u );
            ny.seed       = seed;
            rep           = run_nystrom( ny );
        }
        else
        {
            hd.eps  = parse_real_list( hd_eps );
            hd.menu = parse_format_list( hd_menu );
            hd.seed = seed;
            rep     = run_hodlr( hd );
        }

        rep.seconds = std::chrono::duration< double >( std::chrono::steady_clock::now() - t0 ).count();

        for ( const auto &  line : rep.summary )
            std::cout << line << '\n';

        for ( const auto &  p : write_outputs( rep, out ) )
            std::cout << "wrote " << p.string() << '\n';

        std::printf( "%s finished in %.2f s\n", rep.experiment.c_str(), rep.seconds );
    }
    catch ( const ConfigError &  e )
    {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    catch ( const std::exception &  e )
    {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }

    return 0;
}
