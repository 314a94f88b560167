#pragma once
//
// Experiment drivers and CSV output for the mpbal command line tool.
//
// Every CSV starts with "# schema=v1" followed by "# key=value" lines echoing
// the full configuration, so rerunning with those values regenerates the file
// byte for byte. Timings never go into a CSV.
//

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <mpbal/fpemu.hpp>

namespace mpbal {

struct CsvTable
{
    std::vector< std::pair< std::string, std::string > >  config;
    std::vector< std::string >                             columns;
    std::vector< std::vector< std::string > >              rows;

    void  add_config ( std::string  key, std::string  value ) { config.emplace_back( std::move( key ), std::move( value ) ); }
};

// scientific notation with 17 significant digits; inf/nan spelled out
std::string  csv_real  ( double  v );
// quoted when it contains a comma, quote or line break
std::string  csv_field ( const std::string &  s );
std::string  render_csv ( const CsvTable &  t );

// write to a temporary file in the same directory, then rename over path
void  write_file_atomic ( const std::filesystem::path &  path, const std::string &  contents );

struct ExperimentOutput
{
    std::string  file;      // name relative to the output directory
    CsvTable     table;
};

struct ExperimentReport
{
    std::string                      experiment;
    std::string                      matrix;
    std::vector< ExperimentOutput >  outputs;
    std::vector< std::string >       summary;       // human-readable lines
    double                           seconds = 0.0; // printed, never written to CSV
};

// writes every output atomically below dir (created if missing); returns the paths
std::vector< std::filesystem::path >  write_outputs ( const ExperimentReport &  r, const std::filesystem::path &  dir );

//
// experiments
//

ExperimentReport  run_formats ();

struct IrExperiment
{
    std::string                 matrix;
    FloatFormat                 u_f = fp32();
    FloatFormat                 u   = fp64();
    FloatFormat                 u_r = fp64();
    std::vector< std::string >  solvers = { "gmres-lu", "gmres-spai" };
    double                      tau = 0.1;
    std::string                 u_s;            // empty: same as u_f
    double                      gmres_tol = 1e-6;
    std::size_t                 maxit = 20;
    std::string                 rhs = "ones";   // ones | random
    std::uint64_t               seed = 0;
};

ExperimentReport  run_ir ( const IrExperiment &  cfg );

struct SpaiExperiment
{
    std::string    matrix;
    double         tau = 0.1;
    FloatFormat    u_s = fp32();
    std::size_t    max_growth_steps = 10;
    std::size_t    candidates_per_step = 5;
    std::size_t    max_nnz_per_column = 50;
};

ExperimentReport  run_spai ( const SpaiExperiment &  cfg );

struct NystromExperiment
{
    std::string                 matrix;
    std::size_t                 kmin  = 20;
    std::size_t                 kmax  = 300;
    std::size_t                 kstep = 20;
    std::vector< FloatFormat >  precisions = { fp64(), fp32(), fp16() };
    FloatFormat                 u = fp64();
    std::size_t                 runs = 5;
    std::uint64_t               seed = 0;
    std::size_t                 max_shift_retries = 20;
};

ExperimentReport  run_nystrom ( const NystromExperiment &  cfg );

struct HodlrExperiment
{
    std::string                 matrix;
    int                         levels = 8;     // reduced to the largest feasible depth
    std::vector< double >       eps = { 1e-7, 1e-4, 1e-1 };
    std::vector< FloatFormat >  menu;           // empty: fp64, fp32, bf16, fp16, fp8-e4m3
    std::uint64_t               seed = 0;       // matvec vectors
    std::size_t                 matvec_trials = 0;
};

ExperimentReport  run_hodlr ( const HodlrExperiment &  cfg );

// comma separated list helpers shared with the CLI
std::vector< std::string >  split_list ( const std::string &  s );
std::vector< FloatFormat >  parse_format_list ( const std::string &  s );
std::vector< double >       parse_real_list ( const std::string &  s );

}// namespace mpbal
