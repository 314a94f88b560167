#pragma once
//
// HODLR matrices with per-level storage precision for the off-diagonal factors.
//
// Level k (1..levels) splits every level k-1 diagonal block into two halves;
// the two off-diagonal blocks of each split are stored as X Y^T with
// X = U_r Sigma_r^(1/2), Y = V_r Sigma_r^(1/2) from a truncated SVD. Diagonal
// blocks of the last level are dense leaves kept in fp64.
//

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <tuple>
#include <vector>

#include <mpbal/dense.hpp>
#include <mpbal/densela.hpp>
#include <mpbal/fpemu.hpp>

namespace mpbal {

struct HodlrBlock
{
    int          level = 0;
    std::size_t  row0  = 0;
    std::size_t  col0  = 0;
    std::size_t  rows  = 0;
    std::size_t  cols  = 0;
    DenseMatrix  X;                 // rows x r, entries representable in fmt
    DenseMatrix  Y;                 // cols x r
    FloatFormat  fmt;
    bool         promoted = false;  // stored finer than its level's format

    std::size_t  rank () const { return X.cols(); }
};

struct HodlrLeaf
{
    std::size_t  offset = 0;
    DenseMatrix  D;
};

struct HodlrMatrix
{
    std::size_t                 n      = 0;
    int                         levels = 0;
    double                      eps    = 0.0;
    Vector                      xi;             // xi[k-1] for level k
    std::vector< FloatFormat >  level_formats;  // chosen by the u_k rule, before promotion
    std::vector< HodlrBlock >   blocks;         // level by level, upper block before lower
    std::vector< HodlrLeaf >    leaves;
    RoundingEvents              events;         // from rounding the factors

    // dense fp64 assembly of the stored representation
    DenseMatrix  assemble () const;
};

// [offset, size) of the 2^level diagonal blocks; sizes differ by at most one
std::vector< std::pair< std::size_t, std::size_t > >  hodlr_partition ( std::size_t  n, int  level );

//
// SVDs of the off-diagonal blocks of one matrix, reused across (levels, eps)
// sweeps. Zero rows and columns of a block are dropped before the SVD.
//
class HodlrSvdCache
{
public:
    struct Entry
    {
        std::vector< std::size_t >  rows;   // nonzero rows within the block
        std::vector< std::size_t >  cols;
        DenseMatrix                 U;      // rows.size() x p
        Vector                      sigma;
        DenseMatrix                 V;      // cols.size() x p
    };

    explicit HodlrSvdCache ( const DenseMatrix &  A );

    const DenseMatrix &  matrix () const { return A_; }

    const Entry &  get ( std::size_t  row0, std::size_t  col0, std::size_t  rows, std::size_t  cols );

private:
    using Key = std::tuple< std::size_t, std::size_t, std::size_t, std::size_t >;

    const DenseMatrix &      A_;
    bool                     symmetric_;
    std::map< Key, Entry >   cache_;
};

// smallest r with sqrt(sum_{i>r} sigma_i^2) <= eps * ||sigma||_2
std::size_t  truncation_rank ( std::span< const double >  sigma, double  eps );

// max over sibling off-diagonal blocks of level k of ||H_ij||_F / ||H||_F, k = 1..levels
Vector  xi_levels ( const DenseMatrix &  A, int  levels );

//
// A square, n >= 2^levels; menu must contain fp64 and is sorted internally.
// If cache is given it must wrap A.
//
HodlrMatrix  hodlr_build ( const DenseMatrix &  A, int  levels, double  eps,
                           std::span< const FloatFormat >  menu, HodlrSvdCache *  cache = nullptr );

struct HodlrErrorReport
{
    double  error = 0.0;    // ||A - H||_F / ||A||_F
    double  bound = 0.0;    // (2 sqrt(2) levels + 1) eps
};

HodlrErrorReport  hodlr_reconstruct_error ( const DenseMatrix &  A, const HodlrMatrix &  H );

struct StorageReport
{
    std::uint64_t               bits_adaptive       = 0;
    std::uint64_t               bits_uniform_double = 0;
    double                      savings_ratio       = 0.0;
    std::vector< FloatFormat >  level_formats;
    std::vector< std::size_t >  promoted_blocks;    // per level
};

StorageReport  storage_report ( const HodlrMatrix &  H );

struct HodlrMatvecResult
{
    Vector          y;
    double          backward_error_estimate = 0.0;  // ||y64 - y||_inf / (||H||_inf ||x||_inf)
    RoundingEvents  events;
};

//
// Factor entries are used as stored; all arithmetic is rounded to work_fmt.
// The estimate compares against the fp64 dense assembly of H.
//
HodlrMatvecResult  hodlr_matvec ( const HodlrMatrix &  H, std::span< const double >  x, const FloatFormat &  work_fmt );

}// namespace mpbal
