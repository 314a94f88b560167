#pragma once

#include <stdexcept>
#include <string>

namespace mpbal {

struct Error : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

// invalid user/configuration input
struct ConfigError : Error { using Error::Error; };

// zero (or rounded-to-zero) pivot in LU or triangular substitution
struct SingularPivot : Error { using Error::Error; };

// nonpositive pivot in Cholesky; rounding or underflow may have destroyed definiteness
struct NotPositiveDefinite : Error { using Error::Error; };

// iterative kernel hit its iteration cap
struct NoConvergence : Error { using Error::Error; };

// SPAI pattern growth found no candidate index outside the current pattern
struct NoCandidates : Error { using Error::Error; };

// W1^T Omega numerically singular
struct RankDeficientSketch : Error { using Error::Error; };

struct ParseError : Error
{
    ParseError ( const std::string &  what, long  line )
            : Error( "line " + std::to_string( line ) + ": " + what )
            , line_no( line )
    {}

    long  line_no;
};

struct UnsupportedField : Error { using Error::Error; };

}// namespace mpbal
