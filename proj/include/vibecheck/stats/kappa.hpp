#pragma once

#include <span>

#include "vibecheck/core.hpp"

namespace vibecheck::stats {

/// Cohen's kappa between two raters over categories {-1, 0, 1}.
///
/// Chance agreement uses the product of the two marginals. When both raters
/// use one and the same category throughout, agreement is perfect and 1.0 is
/// returned instead of 0/0. Throws LengthMismatch or EmptyInput.
double cohens_kappa(std::span<const Score> a, std::span<const Score> b);

/// Kappa between the first two judges of one vibe column, over the records
/// where both judges' cells exist. NaN-free; 0 cells give 0.
double judge_agreement(const ScoreMatrix& matrix, std::size_t vibe);

}  // namespace vibecheck::stats
