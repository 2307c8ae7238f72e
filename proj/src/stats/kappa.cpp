#include "vibecheck/stats/kappa.hpp"

#include <array>
#include <vector>

#include "vibecheck/errors.hpp"

namespace vibecheck::stats {

double cohens_kappa(std::span<const Score> a, std::span<const Score> b) {
  if (a.size() != b.size())
    throw LengthMismatch("kappa needs paired ratings, got " + std::to_string(a.size()) + " and " +
                         std::to_string(b.size()));
  if (a.empty()) throw EmptyInput("kappa needs at least one rating pair");

  std::array<std::array<std::size_t, 3>, 3> table{};
  for (std::size_t i = 0; i < a.size(); ++i) ++table[a[i].value() + 1][b[i].value() + 1];

  const double n = static_cast<double>(a.size());
  double observed = 0.0, expected = 0.0;
  for (int k = 0; k < 3; ++k) {
    observed += static_cast<double>(table[k][k]);
    double row = 0.0, col = 0.0;
    for (int m = 0; m < 3; ++m) {
      row += static_cast<double>(table[k][m]);
      col += static_cast<double>(table[m][k]);
    }
    expected += row * col;
  }
  observed /= n;
  expected /= n * n;
  if (expected >= 1.0) return 1.0;
  return (observed - expected) / (1.0 - expected);
}

double judge_agreement(const ScoreMatrix& matrix, std::size_t vibe) {
  if (matrix.judge_count() < 2) return 1.0;
  std::vector<Score> first, second;
  for (std::size_t r = 0; r < matrix.records().size(); ++r) {
    auto x = matrix.judge_score(r, vibe, 0);
    auto y = matrix.judge_score(r, vibe, 1);
    if (x && y) {
      first.push_back(*x);
      second.push_back(*y);
    }
  }
  if (first.empty()) return 0.0;
  return cohens_kappa(first, second);
}

}  // namespace vibecheck::stats
