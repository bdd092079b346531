#include "towerlab/snf.hpp"

#include <cstddef>

namespace towerlab {

namespace {

BigInt iabs(const BigInt& x) { return x < 0 ? BigInt(-x) : x; }

}  // namespace

std::vector<BigInt> smith_normal_form(IntMat m) {
  std::size_t rows = m.size();
  std::size_t cols = rows ? m[0].size() : 0;
  std::size_t rank_bound = rows < cols ? rows : cols;
  std::vector<BigInt> diag(rank_bound, 0);

  for (std::size_t s = 0; s < rank_bound; ++s) {
    // Locate the minimal nonzero entry in the trailing submatrix.
    std::size_t pr = s, pc = s;
    bool found = false;
    BigInt best = 0;
    for (std::size_t i = s; i < rows; ++i)
      for (std::size_t j = s; j < cols; ++j)
        if (m[i][j] != 0) {
          BigInt a = iabs(m[i][j]);
          if (!found || a < best) {
            best = a;
            pr = i;
            pc = j;
            found = true;
          }
        }
    if (!found) break;

    std::swap(m[s], m[pr]);
    for (std::size_t i = s; i < rows; ++i) std::swap(m[i][s], m[i][pc]);

    // Clear row and column s; restart when a remainder shrinks the pivot.
    for (;;) {
      bool again = false;
      for (std::size_t i = s + 1; i < rows; ++i) {
        if (m[i][s] == 0) continue;
        BigInt q = m[i][s] / m[s][s];
        for (std::size_t j = s; j < cols; ++j) m[i][j] -= q * m[s][j];
        if (m[i][s] != 0) {
          std::swap(m[s], m[i]);
          again = true;
        }
      }
      for (std::size_t j = s + 1; j < cols; ++j) {
        if (m[s][j] == 0) continue;
        BigInt q = m[s][j] / m[s][s];
        for (std::size_t i = s; i < rows; ++i) m[i][j] -= q * m[i][s];
        if (m[s][j] != 0) {
          for (std::size_t i = s; i < rows; ++i) std::swap(m[i][s], m[i][j]);
          again = true;
        }
      }
      if (!again) break;
    }

    // Divisibility fix-up: pivot must divide every trailing entry.
    bool redo = false;
    for (std::size_t i = s + 1; i < rows && !redo; ++i)
      for (std::size_t j = s + 1; j < cols && !redo; ++j)
        if (m[i][j] % m[s][s] != 0) {
          for (std::size_t k = s; k < cols; ++k) m[s][k] += m[i][k];
          redo = true;
        }
    if (redo) {
      --s;
      continue;
    }
    diag[s] = iabs(m[s][s]);
  }
  return diag;
}

}  // namespace towerlab
