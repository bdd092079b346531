#pragma once

#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace towerlab {

using BigInt = boost::multiprecision::cpp_int;
using IntMat = std::vector<std::vector<BigInt>>;

/// Diagonal of the Smith normal form of M: d_1 | d_2 | ... | d_min(m,n),
/// all nonnegative, zeros last.  Entries grow quickly under elimination,
/// hence arbitrary precision.
std::vector<BigInt> smith_normal_form(IntMat m);

}  // namespace towerlab
