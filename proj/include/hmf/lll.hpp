#pragma once

#include <functional>
#include <vector>

#include "hmf/rational.hpp"

namespace hmf {

using DMat = std::vector<std::vector<double>>;

// LLL-reduces a positive definite Gram matrix in place (delta = 0.99) and
// returns the unimodular transform U with  G_red = U G U^T.  Rows of U are
// the coordinates of the reduced basis over the input basis.
std::vector<std::vector<Int>> lll_reduce_gram(DMat& gram, double delta = 0.99);

// Exact variant for an integer Gram matrix (entries may be hundreds of bits
// wide, which breaks the floating point version). Same contract as above.
std::vector<std::vector<Int>> lll_reduce_gram_exact(std::vector<std::vector<Int>>& gram);

// Enumerates all nonzero x (up to sign) with  x G x^T <= radius  and calls
// visit(x, value). The Gram matrix must be positive definite. Vectors are
// produced in no particular order; callers sort by value if needed.
void enumerate_short_vectors(const DMat& gram, double radius,
                             const std::function<void(const std::vector<long>&, double)>& visit);

}  // namespace hmf
