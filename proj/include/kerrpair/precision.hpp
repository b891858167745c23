#pragma once

// Extended-precision helpers for quantities that sit far below double resolution
// (high-order pair splittings, perturbation-series fits).

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <vector>

#include "kerrpair/model.hpp"
#include "kerrpair/tridiagonal.hpp"

namespace kerrpair {

using Quad = boost::multiprecision::cpp_bin_float_quad;

struct QuadTridiagonal {
    std::vector<Quad> diag;
    std::vector<Quad> offdiag;
};

// Offset-free N block with the resonance parameter given explicitly (so integer
// mu stays exactly integer) and the coupling g.
[[nodiscard]] QuadTridiagonal build_quad_block(int big_n, const Quad& mu, const Quad& alpha_sum,
                                               const Quad& g);

[[nodiscard]] tridiag::Decomposition<Quad> quad_eigendecompose(const QuadTridiagonal& h);

}  // namespace kerrpair
