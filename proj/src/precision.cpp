#include "kerrpair/precision.hpp"

namespace kerrpair {

QuadTridiagonal build_quad_block(int big_n, const Quad& mu, const Quad& alpha_sum,
                                 const Quad& g) {
    QuadTridiagonal h;
    h.diag.resize(static_cast<std::size_t>(big_n) + 1);
    h.offdiag.resize(static_cast<std::size_t>(big_n));
    for (int n = 0; n <= big_n; ++n) {
        const Quad qn = n;
        h.diag[static_cast<std::size_t>(n)] = alpha_sum / 2 * qn * (qn - mu);
    }
    for (int n = 0; n < big_n; ++n) {
        h.offdiag[static_cast<std::size_t>(n)] =
            g * sqrt(Quad(n + 1) * Quad(big_n - n));
    }
    return h;
}

tridiag::Decomposition<Quad> quad_eigendecompose(const QuadTridiagonal& h) {
    return tridiag::solve<Quad>(h.diag, h.offdiag);
}

}  // namespace kerrpair
