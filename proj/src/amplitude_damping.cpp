#include <cmath>

#include "qam/errors.hpp"
#include "qam/models.hpp"

namespace qam {

AmplitudeDampingChannel local_amplitude_damping(const std::vector<double>& q,
                                                const std::vector<double>& theta) {
  if (q.size() != theta.size()) fail(ErrorCode::LengthMismatch, "q and theta lengths differ");
  if (q.empty()) fail(ErrorCode::InvalidPatternSet, "no patterns");
  for (double v : q)
    if (!(v >= 0.0 && v <= 1.0)) fail(ErrorCode::RateOutOfRange, "q must lie in [0, 1]");
  LayoutSpec spec;
  for (std::size_t mu = 0; mu < q.size(); ++mu) spec.stable.push_back({1, 1});
  SpaceLayout layout = build_layout(spec);
  const auto dim = static_cast<Eigen::Index>(layout.total_dim());
  ComplexMatrix k0 = ComplexMatrix::Zero(dim, dim);
  ComplexMatrix k1 = ComplexMatrix::Zero(dim, dim);
  ComplexMatrix k2 = ComplexMatrix::Zero(dim, dim);
  for (std::size_t mu = 0; mu < q.size(); ++mu) {
    const auto s = static_cast<Eigen::Index>(layout.global_index({BlockKind::Stable, mu}, 0));
    const auto w = static_cast<Eigen::Index>(
        layout.global_index(layout.decaying_blocks_of({BlockKind::Stable, mu}).front(), 0));
    k0(s, s) = std::cos(theta[mu]);
    k0(w, w) = std::sqrt(1.0 - q[mu]);
    k1(s, s) = std::sin(theta[mu]);
    k2(s, w) = std::sqrt(q[mu]);
  }
  return {KrausChannel({k0, k1, k2}, layout), layout};
}

}  // namespace qam
