// Builds a depolarizer-retarder-diattenuator stack, decomposes it, and
// checks that the factors multiply back to the input.
#include <cstdio>
#include <numbers>

#include "muellerkit/muellerkit.hpp"

int main() {
  using namespace muellerkit;
  const CompositionParams p{{0.8, 0.7, 0.6}, std::numbers::pi / 6.0, 1.2, {0.2, -0.1, 0.3}};
  const MuellerMatrix m = 2.5 * p.matrix();

  const auto px = decompose_pixel(m);
  std::printf("status        %d\n", static_cast<int>(px.status));
  std::printf("depolarization %.6f (expected %.6f)\n", px.depolarization, p.expected_depolarization());
  std::printf("retardance     %.6f (expected %.6f)\n", px.retardance, p.retardance);
  std::printf("diattenuation  %.6f (expected %.6f)\n", px.diattenuation, p.expected_diattenuation());

  const MuellerMatrix back = reconstruct(px);
  std::printf("max |M/m00 - reconstruct| = %.3e\n", max_abs_diff(back, normalize(m).matrix));

  const auto rep = is_physical(m);
  std::printf("physical: %s, smallest coherency eigenvalue %.6f\n", rep.physical ? "yes" : "no", rep.min_eigenvalue);
  return 0;
}
