#include "cfsim/channel.hpp"

#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace cfsim {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Circular distance between two angles, in [0, pi].
double circular_distance(double a, double b) {
  double d = std::fmod(std::abs(a - b), kTwoPi);
  return std::min(d, kTwoPi - d);
}

// Absolute slack on the half-width comparison so that beams sitting
// exactly on the interval boundary are included regardless of rounding.
constexpr double kBoundaryTol = 1e-12;

}  // namespace

AngularSupport angular_support(double theta, double delta, int M) {
  if (!(delta > 0.0) || M < 1) {
    throw std::invalid_argument("angular_support: need delta > 0 and M >= 1");
  }
  AngularSupport s;
  for (int m = 0; m < M; ++m) {
    const double beam = kTwoPi * m / M;
    if (circular_distance(beam, theta) <= delta / 2.0 + kBoundaryTol) {
      s.indices.push_back(m);
    }
  }
  if (s.indices.empty()) {
    // Spread narrower than the beam spacing: fall back to the nearest
    // quantized angle (lowest index on a tie).
    int best = 0;
    double best_dist = circular_distance(0.0, theta);
    for (int m = 1; m < M; ++m) {
      const double dist = circular_distance(kTwoPi * m / M, theta);
      if (dist < best_dist) {
        best = m;
        best_dist = dist;
      }
    }
    s.indices.push_back(best);
  }
  return s;
}

Eigen::MatrixXcd dft_submatrix(const AngularSupport& support, int M) {
  const double scale = 1.0 / std::sqrt(static_cast<double>(M));
  Eigen::MatrixXcd f(M, support.size());
  for (int c = 0; c < support.size(); ++c) {
    const int n = support.indices[static_cast<std::size_t>(c)];
    for (int m = 0; m < M; ++m) {
      // exp(-i*2*pi*m*n/M)/sqrt(M); reduce m*n mod M first so the phase
      // argument stays small and reproducible.
      const double phase = -kTwoPi * static_cast<double>((static_cast<long long>(m) * n) % M) / M;
      f(m, c) = std::polar(scale, phase);
    }
  }
  return f;
}

SubspaceInfo build_subspace_info(const Layout& layout, const SystemParams& params) {
  const int L = static_cast<int>(layout.rrh_positions.size());
  const int K = static_cast<int>(layout.ue_positions.size());
  const int M = params.antennas_per_rrh;

  SubspaceInfo info;
  info.L = L;
  info.K = K;
  info.M = M;
  info.supports.reserve(static_cast<std::size_t>(L) * K);
  info.basis_index.reserve(static_cast<std::size_t>(L) * K);

  // Supports are index windows; key the pool by the exact index set
  // (first index + size suffices for contiguity, but the full set is
  // cheap and unambiguous).
  std::map<std::vector<int>, int> pool_index;
  for (int l = 0; l < L; ++l) {
    for (int k = 0; k < K; ++k) {
      const double theta =
          torus_direction(layout.rrh_positions[static_cast<std::size_t>(l)],
                          layout.ue_positions[static_cast<std::size_t>(k)], params.area_side);
      AngularSupport s = angular_support(theta, params.angular_spread, M);
      auto [it, inserted] = pool_index.try_emplace(s.indices, -1);
      if (inserted) {
        it->second = static_cast<int>(info.basis_pool.size());
        info.basis_pool.push_back(dft_submatrix(s, M));
      }
      info.basis_index.push_back(it->second);
      info.supports.push_back(std::move(s));
    }
  }
  return info;
}

Eigen::VectorXcd draw_channel(double beta, const Eigen::MatrixXcd& basis, int M,
                              RngStream& stream, Eigen::VectorXcd* nu_out) {
  if (!(beta > 0.0)) {
    throw std::invalid_argument("draw_channel: beta must be > 0");
  }
  const Eigen::Index support_size = basis.cols();
  Eigen::VectorXcd nu(support_size);
  for (Eigen::Index i = 0; i < support_size; ++i) {
    nu(i) = stream.cnormal();
  }
  const double scale = std::sqrt(beta * M / static_cast<double>(support_size));
  Eigen::VectorXcd h = scale * (basis * nu);
  if (nu_out != nullptr) {
    *nu_out = std::move(nu);
  }
  return h;
}

ChannelState assemble_channel_state(std::shared_ptr<const SubspaceInfo> subspace,
                                    const LsfcMatrix& lsfc, std::uint64_t fading_key) {
  const SubspaceInfo& info = *subspace;
  const int L = info.L;
  const int K = info.K;
  const int M = info.M;

  ChannelState state;
  state.subspace = std::move(subspace);
  state.H.resize(static_cast<Eigen::Index>(L) * M, K);
  state.nu.resize(static_cast<std::size_t>(L) * K);

  for (int l = 0; l < L; ++l) {
    for (int k = 0; k < K; ++k) {
      const std::uint64_t edge = static_cast<std::uint64_t>(l) * K + k;
      RngStream stream(derive_stream(fading_key, {edge}));
      Eigen::VectorXcd nu;
      state.H.block(static_cast<Eigen::Index>(l) * M, k, M, 1) =
          draw_channel(lsfc.beta(l, k), info.basis(l, k), M, stream, &nu);
      state.nu[static_cast<std::size_t>(edge)] = std::move(nu);
    }
  }
  return state;
}

}  // namespace cfsim
