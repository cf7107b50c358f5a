#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "cfsim/geometry.hpp"
#include "cfsim/params.hpp"
#include "cfsim/rng.hpp"

namespace cfsim {

// Ordered set S of DFT beam indices, a subset of {0, ..., M-1}.
struct AngularSupport {
  std::vector<int> indices;  // ascending

  int size() const { return static_cast<int>(indices.size()); }
};

// Beam indices whose quantized angle 2*pi*m/M lies within delta/2 of
// theta (circular distance, closed interval).  Never empty: when delta
// is narrower than the beam spacing the nearest beam is used.
AngularSupport angular_support(double theta, double delta, int M);

// M x |S| matrix of unitary-DFT columns selected by S, with entries
// F(m, n) = exp(-i*2*pi*m*n/M)/sqrt(M).  Columns are orthonormal.
Eigen::MatrixXcd dft_submatrix(const AngularSupport& support, int M);

// Per-edge angular supports and subspace bases for one layout.  These
// depend only on positions, Delta and M, so they are computed once per
// layout and shared (read-only) across fading draws.  Supports are
// contiguous index windows on the DFT circle, so distinct bases number
// at most M; they are pooled and referenced per edge.
struct SubspaceInfo {
  int L = 0;
  int K = 0;
  int M = 0;
  std::vector<AngularSupport> supports;     // L*K entries, index l*K + k
  std::vector<int> basis_index;             // per edge, into basis_pool
  std::vector<Eigen::MatrixXcd> basis_pool; // distinct submatrices

  const AngularSupport& support(int l, int k) const {
    return supports[static_cast<std::size_t>(l) * K + k];
  }
  const Eigen::MatrixXcd& basis(int l, int k) const {
    return basis_pool[static_cast<std::size_t>(
        basis_index[static_cast<std::size_t>(l) * K + k])];
  }
};

SubspaceInfo build_subspace_info(const Layout& layout, const SystemParams& params);

// One small-scale fading realization of the full channel.
struct ChannelState {
  std::shared_ptr<const SubspaceInfo> subspace;
  Eigen::MatrixXcd H;                 // LM x K, block (l, k) at rows [l*M, (l+1)*M)
  std::vector<Eigen::VectorXcd> nu;   // per-edge |S| x 1 CN(0, I) vectors, index l*K + k

  Eigen::MatrixXcd::ConstBlockXpr block(int l, int k) const {
    return H.block(l * subspace->M, k, subspace->M, 1);
  }
};

// h = sqrt(beta*M/|S|) * F * nu with nu i.i.d. CN(0, 1); E[||h||^2] = beta*M.
// The nu vector is written to *nu_out when supplied.
Eigen::VectorXcd draw_channel(double beta, const Eigen::MatrixXcd& basis, int M,
                              RngStream& stream, Eigen::VectorXcd* nu_out = nullptr);

// Draws every block h_{l,k} from a per-edge stream derived from
// `fading_key` and the edge index l*K + k, so generation order (and
// parallelization) cannot change the result.
ChannelState assemble_channel_state(std::shared_ptr<const SubspaceInfo> subspace,
                                    const LsfcMatrix& lsfc, std::uint64_t fading_key);

}  // namespace cfsim
