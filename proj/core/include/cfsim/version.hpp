#pragma once

namespace cfsim {

// Version string embedded in result manifests.  Kept as a constant (rather
// than a configure-time stamp) so that repeated builds of the same sources
// produce byte-identical output files.
inline constexpr const char* kVersion = "0.1.0";

}  // namespace cfsim
