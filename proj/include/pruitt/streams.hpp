#pragma once

#include <cstdint>

namespace pruitt::stream_salt {

// Disjoint stream-id namespaces per estimator family. Different estimators
// drawing from the same seed must not reuse streams: several checks compare
// two Monte Carlo quantities, and common random numbers would turn those
// comparisons into identities.
inline constexpr std::uint64_t kFunctionals = 0x0100'0000'0000'0000ull;
inline constexpr std::uint64_t kCoordMoments = 0x0200'0000'0000'0000ull;
inline constexpr std::uint64_t kExitPaths = 0x0300'0000'0000'0000ull;
inline constexpr std::uint64_t kSnStats = 0x0400'0000'0000'0000ull;
inline constexpr std::uint64_t kGaussianSum = 0x0500'0000'0000'0000ull;
inline constexpr std::uint64_t kTruncatedMoment = 0x0600'0000'0000'0000ull;
inline constexpr std::uint64_t kGenericTests = 0x0700'0000'0000'0000ull;

// Harness jobs offset their stream ids inside a salt namespace.
inline constexpr std::uint64_t job_offset(std::uint64_t job) { return job << 32; }

}  // namespace pruitt::stream_salt
