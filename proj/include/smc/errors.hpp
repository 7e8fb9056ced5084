#pragma once

#include <stdexcept>
#include <string>

namespace smc {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DomainError : Error {
  using Error::Error;
};

// Cell volume times cell count exceeds the spheroid volume.
struct OverpackedSpheroid : Error {
  using Error::Error;
};

// Boundary-condition system not solvable to the required residual.
struct SingularSystem : Error {
  using Error::Error;
};

// Mode sum still contributing above rel_tol at n_max.
struct TruncationNotConverged : Error {
  using Error::Error;
};

// Spectral tail of a sweep not negligible at the grid edge.
struct BandwidthTooNarrow : Error {
  using Error::Error;
};

// Reconstructed series dips below the allowed undershoot.
struct NegativeConcentration : Error {
  using Error::Error;
};

// Time grid does not cover the requested sample times.
struct GridTooShort : Error {
  using Error::Error;
};

struct MemoryTooLarge : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct PresetUnknown : Error {
  using Error::Error;
};

}  // namespace smc
