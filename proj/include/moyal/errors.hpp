#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace moyal {

// Base for every error raised by the library.
struct MoyalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConstructionError : MoyalError { using MoyalError::MoyalError; };
struct SingularThetaError : MoyalError { using MoyalError::MoyalError; };
struct RepresentationError : MoyalError { using MoyalError::MoyalError; };
struct SpectralOrderError : MoyalError { using MoyalError::MoyalError; };
struct GridMismatchError : MoyalError { using MoyalError::MoyalError; };
struct NumericalError : MoyalError { using MoyalError::MoyalError; };
struct DegenerateInputError : MoyalError { using MoyalError::MoyalError; };
struct DivergentSeriesError : MoyalError { using MoyalError::MoyalError; };
struct NormalizationError : MoyalError { using MoyalError::MoyalError; };
struct ConfigError : MoyalError { using MoyalError::MoyalError; };
struct UsageError : MoyalError { using MoyalError::MoyalError; };

/// Non-fatal conditions attached to results instead of thrown.
///
/// A grid that is too small for the symbol it carries still yields a value;
/// the caller decides whether the value is usable.
struct Diagnostics {
  bool grid_too_small = false;
  std::vector<std::string> notes;

  void flag_grid_too_small(std::string why) {
    grid_too_small = true;
    notes.push_back("GridTooSmallWarning: " + std::move(why));
  }

  void merge(const Diagnostics& other) {
    grid_too_small = grid_too_small || other.grid_too_small;
    notes.insert(notes.end(), other.notes.begin(), other.notes.end());
  }
};

}  // namespace moyal
