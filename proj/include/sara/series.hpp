#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "sara/error.hpp"

namespace sara {

using Index = Eigen::Index;

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// An observed sequence Y_1..Y_n, optionally annotated with genomic
/// coordinates and a label (chromosome id, sample name).
///
/// Indices in the public API are 1-based "change-point" indices: a
/// change-point at tau means the mean shifts between Y_tau and Y_{tau+1}.
/// Storage is the usual 0-based Eigen vector.
template <typename Scalar = double>
class Series {
 public:
  using Vector = VectorX<Scalar>;

  explicit Series(Vector values, std::vector<std::int64_t> positions = {},
                  std::string label = {})
      : values_(std::move(values)),
        positions_(std::move(positions)),
        label_(std::move(label)) {
    if (values_.size() < 2) {
      throw Error(ErrorKind::InvalidSeries,
                  "series needs at least 2 observations, got " +
                      std::to_string(values_.size()));
    }
    for (Index i = 0; i < values_.size(); ++i) {
      if (!std::isfinite(static_cast<double>(values_(i)))) {
        throw Error(ErrorKind::NonFiniteValue,
                    "non-finite value at index " + std::to_string(i + 1));
      }
    }
    if (!positions_.empty()) {
      if (static_cast<Index>(positions_.size()) != values_.size()) {
        throw Error(ErrorKind::InvalidSeries,
                    "positions and values differ in length");
      }
      for (std::size_t i = 1; i < positions_.size(); ++i) {
        if (positions_[i] <= positions_[i - 1]) {
          throw Error(ErrorKind::InvalidSeries,
                      "positions must be strictly increasing (index " +
                          std::to_string(i + 1) + ")");
        }
      }
    }
  }

  Index size() const noexcept { return values_.size(); }
  const Vector& values() const noexcept { return values_; }
  const std::vector<std::int64_t>& positions() const noexcept {
    return positions_;
  }
  bool has_positions() const noexcept { return !positions_.empty(); }
  const std::string& label() const noexcept { return label_; }

 private:
  Vector values_;
  std::vector<std::int64_t> positions_;
  std::string label_;
};

}  // namespace sara
