#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace vns {

struct SeriesEntry {
  int factor = 1;  ///< odd amplification factor 2k+1
  double value = 0.0;
  double error = 0.0;  ///< standard error
  long long shots = 0;
};

/// Measured expectation values at amplification factors 1, 3, ..., 2m+1.
class AmplifiedSeries {
 public:
  /// Sorts by factor and validates: finite values, odd factors, no duplicates,
  /// contiguous from 1, non-negative stderr. Throws ValidationError.
  explicit AmplifiedSeries(std::vector<SeriesEntry> entries, std::string observable = {});

  /// values[k] belongs to factor 2k+1.
  static AmplifiedSeries from_values(const std::vector<double>& values,
                                     const std::vector<double>& stderrs = {},
                                     std::string observable = {});

  int order() const noexcept { return static_cast<int>(entries_.size()) - 1; }
  const std::vector<SeriesEntry>& entries() const noexcept { return entries_; }
  const std::string& observable() const noexcept { return observable_; }
  double value(int k) const { return entries_.at(static_cast<std::size_t>(k)).value; }
  double error(int k) const { return entries_.at(static_cast<std::size_t>(k)).error; }

 private:
  std::vector<SeriesEntry> entries_;
  std::string observable_;
};

/// Two-layer grid: values(i, j) measured with layer A amplified by 2i+1 and
/// layer B by 2j+1.
class AmplifiedGrid {
 public:
  AmplifiedGrid(Eigen::MatrixXd values, Eigen::MatrixXd stderrs = {}, std::string observable = {});

  int order() const noexcept { return static_cast<int>(values_.rows()) - 1; }
  const Eigen::MatrixXd& values() const noexcept { return values_; }
  /// Zero matrix when no errors were supplied.
  const Eigen::MatrixXd& stderrs() const noexcept { return stderrs_; }
  const std::string& observable() const noexcept { return observable_; }

 private:
  Eigen::MatrixXd values_;
  Eigen::MatrixXd stderrs_;
  std::string observable_;
};

}  // namespace vns
