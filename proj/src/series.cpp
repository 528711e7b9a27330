#include "vns/series.hpp"

#include <algorithm>
#include <cmath>

#include "vns/errors.hpp"

namespace vns {

AmplifiedSeries::AmplifiedSeries(std::vector<SeriesEntry> entries, std::string observable)
    : entries_(std::move(entries)), observable_(std::move(observable)) {
  if (entries_.empty()) throw ValidationError("empty amplified series");
  for (const auto& e : entries_) {
    if (!std::isfinite(e.value) || !std::isfinite(e.error)) throw ValidationError("NaN value");
    if (e.factor < 1 || e.factor % 2 == 0) throw ValidationError("even amplification factor");
    if (e.error < 0.0) throw ValidationError("negative standard error");
    if (e.shots < 0) throw ValidationError("negative shot count");
  }
  std::sort(entries_.begin(), entries_.end(),
            [](const SeriesEntry& a, const SeriesEntry& b) { return a.factor < b.factor; });
  for (std::size_t i = 1; i < entries_.size(); ++i)
    if (entries_[i].factor == entries_[i - 1].factor)
      throw ValidationError("duplicate amplification factor");
  for (std::size_t i = 0; i < entries_.size(); ++i)
    if (entries_[i].factor != static_cast<int>(2 * i + 1))
      throw ValidationError("non-contiguous odd factors");
}

AmplifiedSeries AmplifiedSeries::from_values(const std::vector<double>& values,
                                             const std::vector<double>& stderrs,
                                             std::string observable) {
  if (!stderrs.empty() && stderrs.size() != values.size())
    throw ValidationError("stderr list length does not match values");
  std::vector<SeriesEntry> entries;
  entries.reserve(values.size());
  for (std::size_t k = 0; k < values.size(); ++k)
    entries.push_back({static_cast<int>(2 * k + 1), values[k], stderrs.empty() ? 0.0 : stderrs[k], 0});
  return AmplifiedSeries(std::move(entries), std::move(observable));
}

AmplifiedGrid::AmplifiedGrid(Eigen::MatrixXd values, Eigen::MatrixXd stderrs, std::string observable)
    : values_(std::move(values)), stderrs_(std::move(stderrs)), observable_(std::move(observable)) {
  if (values_.size() == 0 || values_.rows() != values_.cols())
    throw ValidationError("amplified grid must be square and nonempty");
  if (stderrs_.size() == 0) stderrs_ = Eigen::MatrixXd::Zero(values_.rows(), values_.cols());
  if (stderrs_.rows() != values_.rows() || stderrs_.cols() != values_.cols())
    throw ValidationError("amplified grid stderr shape does not match values");
  if (!values_.allFinite() || !stderrs_.allFinite()) throw ValidationError("NaN value");
  if ((stderrs_.array() < 0.0).any()) throw ValidationError("negative standard error");
}

}  // namespace vns
