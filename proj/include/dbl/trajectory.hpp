#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "dbl/errors.hpp"
#include "dbl/spectral.hpp"

namespace dbl {

class TrajectoryRecord {
 public:
  explicit TrajectoryRecord(const SpectralGrid& g) : grid_(g) {}

  void append(double t, Field f) {
    if (!(f.grid() == grid_)) throw ConfigError("snapshot grid differs from record grid");
    if (!times_.empty() && !(t > times_.back()))
      throw ConfigError("record times must be strictly increasing");
    times_.push_back(t);
    snaps_.push_back(std::move(f));
  }

  const SpectralGrid& grid() const { return grid_; }
  const std::vector<double>& times() const { return times_; }
  const std::vector<Field>& snapshots() const { return snaps_; }
  std::size_t size() const { return times_.size(); }
  bool empty() const { return times_.empty(); }
  const Field& operator[](std::size_t i) const { return snaps_[i]; }

  // Duration covered by the record.
  double span() const { return times_.empty() ? 0.0 : times_.back() - times_.front(); }

  // Sampling step; throws unless times are uniform to rel_tol.
  double uniform_step(double rel_tol = 1e-9) const {
    if (times_.size() < 2) throw ConfigError("record needs at least two samples");
    const double dt = span() / static_cast<double>(times_.size() - 1);
    for (std::size_t i = 1; i < times_.size(); ++i)
      if (std::abs(times_[i] - times_[i - 1] - dt) > rel_tol * dt)
        throw ConfigError("record time sampling is not uniform");
    return dt;
  }

  std::map<std::string, std::string> metadata;

 private:
  SpectralGrid grid_;
  std::vector<double> times_;
  std::vector<Field> snaps_;
};

}  // namespace dbl
