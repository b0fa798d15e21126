#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "nagumo/dynamics.hpp"
#include "nagumo/model.hpp"

namespace nagumo {

/// Sojourn histogram on [lo, hi) with left-closed uniform bins. Values
/// falling at hi or outside the domain are tallied as out_of_range, so
/// total == counts.sum() + out_of_range always holds.
class Histogram {
 public:
  Histogram(double lo, double hi, int bins);

  void accumulate(double value);
  void merge(const Histogram& other);

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  int bins() const { return static_cast<int>(counts_.size()); }
  double bin_width() const { return (hi_ - lo_) / bins(); }
  double bin_left(int i) const { return lo_ + i * bin_width(); }
  double bin_right(int i) const { return lo_ + (i + 1) * bin_width(); }

  std::int64_t count(int i) const { return counts_[i]; }
  std::int64_t total() const { return total_; }
  std::int64_t out_of_range() const { return out_of_range_; }
  std::int64_t in_range() const { return total_ - out_of_range_; }

  /// Fraction of in-range samples in bin i; the per-bin densities
  /// mass(i)/bin_width() integrate to one over [lo, hi].
  double mass(int i) const;
  double density(int i) const { return mass(i) / bin_width(); }

  /// In-range mass in all bins whose right edge lies at or below x.
  double mass_below(double x) const;

 private:
  double lo_, hi_;
  std::vector<std::int64_t> counts_;
  std::int64_t total_ = 0, out_of_range_ = 0;
};

/// Density tabulated on a uniform quadrature grid (odd node count, both
/// endpoints included); values integrate to one by composite Simpson.
/// norm is the partition constant that normalized the raw weights.
struct DensityGrid {
  Vector grid;
  Vector values;
  double norm = 0.0;

  double lo() const { return grid[0]; }
  double hi() const { return grid[grid.size() - 1]; }
  double spacing() const { return (hi() - lo()) / static_cast<double>(grid.size() - 1); }
};

/// Composite Simpson rule over uniformly spaced samples (odd count).
double simpson(const Vector& f, double spacing);

/// Single-cell stationary density exp(-V(u)/D)/Z, normalized on [lo, hi]
/// by composite Simpson on m nodes (m odd, >= 3). The exponent is shifted
/// by its maximum before exponentiating so small D cannot underflow
/// everything to zero.
DensityGrid exact_density(const NonlinearityParams& p, double D, double lo, double hi, Index m);

/// Per-bin masses of a grid density under `bins` uniform bins: Simpson is
/// applied within each bin, which requires the grid to subdivide every bin
/// into an even, positive number of intervals.
Vector bin_masses(const DensityGrid& d, int bins);

/// L1 distance between an empirical histogram and a grid density with the
/// same domain, using per-bin integrated masses on the exact side. Lies in
/// [0, 2]; 0 for perfect agreement, 2 for disjoint support.
double l1_distance(const Histogram& h, const DensityGrid& d);

/// L1 distance between two densities on identical grids.
double l1_distance(const DensityGrid& a, const DensityGrid& b);

// ---- streaming time averages ----

/// Observables tracked along a trajectory.
enum class Observable {
  GradSq,           // sum_i (grad_i)^2
  HessTrace,        // sum_i hess_ii
  LambdaHessTrace,  // lambda * sum_i hess_ii
  EtaGradCoupling,  // sum_i eta_i * grad_i
  Lambda,
  LambdaSq,
  EtaSq,  // mean over components of eta_i^2
  Energy,
  FirstIntegral,
};
inline constexpr int kObservableCount = 9;
using ObservableSample = std::array<double, kObservableCount>;

/// Streaming means with batch-means standard errors. Samples accumulate
/// into 16 equal batches whose size doubles as the stream grows; standard
/// errors come from the scatter of completed batch means, which keeps them
/// honest for autocorrelated trajectory data.
class BatchTable {
 public:
  explicit BatchTable(int cols);

  void add(std::span<const double> row);
  void merge(const BatchTable& other);

  std::int64_t count() const { return total_count_; }
  double mean(int col) const;

  struct Combo {
    double value = 0.0;
    double std_error = 0.0;
    int batches = 0;
  };
  /// Mean and standard error of sum_j weight_j * column_j.
  Combo combo(std::span<const std::pair<int, double>> terms) const;

  static constexpr int kBatches = 16;

 private:
  void roll_current();
  void collapse();

  int cols_;
  std::vector<std::vector<double>> batch_sums_;
  std::vector<std::int64_t> batch_counts_;
  std::vector<double> current_, total_;
  std::int64_t current_count_ = 0, total_count_ = 0, target_ = 1;
};

class RunningAverages {
 public:
  RunningAverages() : table_(kObservableCount) {}

  void add(const ObservableSample& sample);
  void merge(const RunningAverages& other) { table_.merge(other.table_); }

  std::int64_t count() const { return table_.count(); }
  double mean(Observable o) const { return table_.mean(static_cast<int>(o)); }

  BatchTable::Combo combo(std::span<const std::pair<Observable, double>> terms) const;
  BatchTable::Combo average_with_error(Observable o) const { return combo({{{o, 1.0}}}); }

 private:
  BatchTable table_;
};

struct AverageWithError {
  double value = 0.0;
  double std_error = 0.0;
  int batches = 0;
};

/// Trajectory form of the fluctuation-dissipation relation:
/// -<sum (grad_i)^2> + D <sum hess_ii>, with a batch-means standard error.
/// Vanishes (within error) in the stationary regime at noise intensity D.
AverageWithError fd_residual(const RunningAverages& avg, double D);

/// Quadrature form of the same relation for the single cell:
/// int (V')^2 rho - D int V'' rho with rho = exp(-V/D)/Z on [lo, hi].
/// Exact up to quadrature error and boundary mass, so [lo, hi] must be wide
/// enough that the density is negligible at the ends.
double stationary_fd_identity_residual(const NonlinearityParams& p, double D, double lo, double hi,
                                       Index m);

/// Conserved quantity of the deterministic extended dynamics:
/// I = energy + Q_lambda/2 lambda^2 + Q_eta/2 sum eta_i^2 - D zeta.
double first_integral(const ExtendedState& x, const NoiseConfig& cfg, const LatticeSpec& spec,
                      const NonlinearityParams& p);

// ---- Gaussian marginal checks ----

/// Streaming raw moments up to order four, plus batch means for the mean's
/// standard error. Mergeable across trajectories.
class MomentAccumulator {
 public:
  MomentAccumulator() : table_(1) {}

  void add(double x);
  void merge(const MomentAccumulator& other);

  std::int64_t count() const { return table_.count(); }
  double mean() const;
  double variance() const;         // sample variance (n-1 denominator)
  double excess_kurtosis() const;  // m4/m2^2 - 3
  double mean_std_error() const;

 private:
  BatchTable table_;
  double s2_ = 0.0, s3_ = 0.0, s4_ = 0.0;
};

struct GaussianCheckThresholds {
  double mean_sigmas = 3.0;
  double var_rel_tol = 0.05;
  double kurtosis_tol = 0.1;
};

struct GaussianReport {
  std::int64_t count = 0;
  double mean = 0.0, variance = 0.0, excess_kurtosis = 0.0;
  double mean_std_error = 0.0, expected_var = 0.0;
  bool mean_ok = false, var_ok = false, kurtosis_ok = false;
  bool pass() const { return mean_ok && var_ok && kurtosis_ok; }
};

/// Zero-mean Gaussianity check against an expected variance. Requires at
/// least 10^4 samples so the kurtosis estimate carries weight.
GaussianReport gaussian_check(const MomentAccumulator& m, double expected_var,
                              const GaussianCheckThresholds& t = {});
GaussianReport gaussian_check(std::span<const double> samples, double expected_var,
                              const GaussianCheckThresholds& t = {});

}  // namespace nagumo
