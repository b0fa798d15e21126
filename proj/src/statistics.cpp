#include "nagumo/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace nagumo {

Histogram::Histogram(double lo, double hi, int bins) : lo_(lo), hi_(hi) {
  if (!(lo < hi)) throw std::invalid_argument("Histogram: lo must be < hi");
  if (bins < 1) throw std::invalid_argument("Histogram: bins must be >= 1");
  counts_.assign(static_cast<std::size_t>(bins), 0);
}

void Histogram::accumulate(double value) {
  ++total_;
  if (!(value >= lo_ && value < hi_)) {  // NaN and value == hi land here
    ++out_of_range_;
    return;
  }
  auto idx = static_cast<std::int64_t>((value - lo_) / bin_width());
  if (idx >= bins()) idx = bins() - 1;  // rounding guard at the right edge
  ++counts_[static_cast<std::size_t>(idx)];
}

void Histogram::merge(const Histogram& other) {
  if (other.lo_ != lo_ || other.hi_ != hi_ || other.bins() != bins())
    throw std::invalid_argument("Histogram::merge: domain or bin count mismatch");
  for (int i = 0; i < bins(); ++i) counts_[i] += other.counts_[i];
  total_ += other.total_;
  out_of_range_ += other.out_of_range_;
}

double Histogram::mass(int i) const {
  const auto n = in_range();
  return n > 0 ? static_cast<double>(counts_[i]) / static_cast<double>(n) : 0.0;
}

double Histogram::mass_below(double x) const {
  const double tol = 1e-9 * (hi_ - lo_);
  double m = 0.0;
  for (int i = 0; i < bins(); ++i)
    if (bin_right(i) <= x + tol) m += mass(i);
  return m;
}

double simpson(const Vector& f, double spacing) {
  const Index m = f.size();
  if (m < 3 || m % 2 == 0)
    throw std::invalid_argument("simpson: need an odd number of nodes, at least 3");
  double odd = 0.0, even = 0.0;
  for (Index i = 1; i < m - 1; i += 2) odd += f[i];
  for (Index i = 2; i < m - 1; i += 2) even += f[i];
  return spacing / 3.0 * (f[0] + f[m - 1] + 4.0 * odd + 2.0 * even);
}

DensityGrid exact_density(const NonlinearityParams& p, double D, double lo, double hi, Index m) {
  p.check();
  if (!(D > 0.0)) throw std::invalid_argument("exact_density: D must be > 0");
  if (!(lo < hi)) throw std::invalid_argument("exact_density: lo must be < hi");
  if (m < 3 || m % 2 == 0)
    throw std::invalid_argument("exact_density: m must be odd and >= 3");

  DensityGrid d;
  d.grid.resize(m);
  const double h = (hi - lo) / static_cast<double>(m - 1);
  for (Index i = 0; i < m; ++i) d.grid[i] = lo + h * static_cast<double>(i);
  d.grid[m - 1] = hi;

  Vector log_w(m);
  for (Index i = 0; i < m; ++i) log_w[i] = -local_potential(d.grid[i], p) / D;
  const double shift = log_w.maxCoeff();
  d.values = (log_w.array() - shift).exp();
  const double raw_integral = simpson(d.values, h);
  d.values /= raw_integral;
  d.norm = raw_integral * std::exp(shift);
  return d;
}

Vector bin_masses(const DensityGrid& d, int bins) {
  const Index intervals = d.grid.size() - 1;
  if (bins < 1 || intervals % bins != 0)
    throw std::invalid_argument("bin_masses: grid does not subdivide the bins");
  const Index per = intervals / bins;
  if (per < 2 || per % 2 != 0)
    throw std::invalid_argument("bin_masses: need an even number (>= 2) of grid intervals per bin");
  Vector masses(bins);
  for (int b = 0; b < bins; ++b)
    masses[b] = simpson(d.values.segment(per * b, per + 1), d.spacing());
  return masses;
}

double l1_distance(const Histogram& h, const DensityGrid& d) {
  if (h.lo() != d.lo() || h.hi() != d.hi())
    throw std::invalid_argument("l1_distance: histogram and density domains differ");
  const Vector exact = bin_masses(d, h.bins());
  double l1 = 0.0;
  for (int i = 0; i < h.bins(); ++i) l1 += std::abs(h.mass(i) - exact[i]);
  return l1;
}

double l1_distance(const DensityGrid& a, const DensityGrid& b) {
  if (a.grid.size() != b.grid.size() || a.lo() != b.lo() || a.hi() != b.hi())
    throw std::invalid_argument("l1_distance: density grids differ");
  return simpson((a.values - b.values).cwiseAbs(), a.spacing());
}

// ---- BatchTable ----

BatchTable::BatchTable(int cols) : cols_(cols) {
  current_.assign(static_cast<std::size_t>(cols), 0.0);
  total_.assign(static_cast<std::size_t>(cols), 0.0);
}

void BatchTable::add(std::span<const double> row) {
  for (int c = 0; c < cols_; ++c) {
    total_[c] += row[c];
    current_[c] += row[c];
  }
  ++total_count_;
  ++current_count_;
  roll_current();
}

void BatchTable::roll_current() {
  while (current_count_ >= target_) {
    if (static_cast<int>(batch_sums_.size()) == kBatches) {
      collapse();  // doubles the target; current may no longer be full
      continue;
    }
    batch_sums_.push_back(current_);
    batch_counts_.push_back(current_count_);
    std::fill(current_.begin(), current_.end(), 0.0);
    current_count_ = 0;
    break;
  }
}

void BatchTable::collapse() {
  std::vector<std::vector<double>> sums;
  std::vector<std::int64_t> counts;
  for (std::size_t i = 0; i + 1 < batch_sums_.size(); i += 2) {
    std::vector<double> merged = batch_sums_[i];
    for (int c = 0; c < cols_; ++c) merged[c] += batch_sums_[i + 1][c];
    sums.push_back(std::move(merged));
    counts.push_back(batch_counts_[i] + batch_counts_[i + 1]);
  }
  if (batch_sums_.size() % 2 == 1) {
    sums.push_back(batch_sums_.back());
    counts.push_back(batch_counts_.back());
  }
  batch_sums_ = std::move(sums);
  batch_counts_ = std::move(counts);
  target_ *= 2;
}

double BatchTable::mean(int col) const {
  if (total_count_ == 0) throw std::logic_error("BatchTable: no samples");
  return total_[col] / static_cast<double>(total_count_);
}

BatchTable::Combo BatchTable::combo(std::span<const std::pair<int, double>> terms) const {
  Combo out;
  for (const auto& [col, w] : terms) out.value += w * mean(col);
  out.batches = static_cast<int>(batch_sums_.size());
  if (out.batches < 2) {
    out.std_error = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  std::vector<double> means(batch_sums_.size(), 0.0);
  for (std::size_t b = 0; b < batch_sums_.size(); ++b)
    for (const auto& [col, w] : terms)
      means[b] += w * batch_sums_[b][col] / static_cast<double>(batch_counts_[b]);
  double center = 0.0;
  for (double v : means) center += v;
  center /= static_cast<double>(means.size());
  double ss = 0.0;
  for (double v : means) ss += (v - center) * (v - center);
  const auto k = static_cast<double>(means.size());
  out.std_error = std::sqrt(ss / (k * (k - 1.0)));
  return out;
}

void BatchTable::merge(const BatchTable& other) {
  if (other.cols_ != cols_) throw std::invalid_argument("BatchTable::merge: column mismatch");
  for (int c = 0; c < cols_; ++c) total_[c] += other.total_[c];
  total_count_ += other.total_count_;
  for (std::size_t b = 0; b < other.batch_sums_.size(); ++b) {
    batch_sums_.push_back(other.batch_sums_[b]);
    batch_counts_.push_back(other.batch_counts_[b]);
  }
  if (other.current_count_ > 0) {  // fold the partial batch as a short complete one
    batch_sums_.push_back(other.current_);
    batch_counts_.push_back(other.current_count_);
  }
  target_ = std::max(target_, other.target_);
  while (static_cast<int>(batch_sums_.size()) > kBatches) collapse();
}

// ---- RunningAverages ----

void RunningAverages::add(const ObservableSample& sample) {
  table_.add(std::span<const double>(sample.data(), sample.size()));
}

BatchTable::Combo RunningAverages::combo(
    std::span<const std::pair<Observable, double>> terms) const {
  std::vector<std::pair<int, double>> cols;
  cols.reserve(terms.size());
  for (const auto& [o, w] : terms) cols.emplace_back(static_cast<int>(o), w);
  return table_.combo(cols);
}

AverageWithError fd_residual(const RunningAverages& avg, double D) {
  if (avg.count() < 1) throw std::invalid_argument("fd_residual: no samples");
  const auto c = avg.combo({{{Observable::GradSq, -1.0}, {Observable::HessTrace, D}}});
  return {c.value, c.std_error, c.batches};
}

double stationary_fd_identity_residual(const NonlinearityParams& p, double D, double lo, double hi,
                                       Index m) {
  const DensityGrid d = exact_density(p, D, lo, hi, m);
  Vector grad_sq(m), hess(m);
  for (Index i = 0; i < m; ++i) {
    const double v1 = local_potential_d1(d.grid[i], p);
    grad_sq[i] = v1 * v1 * d.values[i];
    hess[i] = local_potential_d2(d.grid[i], p) * d.values[i];
  }
  return simpson(grad_sq, d.spacing()) - D * simpson(hess, d.spacing());
}

double first_integral(const ExtendedState& x, const NoiseConfig& cfg, const LatticeSpec& spec,
                      const NonlinearityParams& p) {
  check_extended_shape(x, cfg, spec);
  return energy_functional(x.u, spec, p) + 0.5 * cfg.Q_lambda * x.lambda * x.lambda +
         0.5 * cfg.Q_eta * x.eta.squaredNorm() - cfg.D * x.zeta;
}

// ---- MomentAccumulator / gaussian_check ----

void MomentAccumulator::add(double x) {
  const double x2 = x * x;
  s2_ += x2;
  s3_ += x2 * x;
  s4_ += x2 * x2;
  table_.add(std::span<const double>(&x, 1));
}

void MomentAccumulator::merge(const MomentAccumulator& other) {
  s2_ += other.s2_;
  s3_ += other.s3_;
  s4_ += other.s4_;
  table_.merge(other.table_);
}

double MomentAccumulator::mean() const { return table_.mean(0); }

double MomentAccumulator::variance() const {
  const auto n = static_cast<double>(count());
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  const double mu = mean();
  return (s2_ - n * mu * mu) / (n - 1.0);
}

double MomentAccumulator::excess_kurtosis() const {
  const auto n = static_cast<double>(count());
  const double mu = mean();
  const double m2 = s2_ / n - mu * mu;
  const double m4 =
      s4_ / n - 4.0 * mu * s3_ / n + 6.0 * mu * mu * s2_ / n - 3.0 * mu * mu * mu * mu;
  return m4 / (m2 * m2) - 3.0;
}

double MomentAccumulator::mean_std_error() const {
  return table_.combo({{{0, 1.0}}}).std_error;
}

GaussianReport gaussian_check(const MomentAccumulator& m, double expected_var,
                              const GaussianCheckThresholds& t) {
  if (m.count() < 10000)
    throw std::invalid_argument("gaussian_check: need at least 10^4 samples");
  GaussianReport r;
  r.count = m.count();
  r.mean = m.mean();
  r.variance = m.variance();
  r.excess_kurtosis = m.excess_kurtosis();
  r.mean_std_error = m.mean_std_error();
  r.expected_var = expected_var;
  r.mean_ok = std::abs(r.mean) < t.mean_sigmas * r.mean_std_error;
  r.var_ok = std::abs(r.variance / expected_var - 1.0) < t.var_rel_tol;
  r.kurtosis_ok = std::abs(r.excess_kurtosis) < t.kurtosis_tol;
  return r;
}

GaussianReport gaussian_check(std::span<const double> samples, double expected_var,
                              const GaussianCheckThresholds& t) {
  MomentAccumulator m;
  for (double x : samples) m.add(x);
  return gaussian_check(m, expected_var, t);
}

}  // namespace nagumo
