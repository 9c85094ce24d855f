#pragma once

// Streaming sample mean and covariance (1/N normalization).

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>

namespace ddcc {

class SupportSet;

enum class MomentMode { Full, Diagonal };

struct Moments {
  std::int64_t count = 0;
  Eigen::VectorXd mean;
  /// Full mode: sample covariance. Diagonal mode: diag(variance).
  Eigen::MatrixXd covariance;
  Eigen::VectorXd variance;
  /// diag(sqrt(variance)).
  Eigen::MatrixXd std_diag;
};

class MomentState {
 public:
  MomentState(int dim, MomentMode mode);

  int dim() const { return dim_; }
  MomentMode mode() const { return mode_; }
  std::int64_t count() const { return count_; }
  const Eigen::VectorXd& mean() const { return mean_; }
  /// Centered second-moment accumulator: dim x dim (Full) or dim x 1 (Diagonal).
  const Eigen::MatrixXd& scatter() const { return scatter_; }

  void update(const Eigen::Ref<const Eigen::VectorXd>& sample);
  /// Streams every row of `samples`.
  void update_batch(const Eigen::Ref<const Eigen::MatrixXd>& samples);
  /// Updates only when `support` contains the sample; returns whether it did.
  bool update_filtered(const Eigen::Ref<const Eigen::VectorXd>& sample,
                       const SupportSet& support);

  /// Throws EmptyState when no sample has been seen.
  Eigen::MatrixXd covariance() const;
  Eigen::VectorXd variance() const;
  Moments extract() const;

 private:
  friend MomentState merge(const MomentState& a, const MomentState& b);

  int dim_;
  MomentMode mode_;
  std::int64_t count_ = 0;
  Eigen::VectorXd mean_;
  Eigen::MatrixXd scatter_;
};

/// Moments of the concatenation of both sample streams.
MomentState merge(const MomentState& a, const MomentState& b);

/// Reads one sample per line; a first line that does not parse as numbers is
/// treated as a header. Blank lines are skipped.
Eigen::MatrixXd read_samples_csv(std::istream& in, int dim);

}  // namespace ddcc
