#include "ddcc/moments.hpp"

#include <charconv>
#include <istream>
#include <string>
#include <vector>

#include "ddcc/errors.hpp"
#include "ddcc/support_sets.hpp"

namespace ddcc {

using Eigen::MatrixXd;
using Eigen::VectorXd;

MomentState::MomentState(int dim, MomentMode mode) : dim_(dim), mode_(mode) {
  if (dim < 1) throw InvalidArgument("moment state dimension must be positive");
  mean_ = VectorXd::Zero(dim);
  scatter_ = mode == MomentMode::Full ? MatrixXd::Zero(dim, dim)
                                      : MatrixXd::Zero(dim, 1);
}

void MomentState::update(const Eigen::Ref<const VectorXd>& sample) {
  if (sample.size() != dim_) {
    throw InvalidArgument("sample length does not match state dimension");
  }
  if (!sample.allFinite()) throw InvalidArgument("sample has non-finite entries");
  ++count_;
  const double n = static_cast<double>(count_);
  const VectorXd delta = sample - mean_;
  mean_ += delta / n;
  const double w = (n - 1.0) / n;
  if (mode_ == MomentMode::Full) {
    const MatrixXd outer = delta * delta.transpose();  // exactly symmetric
    scatter_ += w * outer;
  } else {
    scatter_.col(0) += w * delta.cwiseAbs2();
  }
}

void MomentState::update_batch(const Eigen::Ref<const MatrixXd>& samples) {
  if (samples.cols() != dim_) {
    throw InvalidArgument("sample matrix width does not match state dimension");
  }
  for (Eigen::Index i = 0; i < samples.rows(); ++i) {
    update(samples.row(i).transpose());
  }
}

bool MomentState::update_filtered(const Eigen::Ref<const VectorXd>& sample,
                                  const SupportSet& support) {
  if (sample.size() != dim_) {
    throw InvalidArgument("sample length does not match state dimension");
  }
  if (!sample.allFinite()) throw InvalidArgument("sample has non-finite entries");
  if (!support.contains(sample)) return false;
  update(sample);
  return true;
}

MatrixXd MomentState::covariance() const {
  if (count_ == 0) throw EmptyState("no samples have been seen");
  const double n = static_cast<double>(count_);
  if (mode_ == MomentMode::Full) return scatter_ / n;
  return (scatter_.col(0) / n).asDiagonal();
}

VectorXd MomentState::variance() const {
  if (count_ == 0) throw EmptyState("no samples have been seen");
  const double n = static_cast<double>(count_);
  if (mode_ == MomentMode::Full) return scatter_.diagonal() / n;
  return scatter_.col(0) / n;
}

Moments MomentState::extract() const {
  Moments m;
  m.count = count_;
  m.mean = mean_;
  m.covariance = covariance();
  m.variance = variance().cwiseMax(0.0);
  m.std_diag = m.variance.cwiseSqrt().asDiagonal();
  return m;
}

MomentState merge(const MomentState& a, const MomentState& b) {
  if (a.dim() != b.dim() || a.mode() != b.mode()) {
    throw InvalidArgument("cannot merge states of different dimension or mode");
  }
  if (b.count() == 0) return a;
  if (a.count() == 0) return b;
  MomentState out = a;
  const double na = static_cast<double>(a.count());
  const double nb = static_cast<double>(b.count());
  const double n = na + nb;
  const VectorXd delta = b.mean() - a.mean();
  MatrixXd scatter = a.scatter() + b.scatter();
  const double w = na * nb / n;
  if (a.mode() == MomentMode::Full) {
    const MatrixXd outer = delta * delta.transpose();
    scatter += w * outer;
  } else {
    scatter.col(0) += w * delta.cwiseAbs2();
  }
  out.count_ = a.count() + b.count();
  out.mean_ = a.mean() + (nb / n) * delta;
  out.scatter_ = std::move(scatter);
  return out;
}

namespace {

bool parse_row(const std::string& line, std::vector<double>& out) {
  out.clear();
  std::size_t pos = 0;
  while (pos <= line.size()) {
    std::size_t end = line.find(',', pos);
    if (end == std::string::npos) end = line.size();
    std::size_t b = pos, e = end;
    while (b < e && (line[b] == ' ' || line[b] == '\t')) ++b;
    while (e > b && (line[e - 1] == ' ' || line[e - 1] == '\t' ||
                     line[e - 1] == '\r')) {
      --e;
    }
    double v = 0.0;
    const auto res = std::from_chars(line.data() + b, line.data() + e, v);
    if (b == e || res.ec != std::errc() || res.ptr != line.data() + e) {
      return false;
    }
    out.push_back(v);
    pos = end + 1;
  }
  return true;
}

}  // namespace

MatrixXd read_samples_csv(std::istream& in, int dim) {
  if (dim < 1) throw InvalidArgument("sample dimension must be positive");
  std::vector<double> values;
  std::vector<double> row;
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (!parse_row(line, row)) {
      if (first) {
        first = false;
        continue;  // header
      }
      throw InvalidArgument("unparseable CSV line " + std::to_string(line_no));
    }
    first = false;
    if (static_cast<int>(row.size()) != dim) {
      throw InvalidArgument("CSV line " + std::to_string(line_no) + " has " +
                            std::to_string(row.size()) + " columns, expected " +
                            std::to_string(dim));
    }
    values.insert(values.end(), row.begin(), row.end());
  }
  const auto rows = static_cast<Eigen::Index>(values.size() / dim);
  return Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                  Eigen::RowMajor>>(values.data(), rows, dim);
}

}  // namespace ddcc
