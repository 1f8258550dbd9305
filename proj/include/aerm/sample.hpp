#pragma once

#include <cstddef>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "aerm/error.hpp"
#include "aerm/rng.hpp"

namespace aerm {

/// An i.i.d. sample of (example, label) pairs. Examples are stored row-major
/// in one buffer; dimension 0 means the examples carry no features.
class LabeledSample {
public:
  LabeledSample(std::size_t dim, std::vector<double> features, std::vector<double> labels)
      : dim_(dim), x_(std::move(features)), y_(std::move(labels)) {
    if (y_.empty()) throw ConfigurationError("sample must contain at least one example");
    if (x_.size() != dim_ * y_.size()) {
      throw ConfigurationError("feature buffer size does not match labels x dimension");
    }
  }

  /// Row-wise construction. An empty `examples` list means dimension 0.
  LabeledSample(const std::vector<Vector>& examples, std::vector<double> labels)
      : dim_(examples.empty() ? 0 : examples.front().size()),
        x_(flatten(examples, labels.size())),
        y_(std::move(labels)) {
    if (y_.empty()) throw ConfigurationError("sample must contain at least one example");
  }

  /// A sample without features (every example is the empty vector).
  static LabeledSample labels_only(std::vector<double> labels) {
    return LabeledSample(0, {}, std::move(labels));
  }

  std::size_t size() const noexcept { return y_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  std::span<const double> x(std::size_t i) const noexcept { return {x_.data() + i * dim_, dim_}; }
  double y(std::size_t i) const noexcept { return y_[i]; }
  std::span<const double> labels() const noexcept { return y_; }
  std::span<const double> features() const noexcept { return x_; }

  /// Overwrites this sample with m = source.size() draws, uniform with
  /// replacement, from `source`.
  void resample_from(const LabeledSample& source, Stream& stream) {
    const std::size_t m = source.size();
    dim_ = source.dim_;
    y_.resize(m);
    x_.resize(m * dim_);
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t j = stream.below(m);
      y_[i] = source.y_[j];
      for (std::size_t k = 0; k < dim_; ++k) x_[i * dim_ + k] = source.x_[j * dim_ + k];
    }
  }

private:
  static std::vector<double> flatten(const std::vector<Vector>& examples, std::size_t m) {
    if (!examples.empty() && examples.size() != m) {
      throw ConfigurationError("examples and labels differ in length");
    }
    std::vector<double> flat;
    const std::size_t dim = examples.empty() ? 0 : examples.front().size();
    flat.reserve(dim * examples.size());
    for (const auto& e : examples) {
      if (e.size() != dim) throw ConfigurationError("example vectors differ in dimension");
      flat.insert(flat.end(), e.begin(), e.end());
    }
    return flat;
  }

  std::size_t dim_;
  std::vector<double> x_;
  std::vector<double> y_;
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    std::size_t start = 0;
    while (start < cell.size() && cell[start] == ' ') ++start;
    cells.push_back(cell.substr(start));
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

inline double parse_cell(const std::string& cell, std::size_t row) {
  std::size_t used = 0;
  double value = 0;
  try {
    value = std::stod(cell, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != cell.size()) {
    throw ConfigurationError("malformed number '" + cell + "' on data row " + std::to_string(row));
  }
  return value;
}

}  // namespace detail

/// Parses a sample from CSV text: header x_1,...,x_p,y (just y when p = 0).
inline LabeledSample parse_sample_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigurationError("sample CSV is empty");
  const auto header = detail::split_csv_line(line);
  if (header.empty() || header.back() != "y") {
    throw ConfigurationError("sample CSV header must end with column 'y'");
  }
  const std::size_t dim = header.size() - 1;
  for (std::size_t k = 0; k < dim; ++k) {
    if (header[k] != "x_" + std::to_string(k + 1)) {
      throw ConfigurationError("sample CSV column " + std::to_string(k + 1) + " must be named x_" +
                               std::to_string(k + 1));
    }
  }
  std::vector<double> features;
  std::vector<double> labels;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    ++row;
    const auto cells = detail::split_csv_line(line);
    if (cells.size() != dim + 1) {
      throw ConfigurationError("data row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                               " cells, expected " + std::to_string(dim + 1));
    }
    for (std::size_t k = 0; k < dim; ++k) features.push_back(detail::parse_cell(cells[k], row));
    labels.push_back(detail::parse_cell(cells[dim], row));
  }
  return LabeledSample(dim, std::move(features), std::move(labels));
}

inline LabeledSample read_sample_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot open sample file " + path);
  return parse_sample_csv(in);
}

}  // namespace aerm
