#include "mist/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "mist/rng.hpp"

namespace mist {

int Dataset::num_classes() const {
  if (!labels || labels->empty()) return 0;
  return *std::max_element(labels->begin(), labels->end()) + 1;
}

void Dataset::validate() const {
  if (features.rows() < 1 || features.cols() < 1) {
    throw std::invalid_argument("dataset must have n >= 1 rows and d >= 1 columns");
  }
  if (!features.allFinite()) {
    throw std::invalid_argument("dataset '" + name + "' contains NaN or Inf features");
  }
  if (labels) {
    if (static_cast<Eigen::Index>(labels->size()) != features.rows()) {
      throw std::invalid_argument("label count does not match row count");
    }
    for (int y : *labels) {
      if (y < 0) throw std::invalid_argument("negative label " + std::to_string(y));
    }
  }
}

namespace {

void check_size(Eigen::Index n) {
  if (n < 2) throw std::invalid_argument("generator needs n >= 2, got " + std::to_string(n));
}

// Evenly spaced parameters on [0, stop], or [0, stop) when open.
double spaced(Eigen::Index k, Eigen::Index count, double stop, bool open) {
  if (open) return stop * static_cast<double>(k) / static_cast<double>(count);
  if (count == 1) return 0.0;
  return stop * static_cast<double>(k) / static_cast<double>(count - 1);
}

void add_noise(Matrix& x, double noise, Rng& rng) {
  if (noise == 0.0) return;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) += noise * rng.gaussian();
  }
}

}  // namespace

Dataset make_two_moons(Eigen::Index n, double noise, std::uint64_t seed) {
  check_size(n);
  if (!(noise >= 0.0)) throw std::invalid_argument("noise must be nonnegative");
  const Eigen::Index n_upper = (n + 1) / 2;
  const Eigen::Index n_lower = n / 2;

  Dataset out;
  out.name = "two-moons";
  out.features.resize(n, 2);
  out.labels = Labels(static_cast<std::size_t>(n));
  for (Eigen::Index k = 0; k < n_upper; ++k) {
    const double t = spaced(k, n_upper, std::numbers::pi, false);
    out.features(k, 0) = std::cos(t);
    out.features(k, 1) = std::sin(t);
    (*out.labels)[k] = 0;
  }
  for (Eigen::Index k = 0; k < n_lower; ++k) {
    const double t = spaced(k, n_lower, std::numbers::pi, false);
    const Eigen::Index row = n_upper + k;
    out.features(row, 0) = 1.0 - std::cos(t);
    out.features(row, 1) = 0.5 - std::sin(t);
    (*out.labels)[row] = 1;
  }
  Rng rng(seed);
  add_noise(out.features, noise, rng);
  return out;
}

Dataset make_two_rings(Eigen::Index n, double noise, double factor, std::uint64_t seed) {
  check_size(n);
  if (!(factor > 0.0 && factor < 1.0)) {
    throw std::invalid_argument("factor must lie in (0, 1)");
  }
  if (!(noise >= 0.0)) throw std::invalid_argument("noise must be nonnegative");
  const Eigen::Index n_outer = (n + 1) / 2;
  const Eigen::Index n_inner = n / 2;

  Dataset out;
  out.name = "two-rings";
  out.features.resize(n, 2);
  out.labels = Labels(static_cast<std::size_t>(n));
  for (Eigen::Index k = 0; k < n_outer; ++k) {
    const double t = spaced(k, n_outer, 2.0 * std::numbers::pi, true);
    out.features(k, 0) = std::cos(t);
    out.features(k, 1) = std::sin(t);
    (*out.labels)[k] = 0;
  }
  for (Eigen::Index k = 0; k < n_inner; ++k) {
    const double t = spaced(k, n_inner, 2.0 * std::numbers::pi, true);
    const Eigen::Index row = n_outer + k;
    out.features(row, 0) = factor * std::cos(t);
    out.features(row, 1) = factor * std::sin(t);
    (*out.labels)[row] = 1;
  }
  Rng rng(seed);
  add_noise(out.features, noise, rng);
  return out;
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

std::string where(const std::filesystem::path& path, std::size_t line_no) {
  return path.string() + ":" + std::to_string(line_no) + ": ";
}

template <typename T>
T parse_number(std::string_view text, const std::filesystem::path& path, std::size_t line_no) {
  T value{};
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || text.empty()) {
    throw std::runtime_error(where(path, line_no) + "non-numeric cell '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

Dataset load_csv(const std::filesystem::path& path, std::optional<int> num_classes) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path.string() + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_fields(line);

  bool has_label = !header.empty() && header.back() == "label";
  const std::size_t d = header.size() - (has_label ? 1 : 0);
  if (d == 0) throw std::runtime_error(where(path, 1) + "malformed header: no feature columns");
  for (std::size_t j = 0; j < d; ++j) {
    if (header[j] != "f" + std::to_string(j)) {
      throw std::runtime_error(where(path, 1) + "malformed header: expected f" +
                               std::to_string(j) + ", got '" + std::string(header[j]) + "'");
    }
  }

  std::vector<double> values;
  Labels labels;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      throw std::runtime_error(where(path, line_no) + "ragged row: " + std::to_string(fields.size()) +
                               " fields under a " + std::to_string(header.size()) +
                               "-column header");
    }
    for (std::size_t j = 0; j < d; ++j) {
      const double v = parse_number<double>(fields[j], path, line_no);
      if (!std::isfinite(v)) throw std::runtime_error(where(path, line_no) + "non-finite value");
      values.push_back(v);
    }
    if (has_label) {
      const int y = parse_number<int>(fields[d], path, line_no);
      if (y < 0 || (num_classes && y >= *num_classes)) {
        throw std::runtime_error(where(path, line_no) + "label " + std::to_string(y) +
                                 " outside {0, ..., C-1}");
      }
      labels.push_back(y);
    }
  }

  const auto n = static_cast<Eigen::Index>(values.size() / d);
  if (n == 0) throw std::runtime_error(path.string() + ": no data rows");
  Dataset out;
  out.name = path.stem().string();
  out.features = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      values.data(), n, static_cast<Eigen::Index>(d));
  if (has_label) out.labels = std::move(labels);
  return out;
}

void save_csv(const Dataset& data, const std::filesystem::path& path) {
  data.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (Eigen::Index j = 0; j < data.dim(); ++j) {
    if (j > 0) out << ',';
    out << 'f' << j;
  }
  if (data.labels) out << ",label";
  out << '\n';
  char buf[32];
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    for (Eigen::Index j = 0; j < data.dim(); ++j) {
      if (j > 0) out << ',';
      std::snprintf(buf, sizeof buf, "%.17g", data.features(i, j));
      out << buf;
    }
    if (data.labels) out << ',' << (*data.labels)[static_cast<std::size_t>(i)];
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::uint64_t dataset_hash(const Dataset& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const void* bytes, std::size_t count) {
    const auto* p = static_cast<const unsigned char*>(bytes);
    for (std::size_t k = 0; k < count; ++k) {
      h ^= p[k];
      h *= 0x100000001b3ULL;
    }
  };
  const std::int64_t shape[2] = {data.size(), data.dim()};
  mix(shape, sizeof shape);
  mix(data.features.data(), sizeof(double) * static_cast<std::size_t>(data.features.size()));
  if (data.labels) mix(data.labels->data(), sizeof(int) * data.labels->size());
  return h;
}

}  // namespace mist
