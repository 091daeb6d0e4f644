#include "mist/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mist/losses.hpp"

namespace mist {

TermSet TermSet::parse(const std::string& text) {
  TermSet t{false, false, false, false};
  for (char raw : text) {
    const char c = static_cast<char>(std::toupper(static_cast<unsigned char>(raw)));
    switch (c) {
      case 'A': t.vat = true; break;
      case 'B': t.marginal = true; break;
      case 'C': t.conditional = true; break;
      case 'D': t.contrastive = true; break;
      case ',': case ' ': case '(': case ')': break;
      default: throw ConfigError("terms", std::string("unknown term '") + raw + "'");
    }
  }
  if (!t.supported()) throw ConfigError("terms", "unsupported combination '" + text + "'");
  return t;
}

std::string TermSet::str() const {
  std::string s;
  if (vat) s += 'A';
  if (marginal) s += 'B';
  if (conditional) s += 'C';
  if (contrastive) s += 'D';
  return s;
}

bool TermSet::supported() const {
  static const char* const kSupported[] = {"D", "BC", "BD", "AD", "ABC", "BCD", "ABCD"};
  const std::string s = str();
  return std::any_of(std::begin(kSupported), std::end(kSupported), [&s](const char* k) { return s == k; });
}

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T number(const std::string& key, const std::string& value) {
  T out{};
  const std::string v = trim(value);
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty()) {
    throw ConfigError(key, "expected a number, got '" + value + "'");
  }
  return out;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "mu",   "eta",        "gamma",  "alpha", "tau", "sampler", "k0",    "beta",   "xi",
      "batch_size", "epochs", "lr",   "seed",  "variant", "terms", "hidden", "clusters"};
  return keys;
}

void MistConfig::set(const std::string& raw_key, const std::string& raw_value) {
  const std::string key = trim(raw_key);
  const std::string value = trim(raw_value);
  if (key == "mu") mu = number<double>(key, value);
  else if (key == "eta") eta = number<double>(key, value);
  else if (key == "gamma") gamma = number<double>(key, value);
  else if (key == "alpha") alpha = number<double>(key, value);
  else if (key == "tau") tau = number<double>(key, value);
  else if (key == "beta") beta = number<double>(key, value);
  else if (key == "xi") xi = number<double>(key, value);
  else if (key == "lr") lr = number<double>(key, value);
  else if (key == "k0") k0 = number<Index>(key, value);
  else if (key == "batch_size") batch_size = number<Index>(key, value);
  else if (key == "epochs") epochs = number<int>(key, value);
  else if (key == "seed") seed = number<std::uint64_t>(key, value);
  else if (key == "clusters") clusters = number<int>(key, value);
  else if (key == "sampler") {
    if (value == "geodesic") sampler = SamplerKind::Geodesic;
    else if (value == "euclidean") sampler = SamplerKind::Euclidean;
    else throw ConfigError(key, "expected 'geodesic' or 'euclidean', got '" + value + "'");
  } else if (key == "variant") {
    if (value == "sym") variant = Variant::SymNCE;
    else if (value == "plain") variant = Variant::PlainNCE;
    else throw ConfigError(key, "expected 'sym' or 'plain', got '" + value + "'");
  } else if (key == "terms") {
    terms = TermSet::parse(value);
  } else if (key == "hidden") {
    hidden.clear();
    std::stringstream in(value);
    std::string part;
    while (std::getline(in, part, ',')) hidden.push_back(number<Index>(key, part));
    if (hidden.empty()) throw ConfigError(key, "needs at least one width");
  } else {
    throw ConfigError(key, "unknown key");
  }
}

void MistConfig::validate() const {
  auto nonneg = [](const char* key, double v) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError(key, "must be a finite nonnegative number");
  };
  nonneg("mu", mu);
  nonneg("eta", eta);
  nonneg("gamma", gamma);
  nonneg("tau", tau);
  try {
    CriticConfig(alpha, tau);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("tau", e.what());
  }
  if (k0 < 1) throw ConfigError("k0", "must be >= 1");
  if (!(beta >= 0.0 && beta < 1.0)) throw ConfigError("beta", "must lie in [0, 1)");
  if (!(xi > 0.0)) throw ConfigError("xi", "must be positive");
  if (batch_size < 2) throw ConfigError("batch_size", "must be >= 2");
  if (epochs < 1) throw ConfigError("epochs", "must be >= 1");
  if (!(lr > 0.0)) throw ConfigError("lr", "must be positive");
  if (!terms.supported()) throw ConfigError("terms", "unsupported combination " + terms.str());
  if (hidden.empty()) throw ConfigError("hidden", "needs at least one width");
  for (Index h : hidden) {
    if (h < 1) throw ConfigError("hidden", "widths must be positive");
  }
  if (clusters < 0) throw ConfigError("clusters", "must be >= 0");
}

std::string MistConfig::to_text() const {
  std::ostringstream out;
  out << "mu = " << format_double(mu) << '\n'
      << "eta = " << format_double(eta) << '\n'
      << "gamma = " << format_double(gamma) << '\n'
      << "alpha = " << format_double(alpha) << '\n'
      << "tau = " << format_double(tau) << '\n'
      << "sampler = " << (sampler == SamplerKind::Geodesic ? "geodesic" : "euclidean") << '\n'
      << "k0 = " << k0 << '\n'
      << "beta = " << format_double(beta) << '\n'
      << "xi = " << format_double(xi) << '\n'
      << "batch_size = " << batch_size << '\n'
      << "epochs = " << epochs << '\n'
      << "lr = " << format_double(lr) << '\n'
      << "seed = " << seed << '\n'
      << "variant = " << (variant == Variant::SymNCE ? "sym" : "plain") << '\n'
      << "terms = " << terms.str() << '\n'
      << "hidden = ";
  for (std::size_t l = 0; l < hidden.size(); ++l) out << (l ? "," : "") << hidden[l];
  out << '\n' << "clusters = " << clusters << '\n';
  return out.str();
}

std::uint64_t MistConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : to_text()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

MistConfig MistConfig::parse(const std::string& text) {
  MistConfig cfg;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash_pos = line.find('#');
    if (hash_pos != std::string::npos) line.erase(hash_pos);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no), "expected 'key = value'");
    }
    cfg.set(line.substr(0, eq), line.substr(eq + 1));
  }
  return cfg;
}

MistConfig MistConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

}  // namespace mist
