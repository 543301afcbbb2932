#include "qflow/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "qflow/errors.hpp"

namespace qflow {

IcKind parse_ic_kind(std::string_view s) {
  if (s == "kissing_bubbles") return IcKind::KissingBubbles;
  if (s == "uniform_random") return IcKind::UniformRandom;
  if (s == "trig_mode") return IcKind::TrigMode;
  if (s == "smooth_random") return IcKind::SmoothRandom;
  throw ConfigError("unknown initial condition '" + std::string(s) +
                    "' (expected kissing_bubbles, uniform_random, trig_mode or smooth_random)");
}

std::string_view to_string(IcKind k) {
  switch (k) {
    case IcKind::KissingBubbles: return "kissing_bubbles";
    case IcKind::UniformRandom: return "uniform_random";
    case IcKind::TrigMode: return "trig_mode";
    case IcKind::SmoothRandom: return "smooth_random";
  }
  return "?";
}

SchemeConfig ExperimentConfig::scheme_config() const {
  SchemeConfig sc;
  if (scheme) sc.kind = *scheme;
  sc.s = s;
  sc.c = c;
  return sc;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::optional<double> parse_double(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

class LineParser {
 public:
  LineParser(std::string_view origin, int line, std::string_view key) : origin_(origin), line_(line), key_(key) {}

  [[noreturn]] void fail(const std::string& what) const {
    std::ostringstream os;
    os << origin_ << ":" << line_ << ": " << what;
    throw ConfigError(os.str());
  }

  double number(std::string_view v) const {
    const auto d = parse_double(v);
    if (!d || !std::isfinite(*d)) fail("value of '" + std::string(key_) + "' is not a finite number: '" + std::string(v) + "'");
    return *d;
  }

  long integer(std::string_view v) const {
    long out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size())
      fail("value of '" + std::string(key_) + "' is not an integer: '" + std::string(v) + "'");
    return out;
  }

  std::vector<double> list(std::string_view v) const {
    std::vector<double> out;
    if (trim(v).empty()) return out;
    while (true) {
      const auto comma = v.find(',');
      out.push_back(number(trim(v.substr(0, comma))));
      if (comma == std::string_view::npos) break;
      v.remove_prefix(comma + 1);
    }
    return out;
  }

  bool flag(std::string_view v) const {
    if (v == "on" || v == "true" || v == "1") return true;
    if (v == "off" || v == "false" || v == "0") return false;
    fail("value of '" + std::string(key_) + "' must be on or off, got '" + std::string(v) + "'");
  }

  template <typename Fn>
  auto wrap(Fn&& fn) const {
    try {
      return fn();
    } catch (const ConfigError& e) {
      fail(e.what());
    }
  }

 private:
  std::string_view origin_;
  int line_;
  std::string_view key_;
};

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += format_double(v[i]);
  }
  return out;
}

}  // namespace

ExperimentConfig parse_config_text(std::string_view text, std::string_view origin) {
  ExperimentConfig cfg;
  std::set<std::string, std::less<>> seen;
  std::optional<long> steps;
  std::map<std::string, int, std::less<>> line_of;
  int lineno = 0;

  while (!text.empty()) {
    ++lineno;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) LineParser(origin, lineno, "").fail("expected 'key = value'");
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    const LineParser p(origin, lineno, key);
    if (key.empty()) p.fail("missing key before '='");
    if (!seen.insert(std::string(key)).second) p.fail("key '" + std::string(key) + "' given twice");
    line_of[std::string(key)] = lineno;

    if (key == "model") cfg.model = p.wrap([&] { return parse_model_kind(value); });
    else if (key == "scheme") cfg.scheme = p.wrap([&] { return parse_scheme_kind(value); });
    else if (key == "eps") cfg.model_params.eps = p.number(value);
    else if (key == "g") cfg.model_params.g = p.number(value);
    else if (key == "mobility") cfg.model_params.mobility = p.number(value);
    else if (key == "kappa") cfg.model_params.kappa = p.number(value);
    else if (key == "split") {
      if (value == "default") cfg.model_params.split = SplitChoice::Default;
      else if (value == "constructive") cfg.model_params.split = SplitChoice::Constructive;
      else p.fail("split must be default or constructive, got '" + std::string(value) + "'");
    } else if (key == "S") cfg.s = p.number(value);
    else if (key == "C") cfg.c = p.number(value);
    else if (key == "nx" || key == "ny") {
      const long n = p.integer(value);
      if (n < 4 || n % 2 != 0) p.fail(std::string(key) + " must be even and at least 4");
      (key == "nx" ? cfg.nx : cfg.ny) = static_cast<std::size_t>(n);
    } else if (key == "lx") cfg.lx = p.number(value);
    else if (key == "ly") cfg.ly = p.number(value);
    else if (key == "origin_x") cfg.origin[0] = p.number(value);
    else if (key == "origin_y") cfg.origin[1] = p.number(value);
    else if (key == "dt") {
      cfg.dt = p.number(value);
      if (!(cfg.dt > 0.0)) p.fail("dt must be positive");
    } else if (key == "steps") {
      steps = p.integer(value);
      if (*steps < 1) p.fail("steps must be at least 1");
    } else if (key == "final_time") {
      cfg.final_time = p.number(value);
      if (!(*cfg.final_time > 0.0)) p.fail("final_time must be positive");
    } else if (key == "ic") cfg.ic = p.wrap([&] { return parse_ic_kind(value); });
    else if (key == "ic_params") cfg.ic_params = p.list(value);
    else if (key == "seed") {
      const long s = p.integer(value);
      if (s < 0) p.fail("seed must be non-negative");
      cfg.seed = static_cast<std::uint64_t>(s);
    } else if (key == "snapshots") cfg.snapshots = p.list(value);
    else if (key == "out_dir") {
      if (value.empty()) p.fail("out_dir must not be empty");
      cfg.out_dir = std::string(value);
    } else if (key == "monitor") cfg.monitor = p.flag(value);
    else if (key == "levels") {
      const long l = p.integer(value);
      if (l < 2 || l > 20) p.fail("levels must be between 2 and 20");
      cfg.levels = static_cast<int>(l);
    } else p.fail("unknown key '" + std::string(key) + "'");
  }

  if (!cfg.model) throw ConfigError(std::string(origin) + ": model required");
  auto at = [&](const char* key) { return LineParser(origin, line_of.count(key) ? line_of[key] : lineno, key); };

  if (cfg.final_time) {
    const double ratio = *cfg.final_time / cfg.dt;
    const double rounded = std::round(ratio);
    if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * rounded)
      at("final_time").fail("final_time is not an integer multiple of dt");
    if (steps && *steps != static_cast<long>(rounded))
      at("steps").fail("steps disagrees with final_time / dt");
    cfg.steps = static_cast<long>(rounded);
  } else if (steps) {
    cfg.steps = *steps;
  }
  const double t_end = cfg.final_time.value_or(cfg.end_time());
  for (double t : cfg.snapshots)
    if (t < 0.0 || t > t_end * (1.0 + 1e-12)) at("snapshots").fail("snapshot time " + format_double(t) + " lies outside [0, T]");
  return cfg;
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("failed to read config file '" + path + "'");
  return parse_config_text(ss.str(), path);
}

std::string to_config_text(const ExperimentConfig& c) {
  std::ostringstream os;
  const auto& mp = c.model_params;
  os << "model = " << (c.model ? to_string(*c.model) : "") << "\n";
  if (c.scheme) os << "scheme = " << to_string(*c.scheme) << "\n";
  os << "eps = " << format_double(mp.eps) << "\n"
     << "g = " << format_double(mp.g) << "\n"
     << "mobility = " << format_double(mp.mobility) << "\n"
     << "split = " << (mp.split == SplitChoice::Constructive ? "constructive" : "default") << "\n"
     << "S = " << format_double(c.s) << "\n"
     << "C = " << format_double(c.c) << "\n"
     << "kappa = " << format_double(mp.kappa) << "\n"
     << "nx = " << c.nx << "\n"
     << "ny = " << c.ny << "\n"
     << "lx = " << format_double(c.lx) << "\n"
     << "ly = " << format_double(c.ly) << "\n"
     << "origin_x = " << format_double(c.origin[0]) << "\n"
     << "origin_y = " << format_double(c.origin[1]) << "\n"
     << "dt = " << format_double(c.dt) << "\n"
     << "steps = " << c.steps << "\n";
  if (c.final_time) os << "final_time = " << format_double(*c.final_time) << "\n";
  os << "ic = " << to_string(c.ic) << "\n"
     << "ic_params = " << join(c.ic_params) << "\n"
     << "seed = " << c.seed << "\n"
     << "snapshots = " << join(c.snapshots) << "\n"
     << "out_dir = " << c.out_dir << "\n"
     << "monitor = " << (c.monitor ? "on" : "off") << "\n"
     << "levels = " << c.levels << "\n";
  return os.str();
}

}  // namespace qflow
