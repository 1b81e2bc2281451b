#include "cptclone/config.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "cptclone/error.hpp"

namespace cptclone {

std::string format_double(double value) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), res.ptr);
}

TransverseGrid GridSpec::grid() const {
  TransverseGrid g{nx, ny, 2.0 * half_width_x / static_cast<double>(nx),
                   2.0 * half_width_y / static_cast<double>(ny)};
  g.validate();
  return g;
}

SnapshotPlan RunConfig::snapshot_plan() const {
  SnapshotPlan plan;
  if (snapshot_every) plan = SnapshotPlan::uniform(*snapshot_every, z_end);
  plan.positions.insert(plan.positions.end(), snapshots.begin(), snapshots.end());
  plan.positions.push_back(0.0);
  plan.positions.push_back(z_end);
  std::sort(plan.positions.begin(), plan.positions.end());
  plan.positions.erase(std::unique(plan.positions.begin(), plan.positions.end()),
                       plan.positions.end());
  return plan;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

struct Entry {
  std::string value;
  std::size_t line = 0;
  bool used = false;
};

struct Section {
  std::size_t line = 0;
  std::map<std::string, Entry> entries;
};

enum class Unit { rate, length, density, inverse_length, none };

double unit_factor(Unit kind, std::string_view unit, std::size_t line, const std::string& key) {
  if (unit.empty()) return 1.0;
  switch (kind) {
    case Unit::rate:
      if (unit == "gamma" || unit == "\xce\xb3") return 1.0;
      break;
    case Unit::length:
      if (unit == "cm") return 1.0;
      if (unit == "mm") return 0.1;
      if (unit == "um" || unit == "\xc2\xb5m" || unit == "\xce\xbcm") return 1e-4;
      if (unit == "nm") return 1e-7;
      break;
    case Unit::density:
      if (unit == "cm^-3" || unit == "/cm^3" || unit == "cm-3") return 1.0;
      break;
    case Unit::inverse_length:
      if (unit == "cm^-1" || unit == "/cm" || unit == "1/cm") return 1.0;
      break;
    case Unit::none:
      break;
  }
  throw ParseError(line, key, "unit '" + std::string(unit) + "' is not valid here");
}

class Parser {
 public:
  Parser(std::string_view text, std::filesystem::path base_dir) : base_dir_(std::move(base_dir)) {
    std::size_t line_no = 0;
    Section* current = nullptr;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const auto end = text.find('\n', pos);
      std::string_view raw = text.substr(pos, end == std::string_view::npos ? text.npos : end - pos);
      pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
      ++line_no;
      const auto comment = raw.find_first_of("#;");
      auto line = trim(raw.substr(0, comment));
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']') throw ParseError(line_no, "", "malformed section header");
        const std::string name(trim(line.substr(1, line.size() - 2)));
        static constexpr std::array<std::string_view, 7> known{
            "medium", "probe", "control", "grid", "propagation", "scan", "output"};
        if (std::find(known.begin(), known.end(), name) == known.end())
          throw ParseError(line_no, name, "unknown section [" + name + "]");
        if (sections_.count(name)) throw ParseError(line_no, name, "duplicate section [" + name + "]");
        current = &sections_[name];
        current->line = line_no;
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) throw ParseError(line_no, "", "expected 'key = value'");
      const std::string key(trim(line.substr(0, eq)));
      const std::string value(trim(line.substr(eq + 1)));
      if (!current) throw ParseError(line_no, key, "key outside of any section");
      if (key.empty()) throw ParseError(line_no, "", "empty key");
      if (current->entries.count(key)) throw ParseError(line_no, key, "duplicate key '" + key + "'");
      current->entries[key] = Entry{value, line_no, false};
    }
  }

  Entry* find(const std::string& section, const std::string& key) {
    auto s = sections_.find(section);
    if (s == sections_.end()) return nullptr;
    auto e = s->second.entries.find(key);
    if (e == s->second.entries.end()) return nullptr;
    e->second.used = true;
    return &e->second;
  }

  Entry& require(const std::string& section, const std::string& key) {
    if (auto* e = find(section, key)) return *e;
    auto s = sections_.find(section);
    throw ParseError(s == sections_.end() ? 0 : s->second.line, key,
                     "missing required key '" + key + "' in [" + section + "]");
  }

  static double number(const Entry& e, const std::string& key, Unit kind) {
    const char* first = e.value.data();
    const char* last = first + e.value.size();
    double v = 0.0;
    auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || !std::isfinite(v))
      throw ParseError(e.line, key, "'" + e.value + "' is not a number");
    const auto unit = trim(std::string_view(res.ptr, static_cast<std::size_t>(last - res.ptr)));
    return v * unit_factor(kind, unit, e.line, key);
  }

  std::optional<double> get(const std::string& section, const std::string& key, Unit kind) {
    if (auto* e = find(section, key)) return number(*e, key, kind);
    return std::nullopt;
  }

  double get_checked(const std::string& section, const std::string& key, Unit kind, double fallback,
                     bool (*ok)(double), const char* rule) {
    auto* e = find(section, key);
    if (!e) return fallback;
    const double v = number(*e, key, kind);
    if (!ok(v)) throw ParseError(e->line, key, "'" + key + "' " + rule);
    return v;
  }

  std::optional<long long> get_int(const std::string& section, const std::string& key) {
    auto* e = find(section, key);
    if (!e) return std::nullopt;
    long long v = 0;
    const char* first = e->value.data();
    const char* last = first + e->value.size();
    auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last)
      throw ParseError(e->line, key, "'" + e->value + "' is not an integer");
    return v;
  }

  void check_unused() const {
    const Entry* first = nullptr;
    std::string first_key;
    for (const auto& [name, section] : sections_)
      for (const auto& [key, entry] : section.entries)
        if (!entry.used && (!first || entry.line < first->line)) {
          first = &entry;
          first_key = key;
        }
    if (first) throw ParseError(first->line, first_key, "unknown key '" + first_key + "'");
  }

  const std::filesystem::path& base_dir() const { return base_dir_; }

 private:
  std::map<std::string, Section> sections_;
  std::filesystem::path base_dir_;
};

bool positive(double v) { return v > 0.0; }
bool non_negative(double v) { return v >= 0.0; }
bool any_value(double) { return true; }

BeamSpec parse_beam(Parser& p, const std::string& section) {
  auto& profile_entry = p.require(section, "profile");
  const std::string profile = profile_entry.value;
  const double amplitude =
      p.get_checked(section, "amplitude", Unit::rate, 0.0, non_negative, "must be >= 0");
  p.require(section, "amplitude");

  auto width = [&]() {
    auto& e = p.require(section, "width");
    const double w = Parser::number(e, "width", Unit::length);
    if (!(w > 0.0)) throw ParseError(e.line, "width", "'width' must be > 0");
    return w;
  };
  auto index = [&](const char* key, int fallback, int minimum) {
    const auto v = p.get_int(section, key);
    if (!v) return fallback;
    if (*v < minimum || *v > 64)
      throw ParseError(p.find(section, key)->line, key,
                       std::string("'") + key + "' must be in [" + std::to_string(minimum) + ", 64]");
    return static_cast<int>(*v);
  };

  if (profile == "hermite_gaussian") {
    HermiteGaussian b;
    b.width = width();
    b.m = index("m", 0, 0);
    b.n = index("n", 0, 0);
    b.amplitude = amplitude;
    return b;
  }
  if (profile == "super_gaussian") {
    SuperGaussian b;
    b.width = width();
    b.order = index("order", 8, 1);
    b.amplitude = amplitude;
    return b;
  }
  if (profile == "plane_wave") return PlaneWave{amplitude};
  if (profile == "image") {
    ImageBeam b;
    auto& e = p.require(section, "image");
    std::filesystem::path path(e.value);
    if (path.is_relative()) path = std::filesystem::absolute(p.base_dir() / path);
    b.source = path.lexically_normal();
    std::error_code ec;
    if (!std::filesystem::is_regular_file(b.source, ec))
      throw ParseError(e.line, "image", "image file '" + b.source.string() + "' not found");
    b.amplitude = amplitude;
    b.blur_sigma = p.get_checked(section, "blur", Unit::length, 0.0, non_negative, "must be >= 0");
    if (auto* ext = p.find(section, "extent")) {
      const double v = Parser::number(*ext, "extent", Unit::length);
      if (!(v > 0.0)) throw ParseError(ext->line, "extent", "'extent' must be > 0");
      b.extent = v;
    }
    return b;
  }
  throw ParseError(profile_entry.line, "profile",
                   "unknown profile '" + profile +
                       "' (expected hermite_gaussian, super_gaussian, plane_wave or image)");
}

}  // namespace

RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  Parser p(text, base_dir);
  RunConfig c;

  auto& m = c.medium;
  m.delta1 = p.get_checked("medium", "delta1", Unit::rate, 0.0, any_value, "");
  m.delta2 = p.get_checked("medium", "delta2", Unit::rate, 0.0, any_value, "");
  m.big_gamma = p.get_checked("medium", "big_gamma", Unit::rate, 0.0, non_negative, "must be >= 0");
  p.require("medium", "density");
  m.density = p.get_checked("medium", "density", Unit::density, 0.0, non_negative, "must be >= 0");
  m.lambda1 = p.get_checked("medium", "lambda1", Unit::length, kDefaultWavelength, positive,
                            "must be > 0");
  m.lambda2 = p.get_checked("medium", "lambda2", Unit::length, kDefaultWavelength, positive,
                            "must be > 0");
  if (p.find("medium", "kappa1"))
    m.kappa1_override =
        p.get_checked("medium", "kappa1", Unit::inverse_length, 0.0, non_negative, "must be >= 0");
  if (p.find("medium", "kappa2"))
    m.kappa2_override =
        p.get_checked("medium", "kappa2", Unit::inverse_length, 0.0, non_negative, "must be >= 0");

  c.probe = parse_beam(p, "probe");
  c.control = parse_beam(p, "control");

  auto count = [&](const char* key, std::size_t fallback) -> std::size_t {
    const auto v = p.get_int("grid", key);
    if (!v) return fallback;
    const bool pow2 = *v > 0 && (*v & (*v - 1)) == 0;
    if (!pow2 || *v > (1 << 16))
      throw ParseError(p.find("grid", key)->line, key,
                       std::string("'") + key + "' must be a power of two");
    return static_cast<std::size_t>(*v);
  };
  c.grid.nx = count("nx", 512);
  c.grid.ny = count("ny", 512);
  const double half = p.get_checked("grid", "half_width", Unit::length, 0.2, positive, "must be > 0");
  c.grid.half_width_x = p.get_checked("grid", "half_width_x", Unit::length, half, positive, "must be > 0");
  c.grid.half_width_y = p.get_checked("grid", "half_width_y", Unit::length, half, positive, "must be > 0");

  auto& s = c.step;
  s.dz = p.get_checked("propagation", "dz", Unit::length, s.dz, positive, "must be > 0");
  c.z_end = p.get_checked("propagation", "z_end", Unit::length, 0.0, non_negative, "must be >= 0");
  if (auto* e = p.find("propagation", "scheme")) {
    if (e->value == "strang2") s.scheme = Scheme::strang2;
    else if (e->value == "yoshida4") s.scheme = Scheme::yoshida4;
    else throw ParseError(e->line, "scheme", "'scheme' must be strang2 or yoshida4");
  }
  if (auto* e = p.find("propagation", "nonlinear")) {
    if (e->value == "frozen") s.mode = NonlinearMode::frozen;
    else if (e->value == "predictor_corrector") s.mode = NonlinearMode::predictor_corrector;
    else throw ParseError(e->line, "nonlinear", "'nonlinear' must be frozen or predictor_corrector");
  }
  s.absorber.fraction = p.get_checked("propagation", "absorber_fraction", Unit::none,
                                      s.absorber.fraction,
                                      [](double v) { return v >= 0.0 && v <= 0.5; },
                                      "must be in [0, 0.5]");
  s.absorber.strength = p.get_checked("propagation", "absorber_strength", Unit::inverse_length,
                                      s.absorber.strength, non_negative, "must be >= 0");
  if (p.find("propagation", "snapshot_every"))
    c.snapshot_every =
        p.get_checked("propagation", "snapshot_every", Unit::length, 0.0, positive, "must be > 0");
  if (auto* e = p.find("propagation", "snapshots")) {
    std::string_view list = e->value;
    while (!list.empty()) {
      const auto comma = list.find(',');
      const auto item = trim(list.substr(0, comma));
      Entry tmp{std::string(item), e->line, true};
      const double z = Parser::number(tmp, "snapshots", Unit::length);
      if (z < 0.0) throw ParseError(e->line, "snapshots", "snapshot positions must be >= 0");
      c.snapshots.push_back(z);
      if (comma == std::string_view::npos) break;
      list.remove_prefix(comma + 1);
    }
  }
  for (double z : c.snapshots)
    if (z > c.z_end)
      throw ParseError(p.find("propagation", "snapshots")->line, "snapshots",
                       "snapshot position beyond z_end");

  if (auto* e = p.find("scan", "axis")) {
    if (e->value != "x" && e->value != "y") throw ParseError(e->line, "axis", "'axis' must be x or y");
    c.scan.axis = e->value[0];
  }
  c.scan.fixed = p.get_checked("scan", "fixed", Unit::length, 0.0, any_value, "");

  if (auto* e = p.find("output", "dir")) c.output_dir = e->value;

  p.check_unused();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot open config '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path.parent_path());
}

std::string echo_config(const RunConfig& c) {
  std::ostringstream out;
  auto num = [](double v) { return format_double(v); };
  auto len = [](double v) { return format_double(v) + " cm"; };

  const auto& m = c.medium;
  out << "[medium]\n";
  out << "delta1 = " << num(m.delta1) << "\n";
  out << "delta2 = " << num(m.delta2) << "\n";
  out << "big_gamma = " << num(m.big_gamma) << "\n";
  out << "density = " << num(m.density) << "\n";
  out << "lambda1 = " << len(m.lambda1) << "\n";
  out << "lambda2 = " << len(m.lambda2) << "\n";
  if (m.kappa1_override) out << "kappa1 = " << num(*m.kappa1_override) << "\n";
  else out << "# kappa1 = " << num(m.kappa1()) << " cm^-1 (derived)\n";
  if (m.kappa2_override) out << "kappa2 = " << num(*m.kappa2_override) << "\n";
  else out << "# kappa2 = " << num(m.kappa2()) << " cm^-1 (derived)\n";

  auto beam = [&](const char* name, const BeamSpec& spec) {
    out << "\n[" << name << "]\n";
    std::visit(
        [&](const auto& b) {
          using T = std::decay_t<decltype(b)>;
          if constexpr (std::is_same_v<T, HermiteGaussian>) {
            out << "profile = hermite_gaussian\n";
            out << "amplitude = " << num(b.amplitude) << "\n";
            out << "width = " << len(b.width) << "\n";
            out << "m = " << b.m << "\n";
            out << "n = " << b.n << "\n";
          } else if constexpr (std::is_same_v<T, SuperGaussian>) {
            out << "profile = super_gaussian\n";
            out << "amplitude = " << num(b.amplitude) << "\n";
            out << "width = " << len(b.width) << "\n";
            out << "order = " << b.order << "\n";
          } else if constexpr (std::is_same_v<T, PlaneWave>) {
            out << "profile = plane_wave\n";
            out << "amplitude = " << num(b.amplitude) << "\n";
          } else {
            out << "profile = image\n";
            out << "amplitude = " << num(b.amplitude) << "\n";
            out << "image = " << b.source.string() << "\n";
            out << "blur = " << len(b.blur_sigma) << "\n";
            if (b.extent) out << "extent = " << len(*b.extent) << "\n";
          }
        },
        spec);
  };
  beam("probe", c.probe);
  beam("control", c.control);

  out << "\n[grid]\n";
  out << "nx = " << c.grid.nx << "\n";
  out << "ny = " << c.grid.ny << "\n";
  out << "half_width_x = " << len(c.grid.half_width_x) << "\n";
  out << "half_width_y = " << len(c.grid.half_width_y) << "\n";

  out << "\n[propagation]\n";
  out << "dz = " << len(c.step.dz) << "\n";
  out << "z_end = " << len(c.z_end) << "\n";
  out << "scheme = " << to_string(c.step.scheme) << "\n";
  out << "nonlinear = " << to_string(c.step.mode) << "\n";
  out << "absorber_fraction = " << num(c.step.absorber.fraction) << "\n";
  out << "absorber_strength = " << num(c.step.absorber.strength) << "\n";
  if (c.snapshot_every) out << "snapshot_every = " << len(*c.snapshot_every) << "\n";
  if (!c.snapshots.empty()) {
    out << "snapshots = ";
    for (std::size_t k = 0; k < c.snapshots.size(); ++k)
      out << (k ? ", " : "") << len(c.snapshots[k]);
    out << "\n";
  }

  out << "\n[scan]\n";
  out << "axis = " << c.scan.axis << "\n";
  out << "fixed = " << len(c.scan.fixed) << "\n";

  out << "\n[output]\n";
  out << "dir = " << c.output_dir.string() << "\n";
  return out.str();
}

}  // namespace cptclone
