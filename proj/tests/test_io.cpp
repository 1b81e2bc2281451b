#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cptclone/commands.hpp"
#include "cptclone/config.hpp"
#include "cptclone/error.hpp"
#include "cptclone/field_io.hpp"
#include "cptclone/image.hpp"
#include "doctest.h"

using namespace cptclone;
namespace fs = std::filesystem;

namespace {

const char* kMinimal = R"(
[medium]
delta1 = 0.005
big_gamma = 0.001
density = 5e11

[probe]
profile = super_gaussian
amplitude = 0.15
width = 150 um

[control]
profile = hermite_gaussian
amplitude = 1.0
width = 400 um
)";

const char* kSmallRun = R"(
[medium]
delta1 = 0.005
big_gamma = 0.001
density = 5e11
[probe]
profile = super_gaussian
amplitude = 0.15
width = 150 um
[control]
profile = hermite_gaussian
amplitude = 1.0
width = 400 um
[grid]
nx = 64
ny = 64
half_width = 0.2
[propagation]
dz = 50 um
z_end = 0.1 cm
snapshot_every = 0.05 cm
)";

ParseError parse_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ParseError& e) {
    return e;
  }
  FAIL("expected a parse error");
  return ParseError(0, "", "");
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("cptclone_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

FieldRecord sample_record() {
  TransverseGrid g{4, 2, 0.01, 0.02};
  FieldRecord r{ComplexField(g), 1.25, FieldId::control};
  for (std::size_t k = 0; k < g.size(); ++k) r.field.values[k] = {0.1 * k, -1.0 / (k + 1)};
  return r;
}

}  // namespace

TEST_CASE("minimal config fills defaults and derives the coupling") {
  const auto c = parse_config(kMinimal);
  CHECK(c.medium.delta1 == 0.005);
  CHECK(c.medium.density == 5e11);
  CHECK(c.medium.kappa1() == doctest::Approx(3.0 * 5e11 * 7.95e-5 * 7.95e-5 / (4.0 * kPi)).epsilon(1e-15));
  CHECK(c.medium.kappa1() == doctest::Approx(754.4).epsilon(1e-4));
  CHECK(std::get<SuperGaussian>(c.probe).width == doctest::Approx(0.015).epsilon(1e-15));
  CHECK(std::get<SuperGaussian>(c.probe).order == 8);
  CHECK(c.grid.nx == 512);
  CHECK(c.step.scheme == Scheme::strang2);
  const auto echo = echo_config(c);
  CHECK(echo.find("# kappa1 = 754.42") != std::string::npos);
}

TEST_CASE("units") {
  auto width_of = [](const std::string& w) {
    std::string t = kMinimal;
    t.replace(t.find("150 um"), 6, w);
    return std::get<SuperGaussian>(parse_config(t).probe).width;
  };
  CHECK(width_of("0.015") == doctest::Approx(0.015));
  CHECK(width_of("0.015 cm") == doctest::Approx(0.015));
  CHECK(width_of("0.15 mm") == doctest::Approx(0.015));
  CHECK(width_of("150um") == doctest::Approx(0.015));
  CHECK(width_of("150 µm") == doctest::Approx(0.015));
  const auto e = parse_error(std::string(kMinimal) + "[grid]\nhalf_width = 2 gamma\n");
  CHECK(e.key() == "half_width");
  CHECK(e.line() == 17);
}

TEST_CASE("config errors name the line and key") {
  SUBCASE("negative width") {
    std::string t = kMinimal;
    t.replace(t.find("150 um"), 6, "-150 um");
    const auto e = parse_error(t);
    CHECK(e.key() == "width");
    CHECK(e.line() == 10);
    CHECK(std::string(e.what()).find("width") != std::string::npos);
  }
  SUBCASE("unknown key") {
    const auto e = parse_error(std::string(kMinimal) + "[grid]\ncolour = red\n");
    CHECK(e.key() == "colour");
    CHECK(e.line() == 17);
  }
  SUBCASE("unknown section") { CHECK(parse_error(std::string(kMinimal) + "[extra]\n").line() == 16); }
  SUBCASE("duplicate key") {
    const auto e = parse_error(std::string(kMinimal) + "[grid]\nnx = 64\nnx = 64\n");
    CHECK(e.line() == 18);
  }
  SUBCASE("missing density") {
    std::string t = kMinimal;
    t.erase(t.find("density = 5e11"), 14);
    CHECK(parse_error(t).key() == "density");
  }
  SUBCASE("missing profile width") {
    std::string t = kMinimal;
    t.erase(t.find("width = 400 um"), 14);
    CHECK(parse_error(t).key() == "width");
  }
  SUBCASE("grid size must be a power of two") {
    CHECK(parse_error(std::string(kMinimal) + "[grid]\nnx = 500\n").key() == "nx");
  }
  SUBCASE("key that does not apply to the profile") {
    std::string t = kMinimal;
    t.replace(t.find("width = 400 um"), 14, "width = 400 um\norder = 4");
    CHECK(parse_error(t).key() == "order");
  }
  SUBCASE("missing image file") {
    std::string t = kMinimal;
    t.replace(t.find("profile = hermite_gaussian"), 26, "profile = image\nimage = /nonexistent.pgm");
    t.erase(t.find("width = 400 um"), 14);
    CHECK(parse_error(t).key() == "image");
  }
  SUBCASE("malformed number") {
    std::string t = kMinimal;
    t.replace(t.find("0.005"), 5, "abc");
    const auto e = parse_error(t);
    CHECK(e.key() == "delta1");
    CHECK(e.line() == 3);
  }
}

TEST_CASE("echo re-parses to the same configuration") {
  const auto base = fs::path(CPT_CONFIG_DIR);
  for (const char* name : {"fig5_strong.ini", "fig5_weak.ini", "fig7.ini", "fig9.ini", "fig4_scan.ini"}) {
    const auto c = load_config(base / name);
    const auto echo = echo_config(c);
    const auto again = parse_config(echo);
    CHECK(again == c);
    CHECK(echo_config(again) == echo);
  }
  auto c = parse_config(kMinimal);
  c.medium.kappa1_override = 123.456789012345;
  c.snapshots = {0.5, 1.0 / 3.0};
  c.z_end = 2.0;
  c.step.scheme = Scheme::yoshida4;
  c.step.mode = NonlinearMode::predictor_corrector;
  CHECK(parse_config(echo_config(c)) == c);
}

TEST_CASE("snapshot plan always contains the entrance and exit planes") {
  auto c = parse_config(std::string(kMinimal) + "[propagation]\nz_end = 4 cm\nsnapshot_every = 1 cm\n");
  CHECK(c.snapshot_plan().positions == std::vector<double>{0, 1, 2, 3, 4});
  c.snapshot_every.reset();
  c.snapshots = {2.5};
  CHECK(c.snapshot_plan().positions == std::vector<double>{0, 2.5, 4});
}

TEST_CASE("field files") {
  const auto r = sample_record();
  const auto bytes = encode_field(r);
  REQUIRE(bytes.size() == 49 + 16 * 8);
  CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "CPTF");
  CHECK(bytes[4] == 1);
  CHECK(bytes[8] == 4);
  CHECK(bytes[16] == 2);
  CHECK(bytes[48] == 2);

  SUBCASE("round trip is bit-exact") {
    const auto back = decode_field(bytes);
    CHECK(back.field.values == r.field.values);
    CHECK(back.field.grid == r.field.grid);
    CHECK(back.z == r.z);
    CHECK(back.id == r.id);
    CHECK(encode_field(back) == bytes);
    const auto dir = scratch("field");
    fs::create_directories(dir);
    write_field(dir / "f.cptf", r);
    CHECK(read_bytes(dir / "f.cptf") == bytes);
    fs::remove_all(dir);
  }
  SUBCASE("malformed files report byte offsets") {
    auto offset_of = [](std::vector<std::uint8_t> b) {
      try {
        decode_field(b);
      } catch (const FormatError& e) {
        return static_cast<long long>(e.offset());
      }
      return -1ll;
    };
    auto bad = bytes;
    bad[0] = 'X';
    CHECK(offset_of(bad) == 0);
    bad = bytes;
    bad[4] = 2;
    CHECK(offset_of(bad) == 4);
    bad = bytes;
    bad[8] = 3;
    CHECK(offset_of(bad) == 8);
    bad = bytes;
    bad[16] = 0;
    CHECK(offset_of(bad) == 16);
    bad = bytes;
    bad[31] = 0xff;  // dx becomes negative
    CHECK(offset_of(bad) == 24);
    bad = bytes;
    bad[39] = 0xff;
    CHECK(offset_of(bad) == 32);
    bad = bytes;
    bad[48] = 3;
    CHECK(offset_of(bad) == 48);
    bad = bytes;
    bad.pop_back();
    CHECK(offset_of(bad) == 49);
    bad = bytes;
    bad.push_back(0);
    CHECK(offset_of(bad) == 49);
    CHECK(offset_of({bytes.begin(), bytes.begin() + 20}) == 16);
    try {
      decode_field(std::vector<std::uint8_t>(bytes.begin(), bytes.end() - 16));
    } catch (const FormatError& e) {
      CHECK(std::string(e.what()).find("payload length mismatch") != std::string::npos);
    }
  }
}

TEST_CASE("chi scan") {
  auto c = parse_config(std::string(kMinimal) + "[scan]\naxis = x\nfixed = 0.005\n[grid]\nnx = 64\nny = 64\n");
  const auto csv = chi_scan_csv(c);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "coordinate_cm,re_c31,im_c31,re_c32,im_c32,abs_g,abs_G");
  int rows = 0;
  double im_centre = -1, im_edge = -1;
  while (std::getline(in, line)) {
    ++rows;
    double v[7];
    char sep;
    std::istringstream ls(line);
    ls >> v[0];
    for (int k = 1; k < 7; ++k) ls >> sep >> v[k];
    if (v[0] == 0.0) im_centre = v[2];
    if (rows == 1) im_edge = v[2];
  }
  CHECK(rows == 64);
  CHECK(im_centre >= 0.0);
  CHECK(im_edge > 100 * im_centre);
  CHECK(csv.find(',') != std::string::npos);
}

TEST_CASE("run directory round trip") {
  const auto dir = scratch("run");
  const auto c = parse_config(kSmallRun);
  const auto summary = run_propagation(c, dir);
  REQUIRE(summary.snapshots.size() == 3);
  CHECK(summary.snapshots.back().z == doctest::Approx(0.1).epsilon(1e-15));
  for (const char* f : {"snap_000_probe.cptf", "snap_002_control.cptf", "snap_001_probe.pgm",
                        "snap_001_probe.pgm.txt", "metrics.csv", "config.echo.ini"})
    CHECK(fs::exists(dir / f));

  const auto in_run = slurp(dir / "metrics.csv");
  CHECK(analyze_run(dir) == in_run);
  CHECK(in_run.find("snapshot,z_cm,field") == 0);

  const auto loaded = load_run(dir);
  REQUIRE(loaded.size() == summary.snapshots.size());
  CHECK(loaded[2].probe.values == summary.snapshots[2].probe.values);

  const auto render = read_pgm(dir / "snap_000_control.pgm");
  CHECK(render.maxval == 65535);
  CHECK(*std::max_element(render.pixels.begin(), render.pixels.end()) == 65535);
  CHECK(slurp(dir / "snap_000_control.pgm.txt").find("peak_intensity = 1") != std::string::npos);

  CHECK(parse_config(slurp(dir / "config.echo.ini")) == c);

  const auto noise = noise_fidelity_csv(loaded.back(), loaded.front().control, 42);
  CHECK(noise == noise_fidelity_csv(loaded.back(), loaded.front().control, 42));
  CHECK(noise != noise_fidelity_csv(loaded.back(), loaded.front().control, 43));
  fs::remove_all(dir);
}

TEST_CASE("zero-length run echoes the input fields") {
  const auto dir = scratch("zero");
  auto c = parse_config(kSmallRun);
  c.z_end = 0.0;
  c.snapshot_every.reset();
  const auto s = run_propagation(c, dir);
  REQUIRE(s.snapshots.size() == 1);
  const auto grid = c.grid.grid();
  CHECK(read_field(dir / "snap_000_probe.cptf").field.values == synthesize(grid, c.probe).values);
  CHECK(read_field(dir / "snap_000_control.cptf").field.values == synthesize(grid, c.control).values);
  fs::remove_all(dir);
}

TEST_CASE("aborted run leaves nothing behind") {
  const auto dir = scratch("abort");
  const auto c = parse_config(kSmallRun);
  const StepObserver stop = [](const FieldState&, std::size_t k, std::size_t) {
    if (k == 3) throw Error(Errc::non_finite, "injected");
  };
  CHECK_THROWS_AS(run_propagation(c, dir, stop), Error);
  CHECK_FALSE(fs::exists(dir));

  // An existing directory survives, but none of the run's files do.
  fs::create_directories(dir);
  std::ofstream(dir / "keep.txt") << "x";
  const auto unwritable = dir / "keep.txt" / "sub";
  CHECK_THROWS_AS(run_propagation(c, unwritable), Error);
  CHECK(fs::exists(dir / "keep.txt"));
  fs::remove_all(dir);
}

TEST_CASE("output directory precedence") {
  auto c = parse_config(kMinimal);
  c.output_dir = "from_config";
  ::unsetenv(kOutputDirEnv);
  CHECK(resolve_output_dir(std::nullopt, c) == "from_config");
  ::setenv(kOutputDirEnv, "from_env", 1);
  CHECK(resolve_output_dir(std::nullopt, c) == "from_env");
  CHECK(resolve_output_dir(fs::path("from_flag"), c) == "from_flag");
  ::unsetenv(kOutputDirEnv);
}

TEST_CASE("numbers are locale independent and round-trip") {
  for (double v : {0.1, 1.0 / 3.0, 754.4242718074136, 1e-300, -2.5e12}) {
    const auto s = format_double(v);
    CHECK(s.find(',') == std::string::npos);
    CHECK(std::stod(s) == v);
  }
}

namespace {

struct ScanRow {
  double x, re31, im31, re32, im32, g, G;
};

std::vector<ScanRow> scan_of(const RunConfig& c) {
  std::istringstream in(chi_scan_csv(c));
  std::string line;
  std::getline(in, line);
  std::vector<ScanRow> rows;
  while (std::getline(in, line)) {
    for (auto& ch : line)
      if (ch == ',') ch = ' ';
    std::istringstream ls(line);
    ScanRow r{};
    ls >> r.x >> r.re31 >> r.im31 >> r.re32 >> r.im32 >> r.g >> r.G;
    rows.push_back(r);
  }
  return rows;
}

RunConfig scenario(const char* name) { return load_config(fs::path(CPT_CONFIG_DIR) / name); }

}  // namespace

TEST_CASE("probe absorption is lowest on axis and grows into the wings") {
  const auto rows = scan_of(scenario("fig5_weak.ini"));
  const auto centre = std::min_element(rows.begin(), rows.end(), [](auto& a, auto& b) {
    return std::abs(a.x) < std::abs(b.x);
  });
  for (const auto& r : rows) CHECK(r.im31 >= centre->im31);
  double previous = centre->im31;
  for (const auto& r : rows) {
    if (r.x < 0.05) continue;
    CHECK(r.im31 > 10.0 * centre->im31);
    CHECK(r.im31 >= previous * (1.0 - 1e-12));
    previous = r.im31;
  }
}

TEST_CASE("control dispersion follows the probe intensity") {
  // Weak-probe scaling: Re c32 grows as |g|^2, so a tenfold amplitude gives ~100x.
  auto strong = scenario("fig5_strong.ini");
  auto weak = scenario("fig5_weak.ini");
  strong.medium.delta1 = weak.medium.delta1 = -0.005;
  const auto a = scan_of(strong), b = scan_of(weak);
  auto spread = [](const std::vector<ScanRow>& rows) {
    double lo = 1e300, hi = -1e300;
    for (const auto& r : rows) {
      lo = std::min(lo, r.re32);
      hi = std::max(hi, r.re32);
    }
    return hi - lo;
  };
  const double ratio = spread(a) / spread(b);
  const double g_ratio = std::get<SuperGaussian>(strong.probe).amplitude / std::get<SuperGaussian>(weak.probe).amplitude;
  MESSAGE("strong/weak control dispersion spread " << ratio);
  CHECK(ratio == doctest::Approx(g_ratio * g_ratio).epsilon(0.1));
}

TEST_CASE("a two-lobe control opens two transparency windows") {
  const auto rows = scan_of(scenario("fig4_scan.ini"));
  // Windows are runs of at least five samples below 1/cm. On the node line
  // G = 0 exactly and the probe pumps every atom into |2>, which leaves a
  // single transparent sample; that is not a window.
  std::vector<double> minima;
  std::size_t start = 0, run = 0;
  for (std::size_t k = 0; k <= rows.size(); ++k) {
    if (k < rows.size() && rows[k].im31 < 1.0) {
      if (run++ == 0) start = k;
      continue;
    }
    if (run >= 5) {
      auto best = std::min_element(rows.begin() + start, rows.begin() + start + run,
                                   [](auto& a, auto& b) { return a.im31 < b.im31; });
      minima.push_back(best->x);
    }
    run = 0;
  }
  REQUIRE(minima.size() == 2);
  CHECK(minima[0] == doctest::Approx(-minima[1]).epsilon(0.2));
  const double w = 400e-4;
  CHECK(std::abs(minima[1]) == doctest::Approx(w / std::sqrt(2.0)).epsilon(0.2));
}
