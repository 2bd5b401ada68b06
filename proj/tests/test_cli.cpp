#include "emitsim/arrowhead.hpp"
#include "emitsim/cli/cache.hpp"
#include "emitsim/cli/checksum.hpp"
#include "emitsim/cli/commands.hpp"
#include "emitsim/cli/config.hpp"
#include "emitsim/cli/csv.hpp"
#include "emitsim/cli/manifest.hpp"
#include "emitsim/cli/units.hpp"

#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>

using namespace emitsim;
using namespace emitsim::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct ScratchRoot {
  fs::path path;
  ScratchRoot() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("emitsim-test-" + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~ScratchRoot() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

fs::path scratch(const std::string& name) {
  static const ScratchRoot root;
  fs::path p = root.path / name;
  fs::remove_all(p);
  return p;
}

fs::path write_config(const std::string& name, const json& j) {
  const fs::path p = scratch(name + ".json");
  std::ofstream(p) << j.dump(2);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json exact1d_config() {
  return {{"experiment", "exact1d"},
          {"epsilon", "1 energy"},
          {"eta_over_epsilon", 2.4},
          {"L", 500},
          {"times", {{"start", "0 tau_F"}, {"stop", "4 tau_F"}, {"points", 41}}},
          {"spectrum", {{"time", "4 tau_F"}, {"half_width", "5 Gamma"}}}};
}

int run(const std::string& cmd, const json& cfg, const fs::path& out, std::string* err_text = nullptr,
        std::optional<fs::path> cache = std::nullopt) {
  CommandOptions o;
  o.config = write_config(out.filename().string(), cfg);
  o.out = out;
  o.cache = cache;
  std::ostringstream log, err;
  const int rc = run_command(cmd, o, log, err);
  if (err_text) *err_text = err.str() + log.str();
  return rc;
}

} // namespace

TEST_CASE("quantities need explicit, matching units") {
  CHECK(parse_quantity("2 ns", Dimension::time_si, "t") == doctest::Approx(2e-9));
  CHECK(parse_quantity(json{{"value", 0.21}, {"unit", "mm"}}, Dimension::length, "l") ==
        doctest::Approx(2.1e-4));
  CHECK(parse_quantity("180 deg", Dimension::angle, "phi") == doctest::Approx(std::numbers::pi));
  CHECK(parse_quantity("-6.3e-30 C*m", Dimension::dipole, "mu") == -6.3e-30);
  CHECK(parse_quantity(2.4, Dimension::dimensionless, "ratio") == 2.4);
  UnitContext ctx{0.5, 2.0, 0.25};
  CHECK(parse_quantity("3 tau_F", Dimension::time_natural, "t", ctx) == 1.5);
  CHECK(parse_quantity("5 Gamma", Dimension::energy_natural, "w", ctx) == 10.0);
  CHECK(parse_quantity("4 epsilon", Dimension::energy_natural, "w", ctx) == 1.0);
  CHECK_THROWS_AS(parse_quantity(2.0, Dimension::time_si, "t"), ConfigError);
  CHECK_THROWS_AS(parse_quantity("2", Dimension::time_si, "t"), ConfigError);
  CHECK_THROWS_AS(parse_quantity("2 parsec", Dimension::length, "l"), ConfigError);
  CHECK_THROWS_AS(parse_quantity("2 ns", Dimension::length, "l"), ConfigError);
  CHECK_THROWS_AS(parse_quantity("two ns", Dimension::time_si, "t"), ConfigError);
  CHECK_THROWS_AS(parse_quantity("1 tau_F", Dimension::time_natural, "t"), ConfigError);
}

TEST_CASE("config parsing") {
  const auto r = parse_exact1d(exact1d_config());
  CHECK(r.model.L == 500);
  CHECK(r.model.eta == doctest::Approx(2.4));
  CHECK(r.times.size() == 41);
  CHECK(r.times(40) == doctest::Approx(4 * r.model.tau_f()));
  CHECK(r.spectrum_half_width == static_cast<Index>(std::ceil(5 / r.model.tau_f())));

  json bad = exact1d_config();
  bad["L"] = 0;
  CHECK_THROWS_AS(parse_exact1d(bad), ConfigError);
  bad = exact1d_config();
  bad["colour"] = "blue";
  CHECK_THROWS_AS(parse_exact1d(bad), ConfigError);
  bad = exact1d_config();
  bad["epsilon"] = 1.0;
  CHECK_THROWS_AS(parse_exact1d(bad), ConfigError);
  bad = exact1d_config();
  bad["N"] = 1001;
  CHECK_THROWS_AS(parse_exact1d(bad), ConfigError);
  bad.erase("L");
  CHECK(parse_exact1d(bad).model.L == 500);
  bad["N"] = 1000;
  CHECK_THROWS_AS(parse_exact1d(bad), ConfigError);

  const json kicks = {{"experiment", "kicks"}, {"epsilon", "1 energy"}, {"eta_over_epsilon", 2.4},
                      {"N", 201}, {"phi", "15 deg"}, {"tau_r", "0.04 tau_F"}};
  const auto k = parse_kicks(kicks);
  CHECK(k.L == 100);
  CHECK(k.schedule.phi == doctest::Approx(std::numbers::pi / 12));
  CHECK(k.schedule.count == 250);

  json two = {{"experiment", "two-atom"}, {"epsilon", "1 energy"}, {"eta_over_epsilon", 1.0},
              {"L", 100}, {"omega_d", "5 Gamma"}, {"initial", "q"},
              {"times", {{"start", "0 tau_F"}, {"stop", "1 tau_F"}, {"points", 3}}}};
  CHECK_THROWS_AS(parse_two_atom(two), ConfigError);
  two["initial"] = "s";
  const auto t = parse_two_atom(two);
  CHECK(t.spec.omega_d == doctest::Approx(5 * 2 * std::numbers::pi));
  CHECK(t.spec.initial == InitialState::singlet);

  const json box = {{"experiment", "box3d"}, {"preset", "hydrogen-table2"}, {"mode_cap", 25000},
                    {"times", {{"start", "0 ns"}, {"stop", "1 ns"}, {"points", 2}}}};
  CHECK(parse_box3d(box).box.delta == 8.1865615);
  json custom = box;
  custom["preset"] = "custom";
  custom["box"] = {{"lengths", {"1 mm", "1 mm", "1 mm"}}, {"k0", "188000 1/m"}, {"delta", "3000 1/m"}};
  CHECK(parse_box3d(custom).box.k0 == 188000);
  custom["box"]["lambda0"] = "121 nm";
  CHECK_THROWS_AS(parse_box3d(custom), ConfigError);
}

TEST_CASE("csv round trip is lossless") {
  const fs::path p = scratch("round.csv");
  Eigen::VectorXd a(4), b(4);
  a << 0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23;
  b << std::numbers::pi, 0, -0.0, 1e-17;
  write_csv(p, "demo", {{"a", "s", &a}, {"b", "1", &b}});
  const std::string text = slurp(p);
  CHECK(text.rfind("# demo\n# columns: a [s] b [1]\n", 0) == 0);
  const auto rows = read_csv(p);
  REQUIRE(rows.size() == 4);
  for (Index i = 0; i < 4; ++i) {
    CHECK(rows[i][0] == a(i));
    CHECK(rows[i][1] == b(i));
  }
}

TEST_CASE("FNV-1a reference values") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
  CHECK(hex64(0xabcULL) == "0000000000000abc");
}

TEST_CASE("cache entries round trip and reject corruption") {
  const auto h = build_uniform_model<double>(40, 1.0, 1.3);
  const auto e = dense_eig_oracle(h);
  const fs::path dir = scratch("cache1");
  fs::create_directories(dir);
  const auto key = hamiltonian_hash(h);
  const fs::path p = cache_path(dir, key);
  write_cache(p, key, e);
  std::string problem;
  auto back = read_cache(p, key, h.dimension(), &problem);
  REQUIRE(back);
  CHECK((back->eigenvalues().array() == e.eigenvalues().array()).all());
  CHECK((back->eigenvectors().array() == e.eigenvectors().array()).all());
  CHECK_FALSE(read_cache(p, key + 1, h.dimension(), &problem));
  CHECK_FALSE(read_cache(dir / "missing.bin", key, h.dimension(), &problem));

  // a flipped byte fails the checksum; the next lookup recomputes and warns
  std::string bytes = slurp(p);
  bytes[bytes.size() / 2] ^= 0x40;
  std::ofstream(p, std::ios::binary) << bytes;
  CHECK_FALSE(read_cache(p, key, h.dimension(), &problem));
  CHECK_FALSE(problem.empty());
  std::ostringstream log;
  const auto fresh = cached_eigendecomposition(h, dir, log);
  CHECK(log.str().find("warning") != std::string::npos);
  CHECK(read_cache(p, key, h.dimension()));
  const auto uncached = cached_eigendecomposition(h, std::nullopt, log);
  CHECK((fresh.eigenvectors().array() == uncached.eigenvectors().array()).all());

  // truncated file
  std::ofstream(p, std::ios::binary) << bytes.substr(0, 20);
  CHECK_FALSE(read_cache(p, key, h.dimension()));
  // different parameters, different key
  CHECK(hamiltonian_hash(build_uniform_model<double>(40, 1.0, 1.3000001)) != key);
}

TEST_CASE("exact1d command writes consistent outputs") {
  const fs::path out = scratch("run-exact1d");
  std::string text;
  REQUIRE(run("exact1d", exact1d_config(), out, &text) == exit_ok);
  for (const char* f : {"population.csv", "spectrum.csv", "manifest.json"}) CHECK(fs::exists(out / f));
  const auto m = RunManifest::read(out / "manifest.json");
  CHECK(m.experiment == "exact1d");
  CHECK(m.code_version == code_version());
  std::string problem;
  CHECK(m.verify(out, &problem));
  const auto rows = read_csv(out / "population.csv");
  REQUIRE(rows.size() == 41);
  for (const auto& r : rows) CHECK(r[4] == doctest::Approx(r[2] - r[3]).epsilon(1e-15).scale(1));

  // tampering is detected
  std::ofstream(out / "spectrum.csv", std::ios::app) << "1,2,3,4\n";
  CHECK_FALSE(m.verify(out, &problem));
}

TEST_CASE("every command is deterministic") {
  const fs::path cache = scratch("cache-det");
  const json kicks = {{"experiment", "kicks"}, {"epsilon", "1 energy"}, {"eta_over_epsilon", 2.4},
                      {"N", 401}, {"phi", "180 deg"}, {"tau_r", "0.04 tau_F"}, {"total_time", "4 tau_F"}};
  const json two = {{"experiment", "two-atom"}, {"epsilon", "1 energy"}, {"eta_over_epsilon", 1.0},
                    {"L", 150}, {"omega_d", "5 Gamma"}, {"initial", "10"},
                    {"times", {{"start", "0 tau_F"}, {"stop", "4 tau_F"}, {"points", 21}}}};
  const json box = {{"experiment", "box3d"}, {"preset", "desk"}, {"target_modes", 300},
                    {"mode_cap", 1000}, {"times", {{"start", "0 ns"}, {"stop", "8 ns"}, {"points", 21}}},
                    {"angular_bins", 20}};
  const std::vector<std::pair<std::string, json>> runs = {
      {"exact1d", exact1d_config()}, {"kicks", kicks}, {"two-atom", two}, {"box3d", box}};
  for (const auto& [cmd, cfg] : runs) {
    // no cache, cache miss, cache hit
    const fs::path a = scratch(cmd + "-a"), b = scratch(cmd + "-b"), c = scratch(cmd + "-c");
    REQUIRE(run(cmd, cfg, a) == exit_ok);
    REQUIRE(run(cmd, cfg, b, nullptr, cache) == exit_ok);
    REQUIRE(run(cmd, cfg, c, nullptr, cache) == exit_ok);
    for (const auto& entry : fs::directory_iterator(a)) {
      const auto name = entry.path().filename();
      if (name == "manifest.json") continue;
      INFO(cmd << " " << name);
      CHECK(slurp(a / name) == slurp(b / name));
      CHECK(slurp(a / name) == slurp(c / name));
    }
  }
}

TEST_CASE("exit codes") {
  std::string text;
  json cfg = exact1d_config();
  cfg["L"] = 0;
  CHECK(run("exact1d", cfg, scratch("bad-L"), &text) == exit_config);
  CHECK(text.find("L") != std::string::npos);

  cfg = exact1d_config();
  cfg["times"]["stop"] = "4 ns";
  CHECK(run("exact1d", cfg, scratch("bad-unit"), &text) == exit_config);

  CHECK(run("kicks", exact1d_config(), scratch("wrong-experiment"), &text) == exit_config);
  CHECK(run("nonsense", exact1d_config(), scratch("unknown"), &text) == exit_config);

  const json box = {{"experiment", "box3d"}, {"preset", "hydrogen-table2"}, {"mode_cap", 1000},
                    {"times", {{"start", "0 ns"}, {"stop", "1 ns"}, {"points", 2}}}};
  CHECK(run("box3d", box, scratch("cap"), &text) == exit_config);
  CHECK(text.find("mode count 20") != std::string::npos);

  CommandOptions o;
  o.config = scratch("absent.json");
  o.out = scratch("absent-out");
  std::ostringstream log, err;
  CHECK(run_command("exact1d", o, log, err) == exit_config);

  const fs::path junk = scratch("junk.json");
  std::ofstream(junk) << "{ not json";
  o.config = junk;
  CHECK(run_command("exact1d", o, log, err) == exit_config);
}
