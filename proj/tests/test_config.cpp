#include <doctest.h>

#include <string>

#include "bosde/config.hpp"
#include "test_util.hpp"

using namespace bosde;

namespace {

const char* kMinimal = R"(mode = "dnse-demo"

[system]
kind = "dnse"
N = 2
n = 2
H0 = "ring"
c = 1.0
z0 = [1, 0]

[sde]
dt = 0.01
t_final = 0.2
samples = 100
seed = 7

[observables]
populations = [0, 1]
)";

std::string replace(std::string text, const std::string& from, const std::string& to) {
  const auto pos = text.find(from);
  REQUIRE(pos != std::string::npos);
  return text.replace(pos, from.size(), to);
}

}  // namespace

TEST_CASE("complex number literals") {
  CHECK(parse_complex("1") == cplx(1, 0));
  CHECK(parse_complex("-0.5") == cplx(-0.5, 0));
  CHECK(parse_complex("2i") == cplx(0, 2));
  CHECK(parse_complex("-i") == cplx(0, -1));
  CHECK(parse_complex("i") == cplx(0, 1));
  CHECK(parse_complex("1+2i") == cplx(1, 2));
  CHECK(parse_complex("3e-2 - 4.5i") == cplx(3e-2, -4.5));
  CHECK(parse_complex(" 1.5e+1-i ") == cplx(15, -1));
  CHECK_THROWS_AS(parse_complex(""), ValidationError);
  CHECK_THROWS_AS(parse_complex("1+"), ValidationError);
  CHECK_THROWS_AS(parse_complex("abc"), ValidationError);
  CHECK_THROWS_AS(parse_complex("1+2j"), ValidationError);
}

TEST_CASE("minimal lattice config") {
  const RunConfig cfg = parse_config(kMinimal);
  REQUIRE(cfg.mode.has_value());
  CHECK(*cfg.mode == Mode::kDnseDemo);
  CHECK(cfg.system_kind == "dnse");
  REQUIRE(cfg.dnse.has_value());
  CHECK(cfg.dnse->c == 1.0);
  CHECK(cfg.dnse->epsilon == doctest::Approx(3 * 0.2 / 8.0));
  CHECK(cfg.system.n == 2);
  CHECK(cfg.system.modes() == 2);
  CHECK(cfg.system.H0(0, 1) == cplx(1, 0));
  CHECK(cfg.system.tensor(0, 0, 0, 0) != cplx(0));
  CHECK(cfg.z0(0) == cplx(1, 0));
  CHECK(cfg.sde.dt == 0.01);
  CHECK(cfg.sde.samples == 100);
  CHECK(cfg.sde.seed == 7);
  CHECK(cfg.seed_given);
  CHECK(cfg.sde.renormalize);
  REQUIRE(cfg.sde.snapshot_times.size() == 10);
  CHECK(cfg.sde.snapshot_times.back() == doctest::Approx(0.2));
  CHECK(cfg.sde.snapshot_times.front() == doctest::Approx(0.02));
  REQUIRE(cfg.observables.size() == 2);
  CHECK(cfg.observables[1].name == "pop1");
  CHECK(cfg.source_text == kMinimal);
}

TEST_CASE("epsilon sets the measurement strength") {
  const RunConfig cfg = parse_config(replace(kMinimal, "c = 1.0", "epsilon = 0.1"));
  CHECK(cfg.dnse->c == doctest::Approx(3 * 0.2 / (8 * 0.1)));
  CHECK_THROWS_AS(parse_config(replace(kMinimal, "c = 1.0", "c = 1.0\nepsilon = 0.1")), ConfigError);
  CHECK_THROWS_AS(parse_config(replace(kMinimal, "c = 1.0", "")), ConfigError);
}

TEST_CASE("z0 is normalized and complex entries may be strings") {
  const RunConfig cfg = parse_config(replace(kMinimal, "z0 = [1, 0]", R"(z0 = ["1+i", 1])"));
  CHECK(cfg.z0.norm() == doctest::Approx(1.0));
  CHECK(std::abs(cfg.z0(0) - cplx(1, 1) / std::sqrt(3.0)) <= 1e-15);
  CHECK_THROWS_AS(parse_config(replace(kMinimal, "z0 = [1, 0]", "z0 = [0, 0]")), ConfigError);
  CHECK_THROWS_AS(parse_config(replace(kMinimal, "z0 = [1, 0]", "z0 = [1, 0, 0]")), ConfigError);
}

TEST_CASE("non-Hermitian H0 is reported with its location") {
  const std::string text = R"(
[system]
kind = "general"
N = 2
n = 1
H0 = [[0, 1], [2, 0]]
z0 = [1, 0]

[sde]
dt = 0.1
t_final = 1
samples = 1
)";
  try {
    parse_config(text, "bad.toml");
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "system.H0");
    CHECK(e.line() == 6);
    CHECK(std::string(e.what()).find("bad.toml:6:") == 0);
    CHECK(std::string(e.what()).find("system.H0") != std::string::npos);
  }
}

TEST_CASE("misspelt keys get a suggestion") {
  try {
    parse_config(replace(kMinimal, "[system]", "[systm]"));
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("did you mean \"system\"") != std::string::npos);
  }
  try {
    parse_config(replace(kMinimal, "samples = 100", "sampels = 100"));
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("did you mean \"samples\"") != std::string::npos);
  }
  CHECK(edit_distance("systm", "system") == 1);
  CHECK(edit_distance("", "abc") == 3);
  CHECK(closest_match("systm", {"mode", "system", "sde"}) == std::optional<std::string>("system"));
  CHECK_FALSE(closest_match("zzzzzz", {"mode", "system"}).has_value());
}

TEST_CASE("syntax errors carry a position") {
  try {
    parse_config("[sde]\ndt = = 1\n", "broken.toml");
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.line() == 2);
    CHECK(e.column() > 0);
    CHECK(std::string(e.what()).find("broken.toml:2:") == 0);
  }
}

TEST_CASE("general systems") {
  const std::string text = R"(
mode = "verify"
[system]
kind = "general"
N = 2
n = 2
H0 = [[0.5, "1-0.5i"], ["1+0.5i", 0]]
tensor = [[0, 0, 0, 0, 1.0], [1, 1, 1, 1, "0.5"]]
Xs = "pauli"
z0 = [1, "i"]

[sde]
dt = 0.01
t_final = 0.1
samples = 10
renormalize = false
snapshot_times = [0.05, 0.1]

[observables]
one_body = [[[1, 0], [0, -1]]]

[output]
path = "out/general"
)";
  const RunConfig cfg = parse_config(text);
  CHECK(cfg.system_kind == "general");
  CHECK_FALSE(cfg.dnse.has_value());
  CHECK(cfg.system.H0(0, 1) == cplx(1, -0.5));
  CHECK(cfg.system.tensor(1, 1, 1, 1) == cplx(0.5, 0));
  CHECK(cfg.system.Xs.size() == 3);
  CHECK_FALSE(cfg.sde.renormalize);
  CHECK_FALSE(cfg.seed_given);
  CHECK(cfg.sde.snapshot_times == std::vector<double>{0.05, 0.1});
  REQUIRE(cfg.observables.size() == 1);
  CHECK(cfg.observables[0].name == "obs0");
  CHECK(cfg.observables[0].obs.scaled_by_1_over_n);
  CHECK(cfg.output_path == "out/general");
  CHECK_THROWS_AS(parse_config(replace(text, "Xs = \"pauli\"", "Xs = \"pauli\"\nc = 1")), ConfigError);
  CHECK_THROWS_AS(parse_config(replace(text, "N = 2", "N = 3")), ConfigError);
  CHECK_THROWS_AS(parse_config(replace(text, "[0.05, 0.1]", "[0.1, 0.05]")), ConfigError);
  CHECK_THROWS_AS(parse_config(replace(text, "[0.05, 0.1]", "[0.05, 0.2]")), ConfigError);
  CHECK(parse_config(replace(text, "Xs = \"pauli\"", "Xs = \"none\"")).system.Xs.empty());
}

TEST_CASE("required fields and value ranges") {
  CHECK_THROWS_AS(parse_config(replace(kMinimal, "dt = 0.01", "")), ConfigError);
  CHECK_THROWS_AS(parse_config(replace(kMinimal, "dt = 0.01", "dt = -0.01")), ConfigError);
  CHECK_THROWS_AS(parse_config(replace(kMinimal, "samples = 100", "samples = 0")), ConfigError);
  CHECK_THROWS_AS(parse_config(replace(kMinimal, "n = 2", "n = 0")), ConfigError);
  CHECK_THROWS_AS(parse_config(replace(kMinimal, "kind = \"dnse\"", "kind = \"lattice\"")), ConfigError);
  CHECK_THROWS_AS(parse_config(replace(kMinimal, "\"dnse-demo\"", "\"demo\"")), ValidationError);
  CHECK_THROWS_AS(parse_config(replace(kMinimal, "populations = [0, 1]", "populations = [2]")), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.toml"), Error);
}

TEST_CASE("mode names") {
  for (const auto& name : mode_names()) CHECK(mode_name(parse_mode(name)) == name);
  CHECK(mode_names().size() == 7);
  try {
    parse_mode("lindbald");
    FAIL("expected a ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("lindblad") != std::string::npos);
  }
}
