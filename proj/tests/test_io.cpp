#include <catch_amalgamated.hpp>

#include <filesystem>

#include "dakns/dakns.hpp"

using namespace dakns;
using Q = Rational;

namespace {

const char* kMinimal = R"({"m": 2, "A": ["1", "-1"], "N": 6})";

std::string tmp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("dakns_test_" + name)).string();
}

}  // namespace

TEST_CASE("config parsing and validation") {
  auto c = parse_config(kMinimal);
  REQUIRE(c.m == 2);
  REQUIRE(c.N == 6);
  REQUIRE(c.mode == Mode::rational);
  REQUIRE(c.potential.kind == "vacuum");

  REQUIRE_THROWS_WITH(parse_config(R"({"A": ["1", "1"]})"), Catch::Matchers::ContainsSubstring("distinct"));
  REQUIRE_THROWS_WITH(parse_config(R"({"A": ["1", "-1"], "foo": 1})"), Catch::Matchers::ContainsSubstring("'foo'"));
  REQUIRE_THROWS_AS(parse_config("{\"A\": [\"1\""), input_error);

  // Every violation is reported at once.
  try {
    parse_config(R"({"A": ["1", "0"], "N": 0, "bar": 2,
                     "potential": {"kind": "entries", "entries": [{"n": 0, "i": 1, "j": 1, "value": "1"}]}})");
    FAIL("expected an input error");
  } catch (const input_error& e) {
    const std::string msg = e.what();
    REQUIRE(msg.find("'bar'") != std::string::npos);
    REQUIRE(msg.find("N:") != std::string::npos);
    REQUIRE(msg.find("A:") != std::string::npos);
    REQUIRE(msg.find("u_ii") != std::string::npos);
  }
  REQUIRE_THROWS_AS(parse_config(R"({"A": ["1", "-1"], "eps": ["1/4", "1/2"]})"), input_error);
  REQUIRE_THROWS_AS(parse_config(R"({"A": ["1", "-1"], "N": 12})"), input_error);
}

TEST_CASE("config hash follows the canonical form") {
  auto a = parse_config(kMinimal);
  auto b = parse_config(R"({"A": ["1", "-1"], "N": 6, "m": 2})");
  REQUIRE(config_hash(a) == config_hash(b));
  b.seed = 2;
  REQUIRE(config_hash(a) != config_hash(b));
  REQUIRE(fnv1a_hex("") == "cbf29ce484222325");
}

TEST_CASE("series and tau JSON round trip") {
  Series<Q> s(2, -3, 1);
  s[-3](0, 1) = Q(1, 3);
  s[1](1, 0) = Q(-7, 2);
  auto back = series_from_json<Q>(to_json(s));
  REQUIRE(back == s);
  REQUIRE(to_json(s)["valid_lo"] == -3);
  auto poly = Series<Q>::monomial(Matrix<Q>::identity(2), 2);
  REQUIRE(to_json(poly)["valid_lo"].is_null());
  REQUIRE(series_from_json<Q>(to_json(poly)) == poly);

  TauExpSum<Q> tau{{{Q(1), {}}, {Q(1, 2), {{{1, 0}, Q(1, 3)}, {{2, 1}, Q(-1, 5)}}}}};
  auto j = to_json(tau);
  REQUIRE(j["terms"][1]["p"]["1,1"] == "1/3");
  REQUIRE(tau_from_json<Q>(j, 2) == tau);
  REQUIRE_THROWS_AS(tau_from_json<Q>(json::parse(R"({"terms":[{"c":"1","p":{"1,3":"1"}}]})"), 2), input_error);
}

TEST_CASE("state round trip is exact") {
  const Window w{-8, 8, 10};
  AknsData<Q> d{{Q(1), Q(-1)}};
  MatFn<Q> U = impulse_potential<Q>(2, w, 0, 0, 1, Q(1));
  U[0](1, 0) = Q(-1, 2);
  for (const auto& s : {make_state(d, MatFn<Q>(w, Matrix<Q>(2), Matrix<Q>(2), Matrix<Q>(2)), 6), make_state(d, U, 8)}) {
    const std::string path = tmp_path("state.json");
    save_state(s, path);
    auto back = load_state<Q>(path);
    REQUIRE(back == s);
    REQUIRE(dressing_residual(back) == 0);
  }

  Rng rng(3);
  AknsData<double> df{{1.0, -1.0}};
  MatFn<double> Uf(w, Matrix<double>(2), Matrix<double>(2), Matrix<double>(2));
  for (int n = -3; n <= 3; ++n) {
    Uf[n](0, 1) = std::sqrt(2.0) * rng.rational<double>(3, 7);
    Uf[n](1, 0) = 1.0 / 3.0 + n;
  }
  auto sf = make_state(df, Uf, 8);
  auto backf = state_from_json<double>(json::parse(state_to_json(sf).dump()));
  REQUIRE(backf == sf);

  const std::string text = state_to_json(make_state(d, U, 8)).dump();
  REQUIRE_THROWS_AS(state_from_json<Q>(json::parse(text.substr(0, text.size() / 2), nullptr, false)), input_error);
  const std::string path = tmp_path("truncated.json");
  write_text_file(path, text.substr(0, text.size() / 2));
  REQUIRE_THROWS_AS(load_state<Q>(path), input_error);
  auto j = json::parse(text);
  j["version"] = 2;
  REQUIRE_THROWS_AS(state_from_json<Q>(j), input_error);
  j = json::parse(text);
  j["dressing"].erase(j["dressing"].size() - 1);
  REQUIRE_THROWS_AS(state_from_json<Q>(j), input_error);
}

TEST_CASE("reports are deterministic and follow the schema") {
  auto c = parse_config(R"({"A": ["1", "-1"], "N": 6, "window": {"n_min": -4, "n_max": 4, "halo": 6},
                           "potential": {"kind": "random", "lo": -1, "hi": 1}, "seed": 5})");
  auto r1 = run_verify_suite<Q>(c, SuiteName::algebra);
  auto r2 = run_verify_suite<Q>(c, SuiteName::algebra);
  REQUIRE(to_json(r1).dump() == to_json(r2).dump());
  REQUIRE(report_csv(r1) == report_csv(r2));
  REQUIRE(r1.verdict());
  for (const auto& e : r1.checks) REQUIRE(e.residual == "0/1");
  REQUIRE_NOTHROW(validate_report_json(to_json(r1)));
  auto j = to_json(r1);
  j["checks"][0]["verdict"] = "fail";
  REQUIRE_THROWS_AS(validate_report_json(j), input_error);
  REQUIRE(report_csv(r1).rfind("check,parameters,residual,threshold,mode,verdict\n", 0) == 0);
}

TEST_CASE("a corrupted dressing file fails algebra and bilinear checks") {
  const Window w{-4, 4, 6};
  AknsData<Q> d{{Q(1), Q(-1)}};
  auto s = make_state(d, impulse_potential<Q>(2, w, 0, 0, 1, Q(1)), 6);
  s.dressing.w[2][1](0, 1) += 1;
  const std::string path = tmp_path("corrupt.json");
  save_state(s, path);
  auto c = parse_config(R"({"A": ["1", "-1"], "N": 6, "window": {"n_min": -4, "n_max": 4, "halo": 6},
                           "potential": {"kind": "state_file", "path": ")" + path + R"("}})");
  REQUIRE(!run_verify_suite<Q>(c, SuiteName::algebra).verdict());
  REQUIRE(!run_verify_suite<Q>(c, SuiteName::bilinear).verdict());
}

TEST_CASE("trajectory CSV export and import") {
  Trajectory empty;
  REQUIRE(trajectory_csv(empty) == "step,time,n,i,j,value\n");

  const Window w{-4, 4, 6};
  AknsData<double> d{{1.0, -1.0}};
  MatFn<double> U(w, Matrix<double>(2), Matrix<double>(2), Matrix<double>(2));
  U[0](0, 1) = 0.01;
  U[1](1, 0) = -0.02 / 3;
  auto tr = rk4_evolve(d, U, 6, {1, 0}, 0.01, 3);
  auto rows = trajectory_from_csv(trajectory_csv(tr), U);
  REQUIRE(rows.size() == tr.snapshots.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    REQUIRE(rows[i].step == tr.snapshots[i].step);
    REQUIRE(rows[i].time == tr.snapshots[i].time);
    REQUIRE(rows[i].U == tr.snapshots[i].U);
  }
  REQUIRE_THROWS_AS(trajectory_from_csv("bad\n", U), input_error);
}
