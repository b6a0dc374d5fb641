#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "invgp/io.hpp"
#include "invgp/serialize.hpp"

using namespace invgp;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path tmp_dir() {
  fs::path p = fs::temp_directory_path() / "invgp_io_test";
  fs::create_directories(p);
  return p;
}

std::vector<Kernel> serializable_kernels() {
  auto [k1, k2] = make_polar_kernels();
  Kernel se = make_se_kernel_1d(1.2, 0.5, -1.0, 1.0);
  QuadratureMeasure nu = QuadratureMeasure::uniform_1d(-1.0, 1.0, 15, true);
  std::vector<std::vector<Kernel>> blocks(2, std::vector<Kernel>(2));
  blocks[0][0] = make_se_kernel_1d(1.0, 0.4, 0.0, 1.0);
  blocks[1][1] = make_se_kernel_1d(0.5, 0.7, 0.0, 1.0);
  Mat sigma(2, 2);
  sigma << 1.0, 0.2, 0.2, 0.5;
  return {
      make_se_kernel(2.0, Vec::Constant(2, 0.7), Box::cube(2, 0.0, 1.0)),
      make_constant_kernel(1.5, Box::cube(1, -1.0, 1.0)),
      make_brownian_kernel(2.0),
      k1,
      k2,
      make_centered_kernel(se, nu),
      make_additive_kernel(blocks, Box::cube(2, 0.0, 1.0)),
      make_ode_span_kernel(sigma),
      make_harmonic_kernel(0.8),
      scale(3.0, add(se, mul(se, se))),
      lift_to_coordinate(se, 1, Box::cube(3, -1.0, 1.0)),
  };
}

}  // namespace

TEST_CASE("kernel JSON specs round-trip through the parser") {
  for (const Kernel& k : serializable_kernels()) {
    Kernel back = kernel_from_json(k.spec());
    CHECK(back.dim() == k.dim());
    Mat pts = uniform_points(k.domain(), 24, 71);
    for (int i = 0; i + 1 < pts.rows(); i += 2) {
      Vec x = pts.row(i).transpose(), y = pts.row(i + 1).transpose();
      CHECK(back(x, y) == doctest::Approx(k(x, y)).epsilon(1e-12));
    }
  }
}

TEST_CASE("unknown kernel type names the offender") {
  nlohmann::json bad{{"type", "matern_999"},
                     {"params", nlohmann::json::object()},
                     {"domain", box_to_json(Box::cube(1, 0.0, 1.0))}};
  CHECK_THROWS_WITH_AS(kernel_from_json(bad), doctest::Contains("matern_999"),
                       std::runtime_error);
}

TEST_CASE("closure kernels are not serializable") {
  Kernel k = make_kernel_from_function(
      1, Box::cube(1, 0.0, 1.0),
      [](const Vec& x, const Vec& y) { return 1.0 + x.dot(y); });
  CHECK_THROWS(k.spec());
}

TEST_CASE("operator specs parse") {
  double pi = std::numbers::pi;
  nlohmann::json comb{
      {"op", "composition_combination"},
      {"symbols", {{{"type", "rotation"}, {"angle", pi / 2}}}},
      {"weights", {1.0}}};
  auto T = operator_from_json(comb);
  auto f = [](const Vec& x) { return x[0]; };
  Vec x(2);
  x << 1.0, 0.0;
  CHECK(T->apply(f, x) == doctest::Approx(0.0).epsilon(1e-15));

  nlohmann::json diff{{"op", "differential"},
                      {"operator", "neg_second_derivative"},
                      {"h", 5e-3},
                      {"order", 4}};
  auto D = operator_from_json(diff);
  auto s = [](const Vec& x) { return std::sin(x[0]); };
  Vec t(1);
  t << 0.4;
  CHECK(D->apply(s, t) == doctest::Approx(std::sin(0.4)).epsilon(1e-7));

  nlohmann::json bad{{"op", "unknown_op"}};
  CHECK_THROWS(operator_from_json(bad));
}

TEST_CASE("format_double round-trips exactly") {
  for (double v : {1.0 / 3.0, 0.1, -2.5e-300, std::numbers::pi, 1e17, 0.0}) {
    CHECK(std::stod(format_double(v)) == v);
  }
}

TEST_CASE("CSV round trip preserves every bit") {
  fs::path p = tmp_dir() / "roundtrip.csv";
  Mat M(3, 2);
  M << 1.0 / 3.0, std::numbers::pi, -1e-12, 2.0, 0.0, -7.25;
  write_csv(p.string(), {"a", "b"}, M);

  std::vector<std::string> header;
  Mat back = read_csv(p.string(), &header);
  CHECK(header == std::vector<std::string>({"a", "b"}));
  CHECK((back - M).norm() == 0.0);

  // Rewriting produces identical bytes.
  std::string first = slurp(p);
  write_csv(p.string(), {"a", "b"}, M);
  CHECK(slurp(p) == first);

  CHECK_THROWS(write_csv(p.string(), {"a"}, M));
}

TEST_CASE("dataset CSV round trip") {
  fs::path p = tmp_dir() / "dataset.csv";
  Dataset data{uniform_points(Box::cube(2, 0.0, 1.0), 5, 4), Vec::LinSpaced(5, 0.0, 1.0)};
  write_dataset_csv(p.string(), data);
  Dataset back = read_dataset_csv(p.string());
  CHECK((back.X - data.X).norm() == 0.0);
  CHECK((back.y - data.y).norm() == 0.0);

  fs::path q = tmp_dir() / "noty.csv";
  write_csv(q.string(), {"x1", "x2"}, Mat::Zero(1, 2));
  CHECK_THROWS(read_dataset_csv(q.string()));
}

TEST_CASE("content hash is the reference FNV-1a") {
  CHECK(content_hash("") == "cbf29ce484222325");
  CHECK(content_hash("abc") == "e71fa2190541574b");
}

TEST_CASE("manifest carries experiment, seed, and config hash") {
  fs::path dir = tmp_dir() / "manifest";
  fs::create_directories(dir);
  nlohmann::json config{{"alpha", 1}};
  write_manifest(dir.string(), "demo", 42, config, {{"ok", true}});

  nlohmann::json m = load_json_file((dir / "manifest.json").string());
  CHECK(m.at("experiment") == "demo");
  CHECK(m.at("seed") == 42);
  CHECK(m.at("config_hash") == content_hash(config.dump()));
  CHECK(m.at("results").at("ok") == true);
}
