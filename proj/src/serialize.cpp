#include "invgp/serialize.hpp"

#include <fstream>

namespace invgp {

using nlohmann::json;

nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json j;
  in >> j;
  return j;
}

Box box_from_json(const json& j) {
  std::vector<double> lo = j.at("lower").get<std::vector<double>>();
  std::vector<double> hi = j.at("upper").get<std::vector<double>>();
  return Box(Eigen::Map<const Vec>(lo.data(), lo.size()),
             Eigen::Map<const Vec>(hi.data(), hi.size()));
}

json box_to_json(const Box& b) {
  return json{{"lower", std::vector<double>(b.lower.data(), b.lower.data() + b.dim())},
              {"upper", std::vector<double>(b.upper.data(), b.upper.data() + b.dim())}};
}

namespace {

Vec vec_from_json(const json& j) {
  std::vector<double> v = j.get<std::vector<double>>();
  return Eigen::Map<const Vec>(v.data(), v.size());
}

QuadratureMeasure measure_from_json(const json& nodes_j, const json& weights_j) {
  Vec w = vec_from_json(weights_j);
  int m = static_cast<int>(w.size());
  Mat nodes(m, nodes_j.at(0).size());
  for (int i = 0; i < m; ++i) {
    nodes.row(i) = vec_from_json(nodes_j.at(i)).transpose();
  }
  return QuadratureMeasure(nodes, w);
}

}  // namespace

Kernel kernel_from_json(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  const json& params = j.at("params");
  Box domain = box_from_json(j.at("domain"));
  const json children = j.value("children", json::array());

  std::vector<Kernel> kids;
  for (const auto& c : children) kids.push_back(kernel_from_json(c));

  if (type == "squared_exponential") {
    return make_se_kernel(params.at("sigma2").get<double>(),
                          vec_from_json(params.at("lengthscales")), domain);
  }
  if (type == "constant") {
    return make_constant_kernel(params.at("value").get<double>(), domain);
  }
  if (type == "brownian") {
    return make_brownian_kernel(domain.upper[0]);
  }
  if (type == "polar_sheet") {
    return make_polar_kernels().first;
  }
  if (type == "polar_radial") {
    return make_polar_kernels().second;
  }
  if (type == "sum") {
    return add(kids);
  }
  if (type == "product") {
    return mul(kids);
  }
  if (type == "scale") {
    return scale(params.at("factor").get<double>(), kids.at(0));
  }
  if (type == "coordinate_lift") {
    return lift_to_coordinate(kids.at(0), params.at("index").get<int>(), domain);
  }
  if (type == "centered") {
    QuadratureMeasure nu = measure_from_json(params.at("nodes"), params.at("weights"));
    return make_centered_kernel(kids.at(0), nu, /*allow_unnormalized=*/true);
  }
  if (type == "additive_blocks") {
    int d = domain.dim();
    std::vector<std::vector<Kernel>> blocks(d, std::vector<Kernel>(d));
    const json& layout = params.at("layout");
    if (layout.size() != kids.size()) {
      throw std::runtime_error("additive_blocks: layout/children size mismatch");
    }
    for (std::size_t n = 0; n < kids.size(); ++n) {
      blocks.at(layout[n].at(0).get<int>()).at(layout[n].at(1).get<int>()) = kids[n];
    }
    return make_additive_kernel(blocks, domain);
  }
  if (type == "ode_span") {
    Mat sigma(2, 2);
    for (int r = 0; r < 2; ++r) {
      for (int c = 0; c < 2; ++c) sigma(r, c) = params.at("sigma").at(r).at(c).get<double>();
    }
    return make_ode_span_kernel(sigma, domain.lower[0], domain.upper[0]);
  }
  if (type == "harmonic") {
    return make_harmonic_kernel(params.at("theta").get<double>());
  }
  if (type == "symmetrized") {
    std::vector<SymbolMap> symbols;
    for (const auto& s : params.at("symbols")) symbols.push_back(symbol_from_json(s));
    GroupAction g = make_group_action(std::move(symbols), domain);
    return symmetrize_kernel(kids.at(0), g);
  }
  throw std::runtime_error("kernel_from_json: unknown kernel type '" + type + "'");
}

Kernel kernel_from_file(const std::string& path) {
  return kernel_from_json(load_json_file(path));
}

SymbolMap symbol_from_json(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "identity") return identity_symbol(j.at("dim").get<int>());
  if (type == "rotation") return rotation_symbol(j.at("angle").get<double>());
  if (type == "negation") return negation_symbol(j.at("dim").get<int>());
  if (type == "coordinate_slot") {
    return coordinate_slot_symbol(j.at("index").get<int>(),
                                  vec_from_json(j.at("anchor")));
  }
  if (type == "constant") return constant_symbol(vec_from_json(j.at("anchor")));
  throw std::runtime_error("symbol_from_json: unknown symbol type '" + type + "'");
}

std::shared_ptr<PathOperator> operator_from_json(const json& j) {
  const std::string op = j.at("op").get<std::string>();
  if (op == "composition_combination") {
    std::vector<SymbolMap> symbols;
    for (const auto& s : j.at("symbols")) symbols.push_back(symbol_from_json(s));
    return std::make_shared<CompositionCombination>(std::move(symbols),
                                                    vec_from_json(j.at("weights")));
  }
  if (op == "centering") {
    return std::make_shared<CenteringOperator>(
        measure_from_json(j.at("nodes"), j.at("weights")));
  }
  if (op == "differential") {
    const std::string which = j.at("operator").get<std::string>();
    DifferentialPathOperator::Tag tag;
    if (which == "neg_second_derivative") {
      tag = DifferentialPathOperator::Tag::kNegSecondDerivative;
    } else if (which == "laplacian_shift") {
      tag = DifferentialPathOperator::Tag::kLaplacianShift;
    } else {
      throw std::runtime_error("operator_from_json: unknown differential operator '" +
                               which + "'");
    }
    return std::make_shared<DifferentialPathOperator>(tag, j.value("h", 1e-3),
                                                      j.value("order", 2));
  }
  throw std::runtime_error("operator_from_json: unknown op '" + op + "'");
}

std::shared_ptr<PathOperator> operator_from_file(const std::string& path) {
  return operator_from_json(load_json_file(path));
}

}  // namespace invgp
