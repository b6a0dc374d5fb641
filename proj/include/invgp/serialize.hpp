#ifndef INVGP_SERIALIZE_HPP
#define INVGP_SERIALIZE_HPP

#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "invgp/invariance.hpp"
#include "invgp/kernels.hpp"
#include "invgp/operators.hpp"

namespace invgp {

// Kernel specs are JSON documents {type, params, domain, children[]}.
// kernel_from_json(k.spec()) reconstructs an equivalent kernel for every
// serializable type; unknown types throw with the offending type name.
Kernel kernel_from_json(const nlohmann::json& j);
Kernel kernel_from_file(const std::string& path);

SymbolMap symbol_from_json(const nlohmann::json& j);

// Operator specs: {op: "composition_combination", symbols, weights},
// {op: "centering", nodes, weights}, or
// {op: "differential", operator: "neg_second_derivative"|"laplacian_shift",
//  h, order}.
std::shared_ptr<PathOperator> operator_from_json(const nlohmann::json& j);
std::shared_ptr<PathOperator> operator_from_file(const std::string& path);

Box box_from_json(const nlohmann::json& j);
nlohmann::json box_to_json(const Box& b);

nlohmann::json load_json_file(const std::string& path);

}  // namespace invgp

#endif
