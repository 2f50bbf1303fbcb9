#pragma once

#include <stdexcept>
#include <string>

#include "json.hpp"

#include "padicnn/solver.hpp"

namespace padicnn {

using Json = nlohmann::json;

/// Input file does not match the documented schema.
class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

BigInt bigint_from_string(const std::string& s);

// All value-carrying numbers serialize as decimal strings; structural
// fields (p, E, F, N, D, M) as JSON integers.

Json context_to_json(const PadicContext& ctx);
ContextPtr context_from_json(const Json& j);

Json scaled_to_json(const ScaledPadic& x);
ScaledPadic scaled_from_json(const Json& j, const ContextPtr& ctx);

Json character_to_json(const Character& chi);
Character character_from_json(const Json& j);

Json network_to_json(const CharacterNetwork& net);
CharacterNetwork network_from_json(const Json& j);

Json dataset_to_json(const Dataset& data);
Dataset dataset_from_json(const Json& j);

Json polynomial_to_json(const IntPolynomial& f);
IntPolynomial polynomial_from_json(const Json& j, int var_count);

Json system_to_json(const CompiledSystem& system);
CompiledSystem system_from_json(const Json& j);

Json report_to_json(const DdpReport& report);
DdpReport report_from_json(const Json& j);

Json loss_to_json(const LossValue& loss);
LossValue loss_from_json(const Json& j);

/// dump(2) with a trailing newline; key order is sorted, so output is
/// byte-deterministic for equal inputs.
std::string to_file_string(const Json& j);

}  // namespace padicnn
