#include "padicnn/serialize.hpp"

#include <cstdint>
#include <limits>

namespace padicnn {

namespace {

BigInt prime_from_json(const Json& j) {
    if (j.is_string()) return bigint_from_string(j.get<std::string>());
    if (j.is_number_unsigned() || j.is_number_integer()) return BigInt(j.get<std::int64_t>());
    throw SchemaError("expected an integer or decimal string for p");
}

int int_field(const Json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_number_integer())
        throw SchemaError(std::string("missing or non-integer field: ") + key);
    return j.at(key).get<int>();
}

std::string string_field(const Json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_string())
        throw SchemaError(std::string("missing or non-string field: ") + key);
    return j.at(key).get<std::string>();
}

Json bigint_to_json(const BigInt& x) { return Json(x.str()); }

std::vector<BigInt> bigint_vector_from_json(const Json& j) {
    if (!j.is_array()) throw SchemaError("expected an array of decimal strings");
    std::vector<BigInt> out;
    out.reserve(j.size());
    for (const auto& item : j) {
        if (!item.is_string()) throw SchemaError("expected a decimal string");
        out.push_back(bigint_from_string(item.get<std::string>()));
    }
    return out;
}

Json bigint_vector_to_json(const std::vector<BigInt>& v) {
    Json out = Json::array();
    for (const auto& x : v) out.push_back(bigint_to_json(x));
    return out;
}

}  // namespace

BigInt bigint_from_string(const std::string& s) {
    try {
        return BigInt(s);
    } catch (const std::exception&) {
        throw SchemaError("malformed decimal integer: " + s);
    }
}

std::string to_file_string(const Json& j) { return j.dump(2) + "\n"; }

Json context_to_json(const PadicContext& ctx) {
    Json j;
    if (ctx.prime() <= BigInt(std::numeric_limits<std::int64_t>::max()))
        j["p"] = ctx.prime().convert_to<std::int64_t>();
    else
        j["p"] = ctx.prime().str();
    j["E"] = ctx.precision();
    return j;
}

ContextPtr context_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("p")) throw SchemaError("context: expected {p, E}");
    try {
        return PadicContext::create(prime_from_json(j.at("p")), int_field(j, "E"));
    } catch (const std::invalid_argument& e) {
        throw SchemaError(std::string("context: ") + e.what());
    }
}

Json scaled_to_json(const ScaledPadic& x) {
    Json j;
    j["num"] = bigint_to_json(x.numerator());
    j["F"] = x.denom_exponent();
    return j;
}

ScaledPadic scaled_from_json(const Json& j, const ContextPtr& ctx) {
    if (!j.is_object()) throw SchemaError("scaled value: expected {num, F}");
    return ScaledPadic(ctx, int_field(j, "F"), bigint_from_string(string_field(j, "num")));
}

Json character_to_json(const Character& chi) {
    Json j = context_to_json(*chi.context());
    if (chi.is_exponential())
        j["exp"] = true;
    else
        j["a"] = bigint_to_json(chi.base());
    return j;
}

Character character_from_json(const Json& j) {
    ContextPtr ctx = context_from_json(j);
    if (j.contains("exp")) {
        if (!j.at("exp").is_boolean() || !j.at("exp").get<bool>())
            throw SchemaError("character: exp must be true when present");
        return Character::exponential(std::move(ctx));
    }
    try {
        return Character::with_base(std::move(ctx), bigint_from_string(string_field(j, "a")));
    } catch (const std::domain_error& e) {
        throw SchemaError(std::string("character: ") + e.what());
    }
}

Json network_to_json(const CharacterNetwork& net) {
    Json j = context_to_json(*net.ctx);
    j["F"] = net.denom_exponent;
    j["N"] = net.input_dim;
    j["D"] = net.hidden_dim;
    j["M"] = net.output_dim;
    j["chi"] = character_to_json(net.chi);
    Json a = Json::array();
    for (const auto& row : net.weights) a.push_back(bigint_vector_to_json(row));
    j["A"] = a;
    j["b"] = bigint_vector_to_json(net.bias);
    Json c = Json::array();
    for (const auto& row : net.coeff) {
        Json crow = Json::array();
        for (const auto& v : row) {
            Json entry;
            entry["num"] = bigint_to_json(v);
            entry["F"] = net.denom_exponent;
            crow.push_back(entry);
        }
        c.push_back(crow);
    }
    j["C"] = c;
    return j;
}

CharacterNetwork network_from_json(const Json& j) {
    ContextPtr ctx = context_from_json(j);
    const int F = int_field(j, "F");
    const int N = int_field(j, "N");
    if (!j.contains("chi")) throw SchemaError("network: missing chi");
    Character chi = character_from_json(j.at("chi"));
    if (chi.context()->prime() != ctx->prime() ||
        chi.context()->precision() != ctx->precision() + F)
        throw SchemaError("network: chi must live at precision E + F over the same prime");

    if (!j.contains("A") || !j.at("A").is_array()) throw SchemaError("network: A must be an array");
    std::vector<std::vector<BigInt>> weights;
    for (const auto& row : j.at("A")) weights.push_back(bigint_vector_from_json(row));
    std::vector<BigInt> bias = bigint_vector_from_json(
        j.contains("b") ? j.at("b") : throw SchemaError("network: missing b"));
    if (!j.contains("C") || !j.at("C").is_array()) throw SchemaError("network: C must be an array");
    std::vector<std::vector<BigInt>> coeff;
    for (const auto& row : j.at("C")) {
        if (!row.is_array()) throw SchemaError("network: C rows must be arrays");
        std::vector<BigInt> crow;
        for (const auto& entry : row) {
            if (int_field(entry, "F") != F)
                throw SchemaError("network: C entry denominator exponent differs from F");
            crow.push_back(bigint_from_string(string_field(entry, "num")));
        }
        coeff.push_back(std::move(crow));
    }
    try {
        CharacterNetwork net(std::move(ctx), F, std::move(chi), N, std::move(weights),
                             std::move(bias), std::move(coeff));
        if (net.hidden_dim != int_field(j, "D") || net.output_dim != int_field(j, "M"))
            throw SchemaError("network: D or M does not match the matrix shapes");
        return net;
    } catch (const std::invalid_argument& e) {
        throw SchemaError(std::string("network: ") + e.what());
    }
}

Json dataset_to_json(const Dataset& data) {
    Json j = context_to_json(*data.ctx);
    j["F"] = data.denom_exponent;
    j["N"] = data.input_dim;
    j["M"] = data.output_dim;
    Json samples = Json::array();
    for (const auto& s : data.samples) {
        Json sample;
        sample["x"] = bigint_vector_to_json(s.x);
        Json y = Json::array();
        for (const auto& v : s.y) y.push_back(scaled_to_json(v));
        sample["y"] = y;
        samples.push_back(sample);
    }
    j["samples"] = samples;
    return j;
}

Dataset dataset_from_json(const Json& j) {
    Dataset data;
    data.ctx = context_from_json(j);
    data.denom_exponent = int_field(j, "F");
    data.input_dim = int_field(j, "N");
    data.output_dim = int_field(j, "M");
    if (!j.contains("samples") || !j.at("samples").is_array())
        throw SchemaError("dataset: samples must be an array");
    for (const auto& s : j.at("samples")) {
        Dataset::Sample sample;
        sample.x = bigint_vector_from_json(
            s.contains("x") ? s.at("x") : throw SchemaError("dataset: sample missing x"));
        if (!s.contains("y") || !s.at("y").is_array())
            throw SchemaError("dataset: sample missing y");
        for (const auto& v : s.at("y")) {
            if (int_field(v, "F") != data.denom_exponent)
                throw SchemaError("dataset: y entry denominator exponent differs from F");
            sample.y.push_back(scaled_from_json(v, data.ctx));
        }
        data.samples.push_back(std::move(sample));
    }
    try {
        data.validate();
    } catch (const std::invalid_argument& e) {
        throw SchemaError(std::string("dataset: ") + e.what());
    }
    return data;
}

Json polynomial_to_json(const IntPolynomial& f) {
    Json terms = Json::array();
    for (const auto& [monomial, coefficient] : f.terms()) {
        Json term;
        Json exps = Json::object();
        for (const auto& [var, exp] : monomial.factors()) exps[std::to_string(var)] = exp;
        term["exps"] = exps;
        term["coef"] = bigint_to_json(coefficient);
        terms.push_back(term);
    }
    Json j;
    j["terms"] = terms;
    return j;
}

IntPolynomial polynomial_from_json(const Json& j, int var_count) {
    if (!j.is_object() || !j.contains("terms") || !j.at("terms").is_array())
        throw SchemaError("polynomial: expected {terms: [...]}");
    IntPolynomial f(var_count);
    for (const auto& term : j.at("terms")) {
        if (!term.contains("exps") || !term.at("exps").is_object())
            throw SchemaError("polynomial term: missing exps");
        Monomial m;
        for (const auto& [key, value] : term.at("exps").items()) {
            int var = 0;
            try {
                var = std::stoi(key);
            } catch (const std::exception&) {
                throw SchemaError("polynomial term: bad variable index " + key);
            }
            if (!value.is_number_integer() || value.get<int>() <= 0)
                throw SchemaError("polynomial term: exponents must be positive integers");
            m = m * Monomial::variable(var, value.get<int>());
        }
        f.add_term(m, bigint_from_string(string_field(term, "coef")));
    }
    return f;
}

namespace {

std::string kind_name(VariableInfo::Kind kind) {
    switch (kind) {
        case VariableInfo::Kind::weight: return "A";
        case VariableInfo::Kind::bias: return "b";
        case VariableInfo::Kind::coeff: return "C";
    }
    return "?";
}

VariableInfo::Kind kind_from_name(const std::string& name) {
    if (name == "A") return VariableInfo::Kind::weight;
    if (name == "b") return VariableInfo::Kind::bias;
    if (name == "C") return VariableInfo::Kind::coeff;
    throw SchemaError("layout: unknown parameter kind " + name);
}

}  // namespace

Json system_to_json(const CompiledSystem& system) {
    Json j = context_to_json(*system.ctx);
    j["F"] = system.denom_exponent;
    j["N"] = system.input_dim;
    j["D"] = system.hidden_dim;
    j["M"] = system.output_dim;
    j["L"] = system.var_count;
    Json layout = Json::array();
    for (std::size_t i = 0; i < system.layout.size(); ++i) {
        const VariableInfo& info = system.layout[i];
        Json entry;
        entry["var"] = static_cast<int>(i);
        entry["kind"] = kind_name(info.kind);
        entry["row"] = info.row;
        entry["col"] = info.col;
        layout.push_back(entry);
    }
    j["layout"] = layout;
    Json polys = Json::array();
    for (const auto& f : system.polys) polys.push_back(polynomial_to_json(f));
    j["polys"] = polys;
    return j;
}

CompiledSystem system_from_json(const Json& j) {
    CompiledSystem system{context_from_json(j), int_field(j, "F"), int_field(j, "N"),
                          int_field(j, "D"),    int_field(j, "M"), int_field(j, "L"),
                          {},                   {}};
    if (!j.contains("layout") || !j.at("layout").is_array())
        throw SchemaError("system: layout must be an array");
    system.layout.resize(j.at("layout").size());
    for (const auto& entry : j.at("layout")) {
        const int var = int_field(entry, "var");
        if (var < 0 || var >= static_cast<int>(system.layout.size()))
            throw SchemaError("system: layout variable index out of range");
        system.layout[static_cast<std::size_t>(var)] =
            VariableInfo{kind_from_name(string_field(entry, "kind")), int_field(entry, "row"),
                         int_field(entry, "col")};
    }
    if (static_cast<int>(system.layout.size()) != system.var_count)
        throw SchemaError("system: layout size does not match L");
    if (!j.contains("polys") || !j.at("polys").is_array())
        throw SchemaError("system: polys must be an array");
    for (const auto& poly : j.at("polys"))
        system.polys.push_back(polynomial_from_json(poly, system.var_count));
    return system;
}

Json report_to_json(const DdpReport& report) {
    Json j;
    j["e_star"] = report.e_star;
    j["hit_cap"] = report.hit_cap;
    j["zero_count_per_level"] = report.zero_count_per_level;
    j["witness"] = report.witness ? bigint_vector_to_json(*report.witness) : Json(nullptr);
    return j;
}

DdpReport report_from_json(const Json& j) {
    DdpReport report;
    report.e_star = int_field(j, "e_star");
    if (!j.contains("hit_cap") || !j.at("hit_cap").is_boolean())
        throw SchemaError("report: hit_cap must be a boolean");
    report.hit_cap = j.at("hit_cap").get<bool>();
    if (!j.contains("zero_count_per_level") || !j.at("zero_count_per_level").is_array())
        throw SchemaError("report: zero_count_per_level must be an array");
    for (const auto& n : j.at("zero_count_per_level"))
        report.zero_count_per_level.push_back(n.get<std::size_t>());
    if (j.contains("witness") && !j.at("witness").is_null())
        report.witness = bigint_vector_from_json(j.at("witness"));
    return report;
}

Json loss_to_json(const LossValue& loss) {
    Json j;
    j["norm"] = loss.kind == NormKind::linf ? "linf" : "l1";
    j["zero_within_precision"] = loss.zero_within_precision;
    if (loss.kind == NormKind::linf)
        j["exponent"] = loss.exponent;
    else
        j["exponent"] = Json(nullptr);
    j["value"] = loss.value.str();
    return j;
}

LossValue loss_from_json(const Json& j) {
    LossValue loss;
    const std::string norm = string_field(j, "norm");
    if (norm == "linf")
        loss.kind = NormKind::linf;
    else if (norm == "l1")
        loss.kind = NormKind::l1;
    else
        throw SchemaError("loss: unknown norm " + norm);
    if (!j.contains("zero_within_precision") || !j.at("zero_within_precision").is_boolean())
        throw SchemaError("loss: zero_within_precision must be a boolean");
    loss.zero_within_precision = j.at("zero_within_precision").get<bool>();
    if (loss.kind == NormKind::linf) loss.exponent = int_field(j, "exponent");
    try {
        loss.value = BigRational(string_field(j, "value"));
    } catch (const std::exception&) {
        throw SchemaError("loss: malformed rational value");
    }
    return loss;
}

}  // namespace padicnn
