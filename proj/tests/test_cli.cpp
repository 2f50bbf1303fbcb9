#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "padicnn/serialize.hpp"
#include "test_util.hpp"

using namespace padicnn;
using testutil::random_below;

namespace {

namespace fs = std::filesystem;

struct CliResult {
    int exit_code;
    std::string output;
};

CliResult run_cli(const std::string& args) {
    const std::string command = std::string(PADICNN_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(command.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string output;
    char buffer[4096];
    std::size_t n = 0;
    while ((n = fread(buffer, 1, sizeof buffer, pipe)) > 0) output.append(buffer, n);
    const int status = pclose(pipe);
    return CliResult{WEXITSTATUS(status), output};
}

fs::path scratch_dir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "padicnn-cli-tests";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string write_file(const std::string& name, const std::string& content) {
    const fs::path path = scratch_dir() / name;
    std::ofstream out(path);
    out << content;
    return path.string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return content;
}

}  // namespace

TEST_CASE("char-eval") {
    CHECK(run_cli("char-eval --p 3 --E 3 --a 4 --x 5 --method binary").output == "25\n");
    CHECK(run_cli("--p 3 --E 3 char-eval --a 4 --x 5").output == "25\n");  // global flags
    CHECK(run_cli("char-eval --p 3 --E 3 --a 4 --x 0").output == "1\n");

    const CliResult table = run_cli("char-eval --p 3 --E 3 --a 4 --x 5 --all-methods");
    CHECK(table.exit_code == 0);
    CHECK(table.output == "mahler: 25\ntaylor: 25\nbinary: 25\n");

    CHECK(run_cli("char-eval --p 4 --E 3 --a 5 --x 1").exit_code == 64);   // not prime
    CHECK(run_cli("char-eval --p 3 --E 3 --a 5 --x 1").exit_code == 64);   // base not 1 mod p
    CHECK(run_cli("char-eval --p 3 --E 3 --a 4 --x zz").exit_code == 64);  // malformed int
    CHECK(run_cli("char-eval --p 3 --E 3 --a 4").exit_code == 64);         // missing --x
}

TEST_CASE("fit round trip on data generated from a known network") {
    std::mt19937_64 rng(6001);
    auto ctx = PadicContext::create(3, 2);
    auto work = PadicContext::create(3, 2);
    const Character chi = Character::exponential(work);

    const CharacterNetwork source(ctx, 0, chi, 1,
                                  {{random_below(rng, 3)}, {random_below(rng, 3)}},
                                  {random_below(rng, 3), random_below(rng, 3)},
                                  {{random_below(rng, 9), random_below(rng, 9)}});
    Dataset data{ctx, 0, 1, 1, {}};
    for (const BigInt& x : {BigInt(0), BigInt(1), BigInt(2)})
        data.samples.push_back({{x}, {forward(source, std::vector<BigInt>{x})[0]}});

    const std::string data_path = write_file("fit_data.json", to_file_string(dataset_to_json(data)));
    const std::string out_path = (scratch_dir() / "fit_out.json").string();
    const CliResult fit = run_cli("fit --data " + data_path + " --shape 1,2,1 --E 2 --F 0 --out " +
                                  out_path);
    CHECK(fit.exit_code == 0);

    const Json out = Json::parse(slurp(out_path));
    const LossValue loss = loss_from_json(out.at("loss"));
    CHECK(loss.zero_within_precision);
    const CharacterNetwork fitted = network_from_json(out.at("network"));
    for (const auto& sample : data.samples)
        CHECK(forward(fitted, sample.x)[0] == sample.y[0]);

    // Byte-determinism: the same command writes identical bytes.
    const std::string again_path = (scratch_dir() / "fit_again.json").string();
    run_cli("fit --data " + data_path + " --shape 1,2,1 --out " + again_path);
    CHECK(slurp(out_path) == slurp(again_path));

    // Shape mismatch is a usage error.
    CHECK(run_cli("fit --data " + data_path + " --shape 2,2,1").exit_code == 64);
}

TEST_CASE("ddp subcommand with fixed systems") {
    const std::string system = write_file("z2m2.json", R"({"L": 1, "polys": [
        {"terms": [{"exps": {"0": 2}, "coef": "1"}, {"exps": {}, "coef": "-2"}]}]}
    )");
    const CliResult r = run_cli("ddp --system " + system + " --p 3 --cap 5");
    CHECK(r.exit_code == 2);
    const Json report_json = Json::parse(r.output);
    CHECK(report_json.at("e_star") == 0);
    CHECK_FALSE(report_json.at("hit_cap").get<bool>());

    const std::string linear = write_file("zm1.json", R"({"L": 1, "polys": [
        {"terms": [{"exps": {"0": 1}, "coef": "1"}, {"exps": {}, "coef": "-1"}]}]}
    )");
    const CliResult hit = run_cli("ddp --system " + linear + " --p 2 --cap 4");
    CHECK(hit.exit_code == 0);
    CHECK(Json::parse(hit.output).at("e_star") == 4);

    CHECK(run_cli("ddp --system " + system + " --cap 5").exit_code == 64);  // p missing
}

TEST_CASE("eval of the constant-one network reports capped residuals") {
    auto ctx = PadicContext::create(3, 2);
    auto work = PadicContext::create(3, 2);
    const Character chi = Character::exponential(work);
    const CharacterNetwork constant(ctx, 0, chi, 1, {{BigInt(0)}}, {BigInt(0)}, {{BigInt(1)}});

    Dataset data{ctx, 0, 1, 1, {}};
    for (const BigInt& x : {BigInt(0), BigInt(1), BigInt(2)})
        data.samples.push_back({{x}, {ScaledPadic(ctx, 0, 1)}});

    const std::string net_path =
        write_file("const_net.json", to_file_string(network_to_json(constant)));
    const std::string data_path =
        write_file("ones_data.json", to_file_string(dataset_to_json(data)));
    const CliResult r = run_cli("eval --net " + net_path + " --data " + data_path);
    CHECK(r.exit_code == 0);
    const Json out = Json::parse(r.output);
    for (const auto& sample : out.at("samples")) {
        for (const auto& v : sample.at("residual_valuations")) {
            CHECK(v.at("valuation").get<int>() >= 2);
            CHECK(v.at("at_precision_cap").get<bool>());
        }
    }
}

TEST_CASE("compile subcommand and the unsupported branch") {
    auto ctx = PadicContext::create(2, 2);
    Dataset data{ctx, 0, 1, 1, {}};
    data.samples.push_back({{BigInt(1)}, {ScaledPadic(ctx, 0, 1)}});
    const std::string data_path =
        write_file("p2_data.json", to_file_string(dataset_to_json(data)));

    const CliResult ok = run_cli("compile --data " + data_path + " --D 1 --exp");
    CHECK(ok.exit_code == 0);
    const Json system_json = Json::parse(ok.output);
    CHECK(system_json.at("L") == 3);
    const CompiledSystem system = system_from_json(system_json);
    CHECK(system.polys.size() == 1);

    CHECK(run_cli("compile --data " + data_path + " --D 1 --a 3").exit_code == 4);
}

TEST_CASE("schema violations exit 65") {
    const std::string bad = write_file("bad.json", "{\"p\": 3, \"E\": 2");
    CHECK(run_cli("fit --data " + bad + " --shape 1,1,1").exit_code == 65);
    const std::string incomplete = write_file("incomplete.json", R"({"p": 3, "E": 2, "F": 0})");
    CHECK(run_cli("fit --data " + incomplete + " --shape 1,1,1").exit_code == 65);
    CHECK(run_cli("eval --net " + bad + " --data " + bad).exit_code == 65);
    CHECK(run_cli("ddp --system " + incomplete + " --p 3 --cap 2").exit_code == 65);
}

TEST_CASE("JSON round trips re-parse to equal values") {
    std::mt19937_64 rng(6002);
    auto ctx = PadicContext::create(5, 3);
    auto work = PadicContext::create(5, 4);
    const Character chi = Character::with_base(work, 1 + 5 * random_below(rng, work->pow(3)));

    std::vector<std::vector<BigInt>> A{{random_below(rng, 125)}, {random_below(rng, 125)}};
    std::vector<BigInt> b{random_below(rng, 125), random_below(rng, 125)};
    std::vector<std::vector<BigInt>> C{{random_below(rng, 625), random_below(rng, 625)}};
    const CharacterNetwork net(ctx, 1, chi, 1, A, b, C);

    const Json net_json = network_to_json(net);
    const CharacterNetwork parsed = network_from_json(net_json);
    CHECK(parsed.weights == net.weights);
    CHECK(parsed.bias == net.bias);
    CHECK(parsed.coeff == net.coeff);
    CHECK(parsed.chi == net.chi);
    CHECK(network_to_json(parsed) == net_json);

    Dataset data{ctx, 1, 1, 1, {}};
    data.samples.push_back({{random_below(rng, 125)}, {ScaledPadic(ctx, 1, 17)}});
    const Json data_json = dataset_to_json(data);
    const Dataset parsed_data = dataset_from_json(data_json);
    CHECK(dataset_to_json(parsed_data) == data_json);

    const CompiledSystem system = compile_residual(chi, data, 2);
    const Json system_json = system_to_json(system);
    const CompiledSystem parsed_system = system_from_json(system_json);
    CHECK(parsed_system.polys == system.polys);
    CHECK(parsed_system.layout == system.layout);
    CHECK(system_to_json(parsed_system) == system_json);

    const Json chi_json = character_to_json(chi);
    CHECK(character_to_json(character_from_json(chi_json)) == chi_json);
}
