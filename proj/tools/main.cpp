#include <chrono>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "padicnn/serialize.hpp"

using namespace padicnn;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_positive_minimum = 2;
constexpr int exit_overflow = 3;
constexpr int exit_unsupported = 4;
constexpr int exit_usage = 64;
constexpr int exit_schema = 65;

std::string read_input(const std::string& path) {
    if (path == "-") {
        std::ostringstream buffer;
        buffer << std::cin.rdbuf();
        return buffer.str();
    }
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open input file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_output(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << content;
}

Json parse_json(const std::string& text) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw SchemaError(std::string("malformed JSON: ") + e.what());
    }
}

// Command-line integers are usage errors when malformed, unlike file
// contents (schema errors).
BigInt parse_cli_bigint(const std::string& s) {
    try {
        return BigInt(s);
    } catch (const std::exception&) {
        throw std::invalid_argument("malformed integer: " + s);
    }
}

struct CharacterSpec {
    std::string base;  // decimal string; empty means exponential
    bool exponential = false;

    Character build(const ContextPtr& work) const {
        if (exponential || base.empty()) return Character::exponential(work);
        return Character::with_base(work, parse_cli_bigint(base));
    }
};

struct CharEvalArgs {
    std::int64_t p = 0;
    int E = 1;
    CharacterSpec chi;
    std::string x;
    std::string method = "binary";
    bool all_methods = false;
};

EvalMethod parse_method(const std::string& name) {
    if (name == "mahler") return EvalMethod::mahler;
    if (name == "taylor") return EvalMethod::taylor;
    if (name == "binary") return EvalMethod::binary;
    throw std::invalid_argument("unknown method: " + name);
}

int run_char_eval(const CharEvalArgs& args) {
    auto ctx = PadicContext::create(args.p, args.E);
    const Character chi = args.chi.build(ctx);
    const BigInt x = parse_cli_bigint(args.x);
    if (args.all_methods) {
        for (const auto* name : {"mahler", "taylor", "binary"})
            std::cout << name << ": " << eval_character(chi, x, parse_method(name)) << "\n";
        return exit_ok;
    }
    std::cout << eval_character(chi, x, parse_method(args.method)) << "\n";
    return exit_ok;
}

struct EvalArgs {
    std::string net_path;
    std::string data_path;
    std::string method = "binary";
    std::string out;
};

int run_eval(const EvalArgs& args) {
    const CharacterNetwork net = network_from_json(parse_json(read_input(args.net_path)));
    const Dataset data = dataset_from_json(parse_json(read_input(args.data_path)));
    if (!net.ctx->same(*data.ctx) || net.denom_exponent != data.denom_exponent ||
        net.input_dim != data.input_dim || net.output_dim != data.output_dim)
        throw SchemaError("eval: network and dataset disagree on (p, E, F, N, M)");

    const EvalMethod method = parse_method(args.method);
    Json out = context_to_json(*net.ctx);
    out["F"] = net.denom_exponent;
    out["N"] = net.input_dim;
    out["M"] = net.output_dim;
    Json samples = Json::array();
    for (const auto& sample : data.samples) {
        const auto predicted = forward(net, sample.x, method);
        Json entry;
        Json outputs = Json::array();
        Json valuations = Json::array();
        for (std::size_t r = 0; r < predicted.size(); ++r) {
            outputs.push_back(scaled_to_json(predicted[r]));
            const NormInfo norm = padic_norm(sample.y[r] - predicted[r]);
            Json v;
            v["valuation"] = norm.valuation;
            v["at_precision_cap"] = norm.at_precision_cap;
            valuations.push_back(v);
        }
        entry["output"] = outputs;
        entry["residual_valuations"] = valuations;
        samples.push_back(entry);
    }
    out["samples"] = samples;
    write_output(args.out, to_file_string(out));
    return exit_ok;
}

struct CompileArgs {
    std::string data_path;
    int hidden_dim = 1;
    CharacterSpec chi;
    std::string out;
};

int run_compile(const CompileArgs& args) {
    const Dataset data = dataset_from_json(parse_json(read_input(args.data_path)));
    auto work = PadicContext::create(data.ctx->prime(),
                                     data.ctx->precision() + data.denom_exponent);
    const Character chi = args.chi.build(work);
    const CompiledSystem system = compile_residual(chi, data, args.hidden_dim);
    write_output(args.out, to_file_string(system_to_json(system)));
    return exit_ok;
}

struct DdpArgs {
    std::string system_path;
    std::int64_t p = 0;
    int cap = -1;
    std::size_t frontier_budget = 1'000'000;
    std::string out;
};

int run_ddp(const DdpArgs& args) {
    const Json j = parse_json(read_input(args.system_path));
    if (!j.contains("L") || !j.at("L").is_number_integer())
        throw SchemaError("system: missing integer field L");
    const int var_count = j.at("L").get<int>();
    BigInt p;
    if (j.contains("p")) {
        p = j.at("p").is_string() ? bigint_from_string(j.at("p").get<std::string>())
                                  : BigInt(j.at("p").get<std::int64_t>());
        if (args.p != 0 && p != args.p)
            throw std::invalid_argument("--p disagrees with the system file");
    } else if (args.p != 0) {
        p = args.p;
    } else {
        throw std::invalid_argument("ddp: pass --p or store p in the system file");
    }
    if (args.cap < 0) throw std::invalid_argument("ddp: --cap is required");
    if (!j.contains("polys") || !j.at("polys").is_array())
        throw SchemaError("system: polys must be an array");
    std::vector<IntPolynomial> polys;
    for (const auto& poly : j.at("polys")) polys.push_back(polynomial_from_json(poly, var_count));

    DdpOptions options;
    options.frontier_budget = args.frontier_budget;
    const DdpReport report = ddp_max_exponent(polys, p, var_count, args.cap, options);
    write_output(args.out, to_file_string(report_to_json(report)));
    return report.hit_cap ? exit_ok : exit_positive_minimum;
}

struct FitArgs {
    std::string data_path;
    std::string shape;  // "N,D,M"
    int E = -1;
    int F = -1;
    CharacterSpec chi;
    std::string norm = "linf";
    std::size_t frontier_budget = 1'000'000;
    std::int64_t enumeration_budget = 4'000'000;
    std::string out;
};

int run_fit(const FitArgs& args) {
    const Dataset data = dataset_from_json(parse_json(read_input(args.data_path)));
    int N = 0, D = 0, M = 0;
    {
        char c1 = 0, c2 = 0;
        std::istringstream shape(args.shape);
        if (!(shape >> N >> c1 >> D >> c2 >> M) || c1 != ',' || c2 != ',' || !shape.eof())
            throw std::invalid_argument("fit: --shape must be N,D,M");
    }
    if (N != data.input_dim || M != data.output_dim)
        throw std::invalid_argument("fit: shape disagrees with the dataset");
    if (args.E >= 0 && args.E != data.ctx->precision())
        throw std::invalid_argument("fit: --E disagrees with the dataset");
    if (args.F >= 0 && args.F != data.denom_exponent)
        throw std::invalid_argument("fit: --F disagrees with the dataset");

    auto work = PadicContext::create(data.ctx->prime(),
                                     data.ctx->precision() + data.denom_exponent);
    const Character chi = args.chi.build(work);
    NormKind norm = NormKind::linf;
    if (args.norm == "l1")
        norm = NormKind::l1;
    else if (args.norm != "linf")
        throw std::invalid_argument("fit: --norm must be linf or l1");

    DdpOptions ddp_options;
    ddp_options.frontier_budget = args.frontier_budget;
    BruteForceOptions brute_options;
    brute_options.enumeration_budget = args.enumeration_budget;

    const TrainResult result = train(chi, data, D, norm, ddp_options, brute_options);
    Json out;
    out["network"] = network_to_json(result.network);
    out["loss"] = loss_to_json(result.loss);
    out["report"] = report_to_json(result.report);
    write_output(args.out, to_file_string(out));
    return result.loss.zero_within_precision ? exit_ok : exit_positive_minimum;
}

struct BenchArgs {
    std::vector<std::int64_t> primes{2, 3, 5, 7};
    std::vector<int> precisions{4, 8, 12};
    int reps = 200;
    std::uint64_t seed = 42;
};

int run_bench(const BenchArgs& args) {
    using clock = std::chrono::steady_clock;
    std::mt19937_64 rng(args.seed);
    std::cout << "p\tE\tmahler_ns\ttaylor_ns\tbinary_ns\n";
    for (const std::int64_t p : args.primes) {
        for (const int E : args.precisions) {
            auto ctx = PadicContext::create(p, E);
            const Character exp_chi = Character::exponential(ctx);
            std::vector<BigInt> bases, xs;
            for (int i = 0; i < args.reps; ++i) {
                bases.push_back(1 + BigInt(p) * (BigInt(rng()) % ctx->pow(E - 1)));
                xs.push_back(BigInt(rng()) % ctx->modulus());
            }
            // The eval calls cross a translation-unit boundary, so the loop
            // cannot be elided.
            auto time_method = [&](auto&& body) {
                const auto start = clock::now();
                for (int i = 0; i < args.reps; ++i) body(i);
                const auto stop = clock::now();
                return std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start)
                           .count() /
                       args.reps;
            };
            const auto mahler_ns = time_method([&](int i) {
                return eval_mahler(Character::with_base(ctx, bases[static_cast<std::size_t>(i)]),
                                   xs[static_cast<std::size_t>(i)]);
            });
            const auto taylor_ns = time_method(
                [&](int i) { return eval_taylor_exp(*ctx, xs[static_cast<std::size_t>(i)]); });
            const auto binary_ns = time_method([&](int i) {
                return eval_binary(exp_chi, xs[static_cast<std::size_t>(i)]);
            });
            std::cout << p << "\t" << E << "\t" << mahler_ns << "\t" << taylor_ns << "\t"
                      << binary_ns << "\n";
        }
    }
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"p-adic character networks: exact evaluation, compilation and training"};
    app.require_subcommand(1);

    // Hyperparameters may be given globally (before the subcommand) or on
    // the subcommand itself; the subcommand value wins.
    std::int64_t global_p = 0;
    int global_E = 0;
    int global_F = -1;
    app.add_option("--p", global_p, "prime (default for subcommands)");
    app.add_option("--E", global_E, "precision exponent (default for subcommands)");
    app.add_option("--F", global_F, "denominator exponent (default for subcommands)");

    CharEvalArgs char_args;
    EvalArgs eval_args;
    CompileArgs compile_args;
    DdpArgs ddp_args;
    FitArgs fit_args;
    BenchArgs bench_args;

    auto* char_eval = app.add_subcommand("char-eval", "evaluate a character a^x mod p^E");
    char_eval->add_option("--p", char_args.p, "prime");
    char_eval->add_option("--E", char_args.E, "precision exponent");
    char_eval->add_option("--a", char_args.chi.base, "character base (decimal)");
    char_eval->add_flag("--exp", char_args.chi.exponential, "use the base exp_p(q)");
    char_eval->add_option("--x", char_args.x, "argument (decimal)")->required();
    char_eval->add_option("--method", char_args.method, "mahler|taylor|binary");
    char_eval->add_flag("--all-methods", char_args.all_methods, "print a three-way table");

    auto* eval = app.add_subcommand("eval", "run a network forward over a dataset");
    eval->add_option("--net", eval_args.net_path, "network JSON (- for stdin)")->required();
    eval->add_option("--data", eval_args.data_path, "dataset JSON (- for stdin)")->required();
    eval->add_option("--method", eval_args.method, "mahler|taylor|binary");
    eval->add_option("--out", eval_args.out, "output path (- for stdout)");

    auto* compile = app.add_subcommand("compile", "compile the training residual to polynomials");
    compile->add_option("--data", compile_args.data_path, "dataset JSON")->required();
    compile->add_option("--D", compile_args.hidden_dim, "hidden dimension")->required();
    compile->add_option("--a", compile_args.chi.base, "character base at precision E+F");
    compile->add_flag("--exp", compile_args.chi.exponential, "use the base exp_p(q)");
    compile->add_option("--out", compile_args.out, "output path");

    auto* ddp = app.add_subcommand("ddp", "maximal feasible exponent by digit DP");
    ddp->add_option("--system", ddp_args.system_path, "system JSON")->required();
    ddp->add_option("--p", ddp_args.p, "prime (may come from the file)");
    ddp->add_option("--cap", ddp_args.cap, "level cap")->required();
    ddp->add_option("--frontier-budget", ddp_args.frontier_budget, "witness budget");
    ddp->add_option("--out", ddp_args.out, "output path");

    auto* fit = app.add_subcommand("fit", "exact training to the minimum loss");
    fit->add_option("--data", fit_args.data_path, "dataset JSON")->required();
    fit->add_option("--shape", fit_args.shape, "N,D,M")->required();
    fit->add_option("--E", fit_args.E, "precision exponent (must match the dataset)");
    fit->add_option("--F", fit_args.F, "denominator exponent (must match the dataset)");
    fit->add_option("--a", fit_args.chi.base, "character base at precision E+F");
    fit->add_flag("--exp", fit_args.chi.exponential, "use the base exp_p(q)");
    fit->add_option("--norm", fit_args.norm, "linf|l1");
    fit->add_option("--frontier-budget", fit_args.frontier_budget, "witness budget");
    fit->add_option("--enum-budget", fit_args.enumeration_budget, "l1 enumeration budget");
    fit->add_option("--out", fit_args.out, "output path");

    auto* bench = app.add_subcommand("bench", "time the three evaluation methods");
    bench->add_option("--p-list", bench_args.primes, "primes to benchmark")->delimiter(',');
    bench->add_option("--E-list", bench_args.precisions, "precisions to benchmark")
        ->delimiter(',');
    bench->add_option("--reps", bench_args.reps, "repetitions per cell");
    bench->add_option("--seed", bench_args.seed, "rng seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        if (char_eval->parsed()) {
            if (char_eval->count("--p") == 0) {
                if (app.count("--p") == 0)
                    throw std::invalid_argument("char-eval: --p is required");
                char_args.p = global_p;
            }
            if (char_eval->count("--E") == 0) {
                if (app.count("--E") == 0)
                    throw std::invalid_argument("char-eval: --E is required");
                char_args.E = global_E;
            }
            return run_char_eval(char_args);
        }
        if (ddp->parsed() && ddp->count("--p") == 0 && app.count("--p") > 0)
            ddp_args.p = global_p;
        if (fit->parsed()) {
            if (fit->count("--E") == 0 && app.count("--E") > 0) fit_args.E = global_E;
            if (fit->count("--F") == 0 && app.count("--F") > 0) fit_args.F = global_F;
        }
        if (eval->parsed()) return run_eval(eval_args);
        if (compile->parsed()) return run_compile(compile_args);
        if (ddp->parsed()) return run_ddp(ddp_args);
        if (fit->parsed()) return run_fit(fit_args);
        if (bench->parsed()) return run_bench(bench_args);
    } catch (const UnsupportedCompilation& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_unsupported;
    } catch (const FrontierOverflow& e) {
        std::cerr << "error: " << e.what() << " (completed level " << e.completed_level << ")\n";
        return exit_overflow;
    } catch (const EnumerationBudgetExceeded& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_overflow;
    } catch (const SchemaError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_schema;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::out_of_range& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return exit_ok;
}
