#include <cinttypes>
#include <cstdio>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "slimconv/checks.hpp"
#include "slimconv/cost.hpp"
#include "slimconv/graph.hpp"
#include "slimconv/tensor.hpp"

namespace {

using namespace slimconv;

bool parse_shape(const std::string& s, int out[4]) {
    int n = 0, c = 0, h = 0, w = 0;
    char extra;
    if (std::sscanf(s.c_str(), "%d,%d,%d,%d%c", &n, &c, &h, &w, &extra) != 4) return false;
    out[0] = n;
    out[1] = c;
    out[2] = h;
    out[3] = w;
    return n > 0 && c > 0 && h > 0 && w > 0;
}

int cmd_analyze(const std::string& spec_path, const std::string& shape_opt,
                const std::string& format, const std::string& compare_path, bool double_macs) {
    GraphSpec spec = load_spec_file(spec_path);
    if (!shape_opt.empty()) {
        int dims[4];
        if (!parse_shape(shape_opt, dims)) {
            std::cerr << "analyze: --input-shape expects n,c,h,w\n";
            return 2;
        }
        spec.in_n = dims[0];
        spec.in_c = dims[1];
        spec.in_h = dims[2];
        spec.in_w = dims[3];
    }
    const CostReport report = graph_cost(spec);
    if (format == "csv")
        std::cout << render_csv(report, double_macs);
    else
        std::cout << render_table(report, double_macs);
    if (!compare_path.empty()) {
        GraphSpec base = load_spec_file(compare_path);
        base.in_n = spec.in_n;
        base.in_c = spec.in_c;
        base.in_h = spec.in_h;
        base.in_w = spec.in_w;
        std::cout << "\ncompare (baseline = " << compare_path << "):\n"
                  << render_compare(graph_cost(base), report, double_macs);
    }
    return 0;
}

int cmd_run(const std::string& spec_path, const std::string& weights_path, std::uint64_t seed,
            const std::string& input_path, bool random_in, const std::string& output_path,
            const std::string& layer) {
    const GraphSpec spec = load_spec_file(spec_path);
    const WeightStore store =
        weights_path.empty() ? init_weights(spec, seed) : load_weights(weights_path);
    Tensor x;
    if (random_in) {
        x = random_input(spec, seed);
    } else if (!input_path.empty()) {
        x = read_ntsr(input_path);
    } else {
        std::cerr << "run: provide --input <file.ntsr> or --random\n";
        return 2;
    }
    const std::map<std::string, Tensor> values = forward(spec, store, x);

    std::vector<std::string> to_report = layer.empty() ? spec.outputs : std::vector{layer};
    for (const std::string& name : to_report) {
        const auto it = values.find(name);
        if (it == values.end()) {
            std::cerr << "run: unknown layer '" << name << "'\n";
            return 2;
        }
        std::printf("output %s shape=%s fnv1a64=%016" PRIx64 "\n", name.c_str(),
                    it->second.shape_str().c_str(), fnv1a64(it->second));
    }
    if (!output_path.empty()) write_ntsr(values.at(to_report.front()), output_path);
    return 0;
}

int cmd_check(const std::string& suite, std::uint64_t seed, double tol) {
    CheckOptions opts;
    opts.seed = seed;
    if (tol > 0.0) opts.fd_rel_tol = tol;
    const std::vector<CheckResult> results = run_check_suite(suite, opts);
    bool all_pass = true;
    for (const CheckResult& r : results) {
        std::printf("[%s] %s.%s measured=%.6g bound=%.6g%s%s\n", r.pass ? "PASS" : "FAIL",
                    r.suite.c_str(), r.name.c_str(), r.measured, r.bound,
                    r.detail.empty() ? "" : "  ", r.detail.c_str());
        all_pass = all_pass && r.pass;
    }
    std::printf("%s: %zu properties, %s\n", suite.c_str(), results.size(),
                all_pass ? "all passed" : "FAILURES");
    return all_pass ? 0 : 1;
}

int cmd_bench(const std::string& op, const std::string& shape_opt, int out_c, int k, int repeat,
              std::uint64_t seed) {
    int dims[4];
    if (!parse_shape(shape_opt, dims)) {
        std::cerr << "bench: --shape expects n,c,h,w\n";
        return 2;
    }
    const BenchStats s = bench_op(op, dims[0], dims[1], dims[2], dims[3], out_c, k, repeat, seed);
    std::printf("op=%s shape=%s out_c=%d k=%d repeat=%d median_ms=%.3f p10_ms=%.3f p90_ms=%.3f\n",
                op.c_str(), shape_opt.c_str(), out_c, k, s.samples, s.median_ms, s.p10_ms,
                s.p90_ms);
    return 0;
}

int cmd_dump_maps(const std::string& spec_path, const std::string& weights_path,
                  std::uint64_t seed, const std::string& input_path, bool random_in,
                  const std::string& layer, const std::string& outdir) {
    const GraphSpec spec = load_spec_file(spec_path);
    const WeightStore store =
        weights_path.empty() ? init_weights(spec, seed) : load_weights(weights_path);
    Tensor x;
    if (random_in) {
        x = random_input(spec, seed);
    } else if (!input_path.empty()) {
        x = read_ntsr(input_path);
    } else {
        std::cerr << "dump-maps: provide --input <file.ntsr> or --random\n";
        return 2;
    }
    for (const std::string& path : dump_feature_maps(spec, store, x, layer, outdir))
        std::cout << path << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"slimconv: lightweight convolution blocks, box losses and cost analysis"};
    app.require_subcommand(1);

    // analyze
    auto* analyze = app.add_subcommand("analyze", "print the analytic cost report of a spec");
    std::string an_spec, an_shape, an_format = "table", an_compare;
    bool an_double = false;
    analyze->add_option("spec", an_spec, "graph spec file")->required();
    analyze->add_option("--input-shape", an_shape, "override input as n,c,h,w");
    analyze->add_option("--format", an_format, "table|csv")
        ->check(CLI::IsMember({"table", "csv"}));
    analyze->add_option("--compare", an_compare, "baseline spec for a delta section");
    analyze->add_flag("--double-macs", an_double, "report multiply+add instead of MACs");

    // run
    auto* run = app.add_subcommand("run", "execute a spec and write an output tensor");
    std::string run_spec, run_weights, run_input, run_output, run_layer;
    std::uint64_t run_seed = 0;
    bool run_random = false;
    run->add_option("spec", run_spec, "graph spec file")->required();
    run->add_option("--weights", run_weights, "weight file (.nwts)");
    run->add_option("--seed", run_seed, "seed for weights (and --random input)");
    run->add_option("--input", run_input, "input tensor (.ntsr)");
    run->add_flag("--random", run_random, "draw the input from the seed");
    run->add_option("--output", run_output, "output tensor path (.ntsr)");
    run->add_option("--layer", run_layer, "report this layer instead of declared outputs");

    // check
    auto* check = app.add_subcommand("check", "run verification suites");
    std::string check_suite = "all";
    std::uint64_t check_seed = 0;
    double check_tol = 0.0;
    std::vector<std::string> suites = check_suite_names();
    suites.push_back("all");
    check->add_option("--suite", check_suite, "suite name or all")
        ->check(CLI::IsMember(suites));
    check->add_option("--seed", check_seed, "root seed for generated cases");
    check->add_option("--tol", check_tol,
                      "override the finite-difference relative tolerance (advanced)");

    // bench
    auto* bench = app.add_subcommand("bench", "time one operator configuration");
    std::string bench_op_name = "conv_im2col", bench_shape = "1,64,64,64";
    int bench_out_c = 64, bench_k = 3, bench_repeat = 10;
    std::uint64_t bench_seed = 0;
    bench->add_option("--op", bench_op_name, "conv_naive|conv_im2col|gsconv|sc")
        ->check(CLI::IsMember({"conv_naive", "conv_im2col", "gsconv", "sc"}));
    bench->add_option("--shape", bench_shape, "input as n,c,h,w");
    bench->add_option("--out-c", bench_out_c, "output channels");
    bench->add_option("--k", bench_k, "kernel size");
    bench->add_option("--repeat", bench_repeat, "timed samples after 3 warm-ups");
    bench->add_option("--seed", bench_seed, "seed for tensors and weights");

    // dump-maps
    auto* dump = app.add_subcommand("dump-maps", "write per-channel PGM feature maps");
    std::string dm_spec, dm_weights, dm_input, dm_layer, dm_outdir;
    std::uint64_t dm_seed = 0;
    bool dm_random = false;
    dump->add_option("spec", dm_spec, "graph spec file")->required();
    dump->add_option("--weights", dm_weights, "weight file (.nwts)");
    dump->add_option("--seed", dm_seed, "seed for weights (and --random input)");
    dump->add_option("--input", dm_input, "input tensor (.ntsr)");
    dump->add_flag("--random", dm_random, "draw the input from the seed");
    dump->add_option("--layer", dm_layer, "layer to dump")->required();
    dump->add_option("--outdir", dm_outdir, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }

    try {
        if (app.got_subcommand(analyze))
            return cmd_analyze(an_spec, an_shape, an_format, an_compare, an_double);
        if (app.got_subcommand(run))
            return cmd_run(run_spec, run_weights, run_seed, run_input, run_random, run_output,
                           run_layer);
        if (app.got_subcommand(check)) return cmd_check(check_suite, check_seed, check_tol);
        if (app.got_subcommand(bench))
            return cmd_bench(bench_op_name, bench_shape, bench_out_c, bench_k, bench_repeat,
                             bench_seed);
        if (app.got_subcommand(dump))
            return cmd_dump_maps(dm_spec, dm_weights, dm_seed, dm_input, dm_random, dm_layer,
                                 dm_outdir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
