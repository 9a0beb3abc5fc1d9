#include "salm/cli.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <filesystem>
#include <future>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "salm/errors.hpp"
#include "salm/io.hpp"
#include "salm/problems.hpp"
#include "salm/solver.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace salm::cli {

namespace {

// Thrown for malformed flag values so every entry point maps them to kUsage.
struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

std::size_t parse_positive(std::string_view token, std::string_view what) {
    std::size_t v = 0;
    const auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc{} || end != token.data() + token.size() || v == 0) {
        throw UsageError(fmt::format("invalid {} '{}'", what, token));
    }
    return v;
}

std::vector<std::size_t> split_positive(std::string_view text, char sep, std::string_view what) {
    std::vector<std::size_t> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t end = text.find(sep, start);
        out.push_back(parse_positive(text.substr(start, end == std::string_view::npos ? end : end - start), what));
        if (end == std::string_view::npos) break;
        start = end + 1;
    }
    return out;
}

std::array<std::size_t, 3> parse_color(std::string_view text) {
    std::array<std::size_t, 3> rgb{};
    std::size_t start = 0;
    for (std::size_t c = 0; c < 3; ++c) {
        const std::size_t end = c < 2 ? text.find(',', start) : text.size();
        if (end == std::string_view::npos) throw UsageError(fmt::format("invalid color '{}'", text));
        const auto token = text.substr(start, end - start);
        const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), rgb[c]);
        if (ec != std::errc{} || ptr != token.data() + token.size()) {
            throw UsageError(fmt::format("invalid color '{}'", text));
        }
        start = end + 1;
    }
    return rgb;
}

double elapsed_ms_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

// Solver flags shared by solve, inpaint and bench overrides.
struct ConfigFlags {
    double beta0 = 0.1;
    double rho = 5.0;
    double tol = 1e-8;
    std::optional<double> eps;
    std::size_t max_iter = 1000;
    double beta_max = 1e12;
    bool parallel = false;

    void add_to(CLI::App& app) {
        app.add_option("--beta0", beta0, "initial penalty")->capture_default_str();
        app.add_option("--rho", rho, "penalty growth factor")->capture_default_str();
        app.add_option("--tol", tol, "stopping tolerance on the relative change of X")->capture_default_str();
        app.add_option("--eps", eps, "relative-change threshold for growing beta (default from sampling ratio)");
        app.add_option("--max-iter", max_iter, "iteration limit")->capture_default_str();
        app.add_option("--beta-max", beta_max, "penalty cap")->capture_default_str();
        app.add_flag("--parallel", parallel, "run the per-mode updates concurrently");
    }

    SolverConfig to_config() const {
        SolverConfig cfg;
        cfg.beta0 = beta0;
        cfg.rho = rho;
        cfg.tol = tol;
        cfg.eps = eps;
        cfg.max_iter = max_iter;
        cfg.beta_max = beta_max;
        cfg.parallel_modes = parallel;
        return cfg;
    }
};

int exit_code_for(SolveStatus status) {
    switch (status) {
        case SolveStatus::Converged: return kConverged;
        case SolveStatus::MaxIter: return kMaxIter;
        case SolveStatus::NumericalError: return kNumericalError;
    }
    return kFailure;
}

TraceSink verbose_sink(bool verbose, std::ostream& err) {
    if (!verbose) return {};
    return [&err](const IterTrace& t) {
        fmt::print(err, "iter {:4d}  obj {:.6e}  rel_change {:.3e}  beta {:.3e}  max_res {:.3e}\n", t.iter,
                   t.objective, t.rel_change, t.beta, *std::max_element(t.residuals.begin(), t.residuals.end()));
    };
}

void print_result_line(std::ostream& out, const io::RunSummary& s) {
    std::string line = fmt::format("status={} iterations={}", to_string(s.status), s.iterations);
    if (s.rel_err) line += fmt::format(" rel_err={:.3e}", *s.rel_err);
    if (s.nrmse) line += fmt::format(" nrmse={:.3e}", *s.nrmse);
    line += fmt::format(" time={:.3f}s", s.wall_ms / 1000.0);
    out << line << '\n';
}

std::optional<double> nrmse_if_defined(const DenseTensor& x, const DenseTensor& truth, const SamplingMask& mask) {
    try {
        return nrmse(x, truth, mask);
    } catch (const MetricError&) {
        return std::nullopt;
    }
}

// ---------------------------------------------------------------------------
// gen

struct GenOptions {
    std::string shape;
    std::string ranks;
    double sr = 0.3;
    double sigma = 0.0;
    std::uint64_t seed = 0;
    std::string out;
};

int cmd_gen(const GenOptions& o, std::ostream& out) {
    ProblemSpec spec;
    spec.shape = parse_shape(o.shape);
    spec.ranks = parse_ranks(o.ranks);
    spec.sampling_ratio = o.sr;
    spec.noise_sigma = o.sigma;
    spec.seed = o.seed;
    spec.validate();

    const GeneratedProblem p = gen_lowrank(spec);
    const fs::path dir(o.out);
    fs::create_directories(dir);
    io::write_tensor(dir / "truth.mrt", p.truth);
    io::write_tensor(dir / "observed.mrt", p.observed);
    io::write_mask(dir / "mask.mrm", p.mask);

    json j;
    j["shape"] = std::vector<std::size_t>(spec.shape.dims().begin(), spec.shape.dims().end());
    j["ranks"] = spec.ranks;
    j["sampling_ratio"] = spec.sampling_ratio;
    j["noise_sigma"] = spec.noise_sigma;
    j["seed"] = spec.seed;
    j["observed"] = p.mask.size();
    io::write_text(dir / "problem.json", j.dump(2) + "\n");

    fmt::print(out, "generated {} ranks {} observed {} of {} (sr={}) sigma={} seed={} -> {}\n",
               spec.shape.to_string(), o.ranks, p.mask.size(), spec.shape.numel(), spec.sampling_ratio,
               spec.noise_sigma, spec.seed, dir.string());
    return kConverged;
}

// ---------------------------------------------------------------------------
// solve

struct SolveOptions {
    std::string mask;
    std::string shape;
    std::string truth;
    std::string spec;
    std::string out;
    ConfigFlags config;
    bool verbose = false;
};

int cmd_solve(const SolveOptions& o, std::ostream& out, std::ostream& err) {
    std::optional<DenseTensor> truth;
    if (!o.truth.empty()) truth = io::read_tensor(o.truth);

    std::optional<Shape> shape;
    if (!o.shape.empty()) shape = parse_shape(o.shape);
    if (truth) {
        if (shape && *shape != truth->shape()) {
            throw UsageError("--shape " + shape->to_string() + " disagrees with truth " + truth->shape().to_string());
        }
        shape = truth->shape();
    }
    if (!shape) throw UsageError("solve needs --shape or --truth to interpret the mask");

    io::RunSummary summary;
    if (!o.spec.empty()) {
        const auto bytes = io::read_file(o.spec);
        const json j = json::parse(bytes.begin(), bytes.end());
        if (j.contains("ranks")) summary.ranks = j.at("ranks").get<std::vector<std::size_t>>();
        if (j.contains("noise_sigma")) summary.noise_sigma = j.at("noise_sigma").get<double>();
        if (j.contains("seed")) summary.seed = j.at("seed").get<std::uint64_t>();
    }

    const SamplingMask mask = io::read_mask(o.mask, *shape);
    const SolverConfig cfg = resolve_config(o.config.to_config(), mask.sampling_ratio());
    cfg.validate();

    const auto start = std::chrono::steady_clock::now();
    SolveResult result = solve(mask, cfg, verbose_sink(o.verbose, err));
    summary.wall_ms = elapsed_ms_since(start);

    summary.shape = *shape;
    summary.sampling_ratio = mask.sampling_ratio();
    summary.config = cfg;
    summary.iterations = result.trace.size();
    summary.status = result.status;
    if (truth) {
        summary.rel_err = rel_err(result.x, *truth);
        summary.nrmse = nrmse_if_defined(result.x, *truth, mask);
    }

    const fs::path dir(o.out);
    fs::create_directories(dir);
    io::write_tensor(dir / "solution.mrt", result.x);
    io::write_trace_csv(result.trace, shape->order(), dir / "trace.csv");
    io::write_summary_json(summary, dir / "summary.json");

    if (result.status == SolveStatus::NumericalError) fmt::print(err, "numerical error: {}\n", result.message);
    print_result_line(out, summary);
    return exit_code_for(result.status);
}

// ---------------------------------------------------------------------------
// bench

struct BenchCell {
    std::string name;
    std::string shape;
    std::string ranks;
    double sr = 0.3;
    double sigma = 0.0;
    std::size_t trials = 1;
    SolverConfig config;
};

struct CellReport {
    BenchCell cell;
    std::size_t completed = 0;
    std::size_t converged = 0;
    double mean_iter = 0.0;
    std::optional<double> mean_rel_err;
    std::optional<double> mean_nrmse;
    double mean_time_ms = 0.0;
    std::string error;
};

std::string text_field(const json& j, const char* key) {
    const json& v = j.at(key);
    if (v.is_string()) return v.get<std::string>();
    if (v.is_array()) {
        std::string s;
        const char sep = std::string_view(key) == "shape" ? 'x' : ',';
        for (std::size_t k = 0; k < v.size(); ++k) {
            if (k) s += sep;
            s += std::to_string(v[k].get<std::size_t>());
        }
        return s;
    }
    throw UsageError(fmt::format("grid field '{}' must be a string or an array", key));
}

void apply_config_overrides(const json& j, SolverConfig& cfg) {
    if (j.contains("beta0")) cfg.beta0 = j["beta0"].get<double>();
    if (j.contains("rho")) cfg.rho = j["rho"].get<double>();
    if (j.contains("tol")) cfg.tol = j["tol"].get<double>();
    if (j.contains("eps")) cfg.eps = j["eps"].get<double>();
    if (j.contains("max_iter")) cfg.max_iter = j["max_iter"].get<std::size_t>();
    if (j.contains("beta_max")) cfg.beta_max = j["beta_max"].get<double>();
}

struct BenchGrid {
    std::uint64_t base_seed = 0;
    std::vector<BenchCell> cells;
};

// {"base_seed": 1, "trials": 3, "config": {...},
//  "cells": [{"name": "...", "shape": "50x50x50", "ranks": "9,9,3", "sr": 0.3, "sigma": 0, "trials": 3,
//             "config": {...}}]}
BenchGrid parse_grid(const json& j) {
    BenchGrid grid;
    grid.base_seed = j.value("base_seed", std::uint64_t{0});
    const std::size_t default_trials = j.value("trials", std::size_t{1});
    SolverConfig base;
    if (j.contains("config")) apply_config_overrides(j["config"], base);
    if (!j.contains("cells") || !j["cells"].is_array() || j["cells"].empty()) {
        throw UsageError("grid file needs a non-empty 'cells' array");
    }
    for (const json& c : j["cells"]) {
        BenchCell cell;
        cell.shape = text_field(c, "shape");
        cell.ranks = text_field(c, "ranks");
        cell.sr = c.at("sr").get<double>();
        cell.sigma = c.value("sigma", 0.0);
        cell.trials = c.value("trials", default_trials);
        if (cell.trials < 1) throw UsageError("grid cell trials must be >= 1");
        cell.name = c.value("name", fmt::format("{} r=({}) sr={} sigma={}", cell.shape, cell.ranks, cell.sr, cell.sigma));
        cell.config = base;
        if (c.contains("config")) apply_config_overrides(c["config"], cell.config);
        grid.cells.push_back(std::move(cell));
    }
    return grid;
}

CellReport run_cell(const BenchCell& cell, std::uint64_t base_seed) {
    CellReport rep;
    rep.cell = cell;
    try {
        ProblemSpec spec;
        spec.shape = parse_shape(cell.shape);
        spec.ranks = parse_ranks(cell.ranks);
        spec.sampling_ratio = cell.sr;
        spec.noise_sigma = cell.sigma;
        spec.validate();
        cell.config.validate();

        double iters = 0.0, time_ms = 0.0, rel = 0.0, nr = 0.0;
        std::size_t nr_count = 0;
        for (std::size_t t = 0; t < cell.trials; ++t) {
            spec.seed = base_seed + t;
            const GeneratedProblem p = gen_lowrank(spec);
            const auto start = std::chrono::steady_clock::now();
            const SolveResult r = solve(p.mask, cell.config);
            time_ms += elapsed_ms_since(start);
            if (r.status == SolveStatus::NumericalError) throw NumericalError(r.message);
            if (r.status == SolveStatus::Converged) ++rep.converged;
            iters += static_cast<double>(r.trace.size());
            rel += rel_err(r.x, p.truth);
            if (auto v = nrmse_if_defined(r.x, p.truth, p.mask)) {
                nr += *v;
                ++nr_count;
            }
            ++rep.completed;
        }
        const double n = static_cast<double>(rep.completed);
        rep.mean_iter = iters / n;
        rep.mean_time_ms = time_ms / n;
        rep.mean_rel_err = rel / n;
        if (nr_count == rep.completed) rep.mean_nrmse = nr / n;
    } catch (const std::exception& e) {
        rep.error = e.what();
    }
    return rep;
}

std::string csv_optional(const std::optional<double>& v) { return v ? fmt::format("{:.17g}", *v) : std::string(); }

std::string csv_quote(const std::string& s) {
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + "\"";
}

std::string format_bench_csv(const std::vector<CellReport>& reports) {
    std::string out =
        "cell,name,shape,ranks,sr,sigma,trials,completed,converged,status,mean_iter,mean_rel_err,mean_nrmse,"
        "mean_time_ms,error\n";
    for (std::size_t k = 0; k < reports.size(); ++k) {
        const CellReport& r = reports[k];
        out += fmt::format("{},{},{},{},{:.17g},{:.17g},{},{},{},{},{:.17g},{},{},{:.17g},{}\n", k + 1,
                           csv_quote(r.cell.name), r.cell.shape, csv_quote(r.cell.ranks), r.cell.sr, r.cell.sigma,
                           r.cell.trials, r.completed, r.converged, r.error.empty() ? "ok" : "error", r.mean_iter,
                           csv_optional(r.mean_rel_err), csv_optional(r.mean_nrmse), r.mean_time_ms,
                           csv_quote(r.error));
    }
    return out;
}

std::string format_bench_table(const std::vector<CellReport>& reports) {
    std::string out = fmt::format("{:<40} {:>6} {:>9} {:>11} {:>11} {:>10}\n", "cell", "trials", "mean_iter",
                                  "rel_err", "nrmse", "time_s");
    for (const CellReport& r : reports) {
        if (!r.error.empty()) {
            out += fmt::format("{:<40} {:>6} ERROR: {}\n", r.cell.name, r.cell.trials, r.error);
            continue;
        }
        out += fmt::format("{:<40} {:>6} {:>9.1f} {:>11} {:>11} {:>10.3f}\n", r.cell.name, r.completed, r.mean_iter,
                           r.mean_rel_err ? fmt::format("{:.2e}", *r.mean_rel_err) : "-",
                           r.mean_nrmse ? fmt::format("{:.2e}", *r.mean_nrmse) : "-", r.mean_time_ms / 1000.0);
    }
    return out;
}

struct BenchOptions {
    std::string grid;
    std::string out;
    std::size_t jobs = 1;
};

int cmd_bench(const BenchOptions& o, std::ostream& out) {
    const auto bytes = io::read_file(o.grid);
    json j;
    try {
        j = json::parse(bytes.begin(), bytes.end());
    } catch (const json::exception& e) {
        throw UsageError(std::string("grid file: ") + e.what());
    }
    BenchGrid grid;
    try {
        grid = parse_grid(j);
    } catch (const json::exception& e) {
        throw UsageError(std::string("grid file: ") + e.what());
    }

    std::vector<CellReport> reports(grid.cells.size());
    const std::size_t jobs = std::max<std::size_t>(1, o.jobs);
    for (std::size_t first = 0; first < grid.cells.size(); first += jobs) {
        const std::size_t last = std::min(grid.cells.size(), first + jobs);
        if (jobs == 1) {
            reports[first] = run_cell(grid.cells[first], grid.base_seed);
            continue;
        }
        std::vector<std::future<CellReport>> batch;
        for (std::size_t k = first; k < last; ++k) {
            batch.push_back(std::async(std::launch::async, run_cell, std::cref(grid.cells[k]), grid.base_seed));
        }
        for (std::size_t k = first; k < last; ++k) reports[k] = batch[k - first].get();
    }

    const fs::path dir(o.out);
    fs::create_directories(dir);
    const std::string table = format_bench_table(reports);
    io::write_text(dir / "bench.csv", format_bench_csv(reports));
    io::write_text(dir / "bench.txt", table);
    out << table;

    const bool all_ok = std::all_of(reports.begin(), reports.end(), [](const CellReport& r) { return r.error.empty(); });
    return all_ok ? kConverged : kFailure;
}

// ---------------------------------------------------------------------------
// inpaint

struct InpaintOptions {
    std::string image;
    std::string rule = "random";
    double sr = 0.3;
    std::uint64_t seed = 0;
    std::string color = "255,0,255";
    std::string original;
    std::string out;
    ConfigFlags config;
    bool verbose = false;
};

int cmd_inpaint(const InpaintOptions& o, std::ostream& out, std::ostream& err) {
    const io::Image input = io::read_ppm(o.image);
    const io::ImageTensor image = io::image_to_tensor(input, o.image);

    io::MissingRule rule;
    if (o.rule == "random") {
        rule = io::RandomEntries{o.sr, o.seed};
    } else if (o.rule == "pixels") {
        rule = io::RandomPixels{o.sr, o.seed};
    } else if (o.rule == "sentinel") {
        const auto rgb = parse_color(o.color);
        io::SentinelColor s;
        for (std::size_t c = 0; c < 3; ++c) {
            if (rgb[c] > input.max_value()) throw UsageError("--color component exceeds the image maxval");
            s.rgb[c] = static_cast<std::uint16_t>(rgb[c]);
        }
        rule = s;
    } else {
        throw UsageError("--rule must be one of random, pixels, sentinel");
    }
    const SamplingMask mask = io::mask_from_image(image, rule);

    // Reference for metrics: an explicit original, else the input itself when the
    // missing entries were synthesized from a complete image.
    std::optional<DenseTensor> reference;
    if (!o.original.empty()) {
        reference = io::image_to_tensor(io::read_ppm(o.original)).tensor;
        if (reference->shape() != image.tensor.shape()) throw UsageError("--original has a different size");
    } else if (o.rule != "sentinel") {
        reference = image.tensor;
    }

    const SolverConfig cfg = resolve_config(o.config.to_config(), mask.sampling_ratio());
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();
    const SolveResult result = solve(mask, cfg, verbose_sink(o.verbose, err));

    io::RunSummary summary;
    summary.wall_ms = elapsed_ms_since(start);
    summary.shape = image.tensor.shape();
    summary.sampling_ratio = mask.sampling_ratio();
    if (o.rule != "sentinel") summary.seed = o.seed;
    summary.config = cfg;
    summary.iterations = result.trace.size();
    summary.status = result.status;

    const io::Image restored = io::tensor_to_image(result.x, input.depth);
    if (reference) {
        const DenseTensor quantized = io::image_to_tensor(restored).tensor;
        summary.rel_err = rel_err(quantized, *reference);
        summary.nrmse = nrmse_if_defined(quantized, *reference, mask);
    }

    DenseTensor masked_input(image.tensor.shape());
    const auto idx = mask.indices();
    const auto val = mask.values();
    for (std::size_t k = 0; k < idx.size(); ++k) masked_input[idx[k]] = val[k];

    const fs::path dir(o.out);
    fs::create_directories(dir);
    io::write_ppm(dir / "restored.ppm", restored);
    io::write_ppm(dir / "input.ppm", io::tensor_to_image(masked_input, input.depth));
    io::write_trace_csv(result.trace, 3, dir / "trace.csv");
    io::write_summary_json(summary, dir / "summary.json");

    if (result.status == SolveStatus::NumericalError) fmt::print(err, "numerical error: {}\n", result.message);
    print_result_line(out, summary);
    return exit_code_for(result.status);
}

}  // namespace

Shape parse_shape(std::string_view text) {
    if (text.empty()) throw UsageError("empty shape");
    return Shape(split_positive(text, 'x', "shape extent"));
}

std::vector<std::size_t> parse_ranks(std::string_view text) {
    if (text.empty()) throw UsageError("empty rank list");
    return split_positive(text, ',', "rank");
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Low multilinear-rank tensor completion by splitting augmented Lagrangian iterations", "salm"};
    app.require_subcommand(1);

    GenOptions gen;
    CLI::App* gen_cmd = app.add_subcommand("gen", "generate a random low multilinear-rank completion problem");
    gen_cmd->add_option("--shape", gen.shape, "extents, e.g. 50x50x50")->required();
    gen_cmd->add_option("--ranks", gen.ranks, "multilinear rank, e.g. 9,9,3")->required();
    gen_cmd->add_option("--sr", gen.sr, "sampling ratio in (0, 1]")->capture_default_str();
    gen_cmd->add_option("--sigma", gen.sigma, "noise standard deviation")->capture_default_str();
    gen_cmd->add_option("--seed", gen.seed, "random seed")->capture_default_str();
    gen_cmd->add_option("--out", gen.out, "output directory")->required();

    SolveOptions sol;
    CLI::App* solve_cmd = app.add_subcommand("solve", "complete a tensor from a mask file");
    solve_cmd->add_option("--mask", sol.mask, "mask file (MRM1)")->required();
    solve_cmd->add_option("--shape", sol.shape, "tensor extents; optional when --truth is given");
    solve_cmd->add_option("--truth", sol.truth, "ground truth tensor (MRT1) for rel_err / nrmse");
    solve_cmd->add_option("--spec", sol.spec, "problem.json written by gen, echoed into the summary");
    solve_cmd->add_option("--out", sol.out, "output directory")->required();
    solve_cmd->add_flag("-v,--verbose", sol.verbose, "print every iteration to stderr");
    sol.config.add_to(*solve_cmd);

    BenchOptions bench;
    CLI::App* bench_cmd = app.add_subcommand("bench", "run a grid of generated problems and aggregate results");
    bench_cmd->add_option("--grid", bench.grid, "grid file (JSON)")->required();
    bench_cmd->add_option("--out", bench.out, "output directory")->required();
    bench_cmd->add_option("--jobs", bench.jobs, "cells solved concurrently")->capture_default_str();

    InpaintOptions inp;
    CLI::App* inpaint_cmd = app.add_subcommand("inpaint", "restore missing pixels of a PPM image");
    inpaint_cmd->add_option("--image", inp.image, "input image (binary PPM, 8 or 16 bit)")->required();
    inpaint_cmd->add_option("--rule", inp.rule, "missing-entry rule: random, pixels or sentinel")
        ->capture_default_str();
    inpaint_cmd->add_option("--sr", inp.sr, "fraction of entries (random) or pixels (pixels) kept")
        ->capture_default_str();
    inpaint_cmd->add_option("--seed", inp.seed, "random seed")->capture_default_str();
    inpaint_cmd->add_option("--color", inp.color, "sentinel color r,g,b in image units")->capture_default_str();
    inpaint_cmd->add_option("--original", inp.original, "reference image for error metrics");
    inpaint_cmd->add_option("--out", inp.out, "output directory")->required();
    inpaint_cmd->add_flag("-v,--verbose", inp.verbose, "print every iteration to stderr");
    inp.config.add_to(*inpaint_cmd);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : kUsage;
    }

    try {
        if (gen_cmd->parsed()) return cmd_gen(gen, out);
        if (solve_cmd->parsed()) return cmd_solve(sol, out, err);
        if (bench_cmd->parsed()) return cmd_bench(bench, out);
        if (inpaint_cmd->parsed()) return cmd_inpaint(inp, out, err);
    } catch (const UsageError& e) {
        fmt::print(err, "usage error: {}\n", e.what());
        return kUsage;
    } catch (const SpecError& e) {
        fmt::print(err, "usage error: {}\n", e.what());
        return kUsage;
    } catch (const ParameterError& e) {
        fmt::print(err, "usage error: {}\n", e.what());
        return kUsage;
    } catch (const NumericalError& e) {
        fmt::print(err, "numerical error: {}\n", e.what());
        return kNumericalError;
    } catch (const std::exception& e) {
        fmt::print(err, "error: {}\n", e.what());
        return kFailure;
    }
    return kUsage;
}

}  // namespace salm::cli
