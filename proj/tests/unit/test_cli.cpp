#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "doctest.h"
#include "helpers.hpp"
#include "salm/cli.hpp"
#include "salm/io.hpp"
#include "salm/problems.hpp"

using namespace salm;
using salm::test::TempDir;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run salm_cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

// Trace CSV with the elapsed_ms column dropped.
std::string without_timing(const std::string& csv) {
    std::string out;
    for (const auto& line : lines(csv)) {
        std::vector<std::string> cells;
        std::stringstream row(line);
        for (std::string c; std::getline(row, c, ',');) cells.push_back(c);
        for (std::size_t k = 0; k < cells.size(); ++k)
            if (k != 4) out += cells[k] + ",";
        out += "\n";
    }
    return out;
}

nlohmann::json read_json(const std::filesystem::path& p) { return nlohmann::json::parse(slurp(p)); }

}  // namespace

TEST_CASE("shape and rank grammar") {
    CHECK(cli::parse_shape("50x50x50") == Shape{50, 50, 50});
    CHECK(cli::parse_shape("20x20x30x30") == Shape{20, 20, 30, 30});
    CHECK(cli::parse_ranks("9,9,3") == std::vector<std::size_t>{9, 9, 3});
    CHECK_THROWS(cli::parse_shape(""));
    CHECK_THROWS(cli::parse_shape("5x0x5"));
    CHECK_THROWS(cli::parse_shape("5xx5"));
    CHECK_THROWS(cli::parse_ranks("1,a"));
}

TEST_CASE("usage errors and help") {
    CHECK(salm_cli({}).code == cli::kUsage);
    CHECK(salm_cli({"frobnicate"}).code == cli::kUsage);
    CHECK(salm_cli({"--help"}).code == cli::kConverged);
    CHECK(salm_cli({"gen", "--shape", "5x5"}).code == cli::kUsage);
    TempDir dir("cli");
    CHECK(salm_cli({"gen", "--shape", "5x5x5", "--ranks", "1,1,1", "--sr", "0", "--out", dir.path()}).code ==
          cli::kUsage);
    CHECK(salm_cli({"solve", "--mask", (dir / "missing.mrm").string(), "--shape", "5x5x5", "--out", dir.path()})
              .code == cli::kFailure);
}

TEST_CASE("gen writes a problem") {
    TempDir dir("cli");
    const auto r = salm_cli({"gen", "--shape", "5x5x5", "--ranks", "1,1,1", "--sr", "1.0", "--out", dir.path()});
    REQUIRE(r.code == cli::kConverged);
    CHECK_FALSE(r.out.empty());
    CHECK(io::read_mask(dir / "mask.mrm", Shape{5, 5, 5}).size() == 125);
    CHECK(io::read_tensor(dir / "truth.mrt").shape() == Shape{5, 5, 5});
    CHECK(read_json(dir / "problem.json").contains("seed"));

    CHECK(salm_cli({"gen", "--shape", "5x5x5", "--ranks", "9,9,3", "--out", dir.path()}).code == cli::kUsage);
}

TEST_CASE("gen draws round(sr * numel) entries") {
    TempDir dir("cli");
    REQUIRE(salm_cli({"gen", "--shape", "50x50x50", "--ranks", "9,9,3", "--sr", "0.3", "--out", dir.path()}).code ==
            cli::kConverged);
    CHECK(io::read_mask(dir / "mask.mrm", Shape{50, 50, 50}).size() == 37500);
}

TEST_CASE("solve on a fully observed problem") {
    TempDir dir("cli");
    REQUIRE(salm_cli({"gen", "--shape", "6x5x4", "--ranks", "2,2,2", "--sr", "1", "--out", dir.path()}).code == 0);
    const auto r = salm_cli({"solve", "--mask", (dir / "mask.mrm").string(), "--truth", (dir / "truth.mrt").string(),
                             "--spec", (dir / "problem.json").string(), "--out", (dir / "s").string()});
    CHECK(r.code == cli::kConverged);
    const auto summary = read_json(dir / "s" / "summary.json");
    CHECK(summary["status"] == "converged");
    CHECK(summary["rel_err"] == 0.0);
    CHECK(summary["ranks"] == nlohmann::json::array({2, 2, 2}));
    CHECK_FALSE(summary.contains("nrmse"));  // complement is empty
    CHECK(io::read_tensor(dir / "s" / "solution.mrt") == io::read_tensor(dir / "truth.mrt"));
    CHECK(lines(slurp(dir / "s" / "trace.csv")).size() == summary["iterations"].get<std::size_t>() + 1);
}

TEST_CASE("solve stops at the iteration limit") {
    TempDir dir("cli");
    REQUIRE(salm_cli({"gen", "--shape", "10x10x10", "--ranks", "2,2,2", "--sr", "0.3", "--out", dir.path()}).code ==
            0);
    const auto r = salm_cli({"solve", "--mask", (dir / "mask.mrm").string(), "--shape", "10x10x10", "--max-iter", "1",
                             "--out", (dir / "s").string()});
    CHECK(r.code == cli::kMaxIter);
    CHECK(lines(slurp(dir / "s" / "trace.csv")).size() == 2);
    const auto summary = read_json(dir / "s" / "summary.json");
    CHECK(summary["status"] == "max_iter");
    CHECK_FALSE(summary.contains("rel_err"));

    CHECK(salm_cli({"solve", "--mask", (dir / "mask.mrm").string(), "--out", (dir / "t").string()}).code ==
          cli::kUsage);
    CHECK(salm_cli({"solve", "--mask", (dir / "mask.mrm").string(), "--shape", "10x10x10", "--rho", "0.5", "--out",
                    (dir / "t").string()})
              .code == cli::kUsage);
}

TEST_CASE("identical flags give identical artifacts") {
    TempDir a("cli"), b("cli");
    for (const TempDir* d : {&a, &b}) {
        REQUIRE(salm_cli({"gen", "--shape", "8x9x10", "--ranks", "2,3,2", "--sr", "0.5", "--sigma", "0.01", "--seed",
                          "17", "--out", d->path()})
                    .code == 0);
        salm_cli({"solve", "--mask", (*d / "mask.mrm").string(), "--truth", (*d / "truth.mrt").string(), "--beta0",
                  "0.05", "--max-iter", "30", "--out", (*d / "s").string()});
    }
    for (const char* f : {"truth.mrt", "observed.mrt", "mask.mrm", "s/solution.mrt"})
        CHECK(slurp(a / f) == slurp(b / f));
    CHECK(without_timing(slurp(a / "s/trace.csv")) == without_timing(slurp(b / "s/trace.csv")));
}

TEST_CASE("bench records a failing cell and completes the others") {
    TempDir dir("cli");
    std::ofstream(dir / "grid.json") << R"({"base_seed": 5, "trials": 2, "config": {"beta0": 0.05, "max_iter": 50},
        "cells": [{"name": "ok", "shape": "8x8x8", "ranks": "2,2,2", "sr": 0.6},
                  {"name": "bad", "shape": [5, 5, 5], "ranks": [9, 9, 3], "sr": 0.3},
                  {"name": "noisy", "shape": "8x8x8", "ranks": [2, 2, 2], "sr": 0.6, "sigma": 0.1, "trials": 1}]})";
    const auto r = salm_cli({"bench", "--grid", (dir / "grid.json").string(), "--out", (dir / "b").string()});
    CHECK(r.code == cli::kFailure);
    const auto csv = lines(slurp(dir / "b" / "bench.csv"));
    REQUIRE(csv.size() == 4);
    CHECK(csv[1].find(",ok,") != std::string::npos);
    CHECK(csv[1].find(",2,2,") != std::string::npos);  // trials, completed
    CHECK(csv[2].find("error") != std::string::npos);
    CHECK(csv[3].find(",1,1,") != std::string::npos);
    CHECK(slurp(dir / "b" / "bench.txt").find("ERROR") != std::string::npos);

    std::ofstream(dir / "broken.json") << "{not json";
    CHECK(salm_cli({"bench", "--grid", (dir / "broken.json").string(), "--out", (dir / "c").string()}).code ==
          cli::kUsage);
}

TEST_CASE("inpaint with nothing missing returns the input") {
    TempDir dir("cli");
    io::Image img{4, 3, 8, std::vector<std::uint16_t>(36)};
    for (std::size_t k = 0; k < img.samples.size(); ++k) img.samples[k] = static_cast<std::uint16_t>(7 * k % 256);
    io::write_ppm(dir / "in.ppm", img);
    const auto r = salm_cli({"inpaint", "--image", (dir / "in.ppm").string(), "--rule", "random", "--sr", "1", "--out",
                             (dir / "o").string()});
    CHECK(r.code == cli::kConverged);
    CHECK(io::read_ppm(dir / "o" / "restored.ppm") == img);
    CHECK(read_json(dir / "o" / "summary.json")["rel_err"] == 0.0);

    CHECK(salm_cli({"inpaint", "--image", (dir / "in.ppm").string(), "--rule", "blur", "--out", (dir / "p").string()})
              .code == cli::kUsage);
    CHECK(salm_cli({"inpaint", "--image", (dir / "in.ppm").string(), "--rule", "sentinel", "--color", "1,2",
                    "--out", (dir / "p").string()})
              .code == cli::kUsage);
}

TEST_CASE("inpaint restores a low-rank image from 30% of its pixels") {
    TempDir dir("cli");
    const auto p = gen_lowrank(ProblemSpec{Shape{64, 64, 3}, {3, 3, 3}, 1.0, 0.0, 7});
    DenseTensor t = p.truth;
    double lo = t[0], hi = t[0];
    for (double v : t.data()) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    for (double& v : t.data()) v = (v - lo) / (hi - lo);
    const auto img = io::tensor_to_image(t, 8);
    io::write_ppm(dir / "in.ppm", img);
    const auto r = salm_cli({"inpaint", "--image", (dir / "in.ppm").string(), "--rule", "pixels", "--sr", "0.3",
                             "--seed", "1", "--out", (dir / "o").string()});
    CHECK(r.code == cli::kConverged);
    CHECK(read_json(dir / "o" / "summary.json")["rel_err"].get<double>() <= 1e-2);
}
