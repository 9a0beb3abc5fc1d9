#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "helpers.hpp"
#include "salm/errors.hpp"
#include "salm/problems.hpp"

using namespace salm;

TEST_CASE("splitmix64 reference values") {
    // First outputs of the reference SplitMix64 generator seeded with 0.
    CHECK(splitmix64(0) == 0xE220A8397B1DCDAFull);
    CHECK(splitmix64(0x9E3779B97F4A7C15ull) == 0x6E789E6AA1B965F4ull);
}

TEST_CASE("random streams are reproducible and independent") {
    auto a = RandomStream::substream(42, Stream::Core);
    auto b = RandomStream::substream(42, Stream::Core);
    auto c = RandomStream::substream(42, Stream::Mask);
    bool all_equal = true, any_differ = false;
    for (int k = 0; k < 100; ++k) {
        const double x = a.normal();
        all_equal = all_equal && x == b.normal();
        any_differ = any_differ || x != c.normal();
    }
    CHECK(all_equal);
    CHECK(any_differ);

    auto u = RandomStream::substream(1, Stream::Noise);
    double lo = 1, hi = 0;
    for (int k = 0; k < 10000; ++k) {
        const double x = u.uniform();
        lo = std::min(lo, x);
        hi = std::max(hi, x);
        const auto i = u.uniform_index(7);
        REQUIRE(i < 7);
    }
    CHECK(lo >= 0.0);
    CHECK(hi < 1.0);
    CHECK_THROWS_AS(u.uniform_index(0), ParameterError);
}

TEST_CASE("normal draws have unit variance") {
    auto g = RandomStream::substream(3, Stream::Core);
    double sum = 0, sq = 0;
    const int n = 200000;
    for (int k = 0; k < n; ++k) {
        const double x = g.normal();
        sum += x;
        sq += x * x;
    }
    CHECK(std::abs(sum / n) < 0.01);
    CHECK(std::abs(sq / n - 1.0) < 0.01);
}

TEST_CASE("sampling without replacement") {
    auto rng = RandomStream::substream(8, Stream::Mask);
    const auto s = sample_without_replacement(100, 37, rng);
    CHECK(s.size() == 37);
    CHECK(std::is_sorted(s.begin(), s.end()));
    CHECK(std::adjacent_find(s.begin(), s.end()) == s.end());
    CHECK(s.back() < 100);
    CHECK(sample_without_replacement(5, 5, rng) == std::vector<std::size_t>{0, 1, 2, 3, 4});
    CHECK_THROWS_AS(sample_without_replacement(5, 6, rng), ParameterError);
}

TEST_CASE("observed count rounds to nearest and keeps at least one entry") {
    CHECK(observed_count(0.3, 125000) == 37500);
    CHECK(observed_count(0.25, 10) == 3);  // 2.5 rounds away from zero
    CHECK(observed_count(1e-9, 10) == 1);
    CHECK(observed_count(1.0, 10) == 10);
    CHECK_THROWS_AS(observed_count(0.0, 10), ParameterError);
    CHECK_THROWS_AS(observed_count(1.5, 10), ParameterError);
}

TEST_CASE("problem spec validation") {
    ProblemSpec ok{Shape{5, 5, 5}, {1, 1, 1}, 0.5, 0.0, 1};
    CHECK_NOTHROW(ok.validate());
    auto with = [&](auto mutate) {
        ProblemSpec s = ok;
        mutate(s);
        return s;
    };
    CHECK_THROWS_AS(with([](ProblemSpec& s) { s.ranks = {9, 9, 3}; }).validate(), SpecError);
    CHECK_THROWS_AS(with([](ProblemSpec& s) { s.ranks = {1, 1}; }).validate(), SpecError);
    CHECK_THROWS_AS(with([](ProblemSpec& s) { s.ranks = {0, 1, 1}; }).validate(), SpecError);
    CHECK_THROWS_AS(with([](ProblemSpec& s) { s.sampling_ratio = 0.0; }).validate(), ParameterError);
    CHECK_THROWS_AS(with([](ProblemSpec& s) { s.sampling_ratio = 1.1; }).validate(), ParameterError);
    CHECK_THROWS_AS(with([](ProblemSpec& s) { s.noise_sigma = -1.0; }).validate(), ParameterError);
    CHECK_THROWS_AS(gen_lowrank(with([](ProblemSpec& s) { s.ranks = {6, 1, 1}; })), SpecError);
}

TEST_CASE("generation is deterministic in the seed") {
    ProblemSpec spec{Shape{6, 7, 8}, {2, 3, 2}, 0.4, 0.1, 99};
    const auto a = gen_lowrank(spec);
    const auto b = gen_lowrank(spec);
    CHECK(a.truth == b.truth);
    CHECK(a.observed == b.observed);
    CHECK(a.mask == b.mask);
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        ProblemSpec x = spec, y = spec;
        x.seed = seed;
        y.seed = seed + 100;
        CHECK(gen_lowrank(x).mask != gen_lowrank(y).mask);
    }
}

TEST_CASE("generated mask has the requested size and copies the observations") {
    ProblemSpec spec{Shape{10, 11, 12}, {2, 2, 2}, 0.37, 0.05, 4};
    const auto p = gen_lowrank(spec);
    CHECK(p.mask.size() == observed_count(0.37, 1320));
    const auto idx = p.mask.indices();
    CHECK(std::is_sorted(idx.begin(), idx.end()));
    CHECK(std::adjacent_find(idx.begin(), idx.end()) == idx.end());
    for (std::size_t k = 0; k < p.mask.size(); ++k) CHECK(p.mask.values()[k] == p.observed[idx[k]]);
}

TEST_CASE("noiseless generation observes the truth") {
    const auto p = gen_lowrank(ProblemSpec{Shape{4, 5, 6}, {2, 2, 2}, 0.5, 0.0, 5});
    CHECK(p.observed == p.truth);
}

TEST_CASE("rank-one specs give rank-one unfoldings") {
    const auto p = gen_lowrank(ProblemSpec{Shape{7, 6, 5, 4}, {1, 1, 1, 1}, 1.0, 0.0, 12});
    CHECK(numerical_multilinear_rank(p.truth, 1e-10) == std::vector<std::size_t>{1, 1, 1, 1});
    CHECK(p.mask.size() == p.truth.size());
}

TEST_CASE("50x50x50 with ranks (9,9,3) has that multilinear rank") {
    const auto p = gen_lowrank(ProblemSpec{Shape{50, 50, 50}, {9, 9, 3}, 0.3, 0.0, 1});
    CHECK(numerical_multilinear_rank(p.truth) == std::vector<std::size_t>{9, 9, 3});
    CHECK(p.mask.size() == 37500);
}

TEST_CASE("multilinear rank matches the requested ranks on 100 random problems") {
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<std::size_t> order(2, 4);
    int checked = 0, mismatched = 0;
    while (checked < 100) {
        const std::size_t n = order(rng);
        std::vector<std::size_t> dims(n), ranks(n);
        for (std::size_t i = 0; i < n; ++i) {
            dims[i] = std::uniform_int_distribution<std::size_t>(2, n == 4 ? 8 : 20)(rng);
            ranks[i] = std::uniform_int_distribution<std::size_t>(1, std::min<std::size_t>(dims[i], 6))(rng);
        }
        // A mode rank above the product of the others is not attainable; skip those.
        bool attainable = true;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t others = 1;
            for (std::size_t j = 0; j < n; ++j)
                if (j != i) others *= ranks[j];
            attainable = attainable && ranks[i] <= others;
        }
        if (!attainable) continue;
        const auto p = gen_lowrank(ProblemSpec{Shape(dims), ranks, 0.5, 0.0, static_cast<std::uint64_t>(checked)});
        if (numerical_multilinear_rank(p.truth) != ranks) ++mismatched;
        ++checked;
    }
    CHECK(mismatched == 0);
}

TEST_CASE("noise magnitude scales with sigma") {
    for (double sigma : {0.02, 0.5, 3.0}) {
        const auto p = gen_lowrank(ProblemSpec{Shape{25, 20, 20}, {2, 2, 2}, 0.3, sigma, 6});
        const double ratio = frobenius_norm(p.observed - p.truth) / (sigma * std::sqrt(10000.0));
        CHECK(ratio >= 0.9);
        CHECK(ratio <= 1.1);
    }
}

TEST_CASE("relative error") {
    std::mt19937_64 rng(1);
    auto m = test::random_tensor(Shape{3, 4}, rng);
    CHECK(rel_err(m, m) == 0.0);
    CHECK(rel_err(2.0 * m, m) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(rel_err(DenseTensor(m.shape()), m) == 1.0);
    CHECK_THROWS_AS(rel_err(m, DenseTensor(m.shape())), MetricError);
    CHECK_THROWS_AS(rel_err(m, DenseTensor(Shape{12})), DimensionError);
}

TEST_CASE("normalized root mean square error over the unobserved entries") {
    Shape s{2, 2};
    DenseTensor truth(s, {0, 1, 3, 5});
    SamplingMask mask(s, {0}, {0.0});
    DenseTensor x = truth;
    x[0] = 100;  // observed entries do not count
    CHECK(nrmse(x, truth, mask) == 0.0);
    x[1] = 2;  // error 1 on a complement of 3 entries with range 4
    CHECK(nrmse(x, truth, mask) == doctest::Approx(1.0 / (4.0 * std::sqrt(3.0))).epsilon(1e-15));

    SamplingMask leave_one(s, {0, 1, 2}, {0, 1, 3});
    CHECK_THROWS_AS(nrmse(x, truth, leave_one), MetricError);
    SamplingMask all(s, {0, 1, 2, 3}, {0, 1, 3, 5});
    CHECK_THROWS_AS(nrmse(x, truth, all), MetricError);
}
