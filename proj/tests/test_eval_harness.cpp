#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "support/worst_case_oracle.hpp"
#include "tailscope/errors.hpp"
#include "tailscope/eval_harness.hpp"

using namespace tailscope;

namespace {

std::vector<Vec2> line(std::size_t n, Vec2 offset = {}) {
    std::vector<Vec2> out;
    for (std::size_t t = 0; t < n; ++t) out.push_back(Vec2{static_cast<double>(t), 0.5 * t} + offset);
    return out;
}

ForecastSample sample(std::string id, std::vector<std::vector<Vec2>> modes, std::vector<double> probs,
                      std::vector<Vec2> gt) {
    return {std::move(id), std::move(modes), std::move(probs), std::move(gt)};
}

}  // namespace

TEST_CASE("minADE") {
    const auto gt = line(6);
    CHECK(min_ade(sample("a", {line(6, {1, 1}), gt}, {0.5, 0.5}, gt), 2) == 0.0);
    CHECK(min_ade(sample("a", {line(6, {3, 4})}, {1.0}, gt), 1) == doctest::Approx(5.0).epsilon(1e-15));
    const auto s = sample("a", {line(6, {2, 0}), line(6, {0, 1.5})}, {0.6, 0.4}, gt);
    CHECK(min_ade(s, 2) == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(min_ade(s, 1) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK_THROWS_AS((void)min_ade(s, 3), UsageError);
}

TEST_CASE("minFDE") {
    const auto gt = line(4);
    auto a = line(4);
    auto b = line(4);
    a.back() = a.back() + Vec2{5, 0};
    b.back() = b.back() + Vec2{0, 2};
    b[0] = b[0] + Vec2{100, 100};
    CHECK(min_fde(sample("a", {a, b}, {0.5, 0.5}, gt), 2) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(min_fde(sample("a", {b}, {1.0}, gt), 1) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(min_fde(sample("a", {gt}, {1.0}, gt), 1) == 0.0);
}

TEST_CASE("miss rate boundary is strict") {
    const auto gt = line(3);
    const std::vector<ForecastSample> exact{sample("a", {gt}, {1.0}, gt)};
    CHECK(miss_rate(exact, 1) == 0.0);
    const std::vector<ForecastSample> miss{sample("a", {line(3, {2.5, 0})}, {1.0}, gt)};
    CHECK(miss_rate(miss, 1, 2.0) == 1.0);
    const std::vector<ForecastSample> edge{sample("a", {line(3, {2.0, 0})}, {1.0}, gt)};
    CHECK(miss_rate(edge, 1, 2.0) == 0.0);
}

TEST_CASE("RMSE") {
    const auto gt = line(5);
    const std::vector<ForecastSample> exact{sample("a", {gt}, {1.0}, gt)};
    for (double v : rmse(exact).per_horizon) CHECK(v == 0.0);
    const std::vector<ForecastSample> shifted{sample("a", {line(5, {1, 0})}, {1.0}, gt),
                                              sample("b", {line(5, {0, -1})}, {1.0}, gt)};
    for (double v : rmse(shifted).per_horizon) CHECK(v == doctest::Approx(1.0).epsilon(1e-15));
    const std::vector<ForecastSample> mixed{sample("a", {line(5, {1, 0})}, {1.0}, gt),
                                            sample("b", {line(5, {3, 0})}, {1.0}, gt)};
    CHECK(rmse(mixed).per_horizon[2] == doctest::Approx(std::sqrt(5.0)).epsilon(1e-15));
    CHECK(rmse(mixed).overall == doctest::Approx(std::sqrt(5.0)).epsilon(1e-15));
    // RMSE scores the most probable mode, not the best one
    const std::vector<ForecastSample> argmax{sample("a", {gt, line(5, {0, 2})}, {0.4, 0.6}, gt)};
    CHECK(rmse(argmax).overall == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("worst-case strata") {
    std::vector<SampleErrors> errors;
    for (int i = 1; i <= 100; ++i) {
        errors.push_back({"s" + std::to_string(1000 + i), static_cast<double>(i), 2.0 * i});
    }
    const std::vector<double> five{5.0};
    const auto top5 = worst_case_subsets(errors, five, RankMetric::min_ade).front();
    CHECK(top5.count == 5);
    CHECK(top5.min_ade == 98.0);
    CHECK(top5.members.front() == "s1100");
    const std::vector<double> all{100.0};
    CHECK(worst_case_subsets(errors, all, RankMetric::min_fde).front().min_ade == 50.5);

    SUBCASE("ties fall back to the largest ids") {
        std::vector<SampleErrors> flat;
        for (int i = 0; i < 10; ++i) flat.push_back({"id" + std::to_string(i), 1.0, 1.0});
        const std::vector<double> p{20.0};
        const auto s = worst_case_subsets(flat, p, RankMetric::min_fde).front();
        CHECK(s.members == std::vector<std::string>{"id9", "id8"});
        CHECK(s.min_ade == 1.0);
    }
    SUBCASE("sizes round up") {
        CHECK(stratum_size(1.0, 1000) == 10);
        CHECK(stratum_size(1.0, 150) == 2);
        CHECK(stratum_size(3.0, 100) == 3);
        CHECK(stratum_size(0.1, 5) == 1);
        CHECK_THROWS_AS((void)stratum_size(0.0, 10), UsageError);
        CHECK_THROWS_AS((void)stratum_size(100.5, 10), UsageError);
    }
    SUBCASE("means shrink as the stratum grows") {
        std::mt19937_64 rng(8);
        std::exponential_distribution<double> e(1.0);
        std::vector<SampleErrors> xs;
        for (int i = 0; i < 300; ++i) xs.push_back({std::to_string(i), e(rng), e(rng)});
        std::vector<double> ps;
        for (int p = 1; p <= 100; ++p) ps.push_back(p);
        const auto strata = worst_case_subsets(xs, ps, RankMetric::min_ade);
        for (std::size_t i = 1; i < strata.size(); ++i) CHECK(strata[i].min_ade <= strata[i - 1].min_ade);
    }
    SUBCASE("agrees with the sort oracle") {
        std::mt19937_64 rng(21);
        std::uniform_int_distribution<int> coarse(0, 40);
        std::vector<SampleErrors> xs;
        for (int i = 0; i < 257; ++i) xs.push_back({"x" + std::to_string(i), 0.25 * coarse(rng), 0.5 * coarse(rng)});
        const std::vector<double> ps{1, 2.5, 3, 4, 5, 50};
        for (auto metric : {RankMetric::min_ade, RankMetric::min_fde}) {
            const auto strata = worst_case_subsets(xs, ps, metric);
            for (std::size_t i = 0; i < ps.size(); ++i) {
                const auto want = testkit::worst_case_by_sort(xs, ps[i], metric == RankMetric::min_fde);
                CHECK(strata[i].count == want.count);
                CHECK(strata[i].members == want.members);
                CHECK(strata[i].min_ade == want.min_ade);
                CHECK(strata[i].min_fde == want.min_fde);
            }
        }
    }
}

TEST_CASE("task and total loss") {
    const auto gt = line(4);
    CHECK(task_loss(sample("a", {gt, line(4, {1, 0})}, {1.0, 0.0}, gt), {}).loss == 0.0);
    const auto half = task_loss(sample("a", {gt, line(4, {1, 0})}, {0.5, 0.5}, gt), {});
    CHECK(half.loss == doctest::Approx(std::numbers::ln2).epsilon(1e-15));
    CHECK(half.k_star == 0);
    LossWeights no_cls;
    no_cls.lambda_cls = 0.0;
    CHECK(task_loss(sample("a", {line(4, {0, 3})}, {1.0}, gt), no_cls).loss == doctest::Approx(9.0));
    CHECK(task_loss(sample("a", {gt, line(4, {1, 0})}, {0.0, 1.0}, gt), {}).loss ==
          doctest::Approx(-std::log(kProbFloor)));

    CHECK(total_loss(0, 0, 0, {}) == 0.0);
    CHECK(total_loss(1, 2, 3, {}) == 6.0);
    CHECK(total_loss(1, 2, 3, {1.0, 0.5, 2.0}) == 8.0);
}

TEST_CASE("evaluate report") {
    std::mt19937_64 rng(12);
    std::normal_distribution<double> noise(0.0, 1.5);
    std::vector<ForecastSample> samples;
    for (int i = 0; i < 40; ++i) {
        const auto gt = line(8, {noise(rng), noise(rng)});
        std::vector<std::vector<Vec2>> modes;
        std::vector<double> probs;
        for (int m = 0; m < 6; ++m) {
            auto mode = gt;
            for (auto& p : mode) p = p + Vec2{noise(rng), noise(rng)};
            modes.push_back(mode);
            probs.push_back(1.0 / 6.0 + (m == 2 ? 0.01 : 0.0) - (m == 5 ? 0.01 : 0.0));
        }
        samples.push_back(sample("q" + std::to_string(i), modes, probs, gt));
    }
    EvalOptions opts;
    opts.ks = {1, 3, 6};
    opts.rank_metric = RankMetric::min_fde;
    const auto r = evaluate(samples, opts);
    CHECK(r.options.rank_k == 6);
    CHECK(r.mean_min_ade.at(1) >= r.mean_min_ade.at(3));
    CHECK(r.mean_min_ade.at(3) >= r.mean_min_ade.at(6));
    CHECK(r.miss_rate.at(1) >= r.miss_rate.at(6));
    double total = 0.0;
    for (const auto& row : r.per_sample) total += row.min_ade.at(3);
    CHECK(r.mean_min_ade.at(3) == doctest::Approx(total / 40.0).epsilon(1e-15));
    REQUIRE(r.worst_case.size() == 5);
    CHECK(r.worst_case[0].count == 1);
    CHECK(r.worst_case[4].count == 2);
    for (const auto& s : samples) {
        for (std::size_t k = 1; k < 6; ++k) CHECK(min_ade(s, k + 1) <= min_ade(s, k));
    }
}

TEST_CASE("forecast JSONL") {
    const std::string good =
        R"({"sample_id":"a","modes":[[[0,0],[1,1]]],"probs":[1.0],"gt":[[0,0],[1,1]]})"
        "\n\n"
        R"({"sample_id":"b","modes":[[[0,0],[1,1]],[[0,1],[1,2]]],"probs":[0.25,0.75],"gt":[[0,0],[1,1]]})"
        "\n";
    const auto xs = read_forecast_jsonl(good);
    REQUIRE(xs.size() == 2);
    CHECK(xs[1].probs[1] == 0.75);

    auto line_of = [](const std::string& text) -> std::size_t {
        try {
            (void)read_forecast_jsonl(text);
        } catch (const ParseError& e) {
            return e.line();
        }
        return 0;
    };
    CHECK(line_of(good + "{not json}\n") == 4);
    CHECK(line_of(good + R"({"sample_id":"c","modes":[],"probs":[],"gt":[[0,0]]})" "\n") == 4);
    CHECK(line_of(R"({"sample_id":"c","modes":[[[0,0]]],"probs":[0.5],"gt":[[0,0]]})") == 1);
    CHECK(line_of(R"({"sample_id":"c","modes":[[[0,0]]],"probs":[1],"gt":[[0,0],[1,1]]})") == 1);
    CHECK(line_of(R"({"modes":[[[0,0]]],"probs":[1],"gt":[[0,0]]})") == 1);
}
