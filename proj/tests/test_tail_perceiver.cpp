#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "tailscope/errors.hpp"
#include "tailscope/tail_perceiver.hpp"

using namespace tailscope;

namespace {

GaussianLayer layer(std::size_t out, std::size_t in, std::vector<double> mu_w, std::vector<double> mu_b,
                    double sigma = 1.0) {
    GaussianLayer l;
    l.mu_w = Matrix(out, in);
    l.mu_w.data = std::move(mu_w);
    l.sigma_w = Matrix(out, in, sigma);
    l.mu_b = std::move(mu_b);
    l.sigma_b.assign(out, sigma);
    return l;
}

MetricVector filled(double v) {
    MetricVector m;
    m.fill(v);
    return m;
}

}  // namespace

TEST_CASE("robust normalisation") {
    std::vector<MetricVector> samples{filled(0.0), filled(1.0), filled(2.0), filled(3.0), filled(4.0)};
    const auto stats = DatasetStats::from_samples(samples);
    CHECK(stats.location[0] == 2.0);
    CHECK(stats.scale[0] == 2.0);

    SUBCASE("value at the median") {
        const auto f = normalize_features(filled(2.0), stats);
        for (double z : f.intrinsic) CHECK(z == 0.0);
        for (double z : f.interactive) CHECK(z == 0.0);
    }
    SUBCASE("hand case") {
        DatasetStats s;
        s.location = filled(1.0);
        s.scale = filled(2.0);
        CHECK(normalize_features(filled(5.0), s).intrinsic[0] == 2.0);
        CHECK(normalize_features(filled(1e6), s).interactive[5] == kFeatureClip);
        CHECK(normalize_features(filled(-1e6), s).intrinsic[3] == -kFeatureClip);
    }
    SUBCASE("constant column") {
        const auto s = DatasetStats::from_samples(std::vector<MetricVector>{filled(3.0), filled(3.0)});
        CHECK(s.degenerate[0]);
        CHECK(s.scale[0] == 1.0);
    }
    CHECK_THROWS_AS((void)DatasetStats::from_samples(std::vector<MetricVector>{filled(1.0)}), UsageError);
}

TEST_CASE("Bayesian forward pass") {
    SUBCASE("zero means give zero output") {
        BayesianMlp mlp{layer(3, 2, std::vector<double>(6, 0.0), {0, 0, 0}, 0.3),
                        layer(2, 3, std::vector<double>(6, 0.0), {0, 0}, 0.3)};
        const std::vector<double> x{1.5, -2.0};
        for (double z : bayes_forward(mlp, x, ForwardMode::mean())) CHECK(z == 0.0);
    }
    SUBCASE("hand case") {
        BayesianMlp mlp{layer(1, 1, {2.0}, {-1.0}), layer(1, 1, {3.0}, {0.5})};
        const std::vector<double> x{2.0};
        CHECK(bayes_forward(mlp, x, ForwardMode::mean())[0] == 9.5);
        const std::vector<double> neg{-2.0};
        CHECK(bayes_forward(mlp, neg, ForwardMode::mean())[0] == 0.5);
    }
    SUBCASE("vanishing variance") {
        BayesianMlp mlp{layer(4, 2, {0.3, -0.2, 1.1, 0.7, -0.5, 0.9, 0.2, 0.4}, {0.1, 0.0, -0.2, 0.3}, 1e-15),
                        layer(1, 4, {0.5, -1.0, 0.25, 2.0}, {0.05}, 1e-15)};
        const std::vector<double> x{0.8, -0.6};
        const double mean = bayes_forward(mlp, x, ForwardMode::mean())[0];
        const double sampled = bayes_forward(mlp, x, ForwardMode::sample(42))[0];
        CHECK(std::fabs(mean - sampled) < 1e-12);
    }
    SUBCASE("sampling is seeded") {
        BayesianMlp mlp{layer(4, 2, {0.3, -0.2, 1.1, 0.7, -0.5, 0.9, 0.2, 0.4}, {0.1, 0.0, -0.2, 0.3}, 0.5),
                        layer(1, 4, {0.5, -1.0, 0.25, 2.0}, {0.05}, 0.5)};
        const std::vector<double> x{0.8, -0.6};
        const auto a = bayes_forward(mlp, x, ForwardMode::sample(7));
        const auto b = bayes_forward(mlp, x, ForwardMode::sample(7));
        const auto c = bayes_forward(mlp, x, ForwardMode::sample(8));
        CHECK(a == b);
        CHECK(a != c);
    }
    SUBCASE("input size mismatch") {
        BayesianMlp mlp{layer(1, 1, {2.0}, {-1.0}), layer(1, 1, {3.0}, {0.5})};
        const std::vector<double> x{1.0, 2.0};
        CHECK_THROWS_AS((void)bayes_forward(mlp, x, ForwardMode::mean()), ConfigError);
    }
}

TEST_CASE("KL to the standard normal") {
    CHECK(kl_diag_gaussian(layer(2, 2, {0, 0, 0, 0}, {0, 0}, 1.0)) == 0.0);
    CHECK(kl_diag_gaussian(layer(1, 1, {1.0}, {0.0}, 1.0)) == doctest::Approx(0.5).epsilon(1e-15));
    GaussianLayer wide = layer(1, 1, {0.0}, {0.0}, 1.0);
    wide.sigma_w.data[0] = std::numbers::e;
    const double e2 = std::numbers::e * std::numbers::e;
    CHECK(kl_diag_gaussian(wide) == doctest::Approx(0.5 * (e2 - 1.0 - 2.0)).epsilon(1e-14));
    CHECK(kl_diag_gaussian(wide) == doctest::Approx(2.1945).epsilon(1e-4));
}

TEST_CASE("fusion weights") {
    auto check_sum = [](FusionWeights w) { CHECK(std::fabs(w.alpha_i + w.alpha_r - 1.0) < 1e-12); };
    const auto eq = fusion_weights(3.0, 3.0, 1.0);
    CHECK(eq.alpha_i == 0.5);
    const auto flat = fusion_weights(10.0, -4.0, 0.0);
    CHECK(flat.alpha_i == 0.5);
    const auto w = fusion_weights(1.0, 0.0, 1.0);
    check_sum(w);
    CHECK(w.alpha_i == doctest::Approx(std::numbers::e / (std::numbers::e + 1)).epsilon(1e-15));
    CHECK(w.alpha_r == doctest::Approx(1.0 / (std::numbers::e + 1)).epsilon(1e-15));
    const auto flipped = fusion_weights(1.0, 0.0, 1.0, FusionSign::lower_kl);
    CHECK(flipped.alpha_i == doctest::Approx(w.alpha_r).epsilon(1e-15));
    const auto huge = fusion_weights(1e6, 0.0, 1.0);
    CHECK(std::isfinite(huge.alpha_i));
    check_sum(huge);
}

TEST_CASE("tail index softplus") {
    const std::vector<double> one{1.0};
    const std::vector<double> zero{0.0};
    auto ti = [&](double pre) {
        const std::vector<double> z{pre};
        return tail_index(z, zero, {1.0, 0.0}, one, 0.0);
    };
    CHECK(ti(0.0) == doctest::Approx(std::numbers::ln2).epsilon(1e-15));
    CHECK(ti(-50.0) > 0.0);
    CHECK(ti(-50.0) <= 1e-20);
    CHECK(std::fabs(ti(80.0) - 80.0) < 1e-12);
    CHECK(std::isfinite(ti(1000.0)));
    double prev = 0.0;
    for (double pre = -10; pre <= 10; pre += 0.5) {
        CHECK(ti(pre) > prev);
        prev = ti(pre);
    }
}

TEST_CASE("perceive") {
    const auto params = PerceiverParams::initialize(5, 16, 8);
    NormalizedFeatures f{std::vector<double>(8, 0.3), std::vector<double>(6, -0.2)};
    const auto a = perceive(params, f, ForwardMode::mean());
    const auto b = perceive(params, f, ForwardMode::mean());
    CHECK(a.ti == b.ti);
    CHECK(a.ti > 0.0);
    CHECK(a.z_i.size() == 8);
    const auto s1 = perceive(params, f, ForwardMode::sample(99));
    const auto s2 = perceive(params, f, ForwardMode::sample(99));
    CHECK(s1.ti == s2.ti);
    CHECK(s1.z_r == s2.z_r);
    CHECK(params.path_i.hidden.out() == 16);

    auto bad = params;
    bad.w_o.pop_back();
    CHECK_THROWS_AS((void)perceive(bad, f, ForwardMode::mean()), ConfigError);
    auto neg = params;
    neg.path_r.output.sigma_b[0] = -1.0;
    CHECK_THROWS_AS(neg.validate(), ConfigError);
}

TEST_CASE("initialisation is seeded") {
    CHECK(PerceiverParams::initialize(3, 8, 4).path_i.hidden.mu_w ==
          PerceiverParams::initialize(3, 8, 4).path_i.hidden.mu_w);
    CHECK_FALSE(PerceiverParams::initialize(3, 8, 4).path_i.hidden.mu_w ==
                PerceiverParams::initialize(4, 8, 4).path_i.hidden.mu_w);
}

TEST_CASE("rank supervision loss") {
    const std::vector<double> a{3.0, 1.0, 2.0};
    const std::vector<double> b{2.0, 3.0, 1.0};
    CHECK(rank_supervision_loss(a, b) == 0.0);
    const std::vector<double> ti{0.0, 1.0};
    const std::vector<double> ade{1.0, 3.0};
    CHECK(rank_supervision_loss(ti, ade) == 1.5);

    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 5.0);
    std::vector<double> x(20), y(20);
    for (auto& v : x) v = u(rng);
    for (auto& v : y) v = u(rng);
    const double base = rank_supervision_loss(x, y);
    for (int k = 0; k < 20; ++k) {
        std::shuffle(x.begin(), x.end(), rng);
        std::shuffle(y.begin(), y.end(), rng);
        CHECK(rank_supervision_loss(x, y) == base);
    }
    CHECK_THROWS_AS((void)rank_supervision_loss(ti, a), UsageError);
    CHECK_THROWS_AS((void)rank_supervision_loss({}, {}), UsageError);
}
