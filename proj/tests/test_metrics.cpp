#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "usv/metrics.hpp"
#include "usv/random.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("perfect prediction scores zero on every metric", "[metrics]") {
    const std::vector<double> y{0.3, -1.2, 5.0, 2.25};
    const auto r = usv::forecast::metrics(y, y);
    CHECK(r.mae == 0.0);
    CHECK(r.mape == 0.0);
    CHECK(r.mse == 0.0);
    CHECK(r.rmse == 0.0);
    CHECK(r.smape == 0.0);
    CHECK(r.mape_excluded == 0);
    CHECK(r.smape_excluded == 0);
}

TEST_CASE("hand-computed metric values", "[metrics]") {
    const std::vector<double> y{1.0, 2.0};
    const std::vector<double> yhat{2.0, 4.0};
    const auto r = usv::forecast::metrics(y, yhat);
    CHECK_THAT(r.mae, WithinRel(1.5, 1e-10));
    CHECK_THAT(r.mape, WithinRel(100.0, 1e-10));
    CHECK_THAT(r.mse, WithinRel(2.5, 1e-10));
    CHECK_THAT(r.rmse, WithinRel(1.5811388300841898, 1e-10));
    CHECK(r.rmse == std::sqrt(2.5));
    CHECK_THAT(r.smape, WithinRel(200.0 / 3.0, 1e-10));
    CHECK(r.mape_excluded == 0);
    CHECK(r.smape_excluded == 0);
}

TEST_CASE("near-zero actuals are excluded from percentage means", "[metrics]") {
    SECTION("one vanishing actual") {
        const std::vector<double> y{0.0, 1.0};
        const std::vector<double> yhat{1.0, 2.0};
        const auto r = usv::forecast::metrics(y, yhat);
        CHECK(r.mape_excluded == 1);
        CHECK_THAT(r.mape, WithinRel(100.0, 1e-12));  // only the second point counts
        CHECK(r.smape_excluded == 0);                 // |0| + |1| is nonzero
        CHECK_THAT(r.mae, WithinRel(1.0, 1e-12));
    }
    SECTION("point where both series vanish") {
        const std::vector<double> y{0.0, 1.0};
        const std::vector<double> yhat{0.0, 2.0};
        const auto r = usv::forecast::metrics(y, yhat);
        CHECK(r.mape_excluded == 1);
        CHECK(r.smape_excluded == 1);
        CHECK_THAT(r.smape, WithinRel(200.0 / 3.0, 1e-12));
    }
    SECTION("every point excluded") {
        const std::vector<double> zeros{0.0, 0.0};
        const auto r = usv::forecast::metrics(zeros, zeros);
        CHECK(r.mape_excluded == 2);
        CHECK(r.smape_excluded == 2);
        CHECK(std::isnan(r.mape));
        CHECK(std::isnan(r.smape));
        CHECK(r.mae == 0.0);
        CHECK(r.rmse == 0.0);
    }
}

TEST_CASE("root mean square identities hold on random series", "[metrics]") {
    usv::Rng rng(2024);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> y(50), yhat(50);
        for (int i = 0; i < 50; ++i) {
            y[i] = rng.uniform(-2.0, 2.0);
            yhat[i] = y[i] + rng.uniform(-0.5, 0.5);
        }
        const auto r = usv::forecast::metrics(y, yhat);
        CHECK_THAT(r.rmse * r.rmse, WithinRel(r.mse, 1e-12));
        CHECK(r.mae <= r.rmse + 1e-15);
        CHECK(r.mae >= 0.0);
        CHECK(r.smape >= 0.0);
    }
}

TEST_CASE("metric input validation", "[metrics]") {
    const std::vector<double> a{1.0, 2.0};
    const std::vector<double> b{1.0};
    CHECK_THROWS_AS(usv::forecast::metrics(a, b), std::invalid_argument);
    const std::vector<double> empty;
    CHECK_THROWS_AS(usv::forecast::metrics(empty, empty), std::invalid_argument);
    const std::vector<double> nan{1.0, std::nan("")};
    CHECK_THROWS_AS(usv::forecast::metrics(a, nan), std::invalid_argument);
}

TEST_CASE("series overload matches the raw-span metrics", "[metrics]") {
    usv::TimeSeries actual{{1.0, 2.0, 3.0}, 0.1, std::nullopt};
    usv::TimeSeries predicted{{1.5, 1.5, 3.5}, 0.1, std::nullopt};
    const auto a = usv::forecast::metrics(actual, predicted);
    const auto b = usv::forecast::metrics(actual.values, predicted.values);
    CHECK(a.mae == b.mae);
    CHECK(a.rmse == b.rmse);
}

TEST_CASE("relative improvement of mean absolute error", "[metrics]") {
    CHECK_THAT(usv::forecast::mae_improvement(0.0187, 0.0154), WithinRel(17.647059, 1e-6));
    CHECK(usv::forecast::mae_improvement(0.5, 0.5) == 0.0);
    CHECK(usv::forecast::mae_improvement(0.5, 0.75) < 0.0);
    CHECK_THROWS_AS(usv::forecast::mae_improvement(0.0, 0.1), std::invalid_argument);
}
