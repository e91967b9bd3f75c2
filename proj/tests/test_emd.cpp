#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "usv/emd.hpp"
#include "usv/random.hpp"

using namespace usv;
using namespace usv::decomp;

namespace {

TimeSeries sinusoid(double hz, double seconds, double dt, double amp = 1.0) {
    TimeSeries ts;
    ts.dt = dt;
    const auto n = static_cast<std::size_t>(seconds / dt);
    ts.values.resize(n);
    for (std::size_t j = 0; j < n; ++j)
        ts.values[j] = amp * std::sin(2.0 * std::numbers::pi * hz * (static_cast<double>(j) * dt));
    return ts;
}

TimeSeries two_tone() {
    TimeSeries low = sinusoid(0.5, 20.0, 0.01);
    TimeSeries high = sinusoid(5.0, 20.0, 0.01);
    for (std::size_t j = 0; j < low.size(); ++j) low.values[j] += high.values[j];
    return low;
}

TimeSeries ramp(std::size_t n) {
    TimeSeries ts;
    ts.dt = 0.1;
    ts.values.resize(n);
    for (std::size_t j = 0; j < n; ++j) ts.values[j] = 0.25 * static_cast<double>(j);
    return ts;
}

TimeSeries noise_series(std::size_t n, std::uint64_t seed) {
    TimeSeries ts;
    ts.dt = 0.1;
    ts.values.resize(n);
    Rng rng(seed);
    for (double& v : ts.values) v = rng.gaussian();
    return ts;
}

int zero_crossings(const std::vector<double>& v) {
    int count = 0;
    for (std::size_t j = 1; j < v.size(); ++j)
        if (v[j - 1] * v[j] < 0.0) ++count;
    return count;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a[j] - b[j]));
    return m;
}

}  // namespace

TEST_CASE("sifting a pure sinusoid returns the sinusoid", "[emd]") {
    TimeSeries tone = sinusoid(0.5, 10.0, 0.01);
    auto [imf, residue] = sift_one_imf(tone, {});
    CHECK(correlation(imf.values, tone.values) > 0.99);
    CHECK(max_abs(residue.values) < 0.05);  // < 5% of unit amplitude

    // residue is exactly the element-wise complement
    for (std::size_t j = 0; j < tone.size(); ++j)
        CHECK(std::abs(imf.values[j] + residue.values[j] - tone.values[j]) < 1e-12);
}

TEST_CASE("a monotonic ramp is not siftable", "[emd]") {
    CHECK_THROWS_AS(sift_one_imf(ramp(100), SiftConfig{}), not_siftable_error);
}

TEST_CASE("sift rejects degenerate input", "[emd]") {
    TimeSeries tiny;
    tiny.dt = 0.1;
    tiny.values = {0.0, 1.0, 0.0};
    CHECK_THROWS_AS(sift_one_imf(tiny, SiftConfig{}), std::invalid_argument);

    SiftConfig bad;
    bad.sd_threshold = 0.0;
    CHECK_THROWS_AS(sift_one_imf(ramp(100), bad), std::invalid_argument);
}

TEST_CASE("EMD of a monotonic signal yields no modes", "[emd]") {
    TimeSeries r = ramp(50);
    IMFDecomposition d = emd(r);
    CHECK(d.modes.empty());
    CHECK(d.residual.values == r.values);
    CHECK(d.method == DecompMethod::emd);
}

TEST_CASE("EMD separates a two-tone signal", "[emd]") {
    TimeSeries mix = two_tone();
    TimeSeries high = sinusoid(5.0, 20.0, 0.01);
    TimeSeries low = sinusoid(0.5, 20.0, 0.01);

    IMFDecomposition d = emd(mix);
    REQUIRE(d.modes.size() >= 2);
    CHECK(correlation(d.modes[0].values, high.values) > 0.95);

    SECTION("second mode tracks the low tone") {
        TimeSeries m2 = extract_kth_mode(mix, 2);
        CHECK(correlation(m2.values, low.values) > 0.9);
    }
}

TEST_CASE("EMD reconstruction identity on random signals", "[emd]") {
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        TimeSeries s = noise_series(100 + 40 * seed, seed);
        IMFDecomposition d = emd(s);
        TimeSeries back = reconstruct(d);
        CHECK(max_abs_diff(back.values, s.values) < 1e-9);

        // every component shares length and dt with the input
        for (const TimeSeries& m : d.modes) {
            CHECK(m.size() == s.size());
            CHECK(m.dt == s.dt);
        }
        CHECK(d.residual.size() == s.size());
    }
}

TEST_CASE("EMD modes are ordered from high to low frequency", "[emd]") {
    for (const TimeSeries& s : {two_tone(), noise_series(600, 3)}) {
        IMFDecomposition d = emd(s);
        for (std::size_t m = 1; m < d.modes.size(); ++m)
            CHECK(zero_crossings(d.modes[m - 1].values) >= zero_crossings(d.modes[m].values));
        CHECK(detail::find_extrema(d.residual.values).total() < 3);
    }
}

TEST_CASE("EMD modes are near-IMF (extrema vs zero crossings)", "[emd]") {
    IMFDecomposition d = emd(two_tone());
    for (const TimeSeries& m : d.modes) {
        const int extrema = static_cast<int>(detail::find_extrema(m.values).total());
        const int zc = zero_crossings(m.values);
        CHECK(std::abs(extrema - zc) <= 2);
    }
}

TEST_CASE("reconstruct validates component integrity", "[emd]") {
    TimeSeries s = noise_series(120, 9);
    IMFDecomposition d = emd(s);
    REQUIRE(!d.modes.empty());

    SECTION("modes all zero leave the residual") {
        IMFDecomposition trivial;
        trivial.residual = s;
        TimeSeries mode0;
        mode0.dt = s.dt;
        mode0.values.assign(s.size(), 0.0);
        trivial.modes.push_back(mode0);
        CHECK(reconstruct(trivial).values == s.values);
    }
    SECTION("length mismatch is an integrity error") {
        d.modes[0].values.pop_back();
        CHECK_THROWS_AS(reconstruct(d), std::invalid_argument);
    }
    SECTION("dt mismatch is an integrity error") {
        d.modes[0].dt *= 2.0;
        CHECK_THROWS_AS(reconstruct(d), std::invalid_argument);
    }
}

TEST_CASE("extract_kth_mode", "[emd]") {
    SECTION("k=1 on a pure sinusoid is the sinusoid") {
        TimeSeries tone = sinusoid(0.5, 10.0, 0.01);
        TimeSeries m1 = extract_kth_mode(tone, 1);
        CHECK(correlation(m1.values, tone.values) > 0.99);
    }
    SECTION("missing modes are zero series") {
        TimeSeries m5 = extract_kth_mode(ramp(80), 5);
        REQUIRE(m5.size() == 80);
        for (double v : m5.values) CHECK(v == 0.0);
        CHECK(m5.dt == 0.1);
    }
    SECTION("k must be positive") {
        CHECK_THROWS_AS(extract_kth_mode(ramp(80), 0), std::invalid_argument);
    }
}
