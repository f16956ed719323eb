#include "doctest.h"
#include "pmbm/metrics.hpp"
#include "test_util.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

using namespace pmbm;

namespace {

double brute_force_min_cost(const std::vector<std::vector<double>>& costs) {
    const int n = static_cast<int>(costs.size());
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        double total = 0.0;
        for (int i = 0; i < n; ++i) total += costs[i][perm[i]];
        best = std::min(best, total);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

Footprint random_footprint(std::mt19937_64& rng, double spread = 20.0) {
    std::uniform_real_distribution<double> u(-spread, spread);
    Footprint f;
    f.position = Vec2(u(rng), u(rng));
    f.extent = testutil::random_spd(rng, 2, 1.0);
    return f;
}

std::vector<Footprint> random_set(std::mt19937_64& rng, int max_card) {
    std::vector<Footprint> out;
    const int n = static_cast<int>(rng() % static_cast<uint64_t>(max_card + 1));
    for (int i = 0; i < n; ++i) out.push_back(random_footprint(rng));
    return out;
}

}  // namespace

TEST_CASE("GWD known values") {
    Footprint a, b;
    CHECK(gwd(a, a) == doctest::Approx(0.0).epsilon(1e-12));
    b.position = Vec2(3.0, 4.0);
    CHECK(gwd(a, b) == doctest::Approx(25.0).epsilon(1e-12));
    b.position = Vec2::Zero();
    b.extent = 4.0 * Mat2::Identity();
    // tr(4I + I - 2*2I) = 2
    CHECK(gwd(a, b) == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("hungarian solves small matrices") {
    SUBCASE("zero diagonal") {
        const auto res = hungarian({{0, 5}, {5, 0}});
        CHECK(res.total_cost == doctest::Approx(0.0));
        CHECK(res.assignment == std::vector<int>{0, 1});
    }
    SUBCASE("2x2 enumerable") {
        const auto res = hungarian({{1, 2}, {2, 1}});
        CHECK(res.total_cost == doctest::Approx(2.0));
        CHECK(res.assignment == std::vector<int>{0, 1});
    }
    SUBCASE("infeasible") {
        const double inf = std::numeric_limits<double>::infinity();
        CHECK_THROWS_AS(hungarian({{inf, inf}, {1, inf}}), Infeasible);
    }
}

TEST_CASE("hungarian matches brute force on random 4x4 matrices") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<std::vector<double>> costs(4, std::vector<double>(4));
        for (auto& row : costs)
            for (auto& c : row) c = u(rng);
        CHECK(hungarian(costs).total_cost ==
              doctest::Approx(brute_force_min_cost(costs)).epsilon(1e-10));
    }
}

TEST_CASE("GOSPA point values") {
    const double c = 10.0, p = 1.0;
    SUBCASE("both empty") {
        const auto g = gospa({}, {}, c, p);
        CHECK(g.total == 0.0);
        CHECK(g.localisation == 0.0);
        CHECK(g.missed == 0.0);
        CHECK(g.false_ == 0.0);
    }
    SUBCASE("single false target costs c/2") {
        const auto g = gospa({}, {Footprint{}}, c, p);
        CHECK(g.total == doctest::Approx(5.0));
        CHECK(g.false_ == doctest::Approx(5.0));
    }
    SUBCASE("single close match is pure localisation") {
        Footprint est;
        est.position = Vec2(std::sqrt(2.0), 0.0);  // GWD = 2 < c
        const auto g = gospa({Footprint{}}, {est}, c, p);
        CHECK(g.total == doctest::Approx(2.0).epsilon(1e-10));
        CHECK(g.localisation == doctest::Approx(2.0).epsilon(1e-10));
        CHECK(g.missed == 0.0);
        CHECK(g.false_ == 0.0);
    }
}

TEST_CASE("GOSPA metric properties on random sets") {
    std::mt19937_64 rng(32);
    const double c = 10.0, p = 1.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const auto x = random_set(rng, 4);
        const auto y = random_set(rng, 4);
        const auto z = random_set(rng, 4);

        // identity
        const auto self = gospa(x, x, c, p);
        CHECK(self.total == doctest::Approx(0.0).epsilon(1e-10));

        // symmetry with missed/false swap
        const auto xy = gospa(x, y, c, p);
        const auto yx = gospa(y, x, c, p);
        CHECK(xy.total == doctest::Approx(yx.total).epsilon(1e-10));
        CHECK(xy.missed == doctest::Approx(yx.false_).epsilon(1e-10));
        CHECK(xy.false_ == doctest::Approx(yx.missed).epsilon(1e-10));

        // decomposition
        CHECK(xy.total ==
              doctest::Approx(xy.localisation + xy.missed + xy.false_).epsilon(1e-10));

        // triangle inequality
        const auto xz = gospa(x, z, c, p);
        const auto zy = gospa(z, y, c, p);
        CHECK(xy.total <= xz.total + zy.total + 1e-9);
    }
}

TEST_CASE("GOSPA monotone under an ungated extra estimate") {
    std::mt19937_64 rng(33);
    const double c = 10.0, p = 1.0;
    const auto truth = random_set(rng, 3);
    auto est = random_set(rng, 3);
    const auto before = gospa(truth, est, c, p);
    Footprint far;
    far.position = Vec2(1e6, 1e6);
    est.push_back(far);
    const auto after = gospa(truth, est, c, p);
    CHECK(after.total == doctest::Approx(before.total + 5.0).epsilon(1e-10));
}
