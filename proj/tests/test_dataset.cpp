#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "clrbm/dataset.hpp"
#include "support.hpp"

using namespace clrbm;
using Catch::Approx;

TEST_CASE("dataset csv round trip") {
    SplitMix64 rng(5);
    const Dataset d = testsupport::random_dataset(rng, 5, 70);
    std::stringstream ss;
    save_dataset_csv(d, ss);
    const Dataset e = load_dataset_csv(ss);
    REQUIRE(e.n == d.n);
    REQUIRE(e.num_rows == d.num_rows);
    REQUIRE(e.values == d.values);
}

TEST_CASE("dataset csv rejects bad input") {
    {
        std::stringstream ss("1,-1\n0,1\n");
        REQUIRE_THROWS_WITH(load_dataset_csv(ss), Catch::Matchers::ContainsSubstring("not -1 or 1"));
    }
    {
        std::stringstream ss("1,-1\n1\n");
        REQUIRE_THROWS_WITH(load_dataset_csv(ss), Catch::Matchers::ContainsSubstring("ragged"));
    }
    {
        std::stringstream ss("");
        REQUIRE_THROWS_AS(load_dataset_csv(ss), std::runtime_error);
    }
    {
        std::stringstream ss("1,2\n");
        REQUIRE_THROWS_AS(load_dataset_csv(ss), std::runtime_error);
    }
}

TEST_CASE("data moments") {
    SECTION("all ones") {
        Dataset d = make_dataset(3);
        const std::vector<Spin> row = {1, 1, 1};
        d.append_row(row);
        d.append_row(row);
        const auto m = data_moments(d);
        REQUIRE(m == std::vector<double>{1.0, 1.0, 1.0});
    }
    SECTION("balanced rows cancel") {
        Dataset d = make_dataset(2);
        d.append_row(std::vector<Spin>{1, -1});
        d.append_row(std::vector<Spin>{-1, 1});
        const auto m = data_moments(d);
        REQUIRE(m[0] == 0.0);
        REQUIRE(m[1] == 0.0);
    }
    SECTION("duplicates weight by multiplicity") {
        Dataset d = make_dataset(1);
        d.append_row(std::vector<Spin>{1});
        d.append_row(std::vector<Spin>{1});
        d.append_row(std::vector<Spin>{-1});
        REQUIRE(data_moments(d)[0] == Approx(1.0 / 3.0).margin(1e-15));
    }
    SECTION("agrees with an independent accumulation order at experiment size") {
        SplitMix64 rng(17);
        const Dataset d = testsupport::random_dataset(rng, 5, 70);
        const auto m = data_moments(d);
        for (int i = 0; i < d.n; ++i) {
            REQUIRE(m[i] > -1.0);
            REQUIRE(m[i] < 1.0);
            double acc = 0.0;
            for (int mu = d.num_rows - 1; mu >= 0; --mu) acc += d.row(mu)[i]; // reverse order
            REQUIRE(m[i] == Approx(acc / d.num_rows).margin(1e-13));
        }
    }
}
