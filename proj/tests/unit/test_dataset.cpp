#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include "doctest.h"
#include "segmenter/dataset.hpp"
#include "segmenter/textio.hpp"
#include "../support/datasets.hpp"

using namespace segmenter;
namespace fs = std::filesystem;

namespace {

fs::path write_temp_csv(const std::string& name, const std::string& content) {
    fs::path p = fs::temp_directory_path() / name;
    std::ofstream(p, std::ios::trunc) << content;
    return p;
}

}  // namespace

TEST_CASE("standardize centers and scales with population variance") {
    Matrix m(3, 1);
    m(0, 0) = 1;
    m(1, 0) = 2;
    m(2, 0) = 3;
    Dataset d = testsupport::make_dataset(std::move(m));
    Dataset s = standardize(d);
    // std = sqrt(((1-2)^2 + 0 + (3-2)^2) / 3) = sqrt(2/3), so 1 -> -1.2247449
    CHECK(s.values(0, 0) == doctest::Approx(-1.2247449).epsilon(1e-6));
    CHECK(s.values(1, 0) == doctest::Approx(0.0));
    CHECK(s.values(2, 0) == doctest::Approx(1.2247449).epsilon(1e-6));
}

TEST_CASE("standardize is idempotent and zeroes constant columns") {
    Matrix m(4, 2);
    for (int r = 0; r < 4; ++r) {
        m(r, 0) = 3.0 * r - 5.0;
        m(r, 1) = 42.0;  // constant
    }
    Dataset d = testsupport::make_dataset(std::move(m));
    Dataset s1 = standardize(d);
    for (int r = 0; r < 4; ++r) CHECK(s1.values(r, 1) == 0.0);
    Dataset s2 = standardize(s1);
    for (size_t i = 0; i < s1.values.data.size(); ++i)
        CHECK(s2.values.data[i] == doctest::Approx(s1.values.data[i]).epsilon(1e-12));
}

TEST_CASE("scaler transforms held-out rows and inverts") {
    Matrix m(3, 2);
    double vals[3][2] = {{1, 10}, {2, 20}, {3, 30}};
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 2; ++c) m(r, c) = vals[r][c];
    Dataset d = testsupport::make_dataset(std::move(m));
    Scaler sc = Scaler::fit(d);

    Matrix one(1, 2);
    one(0, 0) = 4;
    one(0, 1) = 40;
    Dataset held = testsupport::make_dataset(std::move(one));
    Dataset t = sc.apply(held);
    CHECK(t.values(0, 0) == doctest::Approx((4.0 - 2.0) / sc.stds[0]));
    CHECK(sc.invert(0, t.values(0, 0)) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(sc.invert(1, t.values(0, 1)) == doctest::Approx(40.0).epsilon(1e-12));
}

TEST_CASE("load_csv reads values, names, and ids") {
    fs::path p = write_temp_csv("ds_ok.csv", "a,b\n1,2\n3.5,-4\n");
    Dataset d = load_csv(p, true);
    CHECK(d.n_points() == 2);
    CHECK(d.n_features() == 2);
    CHECK(d.feature_names == std::vector<std::string>{"a", "b"});
    CHECK(d.row_ids == std::vector<std::string>{"0", "1"});
    CHECK(d.values(1, 0) == 3.5);
    CHECK(d.values(1, 1) == -4.0);
    fs::remove(p);
}

TEST_CASE("load_csv generates names when told there is no header") {
    fs::path p = write_temp_csv("ds_nohdr.csv", "1,2\n3,4\n");
    Dataset d = load_csv(p, false);
    CHECK(d.feature_names == std::vector<std::string>{"f0", "f1"});
    CHECK(d.n_points() == 2);
    fs::remove(p);
}

TEST_CASE("load_csv names the offending row and column") {
    fs::path p = write_temp_csv("ds_bad.csv", "a,b\n1,2\n1,oops\n");
    CHECK_THROWS_WITH_AS(load_csv(p, true),
                         doctest::Contains("row 2, column 2"), std::runtime_error);
    fs::remove(p);

    p = write_temp_csv("ds_ragged.csv", "a,b\n1,2\n1,2,3\n");
    CHECK_THROWS_WITH_AS(load_csv(p, true), doctest::Contains("row 2"), std::runtime_error);
    fs::remove(p);
}

TEST_CASE("load_csv rejects empty and header-only files") {
    fs::path p = write_temp_csv("ds_empty.csv", "");
    CHECK_THROWS_WITH_AS(load_csv(p, true), doctest::Contains("no rows"), std::runtime_error);
    fs::remove(p);

    p = write_temp_csv("ds_hdr_only.csv", "a,b\n");
    CHECK_THROWS_WITH_AS(load_csv(p, true), doctest::Contains("no rows"), std::runtime_error);
    fs::remove(p);
}

TEST_CASE("load_csv rejects non-finite cells") {
    fs::path p = write_temp_csv("ds_inf.csv", "a\n1\ninf\n");
    CHECK_THROWS_AS(load_csv(p, true), std::runtime_error);
    fs::remove(p);
}

TEST_CASE("csv write then load round-trips bit for bit") {
    fs::path p1 = write_temp_csv("ds_rt1.csv", "a,b\n5.1,3.5\n0.001,-7.25\n123.456,9e-4\n");
    Dataset d = load_csv(p1, true);
    fs::path p2 = fs::temp_directory_path() / "ds_rt2.csv";
    write_csv(d, p2);
    Dataset d2 = load_csv(p2, true);
    REQUIRE(d2.values.data.size() == d.values.data.size());
    for (size_t i = 0; i < d.values.data.size(); ++i) CHECK(d2.values.data[i] == d.values.data[i]);
    // and the serialized text itself is stable
    std::string text = read_file(p2);
    write_csv(d2, p2);
    CHECK(read_file(p2) == text);
    fs::remove(p1);
    fs::remove(p2);
}

TEST_CASE("split_folds partitions evenly and reproducibly") {
    Dataset d = testsupport::make_blobs(1, 23, 3, 0.0, 9);
    FoldPlan plan = split_folds(d, 5, 77);
    REQUIRE(plan.assignments.size() == 23);

    std::vector<int> sizes(5, 0);
    for (int a : plan.assignments) {
        REQUIRE(a >= 0);
        REQUIRE(a < 5);
        ++sizes[a];
    }
    int lo = *std::min_element(sizes.begin(), sizes.end());
    int hi = *std::max_element(sizes.begin(), sizes.end());
    CHECK(hi - lo <= 1);

    // every point appears in exactly one fold and folds cover everything
    std::set<int> seen;
    for (int f = 0; f < 5; ++f)
        for (int r : plan.fold_rows(f)) seen.insert(r);
    CHECK(seen.size() == 23);

    // complement really is the complement
    for (int f = 0; f < 5; ++f) {
        std::vector<int> in = plan.fold_rows(f), out = plan.complement_rows(f);
        CHECK(in.size() + out.size() == 23);
    }

    FoldPlan again = split_folds(d, 5, 77);
    CHECK(again.assignments == plan.assignments);
    FoldPlan other = split_folds(d, 5, 78);
    CHECK(other.assignments != plan.assignments);
}

TEST_CASE("split_folds rejects out-of-range k") {
    Dataset d = testsupport::make_blobs(1, 6, 2, 0.0, 1);
    CHECK_THROWS_AS(split_folds(d, 1, 0), std::invalid_argument);
    CHECK_THROWS_AS(split_folds(d, 7, 0), std::invalid_argument);
    CHECK_NOTHROW(split_folds(d, 6, 0));
}

TEST_CASE("subset keeps names and original row ids") {
    Dataset d = testsupport::make_blobs(1, 5, 2, 0.0, 3);
    Dataset s = d.subset({4, 1});
    CHECK(s.n_points() == 2);
    CHECK(s.row_ids == std::vector<std::string>{"4", "1"});
    CHECK(s.values(0, 0) == d.values(4, 0));
    CHECK(s.values(1, 1) == d.values(1, 1));
    CHECK_THROWS_AS(d.subset({5}), std::out_of_range);
}

TEST_CASE("validate rejects non-finite values") {
    Dataset d = testsupport::make_blobs(1, 4, 2, 0.0, 3);
    d.values(2, 1) = std::nan("");
    CHECK_THROWS_AS(d.validate(), std::invalid_argument);
}
