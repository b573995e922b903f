#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "mhkelm/data.hpp"
#include "mhkelm/registry.hpp"

using namespace mhkelm;

namespace {

Dataset parse(const std::string& text, const LabelColumn& label, const CsvOptions& opt = {}) {
    std::istringstream in(text);
    return parse_csv(in, label, opt, "toy.csv");
}

const Registry& registry() {
    static const Registry reg = load_registry(default_registry_path());
    return reg;
}

std::string parse_error(const std::string& text, const LabelColumn& label, const CsvOptions& opt = {}) {
    try {
        parse(text, label, opt);
    } catch (const ParseError& e) {
        return e.what();
    }
    return "";
}

} // namespace

TEST(Rng, Mt19937_64ReferenceOutput) {
    Rng rng(5489);
    std::uint64_t x = 0;
    for (int i = 0; i < 10000; ++i) x = rng.next();
    EXPECT_EQ(x, 9981545732273789042ULL);
}

TEST(Rng, UniformAndBoundedRanges) {
    Rng rng(1);
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        ASSERT_LT(rng.below(7), 7u);
    }
    auto p = random_permutation(50, 3);
    std::sort(p.begin(), p.end());
    for (std::size_t i = 0; i < 50; ++i) EXPECT_EQ(p[i], i);
}

TEST(LoadCsv, SmallFile) {
    const auto ds = parse("1.0,2.0,a\n3.0,4.0,b\n5.0,6.0,a\n", LabelColumn::at(2));
    EXPECT_EQ(ds.size(), 3);
    EXPECT_EQ(ds.attribute_count(), 2);
    EXPECT_EQ(ds.category_count(), 2);
    EXPECT_EQ(ds.labels, (std::vector<int>{0, 1, 0}));
    EXPECT_EQ(ds.features(2, 1), 6.0);
}

TEST(LoadCsv, HeaderDetectionAndNamedLabel) {
    const auto ds = parse("x,y,cls\n1,2,3\n4,5,1\n", LabelColumn::named("cls"));
    EXPECT_EQ(ds.size(), 2);
    EXPECT_EQ(ds.feature_names, (std::vector<std::string>{"x", "y"}));
    EXPECT_EQ(ds.label_map, (std::vector<std::string>{"1", "3"}));
    const auto auto_header = parse("x,y,cls\n1,2,3\n4,5,1\n", LabelColumn::at(2));
    EXPECT_EQ(auto_header.size(), 2);
    CsvOptions no_header;
    no_header.has_header = false;
    EXPECT_FALSE(parse_error("x,y,cls\n1,2,3\n4,5,1\n", LabelColumn::at(2), no_header).empty());
}

TEST(LoadCsv, NumericLabelsSortNumerically) {
    const auto ds = parse("0,10\n1,9\n2,2\n", LabelColumn::at(1));
    EXPECT_EQ(ds.label_map, (std::vector<std::string>{"2", "9", "10"}));
    EXPECT_EQ(ds.labels, (std::vector<int>{2, 1, 0}));
}

TEST(LoadCsv, ErrorsNameTheLocation) {
    const auto bad = parse_error("1,2,a\n3,oops,b\n", LabelColumn::at(2));
    EXPECT_NE(bad.find("row 2"), std::string::npos) << bad;
    EXPECT_NE(bad.find("column 1"), std::string::npos) << bad;
    EXPECT_NE(bad.find("oops"), std::string::npos) << bad;

    const auto ragged = parse_error("1,2,a\n3,b\n", LabelColumn::at(2));
    EXPECT_NE(ragged.find("row 2"), std::string::npos) << ragged;

    EXPECT_FALSE(parse_error("h1,h2\n1,a\n2,b\n", LabelColumn::named("missing")).empty());
    EXPECT_FALSE(parse_error("1,a\n2,b\n", LabelColumn::at(5)).empty());
    EXPECT_FALSE(parse_error("1,a\n", LabelColumn::at(1)).empty());
    EXPECT_FALSE(parse_error("", LabelColumn::at(0)).empty());
    EXPECT_THROW(load_csv("/nonexistent/file.csv", LabelColumn::at(0)), ParseError);
}

TEST(LoadCsv, SingleClassRejected) {
    EXPECT_THROW(parse("1,a\n2,a\n", LabelColumn::at(1)), ConfigError);
}

TEST(LoadCsv, CategoricalDropWhitespaceAndBins) {
    CsvOptions opt;
    opt.delimiter = ' ';
    opt.categorical = {1};
    opt.drop = {0};
    opt.label_bin_edges = {8.5, 10.5};
    const auto ds = parse("id1  M 0.5 7\nid2 F 0.6   9\nid3\tI 0.7 10\nid4 M 0.8 15\n", LabelColumn::at(3), opt);
    EXPECT_EQ(ds.attribute_count(), 2);
    EXPECT_EQ(ds.features(0, 0), 2.0); // F, I, M
    EXPECT_EQ(ds.features(1, 0), 0.0);
    EXPECT_EQ(ds.features(2, 0), 1.0);
    EXPECT_EQ(ds.label_map, (std::vector<std::string>{"bin0", "bin1", "bin2"}));
    EXPECT_EQ(ds.labels, (std::vector<int>{0, 1, 1, 2}));
}

TEST(LoadCsv, QuantileBinsAreBalanced) {
    std::string text;
    for (int i = 0; i < 100; ++i) text += std::to_string(i) + "," + std::to_string(i * 0.37) + "\n";
    CsvOptions opt;
    opt.label_quantile_bins = 5;
    const auto ds = parse(text, LabelColumn::at(1), opt);
    EXPECT_EQ(ds.category_count(), 5);
    std::map<int, int> counts;
    for (int l : ds.labels) ++counts[l];
    for (const auto& [bin, n] : counts) EXPECT_EQ(n, 20) << "bin " << bin;
}

TEST(LoadCsv, RoundTrip) {
    const Dataset iris = registry().load("iris");
    std::stringstream s;
    write_csv(iris, s);
    Dataset back = parse_csv(s, LabelColumn::named("label"), {}, "iris.csv");
    back.name = iris.name;
    EXPECT_TRUE(back == iris);
}

TEST(Registry, BundledDatasetsMatchTheirTables) {
    struct Expect {
        const char* name;
        Eigen::Index n, d;
        int m;
        std::size_t train, test;
    };
    for (const auto& e : {Expect{"iris", 150, 4, 3, 100, 50}, Expect{"wine", 178, 13, 3, 100, 78},
                          Expect{"zoo", 101, 16, 7, 50, 51}, Expect{"image", 2310, 19, 7, 100, 110},
                          Expect{"glass", 214, 9, 2, 100, 114}, Expect{"autompg", 392, 7, 5, 200, 192},
                          Expect{"letter", 20000, 16, 26, 2000, 18000}}) {
        const Dataset ds = registry().load(e.name);
        EXPECT_EQ(ds.size(), e.n) << e.name;
        EXPECT_EQ(ds.attribute_count(), e.d) << e.name;
        EXPECT_EQ(ds.category_count(), e.m) << e.name;
        EXPECT_EQ(registry().at(e.name).train_count, e.train) << e.name;
        EXPECT_EQ(registry().at(e.name).test_count, e.test) << e.name;
        EXPECT_LE(e.train + e.test, static_cast<std::size_t>(e.n)) << e.name;
    }
}

TEST(Registry, AllTwelveNamesAndMissingFiles) {
    EXPECT_EQ(registry().entries.size(), 12u);
    EXPECT_THROW(registry().at("mnist"), ConfigError);
    for (const auto& [name, e] : registry().entries)
        if (!e.available()) {
            EXPECT_THROW(registry().load(name), ConfigError) << name;
        }
}

TEST(Split, DeterministicAndDisjoint) {
    const auto a = split_indices(150, {100, 50, 9});
    const auto b = split_indices(150, {100, 50, 9});
    EXPECT_EQ(a.train, b.train);
    EXPECT_EQ(a.test, b.test);
    EXPECT_EQ(a.hash(), b.hash());
    EXPECT_NE(a.hash(), split_indices(150, {100, 50, 10}).hash());
    std::set<std::size_t> seen(a.train.begin(), a.train.end());
    for (auto i : a.test) EXPECT_FALSE(seen.count(i));
    seen.insert(a.test.begin(), a.test.end());
    EXPECT_EQ(seen.size(), 150u);
}

TEST(Split, EdgesAndErrors) {
    const auto s = split_indices(10, {9, 1, 0});
    EXPECT_EQ(s.test.size(), 1u);
    EXPECT_THROW(split_indices(10, {10, 1, 0}), ConfigError);
    EXPECT_THROW(split_indices(10, {0, 5, 0}), ConfigError);
    EXPECT_THROW(split_indices(10, {5, 0, 0}), ConfigError);
}

TEST(Split, PreservesLabelMap) {
    const Dataset iris = registry().load("iris");
    const auto [train, test] = random_split(iris, {100, 50, 4});
    EXPECT_EQ(train.label_map, iris.label_map);
    EXPECT_EQ(test.label_map, iris.label_map);
    EXPECT_EQ(train.size(), 100);
    EXPECT_EQ(test.size(), 50);
}

TEST(Split, TrainingFrequencyWithinBinomialBand) {
    // Bin(100, 2/3): mean 66.7, sd 4.71. With 150 counts a 3 sd band is exceeded by chance, so use 4 sd.
    std::vector<int> count(150, 0);
    for (std::uint64_t seed = 0; seed < 100; ++seed)
        for (auto i : split_indices(150, {100, 50, seed}).train) ++count[i];
    for (int c : count) {
        EXPECT_GE(c, 48);
        EXPECT_LE(c, 85);
    }
}

TEST(Normalizer, Examples) {
    Eigen::MatrixXd X(2, 2);
    X << 0.0, 5.0, 10.0, 5.0;
    const auto n = Normalizer::fit(X);
    const Eigen::MatrixXd Z = n.apply(X);
    EXPECT_EQ(Z(0, 0), -1.0);
    EXPECT_EQ(Z(1, 0), 1.0);
    EXPECT_EQ(Z(0, 1), 0.0);
    EXPECT_EQ(Z(1, 1), 0.0);
    Eigen::MatrixXd Q(1, 2);
    Q << 20.0, 7.0;
    EXPECT_EQ(n.apply(Q)(0, 0), 3.0);
    EXPECT_EQ(n.apply(Q)(0, 1), 0.0);
    EXPECT_EQ(n.apply_row(Q.row(0)), n.apply(Q).row(0));
    EXPECT_THROW(n.apply(Eigen::MatrixXd::Zero(1, 3)), ShapeError);
    EXPECT_THROW(Normalizer::fit(Eigen::MatrixXd(0, 2)), ShapeError);
}

TEST(Normalizer, RefitIsIdempotent) {
    const Dataset wine = registry().load("wine");
    const Eigen::MatrixXd once = fit_normalizer(wine).apply(wine.features);
    const Eigen::MatrixXd twice = apply_normalizer(Normalizer::fit(once), once);
    EXPECT_LE((once - twice).cwiseAbs().maxCoeff(), 1e-12);
}
