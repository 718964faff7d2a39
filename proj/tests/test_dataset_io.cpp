#include "vertisplit/dataset_io.hpp"

#include <gtest/gtest.h>

#include <random>

#include "test_helpers.hpp"
#include "vertisplit/errors.hpp"
#include "vertisplit/split_importance.hpp"
#include "vertisplit/synthetic.hpp"

namespace vsplit {
namespace {

using testing::read_file;
using testing::scratch_dir;
using testing::write_file;

TEST(LoadCsv, LabelColumnByName) {
    const auto dir = scratch_dir("csv");
    const auto path = write_file(dir / "d.csv", "a,b,y\n1,2,0\n3,4,1\n5,6,0\n");
    CsvOptions o;
    o.label_column = "y";
    const auto ds = load_csv(path, o);
    EXPECT_EQ(ds.rows(), 3u);
    EXPECT_EQ(ds.cols(), 2u);
    ASSERT_TRUE(ds.labels.has_value());
    EXPECT_DOUBLE_EQ((*ds.labels)[1], 1.0);
    EXPECT_DOUBLE_EQ(ds.features(2, 1), 6.0);
    EXPECT_EQ(ds.column_names, (std::vector<std::string>{"a", "b"}));
    EXPECT_EQ(ds.label_name, "y");
}

TEST(LoadCsv, LabelColumnByIndex) {
    const auto dir = scratch_dir("csv");
    const auto path = write_file(dir / "d.csv", "1,2,0\n3,4,1\n");
    CsvOptions o;
    o.label_column = "0";
    const auto ds = load_csv(path, o);
    EXPECT_EQ(ds.cols(), 2u);
    EXPECT_DOUBLE_EQ((*ds.labels)[1], 3.0);
}

TEST(LoadCsv, NoLabelKeepsAllColumns) {
    const auto dir = scratch_dir("csv");
    const auto path = write_file(dir / "d.csv", "a,b,y\n1,2,0\n3,4,1\n5,6,0\n");
    const auto ds = load_csv(path);
    EXPECT_FALSE(ds.labels.has_value());
    EXPECT_EQ(ds.cols(), 3u);
}

TEST(LoadCsv, NonNumericCellNamesRowAndColumn) {
    const auto dir = scratch_dir("csv");
    const auto path = write_file(dir / "d.csv", "a,b,y\n1,oops,0\n3,4,1\n");
    try {
        load_csv(path);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("row 2"), std::string::npos) << msg;
        EXPECT_NE(msg.find("column \"b\""), std::string::npos) << msg;
    }
}

TEST(LoadCsv, RejectsNonFiniteAndRaggedRows) {
    const auto dir = scratch_dir("csv");
    EXPECT_THROW(load_csv(write_file(dir / "nan.csv", "a,b\n1,nan\n")), ParseError);
    EXPECT_THROW(load_csv(write_file(dir / "inf.csv", "a,b\n1,inf\n")), ParseError);
    EXPECT_THROW(load_csv(write_file(dir / "rag.csv", "a,b\n1,2\n3\n")), ParseError);
    EXPECT_THROW(load_csv(dir / "missing.csv"), IoError);
}

TEST(LoadCsv, QuotedHeaderCells) {
    const auto dir = scratch_dir("csv");
    const auto ds = load_csv(write_file(dir / "q.csv", "\"x, 1\",\"say \"\"hi\"\"\"\n1,2\n"));
    EXPECT_EQ(ds.column_names[0], "x, 1");
    EXPECT_EQ(ds.column_names[1], "say \"hi\"");
}

TEST(LoadLibsvm, DensifiesWithZeros) {
    const auto dir = scratch_dir("svm");
    const auto ds = load_libsvm(write_file(dir / "d.svm", "1 1:0.5\n0 2:1.0\n"));
    ASSERT_EQ(ds.rows(), 2u);
    ASSERT_EQ(ds.cols(), 2u);
    EXPECT_DOUBLE_EQ(ds.features(0, 0), 0.5);
    EXPECT_DOUBLE_EQ(ds.features(0, 1), 0.0);
    EXPECT_DOUBLE_EQ(ds.features(1, 0), 0.0);
    EXPECT_DOUBLE_EQ(ds.features(1, 1), 1.0);
    EXPECT_DOUBLE_EQ((*ds.labels)[0], 1.0);
}

TEST(LoadLibsvm, ErrorPaths) {
    const auto dir = scratch_dir("svm");
    try {
        load_libsvm(write_file(dir / "empty.svm", ""));
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("no samples"), std::string::npos);
    }
    try {
        load_libsvm(write_file(dir / "order.svm", "1 3:2.0 2:1.0\n"));
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("not increasing"), std::string::npos);
    }
    EXPECT_THROW(load_libsvm(write_file(dir / "tok.svm", "1 a:2.0\n")), ParseError);
}

TEST(PartyPartition, ValidatesRangeAndGuard) {
    EXPECT_THROW(PartyPartition({0, 2}, 2), InvalidArgument);
    EXPECT_THROW(PartyPartition({0, 0}, 2, true), InvalidArgument);
    EXPECT_NO_THROW(PartyPartition({0, 0}, 2, false));
    const PartyPartition p({1, 0, 1, 0}, 2);
    EXPECT_EQ(p.columns_of(1), (std::vector<std::size_t>{0, 2}));
    EXPECT_EQ(p.counts(), (std::vector<std::size_t>{2, 2}));
}

TEST(PartyPartition, UnionIsDisjointCoverProperty) {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 200; ++t) {
        const std::size_t m = 1 + rng() % 60;
        const int k = 1 + static_cast<int>(rng() % 6);
        std::vector<int> a(m);
        for (auto& x : a) x = static_cast<int>(rng() % static_cast<unsigned>(k));
        const PartyPartition p(a, k);
        std::vector<int> seen(m, 0);
        for (const auto& g : p.groups())
            for (auto j : g) ++seen[j];
        for (int s : seen) ASSERT_EQ(s, 1);
    }
}

TEST(Materialize, WritesColumnsPerParty) {
    const auto dir = scratch_dir("mat");
    Matrix x(2, 4);
    x << 1, 2, 3, 4, 5, 6, 7, 8;
    Vector y(2);
    y << 0, 1;
    const auto ds = GlobalDataset::make(x, y, {"a", "b", "c", "d"});
    const auto m = materialize_parties(ds, PartyPartition({0, 1, 0, 1}, 2), dir);
    EXPECT_EQ(read_file(dir / "party0.csv"), "a,c,label\n1,3,0\n5,7,1\n");
    EXPECT_EQ(read_file(dir / "party1.csv"), "b,d\n2,4\n6,8\n");
    EXPECT_EQ(read_file(dir / "labels.csv"), "label\n0\n1\n");
    EXPECT_EQ(m.assignment, (std::vector<int>{0, 1, 0, 1}));
    EXPECT_EQ(read_manifest(dir / "manifest.json").assignment, m.assignment);
}

TEST(Materialize, SinglePartyReproducesInput) {
    const auto dir = scratch_dir("mat");
    const auto ds = GlobalDataset::make(synthetic::gaussian(5, 3, 9));
    materialize_parties(ds, PartyPartition({0, 0, 0}, 1), dir);
    const auto back = load_csv(dir / "party0.csv");
    EXPECT_EQ(back.features, ds.features);
}

TEST(Materialize, AssignmentLengthMismatch) {
    const auto dir = scratch_dir("mat");
    const auto ds = GlobalDataset::make(synthetic::gaussian(5, 3, 9));
    EXPECT_THROW(materialize_parties(ds, PartyPartition({0, 1}, 2), dir), InvalidArgument);
}

// Writing parties and concatenating them back under the assignment is exact.
TEST(Materialize, RoundTripIsBitExactProperty) {
    std::mt19937_64 rng(17);
    for (int t = 0; t < 8; ++t) {
        const auto dir = scratch_dir("rt" + std::to_string(t));
        const std::size_t m = 2 + rng() % 12;
        Matrix x = synthetic::gaussian(7, m, rng());
        x(0, 0) = 1e-300;
        x(1, 0) = -123456789.123456789;
        const auto ds = GlobalDataset::make(x, Vector(synthetic::gaussian(7, 1, rng()).col(0)));
        auto spec = DirichletSpec::symmetric(1 + static_cast<int>(rng() % std::min<std::size_t>(m, 4)), 1.0, rng());
        const auto part = split_by_importance(ds, spec);
        const auto manifest = materialize_parties(ds, part, dir);

        Matrix rebuilt(ds.features.rows(), ds.features.cols());
        for (int k = 0; k < part.num_parties(); ++k) {
            CsvOptions o;
            if (k == 0) o.label_column = "label";
            const auto party = load_csv(dir / ("party" + std::to_string(k) + ".csv"), o);
            const auto cols = PartyPartition(manifest.assignment, part.num_parties()).columns_of(k);
            ASSERT_EQ(party.cols(), cols.size());
            for (std::size_t c = 0; c < cols.size(); ++c)
                rebuilt.col(static_cast<Eigen::Index>(cols[c])) = party.features.col(static_cast<Eigen::Index>(c));
            if (k == 0) EXPECT_EQ(*party.labels, *ds.labels);
        }
        EXPECT_EQ(rebuilt, ds.features);
    }
}

TEST(Manifest, SerializationIsCanonical) {
    SplitManifest m;
    m.seed = 42;
    m.mode = SplitMode::correlation;
    m.corr_kind = CorrelationKind::pearson;
    m.params = {{"beta", 0.5}, {"counts", {2, 2}}};
    m.assignment = {0, 1, 1, 0};
    m.achieved = AchievedMetrics{-0.1, -0.5, 0.0, -0.25, 0.15};
    m.source = {"in.csv", 10, 4};
    const auto text = dump_manifest(m);
    EXPECT_EQ(text, dump_manifest(manifest_from_json(nlohmann::json::parse(text))));
    const auto j = nlohmann::json::parse(text);
    for (const char* key : {"version", "seed", "mode", "params", "corr_kind", "assignment", "achieved", "source"})
        EXPECT_TRUE(j.contains(key)) << key;
    EXPECT_EQ(j.size(), 8u);
}

TEST(FlattenImage, OwnerOfAllPixelsSeesOriginal) {
    const Matrix x = synthetic::gaussian(3, 12, 4);
    const ImageLayout layout{2, 2, 3, 0.0};
    EXPECT_EQ(flatten_image_split(x, PartyPartition(std::vector<int>(12, 0), 1), layout, 0), x);
}

TEST(FlattenImage, PartyWithoutPixelsSeesBackground) {
    const Matrix x = synthetic::gaussian(3, 4, 4);
    const ImageLayout layout{2, 2, 1, 0.25};
    const auto img = flatten_image_split(x, PartyPartition({0, 0, 0, 0}, 2), layout, 1);
    EXPECT_TRUE((img.array() == 0.25).all());
}

TEST(FlattenImage, MasksUnownedPixels) {
    Matrix x(1, 4);
    x << 10, 20, 30, 40;
    const ImageLayout layout{2, 2, 1, 0.0};
    const auto img = flatten_image_split(x, PartyPartition({0, 1, 1, 0}, 2), layout, 0);
    Matrix expect(1, 4);
    expect << 10, 0, 0, 40;  // [[p0, 0], [0, p3]]
    EXPECT_EQ(img, expect);
    EXPECT_EQ(layout.index(0, 1, 1), 3u);
    EXPECT_EQ((ImageLayout{2, 3, 2, 0.0}).index(1, 0, 2), 8u);
}

TEST(FlattenImage, LayoutMismatch) {
    const Matrix x = synthetic::gaussian(2, 5, 1);
    EXPECT_THROW(flatten_image_split(x, PartyPartition({0, 0, 0, 0, 0}, 1), ImageLayout{2, 2, 1, 0.0}, 0),
                 InvalidArgument);
}

TEST(GlobalDataset, RejectsBadShapes) {
    EXPECT_THROW(GlobalDataset::make(Matrix(0, 3)), InvalidArgument);
    Matrix x = Matrix::Ones(2, 2);
    x(0, 0) = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(GlobalDataset::make(x), InvalidArgument);
    EXPECT_THROW(GlobalDataset::make(Matrix::Ones(2, 2), Vector::Ones(3)), InvalidArgument);
}

}  // namespace
}  // namespace vsplit
