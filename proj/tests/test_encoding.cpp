#include "fivec/encoding.hpp"
#include "fivec/errors.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <string>

using namespace fivec;

namespace {

const AliasTable kAliases = AliasTable::builtin();

LoanDataset csv_dataset(const std::string& name, const std::string& schema_json,
                        const std::string& csv) {
    const std::string path = "/tmp/fivec_enc_" + name + ".csv";
    std::ofstream(path) << csv;
    const SchemaConfig schema =
        SchemaConfig::from_json(nlohmann::json::parse(schema_json), kAliases);
    return load_loans(path, schema, kAliases);
}

const char* kSchema = R"({
    "target": "default",
    "positive_label": "1",
    "columns": {"score": "numeric", "state": "categorical"}
})";

} // namespace

TEST_SUITE("encoding") {

TEST_CASE("tree mode: one column per feature, codes from the sorted train dictionary") {
    const LoanDataset ds = csv_dataset("tree", kSchema,
                                       "score,state,default\n"
                                       "1,TX,0\n"
                                       "2,CA,1\n"
                                       "3,TX,0\n"
                                       "4,,1\n");
    const Encoder enc = Encoder::fit(ds, EncodingMode::Tree);
    CHECK(enc.encoded_width() == 2);
    const EncodedMatrix m = enc.transform(ds);
    REQUIRE(m.cols == 2);
    REQUIRE(m.rows == 4);
    CHECK(m.col_names == std::vector<std::string>{"score", "state"});
    CHECK(m.col_is_categorical == std::vector<uint8_t>{0, 1});

    // levels sorted: CA=0, TX=1, MISSING=2
    CHECK(m.at(0, 1) == 1.0);
    CHECK(m.at(1, 1) == 0.0);
    CHECK(m.at(2, 1) == 1.0);
    CHECK(m.at(3, 1) == 2.0);
    // numerics pass through untouched in tree mode
    CHECK(m.at(0, 0) == 1.0);
    CHECK(m.at(3, 0) == 4.0);
    CHECK(m.labels == std::vector<uint8_t>{0, 1, 0, 1});
}

TEST_CASE("tree mode imputes missing numerics with the train median") {
    const LoanDataset ds = csv_dataset("impute", kSchema,
                                       "score,state,default\n"
                                       "1,CA,0\n"
                                       "2,CA,1\n"
                                       "3,CA,0\n"
                                       "4,CA,1\n"
                                       ",CA,0\n");
    const Encoder enc = Encoder::fit(ds, EncodingMode::Tree);
    const EncodedMatrix m = enc.transform(ds);
    CHECK(m.at(4, 0) == 2.5); // median of {1,2,3,4}
}

TEST_CASE("gradient mode z-scores with the population stddev and one-hots levels") {
    const LoanDataset ds = csv_dataset("grad", kSchema,
                                       "score,state,default\n"
                                       "1,TX,0\n"
                                       "2,CA,1\n"
                                       "3,TX,0\n"
                                       "4,CA,1\n");
    const Encoder enc = Encoder::fit(ds, EncodingMode::Gradient);
    // 1 numeric + 3 one-hot slots (CA, TX, MISSING)
    CHECK(enc.encoded_width() == 4);
    const EncodedMatrix m = enc.transform(ds);
    CHECK(m.col_names ==
          std::vector<std::string>{"score", "state=CA", "state=TX", "state=MISSING"});

    // mean 2.5, population stddev sqrt(1.25)
    const double sd = std::sqrt(1.25);
    CHECK(m.at(0, 0) == doctest::Approx((1 - 2.5) / sd).epsilon(1e-12));
    CHECK(m.at(3, 0) == doctest::Approx((4 - 2.5) / sd).epsilon(1e-12));

    CHECK(m.at(0, 2) == 1.0); // TX
    CHECK(m.at(0, 1) == 0.0);
    CHECK(m.at(1, 1) == 1.0); // CA
    CHECK(m.at(1, 3) == 0.0);

    // every source feature index is tracked per encoded column
    CHECK(m.col_feature == std::vector<size_t>{0, 1, 1, 1});
}

TEST_CASE("constant numerics do not divide by zero") {
    const LoanDataset ds = csv_dataset("const", kSchema,
                                       "score,state,default\n"
                                       "5,CA,0\n"
                                       "5,CA,1\n");
    const Encoder enc = Encoder::fit(ds, EncodingMode::Gradient);
    const EncodedMatrix m = enc.transform(ds);
    CHECK(m.at(0, 0) == 0.0); // (5-5)/1
    CHECK(std::isfinite(m.at(1, 0)));
}

TEST_CASE("unseen level at transform time folds into MISSING") {
    const LoanDataset train = csv_dataset("seen", kSchema,
                                          "score,state,default\n"
                                          "1,CA,0\n"
                                          "2,TX,1\n");
    const LoanDataset other = csv_dataset("unseen", kSchema,
                                          "score,state,default\n"
                                          "1,WA,0\n"
                                          "2,CA,1\n");
    const Encoder enc = Encoder::fit(train, EncodingMode::Tree);
    const EncodedMatrix m = enc.transform(other);
    CHECK(m.at(0, 1) == 2.0); // WA was never seen -> MISSING slot
    CHECK(m.at(1, 1) == 0.0); // CA keeps its train code
}

TEST_CASE("fit on an explicit feature subset, resolving by name") {
    const LoanDataset ds = csv_dataset("subset", kSchema,
                                       "score,state,default\n"
                                       "1,CA,0\n"
                                       "2,TX,1\n");
    const Encoder enc = Encoder::fit(ds, EncodingMode::Tree, {FeatureId("state")});
    CHECK(enc.encoded_width() == 1);
    const EncodedMatrix m = enc.transform(ds);
    CHECK(m.cols == 1);
    CHECK(m.source_features == std::vector<FeatureId>{FeatureId("state")});

    CHECK_THROWS_AS(Encoder::fit(ds, EncodingMode::Tree, {FeatureId("absent")}), ArgumentError);
    CHECK_THROWS_AS(Encoder::fit(ds, EncodingMode::Tree, std::vector<FeatureId>{}), ArgumentError);
}

TEST_CASE("transform accepts tables with extra columns or another order") {
    const LoanDataset train = csv_dataset("order1", kSchema,
                                          "score,state,default\n"
                                          "1,CA,0\n"
                                          "2,TX,1\n");
    // same features, reversed column order, plus an extra column
    const LoanDataset other = csv_dataset("order2", R"({
        "target": "default",
        "positive_label": "1",
        "columns": {"state": "categorical", "score": "numeric", "extra": "numeric"}
    })",
                                          "state,extra,score,default\n"
                                          "TX,9,7,1\n");
    const Encoder enc = Encoder::fit(train, EncodingMode::Tree);
    const EncodedMatrix m = enc.transform(other);
    REQUIRE(m.cols == 2);
    CHECK(m.at(0, 0) == 7.0); // score resolved by name
    CHECK(m.at(0, 1) == 1.0); // TX
}

TEST_CASE("reference row is median and mode, ties to the smaller level") {
    const LoanDataset ds = csv_dataset("ref", kSchema,
                                       "score,state,default\n"
                                       "10,TX,0\n"
                                       "20,CA,1\n"
                                       "30,TX,0\n"
                                       "40,CA,1\n"
                                       "50,NY,0\n");
    const Encoder enc = Encoder::fit(ds, EncodingMode::Tree);
    const RawRow ref = enc.reference_row();
    REQUIRE(ref.size() == 2);
    CHECK(ref[0].num == 30.0);
    CHECK(ref[1].cat == "CA"); // CA and TX tie at 2; CA sorts first
}

TEST_CASE("encode_row(raw_row(r)) equals the transform row") {
    const LoanDataset ds = csv_dataset("path", kSchema,
                                       "score,state,default\n"
                                       "1,CA,0\n"
                                       ",TX,1\n"
                                       "3,,0\n");
    for (const EncodingMode mode : {EncodingMode::Tree, EncodingMode::Gradient}) {
        const Encoder enc = Encoder::fit(ds, mode);
        const EncodedMatrix m = enc.transform(ds);
        for (size_t r = 0; r < ds.row_count(); ++r) {
            const auto encoded = enc.encode_row(enc.raw_row(ds, r));
            REQUIRE(encoded.size() == m.cols);
            for (size_t c = 0; c < m.cols; ++c) CHECK(encoded[c] == m.at(r, c));
        }
    }
}

TEST_CASE("encoder JSON round-trips to identical output") {
    const LoanDataset ds = csv_dataset("json", kSchema,
                                       "score,state,default\n"
                                       "1,CA,0\n"
                                       "2,TX,1\n"
                                       ",NY,0\n");
    for (const EncodingMode mode : {EncodingMode::Tree, EncodingMode::Gradient}) {
        const Encoder enc = Encoder::fit(ds, mode);
        const Encoder back = Encoder::from_json(enc.to_json());
        CHECK(back.mode() == enc.mode());
        CHECK(back.encoded_width() == enc.encoded_width());
        CHECK(back.column_names() == enc.column_names());
        const EncodedMatrix a = enc.transform(ds);
        const EncodedMatrix b = back.transform(ds);
        CHECK(a.values == b.values);
    }

    auto doc = Encoder::fit(ds, EncodingMode::Tree).to_json();
    doc["features"][1]["levels"] = {"TX", "CA", "MISSING"}; // unsorted
    CHECK_THROWS_AS(Encoder::from_json(doc), ParseError);
    doc["features"][1]["levels"] = {"CA", "TX"}; // no MISSING tail
    CHECK_THROWS_AS(Encoder::from_json(doc), ParseError);
}

TEST_CASE("kind mismatches between encoder and dataset are rejected") {
    const LoanDataset train = csv_dataset("kind1", kSchema,
                                          "score,state,default\n"
                                          "1,CA,0\n"
                                          "2,TX,1\n");
    const LoanDataset flipped = csv_dataset("kind2", R"({
        "target": "default",
        "positive_label": "1",
        "columns": {"score": "categorical", "state": "categorical"}
    })",
                                            "score,state,default\n"
                                            "1,CA,0\n"
                                            "2,TX,1\n");
    const Encoder enc = Encoder::fit(train, EncodingMode::Tree);
    CHECK_THROWS_AS(enc.transform(flipped), ArgumentError);
}

} // TEST_SUITE
