#include <cstring>

#include "doctest.h"
#include "ecgbeat/errors.hpp"
#include "ecgbeat/record_io.hpp"
#include "test_support.hpp"

using namespace ecgbeat;
using ecgbeat::testing::TempDir;
using ecgbeat::testing::write_text;

TEST_CASE("minimal record loads") {
    TempDir dir;
    write_text(dir / "sig.csv", "0.1\n0.2\n0.3\n");
    write_text(dir / "ann.csv", "sample_index,label\n1,N\n");
    const auto loaded = load_record(dir / "sig.csv", dir / "ann.csv", 180.0);
    CHECK(loaded.record.rpeaks == std::vector<std::size_t>{1});
    CHECK(loaded.record.labels == std::vector<ClassId>{0});
    CHECK(loaded.record.leads.size() == 1);
    CHECK(loaded.record.length() == 3);
    CHECK(loaded.skipped_unknown_labels == 0);
}

TEST_CASE("annotations are sorted with their labels") {
    TempDir dir;
    write_text(dir / "sig.csv", "0\n0\n0\n0\n0\n0\n0\n");
    write_text(dir / "ann.csv", "sample_index,label\n5,V\n2,S\n");
    const auto rec = load_record(dir / "sig.csv", dir / "ann.csv", 180.0).record;
    CHECK(rec.rpeaks == std::vector<std::size_t>{2, 5});
    CHECK(rec.labels == std::vector<ClassId>{1, 2});
}

TEST_CASE("unknown labels are skipped and counted, or rejected in strict mode") {
    TempDir dir;
    write_text(dir / "sig.csv", "1\n1\n1\n1\n1\n1\n1\n1\n1\n1\n");
    const std::string ann = "sample_index,label\n1,N\n3,Q\n5,V\n7,\"Q\"\n8,S\n";
    write_text(dir / "ann.csv", ann);

    // Brute-force scan of the annotation text for symbols outside {N,S,V}.
    std::size_t expected = 0;
    for (std::size_t pos = ann.find('\n') + 1; pos < ann.size();) {
        const auto eol = ann.find('\n', pos);
        auto sym = ann.substr(ann.find(',', pos) + 1, eol - ann.find(',', pos) - 1);
        if (sym.front() == '"') sym = sym.substr(1, sym.size() - 2);
        if (sym != "N" && sym != "S" && sym != "V") ++expected;
        pos = eol + 1;
    }

    const auto loaded = load_record(dir / "sig.csv", dir / "ann.csv", 180.0);
    CHECK(loaded.skipped_unknown_labels == expected);
    CHECK(loaded.skipped_unknown_labels == 2);
    CHECK(loaded.record.rpeaks == std::vector<std::size_t>{1, 5, 8});

    LoadOptions strict;
    strict.strict = true;
    CHECK_THROWS_AS(load_record(dir / "sig.csv", dir / "ann.csv", 180.0, strict), ValidationError);
}

TEST_CASE("load_record error paths") {
    TempDir dir;
    write_text(dir / "ann.csv", "sample_index,label\n1,N\n");

    SUBCASE("malformed signal row reports its line") {
        write_text(dir / "sig.csv", "0.1\n0.2\nabc\n");
        try {
            load_record(dir / "sig.csv", dir / "ann.csv", 180.0);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line() == 3);
        }
    }
    SUBCASE("column count changes mid-file") {
        write_text(dir / "sig.csv", "0.1,0.2\n0.2\n");
        CHECK_THROWS_AS(load_record(dir / "sig.csv", dir / "ann.csv", 180.0), ParseError);
    }
    SUBCASE("three columns") {
        write_text(dir / "sig.csv", "0.1,0.2,0.3\n");
        CHECK_THROWS_AS(load_record(dir / "sig.csv", dir / "ann.csv", 180.0), ParseError);
    }
    SUBCASE("duplicate R-peaks are not strictly increasing") {
        write_text(dir / "sig.csv", "0\n0\n0\n");
        write_text(dir / "dup.csv", "sample_index,label\n1,N\n1,V\n");
        CHECK_THROWS_AS(load_record(dir / "sig.csv", dir / "dup.csv", 180.0), ValidationError);
    }
    SUBCASE("R-peak beyond the signal") {
        write_text(dir / "sig.csv", "0\n0\n");
        write_text(dir / "far.csv", "sample_index,label\n2,N\n");
        CHECK_THROWS_AS(load_record(dir / "sig.csv", dir / "far.csv", 180.0), ValidationError);
    }
    SUBCASE("missing header") {
        write_text(dir / "sig.csv", "0\n0\n");
        write_text(dir / "nohdr.csv", "1,N\n");
        CHECK_THROWS_AS(load_record(dir / "sig.csv", dir / "nohdr.csv", 180.0), ParseError);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(load_record(dir / "nope.csv", dir / "ann.csv", 180.0), IoError);
    }
}

TEST_CASE("lead selection") {
    TempDir dir;
    write_text(dir / "sig.csv", "1,10\n2,20\n3,30\n");
    write_text(dir / "ann.csv", "sample_index,label\n1,N\n");
    LoadOptions opt;
    opt.lead = 1;
    CHECK(load_record(dir / "sig.csv", dir / "ann.csv", 250.0, opt).record.leads[0] ==
          std::vector<double>{10, 20, 30});
    opt.lead = std::nullopt;
    CHECK(load_record(dir / "sig.csv", dir / "ann.csv", 250.0, opt).record.leads.size() == 2);
    opt.lead = 2;
    CHECK_THROWS_AS(load_record(dir / "sig.csv", dir / "ann.csv", 250.0, opt), ValidationError);
}

TEST_CASE("load_record never returns an invalid record on fuzzed input") {
    TempDir dir;
    Rng rng(7);
    const char* sig_tokens[] = {"0.5", "-1", "x", "", "1,2", "1,2,3", "nan", "1e3", " 2 "};
    const char* ann_tokens[] = {"3,N", "0,V", "1,S", "9,Q", "2,N", "a,N", "2", "-1,N", "4,V"};
    int returned = 0;
    for (int trial = 0; trial < 300; ++trial) {
        std::string sig, ann = "sample_index,label\n";
        const auto n_sig = 1 + rng.below(8);
        for (std::uint64_t i = 0; i < n_sig; ++i) sig += std::string(sig_tokens[rng.below(9)]) + "\n";
        const auto n_ann = rng.below(5);
        for (std::uint64_t i = 0; i < n_ann; ++i) ann += std::string(ann_tokens[rng.below(9)]) + "\n";
        write_text(dir / "s.csv", sig);
        write_text(dir / "a.csv", ann);
        try {
            const auto rec = load_record(dir / "s.csv", dir / "a.csv", 180.0).record;
            CHECK_NOTHROW(rec.validate());
            ++returned;
        } catch (const ValidationError&) {
        } catch (const ParseError&) {
        }
    }
    CHECK(returned > 0);
}

TEST_CASE("save_record writes what load_record reads") {
    TempDir dir;
    EcgRecord rec;
    rec.fs = 250.0;
    rec.leads = {{0.125, -0.5, 1.75, 2.0, 0.0}};
    rec.rpeaks = {1, 3};
    rec.labels = {2, 0};
    save_record(rec, LabelSet{}, dir / "s.csv", dir / "a.csv");
    const auto back = load_record(dir / "s.csv", dir / "a.csv", 250.0).record;
    CHECK(back.leads == rec.leads);
    CHECK(back.rpeaks == rec.rpeaks);
    CHECK(back.labels == rec.labels);
}

TEST_CASE("label set invariants") {
    CHECK_THROWS_AS(LabelSet(std::vector<std::string>{}), ValidationError);
    CHECK_THROWS_AS(LabelSet(std::vector<std::string>{"N", "N"}), ValidationError);
    const LabelSet custom({"A", "B"});
    CHECK(custom.find("B") == 1);
    CHECK_FALSE(custom.find("N").has_value());
}

TEST_CASE("feature matrix round trips") {
    TempDir dir;
    SUBCASE("single zero row") {
        Matrix m(1, kFeatureDim, 0.0);
        save_feature_matrix(m, std::vector<ClassId>{0}, dir / "f.csv");
        const auto text = ecgbeat::testing::read_bytes(dir / "f.csv");
        CHECK(std::count(text.begin(), text.end(), '\n') == 2);
        CHECK(text.rfind("f0,f1,", 0) == 0);
        CHECK(text.find("f75,label\n") != std::string::npos);
        const auto back = load_feature_matrix(dir / "f.csv");
        CHECK(back.rows == m);
        CHECK(back.labels == std::vector<ClassId>{0});
    }
    SUBCASE("order preserved") {
        Matrix m(2, kFeatureDim, 0.0);
        m(0, 0) = 1.0;
        m(1, 0) = 2.0;
        save_feature_matrix(m, std::vector<ClassId>{0, 2}, dir / "f.csv");
        const auto back = load_feature_matrix(dir / "f.csv");
        CHECK(back.labels == std::vector<ClassId>{0, 2});
        CHECK(back.rows(0, 0) == 1.0);
        CHECK(back.rows(1, 0) == 2.0);
    }
    SUBCASE("1000 random rows reload within 1e-9") {
        Rng rng(11);
        Matrix m(1000, kFeatureDim);
        std::vector<ClassId> labels(1000);
        for (double& v : m.data()) v = (rng.uniform() - 0.5) * std::pow(10.0, static_cast<double>(rng.below(9)) - 4);
        m(0, 0) = -1.234567891;
        for (auto& y : labels) y = static_cast<ClassId>(rng.below(3));
        save_feature_matrix(m, labels, dir / "f.csv");
        const auto back = load_feature_matrix(dir / "f.csv");
        REQUIRE(back.rows.rows() == 1000);
        double worst = 0.0;
        for (std::size_t i = 0; i < m.data().size(); ++i)
            worst = std::max(worst, std::abs(back.rows.data()[i] - m.data()[i]));
        CHECK(worst < 1e-9);
        CHECK(std::abs(back.rows(0, 0) - -1.234567891) < 1e-9);
        CHECK(back.labels == labels);

        // save -> load -> save is a byte-level fixpoint
        save_feature_matrix(back.rows, back.labels, dir / "g.csv");
        CHECK(ecgbeat::testing::read_bytes(dir / "f.csv") == ecgbeat::testing::read_bytes(dir / "g.csv"));
    }
    SUBCASE("dimension mismatch fails before writing") {
        Matrix m(2, kFeatureDim);
        CHECK_THROWS_AS(save_feature_matrix(m, std::vector<ClassId>{0}, dir / "bad.csv"), ValidationError);
        CHECK_FALSE(std::filesystem::exists(dir / "bad.csv"));
    }
    SUBCASE("ragged row is a parse error") {
        write_text(dir / "r.csv", "f0,f1,label\n1,2,0\n1,0\n");
        CHECK_THROWS_AS(load_feature_matrix(dir / "r.csv"), ParseError);
    }
}

namespace {
BeatImage filled_image(double gasf, double mtf, double rp) {
    return {Matrix(kImageSide, kImageSide, gasf), Matrix(kImageSide, kImageSide, mtf),
            Matrix(kImageSide, kImageSide, rp)};
}
}  // namespace

TEST_CASE("image export") {
    TempDir dir;
    SUBCASE("all-zero image is 12288 bytes of zeros") {
        export_image(filled_image(0, 0, 0), dir / "img");
        const auto raw = ecgbeat::testing::read_bytes(dir / "img.f32");
        CHECK(raw.size() == 3 * 32 * 32 * 4);
        CHECK(std::all_of(raw.begin(), raw.end(), [](char c) { return c == 0; }));
        CHECK(std::filesystem::exists(dir / "img_gasf.pgm"));
        CHECK(std::filesystem::exists(dir / "img_mtf.pgm"));
        CHECK(std::filesystem::exists(dir / "img_rp.pgm"));
    }
    SUBCASE("flat channel maps to 255") {
        export_image(filled_image(1.0, 0.5, 0.0), dir / "img");
        const auto pgm = ecgbeat::testing::read_bytes(dir / "img_gasf.pgm");
        const std::string header = "P5\n32 32\n255\n";
        REQUIRE(pgm.size() == header.size() + 1024);
        CHECK(pgm.substr(0, header.size()) == header);
        CHECK(std::all_of(pgm.begin() + static_cast<std::ptrdiff_t>(header.size()), pgm.end(),
                          [](char c) { return static_cast<unsigned char>(c) == 255; }));
    }
    SUBCASE("gray mapping spans 0..255") {
        Matrix ch(kImageSide, kImageSide, 0.25);
        ch(0, 0) = -1.0;
        ch(5, 5) = 1.0;
        const auto gray = channel_to_gray(ch);
        CHECK(gray[0] == 0);
        CHECK(gray[5 * 32 + 5] == 255);
        CHECK(gray[1] == 159);  // round(1.25 / 2 * 255)
    }
    SUBCASE("100 random images reload bit-exactly") {
        Rng rng(3);
        for (int t = 0; t < 100; ++t) {
            auto img = filled_image(0, 0, 0);
            for (double& v : img.gasf.data()) v = static_cast<float>(2.0 * rng.uniform() - 1.0);
            for (double& v : img.mtf.data()) v = static_cast<float>(rng.uniform());
            for (double& v : img.rp.data()) v = static_cast<float>(rng.uniform());
            export_image(img, dir / "r");
            const auto back = load_image_f32(dir / "r.f32");
            CHECK(std::memcmp(back.gasf.data().data(), img.gasf.data().data(), 1024 * sizeof(double)) == 0);
            CHECK(back == img);
        }
    }
    SUBCASE("wrong shape or range is rejected") {
        auto img = filled_image(0, 0, 0);
        img.mtf = Matrix(31, 32);
        CHECK_THROWS_AS(export_image(img, dir / "bad"), ValidationError);
        CHECK_THROWS_AS(export_image(filled_image(0, 1.5, 0), dir / "bad"), ValidationError);
        write_text(dir / "short.f32", "abcd");
        CHECK_THROWS_AS(load_image_f32(dir / "short.f32"), ValidationError);
    }
}
