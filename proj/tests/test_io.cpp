#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "permuton/io.hpp"
#include "permuton/starmodel.hpp"
#include "test_util.hpp"

using namespace permuton;

namespace {

std::filesystem::path scratch(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "permuton_io_test";
    std::filesystem::create_directories(dir);
    return dir / name;
}

}

TEST(GridCsv, RoundTripIsExact) {
    const GridPermuton g = test_util::random_grid(7, 3);
    std::stringstream ss;
    write_grid_csv(ss, g);
    const GridPermuton back = read_grid_csv(ss);
    ASSERT_EQ(back.m(), 7u);
    for (std::size_t k = 0; k < 49; ++k) {
        EXPECT_EQ(back.masses()[k], g.masses()[k]);
    }
}

TEST(GridCsv, LayoutRowsAreX) {
    std::stringstream ss;
    write_grid_csv(ss, GridPermuton::identity(2));
    EXPECT_EQ(ss.str(), "m=2\n0.5,0\n0,0.5\n");
    std::stringstream rev;
    write_grid_csv(rev, GridPermuton::reverse(2));
    EXPECT_EQ(rev.str(), "m=2\n0,0.5\n0.5,0\n");
}

TEST(GridCsv, RejectsMalformedInput) {
    auto parse = [](const std::string& s) {
        std::stringstream ss(s);
        return read_grid_csv(ss);
    };
    EXPECT_THROW(parse(""), ValidationError);
    EXPECT_THROW(parse("n=2\n0.5,0\n0,0.5\n"), ValidationError);
    EXPECT_THROW(parse("m=2\n0.5,0\n"), ValidationError);
    EXPECT_THROW(parse("m=2\n0.5,0,0\n0,0.5\n"), ValidationError);
    EXPECT_THROW(parse("m=2\n0.5,x\n0,0.5\n"), ValidationError);
    EXPECT_THROW(parse("m=2\n0.5,0\n0.5,0\n"), ValidationError);  // column marginals
    EXPECT_THROW(parse("m=2\n0.5,0\n0,0.5\n1\n"), ValidationError);
    EXPECT_NO_THROW(parse("m=2\n0.5,0\n0,0.5\n\n"));
}

TEST(GridCsv, FilesAndSidecar) {
    const auto path = scratch("grid.csv");
    const GridPermuton g = star12_grid(-1.0, 16);
    save_grid_with_meta(path.string(), g);
    EXPECT_EQ(sidecar_path(path.string()), (path.parent_path() / "grid.meta.json").string());
    const GridPermuton back = load_grid(path.string());
    EXPECT_EQ(back.masses()[17], g.masses()[17]);
    std::ifstream meta(sidecar_path(path.string()));
    const nlohmann::json j = nlohmann::json::parse(meta);
    EXPECT_EQ(j["m"], 16);
    EXPECT_DOUBLE_EQ(j["entropy"].get<double>(), entropy_grid(g));
    EXPECT_DOUBLE_EQ(j["densities"]["12"].get<double>(), density_grid_exact(g, PatternSpec::parse("12")));
    EXPECT_EQ(j["densities"].size(), 8u);
    EXPECT_THROW(load_grid((path.parent_path() / "missing.csv").string()), ValidationError);
    EXPECT_EQ(sidecar_path("dir.v2/out"), "dir.v2/out.meta.json");
}

TEST(InsertionCsv, RoundTrip) {
    const InsertionFamily fam = star12_insertion_family(-2.0, 12, 16);
    std::stringstream ss;
    write_insertion_csv(ss, fam);
    const InsertionFamily back = read_insertion_csv(ss);
    ASSERT_EQ(back.mt(), 12u);
    ASSERT_EQ(back.my(), 16u);
    for (std::size_t c = 0; c < 12; ++c) {
        for (std::size_t k = 0; k < fam.rows(c); ++k) {
            EXPECT_EQ(back(c, k), fam(c, k));
        }
    }
    std::stringstream head;
    write_insertion_csv(head, fam);
    std::string first;
    std::string second;
    std::getline(head, first);
    std::getline(head, second);
    EXPECT_EQ(first, "mt=12,my=16");
    EXPECT_EQ(second.substr(0, 4), "1,1,");
}

TEST(InsertionCsv, RejectsMalformedInput) {
    auto parse = [](const std::string& s) {
        std::stringstream ss(s);
        return read_insertion_csv(ss);
    };
    EXPECT_THROW(parse("mt=1\n"), ValidationError);
    EXPECT_THROW(parse("mt=1,my=1\n1,1,1\n"), ValidationError);  // incomplete column
    EXPECT_THROW(parse("mt=1,my=1\n2,1,1\n"), ValidationError);
    EXPECT_THROW(parse("mt=1,my=1\n1,9,1\n"), ValidationError);
    std::string ok = "mt=1,my=1\n";
    for (int k = 1; k <= 8; ++k) {
        ok += "1," + std::to_string(k) + ",2\n";  // width 1/16, 8 rows, density 2 on (0, 1/2]
    }
    EXPECT_NO_THROW(parse(ok));
}

TEST(Pgm, HeaderAndScaling) {
    std::stringstream ss;
    write_pgm(ss, GridPermuton::identity(3));
    const std::string s = ss.str();
    const std::string head = "P5\n3 3\n255\n";
    ASSERT_EQ(s.substr(0, head.size()), head);
    ASSERT_EQ(s.size(), head.size() + 9);
    // top image row is y-cell 2: only x-cell 2 is lit
    EXPECT_EQ(static_cast<unsigned char>(s[head.size() + 2]), 255);
    EXPECT_EQ(static_cast<unsigned char>(s[head.size() + 0]), 0);
    EXPECT_EQ(static_cast<unsigned char>(s[head.size() + 6]), 255);
}

TEST(Curves, CsvRows) {
    std::stringstream ss;
    write_curves_csv(ss, {RegionCurve{"A", {{0.0, 0.25, 1.0}, {1.0, 1.0, 0.0}}}});
    EXPECT_EQ(ss.str(), "label,t,x,y\nA,0,0.25,1\nA,1,1,0\n");
}
