#include "hesskit/error.hpp"
#include "hesskit/families.hpp"
#include "hesskit/io.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>
#include <string>

using namespace hesskit;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name)
{
    const auto dir = fs::temp_directory_path() / ("hesskit-test-" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string pointer_of(const auto& call)
{
    try {
        call();
    } catch (const SchemaError& e) {
        return e.pointer();
    }
    return "<no error>";
}

std::vector<std::string> split(const std::string& line, char sep)
{
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, sep)) out.push_back(cell);
    return out;
}

std::vector<std::string> lines(const std::string& text)
{
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

InequalityReport sample_report(const std::string& name, double lhs, double rhs)
{
    InequalityReport r;
    r.name = name;
    r.parameters = {{"n", 5}, {"k", 2}};
    r.lhs = lhs;
    r.rhs = rhs;
    r.rhs_base = rhs;
    r.witness = {{"u", "w_unit(n=5,k=2)"}};
    r.finish();
    return r;
}

} // namespace

TEST_CASE("radial field JSON round trip")
{
    const auto w = quadratic_solution(5, 2, 1.5, {}, 101);
    const auto back = radial_field_from_json(to_json(w));
    CHECK(back.dim() == 5);
    CHECK(back.r() == w.r());
    CHECK(back.u() == w.u());
    CHECK(back.du() == w.du());
    CHECK(back.kind() == RadialKind::dirichlet_ball);
    CHECK(detect_input_kind(to_json(w)) == InputKind::radial_field);
}

TEST_CASE("radial field schema errors")
{
    CHECK(pointer_of([] { (void)radial_field_from_json(R"({"n": 3, "R": 2, "samples": [[0,0,0],[1,0,0]]})"); }) == "/R");
    CHECK(pointer_of([] { (void)radial_field_from_json(R"({"n": 3, "R": 1, "samples": [[0,0,0],[1,0]]})"); }) ==
          "/samples/1");
    CHECK(pointer_of([] { (void)radial_field_from_json(R"({"R": 1, "samples": []})"); }) == "/n");
    CHECK_THROWS_AS((void)radial_field_from_json("{not json"), SchemaError);
}

TEST_CASE("grid field JSON round trip, inline and raw")
{
    const auto spec = GridSpec::ball(2, 8, 1.0, {0.25, -0.5});
    const auto u = quadratic_grid_field(spec, 0.3);
    const auto dir = scratch_dir("grid");
    for (bool raw : {false, true}) {
        const auto path = dir / (raw ? "raw.json" : "inline.json");
        write_grid_field(u, path, raw);
        const auto back = read_grid_field(path);
        CHECK(back.same_grid(u));
        CHECK(back.values() == u.values());
        if (raw) CHECK(fs::exists(dir / "raw.f64"));
    }
    CHECK(detect_input_kind(to_json(u)) == InputKind::grid_field);
}

TEST_CASE("grid field schema errors")
{
    const std::string mismatch =
        R"({"n": 2, "shape": [3, 3], "spacing": [0.5, 0.25], "radius": 0.5, "values": [0,0,0,0,0,0,0,0,0]})";
    CHECK(pointer_of([&] { (void)grid_field_from_json(mismatch); }) == "/spacing/1");
    const std::string count = R"({"n": 2, "shape": [3, 3], "spacing": 0.5, "radius": 0.5, "values": [0,0,0]})";
    CHECK(pointer_of([&] { (void)grid_field_from_json(count); }) == "/values");
    const std::string dim = R"({"n": 5, "shape": [3,3,3,3,3], "spacing": 0.5, "radius": 0.5, "values": []})";
    CHECK(pointer_of([&] { (void)grid_field_from_json(dim); }) == "/n");
}

TEST_CASE("measure JSON")
{
    const std::string ok = R"({"n": 3, "atoms": [{"x": [0,0,0], "m": 1.5}, {"x": [1,0,0], "m": 0.5}],
                               "density": {"kind": "box", "lo": [-1,-1,-1], "hi": [1,1,1], "value": 0.25}})";
    const auto mu = measure_from_json(ok);
    CHECK(mu.atoms().size() == 2);
    CHECK(mu.total_mass() == doctest::Approx(2.0 + 2.0));
    CHECK(detect_input_kind(ok) == InputKind::measure);

    CHECK(pointer_of([] { (void)measure_from_json(R"({"n": 2, "atoms": [{"x": [0,0], "m": 1}, {"x": [1,0], "m": 0}]})"); }) ==
          "/atoms/1/m");
    CHECK(pointer_of([] { (void)measure_from_json(R"({"n": 2, "atoms": [{"x": [0,0], "m": -2}]})"); }) == "/atoms/0/m");
    CHECK(pointer_of([] { (void)measure_from_json(R"({"n": 2, "density": {"kind": "cloud"}})"); }) == "/density/kind");
    CHECK_THROWS_AS((void)detect_input_kind(R"({"n": 2})"), SchemaError);
}

TEST_CASE("measure referencing a grid-field file")
{
    const auto dir = scratch_dir("measure");
    const auto spec = GridSpec::ball(2, 8, 1.0);
    write_grid_field(GridField::sample(spec, [](std::span<const double>) { return 2.0; }), dir / "rho.json", true);
    write_text(dir / "mu.json", R"({"n": 2, "density": "rho.json"})");
    const auto mu = read_measure(dir / "mu.json");
    CHECK(mu.density_mass() > 0.0);
    CHECK(mu.atoms().empty());
}

TEST_CASE("report JSON round trip keeps non-finite numbers")
{
    ReportDocument doc;
    doc.suite = "demo";
    doc.seed = 7;
    doc.version = "x";
    doc.parameters = {{"n", 5}};
    doc.blocks.push_back({"demo", {sample_report("a", 1.0, 2.0), sample_report("b", 1.0, 0.0)}});
    doc.skipped.push_back({"grid-identities", "needs 2 <= n <= 4"});
    const auto back = report_from_json(to_json(doc));
    CHECK(back.seed == 7);
    REQUIRE(back.blocks.size() == 1);
    REQUIRE(back.blocks[0].reports.size() == 2);
    CHECK(back.blocks[0].reports[1].ratio == std::numeric_limits<double>::infinity());
    CHECK(back.blocks[0].reports[0].witness == doc.blocks[0].reports[0].witness);
    CHECK(back.skipped.size() == 1);
    CHECK_FALSE(back.pass());
    CHECK(back.report_count() == 2);
}

TEST_CASE("CSV export")
{
    const auto header = lines(to_csv(ReportDocument{}));
    SUBCASE("empty report gives the header only")
    {
        REQUIRE(header.size() == 1);
        CHECK(split(header[0], ',').size() == csv_columns().size());
    }
    SUBCASE("three reports share one header and recompute their ratio")
    {
        for (int i = 0; i < 3; ++i) {
            ReportDocument doc;
            doc.suite = "demo";
            doc.blocks.push_back({"demo", {sample_report("r" + std::to_string(i), 0.1 * (i + 1), 0.7 + i)}});
            const auto rows = lines(to_csv(doc));
            REQUIRE(rows.size() == 2);
            CHECK(rows[0] == header[0]);
            const auto cols = split(header[0], ',');
            const auto cells = split(rows[1], ',');
            REQUIRE(cells.size() == cols.size());
            auto col = [&](const std::string& name) {
                return std::stod(cells[static_cast<std::size_t>(std::find(cols.begin(), cols.end(), name) - cols.begin())]);
            };
            CHECK(std::abs(col("ratio") - col("lhs") / col("rhs")) <= 1e-12 * col("ratio"));
        }
    }
}
