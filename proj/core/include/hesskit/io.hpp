#pragma once

// File formats.
//
// Grid field (JSON): {"n", "shape": [..], "spacing": h or [h, ..] (all equal),
// "center": [..], "radius", "description", "values": [..]} with values in
// row-major order (last axis fastest). Instead of "values" a file may carry
// "encoding": "f64le" and "data": "<file>", a raw little-endian float64 block
// resolved relative to the JSON file.
//
// Radial field (JSON): {"n", "R", "samples": [[r, u, u'], ..], "description",
// "kind": "dirichlet_ball" | "entire" | "free" (default dirichlet_ball),
// "tail_exponent" (entire only)}.
//
// Measure (JSON): {"n", "atoms": [{"x": [..], "m": mass}, ..], "density": ..}
// where density is a path to a grid-field file, or an object with "kind":
//   "grid-field"       {"file": path} or an inline grid field
//   "radial"           {"center", "radius", "value", "m"}: value (1 - (r/radius)^2)^m
//   "box"              {"lo", "hi", "value"}
//   "hyperplane-disk"  {"axis", "offset", "center", "radius", "value"}
//
// Schema violations raise SchemaError with a JSON pointer to the offending
// element. Non-finite numbers in reports are written as the strings "inf",
// "-inf" and "nan".

#include "hesskit/grid.hpp"
#include "hesskit/measures.hpp"
#include "hesskit/radial.hpp"
#include "hesskit/verify.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace hesskit {

enum class InputKind { grid_field, radial_field, measure };

/// Kind of a JSON input by its keys: "samples" marks a radial field, "shape"
/// a grid field, "atoms" or "density" a measure.
[[nodiscard]] InputKind detect_input_kind(const std::string& text);

[[nodiscard]] std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

/// `base_dir` resolves relative data/file references.
[[nodiscard]] GridField grid_field_from_json(const std::string& text, const std::filesystem::path& base_dir = {});
[[nodiscard]] RadialField radial_field_from_json(const std::string& text);
[[nodiscard]] DiscreteMeasure measure_from_json(const std::string& text, const std::filesystem::path& base_dir = {});

[[nodiscard]] GridField read_grid_field(const std::filesystem::path& path);
[[nodiscard]] RadialField read_radial_field(const std::filesystem::path& path);
[[nodiscard]] DiscreteMeasure read_measure(const std::filesystem::path& path);

/// Plain JSON with a "values" array.
[[nodiscard]] std::string to_json(const GridField& u);
[[nodiscard]] std::string to_json(const RadialField& u);
/// Writes `path` as JSON; with `raw` the values go to `path` with extension
/// ".f64" next to it and the header references that file.
void write_grid_field(const GridField& u, const std::filesystem::path& path, bool raw = false);
void write_radial_field(const RadialField& u, const std::filesystem::path& path);

struct SuiteBlock {
    std::string suite;
    std::vector<InequalityReport> reports;
};

struct SkippedSuite {
    std::string suite;
    std::string reason;
};

/// A run of one suite (or "all"): header plus reports in case order.
struct ReportDocument {
    std::string suite;
    std::uint64_t seed = 0;
    std::string version;
    std::vector<std::pair<std::string, double>> parameters;
    std::vector<std::pair<std::string, double>> resolutions;
    std::vector<SkippedSuite> skipped;
    std::vector<SuiteBlock> blocks;

    /// Conjunction of every report's pass flag.
    [[nodiscard]] bool pass() const;
    [[nodiscard]] std::size_t report_count() const;
};

[[nodiscard]] std::string to_json(const ReportDocument& doc);
[[nodiscard]] ReportDocument report_from_json(const std::string& text);

/// Header row of to_csv, in column order.
[[nodiscard]] const std::vector<std::string>& csv_columns();
/// One row per report: suite, name, parameters ("key=value;..."), lhs, rhs,
/// constant_used, constant_source, ratio, tolerance, equality_case, pass.
/// Numbers use 17 significant digits.
[[nodiscard]] std::string to_csv(const ReportDocument& doc);

} // namespace hesskit
