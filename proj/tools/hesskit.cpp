// Command line front end: verify suites, compute potentials and F_k,
// convert reports to CSV.

#include "hesskit/grid.hpp"
#include "hesskit/io.hpp"
#include "hesskit/measures.hpp"
#include "hesskit/quadrature.hpp"
#include "hesskit/radial.hpp"
#include "hesskit/suite.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

enum ExitCode { exit_pass = 0, exit_fail = 1, exit_usage = 2, exit_input = 3 };

struct InputMissing {
    fs::path path;
};

void require_file(const std::optional<fs::path>& path)
{
    if (path && !fs::is_regular_file(*path)) throw InputMissing{*path};
}

void emit(const std::optional<fs::path>& out, const std::string& text)
{
    if (out) hesskit::write_text(*out, text);
    else std::cout << text;
}

ojson number(double v)
{
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0.0 ? "inf" : "-inf";
}

int run_verify(const hesskit::SuiteConfig& cfg)
{
    require_file(cfg.field);
    require_file(cfg.measure);
    const auto doc = hesskit::run_suite(cfg);
    if (cfg.csv && !cfg.out) {
        std::cout << hesskit::to_csv(doc);
    } else {
        emit(cfg.out, hesskit::to_json(doc));
        if (cfg.csv) {
            fs::path csv = *cfg.out;
            csv.replace_extension(".csv");
            hesskit::write_text(csv, hesskit::to_csv(doc));
        }
    }
    std::size_t failed = 0;
    for (const auto& b : doc.blocks)
        for (const auto& r : b.reports)
            if (!r.pass) {
                ++failed;
                std::cerr << "FAIL " << b.suite << " " << r.name << " ratio=" << r.ratio << "\n";
            }
    for (const auto& s : doc.skipped) std::cerr << "skipped " << s.suite << ": " << s.reason << "\n";
    std::cerr << cfg.suite << ": " << doc.report_count() << " reports, " << failed << " failed\n";
    return doc.pass() ? exit_pass : exit_fail;
}

struct ComputeOptions {
    std::string what;
    std::optional<fs::path> measure, field, out;
    int k = 1;
    int points = 61;
};

/// Evaluation points along the first axis from the center of the support box.
std::vector<hesskit::Point> ray_points(const hesskit::DiscreteMeasure& mu, int count)
{
    const auto box = mu.support_box();
    hesskit::Point c(box.lo.size());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = 0.5 * (box.lo[i] + box.hi[i]);
    const double scale = mu.diameter() > 0.0 ? mu.diameter() : 1.0;
    std::vector<hesskit::Point> out;
    for (double r : hesskit::geometric_grid(0.01 * scale, 100.0 * scale, count)) {
        auto x = c;
        x[0] += r;
        out.push_back(x);
    }
    return out;
}

int run_compute(const ComputeOptions& opt)
{
    require_file(opt.measure);
    require_file(opt.field);
    if (opt.what == "wolff" || opt.what == "riesz") {
        if (!opt.measure) throw hesskit::UsageError("compute " + opt.what + " needs --measure");
        const auto mu = hesskit::read_measure(*opt.measure);
        if (opt.k < 1 || opt.k > mu.dim()) throw hesskit::UsageError("order k must satisfy 1 <= k <= n");
        const auto params = hesskit::PotentialParams::for_hessian(opt.k);
        ojson j;
        j["kind"] = opt.what;
        j["n"] = mu.dim();
        j["k"] = opt.k;
        j["alpha"] = params.alpha;
        if (opt.what == "wolff") j["p"] = params.p;
        ojson pts = ojson::array();
        for (const auto& x : ray_points(mu, opt.points)) {
            const double v = opt.what == "wolff" ? hesskit::wolff(mu, x, params) : hesskit::riesz(mu, x, params.alpha);
            pts.push_back({{"x", x}, {"value", number(v)}});
        }
        j["points"] = std::move(pts);
        emit(opt.out, j.dump(2) + "\n");
        return exit_pass;
    }
    if (!opt.field) throw hesskit::UsageError("compute fk needs --field");
    const std::string text = hesskit::read_text(*opt.field);
    const auto kind = hesskit::detect_input_kind(text);
    if (kind == hesskit::InputKind::grid_field) {
        const auto u = hesskit::grid_field_from_json(text, opt.field->parent_path());
        if (opt.k < 0 || opt.k > u.dim()) throw hesskit::UsageError("order k must satisfy 0 <= k <= n");
        emit(opt.out, hesskit::to_json(hesskit::fk_field(u, opt.k)));
        return exit_pass;
    }
    if (kind != hesskit::InputKind::radial_field)
        throw hesskit::UsageError("--field " + opt.field->string() + " holds a measure, not a field");
    const auto u = hesskit::radial_field_from_json(text);
    if (opt.k < 0 || opt.k > u.dim()) throw hesskit::UsageError("order k must satisfy 0 <= k <= n");
    const auto fk = hesskit::radial_fk(u, opt.k);
    ojson j;
    j["n"] = u.dim();
    j["k"] = opt.k;
    j["r"] = fk.r;
    ojson values = ojson::array();
    for (double v : fk.values) values.push_back(number(v));
    j["values"] = std::move(values);
    emit(opt.out, j.dump(2) + "\n");
    return exit_pass;
}

int run_report(const fs::path& input, const std::optional<fs::path>& out)
{
    require_file(input);
    emit(out, hesskit::to_csv(hesskit::report_from_json(hesskit::read_text(input))));
    return exit_pass;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"hesskit: numerical verification of k-Hessian inequalities"};
    app.set_version_flag("--version", hesskit::toolkit_version());
    app.require_subcommand(1);

    hesskit::SuiteConfig cfg;
    std::optional<int> n, k, l, samples, grid, family;
    std::optional<double> q, radius, tol;
    std::optional<std::string> measure, field, out;
    auto* verify = app.add_subcommand("verify", "Run a verification suite and write its report");
    std::string suite_help = "Suite:";
    for (const auto& s : hesskit::suite_names()) suite_help += " " + s;
    verify->add_option("suite", cfg.suite, suite_help)->required()->check(CLI::IsMember(hesskit::suite_names()));
    verify->add_option("--n", n, "Dimension");
    verify->add_option("--k", k, "Hessian order");
    verify->add_option("--l", l, "Lower order for the general Poincare inequality");
    verify->add_option("--q", q, "Integrability exponent");
    verify->add_option("--radius", radius, "Ball radius (default 1)");
    verify->add_option("--samples", samples, "Radial samples (default 10001)");
    verify->add_option("--grid", grid, "Grid cells across the ball");
    verify->add_option("--family", family, "Members of random families");
    verify->add_option("--seed", cfg.seed, "Random seed (default 1)");
    verify->add_option("--measure", measure, "Measure JSON file");
    verify->add_option("--field", field, "Grid or radial field JSON file");
    verify->add_option("--out", out, "Report file (default stdout)");
    verify->add_flag("--csv", cfg.csv, "Also write CSV (next to --out, or to stdout instead of JSON)");
    verify->add_option("--tol", tol, "Pass tolerance of sharp-constant reports (default 1e-4)");

    ComputeOptions copt;
    std::optional<std::string> cmeasure, cfield, cout_path;
    auto* compute = app.add_subcommand("compute", "Evaluate a potential or F_k");
    compute->add_option("what", copt.what, "wolff | riesz | fk")->required()->check(
        CLI::IsMember({"wolff", "riesz", "fk"}));
    compute->add_option("--measure", cmeasure, "Measure JSON file");
    compute->add_option("--field", cfield, "Grid or radial field JSON file");
    compute->add_option("--k", copt.k, "Hessian order (default 1)");
    compute->add_option("--samples", copt.points, "Evaluation points for potentials (default 61)");
    compute->add_option("--out", cout_path, "Output file (default stdout)");

    std::string report_in;
    std::optional<std::string> report_out;
    auto* report = app.add_subcommand("report", "Convert a JSON report");
    auto* to_csv = report->add_option("--to-csv", report_in, "Report JSON to flatten into CSV");
    to_csv->required();
    report->add_option("--out", report_out, "CSV file (default stdout)");

    CLI11_PARSE(app, argc, argv);

    const auto path = [](const std::optional<std::string>& s) -> std::optional<fs::path> {
        if (s) return fs::path(*s);
        return std::nullopt;
    };
    try {
        if (*verify) {
            cfg.n = n;
            cfg.k = k;
            cfg.l = l;
            cfg.q = q;
            cfg.radius = radius;
            cfg.samples = samples;
            cfg.grid = grid;
            cfg.family = family;
            cfg.tol = tol;
            cfg.measure = path(measure);
            cfg.field = path(field);
            cfg.out = path(out);
            return run_verify(cfg);
        }
        if (*compute) {
            copt.measure = path(cmeasure);
            copt.field = path(cfield);
            copt.out = path(cout_path);
            return run_compute(copt);
        }
        return run_report(report_in, path(report_out));
    } catch (const InputMissing& e) {
        std::cerr << "hesskit: input file not found: " << e.path.string() << "\n";
        return exit_input;
    } catch (const hesskit::UsageError& e) {
        std::cerr << "hesskit: usage error: " << e.what() << "\n";
        return exit_usage;
    } catch (const hesskit::SchemaError& e) {
        std::cerr << "hesskit: schema error: " << e.what() << "\n";
        return exit_input;
    } catch (const hesskit::PreconditionError& e) {
        std::cerr << "hesskit: precondition failed: " << e.what() << "\n";
        return exit_usage;
    } catch (const hesskit::Error& e) {
        std::cerr << "hesskit: " << e.what() << "\n";
        return exit_input;
    }
}
