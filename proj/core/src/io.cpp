#include "hesskit/io.hpp"

#include "hesskit/error.hpp"

#include <nlohmann/json.hpp>

#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>

namespace hesskit {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

std::string escape_pointer(const std::string& key)
{
    std::string out;
    for (char c : key) {
        if (c == '~') out += "~0";
        else if (c == '/') out += "~1";
        else out += c;
    }
    return out;
}

/// A JSON value together with its pointer, so every schema error can name
/// the element it is about.
class Node {
public:
    Node(const json& j, std::string ptr) : j_(&j), ptr_(std::move(ptr)) {}

    [[nodiscard]] const std::string& ptr() const noexcept { return ptr_; }
    [[nodiscard]] const json& raw() const noexcept { return *j_; }

    [[nodiscard]] bool has(const std::string& key) const { return j_->is_object() && j_->contains(key); }

    [[nodiscard]] Node at(const std::string& key) const
    {
        if (!j_->is_object()) fail("expected an object");
        const auto it = j_->find(key);
        if (it == j_->end()) throw SchemaError(ptr_ + "/" + escape_pointer(key), "missing required field");
        return {*it, ptr_ + "/" + escape_pointer(key)};
    }

    [[nodiscard]] std::optional<Node> find(const std::string& key) const
    {
        if (!has(key)) return std::nullopt;
        return at(key);
    }

    [[nodiscard]] std::size_t size() const
    {
        if (!j_->is_array()) fail("expected an array");
        return j_->size();
    }

    [[nodiscard]] Node operator[](std::size_t i) const
    {
        if (!j_->is_array() || i >= j_->size()) fail("expected an array with an element " + std::to_string(i));
        return {(*j_)[i], ptr_ + "/" + std::to_string(i)};
    }

    [[nodiscard]] double number() const
    {
        if (j_->is_number()) return j_->get<double>();
        if (j_->is_string()) {
            const auto s = j_->get<std::string>();
            if (s == "inf") return std::numeric_limits<double>::infinity();
            if (s == "-inf") return -std::numeric_limits<double>::infinity();
            if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
        }
        fail("expected a number");
    }

    [[nodiscard]] double finite() const
    {
        const double v = number();
        if (!std::isfinite(v)) fail("expected a finite number");
        return v;
    }

    [[nodiscard]] double positive() const
    {
        const double v = finite();
        if (!(v > 0.0)) fail("must be positive");
        return v;
    }

    [[nodiscard]] long long integer() const
    {
        if (!j_->is_number_integer()) fail("expected an integer");
        return j_->get<long long>();
    }

    [[nodiscard]] std::string string() const
    {
        if (!j_->is_string()) fail("expected a string");
        return j_->get<std::string>();
    }

    [[nodiscard]] bool boolean() const
    {
        if (!j_->is_boolean()) fail("expected a boolean");
        return j_->get<bool>();
    }

    [[nodiscard]] std::vector<double> vector(std::size_t expected) const
    {
        if (size() != expected) fail("expected " + std::to_string(expected) + " entries, got " + std::to_string(size()));
        std::vector<double> out(expected);
        for (std::size_t i = 0; i < expected; ++i) out[i] = (*this)[i].finite();
        return out;
    }

    [[noreturn]] void fail(const std::string& what) const { throw SchemaError(ptr_, what); }

private:
    const json* j_;
    std::string ptr_;
};

json parse(const std::string& text)
{
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaError("", std::string("malformed JSON: ") + e.what());
    }
}

ojson num(double v)
{
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0.0 ? "inf" : "-inf";
}

std::string dump(const ojson& j)
{
    return j.dump(2) + "\n";
}

fs::path resolve(const fs::path& base, const std::string& ref)
{
    const fs::path p(ref);
    return p.is_absolute() || base.empty() ? p : base / p;
}

std::vector<double> read_f64le(const fs::path& path, std::size_t count, const std::string& ptr)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError(ptr, "cannot open data file " + path.string());
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (bytes.size() != 8 * count)
        throw SchemaError(ptr, "data file " + path.string() + " holds " + std::to_string(bytes.size()) +
                                   " bytes, expected " + std::to_string(8 * count));
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::uint64_t bits = 0;
        for (int b = 7; b >= 0; --b) bits = (bits << 8) | bytes[8 * i + static_cast<std::size_t>(b)];
        out[i] = std::bit_cast<double>(bits);
    }
    return out;
}

void write_f64le(const fs::path& path, const std::vector<double>& values)
{
    std::string bytes(8 * values.size(), '\0');
    for (std::size_t i = 0; i < values.size(); ++i) {
        auto bits = std::bit_cast<std::uint64_t>(values[i]);
        for (int b = 0; b < 8; ++b) {
            bytes[8 * i + static_cast<std::size_t>(b)] = static_cast<char>(bits & 0xffu);
            bits >>= 8;
        }
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("cannot write " + path.string());
}

GridField grid_from_node(const Node& root, const fs::path& base)
{
    const long long n = root.at("n").integer();
    if (n < 2 || n > 4) root.at("n").fail("grid fields need 2 <= n <= 4");
    const auto un = static_cast<std::size_t>(n);
    GridSpec spec;
    spec.n = static_cast<int>(n);
    const Node shape = root.at("shape");
    if (shape.size() != un) shape.fail("expected " + std::to_string(n) + " axis lengths");
    std::size_t count = 1;
    for (std::size_t a = 0; a < un; ++a) {
        const long long e = shape[a].integer();
        if (e < 1) shape[a].fail("axis length must be positive");
        spec.shape.push_back(static_cast<int>(e));
        count *= static_cast<std::size_t>(e);
    }
    const Node spacing = root.at("spacing");
    if (spacing.raw().is_array()) {
        if (spacing.size() != un) spacing.fail("expected " + std::to_string(n) + " spacings");
        spec.spacing = spacing[0].positive();
        for (std::size_t a = 1; a < un; ++a)
            if (spacing[a].positive() != spec.spacing)
                spacing[a].fail("spacing differs from axis 0; grids must be uniform across axes");
    } else {
        spec.spacing = spacing.positive();
    }
    spec.center = root.has("center") ? root.at("center").vector(un) : std::vector<double>(un, 0.0);
    spec.radius = root.at("radius").positive();
    const std::string description = root.has("description") ? root.at("description").string() : std::string{};

    std::vector<double> values;
    if (root.has("values")) {
        const Node v = root.at("values");
        if (v.size() != count)
            v.fail("expected " + std::to_string(count) + " values for the given shape, got " + std::to_string(v.size()));
        values.resize(count);
        for (std::size_t i = 0; i < count; ++i) values[i] = v[i].finite();
    } else {
        const Node enc = root.at("encoding");
        if (enc.string() != "f64le") enc.fail("only the f64le encoding is supported");
        const Node data = root.at("data");
        values = read_f64le(resolve(base, data.string()), count, data.ptr());
        for (std::size_t i = 0; i < count; ++i)
            if (!std::isfinite(values[i])) data.fail("non-finite value at index " + std::to_string(i));
    }
    try {
        spec.validate();
        return GridField(std::move(spec), std::move(values), description);
    } catch (const PreconditionError& e) {
        throw SchemaError(root.ptr(), e.what());
    }
}

Point point_of(const Node& node, int n)
{
    return node.vector(static_cast<std::size_t>(n));
}

DensityPart density_from_node(const Node& node, int n, const fs::path& base)
{
    if (node.raw().is_string()) {
        const fs::path p = resolve(base, node.string());
        return GridDensityPart{read_grid_field(p)};
    }
    const std::string kind = node.at("kind").string();
    if (kind == "grid-field") {
        if (node.has("file")) return GridDensityPart{read_grid_field(resolve(base, node.at("file").string()))};
        return GridDensityPart{grid_from_node(node, base)};
    }
    if (kind == "radial") {
        const double radius = node.at("radius").positive();
        const double value = node.has("value") ? node.at("value").finite() : 1.0;
        const long long m = node.has("m") ? node.at("m").integer() : 0;
        if (m < 0) node.at("m").fail("exponent must be nonnegative");
        if (value < 0.0) node.at("value").fail("density must be nonnegative");
        return RadialDensityPart{point_of(node.at("center"), n),
                                 RadialDensity::polynomial_bump(static_cast<int>(m), radius, value)};
    }
    if (kind == "box") {
        const double value = node.has("value") ? node.at("value").finite() : 1.0;
        if (value < 0.0) node.at("value").fail("density must be nonnegative");
        return BoxDensityPart{point_of(node.at("lo"), n), point_of(node.at("hi"), n), value};
    }
    if (kind == "hyperplane-disk") {
        const long long axis = node.at("axis").integer();
        if (axis < 0 || axis >= n) node.at("axis").fail("axis out of range");
        const double value = node.has("value") ? node.at("value").finite() : 1.0;
        if (value < 0.0) node.at("value").fail("density must be nonnegative");
        return HyperplaneDiskPart{static_cast<int>(axis), node.at("offset").finite(), point_of(node.at("center"), n),
                                  node.at("radius").positive(), value};
    }
    node.at("kind").fail("unknown density kind '" + kind + "'");
}

ojson report_json(const InequalityReport& r)
{
    ojson params = ojson::object();
    for (const auto& [k, v] : r.parameters) params[k] = num(v);
    ojson witness = ojson::object();
    for (const auto& [k, v] : r.witness) witness[k] = v;
    ojson j;
    j["name"] = r.name;
    j["parameters"] = params;
    j["lhs"] = num(r.lhs);
    j["rhs"] = num(r.rhs);
    j["rhs_base"] = num(r.rhs_base);
    j["constant_used"] = num(r.constant_used);
    j["constant_source"] = to_string(r.constant_source);
    j["ratio"] = num(r.ratio);
    j["tolerance"] = num(r.tolerance);
    j["equality_case"] = r.equality_case;
    j["pass"] = r.pass;
    j["witness"] = witness;
    return j;
}

InequalityReport report_from_node(const Node& node)
{
    InequalityReport r;
    r.name = node.at("name").string();
    const Node params = node.at("parameters");
    if (!params.raw().is_object()) params.fail("expected an object");
    for (const auto& [k, v] : params.raw().items()) r.parameters.emplace_back(k, Node(v, params.ptr() + "/" + k).number());
    r.lhs = node.at("lhs").number();
    r.rhs = node.at("rhs").number();
    r.rhs_base = node.has("rhs_base") ? node.at("rhs_base").number() : r.rhs;
    r.constant_used = node.at("constant_used").number();
    try {
        r.constant_source = constant_source_from_string(node.at("constant_source").string());
    } catch (const PreconditionError& e) {
        node.at("constant_source").fail(e.what());
    }
    r.ratio = node.at("ratio").number();
    r.tolerance = node.at("tolerance").number();
    r.equality_case = node.at("equality_case").boolean();
    r.pass = node.at("pass").boolean();
    if (node.has("witness")) {
        const Node w = node.at("witness");
        if (!w.raw().is_object()) w.fail("expected an object");
        for (const auto& [k, v] : w.raw().items()) r.witness.emplace_back(k, Node(v, w.ptr() + "/" + k).string());
    }
    return r;
}

ojson pairs_json(const std::vector<std::pair<std::string, double>>& pairs)
{
    ojson j = ojson::object();
    for (const auto& [k, v] : pairs) j[k] = num(v);
    return j;
}

std::vector<std::pair<std::string, double>> pairs_from(const Node& node)
{
    if (!node.raw().is_object()) node.fail("expected an object");
    std::vector<std::pair<std::string, double>> out;
    for (const auto& [k, v] : node.raw().items()) out.emplace_back(k, Node(v, node.ptr() + "/" + k).number());
    return out;
}

std::string g17(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0.0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

} // namespace

std::string read_text(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
    if (!out) throw Error("cannot write " + path.string());
}

InputKind detect_input_kind(const std::string& text)
{
    const json j = parse(text);
    if (!j.is_object()) throw SchemaError("", "expected an object");
    if (j.contains("samples")) return InputKind::radial_field;
    if (j.contains("shape")) return InputKind::grid_field;
    if (j.contains("atoms") || j.contains("density")) return InputKind::measure;
    throw SchemaError("", "cannot tell a grid field, radial field or measure apart");
}

GridField grid_field_from_json(const std::string& text, const fs::path& base_dir)
{
    const json j = parse(text);
    return grid_from_node(Node(j, ""), base_dir);
}

RadialField radial_field_from_json(const std::string& text)
{
    const json j = parse(text);
    const Node root(j, "");
    const long long n = root.at("n").integer();
    if (n < 1) root.at("n").fail("dimension must be >= 1");
    const double big_r = root.at("R").positive();
    const Node samples = root.at("samples");
    const std::size_t m = samples.size();
    std::vector<double> r(m), u(m), du(m);
    for (std::size_t i = 0; i < m; ++i) {
        const auto row = samples[i].vector(3);
        r[i] = row[0];
        u[i] = row[1];
        du[i] = row[2];
    }
    if (m == 0 || std::abs(r.back() - big_r) > 1e-12 * big_r)
        root.at("R").fail("R must equal the last sample radius");
    RadialKind kind = RadialKind::dirichlet_ball;
    if (root.has("kind")) {
        try {
            kind = radial_kind_from_string(root.at("kind").string());
        } catch (const PreconditionError& e) {
            root.at("kind").fail(e.what());
        }
    }
    const double tail = root.has("tail_exponent") ? root.at("tail_exponent").number()
                                                  : std::numeric_limits<double>::quiet_NaN();
    const std::string description = root.has("description") ? root.at("description").string() : std::string{};
    try {
        return RadialField(static_cast<int>(n), std::move(r), std::move(u), std::move(du), kind, description, tail);
    } catch (const PreconditionError& e) {
        throw SchemaError("/samples", e.what());
    }
}

DiscreteMeasure measure_from_json(const std::string& text, const fs::path& base_dir)
{
    const json j = parse(text);
    const Node root(j, "");
    const long long n = root.at("n").integer();
    if (n < 1) root.at("n").fail("dimension must be >= 1");
    const int dim = static_cast<int>(n);
    std::vector<Atom> atoms;
    if (root.has("atoms")) {
        const Node list = root.at("atoms");
        for (std::size_t i = 0; i < list.size(); ++i) {
            const Node a = list[i];
            const double m = a.at("m").finite();
            if (!(m > 0.0)) a.at("m").fail("atom mass must be positive");
            atoms.push_back({point_of(a.at("x"), dim), m});
        }
    }
    std::optional<DensityPart> density;
    if (root.has("density") && !root.at("density").raw().is_null())
        density = density_from_node(root.at("density"), dim, base_dir);
    try {
        return DiscreteMeasure(dim, std::move(atoms), std::move(density));
    } catch (const PreconditionError& e) {
        throw SchemaError(root.has("density") ? "/density" : "", e.what());
    }
}

GridField read_grid_field(const fs::path& path)
{
    return grid_field_from_json(read_text(path), path.parent_path());
}

RadialField read_radial_field(const fs::path& path)
{
    return radial_field_from_json(read_text(path));
}

DiscreteMeasure read_measure(const fs::path& path)
{
    return measure_from_json(read_text(path), path.parent_path());
}

namespace {

ojson grid_header(const GridField& u)
{
    const auto& s = u.spec();
    ojson j;
    j["n"] = s.n;
    j["shape"] = s.shape;
    j["spacing"] = s.spacing;
    j["center"] = s.center;
    j["radius"] = s.radius;
    j["description"] = u.description();
    return j;
}

} // namespace

std::string to_json(const GridField& u)
{
    ojson j = grid_header(u);
    j["values"] = u.values();
    return dump(j);
}

std::string to_json(const RadialField& u)
{
    ojson j;
    j["n"] = u.dim();
    j["R"] = u.radius();
    j["kind"] = to_string(u.kind());
    if (u.kind() == RadialKind::entire) j["tail_exponent"] = u.tail_exponent();
    j["description"] = u.description();
    ojson samples = ojson::array();
    for (std::size_t i = 0; i < u.size(); ++i) samples.push_back({u.r()[i], u.u()[i], u.du()[i]});
    j["samples"] = std::move(samples);
    return dump(j);
}

void write_grid_field(const GridField& u, const fs::path& path, bool raw)
{
    if (!raw) {
        write_text(path, to_json(u));
        return;
    }
    fs::path data = path;
    data.replace_extension(".f64");
    write_f64le(data, u.values());
    ojson j = grid_header(u);
    j["encoding"] = "f64le";
    j["data"] = data.filename().string();
    write_text(path, dump(j));
}

void write_radial_field(const RadialField& u, const fs::path& path)
{
    write_text(path, to_json(u));
}

bool ReportDocument::pass() const
{
    for (const auto& b : blocks)
        for (const auto& r : b.reports)
            if (!r.pass) return false;
    return true;
}

std::size_t ReportDocument::report_count() const
{
    std::size_t c = 0;
    for (const auto& b : blocks) c += b.reports.size();
    return c;
}

std::string to_json(const ReportDocument& doc)
{
    ojson j;
    j["suite"] = doc.suite;
    j["seed"] = doc.seed;
    j["version"] = doc.version;
    j["parameters"] = pairs_json(doc.parameters);
    j["resolutions"] = pairs_json(doc.resolutions);
    ojson skipped = ojson::array();
    for (const auto& s : doc.skipped) skipped.push_back({{"suite", s.suite}, {"reason", s.reason}});
    j["skipped"] = std::move(skipped);
    j["pass"] = doc.pass();
    ojson suites = ojson::array();
    for (const auto& b : doc.blocks) {
        ojson reports = ojson::array();
        for (const auto& r : b.reports) reports.push_back(report_json(r));
        ojson block;
        block["suite"] = b.suite;
        block["reports"] = std::move(reports);
        suites.push_back(std::move(block));
    }
    j["suites"] = std::move(suites);
    return dump(j);
}

ReportDocument report_from_json(const std::string& text)
{
    const json j = parse(text);
    const Node root(j, "");
    ReportDocument doc;
    doc.suite = root.at("suite").string();
    const long long seed = root.at("seed").integer();
    doc.seed = static_cast<std::uint64_t>(seed);
    doc.version = root.at("version").string();
    doc.parameters = pairs_from(root.at("parameters"));
    doc.resolutions = pairs_from(root.at("resolutions"));
    if (root.has("skipped")) {
        const Node s = root.at("skipped");
        for (std::size_t i = 0; i < s.size(); ++i) doc.skipped.push_back({s[i].at("suite").string(), s[i].at("reason").string()});
    }
    const Node suites = root.at("suites");
    for (std::size_t i = 0; i < suites.size(); ++i) {
        SuiteBlock b;
        b.suite = suites[i].at("suite").string();
        const Node reports = suites[i].at("reports");
        for (std::size_t r = 0; r < reports.size(); ++r) b.reports.push_back(report_from_node(reports[r]));
        doc.blocks.push_back(std::move(b));
    }
    return doc;
}

const std::vector<std::string>& csv_columns()
{
    static const std::vector<std::string> cols{"suite",         "name",       "parameters",      "lhs",
                                               "rhs",           "constant_used", "constant_source", "ratio",
                                               "tolerance",     "equality_case", "pass"};
    return cols;
}

std::string to_csv(const ReportDocument& doc)
{
    std::string out;
    for (std::size_t i = 0; i < csv_columns().size(); ++i) out += (i ? "," : "") + csv_columns()[i];
    out += "\n";
    for (const auto& b : doc.blocks) {
        for (const auto& r : b.reports) {
            std::string params;
            for (const auto& [k, v] : r.parameters) params += (params.empty() ? "" : ";") + k + "=" + g17(v);
            out += csv_field(b.suite) + "," + csv_field(r.name) + "," + csv_field(params) + "," + g17(r.lhs) + "," +
                   g17(r.rhs) + "," + g17(r.constant_used) + "," + to_string(r.constant_source) + "," + g17(r.ratio) +
                   "," + g17(r.tolerance) + "," + (r.equality_case ? "true" : "false") + "," +
                   (r.pass ? "true" : "false") + "\n";
        }
    }
    return out;
}

} // namespace hesskit
