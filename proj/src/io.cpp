#include "mixedgreen/io.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace mixedgreen {

namespace {

BoundaryLabel parse_label(const Json& j) {
    const std::string s = j.get<std::string>();
    if (s == "D") return BoundaryLabel::Dirichlet;
    if (s == "N") return BoundaryLabel::Neumann;
    throw InvalidInput("boundary label must be \"D\" or \"N\", got \"" + s + "\"");
}

void dump(const Json& j, int indent, int depth, std::string& out) {
    const auto newline = [&](int d) {
        if (indent < 0) return;
        out += '\n';
        out.append(static_cast<std::size_t>(indent * d), ' ');
    };
    switch (j.type()) {
    case Json::value_t::object: {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += '{';
        bool first = true;
        for (const auto& [key, value] : j.items()) {
            if (!first) out += ',';
            first = false;
            newline(depth + 1);
            out += Json(key).dump();
            out += indent < 0 ? ":" : ": ";
            dump(value, indent, depth + 1, out);
        }
        newline(depth);
        out += '}';
        return;
    }
    case Json::value_t::array: {
        if (j.empty()) {
            out += "[]";
            return;
        }
        out += '[';
        bool first = true;
        for (const auto& value : j) {
            if (!first) out += ',';
            first = false;
            newline(depth + 1);
            dump(value, indent, depth + 1, out);
        }
        newline(depth);
        out += ']';
        return;
    }
    case Json::value_t::number_float: {
        const double v = j.get<double>();
        out += std::isfinite(v) ? format_double(v) : "null";
        return;
    }
    default:
        out += j.dump();
    }
}

double weighted_l2(const Vector& f, const std::vector<double>& w) {
    double s = 0.0;
    for (Index k = 0; k < f.size(); ++k) s += w[static_cast<std::size_t>(k)] * f[k] * f[k];
    return std::sqrt(s);
}

}  // namespace

DomainSpec parse_domain(const Json& json) {
    try {
        if (!json.is_object()) throw InvalidInput("domain file must hold a JSON object");
        std::vector<Vec2> vertices;
        for (const auto& v : json.at("vertices")) {
            if (!v.is_array() || v.size() != 2) throw InvalidInput("each vertex must be [x, y]");
            vertices.emplace_back(v[0].get<double>(), v[1].get<double>());
        }
        std::optional<double> M, R0;
        if (json.contains("M") && !json["M"].is_null()) M = json["M"].get<double>();
        if (json.contains("R0") && !json["R0"].is_null()) R0 = json["R0"].get<double>();
        DomainSpec spec;
        spec.name = json.value("name", std::string("domain"));
        spec.domain = std::make_unique<PolygonalDomain>(std::move(vertices), M, R0);
        std::vector<LabeledInterval> segments;
        if (json.contains("boundary")) {
            for (const auto& b : json.at("boundary")) {
                const auto edge = b.at("edge").get<std::int64_t>();
                if (edge < 0 || static_cast<std::size_t>(edge) >= spec.domain->num_edges())
                    throw InvalidInput("boundary segment refers to edge " + std::to_string(edge) + " which does not exist");
                segments.push_back({static_cast<std::size_t>(edge), b.value("t0", 0.0), b.value("t1", 1.0),
                                    parse_label(b.at("label"))});
            }
        }
        spec.decomposition = std::make_unique<BoundaryDecomposition>(*spec.domain, segments);
        return spec;
    } catch (const Json::exception& e) {
        throw InvalidInput(std::string("malformed domain file: ") + e.what());
    }
}

DomainSpec parse_domain_text(std::string_view text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::exception& e) {
        throw InvalidInput(std::string("malformed JSON: ") + e.what());
    }
    return parse_domain(j);
}

Json domain_to_json(const DomainSpec& spec) {
    const PolygonalDomain& d = *spec.domain;
    Json j;
    j["name"] = spec.name;
    j["vertices"] = Json::array();
    for (const Vec2& v : d.vertices()) j["vertices"].push_back({v.x(), v.y()});
    j["boundary"] = Json::array();
    for (std::size_t e = 0; e < d.num_edges(); ++e)
        for (const auto& iv : spec.decomposition->dirichlet_intervals(e))
            j["boundary"].push_back({{"edge", e}, {"t0", iv[0]}, {"t1", iv[1]}, {"label", "D"}});
    j["R0"] = d.scale_R0();
    j["M"] = d.lipschitz_M();
    return j;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot read " + path.string());
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw InvalidInput("cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw InvalidInput("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string sha256_hex(std::string_view bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw NumericalFailure("SHA-256 digest failed");
    std::string hex;
    char buf[3];
    for (unsigned int i = 0; i < len; ++i) {
        std::snprintf(buf, sizeof buf, "%02x", digest[i]);
        hex += buf;
    }
    return hex;
}

std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

std::string dump_json(const Json& json, int indent) {
    std::string out;
    dump(json, indent, 0, out);
    out += '\n';
    return out;
}

std::string field_csv(const VelocityField& u, const PressureField& p) {
    const TriangleMesh& mesh = u.space().mesh();
    const Vector& c = u.coefficients();
    std::string out = "x,y,u1,u2,p\n";
    for (Index n = 0; n < mesh.num_nodes(); ++n) {
        const Vec2& x = mesh.nodes()[static_cast<std::size_t>(n)];
        out += format_double(x.x()) + ',' + format_double(x.y()) + ',' + format_double(c[2 * n]) + ',' +
               format_double(c[2 * n + 1]) + ',' + format_double(p.coefficients()[n]) + '\n';
    }
    return out;
}

std::string green_sweep_csv(std::span<const GreenSample> samples) {
    std::string out = "x1,x2,y1,y2,r,G11,G12,G21,G22,Pi1,Pi2\n";
    for (const GreenSample& s : samples) {
        const double row[] = {s.x.x(),  s.x.y(),  s.y.x(),  s.y.y(),  s.r,     s.G(0, 0),
                              s.G(0, 1), s.G(1, 0), s.G(1, 1), s.Pi.x(), s.Pi.y()};
        for (std::size_t i = 0; i < std::size(row); ++i) out += (i ? "," : "") + format_double(row[i]);
        out += '\n';
    }
    return out;
}

Json chain_report(const BogovskiiSolver& solver, const Vector& f) {
    const ChainCover& chain = solver.chain();
    const std::vector<double>& w = solver.quadrature().weight;
    const std::vector<Vector> parts = solver.decompose(f);
    const std::vector<VelocityField> pieces = solver.stages(f);
    Json j;
    j["R0"] = chain.R0;
    j["flux_radius"] = chain.flux_radius;
    j["flux_anchor"] = {{"edge", chain.flux_anchor.edge},
                        {"t", chain.flux_anchor.t},
                        {"point", {chain.flux_anchor.point.x(), chain.flux_anchor.point.y()}}};
    j["flux_window"] = chain.flux_window;
    j["min_overlap_ratio"] = chain.min_overlap_ratio();
    j["links"] = Json::array();
    for (std::size_t k = 0; k < chain.links.size(); ++k) {
        const ChainLink& link = chain.links[k];
        Json l;
        l["index"] = k;
        l["kind"] = link.region.kind() == LocalDomainKind::InteriorDisk ? "disk" : "cylinder";
        const Vec2 c = link.region.anchor() ? link.region.anchor()->point : link.region.center();
        l["anchor"] = {c.x(), c.y()};
        l["radius"] = link.region.radius();
        l["triangles"] = link.triangles.size();
        l["area"] = link.area;
        l["overlap_area"] = link.overlap_area;
        l["datum_l2"] = weighted_l2(parts[k], w);
        l["velocity_grad_l2"] = sobolev_seminorms(pieces[k], chain.R0).grad_l2;
        j["links"].push_back(std::move(l));
    }
    const BogovskiiReport r = solver.check(f);
    j["totals"] = {{"divergence_residual", r.divergence_residual},
                   {"dirichlet_trace", r.dirichlet_trace},
                   {"neumann_flux", r.neumann_flux},
                   {"stability", r.stability},
                   {"decomposition_constant", r.decomposition_constant},
                   {"local_constant", r.local_constant}};
    return j;
}

}  // namespace mixedgreen
