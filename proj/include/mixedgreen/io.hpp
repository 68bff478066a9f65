#pragma once

/// @file io.hpp
/// @brief Domain files, deterministic JSON/CSV serialization (17 significant
/// digits), atomic writes and input hashing.

#include "mixedgreen/bogovskii.hpp"
#include "mixedgreen/green.hpp"

#include <json.hpp>

#include <filesystem>
#include <memory>
#include <string>
#include <string_view>

namespace mixedgreen {

using Json = nlohmann::ordered_json;

/// A polygon with its boundary decomposition; the decomposition refers to `domain`.
struct DomainSpec {
    std::string name;
    std::unique_ptr<PolygonalDomain> domain;
    std::unique_ptr<BoundaryDecomposition> decomposition;
};

/// {"name"?, "vertices": [[x, y], …], "boundary": [{"edge", "t0", "t1", "label": "D"|"N"}, …],
///  "R0"?, "M"?}. Unlisted boundary is N. Throws InvalidInput on malformed input.
[[nodiscard]] DomainSpec parse_domain(const Json& json);
[[nodiscard]] DomainSpec parse_domain_text(std::string_view text);
[[nodiscard]] Json domain_to_json(const DomainSpec& spec);

/// Throws InvalidInput when the file cannot be read.
[[nodiscard]] std::string read_file(const std::filesystem::path& path);
/// Writes to a sibling temporary file, then renames over `path`.
void write_atomic(const std::filesystem::path& path, std::string_view content);
[[nodiscard]] std::string sha256_hex(std::string_view bytes);

/// printf("%.17g"); non-finite values become "nan", "inf", "-inf".
[[nodiscard]] std::string format_double(double value);
/// JSON text with every float written to 17 significant digits; non-finite floats become null.
[[nodiscard]] std::string dump_json(const Json& json, int indent = 2);

/// Header x,y,u1,u2,p; one row per mesh vertex.
[[nodiscard]] std::string field_csv(const VelocityField& u, const PressureField& p);
/// Header x1,x2,y1,y2,r,G11,G12,G21,G22,Pi1,Pi2.
[[nodiscard]] std::string green_sweep_csv(std::span<const GreenSample> samples);

/// Links (anchor or center, radius, kind, triangle count, area, overlap) and,
/// for datum f, per-link ‖f_j‖, ‖∇u_j‖ and the totals of the solve.
[[nodiscard]] Json chain_report(const BogovskiiSolver& solver, const Vector& f);

}  // namespace mixedgreen
